//! Subcommand implementations. Each returns the list of files it wrote.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use ipw_eval::deployment::{self, PopulationRecipe, ScoredPopulation, SweepRow};
use ipw_eval::experiments::{run_scenario, ScenarioResult, ScenarioRunConfig};
use ipw_eval::report;
use ipw_eval::seed::derive_seed;
use ipw_eval::synthetic::{DgpParams, Scenario, ScenarioSpec};
use ipw_eval::validate::{run_validation, Fault, ValidationOptions};
use serde::Serialize;

use crate::config::{DeployParams, FaultArg, PopulationSource, RunConfig, ScenarioParams};
use crate::svg;

/// Below this many examples of either class, sweep intervals are unreliable.
const SMALL_CLASS_WARNING: usize = 30;

/// Why a command failed; determines the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad input or computation error (exit 2).
    Runtime(anyhow::Error),
    /// Self-test properties failed (exit 3).
    Validation(usize),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

struct Writer<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    fn new(dir: &'a Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir,
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }

    fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }
}

fn scenario_config(cfg: &RunConfig, params: &ScenarioParams) -> ScenarioRunConfig {
    ScenarioRunConfig {
        n: cfg.n,
        n_reps: cfg.n_reps,
        threshold: params.threshold,
        seed: cfg.seed,
        ..Default::default()
    }
}

/// Runs the selected scenarios in order, stopping at the first failure but
/// returning what completed.
fn run_scenarios(
    cfg: &RunConfig,
    params: &ScenarioParams,
) -> (Vec<ScenarioResult>, Option<anyhow::Error>) {
    let run_cfg = scenario_config(cfg, params);
    let mut results = Vec::new();
    for &scenario in &params.scenarios {
        let mut spec = ScenarioSpec::new(scenario);
        spec.delta_mode = params.delta;
        match run_scenario(&spec, &run_cfg) {
            Ok(mut r) => {
                r.retain_metrics(&params.metrics);
                eprintln!(
                    "{}: {} replicates, {:.1}% of labels observed",
                    scenario.name(),
                    r.n_reps,
                    100.0 * r.mean_observed_fraction
                );
                results.push(r);
            }
            Err(e) => {
                return (
                    results,
                    Some(anyhow::Error::new(e).context(format!("scenario {}", scenario.name()))),
                )
            }
        }
    }
    (results, None)
}

fn write_calibration(w: &mut Writer, cfg: &RunConfig, results: &[ScenarioResult]) -> Result<()> {
    if cfg.formats.csv {
        w.write("calibration.csv", &report::calibration_csv(results)?)?;
    }
    if cfg.formats.svg {
        for r in results {
            w.write(
                &format!("calibration_{}.svg", r.spec.scenario.name()),
                &svg::calibration_panel(r),
            )?;
        }
    }
    Ok(())
}

pub fn scenarios(cfg: &RunConfig, params: &ScenarioParams) -> Result<Vec<PathBuf>, Failure> {
    let (results, failure) = run_scenarios(cfg, params);
    let mut w = Writer::new(&cfg.output_dir)?;
    let complete = params.scenarios == Scenario::ALL && results.len() == Scenario::ALL.len();
    let text = report::metrics_table(&results);
    // Ignore stdout errors (e.g. a closed pipe); the files are the output.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    w.write("table1.txt", &text)?;
    if cfg.formats.csv {
        let csv = if complete {
            report::table1_report(&results)
                .map_err(anyhow::Error::new)?
                .csv
        } else {
            report::metrics_csv(&results).map_err(anyhow::Error::new)?
        };
        w.write("table1.csv", &csv)?;
    }
    write_calibration(&mut w, cfg, &results)?;
    if cfg.formats.json {
        w.json("table1.json", &results)?;
    }
    match failure {
        Some(e) => Err(Failure::Runtime(e)),
        None => Ok(w.written),
    }
}

pub fn calibration(cfg: &RunConfig, params: &ScenarioParams) -> Result<Vec<PathBuf>, Failure> {
    let (results, failure) = run_scenarios(cfg, params);
    let mut w = Writer::new(&cfg.output_dir)?;
    write_calibration(&mut w, cfg, &results)?;
    if cfg.formats.json {
        #[derive(Serialize)]
        struct Entry<'a> {
            scenario: Scenario,
            calibration: &'a [ipw_eval::experiments::CalibrationSummary],
        }
        let entries: Vec<Entry> = results
            .iter()
            .map(|r| Entry {
                scenario: r.spec.scenario,
                calibration: &r.calibration,
            })
            .collect();
        w.json("calibration.json", &entries)?;
    }
    match failure {
        Some(e) => Err(Failure::Runtime(e)),
        None => Ok(w.written),
    }
}

fn load_population(cfg: &RunConfig, source: &PopulationSource) -> Result<ScoredPopulation> {
    let pop_seed = derive_seed(cfg.seed, 0x504f50);
    let pop = match source {
        PopulationSource::Dgp => ScoredPopulation::from_dgp(DgpParams::default(), cfg.n, pop_seed)?,
        PopulationSource::Clinical {
            prevalence,
            separation,
        } => deployment::synthetic_clinical_population(cfg.n, *prevalence, *separation, pop_seed)?,
        PopulationSource::External(path) => ScoredPopulation::from_csv_path(path)
            .with_context(|| format!("loading population {}", path.display()))?,
    };
    let (pos, neg) = pop.class_counts();
    if pos.min(neg) < SMALL_CLASS_WARNING {
        eprintln!(
            "warning: population has only {} examples ({pos} positive, {neg} negative); intervals will be wide",
            pop.len()
        );
    }
    Ok(pop)
}

fn recipe(cfg: &RunConfig, source: &PopulationSource) -> Option<PopulationRecipe> {
    match *source {
        PopulationSource::Dgp => Some(PopulationRecipe::Dgp {
            dgp: DgpParams::default(),
            n: cfg.n,
        }),
        PopulationSource::Clinical {
            prevalence,
            separation,
        } => Some(PopulationRecipe::Clinical {
            n: cfg.n,
            prevalence,
            separation,
        }),
        PopulationSource::External(_) => None,
    }
}

pub fn deploy_sweep(cfg: &RunConfig, params: &DeployParams) -> Result<Vec<PathBuf>, Failure> {
    let pop = load_population(cfg, &params.population)?;
    eprintln!(
        "population: {} examples, prevalence {:.3}, AUROC {:.3}",
        pop.len(),
        pop.prevalence(),
        pop.auroc().map_err(anyhow::Error::new)?
    );
    let (pt_rows, withhold_rows) = match recipe(cfg, &params.population) {
        Some(recipe) if params.resample_population => (
            deployment::sweep_p_t_resampled(
                &recipe,
                &params.pt_grid,
                params.fixed_p_withhold,
                cfg.n_reps,
                cfg.seed,
            ),
            deployment::sweep_p_withhold_resampled(
                &recipe,
                &params.withhold_grid,
                params.fixed_p_t,
                cfg.n_reps,
                cfg.seed,
            ),
        ),
        _ => (
            deployment::sweep_p_t(
                &pop,
                &params.pt_grid,
                params.fixed_p_withhold,
                cfg.n_reps,
                cfg.seed,
            ),
            deployment::sweep_p_withhold(
                &pop,
                &params.withhold_grid,
                params.fixed_p_t,
                cfg.n_reps,
                cfg.seed,
            ),
        ),
    };
    let pt_rows: Vec<SweepRow> = pt_rows.map_err(anyhow::Error::new).context("p_t sweep")?;
    let withhold_rows: Vec<SweepRow> = withhold_rows
        .map_err(anyhow::Error::new)
        .context("p_withhold sweep")?;

    let mut w = Writer::new(&cfg.output_dir)?;
    if cfg.formats.csv {
        w.write(
            "sweep_pt.csv",
            &report::sweep_csv(&pt_rows).map_err(anyhow::Error::new)?,
        )?;
        w.write(
            "sweep_withhold.csv",
            &report::sweep_csv(&withhold_rows).map_err(anyhow::Error::new)?,
        )?;
    }
    if cfg.formats.svg {
        w.write("figure3.svg", &svg::sweep_figure(&pt_rows, &withhold_rows))?;
    }
    if cfg.formats.json {
        #[derive(Serialize)]
        struct Sweeps<'a> {
            population_size: usize,
            prevalence: f64,
            p_t: &'a [SweepRow],
            p_withhold: &'a [SweepRow],
        }
        w.json(
            "sweep.json",
            &Sweeps {
                population_size: pop.len(),
                prevalence: pop.prevalence(),
                p_t: &pt_rows,
                p_withhold: &withhold_rows,
            },
        )?;
    }
    Ok(w.written)
}

pub fn validate(
    cfg: &RunConfig,
    quick: bool,
    fault: Option<FaultArg>,
) -> Result<Vec<PathBuf>, Failure> {
    let opts = ValidationOptions {
        quick,
        seed: cfg.seed,
        fault: fault.map(|f| match f {
            FaultArg::UninvertedWeights => Fault::UninvertedWeights,
        }),
    };
    let outcomes = run_validation(&opts);
    let mut failed = 0;
    let mut stdout = std::io::stdout().lock();
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(
            stdout,
            "{status} {} ({} cases): {}",
            o.name, o.cases, o.detail
        );
        if let Some(cx) = &o.counterexample {
            let _ = writeln!(stdout, "  counterexample: {cx}");
        }
        failed += usize::from(!o.passed);
    }
    let mut written = Vec::new();
    if cfg.formats.json {
        let mut w = Writer::new(&cfg.output_dir)?;
        w.json("validation.json", &outcomes)?;
        written = w.written;
    }
    if failed > 0 {
        return Err(Failure::Validation(failed));
    }
    Ok(written)
}
