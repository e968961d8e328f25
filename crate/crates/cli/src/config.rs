//! Run configuration: command-line flags merged over an optional TOML file.
//! Flags win; unknown file keys are rejected.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ipw_eval::deployment::{self, DEFAULT_P_T, DEFAULT_P_WITHHOLD, DEFAULT_SWEEP_REPS};
use ipw_eval::experiments::DEFAULT_SEED;
use ipw_eval::metrics::MetricKind;
use ipw_eval::synthetic::{DeltaMode, Scenario};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(
    name = "ipw-eval",
    version,
    about = "Label-selection simulations with IPW-corrected metrics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args, Default)]
pub struct GlobalArgs {
    /// Root seed for all replicate streams.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Population size per replicate.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Number of replicates.
    #[arg(long, global = true)]
    pub reps: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write CSV outputs (if any format flag is given, only those formats are written).
    #[arg(long, global = true)]
    pub csv: bool,
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true)]
    pub svg: bool,
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the selection scenarios and write the metric grid and calibration.
    Scenarios(ScenarioArgs),
    /// Run the selection scenarios and write calibration outputs only.
    Calibration(ScenarioArgs),
    /// Sweep the alert threshold and the withholding probability.
    DeploySweep(DeployArgs),
    /// Run the oracle self-tests.
    Validate(ValidateArgs),
}

#[derive(Debug, Args, Default, Clone)]
pub struct ScenarioArgs {
    /// Restrict to these scenarios (repeatable).
    #[arg(long = "scenario")]
    pub scenarios: Vec<String>,
    /// Restrict the metric grid to these metrics (repeatable).
    #[arg(long = "metric")]
    pub metrics: Vec<String>,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Normalizer for select-easy: support supremum or sample maximum.
    #[arg(long, value_enum)]
    pub delta: Option<DeltaArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaArg {
    Support,
    SampleMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PopArg {
    Dgp,
    Clinical,
    External,
}

#[derive(Debug, Args, Default, Clone)]
pub struct DeployArgs {
    /// Alert threshold (fixed value for the withholding sweep).
    #[arg(long = "p-t")]
    pub p_t: Option<f64>,
    /// Withholding probability (fixed value for the threshold sweep).
    #[arg(long = "p-withhold")]
    pub p_withhold: Option<f64>,
    /// Comma-separated p_t grid.
    #[arg(long = "pt-grid", value_delimiter = ',')]
    pub pt_grid: Option<Vec<f64>>,
    /// Comma-separated p_withhold grid.
    #[arg(long = "withhold-grid", value_delimiter = ',')]
    pub withhold_grid: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub pop: Option<PopArg>,
    #[arg(long)]
    pub prevalence: Option<f64>,
    #[arg(long)]
    pub separation: Option<f64>,
    /// Population CSV with `score,label` columns (for `--pop external`).
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Redraw the synthetic population in every replicate, not just the
    /// withholding coins.
    #[arg(long)]
    pub resample_population: bool,
}

#[derive(Debug, Args, Default, Clone)]
pub struct ValidateArgs {
    /// Smaller instance counts.
    #[arg(long)]
    pub quick: bool,
    /// Inject a known bug to check that the harness catches it.
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<FaultArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    UninvertedWeights,
}

/// Keys accepted in a config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub reps: Option<usize>,
    pub out: Option<PathBuf>,
    pub csv: Option<bool>,
    pub json: Option<bool>,
    pub svg: Option<bool>,
    pub scenarios: Option<Vec<String>>,
    pub metrics: Option<Vec<String>>,
    pub threshold: Option<f64>,
    pub delta: Option<DeltaArg>,
    pub p_t: Option<f64>,
    pub p_withhold: Option<f64>,
    pub pt_grid: Option<Vec<f64>>,
    pub withhold_grid: Option<Vec<f64>>,
    pub pop: Option<PopArg>,
    pub prevalence: Option<f64>,
    pub separation: Option<f64>,
    pub file: Option<PathBuf>,
    pub resample_population: Option<bool>,
    pub quick: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

#[derive(Debug, Clone)]
pub struct ScenarioParams {
    pub scenarios: Vec<Scenario>,
    pub metrics: Vec<MetricKind>,
    pub threshold: f64,
    pub delta: DeltaMode,
}

#[derive(Debug, Clone)]
pub enum PopulationSource {
    Dgp,
    Clinical { prevalence: f64, separation: f64 },
    External(PathBuf),
}

#[derive(Debug, Clone)]
pub struct DeployParams {
    pub pt_grid: Vec<f64>,
    pub withhold_grid: Vec<f64>,
    /// Withholding probability held fixed during the p_t sweep.
    pub fixed_p_withhold: f64,
    /// Threshold held fixed during the p_withhold sweep.
    pub fixed_p_t: f64,
    pub population: PopulationSource,
    pub resample_population: bool,
}

#[derive(Debug, Clone)]
pub enum CommandParams {
    Scenarios(ScenarioParams),
    Calibration(ScenarioParams),
    DeploySweep(DeployParams),
    Validate {
        quick: bool,
        fault: Option<FaultArg>,
    },
}

/// Fully resolved configuration for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub n: usize,
    pub n_reps: usize,
    pub output_dir: PathBuf,
    pub formats: Formats,
    pub params: CommandParams,
}

pub const DEFAULT_PREVALENCE: f64 = 0.57;
pub const DEFAULT_SEPARATION: f64 = 2.0;
pub const DEFAULT_SCENARIO_REPS: usize = 100;

fn resolve_scenarios(args: &ScenarioArgs, file: &FileConfig) -> Result<ScenarioParams> {
    let names = if args.scenarios.is_empty() {
        file.scenarios.clone().unwrap_or_default()
    } else {
        args.scenarios.clone()
    };
    let scenarios = if names.is_empty() {
        Scenario::ALL.to_vec()
    } else {
        let mut v = names
            .iter()
            .map(|s| Scenario::parse(s).with_context(|| format!("unknown scenario `{s}`")))
            .collect::<Result<Vec<_>>>()?;
        v.sort();
        v.dedup();
        v
    };
    let names = if args.metrics.is_empty() {
        file.metrics.clone().unwrap_or_default()
    } else {
        args.metrics.clone()
    };
    let metrics = if names.is_empty() {
        MetricKind::ALL.to_vec()
    } else {
        let mut v = names
            .iter()
            .map(|s| MetricKind::parse(s).with_context(|| format!("unknown metric `{s}`")))
            .collect::<Result<Vec<_>>>()?;
        v.sort();
        v.dedup();
        v
    };
    let threshold = args.threshold.or(file.threshold).unwrap_or(0.5);
    if !(0.0..=1.0).contains(&threshold) {
        bail!("threshold {threshold} must lie in [0, 1]");
    }
    let delta = match args.delta.or(file.delta) {
        Some(DeltaArg::SampleMax) => DeltaMode::SampleMax,
        _ => DeltaMode::Support,
    };
    Ok(ScenarioParams {
        scenarios,
        metrics,
        threshold,
        delta,
    })
}

fn resolve_deploy(args: &DeployArgs, file: &FileConfig) -> Result<DeployParams> {
    let p_t = args.p_t.or(file.p_t);
    let p_withhold = args.p_withhold.or(file.p_withhold);
    let pt_grid = args
        .pt_grid
        .clone()
        .or_else(|| file.pt_grid.clone())
        .or_else(|| p_t.map(|v| vec![v]))
        .unwrap_or_else(deployment::default_pt_grid);
    let withhold_grid = args
        .withhold_grid
        .clone()
        .or_else(|| file.withhold_grid.clone())
        .or_else(|| p_withhold.map(|v| vec![v]))
        .unwrap_or_else(deployment::default_withhold_grid);
    if pt_grid.is_empty() || withhold_grid.is_empty() {
        bail!("sweep grids must not be empty");
    }
    for &v in pt_grid.iter().chain(p_t.iter()) {
        if !(v > 0.5 && v < 1.0) {
            bail!("p_t = {v} must lie in (0.5, 1)");
        }
    }
    for &v in withhold_grid.iter().chain(p_withhold.iter()) {
        if !(v > 0.0 && v <= 1.0) {
            bail!("p_withhold = {v} must lie in (0, 1]");
        }
    }
    let prevalence = args
        .prevalence
        .or(file.prevalence)
        .unwrap_or(DEFAULT_PREVALENCE);
    let separation = args
        .separation
        .or(file.separation)
        .unwrap_or(DEFAULT_SEPARATION);
    let population = match args.pop.or(file.pop).unwrap_or(PopArg::Clinical) {
        PopArg::Dgp => PopulationSource::Dgp,
        PopArg::Clinical => {
            if !(prevalence > 0.0 && prevalence < 1.0) {
                bail!("prevalence {prevalence} must lie in (0, 1)");
            }
            if !(separation > 0.0 && separation.is_finite()) {
                bail!("separation {separation} must be > 0");
            }
            PopulationSource::Clinical {
                prevalence,
                separation,
            }
        }
        PopArg::External => PopulationSource::External(
            args.file
                .clone()
                .or_else(|| file.file.clone())
                .context("--pop external requires --file")?,
        ),
    };
    let resample_population = args.resample_population || file.resample_population.unwrap_or(false);
    if resample_population && matches!(population, PopulationSource::External(_)) {
        bail!("--resample-population requires a synthetic population (dgp or clinical)");
    }
    Ok(DeployParams {
        resample_population,
        pt_grid,
        withhold_grid,
        fixed_p_withhold: p_withhold.unwrap_or(DEFAULT_P_WITHHOLD),
        fixed_p_t: p_t.unwrap_or(DEFAULT_P_T),
        population,
    })
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let file = match &cli.global.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let g = &cli.global;
        let (params, default_reps) = match &cli.command {
            Command::Scenarios(a) => (
                CommandParams::Scenarios(resolve_scenarios(a, &file)?),
                DEFAULT_SCENARIO_REPS,
            ),
            Command::Calibration(a) => (
                CommandParams::Calibration(resolve_scenarios(a, &file)?),
                DEFAULT_SCENARIO_REPS,
            ),
            Command::DeploySweep(a) => (
                CommandParams::DeploySweep(resolve_deploy(a, &file)?),
                DEFAULT_SWEEP_REPS,
            ),
            Command::Validate(a) => (
                CommandParams::Validate {
                    quick: a.quick || file.quick.unwrap_or(false),
                    fault: a.inject_fault,
                },
                1,
            ),
        };
        let n = g.n.or(file.n).unwrap_or(10_000);
        let n_reps = g.reps.or(file.reps).unwrap_or(default_reps);
        if n < 1 {
            bail!("--n must be at least 1");
        }
        if n_reps < 1 {
            bail!("--reps must be at least 1");
        }
        let flags_given = g.csv || g.json || g.svg;
        let formats = if flags_given {
            Formats {
                csv: g.csv,
                json: g.json,
                svg: g.svg,
            }
        } else {
            Formats {
                csv: file.csv.unwrap_or(true),
                json: file.json.unwrap_or(false),
                svg: file.svg.unwrap_or(true),
            }
        };
        Ok(Self {
            seed: g.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            n,
            n_reps,
            output_dir: g
                .out
                .clone()
                .or_else(|| file.out.clone())
                .unwrap_or_else(|| PathBuf::from("out")),
            formats,
            params,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("ipw-eval").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn defaults() {
        let cfg = RunConfig::resolve(&parse(&["scenarios"])).unwrap();
        assert_eq!((cfg.n, cfg.n_reps, cfg.seed), (10_000, 100, DEFAULT_SEED));
        assert_eq!(
            cfg.formats,
            Formats {
                csv: true,
                json: false,
                svg: true
            }
        );
        let CommandParams::Scenarios(p) = cfg.params else {
            panic!()
        };
        assert_eq!(p.scenarios.len(), 5);
        assert_eq!(p.metrics.len(), 6);
    }

    #[test]
    fn deploy_single_point() {
        let cfg = RunConfig::resolve(&parse(&[
            "deploy-sweep",
            "--p-withhold",
            "1.0",
            "--p-t",
            "0.9",
        ]))
        .unwrap();
        assert_eq!(cfg.n_reps, DEFAULT_SWEEP_REPS);
        let CommandParams::DeploySweep(p) = cfg.params else {
            panic!()
        };
        assert_eq!(p.pt_grid, vec![0.9]);
        assert_eq!(p.withhold_grid, vec![1.0]);
        assert_eq!((p.fixed_p_t, p.fixed_p_withhold), (0.9, 1.0));
    }

    #[test]
    fn deploy_defaults_and_grids() {
        let cfg = RunConfig::resolve(&parse(&["deploy-sweep", "--pt-grid", "0.95,0.7"])).unwrap();
        let CommandParams::DeploySweep(p) = cfg.params else {
            panic!()
        };
        assert_eq!(p.pt_grid, vec![0.95, 0.7]);
        assert_eq!(p.withhold_grid.len(), 25);
        assert_eq!(p.fixed_p_withhold, 0.05);
        assert!(RunConfig::resolve(&parse(&["deploy-sweep", "--p-t", "0.4"])).is_err());
        assert!(RunConfig::resolve(&parse(&["deploy-sweep", "--pop", "external"])).is_err());
    }

    #[test]
    fn flags_override_file_and_unknown_keys_fail() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "seed = 5\nn = 300\nreps = 7\n").unwrap();
        let p = path.to_str().unwrap();
        let cfg = RunConfig::resolve(&parse(&["scenarios", "--config", p, "--n", "200"])).unwrap();
        assert_eq!((cfg.seed, cfg.n, cfg.n_reps), (5, 200, 7));

        std::fs::write(&path, "seed = 5\nbogus = 1\n").unwrap();
        assert!(RunConfig::resolve(&parse(&["scenarios", "--config", p])).is_err());
    }

    #[test]
    fn unknown_names_rejected() {
        assert!(RunConfig::resolve(&parse(&["scenarios", "--scenario", "nope"])).is_err());
        assert!(RunConfig::resolve(&parse(&["scenarios", "--metric", "f1"])).is_err());
    }
}
