//! Deployed-alert feedback loop with randomized alert withholding.
//!
//! An example is alert-eligible when its score is above `p_t` or below
//! `1 - p_t`. Each eligible alert is withheld with probability `p_withhold`;
//! a shown alert is always followed (the test is not ordered), so its label is
//! never observed. Withheld alerts and ineligible examples keep their labels.
//! Observed eligible examples therefore have selection probability
//! `p_withhold`, everything else observed has probability 1.

use std::io::Read;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metrics::{ipw_weights, weighted_roc, WeightedSample};
use crate::seed::{derive_path, derive_seed, rng_from_seed};
use crate::summary::{EstimateSummary, Estimator};
use crate::synthetic::{sample_dataset, DgpParams, Scenario, ScenarioSpec};

pub fn alert_eligible(score: f64, p_t: f64) -> bool {
    score > p_t || score < 1.0 - p_t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    SyntheticDgp,
    SyntheticClinical,
    ExternalFile,
}

/// A fixed set of `(score, label)` pairs, kept sorted by descending score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPopulation {
    entries: Vec<(f64, bool)>,
    provenance: Provenance,
    prevalence: f64,
}

#[derive(Debug, Deserialize)]
struct PopulationRecord {
    score: f64,
    label: u8,
}

impl ScoredPopulation {
    pub fn new(mut entries: Vec<(f64, bool)>, provenance: Provenance) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyPopulation);
        }
        if let Some(&(s, _)) = entries.iter().find(|(s, _)| !(0.0..=1.0).contains(s)) {
            return Err(invalid(format!("score {s} outside [0, 1]")));
        }
        entries.sort_by(|a, b| b.0.total_cmp(&a.0));
        let positives = entries.iter().filter(|e| e.1).count();
        Ok(Self {
            prevalence: positives as f64 / entries.len() as f64,
            entries,
            provenance,
        })
    }

    /// Reads a headered CSV with `score` and `label` columns. Errors name the
    /// offending line (the header is line 1).
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        for required in ["score", "label"] {
            if !headers.iter().any(|h| h == required) {
                return Err(Error::PopulationFile {
                    line: 1,
                    message: format!("missing `{required}` column"),
                });
            }
        }
        let mut entries = Vec::new();
        for record in rdr.deserialize::<PopulationRecord>() {
            let record = record.map_err(|e| Error::PopulationFile {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = entries.len() as u64 + 2;
            if !(0.0..=1.0).contains(&record.score) {
                return Err(Error::PopulationFile {
                    line,
                    message: format!("score {} outside [0, 1]", record.score),
                });
            }
            let label = match record.label {
                0 => false,
                1 => true,
                other => {
                    return Err(Error::PopulationFile {
                        line,
                        message: format!("label {other} is not 0 or 1"),
                    })
                }
            };
            entries.push((record.score, label));
        }
        Self::new(entries, Provenance::ExternalFile)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::PopulationFile {
            line: 0,
            message: format!("{}: {e}", path.display()),
        })?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    /// Full population drawn from the synthetic data-generating process.
    pub fn from_dgp(dgp: DgpParams, n: usize, seed: u64) -> Result<Self> {
        let spec = ScenarioSpec {
            dgp,
            ..ScenarioSpec::new(Scenario::Scar)
        };
        let data = sample_dataset(&spec, n, seed)?;
        Self::new(
            data.iter().map(|e| (e.score, e.y)).collect(),
            Provenance::SyntheticDgp,
        )
    }

    pub fn entries(&self) -> &[(f64, bool)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn prevalence(&self) -> f64 {
        self.prevalence
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.entries.iter().filter(|e| e.1).count();
        (pos, self.entries.len() - pos)
    }

    pub fn has_both_classes(&self) -> bool {
        let (pos, neg) = self.class_counts();
        pos > 0 && neg > 0
    }

    fn samples(&self) -> Vec<WeightedSample> {
        self.entries
            .iter()
            .map(|&(s, y)| WeightedSample::labeled(s, y).expect("validated on construction"))
            .collect()
    }

    pub fn auroc(&self) -> Result<f64> {
        Ok(weighted_roc(&self.samples())?.area)
    }
}

/// A calibrated two-class score population.
///
/// Exactly `round(n * prevalence)` examples are positive. Each example gets a
/// latent `z ~ N(+separation/2, 1)` if positive and `N(-separation/2, 1)`
/// otherwise, and the score is `sigmoid(logit(prevalence) + separation * z)`,
/// which is the exact posterior `P(y = 1 | z)` under that mixture. The
/// population AUROC is `Phi(separation / sqrt(2))`.
pub fn synthetic_clinical_population(
    n: usize,
    prevalence: f64,
    separation: f64,
    seed: u64,
) -> Result<ScoredPopulation> {
    if !(prevalence > 0.0 && prevalence < 1.0) {
        return Err(invalid(format!(
            "prevalence {prevalence} must lie in (0, 1)"
        )));
    }
    if !(separation > 0.0 && separation.is_finite()) {
        return Err(invalid(format!("separation {separation} must be > 0")));
    }
    let positives = (n as f64 * prevalence).round() as usize;
    if positives == 0 || positives >= n {
        return Err(invalid(format!(
            "n = {n} is too small to realize both classes at prevalence {prevalence}"
        )));
    }
    let prior_logit = (prevalence / (1.0 - prevalence)).ln();
    let mut rng = rng_from_seed(seed);
    let entries = (0..n)
        .map(|i| {
            let y = i < positives;
            let shift = if y {
                separation / 2.0
            } else {
                -separation / 2.0
            };
            let z: f64 = shift + rng.sample::<f64, _>(StandardNormal);
            (crate::synthetic::sigmoid(prior_logit + separation * z), y)
        })
        .collect();
    ScoredPopulation::new(entries, Provenance::SyntheticClinical)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeploymentConfig {
    pub p_t: f64,
    pub p_withhold: f64,
    pub n_reps: usize,
    pub seed: u64,
}

impl DeploymentConfig {
    /// `p_withhold = 0` passes validation; it is rejected at simulation time
    /// only if some example is alert-eligible.
    pub fn validate(&self) -> Result<()> {
        validate_p_t(self.p_t)?;
        if !(0.0..=1.0).contains(&self.p_withhold) {
            return Err(invalid(format!(
                "p_withhold = {} must lie in (0, 1]",
                self.p_withhold
            )));
        }
        if self.n_reps < 1 {
            return Err(invalid("n_reps must be at least 1"));
        }
        Ok(())
    }
}

fn validate_p_t(p_t: f64) -> Result<()> {
    if !(p_t > 0.5 && p_t < 1.0) {
        return Err(invalid(format!("p_t = {p_t} must lie in (0.5, 1)")));
    }
    Ok(())
}

/// One replicate of the deployment simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicateOutcome {
    pub actual: f64,
    /// `None` when the observed subset lacks a class.
    pub observed: Option<f64>,
    pub weighted: Option<f64>,
    pub observed_fraction: f64,
    pub eligible: usize,
    pub eligible_observed: usize,
}

fn undefined_if_degenerate(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::DegenerateRoc | Error::EmptyPopulation) => Ok(None),
        Err(e) => Err(e),
    }
}

fn simulate_with_actual(
    pop: &ScoredPopulation,
    actual: f64,
    p_t: f64,
    p_withhold: f64,
    seed: u64,
) -> Result<ReplicateOutcome> {
    let mut rng = rng_from_seed(seed);
    let mut observed = Vec::with_capacity(pop.len());
    let mut eligible = 0;
    let mut eligible_observed = 0;
    for &(score, y) in &pop.entries {
        if alert_eligible(score, p_t) {
            eligible += 1;
            if p_withhold <= 0.0 {
                return Err(Error::Positivity(
                    "eligible labels never observed (p_withhold = 0)".into(),
                ));
            }
            // Coin = 1 withholds the alert, so the label is observed.
            if rng.random::<f64>() < p_withhold {
                eligible_observed += 1;
                observed.push(WeightedSample::new(score, Some(y), p_withhold)?);
            }
        } else {
            observed.push(WeightedSample::new(score, Some(y), 1.0)?);
        }
    }
    let observed_fraction = observed.len() as f64 / pop.len() as f64;
    let observed_auroc = undefined_if_degenerate(weighted_roc(&observed).map(|c| c.area))?;
    let weighted_auroc = match observed_auroc {
        Some(_) => Some(weighted_roc(&ipw_weights(&observed)?)?.area),
        None => None,
    };
    Ok(ReplicateOutcome {
        actual,
        observed: observed_auroc,
        weighted: weighted_auroc,
        observed_fraction,
        eligible,
        eligible_observed,
    })
}

/// Runs one replicate: draws the withholding coins, ablates the labels of
/// shown alerts, and scores actual/observed/weighted AUROC.
pub fn simulate_deployment(
    pop: &ScoredPopulation,
    p_t: f64,
    p_withhold: f64,
    seed: u64,
) -> Result<ReplicateOutcome> {
    validate_p_t(p_t)?;
    if !pop.has_both_classes() {
        return Err(Error::DegenerateRoc);
    }
    simulate_with_actual(pop, pop.auroc()?, p_t, p_withhold, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParam {
    PT,
    PWithhold,
}

impl SweptParam {
    pub fn name(self) -> &'static str {
        match self {
            SweptParam::PT => "p_t",
            SweptParam::PWithhold => "p_withhold",
        }
    }

    fn tag(self) -> u64 {
        match self {
            SweptParam::PT => 1,
            SweptParam::PWithhold => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub swept_param: SweptParam,
    pub param_value: f64,
    /// The parameter held fixed during the sweep.
    pub p_t: f64,
    pub p_withhold: f64,
    pub actual: EstimateSummary,
    pub observed: EstimateSummary,
    pub weighted: EstimateSummary,
    pub mean_observed_fraction: f64,
}

impl SweepRow {
    pub fn estimate(&self, estimator: Estimator) -> &EstimateSummary {
        match estimator {
            Estimator::Actual => &self.actual,
            Estimator::Observed => &self.observed,
            Estimator::Weighted => &self.weighted,
        }
    }
}

/// Replicates one parameter setting. Replicate seeds derive from the root
/// seed, the swept parameter and the parameter value, so a setting gives the
/// same numbers whether it runs alone or inside a grid.
fn run_setting<F>(
    swept: SweptParam,
    p_t: f64,
    p_withhold: f64,
    n_reps: usize,
    seed: u64,
    replicate: F,
) -> Result<SweepRow>
where
    F: Fn(u64) -> Result<ReplicateOutcome> + Sync,
{
    let cfg = DeploymentConfig {
        p_t,
        p_withhold,
        n_reps,
        seed,
    };
    cfg.validate()?;
    let value = match swept {
        SweptParam::PT => p_t,
        SweptParam::PWithhold => p_withhold,
    };
    let outcomes = (0..n_reps)
        .into_par_iter()
        .map(|r| replicate(derive_path(seed, &[swept.tag(), value.to_bits(), r as u64])))
        .collect::<Result<Vec<_>>>()?;
    let column = |f: fn(&ReplicateOutcome) -> Option<f64>| {
        EstimateSummary::from_replicates(&outcomes.iter().map(f).collect::<Vec<_>>())
    };
    Ok(SweepRow {
        swept_param: swept,
        param_value: value,
        p_t,
        p_withhold,
        actual: column(|o| Some(o.actual)),
        observed: column(|o| o.observed),
        weighted: column(|o| o.weighted),
        mean_observed_fraction: outcomes.iter().map(|o| o.observed_fraction).sum::<f64>()
            / n_reps as f64,
    })
}

fn population_actual(pop: &ScoredPopulation) -> Result<f64> {
    if !pop.has_both_classes() {
        return Err(Error::DegenerateRoc);
    }
    pop.auroc()
}

fn check_withhold(p_withhold: f64) -> Result<()> {
    if p_withhold > 0.0 && p_withhold <= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "p_withhold = {p_withhold} must lie in (0, 1]"
        )))
    }
}

/// Replicates a single `(p_t, p_withhold)` setting, reported as a `p_t` row.
pub fn run_deployment(pop: &ScoredPopulation, cfg: &DeploymentConfig) -> Result<SweepRow> {
    let actual = population_actual(pop)?;
    run_setting(
        SweptParam::PT,
        cfg.p_t,
        cfg.p_withhold,
        cfg.n_reps,
        cfg.seed,
        |s| simulate_with_actual(pop, actual, cfg.p_t, cfg.p_withhold, s),
    )
}

/// Sweeps `p_t` on a fixed population; replicates redraw only the
/// withholding coins.
pub fn sweep_p_t(
    pop: &ScoredPopulation,
    values: &[f64],
    p_withhold: f64,
    n_reps: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let actual = population_actual(pop)?;
    values
        .iter()
        .map(|&p_t| {
            run_setting(SweptParam::PT, p_t, p_withhold, n_reps, seed, |s| {
                simulate_with_actual(pop, actual, p_t, p_withhold, s)
            })
        })
        .collect()
}

/// Sweeps `p_withhold` on a fixed population; replicates redraw only the
/// withholding coins.
pub fn sweep_p_withhold(
    pop: &ScoredPopulation,
    values: &[f64],
    p_t: f64,
    n_reps: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let actual = population_actual(pop)?;
    values
        .iter()
        .map(|&pw| {
            check_withhold(pw)?;
            run_setting(SweptParam::PWithhold, p_t, pw, n_reps, seed, |s| {
                simulate_with_actual(pop, actual, p_t, pw, s)
            })
        })
        .collect()
}

/// Parameters of a synthetic population, so replicates can redraw it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopulationRecipe {
    Dgp {
        dgp: DgpParams,
        n: usize,
    },
    Clinical {
        n: usize,
        prevalence: f64,
        separation: f64,
    },
}

impl PopulationRecipe {
    pub fn generate(&self, seed: u64) -> Result<ScoredPopulation> {
        match *self {
            PopulationRecipe::Dgp { dgp, n } => ScoredPopulation::from_dgp(dgp, n, seed),
            PopulationRecipe::Clinical {
                n,
                prevalence,
                separation,
            } => synthetic_clinical_population(n, prevalence, separation, seed),
        }
    }
}

/// One replicate with a freshly drawn population and fresh coins.
fn resampled_replicate(
    recipe: &PopulationRecipe,
    p_t: f64,
    p_withhold: f64,
    seed: u64,
) -> Result<ReplicateOutcome> {
    let pop = recipe.generate(derive_seed(seed, 0))?;
    simulate_deployment(&pop, p_t, p_withhold, derive_seed(seed, 1))
}

/// Like [`sweep_p_t`], but every replicate also redraws the population, so
/// intervals include population sampling variability.
pub fn sweep_p_t_resampled(
    recipe: &PopulationRecipe,
    values: &[f64],
    p_withhold: f64,
    n_reps: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    values
        .iter()
        .map(|&p_t| {
            run_setting(SweptParam::PT, p_t, p_withhold, n_reps, seed, |s| {
                resampled_replicate(recipe, p_t, p_withhold, s)
            })
        })
        .collect()
}

/// Like [`sweep_p_withhold`], but every replicate also redraws the population.
pub fn sweep_p_withhold_resampled(
    recipe: &PopulationRecipe,
    values: &[f64],
    p_t: f64,
    n_reps: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    values
        .iter()
        .map(|&pw| {
            check_withhold(pw)?;
            run_setting(SweptParam::PWithhold, p_t, pw, n_reps, seed, |s| {
                resampled_replicate(recipe, p_t, pw, s)
            })
        })
        .collect()
}

pub const DEFAULT_P_T: f64 = 0.9;
pub const DEFAULT_P_WITHHOLD: f64 = 0.05;
pub const DEFAULT_SWEEP_REPS: usize = 1000;

/// 0.99, 0.97, ..., 0.51.
pub fn default_pt_grid() -> Vec<f64> {
    (0..25).map(|k| (99 - 2 * k) as f64 / 100.0).collect()
}

/// 25 values from 0.99 down to 0.01: linear steps down to 0.1, then
/// log-spaced below 0.1 where the observed estimate moves fastest.
pub fn default_withhold_grid() -> Vec<f64> {
    let mut grid = vec![
        0.99, 0.95, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.15, 0.1,
    ];
    grid.extend((1..=13).map(|k| {
        let v = 10f64.powf(-1.0 - k as f64 / 13.0);
        (v * 10_000.0).round() / 10_000.0
    }));
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eligibility() {
        assert!(alert_eligible(0.95, 0.9));
        assert!(alert_eligible(0.05, 0.9));
        assert!(!alert_eligible(0.5, 0.9));
        assert!(!alert_eligible(0.5, 0.51));
        assert!(!alert_eligible(0.9, 0.9));
    }

    #[test]
    fn grids() {
        let pt = default_pt_grid();
        assert_eq!(pt.len(), 25);
        assert_eq!((pt[0], pt[24]), (0.99, 0.51));
        let pw = default_withhold_grid();
        assert_eq!(pw.len(), 25);
        assert_eq!((pw[0], pw[24]), (0.99, 0.01));
        assert!(pw.windows(2).all(|w| w[0] > w[1]));
        assert!(pw.contains(&0.5));
    }

    #[test]
    fn clinical_population_prevalence_and_determinism() {
        let a = synthetic_clinical_population(10_000, 0.27, 1.5, 1).unwrap();
        assert!((0.26..=0.28).contains(&a.prevalence()));
        let mean = a.entries().iter().filter(|e| e.1).count() as f64 / a.len() as f64;
        assert!((mean - a.prevalence()).abs() < 1e-9);
        assert_eq!(
            a,
            synthetic_clinical_population(10_000, 0.27, 1.5, 1).unwrap()
        );
        assert!(synthetic_clinical_population(3, 0.1, 1.0, 1).is_err());
        assert!(synthetic_clinical_population(100, 0.5, 0.0, 1).is_err());
    }

    #[test]
    fn clinical_auroc_matches_closed_form() {
        // Phi(1.5 / sqrt 2) = Phi(1.06066) = 0.85558
        let pop = synthetic_clinical_population(20_000, 0.57, 1.5, 2).unwrap();
        assert!((pop.auroc().unwrap() - 0.85558).abs() < 0.01);
        let flat = synthetic_clinical_population(20_000, 0.57, 1e-4, 2).unwrap();
        assert!((flat.auroc().unwrap() - 0.5).abs() < 0.02);
    }

    #[test]
    fn no_withholding_means_no_ablation() {
        let pop = synthetic_clinical_population(2_000, 0.57, 2.0, 3).unwrap();
        let o = simulate_deployment(&pop, 0.9, 1.0, 5).unwrap();
        assert_eq!(o.observed, Some(o.actual));
        assert_eq!(o.weighted, Some(o.actual));
        assert_eq!(o.observed_fraction, 1.0);
    }

    #[test]
    fn positivity_violation() {
        let pop = synthetic_clinical_population(500, 0.5, 3.0, 3).unwrap();
        let err = simulate_deployment(&pop, 0.9, 0.0, 5).unwrap_err();
        assert!(matches!(err, Error::Positivity(_)));
    }

    #[test]
    fn nothing_eligible_when_p_t_near_one() {
        let pop = ScoredPopulation::new(
            vec![(0.2, false), (0.4, true), (0.6, false), (0.8, true)],
            Provenance::ExternalFile,
        )
        .unwrap();
        let o = simulate_deployment(&pop, 0.999, 0.05, 1).unwrap();
        assert_eq!(o.eligible, 0);
        assert_eq!((o.observed, o.weighted), (Some(o.actual), Some(o.actual)));
    }

    #[test]
    fn csv_population() {
        let pop =
            ScoredPopulation::from_csv_reader("score,label\n0.9,1\n0.2,0\n".as_bytes()).unwrap();
        assert_eq!(pop.len(), 2);
        assert_eq!(pop.provenance(), Provenance::ExternalFile);
        let err = ScoredPopulation::from_csv_reader("score,label\n0.9,1\n1.5,0\n".as_bytes())
            .unwrap_err();
        assert_eq!(
            err,
            Error::PopulationFile {
                line: 3,
                message: "score 1.5 outside [0, 1]".into()
            }
        );
        let err = ScoredPopulation::from_csv_reader("score,label\n0.9,1\nabc,0\n".as_bytes())
            .unwrap_err();
        assert!(
            matches!(err, Error::PopulationFile { line: 3, .. }),
            "{err:?}"
        );
        let err = ScoredPopulation::from_csv_reader("score,label\n0.9,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::PopulationFile { line: 2, .. }));
        let err = ScoredPopulation::from_csv_reader("prob,label\n0.9,1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::PopulationFile { line: 1, .. }));
    }

    #[test]
    fn single_setting_matches_grid_row() {
        let pop = synthetic_clinical_population(1_000, 0.57, 2.0, 4).unwrap();
        let grid = sweep_p_t(&pop, &[0.95, 0.9, 0.8], 0.2, 20, 11).unwrap();
        let single = sweep_p_t(&pop, &[0.9], 0.2, 20, 11).unwrap();
        assert_eq!(grid[1], single[0]);
    }

    #[test]
    fn observed_fraction_tracks_withholding() {
        let pop = synthetic_clinical_population(5_000, 0.57, 2.5, 4).unwrap();
        let rows = sweep_p_withhold(&pop, &[0.9, 0.5, 0.1], 0.9, 30, 1).unwrap();
        assert!(rows
            .windows(2)
            .all(|w| w[0].mean_observed_fraction > w[1].mean_observed_fraction));
        assert!(sweep_p_withhold(&pop, &[0.0], 0.9, 3, 1).is_err());
        assert!(sweep_p_t(&pop, &[0.5], 0.1, 3, 1).is_err());
    }

    #[test]
    fn resampled_sweep_varies_population() {
        let recipe = PopulationRecipe::Clinical {
            n: 1_000,
            prevalence: 0.5,
            separation: 2.0,
        };
        let rows = sweep_p_t_resampled(&recipe, &[0.8], 0.2, 40, 3).unwrap();
        let actual = rows[0].actual.interval.unwrap();
        assert!(actual.width() > 0.0);
        let weighted = rows[0].weighted.mean().unwrap();
        assert!((weighted - actual.mean).abs() < 0.03);
        assert_eq!(
            rows,
            sweep_p_t_resampled(&recipe, &[0.8], 0.2, 40, 3).unwrap()
        );
        assert!(sweep_p_withhold_resampled(&recipe, &[0.0], 0.9, 5, 3).is_err());
    }
}
