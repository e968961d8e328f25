//! Monte Carlo runner for the five selection scenarios.
//!
//! Each replicate draws a fresh dataset and scores every metric three ways:
//! on the full population, on the selected subpopulation, and on the selected
//! subpopulation with inverse probability weights built from the true
//! selection probabilities.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metrics::{
    calibration_curve, ipw_weights, CalibrationCurve, MetricKind, WeightedSample,
};
use crate::seed::derive_path;
use crate::summary::{EstimateSummary, Estimator};
use crate::synthetic::{sample_dataset, ScenarioSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRunConfig {
    pub n: usize,
    pub n_reps: usize,
    pub threshold: f64,
    pub n_bins: usize,
    pub seed: u64,
}

impl Default for ScenarioRunConfig {
    fn default() -> Self {
        Self {
            n: 10_000,
            n_reps: 100,
            threshold: 0.5,
            n_bins: 5,
            seed: DEFAULT_SEED,
        }
    }
}

pub const DEFAULT_SEED: u64 = 20_220_101;

impl ScenarioRunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(invalid("n must be at least 2"));
        }
        if self.n_reps < 1 {
            return Err(invalid("n_reps must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(invalid("threshold must lie in [0, 1]"));
        }
        if self.n_bins < 1 {
            return Err(invalid("n_bins must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricTriplet {
    pub metric: MetricKind,
    pub actual: EstimateSummary,
    pub observed: EstimateSummary,
    pub weighted: EstimateSummary,
}

impl MetricTriplet {
    pub fn estimate(&self, estimator: Estimator) -> &EstimateSummary {
        match estimator {
            Estimator::Actual => &self.actual,
            Estimator::Observed => &self.observed,
            Estimator::Weighted => &self.weighted,
        }
    }

    /// More than 10% of replicates were undefined for some estimator.
    pub fn flagged(&self) -> bool {
        Estimator::ALL.iter().any(|&e| self.estimate(e).flagged())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBinSummary {
    pub index: usize,
    pub lo: f64,
    pub hi: f64,
    /// Mean predicted probability averaged over replicates where the bin was
    /// nonempty.
    pub mean_pred: Option<f64>,
    /// Outcome prevalence across replicates; empty-bin replicates count as
    /// undefined.
    pub prevalence: EstimateSummary,
    /// Average weighted mass per replicate.
    pub weight_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSummary {
    pub estimator: Estimator,
    pub bins: Vec<CalibrationBinSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub spec: ScenarioSpec,
    pub n: usize,
    pub n_reps: usize,
    pub threshold: f64,
    pub triplets: Vec<MetricTriplet>,
    /// Actual, observed and weighted calibration, in that order.
    pub calibration: Vec<CalibrationSummary>,
    pub mean_observed_fraction: f64,
}

impl ScenarioResult {
    pub fn triplet(&self, metric: MetricKind) -> Option<&MetricTriplet> {
        self.triplets.iter().find(|t| t.metric == metric)
    }

    pub fn calibration_for(&self, estimator: Estimator) -> Option<&CalibrationSummary> {
        self.calibration.iter().find(|c| c.estimator == estimator)
    }

    /// Keeps only the listed metrics, in the standard order.
    pub fn retain_metrics(&mut self, metrics: &[MetricKind]) {
        self.triplets.retain(|t| metrics.contains(&t.metric));
    }
}

struct Replicate {
    /// Indexed `[metric][estimator]`.
    metrics: Vec<[Option<f64>; 3]>,
    calibration: [Option<CalibrationCurve>; 3],
    observed_fraction: f64,
}

fn evaluate_or_undefined(
    metric: MetricKind,
    samples: &[WeightedSample],
    t: f64,
) -> Result<Option<f64>> {
    match metric.evaluate(samples, t) {
        Err(Error::EmptyPopulation) => Ok(None),
        other => other,
    }
}

fn calibration_or_undefined(
    samples: &[WeightedSample],
    n_bins: usize,
) -> Result<Option<CalibrationCurve>> {
    match calibration_curve(samples, n_bins) {
        Ok(c) => Ok(Some(c)),
        Err(Error::EmptyPopulation) => Ok(None),
        Err(e) => Err(e),
    }
}

fn run_replicate(spec: &ScenarioSpec, cfg: &ScenarioRunConfig, seed: u64) -> Result<Replicate> {
    let data = sample_dataset(spec, cfg.n, seed)?;
    let full: Vec<WeightedSample> = data.iter().map(|e| e.full_sample()).collect();
    let observed: Vec<WeightedSample> = data
        .iter()
        .filter(|e| e.selected)
        .map(|e| e.observed_sample())
        .collect();
    let weighted = ipw_weights(&observed)?;
    let populations = [&full, &observed, &weighted];

    let metrics = MetricKind::ALL
        .iter()
        .map(|&m| {
            let mut row = [None; 3];
            for (slot, pop) in row.iter_mut().zip(populations) {
                *slot = evaluate_or_undefined(m, pop, cfg.threshold)?;
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let calibration = [
        calibration_or_undefined(&full, cfg.n_bins)?,
        calibration_or_undefined(&observed, cfg.n_bins)?,
        calibration_or_undefined(&weighted, cfg.n_bins)?,
    ];
    Ok(Replicate {
        metrics,
        calibration,
        observed_fraction: observed.len() as f64 / cfg.n as f64,
    })
}

/// Seed of replicate `rep` of `spec`. Depends only on the root seed, the
/// scenario and the replicate index.
pub fn replicate_seed(root: u64, spec: &ScenarioSpec, rep: usize) -> u64 {
    derive_path(root, &[spec.scenario.number() as u64, rep as u64])
}

fn summarize_calibration(
    reps: &[Replicate],
    slot: usize,
    n_bins: usize,
) -> Vec<CalibrationBinSummary> {
    let width = 1.0 / n_bins as f64;
    (0..n_bins)
        .map(|b| {
            let mut preds = Vec::new();
            let mut prevalences = Vec::with_capacity(reps.len());
            let mut mass = 0.0;
            for r in reps {
                let bin = r.calibration[slot].as_ref().map(|c| c.bins[b]);
                let point = bin.and_then(|bin| bin.point);
                mass += bin.map_or(0.0, |bin| bin.mass);
                if let Some(p) = point {
                    preds.push(p.x);
                }
                prevalences.push(point.map(|p| p.y));
            }
            CalibrationBinSummary {
                index: b,
                lo: b as f64 * width,
                hi: if b + 1 == n_bins {
                    1.0
                } else {
                    (b + 1) as f64 * width
                },
                mean_pred: (!preds.is_empty())
                    .then(|| preds.iter().sum::<f64>() / preds.len() as f64),
                prevalence: EstimateSummary::from_replicates(&prevalences),
                weight_mass: mass / reps.len() as f64,
            }
        })
        .collect()
}

/// Runs `cfg.n_reps` replicates of `spec` in parallel and aggregates them.
/// The result is a pure function of `(spec, cfg)`.
pub fn run_scenario(spec: &ScenarioSpec, cfg: &ScenarioRunConfig) -> Result<ScenarioResult> {
    cfg.validate()?;
    spec.validate()?;
    let reps = (0..cfg.n_reps)
        .into_par_iter()
        .map(|r| run_replicate(spec, cfg, replicate_seed(cfg.seed, spec, r)))
        .collect::<Result<Vec<_>>>()?;

    let triplets = MetricKind::ALL
        .iter()
        .enumerate()
        .map(|(mi, &metric)| {
            let column = |ei: usize| {
                let values: Vec<Option<f64>> = reps.iter().map(|r| r.metrics[mi][ei]).collect();
                EstimateSummary::from_replicates(&values)
            };
            MetricTriplet {
                metric,
                actual: column(0),
                observed: column(1),
                weighted: column(2),
            }
        })
        .collect();

    let calibration = Estimator::ALL
        .iter()
        .enumerate()
        .map(|(slot, &estimator)| CalibrationSummary {
            estimator,
            bins: summarize_calibration(&reps, slot, cfg.n_bins),
        })
        .collect();

    Ok(ScenarioResult {
        spec: *spec,
        n: cfg.n,
        n_reps: cfg.n_reps,
        threshold: cfg.threshold,
        triplets,
        calibration,
        mean_observed_fraction: reps.iter().map(|r| r.observed_fraction).sum::<f64>()
            / reps.len() as f64,
    })
}

/// Runs the given scenarios in order.
pub fn run_suite(specs: &[ScenarioSpec], cfg: &ScenarioRunConfig) -> Result<Vec<ScenarioResult>> {
    specs.iter().map(|s| run_scenario(s, cfg)).collect()
}
