//! Replicate aggregation: means and percentile intervals.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Mean of a set of replicate values with a percentile interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointInterval {
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

impl PointInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Percentile of sorted data by linear interpolation between closest ranks
/// (position `p / 100 * (n - 1)`, zero-based).
pub fn percentile_sorted(sorted: &[f64], pct: f64) -> f64 {
    let h = pct / 100.0 * (sorted.len() - 1) as f64;
    let below = h.floor() as usize;
    let above = (below + 1).min(sorted.len() - 1);
    let frac = h - below as f64;
    sorted[below] + frac * (sorted[above] - sorted[below])
}

/// Arithmetic mean with a `[lo_pct, hi_pct]` percentile interval.
///
/// The mean is clamped into the interval so `lo <= mean <= hi` survives
/// floating-point rounding on near-constant inputs.
pub fn percentile_interval(values: &[f64], lo_pct: f64, hi_pct: f64) -> Result<PointInterval> {
    if values.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    if !(0.0 <= lo_pct && lo_pct < hi_pct && hi_pct <= 100.0) {
        return Err(invalid(format!(
            "percentiles must satisfy 0 <= lo < hi <= 100, got ({lo_pct}, {hi_pct})"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid("non-finite value in percentile input"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
    let lo = percentile_sorted(&sorted, lo_pct);
    let hi = percentile_sorted(&sorted, hi_pct);
    Ok(PointInterval {
        mean: mean.clamp(lo, hi),
        lo,
        hi,
    })
}

/// Which population/weighting an estimate is computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    /// Full population, unit weights.
    Actual,
    /// Selected subpopulation, unit weights.
    Observed,
    /// Selected subpopulation, inverse probability weights.
    Weighted,
}

impl Estimator {
    pub const ALL: [Estimator; 3] = [Estimator::Actual, Estimator::Observed, Estimator::Weighted];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::Actual => "actual",
            Estimator::Observed => "observed",
            Estimator::Weighted => "weighted",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Estimator::Actual => "Actual",
            Estimator::Observed => "Observed",
            Estimator::Weighted => "Weighted",
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Replicate summary of one estimate. Replicates where the estimate was
/// undefined are counted and excluded from the interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateSummary {
    /// `None` when every replicate was undefined.
    pub interval: Option<PointInterval>,
    pub n_undefined: usize,
    pub n_reps: usize,
}

/// Fraction of undefined replicates above which a summary is flagged.
pub const UNDEFINED_FLAG_FRACTION: f64 = 0.10;

impl EstimateSummary {
    pub fn from_replicates(values: &[Option<f64>]) -> Self {
        let defined: Vec<f64> = values.iter().flatten().copied().collect();
        Self {
            interval: percentile_interval(&defined, 2.5, 97.5).ok(),
            n_undefined: values.len() - defined.len(),
            n_reps: values.len(),
        }
    }

    pub fn mean(&self) -> Option<f64> {
        self.interval.map(|i| i.mean)
    }

    pub fn flagged(&self) -> bool {
        self.n_undefined as f64 > UNDEFINED_FLAG_FRACTION * self.n_reps as f64
    }
}
