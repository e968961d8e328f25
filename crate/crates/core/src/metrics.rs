//! Weighted binary classification metrics.
//!
//! Every estimator takes a slice of [`WeightedSample`]s and normalizes by the
//! total weight it sees, so the plain (unweighted) metric is the special case
//! where every weight is 1. Inverse probability weighted estimates are obtained
//! by passing the output of [`ipw_weights`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// One evaluation unit: a model score, the label if it was observed, and the
/// probability that the label would be observed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedSample {
    score: f64,
    label: Option<bool>,
    selection_prob: f64,
    weight: f64,
}

impl WeightedSample {
    /// Builds a unit-weight sample. `label` is `None` when the example was not
    /// selected.
    ///
    /// `selection_prob` may be 0 so that positivity violations can be
    /// represented and reported by [`ipw_weights`].
    pub fn new(score: f64, label: Option<bool>, selection_prob: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&score) {
            return Err(invalid(format!("score {score} outside [0, 1]")));
        }
        if !(0.0..=1.0).contains(&selection_prob) {
            return Err(invalid(format!(
                "selection probability {selection_prob} outside [0, 1]"
            )));
        }
        Ok(Self {
            score,
            label,
            selection_prob,
            weight: 1.0,
        })
    }

    /// A fully observed sample: selected with probability 1 and unit weight.
    pub fn labeled(score: f64, label: bool) -> Result<Self> {
        Self::new(score, Some(label), 1.0)
    }

    pub fn with_weight(mut self, weight: f64) -> Result<Self> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(invalid(format!("weight {weight} must be finite and > 0")));
        }
        self.weight = weight;
        Ok(self)
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    /// The label, available only for selected samples.
    pub fn label(&self) -> Option<bool> {
        self.label
    }

    pub fn selected(&self) -> bool {
        self.label.is_some()
    }

    pub fn selection_prob(&self) -> f64 {
        self.selection_prob
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

/// Keeps the selected samples and weights each by `1 / selection_prob`.
pub fn ipw_weights(samples: &[WeightedSample]) -> Result<Vec<WeightedSample>> {
    samples
        .iter()
        .filter(|s| s.selected())
        .map(|s| {
            if s.selection_prob <= 0.0 {
                return Err(Error::Positivity(format!(
                    "selected sample with score {} has selection probability 0",
                    s.score
                )));
            }
            s.with_weight(1.0 / s.selection_prob)
        })
        .collect()
}

/// Weighted confusion matrix at a fixed threshold. A sample is predicted
/// positive iff `score >= threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedConfusion {
    pub tp: f64,
    pub fp: f64,
    pub tn: f64,
    pub fn_: f64,
    pub threshold: f64,
}

impl WeightedConfusion {
    pub fn total(&self) -> f64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// `None` when no positive mass is present.
    pub fn sensitivity(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn specificity(&self) -> Option<f64> {
        ratio(self.tn, self.tn + self.fp)
    }

    /// `None` when nothing is predicted positive.
    pub fn ppv(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn accuracy(&self) -> Option<f64> {
        ratio(self.tp + self.tn, self.total())
    }
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| (num / den).clamp(0.0, 1.0))
}

fn labeled_triples(samples: &[WeightedSample]) -> Result<Vec<(f64, bool, f64)>> {
    if samples.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    samples
        .iter()
        .map(|s| {
            s.label
                .map(|y| (s.score, y, s.weight))
                .ok_or(Error::UnlabeledSample)
        })
        .collect()
}

pub fn weighted_confusion(samples: &[WeightedSample], threshold: f64) -> Result<WeightedConfusion> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(invalid(format!("threshold {threshold} outside [0, 1]")));
    }
    let mut c = WeightedConfusion {
        tp: 0.0,
        fp: 0.0,
        tn: 0.0,
        fn_: 0.0,
        threshold,
    };
    for (score, y, w) in labeled_triples(samples)? {
        match (score >= threshold, y) {
            (true, true) => c.tp += w,
            (true, false) => c.fp += w,
            (false, false) => c.tn += w,
            (false, true) => c.fn_ += w,
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    Roc,
    Pr,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub y: f64,
}

/// A ROC (x = FPR, y = TPR) or PR (x = recall, y = precision) curve with its
/// integrated area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub kind: CurveKind,
    pub points: Vec<CurvePoint>,
    pub area: f64,
}

/// Cumulative weighted positive/negative mass after each distinct score,
/// visiting scores in descending order.
struct ThresholdSweep {
    /// (tp, fp) after each tie group.
    cumulative: Vec<(f64, f64)>,
    pos: f64,
    neg: f64,
}

fn threshold_sweep(samples: &[WeightedSample]) -> Result<ThresholdSweep> {
    let mut triples = labeled_triples(samples)?;
    // Stable sort keeps accumulation order within tie groups reproducible.
    triples.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut cumulative = Vec::new();
    let (mut tp, mut fp) = (0.0, 0.0);
    let mut i = 0;
    while i < triples.len() {
        let score = triples[i].0;
        while i < triples.len() && triples[i].0 == score {
            let (_, y, w) = triples[i];
            if y {
                tp += w;
            } else {
                fp += w;
            }
            i += 1;
        }
        cumulative.push((tp, fp));
    }
    Ok(ThresholdSweep {
        cumulative,
        pos: tp,
        neg: fp,
    })
}

/// Weighted ROC curve. Tied scores form a single vertex; the area is the
/// trapezoidal integral, which equals the weighted Mann-Whitney statistic with
/// ties counted as one half.
pub fn weighted_roc(samples: &[WeightedSample]) -> Result<Curve> {
    let sweep = threshold_sweep(samples)?;
    let (pos, neg) = (sweep.pos, sweep.neg);
    if pos <= 0.0 || neg <= 0.0 {
        return Err(Error::DegenerateRoc);
    }
    let mut points = Vec::with_capacity(sweep.cumulative.len() + 1);
    points.push(CurvePoint { x: 0.0, y: 0.0 });
    let mut twice_area = 0.0;
    let (mut prev_tp, mut prev_fp) = (0.0, 0.0);
    for &(tp, fp) in &sweep.cumulative {
        twice_area += (fp - prev_fp) * (tp + prev_tp);
        points.push(CurvePoint {
            x: fp / neg,
            y: tp / pos,
        });
        (prev_tp, prev_fp) = (tp, fp);
    }
    Ok(Curve {
        kind: CurveKind::Roc,
        points,
        area: (twice_area / (2.0 * pos * neg)).clamp(0.0, 1.0),
    })
}

/// Weighted precision-recall curve integrated as a step function
/// (average precision): `sum_k (R_k - R_{k-1}) * P_k`.
pub fn weighted_pr(samples: &[WeightedSample]) -> Result<Curve> {
    let sweep = threshold_sweep(samples)?;
    let pos = sweep.pos;
    if pos <= 0.0 {
        return Err(Error::DegeneratePr);
    }
    let mut points = Vec::with_capacity(sweep.cumulative.len() + 1);
    points.push(CurvePoint { x: 0.0, y: 1.0 });
    let mut area = 0.0;
    let mut prev_tp = 0.0;
    for &(tp, fp) in &sweep.cumulative {
        let precision = tp / (tp + fp);
        area += (tp - prev_tp) * precision;
        points.push(CurvePoint {
            x: tp / pos,
            y: precision,
        });
        prev_tp = tp;
    }
    Ok(Curve {
        kind: CurveKind::Pr,
        points,
        area: (area / pos).clamp(0.0, 1.0),
    })
}

/// One equal-width calibration bin. `point` is `None` when the bin holds no
/// weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBin {
    pub index: usize,
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
    /// x = weighted mean score, y = weighted outcome prevalence.
    pub point: Option<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCurve {
    pub bins: Vec<CalibrationBin>,
}

impl CalibrationCurve {
    /// Bin masses, in bin order.
    pub fn bin_counts(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.mass).collect()
    }
}

/// Index of the equal-width bin holding `score`; the last bin is right-closed.
pub fn calibration_bin_index(score: f64, n_bins: usize) -> usize {
    ((score * n_bins as f64).floor() as usize).min(n_bins - 1)
}

pub fn calibration_curve(samples: &[WeightedSample], n_bins: usize) -> Result<CalibrationCurve> {
    if n_bins < 1 {
        return Err(invalid("calibration needs at least one bin"));
    }
    let triples = labeled_triples(samples)?;
    // (mass, weighted score sum, weighted label sum)
    let mut acc = vec![(0.0, 0.0, 0.0); n_bins];
    for (score, y, w) in triples {
        let a = &mut acc[calibration_bin_index(score, n_bins)];
        a.0 += w;
        a.1 += w * score;
        if y {
            a.2 += w;
        }
    }
    let width = 1.0 / n_bins as f64;
    let bins = acc
        .into_iter()
        .enumerate()
        .map(|(index, (mass, score_sum, label_sum))| CalibrationBin {
            index,
            lo: index as f64 * width,
            hi: if index + 1 == n_bins {
                1.0
            } else {
                (index + 1) as f64 * width
            },
            mass,
            point: (mass > 0.0).then(|| CurvePoint {
                x: (score_sum / mass).clamp(0.0, 1.0),
                y: (label_sum / mass).clamp(0.0, 1.0),
            }),
        })
        .collect();
    Ok(CalibrationCurve { bins })
}

/// The six tracked discrimination metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Sensitivity,
    Specificity,
    Ppv,
    Accuracy,
    Auroc,
    Auprc,
}

impl MetricKind {
    pub const ALL: [MetricKind; 6] = [
        MetricKind::Sensitivity,
        MetricKind::Specificity,
        MetricKind::Ppv,
        MetricKind::Accuracy,
        MetricKind::Auroc,
        MetricKind::Auprc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Sensitivity => "sensitivity",
            MetricKind::Specificity => "specificity",
            MetricKind::Ppv => "ppv",
            MetricKind::Accuracy => "accuracy",
            MetricKind::Auroc => "auroc",
            MetricKind::Auprc => "auprc",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            MetricKind::Sensitivity => "Sensitivity",
            MetricKind::Specificity => "Specificity",
            MetricKind::Ppv => "PPV",
            MetricKind::Accuracy => "Accuracy",
            MetricKind::Auroc => "AUROC",
            MetricKind::Auprc => "AUPRC",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
    }

    /// Evaluates this metric. `Ok(None)` means the metric is undefined on this
    /// input (zero denominator, or a class absent for ROC/PR).
    pub fn evaluate(self, samples: &[WeightedSample], threshold: f64) -> Result<Option<f64>> {
        let undefined_if_degenerate = |r: Result<Curve>| match r {
            Ok(c) => Ok(Some(c.area)),
            Err(Error::DegenerateRoc | Error::DegeneratePr) => Ok(None),
            Err(e) => Err(e),
        };
        match self {
            MetricKind::Auroc => undefined_if_degenerate(weighted_roc(samples)),
            MetricKind::Auprc => undefined_if_degenerate(weighted_pr(samples)),
            _ => {
                let c = weighted_confusion(samples, threshold)?;
                Ok(match self {
                    MetricKind::Sensitivity => c.sensitivity(),
                    MetricKind::Specificity => c.specificity(),
                    MetricKind::Ppv => c.ppv(),
                    MetricKind::Accuracy => c.accuracy(),
                    MetricKind::Auroc | MetricKind::Auprc => unreachable!(),
                })
            }
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
