//! Self-test harness: checks the weighted estimators against independent
//! brute-force oracles on random instances.

use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::metrics::{
    calibration_curve, ipw_weights, weighted_confusion, weighted_roc, MetricKind, WeightedSample,
};
use crate::seed::{derive_seed, rng_from_seed, SimRng};
use crate::synthetic::{sample_dataset, ScenarioSpec};

/// A deliberately injected bug, used to check that the harness notices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Weight observed samples by `selection_prob` instead of its inverse.
    UninvertedWeights,
}

#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    pub quick: bool,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            quick: false,
            seed: 7,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
    /// First failing instance, serialized for reproduction.
    pub counterexample: Option<serde_json::Value>,
}

impl PropertyOutcome {
    fn pass(name: &'static str, cases: usize, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed: true,
            cases,
            detail: detail.into(),
            counterexample: None,
        }
    }

    fn fail(
        name: &'static str,
        cases: usize,
        detail: impl Into<String>,
        cx: serde_json::Value,
    ) -> Self {
        Self {
            name,
            passed: false,
            cases,
            detail: detail.into(),
            counterexample: Some(cx),
        }
    }
}

const TOL: f64 = 1e-9;

/// Random labeled instance with `2..=max_n` samples and both classes present.
/// Scores are drawn from a coarse grid half the time so ties occur.
fn random_instance(rng: &mut SimRng, max_n: usize) -> (Vec<f64>, Vec<bool>) {
    loop {
        let n = rng.random_range(2..=max_n);
        let coarse = rng.random::<bool>();
        let scores: Vec<f64> = (0..n)
            .map(|_| {
                if coarse {
                    rng.random_range(0..=10) as f64 / 10.0
                } else {
                    rng.random::<f64>()
                }
            })
            .collect();
        let labels: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
        if labels.iter().any(|&y| y) && labels.iter().any(|&y| !y) {
            return (scores, labels);
        }
    }
}

/// Weighted Mann-Whitney statistic over all positive/negative pairs.
pub fn pairwise_auroc(scores: &[f64], labels: &[bool], weights: &[f64]) -> f64 {
    let (mut num, mut wp, mut wn) = (0.0, 0.0, 0.0);
    for i in 0..scores.len() {
        if labels[i] {
            wp += weights[i];
        } else {
            wn += weights[i];
        }
    }
    for i in (0..scores.len()).filter(|&i| labels[i]) {
        for j in (0..scores.len()).filter(|&j| !labels[j]) {
            let win = if scores[i] > scores[j] {
                1.0
            } else if scores[i] == scores[j] {
                0.5
            } else {
                0.0
            };
            num += weights[i] * weights[j] * win;
        }
    }
    num / (wp * wn)
}

fn pairwise_oracle(opts: &ValidationOptions) -> PropertyOutcome {
    const NAME: &str = "pairwise AUROC oracle";
    let cases = 1000;
    let mut rng = rng_from_seed(derive_seed(opts.seed, 1));
    for case in 0..cases {
        let (scores, labels) = random_instance(&mut rng, 50);
        let probs: Vec<f64> = scores
            .iter()
            .map(|_| rng.random_range(0.05..=1.0))
            .collect();
        let observed: Vec<WeightedSample> = scores
            .iter()
            .zip(&labels)
            .zip(&probs)
            .map(|((&s, &y), &p)| WeightedSample::new(s, Some(y), p).unwrap())
            .collect();
        let weighted = match opts.fault {
            None => ipw_weights(&observed).unwrap(),
            Some(Fault::UninvertedWeights) => observed
                .iter()
                .map(|s| s.with_weight(s.selection_prob()).unwrap())
                .collect(),
        };
        let got = weighted_roc(&weighted).unwrap().area;
        let oracle_weights: Vec<f64> = probs.iter().map(|p| 1.0 / p).collect();
        let expected = pairwise_auroc(&scores, &labels, &oracle_weights);
        if (got - expected).abs() > TOL {
            return PropertyOutcome::fail(
                NAME,
                case + 1,
                format!("case {case}: weighted AUROC {got} != pairwise {expected}"),
                json!({
                    "scores": scores,
                    "labels": labels,
                    "selection_probs": probs,
                    "expected": expected,
                    "got": got,
                }),
            );
        }
    }
    PropertyOutcome::pass(
        NAME,
        cases,
        "weighted AUROC matches pairwise statistic within 1e-9",
    )
}

fn replication_oracle(opts: &ValidationOptions) -> PropertyOutcome {
    const NAME: &str = "integer-weight replication oracle";
    let cases = if opts.quick { 200 } else { 1000 };
    let mut rng = rng_from_seed(derive_seed(opts.seed, 2));
    for case in 0..cases {
        let (scores, labels) = random_instance(&mut rng, 30);
        let counts: Vec<u32> = scores.iter().map(|_| rng.random_range(1..=4)).collect();
        let weighted: Vec<WeightedSample> = scores
            .iter()
            .zip(&labels)
            .zip(&counts)
            .map(|((&s, &y), &k)| {
                WeightedSample::labeled(s, y)
                    .unwrap()
                    .with_weight(k as f64)
                    .unwrap()
            })
            .collect();
        let replicated: Vec<WeightedSample> = scores
            .iter()
            .zip(&labels)
            .zip(&counts)
            .flat_map(|((&s, &y), &k)| {
                std::iter::repeat_n(WeightedSample::labeled(s, y).unwrap(), k as usize)
            })
            .collect();
        for m in MetricKind::ALL {
            let a = m.evaluate(&weighted, 0.5).unwrap();
            let b = m.evaluate(&replicated, 0.5).unwrap();
            let agree = match (a, b) {
                (Some(a), Some(b)) => (a - b).abs() <= TOL,
                (None, None) => true,
                _ => false,
            };
            if !agree {
                return PropertyOutcome::fail(
                    NAME,
                    case + 1,
                    format!("case {case}: {m} weighted {a:?} != replicated {b:?}"),
                    json!({ "metric": m.name(), "scores": scores, "labels": labels, "counts": counts }),
                );
            }
        }
        let ca = calibration_curve(&weighted, 5).unwrap();
        let cb = calibration_curve(&replicated, 5).unwrap();
        for (x, y) in ca.bins.iter().zip(&cb.bins) {
            let same = (x.mass - y.mass).abs() <= TOL
                && match (x.point, y.point) {
                    (Some(p), Some(q)) => (p.x - q.x).abs() <= TOL && (p.y - q.y).abs() <= TOL,
                    (None, None) => true,
                    _ => false,
                };
            if !same {
                return PropertyOutcome::fail(
                    NAME,
                    case + 1,
                    format!("case {case}: calibration bin {} differs", x.index),
                    json!({ "scores": scores, "labels": labels, "counts": counts }),
                );
            }
        }
    }
    PropertyOutcome::pass(
        NAME,
        cases,
        "six metrics and calibration match replicated multiset",
    )
}

/// Textbook count-based metrics at threshold 0.5 on unit-weight data.
fn textbook_metrics(scores: &[f64], labels: &[bool]) -> Vec<Option<f64>> {
    let (mut tp, mut fp, mut tn, mut fn_) = (0u32, 0u32, 0u32, 0u32);
    for (&s, &y) in scores.iter().zip(labels) {
        match (s >= 0.5, y) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    let div = |a: u32, b: u32| (b > 0).then(|| a as f64 / b as f64);
    let pos = labels.iter().filter(|&&y| y).count();
    let neg = labels.len() - pos;
    // Mann-Whitney U counted in half-units.
    let mut twice_u = 0u64;
    for i in (0..scores.len()).filter(|&i| labels[i]) {
        for j in (0..scores.len()).filter(|&j| !labels[j]) {
            twice_u += if scores[i] > scores[j] {
                2
            } else if scores[i] == scores[j] {
                1
            } else {
                0
            };
        }
    }
    let auroc = (pos > 0 && neg > 0).then(|| twice_u as f64 / (2 * pos * neg) as f64);
    // Average precision: precision at each distinct threshold, weighted by the
    // number of positives it adds.
    let mut distinct: Vec<f64> = scores.to_vec();
    distinct.sort_by(|a, b| b.total_cmp(a));
    distinct.dedup();
    let mut ap = 0.0;
    let mut prev_tp = 0usize;
    for t in distinct {
        let above = scores.iter().zip(labels).filter(|(&s, _)| s >= t);
        let (ctp, cfp) = above.fold(
            (0usize, 0usize),
            |(a, b), (_, &y)| if y { (a + 1, b) } else { (a, b + 1) },
        );
        ap += (ctp - prev_tp) as f64 * (ctp as f64 / (ctp + cfp) as f64);
        prev_tp = ctp;
    }
    let auprc = (pos > 0).then(|| ap / pos as f64);
    vec![
        div(tp, tp + fn_),
        div(tn, tn + fp),
        div(tp, tp + fp),
        div(tp + tn, tp + tn + fp + fn_),
        auroc,
        auprc,
    ]
}

fn unit_weight_equivalence(opts: &ValidationOptions) -> PropertyOutcome {
    const NAME: &str = "unit-weight equivalence";
    let cases = if opts.quick { 200 } else { 1000 };
    let mut rng = rng_from_seed(derive_seed(opts.seed, 3));
    for case in 0..cases {
        let (scores, labels) = random_instance(&mut rng, 40);
        let samples: Vec<WeightedSample> = scores
            .iter()
            .zip(&labels)
            .map(|(&s, &y)| WeightedSample::labeled(s, y).unwrap())
            .collect();
        let textbook = textbook_metrics(&scores, &labels);
        for (m, expected) in MetricKind::ALL.into_iter().zip(textbook) {
            let got = m.evaluate(&samples, 0.5).unwrap();
            let same = match (got, expected) {
                (Some(a), Some(b)) => (a - b).abs() <= 1e-15,
                (None, None) => true,
                _ => false,
            };
            if !same {
                return PropertyOutcome::fail(
                    NAME,
                    case + 1,
                    format!("case {case}: {m} = {got:?}, textbook {expected:?}"),
                    json!({ "metric": m.name(), "scores": scores, "labels": labels }),
                );
            }
        }
    }
    PropertyOutcome::pass(NAME, cases, "unit-weight metrics equal textbook counts")
}

fn constant_weight_invariance(opts: &ValidationOptions) -> PropertyOutcome {
    const NAME: &str = "constant-weight invariance";
    let cases = if opts.quick { 200 } else { 1000 };
    let mut rng = rng_from_seed(derive_seed(opts.seed, 4));
    for case in 0..cases {
        let (scores, labels) = random_instance(&mut rng, 40);
        let base: Vec<WeightedSample> = scores
            .iter()
            .zip(&labels)
            .map(|(&s, &y)| {
                WeightedSample::labeled(s, y)
                    .unwrap()
                    .with_weight(rng.random_range(0.1..10.0))
                    .unwrap()
            })
            .collect();
        let c = rng.random_range(0.01..100.0);
        let scaled: Vec<WeightedSample> = base
            .iter()
            .map(|s| s.with_weight(s.weight() * c).unwrap())
            .collect();
        for m in MetricKind::ALL {
            let (a, b) = (
                m.evaluate(&base, 0.5).unwrap(),
                m.evaluate(&scaled, 0.5).unwrap(),
            );
            let same = match (a, b) {
                (Some(a), Some(b)) => (a - b).abs() <= TOL,
                (None, None) => true,
                _ => false,
            };
            if !same {
                return PropertyOutcome::fail(
                    NAME,
                    case + 1,
                    format!("case {case}: {m} changed under scale {c}: {a:?} vs {b:?}"),
                    json!({ "metric": m.name(), "scores": scores, "labels": labels, "scale": c }),
                );
            }
        }
        let conf = weighted_confusion(&base, 0.5).unwrap();
        let total: f64 = base.iter().map(|s| s.weight()).sum();
        if (conf.total() - total).abs() > TOL * total {
            return PropertyOutcome::fail(
                NAME,
                case + 1,
                format!(
                    "case {case}: confusion mass {} != total weight {total}",
                    conf.total()
                ),
                json!({ "scores": scores, "labels": labels }),
            );
        }
    }
    PropertyOutcome::pass(NAME, cases, "metrics unchanged when all weights are scaled")
}

/// Upper 0.1% quantiles of the chi-square distribution, df = 1..=10.
const CHI2_999: [f64; 10] = [
    10.828, 13.816, 16.266, 18.467, 20.515, 22.458, 24.322, 26.124, 27.877, 29.588,
];

fn selection_consistency(opts: &ValidationOptions) -> PropertyOutcome {
    const NAME: &str = "selection-probability consistency";
    let n = if opts.quick { 10_000 } else { 50_000 };
    let specs = ScenarioSpec::defaults();
    for (k, spec) in specs.iter().enumerate() {
        let data = sample_dataset(spec, n, derive_seed(opts.seed, 100 + k as u64)).unwrap();
        // Bin by selection probability into 10 equal-width bins.
        let mut observed = [0.0; 10];
        let mut expected = [0.0; 10];
        let mut variance = [0.0; 10];
        for e in &data {
            let b = ((e.selection_prob * 10.0).floor() as usize).min(9);
            observed[b] += f64::from(u8::from(e.selected));
            expected[b] += e.selection_prob;
            variance[b] += e.selection_prob * (1.0 - e.selection_prob);
        }
        let mut stat = 0.0;
        let mut df = 0;
        for b in 0..10 {
            if variance[b] > 1e-12 {
                stat += (observed[b] - expected[b]).powi(2) / variance[b];
                df += 1;
            } else if (observed[b] - expected[b]).abs() > 1e-6 {
                stat = f64::INFINITY;
                df = df.max(1);
            }
        }
        if df > 0 && stat > CHI2_999[df - 1] {
            return PropertyOutcome::fail(
                NAME,
                k + 1,
                format!(
                    "{}: chi-square {stat:.2} on {df} df exceeds 0.001 critical value",
                    spec.scenario
                ),
                json!({ "scenario": spec.scenario.name(), "observed": observed, "expected": expected }),
            );
        }
    }
    PropertyOutcome::pass(
        NAME,
        specs.len(),
        format!("selected fractions match probabilities (n = {n})"),
    )
}

/// Runs every property and returns one outcome per property.
pub fn run_validation(opts: &ValidationOptions) -> Vec<PropertyOutcome> {
    vec![
        pairwise_oracle(opts),
        replication_oracle(opts),
        unit_weight_equivalence(opts),
        constant_weight_invariance(opts),
        selection_consistency(opts),
    ]
}
