//! Synthetic data-generating process, the perfectly specified scorer, and the
//! five label-selection mechanisms.
//!
//! Features are drawn i.i.d. from `Uniform(-alpha, beta)` per coordinate, the
//! label from `Bernoulli(sigmoid(omega1*x1 + omega2*x2 + gamma))`, and the model
//! score is that same sigmoid, so the scorer is calibrated by construction.
//!
//! Note on the feature support: with the default `alpha = beta = 2` the
//! support is `[-2, 2]`. The lower bound is the *negated* `alpha`, so the
//! default decision boundary `x1 + x2 = 0` bisects the square and both classes
//! occur equally often.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::metrics::WeightedSample;
use crate::seed::rng_from_seed;

/// Logistic function, evaluated without overflow for large `|z|`.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DgpParams {
    /// Features are bounded below by `-alpha`.
    pub alpha: f64,
    /// Features are bounded above by `beta`.
    pub beta: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub gamma: f64,
}

impl Default for DgpParams {
    fn default() -> Self {
        Self {
            alpha: 2.0,
            beta: 2.0,
            omega1: 1.0,
            omega2: 1.0,
            gamma: 0.0,
        }
    }
}

impl DgpParams {
    pub fn support(&self) -> (f64, f64) {
        (-self.alpha, self.beta)
    }

    pub fn logit(&self, x1: f64, x2: f64) -> f64 {
        self.omega1 * x1 + self.omega2 * x2 + self.gamma
    }

    /// The perfectly specified model `h(x)`.
    pub fn score(&self, x1: f64, x2: f64) -> f64 {
        sigmoid(self.logit(x1, x2))
    }

    fn corners(&self) -> [(f64, f64); 4] {
        let (lo, hi) = self.support();
        [(lo, lo), (lo, hi), (hi, lo), (hi, hi)]
    }

    /// Supremum of the boundary distance over the feature support. The
    /// distance is convex in `x`, so the supremum sits at a corner.
    pub fn max_boundary_distance(&self) -> Result<f64> {
        self.corners()
            .iter()
            .map(|&(x1, x2)| boundary_distance(x1, x2, self))
            .try_fold(0.0_f64, |m, d| Ok(m.max(d?)))
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.support();
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid(format!("empty feature support [{lo}, {hi}]")));
        }
        if self.omega1 == 0.0 && self.omega2 == 0.0 {
            return Err(invalid("logit weight vector is zero"));
        }
        let logits = self.corners().map(|(x1, x2)| self.logit(x1, x2));
        let min = logits.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !(min < 0.0 && max > 0.0) {
            return Err(invalid(
                "feature support does not straddle the decision boundary",
            ));
        }
        Ok(())
    }
}

/// Euclidean distance from `(x1, x2)` to the line `omega1*x1 + omega2*x2 + gamma = 0`.
pub fn boundary_distance(x1: f64, x2: f64, dgp: &DgpParams) -> Result<f64> {
    let norm = dgp.omega1.hypot(dgp.omega2);
    if norm == 0.0 {
        return Err(invalid("logit weight vector is zero"));
    }
    Ok(dgp.logit(x1, x2).abs() / norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Selection completely at random.
    Scar,
    /// Selection more likely near the decision boundary.
    SelectHard,
    /// Selection more likely far from the decision boundary.
    SelectEasy,
    /// Selection more likely when `y = 0`.
    SelectNegative,
    /// Selection more likely when `y = 1`.
    SelectPositive,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::Scar,
        Scenario::SelectHard,
        Scenario::SelectEasy,
        Scenario::SelectNegative,
        Scenario::SelectPositive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Scar => "scar",
            Scenario::SelectHard => "select_hard",
            Scenario::SelectEasy => "select_easy",
            Scenario::SelectNegative => "select_negative",
            Scenario::SelectPositive => "select_positive",
        }
    }

    /// 1-based position in the standard scenario ordering.
    pub fn number(self) -> usize {
        Self::ALL.iter().position(|&s| s == self).unwrap() + 1
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        Self::ALL.into_iter().find(|sc| {
            sc.name().eq_ignore_ascii_case(s)
                || sc.name().replace('_', "-").eq_ignore_ascii_case(s)
                || s == sc.number().to_string()
        })
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the select-easy normalizer `delta` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMode {
    /// Supremum of the boundary distance over the feature support.
    #[default]
    Support,
    /// Maximum boundary distance among the drawn sample.
    SampleMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    /// Selection probability for SCAR; for label-dependent selection, the
    /// probability when `y = 1`.
    pub pi1: f64,
    /// Label-dependent selection probability when `y = 0`. Unused otherwise.
    pub pi2: f64,
    pub dgp: DgpParams,
    pub delta_mode: DeltaMode,
}

impl ScenarioSpec {
    /// Scenario with its default selection parameters and the default DGP.
    pub fn new(scenario: Scenario) -> Self {
        let (pi1, pi2) = match scenario {
            Scenario::Scar => (0.5, 1.0),
            Scenario::SelectNegative => (0.5, 1.0),
            Scenario::SelectPositive => (1.0, 0.5),
            Scenario::SelectHard | Scenario::SelectEasy => (1.0, 1.0),
        };
        Self {
            scenario,
            pi1,
            pi2,
            dgp: DgpParams::default(),
            delta_mode: DeltaMode::Support,
        }
    }

    /// The five scenarios in standard order, all at defaults.
    pub fn defaults() -> Vec<Self> {
        Scenario::ALL.into_iter().map(Self::new).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.dgp.validate()?;
        let in_range = |p: f64| p > 0.0 && p <= 1.0;
        let (check_pi1, check_pi2) = match self.scenario {
            Scenario::Scar => (true, false),
            Scenario::SelectNegative | Scenario::SelectPositive => (true, true),
            Scenario::SelectHard | Scenario::SelectEasy => (false, false),
        };
        if check_pi1 && !in_range(self.pi1) {
            return Err(invalid(format!("pi1 = {} must lie in (0, 1]", self.pi1)));
        }
        if check_pi2 && !in_range(self.pi2) {
            return Err(invalid(format!("pi2 = {} must lie in (0, 1]", self.pi2)));
        }
        Ok(())
    }

    /// Whether every example is selected with probability 1.
    pub fn selects_everything(&self) -> bool {
        match self.scenario {
            Scenario::Scar => self.pi1 == 1.0,
            Scenario::SelectNegative | Scenario::SelectPositive => {
                self.pi1 == 1.0 && self.pi2 == 1.0
            }
            Scenario::SelectHard | Scenario::SelectEasy => false,
        }
    }

    fn probability(&self, x1: f64, x2: f64, y: bool, delta: f64) -> Result<f64> {
        Ok(match self.scenario {
            Scenario::Scar => self.pi1,
            Scenario::SelectHard => (-boundary_distance(x1, x2, &self.dgp)?).exp(),
            Scenario::SelectEasy => (boundary_distance(x1, x2, &self.dgp)? - delta)
                .exp()
                .min(1.0),
            Scenario::SelectNegative | Scenario::SelectPositive => {
                if y {
                    self.pi1
                } else {
                    self.pi2
                }
            }
        })
    }
}

/// Closed-form probability that the label at `(x1, x2, y)` is observed. The
/// select-easy normalizer is the support supremum.
pub fn selection_probability(x1: f64, x2: f64, y: bool, spec: &ScenarioSpec) -> Result<f64> {
    let delta = match spec.scenario {
        Scenario::SelectEasy => spec.dgp.max_boundary_distance()?,
        _ => 0.0,
    };
    spec.probability(x1, x2, y, delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulatedExample {
    pub x1: f64,
    pub x2: f64,
    pub y: bool,
    pub score: f64,
    pub selection_prob: f64,
    pub selected: bool,
}

impl SimulatedExample {
    /// The example as seen by the full population: always labeled.
    pub fn full_sample(&self) -> WeightedSample {
        WeightedSample::new(self.score, Some(self.y), self.selection_prob)
            .expect("simulated example fields are in range")
    }

    /// The example as seen after selection: labeled only if selected.
    pub fn observed_sample(&self) -> WeightedSample {
        WeightedSample::new(
            self.score,
            self.selected.then_some(self.y),
            self.selection_prob,
        )
        .expect("simulated example fields are in range")
    }
}

/// Draws `n` examples. The result depends only on `(spec, n, seed)`.
pub fn sample_dataset(spec: &ScenarioSpec, n: usize, seed: u64) -> Result<Vec<SimulatedExample>> {
    if n < 1 {
        return Err(invalid("dataset size must be at least 1"));
    }
    spec.validate()?;
    let mut rng = rng_from_seed(seed);
    let (lo, hi) = spec.dgp.support();
    let width = hi - lo;

    let features: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            (
                lo + width * rng.random::<f64>(),
                lo + width * rng.random::<f64>(),
            )
        })
        .collect();

    let delta = match (spec.scenario, spec.delta_mode) {
        (Scenario::SelectEasy, DeltaMode::Support) => spec.dgp.max_boundary_distance()?,
        (Scenario::SelectEasy, DeltaMode::SampleMax) => features
            .iter()
            .map(|&(x1, x2)| boundary_distance(x1, x2, &spec.dgp))
            .try_fold(0.0_f64, |m, d| d.map(|d| m.max(d)))?,
        _ => 0.0,
    };

    features
        .into_iter()
        .map(|(x1, x2)| {
            let score = spec.dgp.score(x1, x2);
            let y = rng.random::<f64>() < score;
            let selection_prob = spec.probability(x1, x2, y, delta)?;
            let selected = rng.random::<f64>() < selection_prob;
            Ok(SimulatedExample {
                x1,
                x2,
                y,
                score,
                selection_prob,
                selected,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        let expected = 1.0 / (1.0 + (-4.0f64).exp());
        assert!((sigmoid(4.0) - expected).abs() < 1e-15);
        assert!((sigmoid(4.0) - 0.98201).abs() < 1e-5);
        for z in [-700.0, -30.0, -1.3, 0.2, 5.0, 800.0] {
            assert!((sigmoid(z) + sigmoid(-z) - 1.0).abs() < 1e-15);
        }
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) <= 1.0);
    }

    #[test]
    fn distances() {
        let d = DgpParams::default();
        assert_eq!(boundary_distance(0.0, 0.0, &d).unwrap(), 0.0);
        assert!((boundary_distance(1.0, 1.0, &d).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!((boundary_distance(2.0, 2.0, &d).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((d.max_boundary_distance().unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let zero = DgpParams {
            omega1: 0.0,
            omega2: 0.0,
            ..d
        };
        assert!(boundary_distance(1.0, 1.0, &zero).is_err());
    }

    #[test]
    fn selection_probability_anchors() {
        let hard = ScenarioSpec::new(Scenario::SelectHard);
        assert_eq!(selection_probability(0.0, 0.0, true, &hard).unwrap(), 1.0);
        let easy = ScenarioSpec::new(Scenario::SelectEasy);
        let corner = selection_probability(2.0, 2.0, false, &easy).unwrap();
        assert!((corner - 1.0).abs() < 1e-12);
        let neg = ScenarioSpec::new(Scenario::SelectNegative);
        assert_eq!(selection_probability(0.3, 0.1, false, &neg).unwrap(), 1.0);
        assert_eq!(selection_probability(0.3, 0.1, true, &neg).unwrap(), 0.5);
        let pos = ScenarioSpec::new(Scenario::SelectPositive);
        assert_eq!(selection_probability(0.3, 0.1, true, &pos).unwrap(), 1.0);
        assert_eq!(selection_probability(0.3, 0.1, false, &pos).unwrap(), 0.5);
        let scar = ScenarioSpec::new(Scenario::Scar);
        assert_eq!(selection_probability(1.0, -2.0, true, &scar).unwrap(), 0.5);
    }

    #[test]
    fn hard_and_easy_are_monotone_in_distance() {
        let hard = ScenarioSpec::new(Scenario::SelectHard);
        let easy = ScenarioSpec::new(Scenario::SelectEasy);
        let mut prev = (f64::INFINITY, 0.0);
        for k in 0..=20 {
            let x = k as f64 * 0.1;
            let h = selection_probability(x, x, true, &hard).unwrap();
            let e = selection_probability(x, x, true, &easy).unwrap();
            assert!(h < prev.0 && e > prev.1);
            prev = (h, e);
        }
    }

    #[test]
    fn spec_validation() {
        let mut s = ScenarioSpec::new(Scenario::Scar);
        s.pi1 = 0.0;
        assert!(s.validate().is_err());
        let mut s = ScenarioSpec::new(Scenario::SelectHard);
        s.dgp.gamma = 10.0;
        assert!(s.validate().is_err());
        assert!(ScenarioSpec::defaults()
            .iter()
            .all(|s| s.validate().is_ok()));
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = ScenarioSpec::new(Scenario::SelectEasy);
        let a = sample_dataset(&spec, 500, 9).unwrap();
        let b = sample_dataset(&spec, 500, 9).unwrap();
        assert_eq!(a, b);
        let c = sample_dataset(&spec, 500, 10).unwrap();
        assert_ne!(a, c);
        assert!(sample_dataset(&spec, 0, 9).is_err());
    }

    #[test]
    fn sampled_fields_are_consistent() {
        let spec = ScenarioSpec::new(Scenario::SelectHard);
        for ex in sample_dataset(&spec, 1000, 3).unwrap() {
            assert!((-2.0..2.0).contains(&ex.x1) && (-2.0..2.0).contains(&ex.x2));
            assert_eq!(ex.score, sigmoid(ex.x1 + ex.x2));
            let p = selection_probability(ex.x1, ex.x2, ex.y, &spec).unwrap();
            assert_eq!(ex.selection_prob, p);
            assert_eq!(ex.observed_sample().selected(), ex.selected);
        }
    }

    #[test]
    fn sample_max_delta_touches_one() {
        let mut spec = ScenarioSpec::new(Scenario::SelectEasy);
        spec.delta_mode = DeltaMode::SampleMax;
        let data = sample_dataset(&spec, 2000, 4).unwrap();
        let max = data.iter().map(|e| e.selection_prob).fold(0.0, f64::max);
        assert_eq!(max, 1.0);
    }

    #[test]
    fn scenario_parse() {
        assert_eq!(Scenario::parse("select_hard"), Some(Scenario::SelectHard));
        assert_eq!(Scenario::parse("select-easy"), Some(Scenario::SelectEasy));
        assert_eq!(Scenario::parse("SCAR"), Some(Scenario::Scar));
        assert_eq!(Scenario::parse("4"), Some(Scenario::SelectNegative));
        assert_eq!(Scenario::parse("nope"), None);
    }
}
