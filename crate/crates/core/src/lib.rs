//! Selection-aware evaluation of binary classifiers.
//!
//! When only some examples have observed labels, metrics computed on the
//! labeled subset can be biased. This crate provides inverse probability
//! weighted (IPW) versions of the usual discrimination and calibration
//! metrics, a synthetic data-generating process with five label-selection
//! mechanisms, a Monte Carlo runner comparing actual, observed and weighted
//! estimates, and a simulator for the label selection a deployed alerting
//! model induces on itself.
//!
//! ```
//! use ipw_eval::metrics::{ipw_weights, weighted_roc, WeightedSample};
//!
//! let observed = vec![
//!     WeightedSample::new(0.9, Some(true), 0.5).unwrap(),
//!     WeightedSample::new(0.4, Some(false), 1.0).unwrap(),
//!     WeightedSample::new(0.7, None, 0.5).unwrap(),
//! ];
//! let weighted = ipw_weights(&observed).unwrap();
//! assert_eq!(weighted.len(), 2);
//! assert_eq!(weighted_roc(&weighted).unwrap().area, 1.0);
//! ```

pub mod deployment;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod report;
pub mod seed;
pub mod summary;
pub mod synthetic;
pub mod validate;

pub use error::{Error, Result};
