//! Survival-analysis training and evaluation with equalized-odds fairness
//! at pre-defined evaluation time points.
//!
//! The crate provides:
//! - censored dataset ingestion, splitting, and synthesis ([`dataset`]),
//! - linear and MLP score functions with analytic gradients ([`model`]),
//! - Cox partial-likelihood and Weibull AFT objectives, Breslow baseline
//!   hazard, and survival prediction ([`survival`]),
//! - a differentiable conditional-mutual-information fairness regularizer
//!   ([`fairness`]),
//! - learnable censored-data augmentation ([`augment`]),
//! - joint training with Adam over model parameters, the AFT scale, and
//!   the augmentation durations ([`train`]),
//! - accuracy and fairness metrics at the evaluation time points
//!   ([`metrics`]),
//! - file-level commands backing the `fairsurv` binary ([`commands`]).

pub mod augment;
pub mod commands;
pub mod dataset;
pub mod error;
pub mod fairness;
pub mod metrics;
pub mod model;
pub mod survival;
pub mod train;

pub use error::{Error, Result};
