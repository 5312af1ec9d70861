//! Streaming detection of a single change between two known densities, in
//! either direction, when the starting state is unknown.
//!
//! At sample `n` the observed sequence may follow any of `2n` hypotheses:
//! "all samples from f0", "all from f1", or a switch from one density to the
//! other at some sample `2..=n`. [`detector::TwoSidedDetector`] tracks the
//! minimum-risk hypothesis among all of them with constant work per sample by
//! maintaining log-domain risk accumulators for the no-change hypotheses, the
//! newest change time, and the best previously seen change time on each side.
//!
//! The crate also ships:
//! - [`oracle`]: a brute-force evaluator of every hypothesis risk, used as the
//!   ground truth the streaming detector is tested against;
//! - [`analysis`]: distribution distance ratios, cost-parameter feasibility
//!   checks, and expected-risk curves for parameter design;
//! - [`cusum`]: a one-sided CUSUM baseline with Monte-Carlo threshold
//!   calibration;
//! - [`sim`]: a Monte-Carlo harness measuring false-alarm rate, incorrect
//!   detections, and detection delay, including false-alarm-cost calibration
//!   and an SNR sweep comparing against CUSUM.
//!
//! Monte-Carlo trials run in parallel via rayon when the default `parallel`
//! feature is enabled; disabling it falls back to a sequential loop with
//! identical results (every trial is seeded independently).

pub mod analysis;
pub mod cusum;
pub mod detector;
pub mod dist;
mod error;
pub mod hypothesis;
pub mod numerics;
pub mod oracle;
pub mod sim;
pub mod stats;

pub use detector::{StepReport, TwoSidedDetector};
pub use dist::{DistributionPair, Which};
pub use error::{Error, Result};
pub use hypothesis::{CostParams, Decision, HypothesisLabel, Side};
