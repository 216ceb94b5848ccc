//! Two-stage change-point estimation for the covariance structure of
//! high-dimensional data.
//!
//! Given `n` observations of a `p`-dimensional vector, the pipeline first
//! screens the `p(p+1)/2` covariance components with a debiased
//! split-contrast statistic, keeping the components whose score clears a
//! bootstrap-calibrated threshold, and then locates the break as the
//! smallest split maximizing a CUSUM-type score over the survivors. An
//! empty selection is a legal outcome and means no change was found.
//!
//! ```
//! use covcp_core::{detect_change, substream, DetectConfig, DetectionStatus, Scenario};
//!
//! let scenario = Scenario::standard_case(4, 60, 4, 30)?;
//! let data = scenario.sample_dataset(&mut substream(7, &[0]))?;
//! let result = detect_change(&data, &DetectConfig::default())?;
//! assert_eq!(result.status, DetectionStatus::ChangeEstimated);
//! let k = result.k_hat.unwrap();
//! assert!((20..=40).contains(&k));
//! # Ok::<(), covcp_core::Error>(())
//! ```
//!
//! The crate is `no_std` compatible (with `alloc`); the `std` feature is on
//! by default and the optional `parallel` feature spreads the screening and
//! bootstrap work across threads without changing any result.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod bootstrap;
mod data;
mod detect;
mod error;
mod math;
pub mod oracle;
mod reduction;
mod rng;
mod simgen;

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 42;

pub use bootstrap::{
    bootstrap_threshold, pair_differences, row_scales, theoretical_threshold, variance_profile,
    Aggregation, PairDifferenceMatrix, ThresholdConfig, ThresholdEstimate, VarianceProfile,
};
pub use data::{
    center, vech_index, vech_len, vech_unindex, CenteredData, ComponentIndex, ComponentSeries,
    DataMatrix,
};
pub use detect::{
    change_score, detect_change, AppliedThreshold, DetectConfig, DetectionResult, DetectionStatus,
    ScoreCurve, TauRule,
};
pub use error::{Error, Result};
pub use reduction::{
    screening, select, split_contrast, weighted_contrast, ScreeningVector, SelectionSet,
};
pub use rng::{derive_seed, substream};
pub use simgen::{
    case_covariance, random_block_covariance, run_replications, sample_matrix, CovBlock, CovSpec,
    ReplicationReport, Scenario,
};
