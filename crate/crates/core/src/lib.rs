//! Monte Carlo power analysis.
//!
//! The crate is organised bottom-up:
//!
//! - [`probkit`]: special functions, central and noncentral distributions,
//!   reproducible random substreams and samplers.
//! - [`testkit`]: classical hypothesis tests returning a [`testkit::TestResult`].
//! - [`linmod`]: design matrices, OLS, ANOVA with error strata, binomial GLM.
//! - [`scenarios`]: the catalog of data-generating models bound to their tests.
//! - [`engine`]: the replication loop (power, size, sample-size search, curves,
//!   interval widths).
//! - [`oracle`]: closed-form power used to cross-check the simulator.

// `!(x > 0.0)` is the deliberate NaN-rejecting form of every range guard
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod error;
pub mod linmod;
pub mod oracle;
pub mod probkit;
pub mod scenarios;
pub mod testkit;

pub use error::{Error, Result};
