//! Classical hypothesis tests.
//!
//! Every test returns a [`TestResult`]. Degenerate data (zero variance, all
//! observations tied with the hypothesized value, an empty group) yields a
//! result with `valid == false` instead of an error, so long simulations keep
//! running and the caller decides how to count such replications. Parameter
//! errors that no dataset could fix (e.g. `p0 = 0`) are reported as `Err`.

mod association;
mod exact;
mod gof;
mod location;
mod multivariate;
mod randomization;
pub mod rank;

use serde::Serialize;

pub use association::{chisq_contingency, cor_test, ContingencyTable};
pub use exact::{binom_exact_test, prop_score_test, sign_test};
pub use gof::{bin_continuous, chisq_gof, ks_test_one_sample, model_probs, model_probs_for};
pub use location::{
    paired_t_test, t_test_one_sample, t_test_two_sample, var_ratio_f_test, variance_chisq_test, z_test_one_sample,
    z_test_two_sample, TTestKind,
};
pub use multivariate::{hotelling_one_sample, hotelling_paired, hotelling_two_sample};
pub use randomization::{randomization_test_paired, randomization_test_unpaired};
pub use rank::{wilcoxon_rank_sum, wilcoxon_signed_rank};

/// Degrees of freedom of a reference distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Df {
    One(f64),
    Two(f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub df: Option<Df>,
    pub p_value: f64,
    pub valid: bool,
    pub note: Option<String>,
}

impl TestResult {
    pub fn new(statistic: f64, df: Option<Df>, p_value: f64) -> Self {
        TestResult { statistic, df, p_value: p_value.clamp(0.0, 1.0), valid: true, note: None }
    }

    /// Result for data that violate the test's preconditions. The p-value is
    /// set to 1 so an invalid result never counts as a rejection.
    pub fn invalid(note: impl Into<String>) -> Self {
        TestResult { statistic: f64::NAN, df: None, p_value: 1.0, valid: false, note: Some(note.into()) }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Strict `p < alpha` on a valid result.
    pub fn rejects(&self, alpha: f64) -> bool {
        self.valid && self.p_value < alpha
    }
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance with denominator n − 1 (two-pass).
pub(crate) fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Two-sided p-value `min(1, 2·min(lower, upper))`.
pub(crate) fn two_sided(lower: f64, upper: f64) -> f64 {
    (2.0 * lower.min(upper)).min(1.0)
}
