//! Probability kernel: special functions, distributions, random substreams
//! and samplers.

mod dist;
mod noncentral;
mod rng;
mod sample;
pub mod special;

pub use dist::Distribution;
pub use noncentral::{nc_chisq_tails, nc_f_tails, nc_t_cdf};
pub use rng::RandomSource;
pub use sample::{sample, sample_multinomial, sample_mvnormal, sample_n, std_normal, CovarianceMatrix};
pub use special::{norm_cdf, norm_quantile, reg_inc_beta, reg_inc_gamma};

use crate::error::Result;

/// `P(X ≤ x)`.
pub fn cdf(d: &Distribution, x: f64) -> Result<f64> {
    d.cdf(x)
}

/// `inf{x : cdf(x) ≥ p}`.
pub fn quantile(d: &Distribution, p: f64) -> Result<f64> {
    d.quantile(p)
}

/// CDF of a noncentral kind; central kinds are evaluated as usual.
pub fn noncentral_cdf(d: &Distribution, x: f64) -> Result<f64> {
    d.cdf(x)
}
