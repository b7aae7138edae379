//! Noncentral t, chi-squared and F distribution functions.
//!
//! All three are Poisson-type mixtures of central distributions. Summation
//! starts at the mode of the mixing weights and walks outward in both
//! directions; it stops once the unvisited weight mass is below `TAIL_MASS`,
//! which bounds the truncation error because every mixed term lies in [0, 1].

use super::special::{inc_beta, inc_gamma, ln_gamma, norm_cdf, MAX_ITER};
use crate::error::{Error, Result};

const TAIL_MASS: f64 = 1e-15;

/// Poisson(λ) mixture weight at `j` in log space.
fn ln_pois(j: f64, lambda: f64) -> f64 {
    -lambda + j * lambda.ln() - ln_gamma(j + 1.0)
}

/// Sums `Σ_j w_j · term(j)` with `w_j = Pois(j; lambda)`.
/// Returns the sum; `term` yields a pair (lower, upper) so both tails are
/// accumulated without cancellation.
fn poisson_mixture<F>(lambda: f64, mut term: F) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    if lambda == 0.0 {
        return term(0.0);
    }
    let mode = lambda.floor();
    let w_mode = ln_pois(mode, lambda).exp();
    let (mut lo_sum, mut up_sum) = (0.0, 0.0);
    let mut mass = 0.0;

    let (l, u) = term(mode)?;
    lo_sum += w_mode * l;
    up_sum += w_mode * u;
    mass += w_mode;

    // downward
    let mut w = w_mode;
    let mut j = mode;
    while j > 0.0 {
        w *= j / lambda;
        j -= 1.0;
        if w < 1e-300 {
            break;
        }
        let (l, u) = term(j)?;
        lo_sum += w * l;
        up_sum += w * u;
        mass += w;
        if w < TAIL_MASS * 1e-3 && w * j < TAIL_MASS {
            break;
        }
    }

    // upward until the remaining Poisson mass is negligible
    let mut w = w_mode;
    let mut j = mode;
    let mut steps = 0usize;
    while 1.0 - mass > TAIL_MASS {
        j += 1.0;
        w *= lambda / j;
        let (l, u) = term(j)?;
        lo_sum += w * l;
        up_sum += w * u;
        mass += w;
        steps += 1;
        // past the mode the tail mass is at most w·(j+1)/(j+1-λ)
        if j > lambda + 1.0 && w * (j + 1.0) / (j + 1.0 - lambda) < TAIL_MASS {
            break;
        }
        if steps > MAX_ITER {
            return Err(Error::Numeric(format!("Poisson mixture did not converge (lambda={lambda})")));
        }
    }
    Ok((lo_sum.clamp(0.0, 1.0), up_sum.clamp(0.0, 1.0)))
}

/// `(P(X ≤ x), P(X > x))` for the noncentral chi-squared distribution.
pub fn nc_chisq_tails(df: f64, ncp: f64, x: f64) -> Result<(f64, f64)> {
    if !(df > 0.0) || !(ncp >= 0.0) {
        return Err(Error::param(format!("noncentral chi-squared needs df > 0, ncp >= 0 (df={df}, ncp={ncp})")));
    }
    if x <= 0.0 {
        return Ok((0.0, 1.0));
    }
    if x.is_infinite() {
        return Ok((1.0, 0.0));
    }
    poisson_mixture(ncp / 2.0, |j| inc_gamma(df / 2.0 + j, x / 2.0))
}

/// `(P(X ≤ x), P(X > x))` for the noncentral F distribution.
pub fn nc_f_tails(df1: f64, df2: f64, ncp: f64, x: f64) -> Result<(f64, f64)> {
    if !(df1 > 0.0) || !(df2 > 0.0) || !(ncp >= 0.0) {
        return Err(Error::param(format!(
            "noncentral F needs df1, df2 > 0, ncp >= 0 (df1={df1}, df2={df2}, ncp={ncp})"
        )));
    }
    if x <= 0.0 {
        return Ok((0.0, 1.0));
    }
    if x.is_infinite() {
        return Ok((1.0, 0.0));
    }
    let y = df1 * x / (df1 * x + df2);
    poisson_mixture(ncp / 2.0, |j| inc_beta(df1 / 2.0 + j, df2 / 2.0, y))
}

/// `P(T ≤ t)` for the noncentral t distribution with `df` degrees of freedom
/// and noncentrality `delta` (any sign).
pub fn nc_t_cdf(df: f64, delta: f64, t: f64) -> Result<f64> {
    if !(df > 0.0) || !delta.is_finite() {
        return Err(Error::param(format!("noncentral t needs df > 0 and finite ncp (df={df}, ncp={delta})")));
    }
    if t.is_infinite() {
        return Ok(if t > 0.0 { 1.0 } else { 0.0 });
    }
    if t < 0.0 {
        return Ok((1.0 - nc_t_upper_half(df, -delta, -t)?).clamp(0.0, 1.0));
    }
    nc_t_upper_half(df, delta, t).map(|v| v.clamp(0.0, 1.0))
}

/// `P(T ≤ t)` for t ≥ 0:
/// Φ(-δ) + ½ Σ_j [p_j I_y(j+½, ν/2) + q_j I_y(j+1, ν/2)],  y = t²/(ν+t²),
/// p_j = Pois(j; δ²/2), q_j = δ e^{-δ²/2} (δ²/2)^j / (√2 Γ(j+3/2)).
fn nc_t_upper_half(df: f64, delta: f64, t: f64) -> Result<f64> {
    let base = norm_cdf(-delta);
    if t == 0.0 {
        return Ok(base);
    }
    let y = t * t / (df + t * t);
    let lambda = delta * delta / 2.0;
    if lambda == 0.0 {
        let (lo, _) = inc_beta(0.5, df / 2.0, y)?;
        return Ok(base + 0.5 * lo);
    }
    let ln_lambda = lambda.ln();
    let sign = delta.signum();
    let ln_abs_delta = delta.abs().ln();
    let p_weight = |j: f64| (-lambda + j * ln_lambda - ln_gamma(j + 1.0)).exp();
    let q_weight = |j: f64| {
        sign * (ln_abs_delta - lambda + j * ln_lambda - std::f64::consts::LN_2 / 2.0 - ln_gamma(j + 1.5)).exp()
    };
    let term = |j: f64| -> Result<f64> {
        let (ip, _) = inc_beta(j + 0.5, df / 2.0, y)?;
        let (iq, _) = inc_beta(j + 1.0, df / 2.0, y)?;
        Ok(p_weight(j) * ip + q_weight(j) * iq)
    };

    let mode = lambda.floor();
    let mut sum = term(mode)?;
    let mut mass = p_weight(mode);

    let mut j = mode;
    while j > 0.0 {
        j -= 1.0;
        let pw = p_weight(j);
        sum += term(j)?;
        mass += pw;
        if pw < 1e-300 || (pw * (j + 1.0) < TAIL_MASS && q_weight(j).abs() * (j + 1.0) < TAIL_MASS) {
            break;
        }
    }
    let mut j = mode;
    let mut steps = 0usize;
    loop {
        j += 1.0;
        let pw = p_weight(j);
        sum += term(j)?;
        mass += pw;
        steps += 1;
        // |q_j| / p_j = |δ| Γ(j+1) / (√2 Γ(j+3/2)) decreases in j, so the q tail
        // is bounded by that ratio times the p tail.
        let p_tail = if j > lambda + 1.0 { pw * (j + 1.0) / (j + 1.0 - lambda) } else { 1.0 - mass };
        let ratio = q_weight(j).abs() / pw.max(1e-300);
        if j > lambda + 1.0 && p_tail * (1.0 + ratio) < TAIL_MASS {
            break;
        }
        if steps > MAX_ITER {
            return Err(Error::Numeric(format!("noncentral t series did not converge (df={df}, ncp={delta})")));
        }
    }
    Ok(base + 0.5 * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_ncp_matches_central_chisq() {
        for &x in &[0.5, 2.0, 7.0, 15.0] {
            let (nc, _) = nc_chisq_tails(4.0, 0.0, x).unwrap();
            let (c, _) = inc_gamma(2.0, x / 2.0).unwrap();
            assert!((nc - c).abs() < 1e-14);
        }
    }

    #[test]
    fn tails_sum_to_one() {
        let (l, u) = nc_chisq_tails(5.0, 15.0, 11.0705).unwrap();
        assert!((l + u - 1.0).abs() < 1e-12);
        let (l, u) = nc_f_tails(3.0, 40.0, 9.0, 2.8).unwrap();
        assert!((l + u - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nc_t_symmetry() {
        // P(T ≤ t; δ) = 1 − P(T ≤ −t; −δ)
        for &(t, d) in &[(1.3, 0.7), (-0.4, 2.0), (2.5, -1.5)] {
            let a = nc_t_cdf(12.0, d, t).unwrap();
            let b = nc_t_cdf(12.0, -d, -t).unwrap();
            assert!((a + b - 1.0).abs() < 1e-12, "t={t} d={d}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(nc_chisq_tails(-1.0, 1.0, 1.0).is_err());
        assert!(nc_f_tails(1.0, 1.0, -2.0, 1.0).is_err());
        assert!(nc_t_cdf(0.0, 1.0, 1.0).is_err());
    }
}
