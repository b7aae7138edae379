//! Closed-form power for the scenarios that have one; used to cross-check
//! the simulator.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenarios::Scenario;
use crate::probkit::{nc_chisq_tails, nc_f_tails, nc_t_cdf, norm_cdf, norm_quantile, Distribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMethod {
    Normal,
    NoncentralT,
    NoncentralChisq,
    NoncentralF,
    FisherZ,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticPower {
    pub power: f64,
    pub method: OracleMethod,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("alpha = {alpha} must lie in (0, 1)")))
    }
}

fn positive(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("{what} = {v} must be positive")))
    }
}

/// Two-sided normal test with standardized shift `d`.
fn normal_power(d: f64, alpha: f64) -> f64 {
    let z = norm_quantile(1.0 - alpha / 2.0);
    norm_cdf(-z + d) + norm_cdf(-z - d)
}

pub fn power_z_one_sample(n: usize, delta: f64, sigma: f64, alpha: f64) -> Result<AnalyticPower> {
    check_alpha(alpha)?;
    positive(sigma, "sigma")?;
    positive(n as f64, "n")?;
    Ok(AnalyticPower { power: normal_power(delta.abs() * (n as f64).sqrt() / sigma, alpha), method: OracleMethod::Normal })
}

pub fn power_z_two_sample(n: usize, m: usize, delta: f64, sigma_x: f64, sigma_y: f64, alpha: f64) -> Result<AnalyticPower> {
    check_alpha(alpha)?;
    positive(sigma_x, "sigma_x")?;
    positive(sigma_y, "sigma_y")?;
    positive((n.min(m)) as f64, "group size")?;
    let se = (sigma_x * sigma_x / n as f64 + sigma_y * sigma_y / m as f64).sqrt();
    Ok(AnalyticPower { power: normal_power(delta.abs() / se, alpha), method: OracleMethod::Normal })
}

/// `P(|T| > t_{1−α/2}(df))` for `T` noncentral t.
fn t_power(df: f64, ncp: f64, alpha: f64) -> Result<f64> {
    let crit = Distribution::student_t(df)?.quantile(1.0 - alpha / 2.0)?;
    if ncp == 0.0 {
        return Ok(alpha);
    }
    Ok(1.0 - nc_t_cdf(df, ncp, crit)? + nc_t_cdf(df, ncp, -crit)?)
}

pub fn power_t_one_sample(n: usize, delta: f64, sigma: f64, alpha: f64) -> Result<AnalyticPower> {
    check_alpha(alpha)?;
    positive(sigma, "sigma")?;
    if n < 2 {
        return Err(Error::param("one-sample t needs n >= 2"));
    }
    let ncp = delta * (n as f64).sqrt() / sigma;
    Ok(AnalyticPower { power: t_power(n as f64 - 1.0, ncp, alpha)?, method: OracleMethod::NoncentralT })
}

pub fn power_t_two_sample_pooled(n: usize, m: usize, delta: f64, sigma: f64, alpha: f64) -> Result<AnalyticPower> {
    check_alpha(alpha)?;
    positive(sigma, "sigma")?;
    if n + m < 3 || n == 0 || m == 0 {
        return Err(Error::param("pooled t needs both groups nonempty and n + m >= 3"));
    }
    let ncp = delta / (sigma * (1.0 / n as f64 + 1.0 / m as f64).sqrt());
    Ok(AnalyticPower { power: t_power((n + m - 2) as f64, ncp, alpha)?, method: OracleMethod::NoncentralT })
}

fn check_probs(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|&v| !(0.0..=1.0).contains(&v)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::param(format!("{what} must be probabilities summing to 1")));
    }
    Ok(())
}

/// Pearson goodness of fit with `k − 1` degrees of freedom; noncentrality
/// `n·Σ(p1 − p0)²/p0`.
pub fn power_chisq_gof(n: usize, p0: &[f64], p1: &[f64], alpha: f64) -> Result<AnalyticPower> {
    check_alpha(alpha)?;
    check_probs(p0, "p0")?;
    check_probs(p1, "p1")?;
    if p0.len() != p1.len() || p0.len() < 2 {
        return Err(Error::param("p0 and p1 need the same length, at least 2"));
    }
    if p0.iter().any(|&v| v <= 0.0) {
        return Err(Error::param("p0 must be strictly positive"));
    }
    let ncp = n as f64 * p0.iter().zip(p1).map(|(a, b)| (b - a).powi(2) / a).sum::<f64>();
    let df = (p0.len() - 1) as f64;
    let crit = Distribution::chi_squared(df)?.quantile(1.0 - alpha)?;
    let power = if ncp == 0.0 { alpha } else { nc_chisq_tails(df, ncp, crit)?.1 };
    Ok(AnalyticPower { power, method: OracleMethod::NoncentralChisq })
}

/// Omnibus F of a one-way layout; noncentrality `Σ nᵢ(μᵢ − μ̄)²/σ²` with
/// the size-weighted grand mean.
pub fn power_anova_fixed(cell_means: &[f64], sigma: f64, cell_n: &[usize], alpha: f64) -> Result<AnalyticPower> {
    check_alpha(alpha)?;
    positive(sigma, "sigma")?;
    let k = cell_means.len();
    if k < 2 || cell_n.len() != k || cell_n.contains(&0) {
        return Err(Error::param("need at least two cells with matching positive sizes"));
    }
    let total: usize = cell_n.iter().sum();
    if total <= k {
        return Err(Error::param("no residual degrees of freedom"));
    }
    let grand = cell_means.iter().zip(cell_n).map(|(m, &c)| m * c as f64).sum::<f64>() / total as f64;
    let ncp = cell_means.iter().zip(cell_n).map(|(m, &c)| c as f64 * (m - grand).powi(2)).sum::<f64>() / (sigma * sigma);
    let (df1, df2) = ((k - 1) as f64, (total - k) as f64);
    let crit = Distribution::fisher_f(df1, df2)?.quantile(1.0 - alpha)?;
    let power = if ncp == 0.0 { alpha } else { nc_f_tails(df1, df2, ncp, crit)?.1 };
    Ok(AnalyticPower { power, method: OracleMethod::NoncentralF })
}

/// Fisher z approximation: normal shift `(atanh ρ − atanh ρ₀)·√(n − 3)`.
pub fn power_correlation(n: usize, rho: f64, rho0: f64, alpha: f64) -> Result<AnalyticPower> {
    check_alpha(alpha)?;
    if rho.abs() >= 1.0 || rho0.abs() >= 1.0 {
        return Err(Error::param("correlations must lie strictly inside (-1, 1)"));
    }
    if n < 4 {
        return Err(Error::param("Fisher z needs n >= 4"));
    }
    let d = (rho.atanh() - rho0.atanh()) * (n as f64 - 3.0).sqrt();
    Ok(AnalyticPower { power: normal_power(d.abs(), alpha), method: OracleMethod::FisherZ })
}

/// Scenarios with a closed-form power.
pub const SCENARIOS: [&str; 8] = [
    "z-one-sample",
    "t-one-sample",
    "z-two-sample",
    "t-pooled",
    "gof-multinomial",
    "anova-oneway-fixed",
    "cor-rho0-zero",
    "cor-rho0-nonzero",
];

/// Analytic power of a catalog scenario at sample size `n`, using its
/// current parameters; `None` when no closed form applies.
pub fn for_scenario(s: &Scenario, n: usize, alpha: f64) -> Result<Option<AnalyticPower>> {
    s.check_n(n)?;
    let g = |k: &str| s.param(k).ok_or_else(|| Error::param(format!("scenario '{}' lacks '{k}'", s.id())));
    Ok(Some(match s.id() {
        "z-one-sample" => power_z_one_sample(n, g("effect")?, g("sigma")?, alpha)?,
        "t-one-sample" => power_t_one_sample(n, g("effect")?, g("sigma")?, alpha)?,
        "z-two-sample" => {
            power_z_two_sample(n, s.group_size("m", n)?, g("effect")?, g("sigma_x")?, g("sigma_y")?, alpha)?
        }
        "t-pooled" => power_t_two_sample_pooled(n, s.group_size("m", n)?, g("effect")?, g("sigma")?, alpha)?,
        "gof-multinomial" => {
            let last = g("p_last")?;
            let mut p1 = vec![(1.0 - last) / 5.0; 5];
            p1.push(last);
            power_chisq_gof(n, &[1.0 / 6.0; 6], &p1, alpha)?
        }
        "anova-oneway-fixed" => {
            let mu = g("mu")?;
            let sizes = [n, s.group_size("n2", n)?, s.group_size("n3", n)?];
            power_anova_fixed(&[mu, mu + g("a2")?, mu + g("a3")?], g("sigma")?, &sizes, alpha)?
        }
        "cor-rho0-zero" | "cor-rho0-nonzero" => power_correlation(n, g("rho")?, g("rho0")?, alpha)?,
        _ => return Ok(None),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: f64 = 0.05;

    #[test]
    fn zero_effect_gives_alpha() {
        assert!((power_z_one_sample(30, 0.0, 7.5, A).unwrap().power - A).abs() < 1e-9);
        assert!((power_z_two_sample(85, 70, 0.0, 7.0, 10.0, A).unwrap().power - A).abs() < 1e-9);
        assert!((power_t_one_sample(30, 0.0, 7.5, A).unwrap().power - A).abs() < 1e-9);
        assert!((power_t_two_sample_pooled(115, 90, 0.0, 10.0, A).unwrap().power - A).abs() < 1e-9);
        let p = [1.0 / 6.0; 6];
        assert!((power_chisq_gof(300, &p, &p, A).unwrap().power - A).abs() < 1e-9);
        assert!((power_anova_fixed(&[3.0; 3], 5.0, &[22, 24, 18], A).unwrap().power - A).abs() < 1e-9);
        assert!((power_correlation(60, 0.6, 0.6, A).unwrap().power - A).abs() < 1e-9);
    }

    #[test]
    fn z_one_sample_value() {
        // d = 4·√30/7.5 = 2.92119; Φ(d − 1.95996) + Φ(−d − 1.95996)
        let p = power_z_one_sample(30, 4.0, 7.5, A).unwrap();
        assert!((p.power - 0.83182).abs() < 5e-4, "{}", p.power);
        assert_eq!(p.method, OracleMethod::Normal);
    }

    #[test]
    fn z_two_sample_value() {
        let p = power_z_two_sample(85, 70, 4.0, 7.0, 10.0, A).unwrap();
        assert!((p.power - 0.806).abs() < 2e-3, "{}", p.power);
    }

    #[test]
    fn t_power_is_below_z_power() {
        let t = power_t_one_sample(30, 4.0, 7.5, A).unwrap().power;
        let z = power_z_one_sample(30, 4.0, 7.5, A).unwrap().power;
        assert!(t < z && (t - 0.80).abs() < 0.02, "{t}");
    }

    #[test]
    fn gof_die_ncp() {
        // 0.05 per observation: 5·(0.15−1/6)²·6 + (0.25−1/6)²·6
        let p0 = [1.0 / 6.0; 6];
        let p1 = [0.15, 0.15, 0.15, 0.15, 0.15, 0.25];
        let per: f64 = p0.iter().zip(&p1).map(|(a, b)| (b - a) * (b - a) / a).sum();
        assert!((per - 0.05).abs() < 1e-12);
        let a = power_chisq_gof(300, &p0, &p1, A).unwrap().power;
        let b = power_chisq_gof(600, &p0, &p1, A).unwrap().power;
        assert!(a > 0.75 && a < 0.9 && b > a);
    }

    #[test]
    fn monotone_in_effect_and_n() {
        let mut last = 0.0;
        for d in [0.0, 1.0, 2.0, 3.0, 4.0, 6.0] {
            let p = power_t_two_sample_pooled(40, 30, d, 10.0, A).unwrap().power;
            assert!(p > last - 1e-12);
            last = p;
        }
        let mut last = 0.0;
        for n in [10, 20, 40, 80] {
            let p = power_correlation(n, 0.3, 0.0, A).unwrap().power;
            assert!(p > last);
            last = p;
        }
        let mut last = 0.0;
        for n in [5, 10, 20, 40] {
            let p = power_anova_fixed(&[10.0, 12.0, 7.0], 5.0, &[n, n, n], A).unwrap().power;
            assert!(p > last);
            last = p;
        }
    }

    #[test]
    fn scenario_mapping() {
        for id in SCENARIOS {
            let s = crate::scenarios::find(id).unwrap();
            let p = for_scenario(&s, s.default_n(), A).unwrap().unwrap();
            assert!(p.power > 0.7 && p.power < 0.9, "{id}: {}", p.power);
            let z = for_scenario(&s.null_variant(), s.default_n(), A).unwrap().unwrap();
            assert!((z.power - A).abs() < 1e-9, "{id}");
        }
        let r = crate::scenarios::find("rank-sum").unwrap();
        assert!(for_scenario(&r, 60, A).unwrap().is_none());
    }

    #[test]
    fn invalid_inputs() {
        assert!(power_z_one_sample(30, 1.0, 0.0, A).is_err());
        assert!(power_t_one_sample(1, 1.0, 1.0, A).is_err());
        assert!(power_correlation(30, 1.0, 0.0, A).is_err());
        assert!(power_chisq_gof(30, &[0.5, 0.5], &[0.2, 0.2], A).is_err());
        assert!(power_anova_fixed(&[1.0], 1.0, &[3], A).is_err());
        assert!(power_z_one_sample(30, 1.0, 1.0, 1.5).is_err());
    }
}
