use nalgebra::{DMatrix, DVector};

use super::design::DesignMatrix;
use crate::error::{Error, Result};
use crate::probkit::Distribution;
use crate::testkit::{Df, TestResult};

/// Least-squares fit by Householder QR.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub rss: f64,
    pub df_resid: usize,
    pub sigma: f64,
    /// `(XᵀX)⁻¹`; multiply by σ̂² for the coefficient covariance.
    pub cov_unscaled: DMatrix<f64>,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `Qᵀy`: the squared entries are sequential sums of squares, column by
    /// column in design order.
    pub effects: Vec<f64>,
    response_fingerprint: (u64, u64),
}

fn fingerprint(y: &[f64]) -> (u64, u64) {
    let s: f64 = y.iter().sum();
    let ss: f64 = y.iter().map(|v| v * v).sum();
    (s.to_bits(), ss.to_bits())
}

pub fn ols_fit(x: &DesignMatrix, y: &[f64]) -> Result<OlsFit> {
    let (n, p) = (x.n_rows(), x.n_cols());
    if y.len() != n {
        return Err(Error::param(format!("response has {} values, design has {n} rows", y.len())));
    }
    if n <= p {
        return Err(Error::design(format!("{n} observations cannot support {p} coefficients with residual df")));
    }
    let qr = x.matrix().clone().qr();
    let mut qty = DVector::from_column_slice(y);
    qr.q_tr_mul(&mut qty);
    let r = qr.r();
    let beta = r
        .solve_upper_triangular(&qty.rows(0, p).into_owned())
        .ok_or_else(|| Error::Numeric("singular triangular factor in least squares".into()))?;
    let fitted_v = x.matrix() * &beta;
    let residuals: Vec<f64> = y.iter().zip(fitted_v.iter()).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let df_resid = n - p;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(|| Error::Numeric("singular triangular factor in least squares".into()))?;
    Ok(OlsFit {
        names: x.columns().to_vec(),
        coefficients: beta.iter().copied().collect(),
        rss,
        df_resid,
        sigma: (rss / df_resid as f64).sqrt(),
        cov_unscaled: &r_inv * r_inv.transpose(),
        fitted: fitted_v.iter().copied().collect(),
        residuals,
        effects: qty.iter().copied().collect(),
        response_fingerprint: fingerprint(y),
    })
}

impl OlsFit {
    pub fn coef(&self, name: &str) -> Option<f64> {
        self.index(name).map(|j| self.coefficients[j])
    }

    /// Standard error of a coefficient.
    pub fn std_error(&self, name: &str) -> Option<f64> {
        self.index(name).map(|j| self.sigma * self.cov_unscaled[(j, j)].sqrt())
    }

    /// Residual variation indistinguishable from rounding: the response is
    /// an exact linear function of the columns.
    pub fn exact(&self) -> bool {
        let scale: f64 = self.fitted.iter().map(|v| v * v).sum::<f64>() + self.rss;
        !(self.rss > 1e-24 * scale)
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|c| c == name)
    }
}

/// Wald t test of one coefficient being zero.
pub fn wald_coef_test(fit: &OlsFit, coef_name: &str) -> Result<TestResult> {
    let j = fit
        .index(coef_name)
        .ok_or_else(|| Error::param(format!("no coefficient named '{coef_name}'")))?;
    if fit.exact() {
        return Ok(TestResult::invalid("zero residual variance"));
    }
    let se = fit.sigma * fit.cov_unscaled[(j, j)].sqrt();
    let t = fit.coefficients[j] / se;
    let df = fit.df_resid as f64;
    let (lo, up) = Distribution::StudentT { df }.tails(t)?;
    Ok(TestResult::new(t, Some(Df::One(df)), (2.0 * lo.min(up)).min(1.0)))
}

/// Incremental F test of a null model nested in a full model fitted to the
/// same response.
pub fn nested_f_test(null: &OlsFit, full: &OlsFit) -> Result<TestResult> {
    if null.response_fingerprint != full.response_fingerprint || null.fitted.len() != full.fitted.len() {
        return Err(Error::design("nested models were fitted to different responses"));
    }
    if let Some(c) = null.names.iter().find(|c| !full.names.contains(c)) {
        return Err(Error::design(format!("null-model column '{c}' is not in the full model")));
    }
    if null.df_resid <= full.df_resid {
        return Err(Error::design("models are not strictly nested (no extra parameters)"));
    }
    if full.exact() {
        return Ok(TestResult::invalid("full model fits exactly"));
    }
    let ddf = (null.df_resid - full.df_resid) as f64;
    let df2 = full.df_resid as f64;
    let f = ((null.rss - full.rss).max(0.0) / ddf) / (full.rss / df2);
    let p = Distribution::FisherF { df1: ddf, df2 }.sf(f)?;
    Ok(TestResult::new(f, Some(Df::Two(ddf, df2)), p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmod::{build_design, Variable};

    fn simple(x: &[f64]) -> DesignMatrix {
        build_design(&[Variable::covariate("x", x.to_vec())], &[&["x"]]).unwrap()
    }

    fn null_design(n: usize) -> DesignMatrix {
        build_design(&[Variable::covariate("x", vec![0.0; n])], &[]).unwrap()
    }

    #[test]
    fn exact_line() {
        let fit = ols_fit(&simple(&[0.0, 1.0, 2.0, 3.0]), &[1.0, 3.0, 5.0, 7.0]).unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 2.0).abs() < 1e-12);
        assert!(fit.rss < 1e-20);
        assert!(!wald_coef_test(&fit, "x").unwrap().valid);
    }

    #[test]
    fn three_point_example() {
        let d = simple(&[0.0, 1.0, 2.0]);
        let fit = ols_fit(&d, &[0.0, 0.0, 3.0]).unwrap();
        assert!((fit.coefficients[0] + 0.5).abs() < 1e-12);
        assert!((fit.coefficients[1] - 1.5).abs() < 1e-12);
        assert!((fit.rss - 1.5).abs() < 1e-12);
        assert_eq!(fit.df_resid, 1);
        let w = wald_coef_test(&fit, "x").unwrap();
        assert!((w.statistic - 1.5 / 0.75f64.sqrt()).abs() < 1e-12);
        // t(1) two-sided at √3: 1 − 2·atan(√3)/π = 1/3
        assert!((w.p_value - 1.0 / 3.0).abs() < 1e-12);
        let f = nested_f_test(&ols_fit(&null_design(3), &[0.0, 0.0, 3.0]).unwrap(), &fit).unwrap();
        assert!((f.statistic - w.statistic * w.statistic).abs() < 1e-10);
        assert!((f.p_value - w.p_value).abs() < 1e-12);
    }

    #[test]
    fn centering_changes_only_intercept() {
        let y = [2.0, 1.0, 4.0, 3.0, 6.0];
        let a = ols_fit(&simple(&[0.0, 1.0, 2.0, 3.0, 4.0]), &y).unwrap();
        let b = ols_fit(&simple(&[-2.0, -1.0, 0.0, 1.0, 2.0]), &y).unwrap();
        assert!((a.coefficients[1] - b.coefficients[1]).abs() < 1e-12);
        assert!((a.coefficients[0] + 2.0 * a.coefficients[1] - b.coefficients[0]).abs() < 1e-12);
    }

    #[test]
    fn nested_requires_extra_parameters() {
        let d = simple(&[0.0, 1.0, 2.0, 4.0]);
        let y = [1.0, 0.0, 2.0, 5.0];
        let fit = ols_fit(&d, &y).unwrap();
        assert!(nested_f_test(&fit, &fit).is_err());
        let other = ols_fit(&null_design(4), &[1.0, 1.0, 2.0, 5.0]).unwrap();
        assert!(nested_f_test(&other, &fit).is_err());
    }

    #[test]
    fn too_few_rows() {
        assert!(ols_fit(&simple(&[0.0, 1.0]), &[1.0, 2.0]).is_err());
    }
}
