//! Hotelling T² tests. The reported statistic is the exact F transform of
//! T², with its F degrees of freedom.

use nalgebra::{DMatrix, DVector};

use super::{Df, TestResult};
use crate::error::{Error, Result};
use crate::probkit::Distribution;

fn column_means(x: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(x.ncols(), x.column_iter().map(|c| c.mean()))
}

/// Sum of squares and cross-products about the column means.
fn scatter(x: &DMatrix<f64>) -> DMatrix<f64> {
    let m = column_means(x);
    let mut c = x.clone();
    for (j, mut col) in c.column_iter_mut().enumerate() {
        col.add_scalar_mut(-m[j]);
    }
    c.transpose() * c
}

/// `dᵀ S⁻¹ d` through a Cholesky factorization; `None` if `S` is singular.
fn quad_form(s: DMatrix<f64>, d: &DVector<f64>) -> Option<f64> {
    let scale = s.diagonal().max();
    let chol = s.cholesky()?;
    let l = chol.l();
    let min_pivot = l.diagonal().iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if !(min_pivot * min_pivot > 1e-12 * scale) {
        return None;
    }
    Some(d.dot(&chol.solve(d)))
}

fn f_result(t2: f64, factor: f64, df1: f64, df2: f64) -> TestResult {
    let f = factor * t2;
    match (Distribution::FisherF { df1, df2 }).sf(f) {
        Ok(p) => TestResult::new(f, Some(Df::Two(df1, df2)), p),
        Err(e) => TestResult::invalid(e.to_string()),
    }
}

/// One-sample Hotelling test of `E[X] = mu0` for the rows of `x`.
pub fn hotelling_one_sample(x: &DMatrix<f64>, mu0: &[f64]) -> Result<TestResult> {
    let (n, p) = x.shape();
    if mu0.len() != p {
        return Err(Error::param(format!("mu0 has length {} but data have {p} columns", mu0.len())));
    }
    if n <= p {
        return Ok(TestResult::invalid(format!("need more than {p} observations")));
    }
    let nf = n as f64;
    let d = column_means(x) - DVector::from_column_slice(mu0);
    let s = scatter(x) / (nf - 1.0);
    let Some(q) = quad_form(s, &d) else {
        return Ok(TestResult::invalid("singular sample covariance"));
    };
    let pf = p as f64;
    Ok(f_result(nf * q, (nf - pf) / (pf * (nf - 1.0)), pf, nf - pf))
}

/// Paired test: one-sample test of the row differences `x − y` against 0.
pub fn hotelling_paired(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<TestResult> {
    if x.shape() != y.shape() {
        return Err(Error::param("paired samples differ in shape"));
    }
    hotelling_one_sample(&(x - y), &vec![0.0; x.ncols()])
}

/// Two-sample Hotelling test with pooled covariance.
pub fn hotelling_two_sample(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<TestResult> {
    let p = x.ncols();
    if y.ncols() != p {
        return Err(Error::param("samples differ in dimension"));
    }
    let (n1, n2) = (x.nrows() as f64, y.nrows() as f64);
    let pf = p as f64;
    if x.nrows() == 0 || y.nrows() == 0 || n1 + n2 - pf - 1.0 < 1.0 {
        return Ok(TestResult::invalid("too few observations for the dimension"));
    }
    let d = column_means(x) - column_means(y);
    let s = (scatter(x) + scatter(y)) / (n1 + n2 - 2.0);
    let Some(q) = quad_form(s, &d) else {
        return Ok(TestResult::invalid("singular pooled covariance"));
    };
    let t2 = n1 * n2 / (n1 + n2) * q;
    let df2 = n1 + n2 - pf - 1.0;
    Ok(f_result(t2, df2 / (pf * (n1 + n2 - 2.0)), pf, df2))
}
