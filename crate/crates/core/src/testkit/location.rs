use super::{mean, two_sided, variance, Df, TestResult};
use crate::error::{Error, Result};
use crate::probkit::{norm_cdf, Distribution};

fn t_p(t: f64, df: f64) -> f64 {
    match (Distribution::StudentT { df }).tails(t) {
        Ok((lo, up)) => two_sided(lo, up),
        Err(_) => 1.0,
    }
}

fn z_p(z: f64) -> f64 {
    (2.0 * norm_cdf(-z.abs())).min(1.0)
}

pub fn z_test_one_sample(x: &[f64], mu0: f64, sigma: f64) -> Result<TestResult> {
    if !(sigma > 0.0) {
        return Err(Error::param(format!("sigma must be positive, got {sigma}")));
    }
    if x.is_empty() {
        return Ok(TestResult::invalid("empty sample"));
    }
    let z = (mean(x) - mu0) * (x.len() as f64).sqrt() / sigma;
    Ok(TestResult::new(z, None, z_p(z)))
}

pub fn t_test_one_sample(x: &[f64], mu0: f64) -> TestResult {
    let n = x.len();
    if n < 2 {
        return TestResult::invalid("need at least two observations");
    }
    // centre on mu0 first so that shifting x and mu0 together is exact
    let d: Vec<f64> = x.iter().map(|v| v - mu0).collect();
    let s2 = variance(&d);
    if !(s2 > 0.0) {
        return TestResult::invalid("zero sample variance");
    }
    let df = (n - 1) as f64;
    let t = mean(&d) / (s2 / n as f64).sqrt();
    TestResult::new(t, Some(Df::One(df)), t_p(t, df))
}

/// One-sample t test on the differences `x − y`.
pub fn paired_t_test(x: &[f64], y: &[f64]) -> TestResult {
    if x.len() != y.len() {
        return TestResult::invalid("paired samples differ in length");
    }
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    t_test_one_sample(&d, 0.0)
}

/// `(n−1)s²/σ0²` against χ²(n−1), two-sided by doubling the smaller tail.
pub fn variance_chisq_test(x: &[f64], sigma0_sq: f64) -> Result<TestResult> {
    if !(sigma0_sq > 0.0) {
        return Err(Error::param(format!("sigma0_sq must be positive, got {sigma0_sq}")));
    }
    let n = x.len();
    if n < 2 {
        return Ok(TestResult::invalid("need at least two observations"));
    }
    let df = (n - 1) as f64;
    let stat = df * variance(x) / sigma0_sq;
    let (lo, up) = Distribution::ChiSquared { df }.tails(stat)?;
    Ok(TestResult::new(stat, Some(Df::One(df)), two_sided(lo, up)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TTestKind {
    Pooled,
    Welch,
}

pub fn t_test_two_sample(x: &[f64], y: &[f64], kind: TTestKind) -> TestResult {
    let (n, m) = (x.len() as f64, y.len() as f64);
    if x.len() < 2 || y.len() < 2 {
        return TestResult::invalid("each group needs at least two observations");
    }
    let (vx, vy) = (variance(x), variance(y));
    if vx == 0.0 && vy == 0.0 {
        return TestResult::invalid("both groups have zero variance");
    }
    let diff = mean(x) - mean(y);
    let (se, df) = match kind {
        TTestKind::Pooled => {
            let df = n + m - 2.0;
            let sp2 = ((n - 1.0) * vx + (m - 1.0) * vy) / df;
            ((sp2 * (1.0 / n + 1.0 / m)).sqrt(), df)
        }
        TTestKind::Welch => {
            let (a, b) = (vx / n, vy / m);
            let df = (a + b).powi(2) / (a * a / (n - 1.0) + b * b / (m - 1.0));
            ((a + b).sqrt(), df)
        }
    };
    let t = diff / se;
    TestResult::new(t, Some(Df::One(df)), t_p(t, df))
}

/// Two-sample z test with known standard deviations.
pub fn z_test_two_sample(x: &[f64], y: &[f64], sigma_x: f64, sigma_y: f64) -> Result<TestResult> {
    if !(sigma_x > 0.0 && sigma_y > 0.0) {
        return Err(Error::param("known standard deviations must be positive"));
    }
    if x.is_empty() || y.is_empty() {
        return Ok(TestResult::invalid("empty group"));
    }
    let se = (sigma_x * sigma_x / x.len() as f64 + sigma_y * sigma_y / y.len() as f64).sqrt();
    let z = (mean(x) - mean(y)) / se;
    Ok(TestResult::new(z, None, z_p(z)))
}

/// `s_x²/s_y²` against F(n−1, m−1), two-sided by doubling the smaller tail.
pub fn var_ratio_f_test(x: &[f64], y: &[f64]) -> TestResult {
    if x.len() < 2 || y.len() < 2 {
        return TestResult::invalid("each group needs at least two observations");
    }
    let vy = variance(y);
    if !(vy > 0.0) {
        return TestResult::invalid("zero variance in the denominator sample");
    }
    let (df1, df2) = ((x.len() - 1) as f64, (y.len() - 1) as f64);
    let f = variance(x) / vy;
    match (Distribution::FisherF { df1, df2 }).tails(f) {
        Ok((lo, up)) => TestResult::new(f, Some(Df::Two(df1, df2)), two_sided(lo, up)),
        Err(e) => TestResult::invalid(e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn z_one_sample_examples() {
        let r = z_test_one_sample(&[1001.0, 999.0, 1003.0, 997.0], 1000.0, 7.5).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        let x = vec![1004.0; 30];
        let r = z_test_one_sample(&x, 1000.0, 7.5).unwrap();
        assert!(close(r.statistic, 4.0 * 30f64.sqrt() / 7.5, 1e-9));
        assert!(close(r.statistic, 2.921, 1e-3));
        assert!(close(r.p_value, 0.00349, 1e-5));
        assert!(!z_test_one_sample(&[], 0.0, 1.0).unwrap().valid);
        assert!(z_test_one_sample(&[1.0], 0.0, 0.0).is_err());
    }

    #[test]
    fn t_one_sample_examples() {
        let r = t_test_one_sample(&[1.0, 2.0, 3.0], 2.0);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        let r = t_test_one_sample(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 0.0);
        assert!(close(r.statistic, 3.5 / (3.5f64 / 6.0).sqrt(), 1e-12));
        assert!(close(r.statistic, 4.583, 1e-3));
        assert_eq!(r.df, Some(Df::One(5.0)));
        assert!(close(r.p_value, 0.00596, 5e-5));
        assert!(!t_test_one_sample(&[2.0, 2.0, 2.0], 0.0).valid);
    }

    #[test]
    fn paired_is_one_sample_on_differences() {
        let x = [3.0, 5.0, 4.0, 9.0];
        let y = [1.0, 2.0, 4.0, 3.0];
        let d: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        assert_eq!(paired_t_test(&x, &y), t_test_one_sample(&d, 0.0));
    }

    #[test]
    fn variance_examples() {
        // s² = 56.25 exactly: a sample of ±a with n = 50 gives s² = 50a²/49
        let a = (56.25f64 * 49.0 / 50.0).sqrt();
        let x: Vec<f64> = (0..50).map(|i| if i % 2 == 0 { a } else { -a }).collect();
        let r = variance_chisq_test(&x, 56.25).unwrap();
        assert!(close(r.statistic, 49.0, 1e-10));
        let (lo, up) = Distribution::ChiSquared { df: 49.0 }.tails(r.statistic).unwrap();
        assert!(close(r.p_value, 2.0 * lo.min(up), 1e-14));
        let scaled: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        let r2 = variance_chisq_test(&scaled, 9.0 * 56.25).unwrap();
        assert!(close(r.p_value, r2.p_value, 1e-12));
        let r = variance_chisq_test(&[1.0, 1.0, 1.0], 1.0).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.valid);
    }

    #[test]
    fn two_sample_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [2.0, 4.0, 6.0, 8.0];
        let r = t_test_two_sample(&x, &y, TTestKind::Pooled);
        // means 2.5 and 5; variances 5/3 and 20/3; pooled 25/6
        assert!(close(r.statistic, -2.5 / (25.0f64 / 6.0 * 0.5).sqrt(), 1e-12));
        assert_eq!(r.df, Some(Df::One(6.0)));
        let w = t_test_two_sample(&x, &y, TTestKind::Welch);
        let (a, b) = (5.0 / 12.0, 20.0 / 12.0);
        let df = (a + b) * (a + b) / (a * a / 3.0 + b * b / 3.0);
        assert_eq!(w.df, Some(Df::One(df)));
        assert!((3.0..=6.0).contains(&df));
        let r = t_test_two_sample(&x, &x, TTestKind::Pooled);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(!t_test_two_sample(&[1.0, 1.0], &[2.0, 2.0], TTestKind::Welch).valid);
    }

    #[test]
    fn f_ratio_symmetry() {
        let x = [1.0, 4.0, 2.0, 8.0, 3.0];
        let y = [2.0, 3.0, 2.5, 3.5];
        let a = var_ratio_f_test(&x, &y);
        let b = var_ratio_f_test(&y, &x);
        assert!(close(a.statistic * b.statistic, 1.0, 1e-12));
        assert!(close(a.p_value, b.p_value, 1e-12));
        let s = var_ratio_f_test(&x, &x);
        assert_eq!(s.statistic, 1.0);
        assert!(!var_ratio_f_test(&x, &[1.0, 1.0]).valid);
    }
}
