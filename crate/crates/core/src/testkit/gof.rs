use super::{Df, TestResult};
use crate::error::{Error, Result};
use crate::probkit::Distribution;

/// Pearson χ² goodness-of-fit test of observed counts against cell
/// probabilities; `df_reduction` is the number of parameters estimated from
/// the data.
pub fn chisq_gof(counts: &[u64], probs0: &[f64], df_reduction: usize) -> Result<TestResult> {
    let k = counts.len();
    if probs0.len() != k {
        return Err(Error::param(format!("{k} counts but {} probabilities", probs0.len())));
    }
    if probs0.iter().any(|&p| !(p >= 0.0)) || (probs0.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::param("cell probabilities must be nonnegative and sum to 1"));
    }
    if k <= 1 + df_reduction {
        return Err(Error::param(format!("no degrees of freedom left: {k} cells, {df_reduction} estimated parameter(s)")));
    }
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Ok(TestResult::invalid("no observations"));
    }
    let nf = n as f64;
    let mut stat = 0.0;
    let mut smallest = f64::INFINITY;
    for (&o, &p) in counts.iter().zip(probs0) {
        let e = nf * p;
        if !(e > 0.0) {
            return Err(Error::param("every cell needs a positive expected count"));
        }
        smallest = smallest.min(e);
        let d = o as f64 - e;
        stat += d * d / e;
    }
    let df = (k - 1 - df_reduction) as f64;
    let p = Distribution::ChiSquared { df }.sf(stat)?;
    let res = TestResult::new(stat, Some(Df::One(df)), p);
    Ok(if smallest < 1.0 { res.with_note(format!("smallest expected count {smallest:.3} is below 1")) } else { res })
}

/// Counts of `x` in the right-closed bins `(−∞, b₁], (b₁, b₂], …, (b_k, ∞)`.
pub fn bin_continuous(x: &[f64], breakpoints: &[f64]) -> Result<Vec<u64>> {
    if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::param("breakpoints must be strictly ascending"));
    }
    let mut counts = vec![0u64; breakpoints.len() + 1];
    for &v in x {
        counts[breakpoints.partition_point(|&b| b < v)] += 1;
    }
    Ok(counts)
}

/// Cell probabilities from a CDF evaluated at the breakpoints, including the
/// two unbounded end cells.
pub fn model_probs(cdf_at_breaks: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(cdf_at_breaks.len() + 1);
    let mut prev = 0.0;
    for &c in cdf_at_breaks {
        out.push(c - prev);
        prev = c;
    }
    out.push(1.0 - prev);
    out
}

/// [`model_probs`] for a distribution's CDF.
pub fn model_probs_for(d: &Distribution, breakpoints: &[f64]) -> Result<Vec<f64>> {
    let cdf = breakpoints.iter().map(|&b| d.cdf(b)).collect::<Result<Vec<_>>>()?;
    Ok(model_probs(&cdf))
}

/// One-sample Kolmogorov–Smirnov test against a fully specified continuous
/// distribution.
pub fn ks_test_one_sample(x: &[f64], target: &Distribution) -> Result<TestResult> {
    if target.is_discrete() {
        return Err(Error::param("Kolmogorov-Smirnov test needs a continuous target"));
    }
    let n = x.len();
    if n == 0 {
        return Ok(TestResult::invalid("empty sample"));
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &v) in sorted.iter().enumerate() {
        let f = target.cdf(v)?;
        d = d.max((i + 1) as f64 / nf - f).max(f - i as f64 / nf);
    }
    let ties = sorted.windows(2).any(|w| w[0] == w[1]);
    let p = if n <= 100 && !ties { 1.0 - kolmogorov_exact_cdf(n, d) } else { kolmogorov_asymptotic_sf(nf.sqrt() * d) };
    let res = TestResult::new(d, None, p);
    Ok(if ties { res.with_note("ties present; asymptotic p-value") } else { res })
}

/// `P(D_n < d)` for the one-sample statistic by the Marsaglia–Tsang–Wang
/// matrix-power method.
pub(crate) fn kolmogorov_exact_cdf(n: usize, d: f64) -> f64 {
    let nf = n as f64;
    if d <= 0.0 {
        return 0.0;
    }
    if d >= 1.0 {
        return 1.0;
    }
    let k = (nf * d) as usize + 1;
    let m = 2 * k - 1;
    let h = k as f64 - nf * d;
    let mut hm = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            hm[i * m + j] = if i + 1 >= j { 1.0 } else { 0.0 };
        }
    }
    for i in 0..m {
        hm[i * m] -= h.powi(i as i32 + 1);
        hm[(m - 1) * m + i] -= h.powi((m - i) as i32);
    }
    if 2.0 * h - 1.0 > 0.0 {
        hm[(m - 1) * m] += (2.0 * h - 1.0).powi(m as i32);
    }
    for i in 0..m {
        for j in 0..m {
            if i + 1 > j {
                for g in 1..=(i + 1 - j) {
                    hm[i * m + j] /= g as f64;
                }
            }
        }
    }
    let (q, mut eq) = matrix_power(&hm, m, n);
    let mut s = q[(k - 1) * m + k - 1];
    for i in 1..=n {
        s *= i as f64 / nf;
        if s < 1e-140 {
            s *= 1e140;
            eq -= 140;
        }
    }
    s * 10f64.powi(eq)
}

fn matmul(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    let mut c = vec![0.0; m * m];
    for i in 0..m {
        for l in 0..m {
            let ail = a[i * m + l];
            if ail == 0.0 {
                continue;
            }
            for j in 0..m {
                c[i * m + j] += ail * b[l * m + j];
            }
        }
    }
    c
}

/// `a^n` with a decimal exponent kept separately to avoid overflow.
fn matrix_power(a: &[f64], m: usize, n: usize) -> (Vec<f64>, i32) {
    if n == 1 {
        return (a.to_vec(), 0);
    }
    let (half, e) = matrix_power(a, m, n / 2);
    let mut v = matmul(&half, &half, m);
    let mut ev = 2 * e;
    if n % 2 == 1 {
        v = matmul(a, &v, m);
    }
    if v[(m / 2) * m + m / 2] > 1e140 {
        v.iter_mut().for_each(|x| *x *= 1e-140);
        ev += 140;
    }
    (v, ev)
}

/// `1 − K(x)` for the limiting Kolmogorov distribution of `√n·D`.
pub(crate) fn kolmogorov_asymptotic_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.0 {
        // K(x) = √(2π)/x · Σ exp(−(2k−1)²π²/(8x²))
        let z = -std::f64::consts::PI * std::f64::consts::PI / (8.0 * x * x);
        let mut s = 0.0;
        let mut k = 1.0f64;
        loop {
            let term = (k * k * z).exp();
            s += term;
            if term < 1e-17 * s {
                break;
            }
            k += 2.0;
        }
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / x * s
    } else {
        let z = -2.0 * x * x;
        let mut s = 0.0;
        let mut sign = 1.0;
        let mut k = 1.0f64;
        loop {
            let term = (k * k * z).exp();
            s += sign * term;
            if term < 1e-17 {
                break;
            }
            sign = -sign;
            k += 1.0;
        }
        (2.0 * s).clamp(0.0, 1.0)
    }
}
