//! Independent reference implementations shared by the integration tests.
//! Nothing here evaluates the crate's own probability kernel.

#![allow(dead_code)]

use powersim::probkit::Distribution;
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, LogNormal, Normal, StudentsT, Uniform};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;

/// Poisson(λ) weights up to an index whose upper tail is below 1e-15.
fn poisson_weights(lambda: f64) -> Vec<f64> {
    let jmax = (lambda + 40.0 * lambda.sqrt() + 60.0).ceil() as usize;
    (0..=jmax).map(|j| (-lambda + j as f64 * lambda.ln() - ln_gamma(j as f64 + 1.0)).exp()).collect()
}

/// Noncentral χ² CDF as a Poisson mixture of central χ² CDFs. Returns the
/// value and a bound on the truncated remainder.
pub fn nc_chisq_cdf(df: f64, ncp: f64, x: f64) -> (f64, f64) {
    let w = poisson_weights(ncp / 2.0);
    let mut sum = 0.0;
    for (j, wj) in w.iter().enumerate() {
        if *wj > 0.0 {
            sum += wj * ChiSquared::new(df + 2.0 * j as f64).unwrap().cdf(x);
        }
    }
    (sum, (1.0 - w.iter().sum::<f64>()).abs() + 1e-15)
}

/// Noncentral F CDF as a Poisson mixture of incomplete beta functions.
pub fn nc_f_cdf(df1: f64, df2: f64, ncp: f64, x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0);
    }
    let y = df1 * x / (df1 * x + df2);
    let w = poisson_weights(ncp / 2.0);
    let sum: f64 = w.iter().enumerate().map(|(j, wj)| wj * beta_reg(df1 / 2.0 + j as f64, df2 / 2.0, y)).sum();
    (sum, (1.0 - w.iter().sum::<f64>()).abs() + 1e-15)
}

/// Noncentral t CDF by integrating over the χ-distributed denominator:
/// `P(T ≤ t) = ∫ Φ(t·s/√ν − δ) f_χν(s) ds`, composite Simpson.
pub fn nc_t_cdf(df: f64, ncp: f64, t: f64) -> f64 {
    let z = Normal::new(0.0, 1.0).unwrap();
    let log_norm = (df / 2.0 - 1.0) * std::f64::consts::LN_2 + ln_gamma(df / 2.0);
    let density = |s: f64| {
        if s == 0.0 {
            return if df == 1.0 { (-log_norm).exp() } else { 0.0 };
        }
        ((df - 1.0) * s.ln() - s * s / 2.0 - log_norm).exp()
    };
    let upper = df.sqrt() + 14.0;
    let steps = 40_000;
    let h = upper / steps as f64;
    let f = |s: f64| z.cdf(t * s / df.sqrt() - ncp) * density(s);
    let mut acc = f(0.0) + f(upper);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    acc * h / 3.0
}

fn choose(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn binom_pmf(k: u64, n: u64, p: f64) -> f64 {
    choose(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

/// Log binomial mass, usable where `choose` would overflow.
pub fn binom_pmf_ln(k: u64, n: u64, p: f64) -> f64 {
    let (k, n) = (k as f64, n as f64);
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0) + k * p.ln() + (n - k) * (1.0 - p).ln()
}

/// Two-sided exact binomial p-value by listing every outcome no more likely
/// than the observed one.
pub fn binom_two_sided(x: u64, n: u64, p0: f64) -> f64 {
    let d = binom_pmf(x, n, p0) * (1.0 + 1e-7);
    (0..=n).map(|k| binom_pmf(k, n, p0)).filter(|&pk| pk <= d).sum::<f64>().min(1.0)
}

/// Sign-test p-value by enumerating all 2^n equally likely sign patterns.
pub fn sign_two_sided(below: u32, above: u32) -> f64 {
    let n = below + above;
    let count = below.min(above);
    let hits = (0u32..1 << n).filter(|pattern| pattern.count_ones() <= count).count();
    (2.0 * hits as f64 / (1u64 << n) as f64).min(1.0)
}

/// Null law of the signed-rank statistic by enumerating sign patterns.
pub fn signed_rank_null(n: u32) -> Vec<u64> {
    let max = (n * (n + 1) / 2) as usize;
    let mut counts = vec![0u64; max + 1];
    for pattern in 0u32..1 << n {
        let v: u32 = (0..n).filter(|i| pattern >> i & 1 == 1).map(|i| i + 1).sum();
        counts[v as usize] += 1;
    }
    counts
}

/// Null law of the Mann–Whitney statistic by enumerating all rank subsets.
pub fn rank_sum_null(n: u32, m: u32) -> Vec<u64> {
    let total = n + m;
    let mut counts = vec![0u64; (n * m) as usize + 1];
    for pattern in 0u32..1 << total {
        if pattern.count_ones() == n {
            let sum: u32 = (0..total).filter(|i| pattern >> i & 1 == 1).map(|i| i + 1).sum();
            counts[(sum - n * (n + 1) / 2) as usize] += 1;
        }
    }
    counts
}

/// Doubles the tail on the observed side of a symmetric null law.
pub fn doubled_tail(counts: &[u64], stat: usize, center: f64) -> f64 {
    let total: u64 = counts.iter().sum();
    let tail: u64 = if stat as f64 > center { counts[stat..].iter().sum() } else { counts[..=stat].iter().sum() };
    (2.0 * tail as f64 / total as f64).min(1.0)
}

/// Asymptotic one-sample KS critical value at level 0.001.
pub fn ks_critical_001(n: usize) -> f64 {
    1.94947 / (n as f64).sqrt()
}

/// `sup|F̂n − F|` of a sample against a reference CDF.
pub fn ks_distance(x: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// One instance of every continuous family, at parameters the scenarios use.
pub fn continuous_kinds() -> Vec<Distribution> {
    vec![
        Distribution::normal(1000.0, 7.5).unwrap(),
        Distribution::log_normal(130f64.ln(), 0.6).unwrap(),
        Distribution::uniform(50.0, 200.0).unwrap(),
        Distribution::chi_squared(1.0).unwrap(),
        Distribution::chi_squared(5.0).unwrap(),
        Distribution::chi_squared(49.0).unwrap(),
        Distribution::student_t(1.0).unwrap(),
        Distribution::student_t(3.0).unwrap(),
        Distribution::student_t(29.0).unwrap(),
        Distribution::fisher_f(2.0, 27.0).unwrap(),
        Distribution::fisher_f(5.0, 5.0).unwrap(),
        Distribution::noncentral_t(29.0, 2.921).unwrap(),
        Distribution::noncentral_chi_squared(5.0, 15.0).unwrap(),
        Distribution::noncentral_f(2.0, 61.0, 9.0).unwrap(),
    ]
}

/// Reference CDF from statrs (central kinds) or the series oracles.
pub fn reference_cdf(d: &Distribution) -> Box<dyn Fn(f64) -> f64> {
    match *d {
        Distribution::Normal { mean, sd } => {
            let r = Normal::new(mean, sd).unwrap();
            Box::new(move |x| r.cdf(x))
        }
        Distribution::LogNormal { meanlog, sdlog } => {
            let r = LogNormal::new(meanlog, sdlog).unwrap();
            Box::new(move |x| r.cdf(x))
        }
        Distribution::Uniform { min, max } => {
            let r = Uniform::new(min, max).unwrap();
            Box::new(move |x| r.cdf(x))
        }
        Distribution::ChiSquared { df } => {
            let r = ChiSquared::new(df).unwrap();
            Box::new(move |x| r.cdf(x))
        }
        Distribution::StudentT { df } => {
            let r = StudentsT::new(0.0, 1.0, df).unwrap();
            Box::new(move |x| r.cdf(x))
        }
        Distribution::FisherF { df1, df2 } => {
            let r = FisherSnedecor::new(df1, df2).unwrap();
            Box::new(move |x| r.cdf(x))
        }
        Distribution::NoncentralT { df, ncp } => Box::new(move |x| nc_t_cdf(df, ncp, x)),
        Distribution::NoncentralChiSquared { df, ncp } => Box::new(move |x| nc_chisq_cdf(df, ncp, x).0),
        Distribution::NoncentralF { df1, df2, ncp } => Box::new(move |x| nc_f_cdf(df1, df2, ncp, x).0),
        _ => unreachable!("continuous kinds only"),
    }
}

/// SplitMix64: a generator unrelated to the crate's, for independent-route
/// simulations.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64
    }
}
