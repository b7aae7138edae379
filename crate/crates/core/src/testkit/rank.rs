//! Wilcoxon signed-rank and rank-sum tests, with their exact null
//! distributions.

use super::TestResult;
use crate::probkit::norm_cdf;

/// Largest sample size (per group) for which exact null distributions are used.
pub const EXACT_LIMIT: usize = 25;

/// Average ranks (1-based) and the sizes of tie groups longer than one.
pub fn average_ranks(x: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && x[idx[j]] == x[idx[i]] {
            j += 1;
        }
        let r = (i + j + 1) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = r;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

fn tie_sum(ties: &[usize]) -> f64 {
    ties.iter().map(|&t| (t * t * t - t) as f64).sum()
}

/// Null frequencies of the signed-rank statistic: entry `v` counts the sign
/// assignments of ranks `1..=n` whose positive ranks sum to `v`.
pub fn signed_rank_counts(n: usize) -> Vec<f64> {
    let max = n * (n + 1) / 2;
    let mut c = vec![0.0; max + 1];
    c[0] = 1.0;
    for i in 1..=n {
        for s in (i..=max).rev() {
            c[s] += c[s - i];
        }
    }
    c
}

/// Null frequencies of the Mann–Whitney statistic `W ∈ [0, nm]`: the
/// coefficients of the Gaussian binomial `[n+m choose n]_q`.
pub fn rank_sum_counts(n: usize, m: usize) -> Vec<f64> {
    let max = n * m;
    let mut c = vec![0.0; max + 1];
    c[0] = 1.0;
    for i in 1..=n {
        // multiply by (1 − q^{m+i}), then divide by (1 − q^i)
        let k = m + i;
        for s in (k..=max).rev() {
            c[s] -= c[s - k];
        }
        for s in i..=max {
            c[s] += c[s - i];
        }
    }
    c
}

/// Two-sided p from null frequencies of a statistic symmetric about
/// `center`, doubling the tail on the observed side.
fn exact_two_sided(counts: &[f64], stat: usize, center: f64) -> f64 {
    let total: f64 = counts.iter().sum();
    let tail: f64 = if stat as f64 > center { counts[stat..].iter().sum() } else { counts[..=stat].iter().sum() };
    (2.0 * tail / total).min(1.0)
}

fn approx_two_sided(dev: f64, sigma: f64) -> f64 {
    // f64::signum maps 0 to 1, so the zero case needs its own branch
    let correction = if dev == 0.0 { 0.0 } else { 0.5 * dev.signum() };
    let z = (dev - correction) / sigma;
    (2.0 * norm_cdf(-z.abs())).min(1.0)
}

/// One-sample (or paired, on differences) Wilcoxon signed-rank test.
pub fn wilcoxon_signed_rank(x: &[f64], mu0: f64) -> TestResult {
    let d: Vec<f64> = x.iter().map(|v| v - mu0).filter(|&v| v != 0.0).collect();
    let zeros = x.len() - d.len();
    let n = d.len();
    if n == 0 {
        return TestResult::invalid("all observations equal the hypothesized location");
    }
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let (ranks, ties) = average_ranks(&abs);
    let v: f64 = ranks.iter().zip(&d).filter(|(_, &di)| di > 0.0).map(|(r, _)| r).sum();
    let nf = n as f64;
    let mut res = if n <= EXACT_LIMIT && ties.is_empty() && zeros == 0 {
        let counts = signed_rank_counts(n);
        TestResult::new(v, None, exact_two_sided(&counts, v as usize, nf * (nf + 1.0) / 4.0))
    } else {
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_sum(&ties) / 48.0;
        if !(var > 0.0) {
            return TestResult::invalid("degenerate signed-rank variance");
        }
        TestResult::new(v, None, approx_two_sided(v - nf * (nf + 1.0) / 4.0, var.sqrt()))
    };
    if zeros > 0 || !ties.is_empty() {
        res = res.with_note(format!("normal approximation ({zeros} zero(s), {} tie group(s))", ties.len()));
    }
    res
}

/// Wilcoxon rank-sum (Mann–Whitney) test; the statistic is the rank sum
/// of `x` minus `n(n+1)/2`.
pub fn wilcoxon_rank_sum(x: &[f64], y: &[f64]) -> TestResult {
    let (n, m) = (x.len(), y.len());
    if n == 0 || m == 0 {
        return TestResult::invalid("empty group");
    }
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let (ranks, ties) = average_ranks(&pooled);
    let (nf, mf) = (n as f64, m as f64);
    let w = ranks[..n].iter().sum::<f64>() - nf * (nf + 1.0) / 2.0;
    let center = nf * mf / 2.0;
    if n <= EXACT_LIMIT && m <= EXACT_LIMIT && ties.is_empty() {
        let counts = rank_sum_counts(n, m);
        return TestResult::new(w, None, exact_two_sided(&counts, w as usize, center));
    }
    let big_n = nf + mf;
    let var = nf * mf / 12.0 * ((big_n + 1.0) - tie_sum(&ties) / (big_n * (big_n - 1.0)));
    if !(var > 0.0) {
        return TestResult::invalid("all observations tied");
    }
    let res = TestResult::new(w, None, approx_two_sided(w - center, var.sqrt()));
    if ties.is_empty() {
        res
    } else {
        res.with_note(format!("normal approximation with {} tie group(s)", ties.len()))
    }
}
