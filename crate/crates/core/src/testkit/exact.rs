use super::{Df, TestResult};
use crate::error::{Error, Result};
use crate::probkit::special::dbinom;
use crate::probkit::Distribution;

const REL_ERR: f64 = 1.0 + 1e-7;

/// Two-sided exact binomial test by the minimum-likelihood method: the
/// p-value sums the probabilities of all outcomes no more likely than `x`
/// (with relative tolerance 1e-7 on the comparison).
pub fn binom_exact_test(x: u64, n: u64, p0: f64) -> Result<TestResult> {
    if x > n {
        return Err(Error::param(format!("successes {x} exceed trials {n}")));
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::param(format!("p0 must be in (0, 1), got {p0}")));
    }
    if n == 0 {
        return Ok(TestResult::invalid("no trials"));
    }
    let binom = Distribution::Binomial { n, p: p0 };
    let d = dbinom(x, n, p0) * REL_ERR;
    let m = n as f64 * p0;
    let xf = x as f64;
    let p = if xf == m {
        1.0
    } else if xf < m {
        // upper half [ceil(m), n] has nonincreasing mass; count outcomes with pmf ≤ d
        let start = m.ceil() as u64;
        let first = first_index(start, n, |k| dbinom(k, n, p0) <= d);
        let y = n + 1 - first;
        binom.cdf(xf)? + if y > 0 { binom.sf((n - y) as f64)? } else { 0.0 }
    } else {
        // lower half [0, floor(m)] has nondecreasing mass
        let end = m.floor() as u64;
        let y = count_prefix(end, |k| dbinom(k, n, p0) <= d);
        (if y > 0 { binom.cdf(y as f64 - 1.0)? } else { 0.0 }) + binom.sf(xf - 1.0)?
    };
    Ok(TestResult::new(xf, None, p.min(1.0)))
}

/// Smallest k in [lo, hi] with `pred(k)`, or hi + 1; `pred` must be monotone
/// (false then true).
fn first_index<F: Fn(u64) -> bool>(lo: u64, hi: u64, pred: F) -> u64 {
    let (mut a, mut b) = (lo, hi + 1);
    while a < b {
        let mid = a + (b - a) / 2;
        if pred(mid) {
            b = mid;
        } else {
            a = mid + 1;
        }
    }
    a
}

/// Number of k in [0, end] with `pred(k)` for a predicate that is true on a
/// prefix.
fn count_prefix<F: Fn(u64) -> bool>(end: u64, pred: F) -> u64 {
    first_index(0, end, |k| !pred(k))
}

/// Score test for a proportion without continuity correction; the statistic
/// is χ²(1), the square of the z statistic.
pub fn prop_score_test(x: u64, n: u64, p0: f64) -> Result<TestResult> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::param(format!("p0 must be in (0, 1), got {p0}")));
    }
    if x > n {
        return Err(Error::param(format!("successes {x} exceed trials {n}")));
    }
    if n == 0 {
        return Ok(TestResult::invalid("no trials"));
    }
    let nf = n as f64;
    let diff = x as f64 / nf - p0;
    let stat = diff * diff * nf / (p0 * (1.0 - p0));
    let p = Distribution::ChiSquared { df: 1.0 }.sf(stat)?;
    Ok(TestResult::new(stat, Some(Df::One(1.0)), p))
}

/// Sign test against a hypothesized median. Ties with the median are
/// dropped; the p-value `2·P(B ≤ min(#below, #above))` is capped at 1.
pub fn sign_test(x: &[f64], median0: f64) -> TestResult {
    let n = x.len() as u64;
    let smaller = x.iter().filter(|&&v| v < median0).count() as u64;
    let equal = x.iter().filter(|&&v| v == median0).count() as u64;
    let effective = n - equal;
    if effective == 0 {
        return TestResult::invalid("all observations equal the hypothesized median");
    }
    let count = smaller.min(effective - smaller);
    let lower = Distribution::Binomial { n: effective, p: 0.5 }.cdf(count as f64).unwrap_or(1.0);
    let mut res = TestResult::new(count as f64, None, 2.0 * lower);
    if equal > 0 {
        res = res.with_note(format!("{equal} observation(s) tied with the median were dropped"));
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binom_documented_values() {
        assert_eq!(binom_exact_test(5, 10, 0.5).unwrap().p_value, 1.0);
        assert!((binom_exact_test(8, 10, 0.5).unwrap().p_value - 0.109375).abs() < 1e-15);
        assert!((binom_exact_test(0, 10, 0.5).unwrap().p_value - 0.001953125).abs() < 1e-15);
        assert!(binom_exact_test(11, 10, 0.5).is_err());
        assert!(binom_exact_test(1, 10, 0.0).is_err());
    }

    #[test]
    fn prop_documented_values() {
        let r = prop_score_test(50, 100, 0.5).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        let r = prop_score_test(60, 100, 0.5).unwrap();
        assert!((r.statistic - 4.0).abs() < 1e-12);
        assert!((r.p_value - 0.0455).abs() < 1e-4);
        assert!(prop_score_test(1, 10, 1.0).is_err());
    }

    #[test]
    fn sign_documented_values() {
        let r = sign_test(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.0);
        assert!((r.p_value - 0.0625).abs() < 1e-15);
        let x: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(sign_test(&x, 5.5).p_value, 1.0);
        // one tie drops the effective n from 6 to 5
        let r = sign_test(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], 0.0);
        assert!((r.p_value - 0.0625).abs() < 1e-15);
        assert!(r.note.is_some());
        assert!(!sign_test(&[2.0, 2.0], 2.0).valid);
    }
}
