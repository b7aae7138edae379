//! Monte Carlo randomization tests built on t tests: the p-value is the share
//! of re-randomized datasets whose t-test p-value is at most the observed one.

use super::{t_test_one_sample, t_test_two_sample, TTestKind, TestResult};
use crate::error::{Error, Result};
use crate::probkit::RandomSource;

fn check_reps(inner_reps: usize) -> Result<()> {
    if inner_reps == 0 {
        return Err(Error::param("inner_reps must be at least 1"));
    }
    Ok(())
}

fn finish(observed: &TestResult, hits: usize, degenerate: usize, inner_reps: usize) -> TestResult {
    let res = TestResult::new(observed.statistic, observed.df, hits as f64 / inner_reps as f64);
    if degenerate > 0 {
        res.with_note(format!("{degenerate} degenerate resample(s) counted as at least as extreme"))
    } else {
        res
    }
}

/// Re-assigns group labels at random; the base test is the Welch t test.
pub fn randomization_test_unpaired(
    x: &[f64],
    y: &[f64],
    inner_reps: usize,
    rng: &mut RandomSource,
) -> Result<TestResult> {
    check_reps(inner_reps)?;
    let observed = t_test_two_sample(x, y, TTestKind::Welch);
    if !observed.valid {
        return Ok(observed);
    }
    let mut pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let n = x.len();
    let (mut hits, mut degenerate) = (0, 0);
    for _ in 0..inner_reps {
        rng.shuffle(&mut pooled);
        let r = t_test_two_sample(&pooled[..n], &pooled[n..], TTestKind::Welch);
        if !r.valid {
            degenerate += 1;
            hits += 1;
        } else if r.p_value <= observed.p_value {
            hits += 1;
        }
    }
    Ok(finish(&observed, hits, degenerate, inner_reps))
}

/// Flips the sign of each within-pair difference at random; the base test is
/// the one-sample t test of mean difference 0.
pub fn randomization_test_paired(d: &[f64], inner_reps: usize, rng: &mut RandomSource) -> Result<TestResult> {
    check_reps(inner_reps)?;
    let observed = t_test_one_sample(d, 0.0);
    if !observed.valid {
        return Ok(observed);
    }
    let mut flipped = vec![0.0; d.len()];
    let (mut hits, mut degenerate) = (0, 0);
    for _ in 0..inner_reps {
        for (f, &v) in flipped.iter_mut().zip(d) {
            *f = if rng.uniform() < 0.5 { -v } else { v };
        }
        let r = t_test_one_sample(&flipped, 0.0);
        if !r.valid {
            degenerate += 1;
            hits += 1;
        } else if r.p_value <= observed.p_value {
            hits += 1;
        }
    }
    Ok(finish(&observed, hits, degenerate, inner_reps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_data_is_invalid() {
        let mut rng = RandomSource::new(1, 0);
        let r = randomization_test_unpaired(&[2.0; 4], &[2.0; 4], 50, &mut rng).unwrap();
        assert!(!r.valid);
        let r = randomization_test_paired(&[0.0; 4], 50, &mut rng).unwrap();
        assert!(!r.valid);
        assert!(randomization_test_paired(&[1.0, 2.0], 0, &mut rng).is_err());
    }

    #[test]
    fn exchangeable_data_gives_large_p() {
        let mut rng = RandomSource::new(2, 0);
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = randomization_test_unpaired(&x, &x, 400, &mut rng).unwrap();
        // observed t = 0 has the largest possible base p-value
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn clear_effect_gives_small_p() {
        let mut rng = RandomSource::new(3, 0);
        let x: Vec<f64> = (0..12).map(|i| 10.0 + (i % 4) as f64).collect();
        let y: Vec<f64> = (0..12).map(|i| (i % 4) as f64).collect();
        let r = randomization_test_unpaired(&x, &y, 400, &mut rng).unwrap();
        assert!(r.p_value < 0.01);
        let d: Vec<f64> = (0..15).map(|i| 3.0 + (i % 3) as f64).collect();
        let r = randomization_test_paired(&d, 400, &mut rng).unwrap();
        assert!(r.p_value < 0.01);
    }
}
