//! Null calibration of every test and its documented invariances.

mod common;

use nalgebra::DMatrix;
use powersim::linmod::{build_design, glm_binomial_fit, glm_lrt, nested_f_test, ols_fit, wald_coef_test, FactorSpec, Variable};
use powersim::probkit::{sample_multinomial, sample_mvnormal, sample_n, CovarianceMatrix, Distribution, RandomSource};
use powersim::testkit::*;
use proptest::prelude::*;

const REPS: u64 = 10_000;

/// Three Monte Carlo standard errors of a 0.05 rejection rate.
fn band() -> f64 {
    3.0 * (0.05 * 0.95 / REPS as f64).sqrt()
}

fn null_p_values(seed: u64, mut run: impl FnMut(&mut RandomSource) -> TestResult) -> Vec<f64> {
    (0..REPS)
        .map(|i| {
            let r = run(&mut RandomSource::new(seed, i));
            assert!(r.valid, "invalid result under the null: {:?}", r.note);
            assert!((0.0..=1.0).contains(&r.p_value));
            r.p_value
        })
        .collect()
}

fn rate(p: &[f64]) -> f64 {
    p.iter().filter(|&&v| v < 0.05).count() as f64 / p.len() as f64
}

/// Level and, for continuous statistics with exact reference laws, the
/// whole p-value distribution.
fn assert_calibrated(name: &str, p: &[f64], exact_law: bool) {
    let r = rate(p);
    assert!((r - 0.05).abs() <= band(), "{name}: rejection rate {r}");
    if exact_law {
        let d = common::ks_distance(p, |u| u.clamp(0.0, 1.0));
        assert!(d < common::ks_critical_001(p.len()), "{name}: KS distance {d}");
    }
}

fn normal(mean: f64, sd: f64) -> Distribution {
    Distribution::normal(mean, sd).unwrap()
}

#[test]
fn one_sample_location_and_scale() {
    let d = normal(1000.0, 7.5);
    let p = null_p_values(1, |rng| z_test_one_sample(&sample_n(&d, 30, rng), 1000.0, 7.5).unwrap());
    assert_calibrated("z one-sample", &p, true);
    let p = null_p_values(2, |rng| t_test_one_sample(&sample_n(&d, 30, rng), 1000.0));
    assert_calibrated("t one-sample", &p, true);
    let p = null_p_values(3, |rng| variance_chisq_test(&sample_n(&d, 50, rng), 56.25).unwrap());
    assert_calibrated("variance", &p, true);
}

#[test]
fn two_sample_location_and_scale() {
    let p = null_p_values(4, |rng| {
        let x = sample_n(&normal(1000.0, 7.0), 85, rng);
        let y = sample_n(&normal(1000.0, 10.0), 70, rng);
        z_test_two_sample(&x, &y, 7.0, 10.0).unwrap()
    });
    assert_calibrated("z two-sample", &p, true);
    let p = null_p_values(5, |rng| {
        let x = sample_n(&normal(1000.0, 10.0), 115, rng);
        let y = sample_n(&normal(1000.0, 10.0), 90, rng);
        t_test_two_sample(&x, &y, TTestKind::Pooled)
    });
    assert_calibrated("pooled t", &p, true);
    let p = null_p_values(6, |rng| {
        let x = sample_n(&normal(0.0, 5.0), 30, rng);
        let y = sample_n(&normal(0.0, 10.0), 20, rng);
        t_test_two_sample(&x, &y, TTestKind::Welch)
    });
    // Satterthwaite's df make Welch approximate; only the level is checked
    assert_calibrated("Welch t", &p, false);
    let p = null_p_values(7, |rng| {
        let x = sample_n(&normal(0.0, 3.0), 45, rng);
        let y = sample_n(&normal(0.0, 3.0), 40, rng);
        var_ratio_f_test(&x, &y)
    });
    assert_calibrated("variance ratio", &p, true);
}

#[test]
fn paired_tests() {
    let s = 15.0;
    let sigma = CovarianceMatrix::new(DMatrix::from_row_slice(2, 2, &[s * s, 0.9 * s * s, 0.9 * s * s, s * s])).unwrap();
    let p = null_p_values(8, |rng| {
        let x = sample_mvnormal(18, &[100.0, 100.0], &sigma, rng).unwrap();
        paired_t_test(x.column(0).as_slice(), x.column(1).as_slice())
    });
    assert_calibrated("paired t", &p, true);
}

#[test]
fn rank_and_sign_tests() {
    let p = null_p_values(9, |rng| wilcoxon_signed_rank(&sample_n(&Distribution::uniform(0.0, 2.0).unwrap(), 20, rng), 1.0));
    // exact but discrete: conservative at 0.05
    assert!(rate(&p) <= 0.055, "signed rank (exact) {}", rate(&p));
    let p = null_p_values(10, |rng| wilcoxon_signed_rank(&sample_n(&normal(0.0, 1.0), 40, rng), 0.0));
    assert_calibrated("signed rank (normal approximation)", &p, false);
    let ln = Distribution::log_normal(5.0, 0.6).unwrap();
    let p = null_p_values(11, |rng| wilcoxon_rank_sum(&sample_n(&ln, 20, rng), &sample_n(&ln, 22, rng)));
    assert!(rate(&p) <= 0.055, "rank sum (exact) {}", rate(&p));
    let p = null_p_values(12, |rng| wilcoxon_rank_sum(&sample_n(&ln, 60, rng), &sample_n(&ln, 50, rng)));
    assert_calibrated("rank sum (normal approximation)", &p, false);
    let p = null_p_values(13, |rng| sign_test(&sample_n(&ln, 40, rng), 5f64.exp()));
    assert!(rate(&p) <= 0.055, "sign {}", rate(&p));
}

#[test]
fn proportion_tests() {
    let b = Distribution::binomial(9000, 0.5).unwrap();
    let p = null_p_values(14, |rng| binom_exact_test(powersim::probkit::sample(&b, rng) as u64, 9000, 0.5).unwrap());
    assert!(rate(&p) <= 0.055, "exact binomial {}", rate(&p));
    let p = null_p_values(15, |rng| prop_score_test(powersim::probkit::sample(&b, rng) as u64, 9000, 0.5).unwrap());
    // the statistic is discrete, so the reference is its exact size: the
    // binomial mass of |x − 4500| ≥ 93, where z first exceeds 1.96
    let size: f64 = (0..=9000u64).filter(|&x| x.abs_diff(4500) >= 93).map(|x| common::binom_pmf_ln(x, 9000, 0.5).exp()).sum();
    assert!((size - 0.05116).abs() < 1e-4, "{size}");
    let r = rate(&p);
    assert!((r - size).abs() <= 3.0 * (size * (1.0 - size) / REPS as f64).sqrt(), "score test: rejection rate {r} vs exact size {size}");
}

#[test]
fn goodness_of_fit_tests() {
    let die = [1.0 / 6.0; 6];
    let p = null_p_values(16, |rng| chisq_gof(&sample_multinomial(300, &die, rng).unwrap(), &die, 0).unwrap());
    assert_calibrated("chi-square GOF", &p, false);
    let target = normal(100.0, 15.0);
    let p = null_p_values(17, |rng| ks_test_one_sample(&sample_n(&target, 80, rng), &target).unwrap());
    assert_calibrated("KS (exact)", &p, true);
    let p = null_p_values(18, |rng| ks_test_one_sample(&sample_n(&target, 250, rng), &target).unwrap());
    assert_calibrated("KS (asymptotic)", &p, false);
}

#[test]
fn association_tests() {
    let p = null_p_values(19, |rng| {
        let rows: Vec<usize> = (0..200).map(|_| rng.below(2) as usize).collect();
        let cols: Vec<usize> = (0..200).map(|_| rng.below(3) as usize).collect();
        chisq_contingency(&ContingencyTable::tabulate(&rows, &cols, 2, 3).unwrap())
    });
    assert_calibrated("chi-square contingency", &p, false);
    let id = CovarianceMatrix::new(DMatrix::identity(2, 2)).unwrap();
    let p = null_p_values(20, |rng| {
        let x = sample_mvnormal(90, &[0.0, 0.0], &id, rng).unwrap();
        cor_test(x.column(0).as_slice(), x.column(1).as_slice(), 0.0).unwrap()
    });
    assert_calibrated("correlation t", &p, true);
    let r = CovarianceMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.6, 0.6, 1.0])).unwrap();
    let p = null_p_values(21, |rng| {
        let x = sample_mvnormal(80, &[0.0, 0.0], &r, rng).unwrap();
        cor_test(x.column(0).as_slice(), x.column(1).as_slice(), 0.6).unwrap()
    });
    assert_calibrated("correlation Fisher z", &p, false);
}

#[test]
fn hotelling_tests() {
    let corr = DMatrix::from_fn(4, 4, |i, j| if i == j { 1.0 } else { 0.3 });
    let sigma = CovarianceMatrix::from_sd_corr(&[2.0, 2.0, 2.0, 2.0], &corr).unwrap();
    let mu = [12.0, 10.0, 10.0, 8.0];
    let p = null_p_values(22, |rng| hotelling_one_sample(&sample_mvnormal(30, &mu, &sigma, rng).unwrap(), &mu).unwrap());
    assert_calibrated("Hotelling one-sample", &p, true);
    let p = null_p_values(23, |rng| {
        let x = sample_mvnormal(25, &mu, &sigma, rng).unwrap();
        let y = sample_mvnormal(20, &mu, &sigma, rng).unwrap();
        hotelling_two_sample(&x, &y).unwrap()
    });
    assert_calibrated("Hotelling two-sample", &p, true);
}

#[test]
fn linear_model_tests() {
    let xs: Vec<f64> = (0..30).map(|i| (i % 10) as f64).collect();
    let full = build_design(&[Variable::covariate("x", xs.clone())], &[&["x"]]).unwrap();
    let null = build_design(&[Variable::covariate("x", xs.clone())], &[]).unwrap();
    let e = normal(0.0, 3.0);
    let (mut wald, mut f) = (Vec::new(), Vec::new());
    let mut rng = RandomSource::new(24, 0);
    for _ in 0..REPS {
        let y: Vec<f64> = sample_n(&e, 30, &mut rng).iter().map(|v| v + 10.0).collect();
        let (fit0, fit1) = (ols_fit(&null, &y).unwrap(), ols_fit(&full, &y).unwrap());
        wald.push(wald_coef_test(&fit1, "x").unwrap().p_value);
        f.push(nested_f_test(&fit0, &fit1).unwrap().p_value);
    }
    assert_calibrated("Wald slope", &wald, true);
    assert_calibrated("nested F", &f, true);

    let groups: Vec<usize> = (0..64).map(|i| i % 3).collect();
    let p = null_p_values(25, |rng| anova_omnibus(&groups, &sample_n(&normal(50.0, 5.0), 64, rng)));
    assert_calibrated("one-way ANOVA", &p, true);

    let doses: Vec<f64> = (0..7).map(|i| 37.0 + i as f64).collect();
    let x1 = build_design(&[Variable::covariate("x", doses.clone())], &[&["x"]]).unwrap();
    let x0 = build_design(&[Variable::covariate("x", doses)], &[]).unwrap();
    let trials = vec![10.0; 7];
    let bin = Distribution::binomial(10, 0.4).unwrap();
    let p = null_p_values(26, |rng| {
        let y: Vec<f64> = (0..7).map(|_| powersim::probkit::sample(&bin, rng)).collect();
        glm_lrt(&glm_binomial_fit(&x0, &y, &trials).unwrap(), &glm_binomial_fit(&x1, &y, &trials).unwrap()).unwrap()
    });
    assert_calibrated("binomial LRT", &p, false);
}

fn anova_omnibus(groups: &[usize], y: &[f64]) -> TestResult {
    powersim::linmod::anova_oneway(groups, 3, y, None).unwrap().omnibus
}

#[test]
fn factor_spec_accepts_listing_contrasts() {
    let c = DMatrix::from_row_slice(3, 2, &[-1.0, 0.0, 0.5, -1.0, 0.5, 1.0]);
    assert!(FactorSpec::numbered("grp", 3).unwrap().with_contrasts(c).unwrap().is_orthogonal());
}

/// Samples on a 1/8 grid: sums, shifts by integers and power-of-two scalings
/// are exact in binary floating point, so invariances hold bit for bit.
fn dyadic(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-800i32..800).prop_map(|v| v as f64 / 8.0), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn location_shift_invariance(x in dyadic(3..30), c in -1000i32..1000, mu in -50i32..50) {
        let (c, mu) = (c as f64, mu as f64);
        let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
        let t0 = t_test_one_sample(&x, mu);
        let t1 = t_test_one_sample(&shifted, mu + c);
        prop_assert_eq!(t0.p_value.to_bits(), t1.p_value.to_bits());
        let w0 = wilcoxon_signed_rank(&x, mu);
        let w1 = wilcoxon_signed_rank(&shifted, mu + c);
        prop_assert_eq!(w0.p_value.to_bits(), w1.p_value.to_bits());
        let s0 = sign_test(&x, mu);
        let s1 = sign_test(&shifted, mu + c);
        prop_assert_eq!(s0.p_value.to_bits(), s1.p_value.to_bits());
    }

    #[test]
    fn variance_scale_invariance(x in dyadic(2..40), k in -4i32..5, s in 1i32..40) {
        let c = 2f64.powi(k);
        let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
        let s2 = s as f64;
        let a = variance_chisq_test(&x, s2).unwrap();
        let b = variance_chisq_test(&scaled, s2 * c * c).unwrap();
        prop_assert_eq!(a.p_value.to_bits(), b.p_value.to_bits());
    }

    #[test]
    fn two_sample_swaps(x in dyadic(2..20), y in dyadic(2..20)) {
        let f = (var_ratio_f_test(&x, &y), var_ratio_f_test(&y, &x));
        if f.0.valid && f.1.valid {
            prop_assert!((f.0.p_value - f.1.p_value).abs() <= 1e-12);
        }
        let w = (wilcoxon_rank_sum(&x, &y), wilcoxon_rank_sum(&y, &x));
        prop_assert!((w.0.p_value - w.1.p_value).abs() <= 1e-12);
        for kind in [TTestKind::Pooled, TTestKind::Welch] {
            let t = (t_test_two_sample(&x, &y, kind), t_test_two_sample(&y, &x, kind));
            prop_assert_eq!(t.0.valid, t.1.valid);
            if t.0.valid {
                prop_assert!((t.0.p_value - t.1.p_value).abs() <= 1e-12);
                prop_assert_eq!(t.0.statistic, -t.1.statistic);
            }
        }
    }

    #[test]
    fn p_values_are_probabilities(x in dyadic(1..30), y in dyadic(1..30), mu in -100i32..100) {
        let mu = mu as f64;
        let results = [
            t_test_one_sample(&x, mu),
            sign_test(&x, mu),
            wilcoxon_signed_rank(&x, mu),
            wilcoxon_rank_sum(&x, &y),
            t_test_two_sample(&x, &y, TTestKind::Pooled),
            t_test_two_sample(&x, &y, TTestKind::Welch),
            var_ratio_f_test(&x, &y),
            z_test_one_sample(&x, mu, 3.0).unwrap(),
            ks_test_one_sample(&x, &Distribution::normal(0.0, 30.0).unwrap()).unwrap(),
        ];
        for r in results {
            if r.valid {
                prop_assert!((0.0..=1.0).contains(&r.p_value), "{:?}", r);
            } else {
                prop_assert_eq!(r.p_value, 1.0);
                prop_assert!(r.note.is_some());
            }
        }
    }

    #[test]
    fn welch_df_is_bounded(x in dyadic(2..25), y in dyadic(2..25)) {
        let r = t_test_two_sample(&x, &y, TTestKind::Welch);
        if let (true, Some(Df::One(df))) = (r.valid, r.df) {
            let lo = (x.len().min(y.len()) - 1) as f64;
            let hi = (x.len() + y.len() - 2) as f64;
            prop_assert!(df >= lo - 1e-9 && df <= hi + 1e-9, "df {} outside [{}, {}]", df, lo, hi);
        }
    }
}
