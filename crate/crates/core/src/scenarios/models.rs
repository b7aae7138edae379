use nalgebra::DMatrix;

use super::{Dataset, Scenario};
use crate::error::{Error, Result};
use crate::linmod::{
    anova_oneway, anova_strata, build_design, glm_binomial_fit, glm_lrt, nested_f_test, ols_fit, wald_coef_test,
    FactorSpec, StrataLayout, Variable,
};
use crate::probkit::{sample, sample_multinomial, sample_mvnormal, std_normal, CovarianceMatrix, Distribution, RandomSource};
use crate::testkit::{
    binom_exact_test, bin_continuous, chisq_contingency, chisq_gof, cor_test, hotelling_one_sample, hotelling_two_sample,
    ks_test_one_sample, model_probs_for, paired_t_test, prop_score_test, randomization_test_paired,
    randomization_test_unpaired, sign_test, t_test_one_sample, t_test_two_sample, var_ratio_f_test, variance_chisq_test,
    wilcoxon_rank_sum, wilcoxon_signed_rank, z_test_one_sample, z_test_two_sample, ContingencyTable, TTestKind,
    TestResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Model {
    BinomExact,
    BinomApprox,
    ZOneSample,
    TOneSample,
    Variance,
    Sign,
    WilcoxonSigned,
    GofMultinomial,
    GofNormalKnown,
    GofLognormalEstimated,
    KsNormal,
    ZTwoSample,
    TPooled,
    TWelch,
    VarRatio,
    RankSum,
    RandomizationUnpaired,
    PairedTBivariate,
    PairedTDifferences,
    PairedWilcoxon,
    RandomizationPaired,
    ChisqHomogeneity,
    ChisqIndependenceMultinomial,
    ChisqIndependenceLatent,
    Correlation,
    RegressionSimpleWald,
    RegressionSimpleF,
    RegressionMultiple,
    RegressionBinomial,
    AnovaOnewayFixed,
    AnovaOnewayContrast,
    AnovaOnewayRandom,
    AnovaTwowayFixed,
    AnovaTwowayRandom,
    AnovaRmOneFactor,
    AnovaRmTwoFactor,
    Ancova,
    MvOneSample,
    MvTwoSample,
    MvPaired,
}

const DOSES: [f64; 5] = [0.0, 2.0, 4.0, 6.0, 8.0];
const AGES: [f64; 3] = [30.0, 50.0, 80.0];
const INTENSITIES: [f64; 7] = [37.0, 38.0, 39.0, 40.0, 41.0, 42.0, 43.0];
const ITEMS: usize = 10;
const ORDERS: usize = 6;
const ADMINS: usize = 8;

/// Breakpoints 80, 85, …, 120 of the categorized intelligence scores.
fn score_breaks() -> Vec<f64> {
    (0..=8).map(|i| 80.0 + 5.0 * i as f64).collect()
}

fn normals(n: usize, mean: f64, sd: f64, rng: &mut RandomSource) -> Vec<f64> {
    (0..n).map(|_| mean + sd * std_normal(rng)).collect()
}

fn log_normals(n: usize, meanlog: f64, sdlog: f64, rng: &mut RandomSource) -> Vec<f64> {
    (0..n).map(|_| (meanlog + sdlog * std_normal(rng)).exp()).collect()
}

fn bivariate(n: usize, mu: [f64; 2], s: f64, r: f64, rng: &mut RandomSource) -> Result<(Vec<f64>, Vec<f64>)> {
    let c = s * s * r;
    let cov = CovarianceMatrix::new(DMatrix::from_row_slice(2, 2, &[s * s, c, c, s * s]))?;
    let m = sample_mvnormal(n, &mu, &cov, rng)?;
    Ok((m.column(0).iter().copied().collect(), m.column(1).iter().copied().collect()))
}

fn probability(p: f64, what: &str) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::param(format!("{what} = {p} is not a probability")))
    }
}

/// Codes from equal-width bins over the sample range, widened by 0.1% of
/// the range at both ends as R's `cut(x, breaks = k)` does; bins are
/// right-closed.
pub fn latent_cut(x: &[f64], k: usize) -> Vec<usize> {
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / k as f64;
    let inner: Vec<f64> = (1..k).map(|i| lo + width * i as f64).collect();
    x.iter().map(|&v| inner.partition_point(|&b| b < v)).collect()
}

fn factor(name: &str, k: usize, codes: Vec<usize>) -> Result<Variable> {
    Variable::factor(FactorSpec::numbered(name, k)?, codes)
}

fn codes_of(vars: &[Variable]) -> Vec<Vec<usize>> {
    vars.iter()
        .filter_map(|v| match v {
            Variable::Factor { codes, .. } => Some(codes.clone()),
            Variable::Covariate { .. } => None,
        })
        .collect()
}

fn mv_vec(s: &Scenario, prefix: &str, k: usize) -> Vec<f64> {
    (1..=k).map(|i| s.get(&format!("{prefix}{i}"))).collect()
}

pub(super) fn generate(s: &Scenario, n: usize, rng: &mut RandomSource) -> Result<Dataset> {
    let g = |k: &str| s.get(k);
    Ok(match s.model {
        Model::BinomExact | Model::BinomApprox => {
            let p = probability(g("p0") + g("effect"), "p0 + effect")?;
            let x = sample(&Distribution::binomial(n as u64, p)?, rng) as u64;
            Dataset::Count { successes: x, trials: n as u64 }
        }
        Model::ZOneSample | Model::TOneSample => Dataset::Sample(normals(n, g("mu0") + g("effect"), g("sigma"), rng)),
        Model::Variance => {
            let sd = g("sigma0") + g("effect");
            if !(sd > 0.0) {
                return Err(Error::param(format!("sigma0 + effect = {sd} must be positive")));
            }
            Dataset::Sample(normals(n, g("mu"), sd, rng))
        }
        Model::Sign => {
            let median = g("median0") + g("effect");
            if !(median > 0.0) {
                return Err(Error::param(format!("median0 + effect = {median} must be positive")));
            }
            Dataset::Sample(log_normals(n, median.ln(), g("sdlog"), rng))
        }
        Model::WilcoxonSigned => {
            let (c, h) = (g("mu0") + g("effect"), g("half_width"));
            Dataset::Sample((0..n).map(|_| c - h + 2.0 * h * rng.uniform()).collect())
        }
        Model::GofMultinomial => {
            let last = g("p_last");
            let mut probs = vec![(1.0 - last) / 5.0; 5];
            probs.push(last);
            Dataset::Counts(sample_multinomial(n as u64, &probs, rng)?)
        }
        Model::GofNormalKnown | Model::KsNormal => Dataset::Sample(normals(n, g("mean"), g("sd"), rng)),
        Model::GofLognormalEstimated => {
            // log-normal with the stated mean; the null variant draws a
            // normal with the same mean and variance
            let (mean, sdlog) = (g("mean"), g("sdlog"));
            if g("lognormal") >= 0.5 {
                Dataset::Sample(log_normals(n, mean.ln() - sdlog * sdlog / 2.0, sdlog, rng))
            } else {
                let sd = mean * (sdlog * sdlog).exp_m1().sqrt();
                Dataset::Sample(normals(n, mean, sd, rng))
            }
        }
        Model::ZTwoSample => {
            let m = s.group_size("m", n)?;
            let x = normals(n, g("mu") + g("effect"), g("sigma_x"), rng);
            Dataset::TwoSamples(x, normals(m, g("mu"), g("sigma_y"), rng))
        }
        Model::TPooled | Model::TWelch => {
            let m = s.group_size("m", n)?;
            let x = normals(n, g("mu") + g("effect"), g("sigma"), rng);
            Dataset::TwoSamples(x, normals(m, g("mu"), g("sigma"), rng))
        }
        Model::VarRatio => {
            let m = s.group_size("m", n)?;
            let x = normals(n, g("mu"), g("sigma_y") * g("ratio").sqrt(), rng);
            Dataset::TwoSamples(x, normals(m, g("mu"), g("sigma_y"), rng))
        }
        Model::RankSum => {
            let m = s.group_size("m", n)?;
            let mx = g("median_y") + g("effect");
            if !(mx > 0.0) {
                return Err(Error::param(format!("median_y + effect = {mx} must be positive")));
            }
            let x = log_normals(n, mx.ln(), g("sdlog"), rng);
            Dataset::TwoSamples(x, log_normals(m, g("median_y").ln(), g("sdlog"), rng))
        }
        Model::RandomizationUnpaired => {
            let m = s.group_size("m", n)?;
            let x = normals(n, g("mu") + g("effect"), g("sigma"), rng);
            Dataset::TwoSamples(x, normals(m, g("mu"), g("sigma"), rng))
        }
        Model::PairedTBivariate | Model::PairedWilcoxon => {
            let (x, y) = bivariate(n, [g("mu") + g("effect"), g("mu")], g("s"), g("r"), rng)?;
            Dataset::Pairs(x, y)
        }
        Model::PairedTDifferences | Model::RandomizationPaired => {
            let s2 = g("s") * g("s");
            let sd = (2.0 * s2 - 2.0 * g("r") * s2).sqrt();
            Dataset::Sample(normals(n, g("effect"), sd, rng))
        }
        Model::ChisqHomogeneity => {
            let n2 = s.group_size("n2", n)?;
            let p1 = mv_vec(s, "p1_", 5);
            let p2: Vec<f64> = mv_vec(s, "p2_", 5).iter().zip(&p1).map(|(b, a)| a + g("deviation") * (b - a)).collect();
            let r1 = sample_multinomial(n as u64, &p1, rng)?;
            let r2 = sample_multinomial(n2 as u64, &p2, rng)?;
            Dataset::Table(ContingencyTable::from_rows(&[r1, r2])?)
        }
        Model::ChisqIndependenceMultinomial => {
            // cells in expand.grid order: the row index varies fastest
            let joint = [g("p11"), g("p21"), g("p12"), g("p22"), g("p13"), g("p23")];
            let rows = [joint[0] + joint[2] + joint[4], joint[1] + joint[3] + joint[5]];
            let cols = [joint[0] + joint[1], joint[2] + joint[3], joint[4] + joint[5]];
            let probs: Vec<f64> = joint
                .iter()
                .enumerate()
                .map(|(i, &p)| {
                    let indep = rows[i % 2] * cols[i / 2];
                    indep + g("deviation") * (p - indep)
                })
                .collect();
            let x = sample_multinomial(n as u64, &probs, rng)?;
            let cells = (0..2).flat_map(|r| (0..3).map(move |c| (r, c))).map(|(r, c)| x[r + 2 * c]).collect();
            Dataset::Table(ContingencyTable::new(2, 3, cells)?)
        }
        Model::ChisqIndependenceLatent => {
            let (x, y) = bivariate(n, [0.0, 0.0], 1.0, g("rho"), rng)?;
            let (kr, kc) = (g("row_bins") as usize, g("col_bins") as usize);
            Dataset::Table(ContingencyTable::tabulate(&latent_cut(&x, kr), &latent_cut(&y, kc), kr, kc)?)
        }
        Model::Correlation => {
            let (x, y) = bivariate(n, [g("mu"), g("mu")], g("s"), g("rho"), rng)?;
            Dataset::Pairs(x, y)
        }
        Model::RegressionSimpleWald | Model::RegressionSimpleF => {
            let x: Vec<f64> = DOSES.iter().flat_map(|&d| std::iter::repeat_n(d, n / 5)).collect();
            let y = x.iter().map(|&xi| g("intercept") + g("slope") * xi + g("sigma") * std_normal(rng)).collect();
            Dataset::Linear { vars: vec![Variable::covariate("x", x)], y }
        }
        Model::RegressionMultiple => {
            let per = n / 15;
            let x1: Vec<f64> = AGES.iter().flat_map(|_| DOSES.iter().flat_map(|&d| std::iter::repeat_n(d, per))).collect();
            let x2: Vec<f64> = AGES.iter().flat_map(|&a| std::iter::repeat_n(a, n / 3)).collect();
            let y = x1
                .iter()
                .zip(&x2)
                .map(|(&a, &b)| g("b0") + g("b1") * a + g("b2") * b + g("sigma") * std_normal(rng))
                .collect();
            Dataset::Linear { vars: vec![Variable::covariate("x1", x1), Variable::covariate("x2", x2)], y }
        }
        Model::RegressionBinomial => {
            let size = (n / 7) as u64;
            let slope = g("odds_ratio").ln();
            let mut successes = Vec::with_capacity(7);
            for &x in &INTENSITIES {
                let p = 1.0 / (1.0 + (-slope * (x - g("center"))).exp());
                successes.push(sample(&Distribution::binomial(size, p)?, rng));
            }
            Dataset::Binomial { x: INTENSITIES.to_vec(), successes, trials: vec![size as f64; 7] }
        }
        Model::AnovaOnewayFixed => {
            let sizes = [n, s.group_size("n2", n)?, s.group_size("n3", n)?];
            let effects = [0.0, g("a2"), g("a3")];
            let codes: Vec<usize> = sizes.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k)).collect();
            let y = codes.iter().map(|&c| g("mu") + effects[c] + g("sigma") * std_normal(rng)).collect();
            Dataset::Linear { vars: vec![factor("grp", 3, codes)?], y }
        }
        Model::AnovaOnewayContrast => {
            let effects = [0.0, g("a2"), g("a3")];
            let codes: Vec<usize> = (0..n).map(|i| i / (n / 3)).collect();
            let y = codes.iter().map(|&c| g("mu") + effects[c] + g("sigma") * std_normal(rng)).collect();
            Dataset::Linear { vars: vec![factor("grp", 3, codes)?], y }
        }
        Model::AnovaOnewayRandom => {
            let a = normals(ITEMS, 0.0, g("sigma_a"), rng);
            let codes: Vec<usize> = (0..n).map(|i| i % ITEMS).collect();
            let y = codes.iter().map(|&c| g("mu") + a[c] + g("sigma") * std_normal(rng)).collect();
            Dataset::Linear { vars: vec![factor("item", ITEMS, codes)?], y }
        }
        Model::AnovaTwowayFixed => {
            let a: Vec<usize> = (0..n).map(|i| i / (n / 2)).collect();
            let b: Vec<usize> = (0..n).map(|i| (i / (n / 4)) % 2).collect();
            let y = a
                .iter()
                .zip(&b)
                .map(|(&ai, &bi)| {
                    let (ai, bi) = (ai as f64, bi as f64);
                    g("mu") + g("a2") * ai + g("b2") * bi + g("ab22") * ai * bi + g("sigma") * std_normal(rng)
                })
                .collect();
            Dataset::Linear { vars: vec![factor("A", 2, a)?, factor("B", 2, b)?], y }
        }
        Model::AnovaTwowayRandom => {
            let k = n / (ORDERS * ADMINS);
            let ea = normals(ORDERS, 0.0, g("sigma_a"), rng);
            let eb = normals(ADMINS, 0.0, g("sigma_b"), rng);
            let eab = normals(ORDERS * ADMINS, 0.0, g("sigma_ab"), rng);
            let order: Vec<usize> = (0..n).map(|i| (i % (ORDERS * k)) / k).collect();
            let admin: Vec<usize> = (0..n).map(|i| i / (ORDERS * k)).collect();
            let y = order
                .iter()
                .zip(&admin)
                .map(|(&o, &a)| g("mu") + ea[o] + eb[a] + eab[o + ORDERS * a] + g("sigma") * std_normal(rng))
                .collect();
            Dataset::Linear { vars: vec![factor("order", ORDERS, order)?, factor("admin", ADMINS, admin)?], y }
        }
        Model::AnovaRmOneFactor => {
            let beta = [0.0, g("b2"), g("b3"), g("b4")];
            let p = normals(n, 0.0, g("sigma_p"), rng);
            let shape: Vec<usize> = (0..4 * n).map(|i| i % 4).collect();
            let subj: Vec<usize> = (0..4 * n).map(|i| i / 4).collect();
            let y = shape
                .iter()
                .zip(&subj)
                .map(|(&b, &j)| g("mu") + beta[b] + p[j] + g("sigma") * std_normal(rng))
                .collect();
            Dataset::Linear { vars: vec![factor("shape", 4, shape)?, factor("subj", n, subj)?], y }
        }
        Model::AnovaRmTwoFactor => {
            let p = normals(n, 0.0, g("sigma_p"), rng);
            let pa = normals(2 * n, 0.0, g("sigma_pa"), rng);
            let pb = normals(2 * n, 0.0, g("sigma_pb"), rng);
            let a: Vec<usize> = (0..4 * n).map(|i| i % 2).collect();
            let b: Vec<usize> = (0..4 * n).map(|i| (i / 2) % 2).collect();
            let subj: Vec<usize> = (0..4 * n).map(|i| i / 4).collect();
            let y = (0..4 * n)
                .map(|i| {
                    let (ai, bi, j) = (a[i], b[i], subj[i]);
                    let fixed = g("mu") + g("a2") * ai as f64 + g("b2") * bi as f64 + g("ab22") * (ai * bi) as f64;
                    fixed + p[j] + pa[2 * j + ai] + pb[2 * j + bi] + g("sigma") * std_normal(rng)
                })
                .collect();
            Dataset::Linear { vars: vec![factor("A", 2, a)?, factor("B", 2, b)?, factor("subj", n, subj)?], y }
        }
        Model::Ancova => {
            let pre = normals(n, g("pre_mean"), g("pre_sd"), rng);
            let effects = [0.0, g("a2"), g("a3")];
            let grp: Vec<usize> = (0..n).map(|i| i / (n / 3)).collect();
            let y = pre
                .iter()
                .zip(&grp)
                .map(|(&x, &c)| g("mu") + g("b") * x + effects[c] + g("sigma") * std_normal(rng))
                .collect();
            Dataset::Linear { vars: vec![Variable::covariate("pre", pre), factor("grp", 3, grp)?], y }
        }
        Model::MvOneSample => {
            let mu: Vec<f64> = mv_vec(s, "mu0_", 4).iter().zip(mv_vec(s, "delta_", 4)).map(|(a, d)| a + d).collect();
            let mut r = DMatrix::identity(4, 4);
            for (i, j) in [(1, 0), (2, 0), (3, 0), (2, 1), (3, 1), (3, 2)] {
                let v = g(&format!("r{}{}", i + 1, j + 1));
                r[(i, j)] = v;
                r[(j, i)] = v;
            }
            let cov = CovarianceMatrix::from_sd_corr(&mv_vec(s, "sd_", 4), &r)?;
            Dataset::Multivariate(sample_mvnormal(n, &mu, &cov, rng)?)
        }
        Model::MvTwoSample => {
            let sd = mv_vec(s, "sd_", 3);
            let r = DMatrix::from_fn(3, 3, |i, j| if i == j { 1.0 } else { g("r") });
            let cov = CovarianceMatrix::from_sd_corr(&sd, &r)?;
            let base = mv_vec(s, "mu_", 3);
            let shifted: Vec<f64> = base.iter().zip(mv_vec(s, "delta_", 3)).map(|(a, d)| a + d).collect();
            let x = sample_mvnormal(n, &shifted, &cov, rng)?;
            Dataset::TwoMultivariate(x, sample_mvnormal(n, &base, &cov, rng)?)
        }
        Model::MvPaired => {
            let cov = CovarianceMatrix::new(paired_difference_cov(g("s"), g("r_within"), g("r_between")))?;
            Dataset::Multivariate(sample_mvnormal(n, &mv_vec(s, "delta_", 3), &cov, rng)?)
        }
    })
}

/// Covariance of before−after differences of three measures with common
/// sd `s`: correlation `r_within` among measures on one occasion and
/// `r_between` for any pair across occasions.
pub(super) fn paired_difference_cov(s: f64, r_within: f64, r_between: f64) -> DMatrix<f64> {
    let r = DMatrix::from_fn(6, 6, |i, j| {
        if i == j {
            1.0
        } else if i / 3 == j / 3 {
            r_within
        } else {
            r_between
        }
    });
    let full = r * (s * s);
    let c = DMatrix::from_fn(3, 6, |i, j| if j == i { 1.0 } else if j == i + 3 { -1.0 } else { 0.0 });
    &c * full * c.transpose()
}

fn mismatch(s: &Scenario) -> Error {
    Error::design(format!("dataset shape does not match scenario '{}'", s.id))
}

pub(super) fn analyze(s: &Scenario, data: &Dataset, rng: &mut RandomSource) -> Result<TestResult> {
    let g = |k: &str| s.get(k);
    let inner = || g("inner_reps") as usize;
    match (s.model, data) {
        (Model::BinomExact, Dataset::Count { successes, trials }) => binom_exact_test(*successes, *trials, g("p0")),
        (Model::BinomApprox, Dataset::Count { successes, trials }) => prop_score_test(*successes, *trials, g("p0")),
        (Model::ZOneSample, Dataset::Sample(x)) => z_test_one_sample(x, g("mu0"), g("sigma")),
        (Model::TOneSample, Dataset::Sample(x)) => Ok(t_test_one_sample(x, g("mu0"))),
        (Model::Variance, Dataset::Sample(x)) => variance_chisq_test(x, g("sigma0") * g("sigma0")),
        (Model::Sign, Dataset::Sample(x)) => Ok(sign_test(x, g("median0"))),
        (Model::WilcoxonSigned, Dataset::Sample(x)) => Ok(wilcoxon_signed_rank(x, g("mu0"))),
        (Model::GofMultinomial, Dataset::Counts(c)) => chisq_gof(c, &[1.0 / 6.0; 6], 0),
        (Model::GofNormalKnown, Dataset::Sample(x)) => {
            let breaks = score_breaks();
            let probs = model_probs_for(&Distribution::normal(g("mean"), g("sd0"))?, &breaks)?;
            chisq_gof(&bin_continuous(x, &breaks)?, &probs, 0)
        }
        (Model::GofLognormalEstimated, Dataset::Sample(x)) => {
            let sd = crate::testkit::variance(x).sqrt();
            if !(sd > 0.0) {
                return Ok(TestResult::invalid("sample has zero variance"));
            }
            let breaks = score_breaks();
            let probs = model_probs_for(&Distribution::normal(crate::testkit::mean(x), sd)?, &breaks)?;
            chisq_gof(&bin_continuous(x, &breaks)?, &probs, g("df_correction") as usize)
        }
        (Model::KsNormal, Dataset::Sample(x)) => ks_test_one_sample(x, &Distribution::normal(g("mean"), g("sd0"))?),
        (Model::ZTwoSample, Dataset::TwoSamples(x, y)) => z_test_two_sample(x, y, g("sigma_x"), g("sigma_y")),
        (Model::TPooled, Dataset::TwoSamples(x, y)) => Ok(t_test_two_sample(x, y, TTestKind::Pooled)),
        (Model::TWelch, Dataset::TwoSamples(x, y)) => Ok(t_test_two_sample(x, y, TTestKind::Welch)),
        (Model::VarRatio, Dataset::TwoSamples(x, y)) => Ok(var_ratio_f_test(x, y)),
        (Model::RankSum, Dataset::TwoSamples(x, y)) => Ok(wilcoxon_rank_sum(x, y)),
        (Model::RandomizationUnpaired, Dataset::TwoSamples(x, y)) => randomization_test_unpaired(x, y, inner(), rng),
        (Model::PairedTBivariate, Dataset::Pairs(x, y)) => Ok(paired_t_test(x, y)),
        (Model::PairedWilcoxon, Dataset::Pairs(x, y)) => {
            let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            Ok(wilcoxon_signed_rank(&d, 0.0))
        }
        (Model::PairedTDifferences, Dataset::Sample(d)) => Ok(t_test_one_sample(d, 0.0)),
        (Model::RandomizationPaired, Dataset::Sample(d)) => randomization_test_paired(d, inner(), rng),
        (
            Model::ChisqHomogeneity | Model::ChisqIndependenceMultinomial | Model::ChisqIndependenceLatent,
            Dataset::Table(t),
        ) => Ok(chisq_contingency(t)),
        (Model::Correlation, Dataset::Pairs(x, y)) => cor_test(x, y, g("rho0")),
        (Model::RegressionSimpleWald, Dataset::Linear { vars, y }) => {
            wald_coef_test(&ols_fit(&build_design(vars, &[&["x"]])?, y)?, "x")
        }
        (Model::RegressionSimpleF, Dataset::Linear { vars, y }) => {
            let null = ols_fit(&build_design(vars, &[])?, y)?;
            nested_f_test(&null, &ols_fit(&build_design(vars, &[&["x"]])?, y)?)
        }
        (Model::RegressionMultiple, Dataset::Linear { vars, y }) => {
            let null = ols_fit(&build_design(vars, &[])?, y)?;
            nested_f_test(&null, &ols_fit(&build_design(vars, &[&["x1"], &["x2"]])?, y)?)
        }
        (Model::RegressionBinomial, Dataset::Binomial { x, successes, trials }) => {
            let vars = [Variable::covariate("x", x.clone())];
            let null = glm_binomial_fit(&build_design(&vars, &[])?, successes, trials)?;
            glm_lrt(&null, &glm_binomial_fit(&build_design(&vars, &[&["x"]])?, successes, trials)?)
        }
        (Model::AnovaOnewayFixed, Dataset::Linear { vars, y }) => {
            Ok(anova_oneway(&codes_of(vars)[0], 3, y, None)?.omnibus)
        }
        (Model::AnovaOnewayContrast, Dataset::Linear { vars, y }) => {
            let c = DMatrix::from_row_slice(3, 2, &[-1.0, 0.0, 0.5, -1.0, 0.5, 1.0]);
            let fit = anova_oneway(&codes_of(vars)[0], 3, y, Some(&c))?;
            Ok(fit.contrasts[0].test.clone())
        }
        (Model::AnovaOnewayRandom, Dataset::Linear { vars, y }) => {
            let layout = StrataLayout::new(&[("item", ITEMS)], &[&["item"]], &[])?;
            anova_strata(&layout, &codes_of(vars), y)?.ratio_test("item", "Within")
        }
        (Model::AnovaTwowayFixed, Dataset::Linear { vars, y }) => {
            let layout = StrataLayout::new(&[("A", 2), ("B", 2)], &[], &[&["A"], &["B"], &["A", "B"]])?;
            strata_term(&layout, vars, y, "A:B")
        }
        (Model::AnovaTwowayRandom, Dataset::Linear { vars, y }) => {
            let layout = twoway_random_layout()?;
            anova_strata(&layout, &codes_of(vars), y)?.ratio_test("order:admin", "Within")
        }
        (Model::AnovaRmOneFactor, Dataset::Linear { vars, y }) => {
            let subjects = y.len() / 4;
            let layout = StrataLayout::new(&[("shape", 4), ("subj", subjects)], &[&["subj"]], &[&["shape"]])?;
            strata_term(&layout, vars, y, "shape")
        }
        (Model::AnovaRmTwoFactor, Dataset::Linear { vars, y }) => {
            let layout = rm_two_factor_layout(y.len() / 4)?;
            strata_term(&layout, vars, y, "A:B")
        }
        (Model::Ancova, Dataset::Linear { vars, y }) => {
            let null = ols_fit(&build_design(vars, &[&["pre"]])?, y)?;
            nested_f_test(&null, &ols_fit(&build_design(vars, &[&["pre"], &["grp"]])?, y)?)
        }
        (Model::MvOneSample, Dataset::Multivariate(x)) => hotelling_one_sample(x, &mv_vec(s, "mu0_", 4)),
        (Model::MvTwoSample, Dataset::TwoMultivariate(x, y)) => hotelling_two_sample(x, y),
        (Model::MvPaired, Dataset::Multivariate(d)) => hotelling_one_sample(d, &[0.0; 3]),
        _ => Err(mismatch(s)),
    }
}

pub(super) fn twoway_random_layout() -> Result<StrataLayout> {
    StrataLayout::new(&[("order", ORDERS), ("admin", ADMINS)], &[&["order"], &["admin"], &["order", "admin"]], &[])
}

pub(super) fn rm_two_factor_layout(subjects: usize) -> Result<StrataLayout> {
    StrataLayout::new(
        &[("A", 2), ("B", 2), ("subj", subjects)],
        &[&["subj"], &["subj", "A"], &["subj", "B"]],
        &[&["A"], &["B"], &["A", "B"]],
    )
}

fn strata_term(layout: &StrataLayout, vars: &[Variable], y: &[f64], term: &str) -> Result<TestResult> {
    let anova = anova_strata(layout, &codes_of(vars), y)?;
    anova
        .term_test(term)
        .cloned()
        .ok_or_else(|| Error::design(format!("term '{term}' missing from the ANOVA table")))
}
