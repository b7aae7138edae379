use super::models::Model;
use super::Bound::{self, *};
use super::{Effect, NullValue, ParamSpec, Scenario};

type P = (&'static str, f64, Bound);

fn zero(name: &'static str) -> (&'static str, NullValue) {
    (name, NullValue::Const(0.0))
}

#[allow(clippy::too_many_arguments)]
fn def(
    id: &'static str,
    title: &'static str,
    model: Model,
    default_n: usize,
    granularity: usize,
    min_n: usize,
    params: &[P],
    effects: &[(&'static str, NullValue)],
) -> Scenario {
    Scenario {
        id,
        title,
        model,
        default_n,
        granularity,
        min_n: min_n.div_ceil(granularity) * granularity,
        specs: params.iter().map(|&(name, _, bound)| ParamSpec { name, bound }).collect(),
        values: params.iter().map(|&(name, v, _)| (name.to_string(), v)).collect(),
        effects: effects.iter().map(|(name, null)| Effect { name, null: null.clone() }).collect(),
        null: false,
    }
}

const INNER: P = ("inner_reps", 800.0, Count);

pub fn catalog() -> Vec<Scenario> {
    let listening_one: &[P] = &[("mu0", 1000.0, Real), ("effect", 4.0, Real), ("sigma", 7.5, Positive)];
    let pairs: &[P] = &[("mu", 100.0, Real), ("effect", 5.0, Real), ("s", 15.0, Positive), ("r", 0.9, Correlation)];
    let two_t: &[P] = &[("m", 90.0, Count), ("mu", 1000.0, Real), ("effect", 4.0, Real), ("sigma", 10.0, Positive)];
    let simple_reg: &[P] = &[("intercept", 35.0, Real), ("slope", -2.5, Real), ("sigma", 14.0, Positive)];
    vec![
        // one-sample
        def(
            "binom-exact",
            "exact binomial test of a proportion",
            Model::BinomExact,
            9000,
            1,
            1,
            &[("p0", 0.5, Probability), ("effect", 0.015, Real)],
            &[zero("effect")],
        ),
        def(
            "binom-approx",
            "approximate (score) test of a proportion",
            Model::BinomApprox,
            9000,
            1,
            1,
            &[("p0", 0.5, Probability), ("effect", 0.015, Real)],
            &[zero("effect")],
        ),
        def("z-one-sample", "one-sample z test, variance known", Model::ZOneSample, 30, 1, 1, listening_one, &[zero("effect")]),
        def("t-one-sample", "one-sample t test", Model::TOneSample, 30, 1, 2, listening_one, &[zero("effect")]),
        def(
            "variance",
            "chi-square test of a variance",
            Model::Variance,
            50,
            1,
            2,
            &[("mu", 1000.0, Real), ("sigma0", 7.5, Positive), ("effect", 2.5, Real)],
            &[zero("effect")],
        ),
        def(
            "sign",
            "sign test of a median, log-normal data",
            Model::Sign,
            75,
            1,
            1,
            &[("median0", 100.0, Positive), ("effect", 30.0, Real), ("sdlog", 0.6, Positive)],
            &[zero("effect")],
        ),
        def(
            "wilcoxon-signed",
            "Wilcoxon signed-rank test, uniform data",
            Model::WilcoxonSigned,
            32,
            1,
            1,
            &[("mu0", 100.0, Real), ("effect", 25.0, Real), ("half_width", 75.0, Positive)],
            &[zero("effect")],
        ),
        def(
            "gof-multinomial",
            "chi-square goodness of fit of a die",
            Model::GofMultinomial,
            300,
            1,
            1,
            &[("p_last", 0.25, Probability)],
            &[("p_last", NullValue::Const(1.0 / 6.0))],
        ),
        def(
            "gof-normal-known",
            "chi-square goodness of fit of a fully specified normal",
            Model::GofNormalKnown,
            140,
            1,
            1,
            &[("mean", 100.0, Real), ("sd0", 15.0, Positive), ("sd", 20.0, Positive)],
            &[("sd", NullValue::Param("sd0"))],
        ),
        def(
            "gof-lognormal-estimated",
            "chi-square goodness of fit of a normal with estimated parameters",
            Model::GofLognormalEstimated,
            850,
            1,
            3,
            &[("mean", 100.0, Positive), ("sdlog", 0.25, Positive), ("lognormal", 1.0, Probability), ("df_correction", 2.0, NonNegative)],
            &[zero("lognormal")],
        ),
        def(
            "ks-normal",
            "Kolmogorov-Smirnov test of a fully specified normal",
            Model::KsNormal,
            250,
            1,
            1,
            &[("mean", 100.0, Real), ("sd0", 15.0, Positive), ("sd", 20.0, Positive)],
            &[("sd", NullValue::Param("sd0"))],
        ),
        // two independent samples
        def(
            "z-two-sample",
            "two-sample z test, variances known",
            Model::ZTwoSample,
            85,
            1,
            2,
            &[("m", 70.0, Count), ("mu", 1000.0, Real), ("effect", 4.0, Real), ("sigma_x", 7.0, Positive), ("sigma_y", 10.0, Positive)],
            &[zero("effect")],
        ),
        def("t-pooled", "two-sample t test, pooled variance", Model::TPooled, 115, 1, 2, two_t, &[zero("effect")]),
        def("t-welch", "Welch two-sample t test", Model::TWelch, 115, 1, 2, two_t, &[zero("effect")]),
        def(
            "var-ratio",
            "F test of a variance ratio",
            Model::VarRatio,
            45,
            1,
            2,
            &[("m", 40.0, Count), ("mu", 1000.0, Real), ("sigma_y", 7.0, Positive), ("ratio", 2.5, Positive)],
            &[("ratio", NullValue::Const(1.0))],
        ),
        def(
            "rank-sum",
            "Wilcoxon rank-sum test, log-normal data",
            Model::RankSum,
            60,
            1,
            1,
            &[("m", 50.0, Count), ("median_y", 100.0, Positive), ("effect", 40.0, Real), ("sdlog", 0.6, Positive)],
            &[zero("effect")],
        ),
        def(
            "randomization-unpaired",
            "two-sample randomization test",
            Model::RandomizationUnpaired,
            40,
            1,
            2,
            &[("m", 35.0, Count), ("mu", 1000.0, Real), ("effect", 4.0, Real), ("sigma", 5.0, Positive), INNER],
            &[zero("effect")],
        ),
        // paired samples
        def("paired-t-bivariate", "paired t test, bivariate normal pairs", Model::PairedTBivariate, 18, 1, 2, pairs, &[zero("effect")]),
        def("paired-t-differences", "paired t test, normal differences", Model::PairedTDifferences, 18, 1, 2, pairs, &[zero("effect")]),
        def("paired-wilcoxon", "paired Wilcoxon signed-rank test", Model::PairedWilcoxon, 18, 1, 1, pairs, &[zero("effect")]),
        def(
            "randomization-paired",
            "paired randomization test (sign flips)",
            Model::RandomizationPaired,
            18,
            1,
            2,
            &[("mu", 100.0, Real), ("effect", 5.0, Real), ("s", 15.0, Positive), ("r", 0.9, Correlation), INNER],
            &[zero("effect")],
        ),
        // association
        def(
            "chisq-homogeneity",
            "chi-square test of homogeneity, two courses",
            Model::ChisqHomogeneity,
            250,
            1,
            1,
            &[
                ("n2", 190.0, Count),
                ("p1_1", 0.09, Probability),
                ("p1_2", 0.25, Probability),
                ("p1_3", 0.32, Probability),
                ("p1_4", 0.25, Probability),
                ("p1_5", 0.09, Probability),
                ("p2_1", 0.16, Probability),
                ("p2_2", 0.22, Probability),
                ("p2_3", 0.24, Probability),
                ("p2_4", 0.22, Probability),
                ("p2_5", 0.16, Probability),
                ("deviation", 1.0, Real),
            ],
            &[zero("deviation")],
        ),
        def(
            "chisq-independence-multinomial",
            "chi-square test of independence, joint multinomial",
            Model::ChisqIndependenceMultinomial,
            90,
            1,
            1,
            &[
                ("p11", 0.10, Probability),
                ("p21", 0.23, Probability),
                ("p12", 0.17, Probability),
                ("p22", 0.17, Probability),
                ("p13", 0.23, Probability),
                ("p23", 0.10, Probability),
                ("deviation", 1.0, Real),
            ],
            &[zero("deviation")],
        ),
        def(
            "chisq-independence-latent",
            "chi-square test of independence, categorized latent normals",
            Model::ChisqIndependenceLatent,
            130,
            1,
            2,
            &[("rho", 0.4, Correlation), ("row_bins", 2.0, Count), ("col_bins", 3.0, Count)],
            &[zero("rho")],
        ),
        def(
            "cor-rho0-zero",
            "t test of zero correlation",
            Model::Correlation,
            90,
            1,
            3,
            &[("mu", 100.0, Real), ("s", 15.0, Positive), ("rho", 0.3, Correlation), ("rho0", 0.0, Correlation)],
            &[("rho", NullValue::Param("rho0"))],
        ),
        def(
            "cor-rho0-nonzero",
            "Fisher z test of a nonzero correlation",
            Model::Correlation,
            60,
            1,
            4,
            &[("mu", 100.0, Real), ("s", 15.0, Positive), ("rho", 0.3, Correlation), ("rho0", 0.6, Correlation)],
            &[("rho", NullValue::Param("rho0"))],
        ),
        // regression
        def(
            "regression-simple-wald",
            "simple regression, Wald t test of the slope",
            Model::RegressionSimpleWald,
            35,
            5,
            5,
            simple_reg,
            &[zero("slope")],
        ),
        def(
            "regression-simple-f",
            "simple regression, overall F test",
            Model::RegressionSimpleF,
            35,
            5,
            5,
            simple_reg,
            &[zero("slope")],
        ),
        def(
            "regression-multiple",
            "multiple regression, overall F test",
            Model::RegressionMultiple,
            30,
            15,
            15,
            &[("b0", 35.0, Real), ("b1", -2.5, Real), ("b2", 0.1, Real), ("sigma", 14.0, Positive)],
            &[zero("b1"), zero("b2")],
        ),
        def(
            "regression-binomial",
            "logistic regression, likelihood-ratio test",
            Model::RegressionBinomial,
            70,
            7,
            7,
            &[("odds_ratio", 1.5, Positive), ("center", 40.0, Real)],
            &[("odds_ratio", NullValue::Const(1.0))],
        ),
        // analysis of variance
        def(
            "anova-oneway-fixed",
            "one-way fixed-effects ANOVA",
            Model::AnovaOnewayFixed,
            22,
            1,
            2,
            &[("n2", 24.0, Count), ("n3", 18.0, Count), ("mu", 10.0, Real), ("a2", 2.0, Real), ("a3", -3.0, Real), ("sigma", 5.0, Positive)],
            &[zero("a2"), zero("a3")],
        ),
        def(
            "anova-oneway-contrast",
            "one-way ANOVA, planned contrast control vs treatments",
            Model::AnovaOnewayContrast,
            72,
            3,
            6,
            &[("mu", 10.0, Real), ("a2", 3.0, Real), ("a3", 4.5, Real), ("sigma", 5.0, Positive)],
            &[zero("a2"), zero("a3")],
        ),
        def(
            "anova-oneway-random",
            "one-way random-effects ANOVA (ten items)",
            Model::AnovaOnewayRandom,
            60,
            10,
            20,
            &[("mu", 120.0, Real), ("sigma_a", 10.0, NonNegative), ("sigma", 15.0, Positive)],
            &[zero("sigma_a")],
        ),
        def(
            "anova-twoway-fixed",
            "two-way fixed-effects ANOVA, interaction",
            Model::AnovaTwowayFixed,
            96,
            4,
            8,
            &[("mu", 30.0, Real), ("a2", 30.0, Real), ("b2", 5.0, Real), ("ab22", 12.0, Real), ("sigma", 10.0, Positive)],
            &[zero("ab22")],
        ),
        def(
            "anova-twoway-random",
            "two-way random-effects ANOVA, interaction variance",
            Model::AnovaTwowayRandom,
            192,
            48,
            96,
            &[
                ("mu", 50.0, Real),
                ("sigma_a", 5.0, NonNegative),
                ("sigma_b", 10.0, NonNegative),
                ("sigma_ab", 7.0, NonNegative),
                ("sigma", 13.0, Positive),
            ],
            &[zero("sigma_ab")],
        ),
        def(
            "anova-rm-one-factor",
            "repeated-measures ANOVA, one within-subject factor",
            Model::AnovaRmOneFactor,
            22,
            1,
            2,
            &[
                ("mu", 15.0, Real),
                ("b2", 2.0, Real),
                ("b3", 4.0, Real),
                ("b4", 6.0, Real),
                ("sigma_p", 3.0, NonNegative),
                ("sigma", 6.0, Positive),
            ],
            &[zero("b2"), zero("b3"), zero("b4")],
        ),
        def(
            "anova-rm-two-factor",
            "repeated-measures ANOVA, two within-subject factors, interaction",
            Model::AnovaRmTwoFactor,
            136,
            1,
            2,
            &[
                ("mu", 1500.0, Real),
                ("a2", 300.0, Real),
                ("b2", 200.0, Real),
                ("ab22", -150.0, Real),
                ("sigma_p", 100.0, NonNegative),
                ("sigma_pa", 50.0, NonNegative),
                ("sigma_pb", 80.0, NonNegative),
                ("sigma", 300.0, Positive),
            ],
            &[zero("ab22")],
        ),
        def(
            "ancova",
            "analysis of covariance, incremental F test of groups",
            Model::Ancova,
            84,
            3,
            6,
            &[
                ("pre_mean", 20.0, Real),
                ("pre_sd", 8.0, Positive),
                ("mu", 5.0, Real),
                ("b", 0.7, Real),
                ("a2", 0.5, Real),
                ("a3", 4.0, Real),
                ("sigma", 5.0, Positive),
            ],
            &[zero("a2"), zero("a3")],
        ),
        // multivariate
        def(
            "mv-one-sample",
            "Hotelling one-sample test, four subtests",
            Model::MvOneSample,
            30,
            1,
            5,
            &[
                ("mu0_1", 12.0, Real),
                ("mu0_2", 10.0, Real),
                ("mu0_3", 10.0, Real),
                ("mu0_4", 8.0, Real),
                ("delta_1", 0.5, Real),
                ("delta_2", -1.0, Real),
                ("delta_3", 1.0, Real),
                ("delta_4", 0.0, Real),
                ("sd_1", 3.5, Positive),
                ("sd_2", 3.5, Positive),
                ("sd_3", 3.5, Positive),
                ("sd_4", 2.0, Positive),
                ("r21", 0.7, Correlation),
                ("r31", 0.5, Correlation),
                ("r41", 0.3, Correlation),
                ("r32", 0.5, Correlation),
                ("r42", 0.1, Correlation),
                ("r43", 0.3, Correlation),
            ],
            &[zero("delta_1"), zero("delta_2"), zero("delta_3"), zero("delta_4")],
        ),
        def(
            "mv-two-sample",
            "Hotelling two-sample test, three patient measures",
            Model::MvTwoSample,
            50,
            1,
            3,
            &[
                ("mu_1", 45.0, Real),
                ("mu_2", 85.0, Real),
                ("mu_3", 200.0, Real),
                ("delta_1", 10.0, Real),
                ("delta_2", 5.0, Real),
                ("delta_3", 15.0, Real),
                ("sd_1", 15.0, Positive),
                ("sd_2", 15.0, Positive),
                ("sd_3", 44.0, Positive),
                ("r", 0.3, Correlation),
            ],
            &[zero("delta_1"), zero("delta_2"), zero("delta_3")],
        ),
        def(
            "mv-paired",
            "paired Hotelling test, three outcomes before/after",
            Model::MvPaired,
            25,
            1,
            4,
            &[
                ("delta_1", 0.5, Real),
                ("delta_2", -0.5, Real),
                ("delta_3", 0.7, Real),
                ("s", 2.0, Positive),
                ("r_within", 0.8, Correlation),
                ("r_between", 0.5, Correlation),
            ],
            &[zero("delta_1"), zero("delta_2"), zero("delta_3")],
        ),
    ]
}
