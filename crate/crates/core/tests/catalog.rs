//! The scenario catalog against a frozen fixture and against the sizes and
//! parameters each scenario is documented with.

use powersim::scenarios::{self, find};

#[test]
fn summaries_match_fixture() {
    let fixture: serde_json::Value = serde_json::from_str(include_str!("fixtures/catalog.json")).unwrap();
    let current: Vec<serde_json::Value> =
        scenarios::ids().iter().map(|id| serde_json::to_value(find(id).unwrap().summary()).unwrap()).collect();
    let fixture = fixture.as_array().unwrap();
    assert_eq!(fixture.len(), current.len());
    for (f, c) in fixture.iter().zip(&current) {
        assert_eq!(f, c, "catalog drifted for {}", c["id"]);
    }
}

#[test]
fn reference_sizes() {
    let printed = [
        ("binom-exact", 9000),
        ("binom-approx", 9000),
        ("z-one-sample", 30),
        ("t-one-sample", 30),
        ("variance", 50),
        ("sign", 75),
        ("wilcoxon-signed", 32),
        ("gof-multinomial", 300),
        ("gof-normal-known", 140),
        ("gof-lognormal-estimated", 850),
        ("ks-normal", 250),
        ("z-two-sample", 85),
        ("t-pooled", 115),
        ("var-ratio", 45),
        ("rank-sum", 60),
        ("randomization-unpaired", 40),
        ("paired-t-bivariate", 18),
        ("paired-t-differences", 18),
        ("paired-wilcoxon", 18),
        ("randomization-paired", 18),
        ("chisq-independence-multinomial", 90),
        ("chisq-independence-latent", 130),
        ("cor-rho0-zero", 90),
        ("cor-rho0-nonzero", 60),
        ("regression-simple-wald", 35),
        ("regression-simple-f", 35),
        ("regression-multiple", 30),
        ("regression-binomial", 70),
        ("anova-oneway-fixed", 22),
        ("anova-oneway-contrast", 72),
        ("anova-oneway-random", 60),
        ("anova-twoway-fixed", 96),
        ("anova-twoway-random", 192),
        ("anova-rm-one-factor", 22),
        ("anova-rm-two-factor", 136),
        ("ancova", 84),
        ("mv-one-sample", 30),
        ("mv-paired", 25),
    ];
    for (id, n) in printed {
        assert_eq!(find(id).unwrap().default_n(), n, "{id}");
    }
}

#[test]
fn reference_parameters() {
    let printed: &[(&str, &[(&str, f64)])] = &[
        ("binom-exact", &[("p0", 0.5), ("effect", 0.015)]),
        ("t-one-sample", &[("mu0", 1000.0), ("effect", 4.0), ("sigma", 7.5)]),
        ("variance", &[("sigma0", 7.5), ("effect", 2.5)]),
        ("sign", &[("median0", 100.0), ("effect", 30.0), ("sdlog", 0.6)]),
        ("z-two-sample", &[("m", 70.0), ("sigma_x", 7.0), ("sigma_y", 10.0)]),
        ("t-pooled", &[("m", 90.0), ("sigma", 10.0)]),
        ("var-ratio", &[("m", 40.0), ("ratio", 2.5), ("sigma_y", 7.0)]),
        ("rank-sum", &[("m", 50.0), ("effect", 40.0)]),
        ("randomization-unpaired", &[("m", 35.0), ("sigma", 5.0)]),
        ("paired-t-bivariate", &[("effect", 5.0), ("s", 15.0), ("r", 0.9)]),
        ("gof-lognormal-estimated", &[("sdlog", 0.25)]),
        ("regression-binomial", &[("odds_ratio", 1.5), ("center", 40.0)]),
        ("anova-rm-two-factor", &[("mu", 1500.0), ("a2", 300.0), ("b2", 200.0), ("ab22", -150.0), ("sigma", 300.0), ("sigma_pb", 80.0)]),
        ("ancova", &[("pre_mean", 20.0), ("pre_sd", 8.0)]),
        ("mv-paired", &[("delta_1", 0.5), ("delta_2", -0.5), ("delta_3", 0.7)]),
    ];
    for (id, params) in printed {
        let s = find(id).unwrap();
        for (name, v) in params.iter() {
            assert_eq!(s.param(name), Some(*v), "{id}.{name}");
        }
    }
    let homogeneity = find("chisq-homogeneity").unwrap();
    let p1: Vec<f64> = (1..=5).map(|j| homogeneity.param(&format!("p1_{j}")).unwrap()).collect();
    assert_eq!(p1, [0.09, 0.25, 0.32, 0.25, 0.09]);
}
