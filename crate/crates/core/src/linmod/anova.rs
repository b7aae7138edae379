use nalgebra::DMatrix;

use super::design::{build_design, FactorSpec, Variable};
use super::ols::ols_fit;
use crate::error::{Error, Result};
use crate::probkit::Distribution;
use crate::testkit::{Df, TestResult};

fn f_test(ms_num: f64, df1: f64, ms_den: f64, df2: f64) -> TestResult {
    if !(ms_den > 0.0) {
        return TestResult::invalid("zero error mean square");
    }
    let f = ms_num / ms_den;
    match (Distribution::FisherF { df1, df2 }).sf(f) {
        Ok(p) => TestResult::new(f, Some(Df::Two(df1, df2)), p),
        Err(e) => TestResult::invalid(e.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContrastTest {
    pub name: String,
    pub ss: f64,
    pub test: TestResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneWayAnova {
    pub ss_between: f64,
    pub df_between: usize,
    pub ss_within: f64,
    pub df_within: usize,
    pub omnibus: TestResult,
    /// One single-df test per contrast column, with sequential sums of
    /// squares (they add up to `ss_between`).
    pub contrasts: Vec<ContrastTest>,
}

/// One-way ANOVA of `y` on group codes `0..k`. With a contrast matrix, each
/// contrast column also gets its own single-df F test against the
/// within-group mean square.
pub fn anova_oneway(groups: &[usize], k: usize, y: &[f64], contrasts: Option<&DMatrix<f64>>) -> Result<OneWayAnova> {
    if k < 2 {
        return Err(Error::design("one-way ANOVA needs at least two groups"));
    }
    if groups.len() != y.len() {
        return Err(Error::param("group codes and response differ in length"));
    }
    let mut spec = FactorSpec::numbered("grp", k)?;
    if let Some(c) = contrasts {
        spec = spec.with_contrasts(c.clone())?;
    }
    let present = (0..k).filter(|g| groups.contains(g)).count();
    if present < k {
        return Err(Error::design(format!("only {present} of {k} groups have observations")));
    }
    let design = build_design(&[Variable::factor(spec, groups.to_vec())?], &[&["grp"]])?;
    let fit = ols_fit(&design, y)?;
    let ss_cols: Vec<f64> = fit.effects[1..k].iter().map(|e| e * e).collect();
    let ss_between: f64 = ss_cols.iter().sum();
    let (df_between, df_within) = (k - 1, fit.df_resid);
    let ms_within = fit.rss / df_within as f64;
    let omnibus = f_test(ss_between / df_between as f64, df_between as f64, ms_within, df_within as f64);
    let contrasts = match contrasts {
        None => Vec::new(),
        Some(_) => ss_cols
            .iter()
            .enumerate()
            .map(|(j, &ss)| ContrastTest {
                name: design.columns()[j + 1].clone(),
                ss,
                test: f_test(ss, 1.0, ms_within, df_within as f64),
            })
            .collect(),
    };
    Ok(OneWayAnova { ss_between, df_between, ss_within: fit.rss, df_within, omnibus, contrasts })
}

/// Factor set as a bit mask over the layout's factors.
type Subset = u32;

/// Error strata of a balanced, completely crossed design (every
/// combination of factor levels observed equally often).
///
/// Error terms are processed in order: each claims the factor subsets it
/// contains that no earlier term claimed. The `Within` stratum gets what is
/// left plus replicate variation. A fixed term is tested in the stratum
/// that claimed its factor set.
#[derive(Debug, Clone, PartialEq)]
pub struct StrataLayout {
    factors: Vec<(String, usize)>,
    errors: Vec<Subset>,
    fixed: Vec<Subset>,
}

impl StrataLayout {
    /// `factors` are (name, number of levels); error and fixed terms list
    /// factor names, e.g. `&[&["subj"], &["subj", "A"]]`.
    pub fn new(factors: &[(&str, usize)], error_terms: &[&[&str]], fixed_terms: &[&[&str]]) -> Result<Self> {
        if factors.is_empty() || factors.len() > 16 {
            return Err(Error::design("layout needs between 1 and 16 factors"));
        }
        if let Some((name, _)) = factors.iter().find(|(_, l)| *l < 2) {
            return Err(Error::design(format!("factor '{name}' needs at least two levels")));
        }
        let factors: Vec<(String, usize)> = factors.iter().map(|(n, l)| (n.to_string(), *l)).collect();
        let mask = |term: &[&str]| -> Result<Subset> {
            if term.is_empty() {
                return Err(Error::design("empty term in strata layout"));
            }
            term.iter().try_fold(0, |m, name| {
                let i = factors
                    .iter()
                    .position(|(f, _)| f == name)
                    .ok_or_else(|| Error::design(format!("unknown factor '{name}' in strata layout")))?;
                Ok(m | 1 << i)
            })
        };
        let errors = error_terms.iter().map(|t| mask(t)).collect::<Result<Vec<_>>>()?;
        let fixed = fixed_terms.iter().map(|t| mask(t)).collect::<Result<Vec<_>>>()?;
        let layout = StrataLayout { factors, errors, fixed };
        for &f in &layout.fixed {
            if layout.errors.contains(&f) {
                return Err(Error::design(format!("term '{}' is both fixed and an error term", layout.name(f))));
            }
        }
        Ok(layout)
    }

    fn name(&self, s: Subset) -> String {
        (0..self.factors.len()).filter(|i| s >> i & 1 == 1).map(|i| self.factors[i].0.as_str()).collect::<Vec<_>>().join(":")
    }

    fn n_cells(&self, s: Subset) -> usize {
        (0..self.factors.len()).filter(|i| s >> i & 1 == 1).map(|i| self.factors[i].1).product()
    }

    fn effect_df(&self, s: Subset) -> usize {
        (0..self.factors.len()).filter(|i| s >> i & 1 == 1).map(|i| self.factors[i].1 - 1).product()
    }

    /// Stratum owning each nonempty factor subset: `Some(i)` for error term
    /// `i`, `None` for Within.
    fn owner(&self, s: Subset) -> Option<usize> {
        self.errors.iter().position(|&e| s & !e == 0)
    }

    fn stratum_names(&self) -> Vec<String> {
        let mut v: Vec<String> = self.errors.iter().map(|&e| self.name(e)).collect();
        v.push("Within".into());
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermRow {
    pub name: String,
    pub df: usize,
    pub ss: f64,
    pub ms: f64,
    pub test: TestResult,
}

/// One error stratum: its residual line and the fixed terms tested in it.
#[derive(Debug, Clone, PartialEq)]
pub struct Stratum {
    pub name: String,
    pub df: usize,
    pub ss: f64,
    pub ms: f64,
    pub terms: Vec<TermRow>,
}

impl Stratum {
    /// Degrees of freedom including the fixed terms tested here.
    pub fn total_df(&self) -> usize {
        self.df + self.terms.iter().map(|t| t.df).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrataAnova {
    pub strata: Vec<Stratum>,
    pub n: usize,
    pub grand_mean: f64,
    /// Replicates per complete cell.
    pub replicates: usize,
}

impl StrataAnova {
    pub fn stratum(&self, name: &str) -> Option<&Stratum> {
        self.strata.iter().find(|s| s.name == name)
    }

    /// Residual mean square of a stratum.
    pub fn ms(&self, name: &str) -> Option<f64> {
        self.stratum(name).map(|s| s.ms)
    }

    /// Test of a fixed term in whichever stratum holds it.
    pub fn term_test(&self, term: &str) -> Option<&TestResult> {
        self.strata.iter().flat_map(|s| &s.terms).find(|t| t.name == term).map(|t| &t.test)
    }

    /// `MS_num / MS_den` between two strata residuals, e.g. a random effect
    /// against Within.
    pub fn ratio_test(&self, num: &str, den: &str) -> Result<TestResult> {
        let a = self.stratum(num).ok_or_else(|| Error::param(format!("no stratum '{num}'")))?;
        let b = self.stratum(den).ok_or_else(|| Error::param(format!("no stratum '{den}'")))?;
        if a.df == 0 || b.df == 0 {
            return Ok(TestResult::invalid("stratum without residual degrees of freedom"));
        }
        Ok(f_test(a.ms, a.df as f64, b.ms, b.df as f64))
    }
}

/// Stratified ANOVA of a balanced complete design. `codes[f][i]` is the level
/// of factor `f` on observation `i`.
pub fn anova_strata(layout: &StrataLayout, codes: &[Vec<usize>], y: &[f64]) -> Result<StrataAnova> {
    let m = layout.factors.len();
    if codes.len() != m {
        return Err(Error::design(format!("{} code vectors for {m} factors", codes.len())));
    }
    let n = y.len();
    for (f, c) in codes.iter().enumerate() {
        if c.len() != n {
            return Err(Error::design(format!("factor '{}' has {} codes for {n} observations", layout.factors[f].0, c.len())));
        }
        if c.iter().any(|&v| v >= layout.factors[f].1) {
            return Err(Error::design(format!("level code out of range for factor '{}'", layout.factors[f].0)));
        }
    }
    let full: Subset = (1 << m) - 1;
    let cells = layout.n_cells(full);
    let cell_of = |s: Subset, i: usize| -> usize {
        (0..m).filter(|f| s >> f & 1 == 1).fold(0, |acc, f| acc * layout.factors[f].1 + codes[f][i])
    };
    let mut counts = vec![0usize; cells];
    for i in 0..n {
        counts[cell_of(full, i)] += 1;
    }
    let r = counts[0];
    if r == 0 || counts.iter().any(|&c| c != r) {
        return Err(Error::design("anova_strata requires a balanced design with every cell observed equally often"));
    }
    // marginal means for every factor subset
    let n_sub = 1usize << m;
    let means: Vec<Vec<f64>> = (0..n_sub as Subset)
        .map(|s| {
            let k = layout.n_cells(s);
            let mut sum = vec![0.0; k];
            for i in 0..n {
                sum[cell_of(s, i)] += y[i];
            }
            let per = (n / k) as f64;
            sum.into_iter().map(|v| v / per).collect()
        })
        .collect();
    // effect SS by inclusion–exclusion over subsets
    let mut ss = vec![0.0; n_sub];
    for s in 1..n_sub as Subset {
        let subs: Vec<(Subset, f64)> = (0..=s)
            .filter(|t| t & !s == 0)
            .map(|t| (t, if (s.count_ones() - t.count_ones()) % 2 == 0 { 1.0 } else { -1.0 }))
            .collect();
        ss[s as usize] = (0..n)
            .map(|i| {
                let e: f64 = subs.iter().map(|&(t, sign)| sign * means[t as usize][cell_of(t, i)]).sum();
                e * e
            })
            .sum();
    }
    let resid_ss: f64 = (0..n).map(|i| (y[i] - means[full as usize][cell_of(full, i)]).powi(2)).sum();
    let resid_df = cells * (r - 1);

    let names = layout.stratum_names();
    let mut strata: Vec<(usize, f64, Vec<Subset>)> = vec![(0, 0.0, Vec::new()); names.len()];
    let within = names.len() - 1;
    for s in 1..n_sub as Subset {
        let k = layout.owner(s).unwrap_or(within);
        if layout.fixed.contains(&s) {
            strata[k].2.push(s);
        } else {
            strata[k].0 += layout.effect_df(s);
            strata[k].1 += ss[s as usize];
        }
    }
    strata[within].0 += resid_df;
    strata[within].1 += resid_ss;

    let out = strata
        .into_iter()
        .zip(names)
        .map(|((df, sss, fixed), name)| {
            let ms = if df > 0 { sss / df as f64 } else { f64::NAN };
            let terms = fixed
                .into_iter()
                .map(|s| {
                    let tdf = layout.effect_df(s);
                    let tss = ss[s as usize];
                    let tms = tss / tdf as f64;
                    let test = if df > 0 {
                        f_test(tms, tdf as f64, ms, df as f64)
                    } else {
                        TestResult::invalid("no residual degrees of freedom in stratum")
                    };
                    TermRow { name: layout.name(s), df: tdf, ss: tss, ms: tms, test }
                })
                .collect();
            Stratum { name, df, ss: sss, ms, terms }
        })
        .collect();
    Ok(StrataAnova { strata: out, n, grand_mean: means[0][0], replicates: r })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceComponent {
    /// Stratum the component belongs to (`Within` for the residual).
    pub name: String,
    /// Method-of-moments variance, possibly negative.
    pub raw: f64,
    /// Standard deviation after truncating the variance at zero.
    pub sd: f64,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceComponents {
    pub components: Vec<VarianceComponent>,
    pub note: Option<String>,
}

impl VarianceComponents {
    pub fn sd(&self, name: &str) -> Option<f64> {
        self.components.iter().find(|c| c.name == name).map(|c| c.sd)
    }
}

/// Method-of-moments variance components from stratum mean squares, using
/// `E[MS_E] = σ² + Σ_{F ⊇ E} c_F·σ_F²` with `c_F` observations per level
/// combination of `F`.
pub fn variance_components(anova: &StrataAnova, layout: &StrataLayout) -> Result<VarianceComponents> {
    let sigma2 = anova.ms("Within").filter(|v| v.is_finite()).ok_or_else(|| Error::design("Within stratum has no residual df"))?;
    let mut raw = vec![f64::NAN; layout.errors.len()];
    let mut order: Vec<usize> = (0..layout.errors.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(layout.errors[i].count_ones()));
    for &i in &order {
        let e = layout.errors[i];
        let name = layout.name(e);
        let ms = anova.ms(&name).filter(|v| v.is_finite()).ok_or_else(|| Error::design(format!("stratum '{name}' has no residual df")))?;
        let mut rest = ms - sigma2;
        for (j, &f) in layout.errors.iter().enumerate() {
            if j != i && e & !f == 0 && f != e {
                rest -= (anova.n / layout.n_cells(f)) as f64 * raw[j];
            }
        }
        raw[i] = rest / (anova.n / layout.n_cells(e)) as f64;
    }
    let mut components: Vec<VarianceComponent> = layout
        .errors
        .iter()
        .zip(&raw)
        .map(|(&e, &v)| VarianceComponent { name: layout.name(e), raw: v, sd: v.max(0.0).sqrt(), truncated: v < 0.0 })
        .collect();
    components.push(VarianceComponent { name: "Within".into(), raw: sigma2, sd: sigma2.sqrt(), truncated: false });
    let cut: Vec<&str> = components.iter().filter(|c| c.truncated).map(|c| c.name.as_str()).collect();
    let note = (!cut.is_empty()).then(|| format!("negative estimate(s) truncated to 0: {}", cut.join(", ")));
    Ok(VarianceComponents { components, note })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{t_test_two_sample, TTestKind};

    #[test]
    fn equal_means_give_zero_f() {
        let r = anova_oneway(&[0, 0, 1, 1, 2, 2], 3, &[1.0, 3.0, 2.0, 2.0, 0.0, 4.0], None).unwrap();
        assert!(r.ss_between.abs() < 1e-12);
        assert!(r.omnibus.statistic.abs() < 1e-12);
        assert!((r.omnibus.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_groups_match_pooled_t() {
        let x = [3.1, 4.2, 5.0, 2.2];
        let z = [6.0, 5.5, 7.1];
        let y: Vec<f64> = x.iter().chain(&z).copied().collect();
        let r = anova_oneway(&[0, 0, 0, 0, 1, 1, 1], 2, &y, None).unwrap();
        let t = t_test_two_sample(&x, &z, TTestKind::Pooled);
        assert!((r.omnibus.statistic - t.statistic * t.statistic).abs() < 1e-10);
        assert!((r.omnibus.p_value - t.p_value).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_contrasts_partition_between_ss() {
        let c = DMatrix::from_column_slice(3, 2, &[-1.0, 0.5, 0.5, 0.0, -1.0, 1.0]);
        let g: Vec<usize> = (0..12).map(|i| i / 4).collect();
        let y = [9.0, 11.0, 10.5, 8.0, 13.0, 12.5, 14.0, 12.0, 15.5, 13.5, 14.0, 16.0];
        let r = anova_oneway(&g, 3, &y, Some(&c)).unwrap();
        let total: f64 = r.contrasts.iter().map(|c| c.ss).sum();
        assert!((total - r.ss_between).abs() < 1e-9);
        // first contrast: (Σ cᵢȳᵢ)² / Σ(cᵢ²/nᵢ)
        let m: Vec<f64> = (0..3).map(|k| y[4 * k..4 * k + 4].iter().sum::<f64>() / 4.0).collect();
        let l = -m[0] + 0.5 * m[1] + 0.5 * m[2];
        assert!((r.contrasts[0].ss - l * l / (1.5 / 4.0)).abs() < 1e-9);
        assert!(anova_oneway(&g, 1, &y, None).is_err());
    }

    #[test]
    fn two_items_two_replicates() {
        let layout = StrataLayout::new(&[("item", 2)], &[&["item"]], &[]).unwrap();
        let res = anova_strata(&layout, &[vec![0, 0, 1, 1]], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(res.ms("item"), Some(4.0));
        assert_eq!(res.ms("Within"), Some(0.5));
        let t = res.ratio_test("item", "Within").unwrap();
        assert!((t.statistic - 8.0).abs() < 1e-12);
        assert_eq!(t.df, Some(Df::Two(1.0, 2.0)));
        // F(1, 2) upper tail at 8: 1 − √(8/10)
        assert!((t.p_value - (1.0 - 0.8f64.sqrt())).abs() < 1e-12);
        assert!((t.p_value - 0.1056).abs() < 1e-4);
    }

    #[test]
    fn one_stratum_matches_oneway() {
        let g: Vec<usize> = (0..12).map(|i| i % 3).collect();
        let y = [9.0, 11.0, 10.5, 8.0, 13.0, 12.5, 14.0, 12.0, 15.5, 13.5, 14.0, 16.0];
        let layout = StrataLayout::new(&[("grp", 3)], &[], &[&["grp"]]).unwrap();
        let s = anova_strata(&layout, std::slice::from_ref(&g), &y).unwrap();
        let o = anova_oneway(&g, 3, &y, None).unwrap();
        let t = s.term_test("grp").unwrap();
        assert!((t.statistic - o.omnibus.statistic).abs() < 1e-10);
        assert!((t.p_value - o.omnibus.p_value).abs() < 1e-12);
        assert_eq!(s.strata.iter().map(Stratum::total_df).sum::<usize>(), 11);
    }

    #[test]
    fn unbalanced_is_rejected() {
        let layout = StrataLayout::new(&[("item", 2)], &[&["item"]], &[]).unwrap();
        assert!(anova_strata(&layout, &[vec![0, 0, 1]], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn truncated_component() {
        let layout = StrataLayout::new(&[("item", 2)], &[&["item"]], &[]).unwrap();
        // item means equal, so MS_item = 0 < MS_within
        let res = anova_strata(&layout, &[vec![0, 0, 1, 1]], &[1.0, 3.0, 3.0, 1.0]).unwrap();
        let vc = variance_components(&res, &layout).unwrap();
        assert_eq!(vc.sd("item"), Some(0.0));
        assert!(vc.components[0].truncated);
        assert!(vc.note.is_some());
    }
}
