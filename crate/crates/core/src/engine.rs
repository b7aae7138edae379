//! The replication loop: power, type-I error, sample-size search, power
//! curves and confidence-interval widths.
//!
//! Replication `i` of a run draws from substream `offset + i` of the run's
//! seed and the per-replication outcomes are combined by integer counting,
//! so results do not depend on the number of worker threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::probkit::special::inv_reg_inc_beta;
use crate::probkit::{norm_quantile, std_normal, Distribution, RandomSource};
use crate::scenarios::Scenario;

/// Share of invalid replications beyond which a run is rejected.
pub const MAX_INVALID_SHARE: f64 = 0.1;

/// How replications whose test could not be computed are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvalidPolicy {
    /// Non-rejections; the run fails above [`MAX_INVALID_SHARE`].
    #[default]
    CountAsNonRejection,
    /// Dropped from the denominator; the run fails above
    /// [`MAX_INVALID_SHARE`].
    Exclude,
    /// Non-rejections, never an error.
    Permissive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub alpha: f64,
    pub reps: usize,
    pub seed: u64,
    /// Worker threads; `None` uses every core.
    pub workers: Option<usize>,
    pub policy: InvalidPolicy,
}

impl RunSettings {
    pub fn new(alpha: f64, reps: usize, seed: u64) -> Self {
        RunSettings { alpha, reps, seed, workers: None, policy: InvalidPolicy::default() }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn policy(mut self, policy: InvalidPolicy) -> Self {
        self.policy = policy;
        self
    }

    fn check(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::param(format!("alpha = {} must lie in (0, 1]", self.alpha)));
        }
        if self.reps == 0 {
            return Err(Error::param("reps must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(Error::param("workers must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerEstimate {
    pub scenario: String,
    pub n: usize,
    pub alpha: f64,
    pub reps: usize,
    pub rejections: u64,
    pub invalid: u64,
    pub power: f64,
    /// `√(p̂(1−p̂)/R)` over the counted replications.
    pub mc_se: f64,
    /// Wilson score interval.
    pub ci95: (f64, f64),
}

fn wilson(p: f64, r: f64) -> (f64, f64) {
    let z = norm_quantile(0.975);
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * r)) / (1.0 + z2 / r);
    let half = z / (1.0 + z2 / r) * (p * (1.0 - p) / r + z2 / (4.0 * r * r)).sqrt();
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        b = b.num_threads(w);
    }
    b.build().map_err(|e| Error::Simulation(format!("cannot start worker pool: {e}")))
}

fn simulate(s: &Scenario, n: usize, settings: &RunSettings, offset: u64) -> Result<PowerEstimate> {
    settings.check()?;
    s.check_n(n)?;
    let reps = settings.reps;
    let alpha = settings.alpha;
    let (rejections, invalid) = pool(settings.workers)?.install(|| {
        (0..reps as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = RandomSource::new(settings.seed, offset + i);
                let t = s.run_once(n, &mut rng)?;
                Ok(if !t.valid { (0u64, 1u64) } else { (u64::from(t.p_value < alpha), 0) })
            })
            .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))
    })?;
    let share = invalid as f64 / reps as f64;
    if settings.policy != InvalidPolicy::Permissive && share > MAX_INVALID_SHARE {
        return Err(Error::Simulation(format!(
            "{invalid} of {reps} replications of '{}' at n = {n} were invalid; the test does not fit the model",
            s.id()
        )));
    }
    let denom = match settings.policy {
        InvalidPolicy::Exclude => reps as u64 - invalid,
        _ => reps as u64,
    };
    if denom == 0 {
        return Err(Error::Simulation("no valid replications".into()));
    }
    let r = denom as f64;
    let power = rejections as f64 / r;
    Ok(PowerEstimate {
        scenario: s.id().into(),
        n,
        alpha,
        reps,
        rejections,
        invalid,
        power,
        mc_se: (power * (1.0 - power) / r).sqrt(),
        ci95: wilson(power, r),
    })
}

/// Proportion of replications rejecting at level `alpha` (strictly
/// `p < alpha`).
pub fn estimate_power(s: &Scenario, n: usize, settings: &RunSettings) -> Result<PowerEstimate> {
    simulate(s, n, settings, 0)
}

/// Rejection rate of the scenario's null variant.
pub fn estimate_size(s: &Scenario, n: usize, settings: &RunSettings) -> Result<PowerEstimate> {
    simulate(&s.null_variant(), n, settings, 0)
}

/// One estimate per sample size, in input order, on disjoint substreams.
pub fn power_curve(s: &Scenario, ns: &[usize], settings: &RunSettings) -> Result<Vec<PowerEstimate>> {
    if ns.is_empty() {
        return Err(Error::param("n list is empty"));
    }
    ns.iter().enumerate().map(|(k, &n)| simulate(s, n, settings, (k * settings.reps) as u64)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub n_star: usize,
    pub target: f64,
    /// Every evaluation, sorted by n.
    pub trace: Vec<PowerEstimate>,
    /// Fresh estimate at `n_star` with four times the replications.
    pub confirmation: PowerEstimate,
}

pub const DEFAULT_N_MAX: usize = 1_000_000;

/// Smallest grid `n` whose estimated power reaches `target`: doubling from
/// the scenario's minimum until the target is met, then bisection down to
/// the design granularity. Each evaluation uses fresh replications.
pub fn solve_sample_size(s: &Scenario, target: f64, settings: &RunSettings, n_max: usize) -> Result<SolveResult> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::param(format!("target power {target} must lie in (0, 1)")));
    }
    let g = s.granularity();
    let mut evaluations = 0u64;
    let mut trace: Vec<PowerEstimate> = Vec::new();
    let mut eval = |n: usize, trace: &mut Vec<PowerEstimate>| -> Result<f64> {
        let est = simulate(s, n, settings, evaluations * settings.reps as u64)?;
        evaluations += 1;
        let p = est.power;
        trace.push(est);
        Ok(p)
    };
    let mut lo: Option<usize> = None;
    let mut hi = s.min_n();
    while eval(hi, &mut trace)? < target {
        if hi >= n_max {
            let path: Vec<String> = trace.iter().map(|e| format!("n={} power={:.4}", e.n, e.power)).collect();
            return Err(Error::Simulation(format!(
                "target power {target} not reached by n = {n_max}; trace: {}",
                path.join(", ")
            )));
        }
        lo = Some(hi);
        hi = (2 * hi).div_ceil(g).saturating_mul(g).min(n_max / g * g).max(hi + g);
    }
    if let Some(mut lo) = lo {
        while hi - lo > g {
            let mid = ((lo + hi) / 2 / g * g).max(lo + g);
            if eval(mid, &mut trace)? >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let confirm = RunSettings { reps: 4 * settings.reps, ..settings.clone() };
    let confirmation = simulate(s, hi, &confirm, evaluations * settings.reps as u64)?;
    trace.sort_by_key(|e| e.n);
    Ok(SolveResult { n_star: hi, target, trace, confirmation })
}

/// Interval procedures whose width is studied by [`ci_width`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CiKind {
    /// Clopper–Pearson.
    BinomExact,
    /// Wald: `x̄ ± z·√(x̄(1−x̄)/n)`.
    BinomApprox,
    MeanKnownVar,
    MeanT,
    Variance,
}

impl CiKind {
    pub const ALL: [CiKind; 5] = [CiKind::BinomExact, CiKind::BinomApprox, CiKind::MeanKnownVar, CiKind::MeanT, CiKind::Variance];

    pub fn name(self) -> &'static str {
        match self {
            CiKind::BinomExact => "binom-exact",
            CiKind::BinomApprox => "binom-approx",
            CiKind::MeanKnownVar => "mean-known-var",
            CiKind::MeanT => "mean-t",
            CiKind::Variance => "variance",
        }
    }

    pub fn parse(name: &str) -> Result<CiKind> {
        CiKind::ALL.into_iter().find(|k| k.name() == name).ok_or_else(|| {
            let valid: Vec<&str> = CiKind::ALL.iter().map(|k| k.name()).collect();
            Error::param(format!("unknown interval kind '{name}' (valid: {})", valid.join(", ")))
        })
    }
}

/// Data-generating parameters of an interval study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CiParams {
    /// Success probability for the binomial kinds.
    pub p: f64,
    pub mean: f64,
    pub sigma: f64,
}

impl Default for CiParams {
    fn default() -> Self {
        CiParams { p: 0.5, mean: 1000.0, sigma: 7.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthEstimate {
    pub kind: CiKind,
    pub n: usize,
    pub level: f64,
    pub reps: usize,
    pub mean_width: f64,
    pub sd_width: f64,
    pub q90_width: f64,
}

pub const DEFAULT_CI_REPS: usize = 2000;

/// Clopper–Pearson interval for `x` successes in `n` trials.
pub fn clopper_pearson(x: u64, n: u64, level: f64) -> Result<(f64, f64)> {
    let a = (1.0 - level) / 2.0;
    let (xf, nf) = (x as f64, n as f64);
    let lo = if x == 0 { 0.0 } else { inv_reg_inc_beta(xf, nf - xf + 1.0, a)? };
    let hi = if x == n { 1.0 } else { inv_reg_inc_beta(xf + 1.0, nf - xf, 1.0 - a)? };
    Ok((lo, hi))
}

fn one_width(kind: CiKind, p: &CiParams, n: usize, level: f64, rng: &mut RandomSource) -> Result<f64> {
    let a = 1.0 - level;
    let nf = n as f64;
    let normal_sample = |rng: &mut RandomSource| -> (f64, f64) {
        let x: Vec<f64> = (0..n).map(|_| p.mean + p.sigma * std_normal(rng)).collect();
        let m = x.iter().sum::<f64>() / nf;
        (m, x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (nf - 1.0))
    };
    Ok(match kind {
        CiKind::BinomExact | CiKind::BinomApprox => {
            let x = crate::probkit::sample(&Distribution::binomial(n as u64, p.p)?, rng) as u64;
            if kind == CiKind::BinomExact {
                let (lo, hi) = clopper_pearson(x, n as u64, level)?;
                hi - lo
            } else {
                let ph = x as f64 / nf;
                2.0 * norm_quantile(1.0 - a / 2.0) * (ph * (1.0 - ph) / nf).sqrt()
            }
        }
        CiKind::MeanKnownVar => 2.0 * norm_quantile(1.0 - a / 2.0) * p.sigma / nf.sqrt(),
        CiKind::MeanT => {
            let (_, s2) = normal_sample(rng);
            let t = Distribution::student_t(nf - 1.0)?.quantile(1.0 - a / 2.0)?;
            2.0 * t * (s2 / nf).sqrt()
        }
        CiKind::Variance => {
            let (_, s2) = normal_sample(rng);
            let chi = Distribution::chi_squared(nf - 1.0)?;
            let (lo_q, hi_q) = (chi.quantile(a / 2.0)?, chi.quantile(1.0 - a / 2.0)?);
            (nf - 1.0) * s2 * (1.0 / lo_q - 1.0 / hi_q)
        }
    })
}

/// Distribution of interval widths over replicated data sets.
pub fn ci_width(
    kind: CiKind,
    params: &CiParams,
    n: usize,
    level: f64,
    reps: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<WidthEstimate> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::param(format!("confidence level {level} must lie in (0, 1)")));
    }
    if reps == 0 {
        return Err(Error::param("reps must be at least 1"));
    }
    let min_n = if matches!(kind, CiKind::MeanT | CiKind::Variance) { 2 } else { 1 };
    if n < min_n {
        return Err(Error::param(format!("interval kind '{}' needs n >= {min_n}", kind.name())));
    }
    if matches!(kind, CiKind::BinomExact | CiKind::BinomApprox) && !(0.0..=1.0).contains(&params.p) {
        return Err(Error::param(format!("p = {} is not a probability", params.p)));
    }
    if matches!(kind, CiKind::MeanKnownVar | CiKind::MeanT | CiKind::Variance) && !(params.sigma > 0.0) {
        return Err(Error::param("sigma must be positive"));
    }
    let mut widths: Vec<f64> = pool(workers)?.install(|| {
        (0..reps as u64)
            .into_par_iter()
            .map(|i| one_width(kind, params, n, level, &mut RandomSource::new(seed, i)))
            .collect::<Result<Vec<f64>>>()
    })?;
    let r = reps as f64;
    let mean = widths.iter().sum::<f64>() / r;
    let sd = if reps > 1 { (widths.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (r - 1.0)).sqrt() } else { 0.0 };
    widths.sort_by(f64::total_cmp);
    // linear interpolation between order statistics
    let h = (r - 1.0) * 0.9;
    let (i, frac) = (h.floor() as usize, h - h.floor());
    let q90 = widths[i] + frac * (widths[(i + 1).min(reps - 1)] - widths[i]);
    Ok(WidthEstimate { kind, n, level, reps, mean_width: mean, sd_width: sd, q90_width: q90 })
}
