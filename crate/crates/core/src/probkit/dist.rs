use serde::{Deserialize, Serialize};

use super::noncentral::{nc_chisq_tails, nc_f_tails, nc_t_cdf};
use super::rng::RandomSource;
use super::special::{bisect, dbinom, inc_beta, inc_gamma, norm_cdf, norm_quantile};
use crate::error::{Error, Result};

/// Parametric distribution families used by the data-generating models and
/// by the reference distributions of the tests.
///
/// Construct through the checked constructors; they enforce the parameter
/// domains (σ > 0, min < max, 0 ≤ p ≤ 1, df > 0, ncp ≥ 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    Normal { mean: f64, sd: f64 },
    LogNormal { meanlog: f64, sdlog: f64 },
    Uniform { min: f64, max: f64 },
    Binomial { n: u64, p: f64 },
    Bernoulli { p: f64 },
    ChiSquared { df: f64 },
    StudentT { df: f64 },
    FisherF { df1: f64, df2: f64 },
    NoncentralT { df: f64, ncp: f64 },
    NoncentralChiSquared { df: f64, ncp: f64 },
    NoncentralF { df1: f64, df2: f64, ncp: f64 },
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Parameter(msg()))
    }
}

fn positive_df(df: f64) -> Result<()> {
    check(df > 0.0 && df.is_finite(), || format!("df must be positive (got {df})"))
}

impl Distribution {
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        check(sd > 0.0 && sd.is_finite() && mean.is_finite(), || format!("normal needs sd > 0 (got {sd})"))?;
        Ok(Distribution::Normal { mean, sd })
    }

    pub fn standard_normal() -> Self {
        Distribution::Normal { mean: 0.0, sd: 1.0 }
    }

    pub fn log_normal(meanlog: f64, sdlog: f64) -> Result<Self> {
        check(sdlog > 0.0 && sdlog.is_finite(), || format!("log-normal needs sdlog > 0 (got {sdlog})"))?;
        Ok(Distribution::LogNormal { meanlog, sdlog })
    }

    pub fn uniform(min: f64, max: f64) -> Result<Self> {
        check(min < max && min.is_finite() && max.is_finite(), || format!("uniform needs min < max ({min}, {max})"))?;
        Ok(Distribution::Uniform { min, max })
    }

    pub fn binomial(n: u64, p: f64) -> Result<Self> {
        check((0.0..=1.0).contains(&p), || format!("binomial p must be in [0, 1] (got {p})"))?;
        Ok(Distribution::Binomial { n, p })
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        check((0.0..=1.0).contains(&p), || format!("Bernoulli p must be in [0, 1] (got {p})"))?;
        Ok(Distribution::Bernoulli { p })
    }

    pub fn chi_squared(df: f64) -> Result<Self> {
        positive_df(df)?;
        Ok(Distribution::ChiSquared { df })
    }

    pub fn student_t(df: f64) -> Result<Self> {
        positive_df(df)?;
        Ok(Distribution::StudentT { df })
    }

    pub fn fisher_f(df1: f64, df2: f64) -> Result<Self> {
        positive_df(df1)?;
        positive_df(df2)?;
        Ok(Distribution::FisherF { df1, df2 })
    }

    pub fn noncentral_t(df: f64, ncp: f64) -> Result<Self> {
        positive_df(df)?;
        check(ncp >= 0.0 && ncp.is_finite(), || format!("ncp must be >= 0 (got {ncp})"))?;
        Ok(Distribution::NoncentralT { df, ncp })
    }

    pub fn noncentral_chi_squared(df: f64, ncp: f64) -> Result<Self> {
        positive_df(df)?;
        check(ncp >= 0.0 && ncp.is_finite(), || format!("ncp must be >= 0 (got {ncp})"))?;
        Ok(Distribution::NoncentralChiSquared { df, ncp })
    }

    pub fn noncentral_f(df1: f64, df2: f64, ncp: f64) -> Result<Self> {
        positive_df(df1)?;
        positive_df(df2)?;
        check(ncp >= 0.0 && ncp.is_finite(), || format!("ncp must be >= 0 (got {ncp})"))?;
        Ok(Distribution::NoncentralF { df1, df2, ncp })
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Distribution::Binomial { .. } | Distribution::Bernoulli { .. })
    }

    pub fn is_noncentral(&self) -> bool {
        matches!(
            self,
            Distribution::NoncentralT { .. } | Distribution::NoncentralChiSquared { .. } | Distribution::NoncentralF { .. }
        )
    }

    /// `(P(X ≤ x), P(X > x))`, each tail computed directly where possible.
    pub fn tails(&self, x: f64) -> Result<(f64, f64)> {
        if x.is_nan() {
            return Err(Error::param("cdf evaluated at NaN"));
        }
        use Distribution::*;
        let pair = |lo: f64| (lo, 1.0 - lo);
        Ok(match *self {
            Normal { mean, sd } => {
                let z = (x - mean) / sd;
                (norm_cdf(z), norm_cdf(-z))
            }
            LogNormal { meanlog, sdlog } => {
                if x <= 0.0 {
                    (0.0, 1.0)
                } else {
                    let z = (x.ln() - meanlog) / sdlog;
                    (norm_cdf(z), norm_cdf(-z))
                }
            }
            Uniform { min, max } => pair(((x - min) / (max - min)).clamp(0.0, 1.0)),
            Bernoulli { p } => {
                if x < 0.0 {
                    (0.0, 1.0)
                } else if x < 1.0 {
                    (1.0 - p, p)
                } else {
                    (1.0, 0.0)
                }
            }
            Binomial { n, p } => binom_tails(x, n, p)?,
            ChiSquared { df } => {
                if x <= 0.0 {
                    (0.0, 1.0)
                } else {
                    inc_gamma(df / 2.0, x / 2.0)?
                }
            }
            StudentT { df } => t_tails(df, x)?,
            FisherF { df1, df2 } => {
                if x <= 0.0 {
                    (0.0, 1.0)
                } else if x.is_infinite() {
                    (1.0, 0.0)
                } else {
                    inc_beta(df1 / 2.0, df2 / 2.0, df1 * x / (df1 * x + df2))?
                }
            }
            NoncentralT { df, ncp } => pair(nc_t_cdf(df, ncp, x)?),
            NoncentralChiSquared { df, ncp } => nc_chisq_tails(df, ncp, x)?,
            NoncentralF { df1, df2, ncp } => nc_f_tails(df1, df2, ncp, x)?,
        })
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.tails(x).map(|t| t.0)
    }

    /// `P(X > x)`.
    pub fn sf(&self, x: f64) -> Result<f64> {
        self.tails(x).map(|t| t.1)
    }

    /// Left-continuous generalized inverse `inf{x : cdf(x) ≥ p}`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        use Distribution::*;
        if self.is_discrete() {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(format!("quantile probability {p} outside [0, 1]")));
            }
        } else if !(p > 0.0 && p < 1.0) {
            return Err(Error::param(format!("quantile probability {p} outside (0, 1)")));
        }
        match *self {
            Normal { mean, sd } => Ok(mean + sd * norm_quantile(p)),
            LogNormal { meanlog, sdlog } => Ok((meanlog + sdlog * norm_quantile(p)).exp()),
            Uniform { min, max } => Ok(min + p * (max - min)),
            Bernoulli { p: prob } => Ok(if p <= 1.0 - prob { 0.0 } else { 1.0 }),
            Binomial { n, p: prob } => binom_quantile(n, prob, p),
            StudentT { .. } | NoncentralT { .. } => {
                if matches!(self, StudentT { .. }) && p == 0.5 {
                    return Ok(0.0);
                }
                let (lo, hi) = self.bracket(p, -1.0, 1.0)?;
                bisect(|x| self.cdf(x), p, lo, hi)
            }
            FisherF { df1, df2 } if df1 == df2 && p == 0.5 => Ok(1.0),
            _ => {
                let (lo, hi) = self.bracket(p, 0.0, 1.0)?;
                bisect(|x| self.cdf(x), p, lo, hi)
            }
        }
    }

    /// Expands `[lo, hi]` until it brackets the `p` quantile.
    fn bracket(&self, p: f64, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
        let mut step = 1.0;
        while self.cdf(hi)? < p {
            lo = lo.max(hi);
            step *= 2.0;
            hi += step;
            if hi > 1e300 {
                return Err(Error::Numeric("quantile bracket overflow".into()));
            }
        }
        if lo < 0.0 {
            let mut step = 1.0;
            while self.cdf(lo)? >= p {
                hi = hi.min(lo);
                step *= 2.0;
                lo -= step;
                if lo < -1e300 {
                    return Err(Error::Numeric("quantile bracket overflow".into()));
                }
            }
        }
        Ok((lo, hi))
    }

    /// Theoretical mean (used by tests of the samplers).
    pub fn mean(&self) -> f64 {
        use Distribution::*;
        match *self {
            Normal { mean, .. } => mean,
            LogNormal { meanlog, sdlog } => (meanlog + sdlog * sdlog / 2.0).exp(),
            Uniform { min, max } => 0.5 * (min + max),
            Binomial { n, p } => n as f64 * p,
            Bernoulli { p } => p,
            ChiSquared { df } => df,
            StudentT { df } => {
                if df > 1.0 {
                    0.0
                } else {
                    f64::NAN
                }
            }
            FisherF { df2, .. } => {
                if df2 > 2.0 {
                    df2 / (df2 - 2.0)
                } else {
                    f64::NAN
                }
            }
            NoncentralT { df, ncp } => {
                if df > 1.0 {
                    ncp * (df / 2.0).sqrt() * (super::special::ln_gamma((df - 1.0) / 2.0) - super::special::ln_gamma(df / 2.0)).exp()
                } else {
                    f64::NAN
                }
            }
            NoncentralChiSquared { df, ncp } => df + ncp,
            NoncentralF { df1, df2, ncp } => {
                if df2 > 2.0 {
                    df2 * (df1 + ncp) / (df1 * (df2 - 2.0))
                } else {
                    f64::NAN
                }
            }
        }
    }
}

fn t_tails(df: f64, t: f64) -> Result<(f64, f64)> {
    if t.is_infinite() {
        return Ok(if t > 0.0 { (1.0, 0.0) } else { (0.0, 1.0) });
    }
    if t == 0.0 {
        return Ok((0.5, 0.5));
    }
    // P(|T| > |t|) = I_{ν/(ν+t²)}(ν/2, ½)
    let x = df / (df + t * t);
    let (two_tail, _) = if x < 1.0 {
        inc_beta(df / 2.0, 0.5, x)?
    } else {
        (1.0, 0.0)
    };
    let tail = 0.5 * two_tail;
    Ok(if t > 0.0 { (1.0 - tail, tail) } else { (tail, 1.0 - tail) })
}

fn binom_tails(x: f64, n: u64, p: f64) -> Result<(f64, f64)> {
    if x < 0.0 {
        return Ok((0.0, 1.0));
    }
    let k = x.floor();
    if k >= n as f64 {
        return Ok((1.0, 0.0));
    }
    let k = k as u64;
    if p == 0.0 {
        return Ok((1.0, 0.0));
    }
    if p == 1.0 {
        return Ok((0.0, 1.0));
    }
    if n <= 60 {
        // direct summation is exact to rounding for small n
        let lower: f64 = (0..=k).map(|j| dbinom(j, n, p)).sum();
        let upper: f64 = (k + 1..=n).map(|j| dbinom(j, n, p)).sum();
        return Ok((lower.min(1.0), upper.min(1.0)));
    }
    // P(X ≤ k) = I_{1-p}(n-k, k+1)
    inc_beta((n - k) as f64, (k + 1) as f64, 1.0 - p)
}

fn binom_quantile(n: u64, p: f64, prob: f64) -> Result<f64> {
    if prob == 0.0 || p == 0.0 {
        return Ok(0.0);
    }
    if prob == 1.0 || p == 1.0 {
        return Ok(n as f64);
    }
    let (mut lo, mut hi) = (0u64, n);
    // smallest k with cdf(k) ≥ prob
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if binom_tails(mid as f64, n, p)?.0 >= prob {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo as f64)
}

/// Binomial draw by sequential inversion from the mode; one uniform per draw.
pub(crate) fn binomial_draw(n: u64, p: f64, rng: &mut RandomSource) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    let u = rng.uniform();
    let q = 1.0 - p;
    let nf = n as f64;
    if nf * p.min(q) < 30.0 {
        // chop-down search from 0
        let mut k = 0u64;
        let mut pmf = dbinom(0, n, p);
        let mut cdf = pmf;
        let ratio = p / q;
        while cdf < u && k < n {
            pmf *= (nf - k as f64) / (k as f64 + 1.0) * ratio;
            k += 1;
            cdf += pmf;
        }
        return k;
    }
    let mode = (((n + 1) as f64) * p).floor().min(nf) as u64;
    let pmf_mode = dbinom(mode, n, p);
    let cdf_mode = match binom_tails(mode as f64, n, p) {
        Ok((lo, _)) => lo,
        Err(_) => return mode,
    };
    if u <= cdf_mode {
        let mut k = mode;
        let mut pmf = pmf_mode;
        let mut cdf = cdf_mode;
        // cdf(k-1) = cdf(k) - pmf(k)
        while k > 0 {
            let below = cdf - pmf;
            if below < u {
                break;
            }
            cdf = below;
            pmf *= k as f64 / (nf - k as f64 + 1.0) * (q / p);
            k -= 1;
        }
        k
    } else {
        let mut k = mode;
        let mut pmf = pmf_mode;
        let mut cdf = cdf_mode;
        while cdf < u && k < n {
            pmf *= (nf - k as f64) / (k as f64 + 1.0) * (p / q);
            k += 1;
            cdf += pmf;
            if pmf == 0.0 {
                break;
            }
        }
        k
    }
}
