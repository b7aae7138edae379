use nalgebra::{DMatrix, DVector};

use super::dist::{binomial_draw, Distribution};
use super::rng::RandomSource;
use super::special::norm_quantile;
use crate::error::{Error, Result};

/// Standard normal draw by inversion: exactly one uniform per draw.
#[inline]
pub fn std_normal(rng: &mut RandomSource) -> f64 {
    norm_quantile(rng.uniform())
}

/// One draw from `d`.
pub fn sample(d: &Distribution, rng: &mut RandomSource) -> f64 {
    use Distribution::*;
    match *d {
        Normal { mean, sd } => mean + sd * std_normal(rng),
        LogNormal { meanlog, sdlog } => (meanlog + sdlog * std_normal(rng)).exp(),
        Uniform { min, max } => min + (max - min) * rng.uniform(),
        Bernoulli { p } => {
            if rng.uniform() < p {
                1.0
            } else {
                0.0
            }
        }
        Binomial { n, p } => binomial_draw(n, p, rng) as f64,
        ChiSquared { .. } | StudentT { .. } | FisherF { .. } => invert(d, rng),
        NoncentralChiSquared { df, ncp } => nc_chisq_draw(df, ncp, rng),
        NoncentralT { df, ncp } => {
            let z = std_normal(rng) + ncp;
            let v = invert(&Distribution::ChiSquared { df }, rng);
            z / (v / df).sqrt()
        }
        NoncentralF { df1, df2, ncp } => {
            let num = nc_chisq_draw(df1, ncp, rng) / df1;
            let den = invert(&Distribution::ChiSquared { df: df2 }, rng) / df2;
            num / den
        }
    }
}

fn invert(d: &Distribution, rng: &mut RandomSource) -> f64 {
    // quantile is total on (0, 1) for valid continuous kinds
    d.quantile(rng.uniform()).unwrap_or(f64::NAN)
}

fn nc_chisq_draw(df: f64, ncp: f64, rng: &mut RandomSource) -> f64 {
    // (Z + √λ)² + χ²(df − 1); the central part vanishes when df == 1
    let z = std_normal(rng) + ncp.sqrt();
    let rest = if df > 1.0 { invert(&Distribution::ChiSquared { df: df - 1.0 }, rng) } else { 0.0 };
    if df >= 1.0 {
        z * z + rest
    } else {
        // df < 1: Poisson mixture of central chi-squares
        let k = poisson_draw(ncp / 2.0, rng);
        invert(&Distribution::ChiSquared { df: df + 2.0 * k as f64 }, rng)
    }
}

fn poisson_draw(lambda: f64, rng: &mut RandomSource) -> u64 {
    let u = rng.uniform();
    let mut k = 0u64;
    let mut pmf = (-lambda).exp();
    let mut cdf = pmf;
    while cdf < u && pmf > 0.0 {
        k += 1;
        pmf *= lambda / k as f64;
        cdf += pmf;
    }
    k
}

/// `n` i.i.d. draws.
pub fn sample_n(d: &Distribution, n: usize, rng: &mut RandomSource) -> Vec<f64> {
    (0..n).map(|_| sample(d, rng)).collect()
}

/// Multinomial counts by sequential conditional binomials.
pub fn sample_multinomial(size: u64, probs: &[f64], rng: &mut RandomSource) -> Result<Vec<u64>> {
    if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
        return Err(Error::param("multinomial probabilities must be nonnegative"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::param(format!("multinomial probabilities sum to {total}, not 1")));
    }
    let mut remaining = size;
    let mut mass = 1.0;
    let mut out = Vec::with_capacity(probs.len());
    for (i, &p) in probs.iter().enumerate() {
        if i + 1 == probs.len() {
            out.push(remaining);
            break;
        }
        let k = if remaining == 0 || p == 0.0 {
            0
        } else if mass <= p {
            remaining
        } else {
            binomial_draw(remaining, (p / mass).clamp(0.0, 1.0), rng)
        };
        out.push(k);
        remaining -= k;
        mass -= p;
    }
    Ok(out)
}

/// Symmetric positive semi-definite covariance matrix with a cached
/// lower-triangular Cholesky factor.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    entries: DMatrix<f64>,
    factor: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Validates symmetry and positive semi-definiteness. Pivots whose
    /// magnitude is within `1e-10 · max|entry|` are treated as zero.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let dim = entries.nrows();
        if dim == 0 || entries.ncols() != dim {
            return Err(Error::param("covariance matrix must be square and nonempty"));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("covariance matrix has non-finite entries"));
        }
        let scale = entries.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = 1e-10 * scale.max(f64::MIN_POSITIVE);
        for i in 0..dim {
            for j in 0..i {
                if (entries[(i, j)] - entries[(j, i)]).abs() > tol {
                    return Err(Error::param(format!("covariance matrix not symmetric at ({i}, {j})")));
                }
            }
            if entries[(i, i)] < -tol {
                return Err(Error::param(format!("negative variance at diagonal {i}")));
            }
        }
        let factor = psd_cholesky(&entries, tol)?;
        Ok(CovarianceMatrix { entries, factor })
    }

    /// Builds `Σ = D R D` from standard deviations and a correlation matrix.
    pub fn from_sd_corr(sd: &[f64], corr: &DMatrix<f64>) -> Result<Self> {
        let d = sd.len();
        if corr.nrows() != d || corr.ncols() != d {
            return Err(Error::param("correlation matrix does not match number of sds"));
        }
        let m = DMatrix::from_fn(d, d, |i, j| corr[(i, j)] * sd[i] * sd[j]);
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn cholesky_factor(&self) -> &DMatrix<f64> {
        &self.factor
    }
}

fn psd_cholesky(a: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d < -tol {
            return Err(Error::param(format!("covariance matrix is not positive semi-definite (pivot {j} = {d})")));
        }
        if d <= tol {
            // zero pivot: the remaining column must vanish too
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                if s.abs() > tol.sqrt() * a[(i, i)].abs().sqrt().max(1.0) {
                    return Err(Error::param(format!(
                        "covariance matrix is not positive semi-definite (column {j} after zero pivot)"
                    )));
                }
            }
            continue;
        }
        let ljj = d.sqrt();
        l[(j, j)] = ljj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// `n × dim` matrix whose rows are i.i.d. `N(mu, sigma)`.
pub fn sample_mvnormal(n: usize, mu: &[f64], sigma: &CovarianceMatrix, rng: &mut RandomSource) -> Result<DMatrix<f64>> {
    let dim = sigma.dim();
    if mu.len() != dim {
        return Err(Error::param(format!("mean has length {} but covariance is {dim}x{dim}", mu.len())));
    }
    let l = sigma.cholesky_factor();
    let mut out = DMatrix::<f64>::zeros(n, dim);
    let mut z = DVector::<f64>::zeros(dim);
    for r in 0..n {
        for v in z.iter_mut() {
            *v = std_normal(rng);
        }
        for i in 0..dim {
            let mut acc = mu[i];
            for k in 0..=i {
                acc += l[(i, k)] * z[k];
            }
            out[(r, i)] = acc;
        }
    }
    Ok(out)
}
