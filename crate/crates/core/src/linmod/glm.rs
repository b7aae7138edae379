use nalgebra::{DMatrix, DVector};

use super::design::DesignMatrix;
use crate::error::{Error, Result};
use crate::probkit::Distribution;
use crate::testkit::{Df, TestResult};

const MAX_ITER: usize = 50;
const TOL: f64 = 1e-8;
const DIVERGENCE: f64 = 30.0;

/// Binomial-logit fit by iteratively reweighted least squares.
#[derive(Debug, Clone, PartialEq)]
pub struct GlmFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub deviance: f64,
    pub df_resid: usize,
    pub iterations: usize,
    /// Deviance after each iteration (nonincreasing up to rounding).
    pub deviance_trace: Vec<f64>,
    pub valid: bool,
    pub note: Option<String>,
}

fn logistic(eta: f64) -> f64 {
    1.0 / (1.0 + (-eta).exp())
}

fn deviance(y: &[f64], m: &[f64], mu: &[f64]) -> f64 {
    let term = |obs: f64, exp: f64| if obs > 0.0 { obs * (obs / exp).ln() } else { 0.0 };
    2.0 * y
        .iter()
        .zip(m)
        .zip(mu)
        .map(|((&yi, &mi), &p)| term(yi, mi * p) + term(mi - yi, mi * (1.0 - p)))
        .sum::<f64>()
}

pub fn glm_binomial_fit(x: &DesignMatrix, successes: &[f64], trials: &[f64]) -> Result<GlmFit> {
    let (n, p) = (x.n_rows(), x.n_cols());
    if successes.len() != n || trials.len() != n {
        return Err(Error::param("successes and trials must match the design rows"));
    }
    for (&y, &m) in successes.iter().zip(trials) {
        if !(m >= 1.0) || !(0.0..=m).contains(&y) {
            return Err(Error::param(format!("invalid binomial row: {y} successes of {m} trials")));
        }
    }
    let xm = x.matrix();
    let eta_of = |beta: &DVector<f64>| -> Vec<f64> { (xm * beta).iter().copied().collect() };
    let mu_of = |eta: &[f64]| -> Vec<f64> { eta.iter().map(|&e| logistic(e)).collect() };

    // starting values as in the usual binomial family initialization
    let mut mu: Vec<f64> = successes.iter().zip(trials).map(|(&y, &m)| (y + 0.5) / (m + 1.0)).collect();
    let mut eta: Vec<f64> = mu.iter().map(|&q| (q / (1.0 - q)).ln()).collect();
    let mut beta = DVector::<f64>::zeros(p);
    let mut dev = f64::INFINITY;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITER {
        iterations += 1;
        let mut wx = DMatrix::<f64>::zeros(n, p);
        let mut wz = DVector::<f64>::zeros(n);
        for i in 0..n {
            let v = mu[i] * (1.0 - mu[i]);
            let w = (trials[i] * v).sqrt();
            let z = eta[i] + (successes[i] / trials[i] - mu[i]) / v;
            wx.set_row(i, &(xm.row(i) * w));
            wz[i] = z * w;
        }
        let qr = wx.qr();
        let mut qtz = wz.clone();
        qr.q_tr_mul(&mut qtz);
        let Some(mut next) = qr.r().solve_upper_triangular(&qtz.rows(0, p).into_owned()) else {
            return Ok(invalid(x, "singular weighted design", iterations, trace));
        };
        let mut next_eta = eta_of(&next);
        let mut next_mu = mu_of(&next_eta);
        let mut next_dev = deviance(successes, trials, &next_mu);
        // step halving keeps the deviance from increasing (beyond rounding)
        let slack = 1e-10 * (1.0 + dev.abs());
        let mut halvings = 0;
        while !(next_dev <= dev + slack) && dev.is_finite() && halvings < 30 {
            next = (&next + &beta) * 0.5;
            next_eta = eta_of(&next);
            next_mu = mu_of(&next_eta);
            next_dev = deviance(successes, trials, &next_mu);
            halvings += 1;
        }
        if !next_dev.is_finite() || !(next_dev <= dev + slack || !dev.is_finite()) {
            return Ok(invalid(x, "step halving failed to reduce the deviance", iterations, trace));
        }
        let change = (&next - &beta).amax();
        beta = next;
        eta = next_eta;
        mu = next_mu;
        dev = next_dev;
        trace.push(dev);
        // judged on the linear predictor so that an uncentred covariate
        // (large intercept) is not mistaken for separation
        if eta.iter().any(|e| e.abs() > DIVERGENCE) {
            return Ok(invalid(x, "coefficients diverge (separation)", iterations, trace));
        }
        if change < TOL && iterations > 1 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Ok(invalid(x, "IRLS did not converge in 50 iterations", iterations, trace));
    }
    Ok(GlmFit {
        names: x.columns().to_vec(),
        coefficients: beta.iter().copied().collect(),
        deviance: dev,
        df_resid: n - p.min(n),
        iterations,
        deviance_trace: trace,
        valid: true,
        note: None,
    })
}

fn invalid(x: &DesignMatrix, note: &str, iterations: usize, trace: Vec<f64>) -> GlmFit {
    GlmFit {
        names: x.columns().to_vec(),
        coefficients: vec![f64::NAN; x.n_cols()],
        deviance: f64::NAN,
        df_resid: x.n_rows().saturating_sub(x.n_cols()),
        iterations,
        deviance_trace: trace,
        valid: false,
        note: Some(note.into()),
    }
}

/// Likelihood-ratio test of nested binomial fits.
pub fn glm_lrt(null: &GlmFit, full: &GlmFit) -> Result<TestResult> {
    if let Some(c) = null.names.iter().find(|c| !full.names.contains(c)) {
        return Err(Error::design(format!("null-model column '{c}' is not in the full model")));
    }
    if !null.valid || !full.valid {
        let why = full.note.as_deref().or(null.note.as_deref()).unwrap_or("invalid fit");
        return Ok(TestResult::invalid(why));
    }
    let ddf = full.names.len() - null.names.len();
    if ddf == 0 {
        return Ok(TestResult::new(0.0, Some(Df::One(0.0)), 1.0));
    }
    let stat = (null.deviance - full.deviance).max(0.0);
    let p = Distribution::ChiSquared { df: ddf as f64 }.sf(stat)?;
    Ok(TestResult::new(stat, Some(Df::One(ddf as f64)), p))
}
