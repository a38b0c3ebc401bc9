//! Deterministic filtering of observed returns and the conditional Gaussian
//! log-likelihood.
//!
//! Given parameters and an observed return series the sentiment recursion is
//! fully determined: starting from neutral transitions and `B(0)`, each step
//! produces `B(t)`, `RB(t)` and `sigma(t)` before the observed `r(t)` updates
//! the transition probabilities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    bullishness_return, conditional_volatility, sentiment_step, ModelParams, TransitionState,
    THETA_NAMES,
};

/// Value reported by [`log_likelihood`] when the filter collapses or diverges.
pub const DEGENERATE_LOGLIK: f64 = -1e300;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Filtered series for an observed return path, one entry per observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterOutput {
    pub b_hat: Vec<f64>,
    #[serde(rename = "RB")]
    pub sentiment_return: Vec<f64>,
    pub sigma_hat: Vec<f64>,
    pub loglik_terms: Vec<f64>,
    pub loglik: f64,
}

/// Gaussian log density of `r` with mean `mean` and standard deviation `sigma`.
pub fn gaussian_log_density(r: f64, mean: f64, sigma: f64) -> f64 {
    let z = (r - mean) / sigma;
    -LN_SQRT_2PI - sigma.ln() - 0.5 * z * z
}

struct Step {
    b: f64,
    rb: f64,
    sigma: f64,
    log_density: f64,
}

fn check_inputs(params: &ModelParams, returns: &[f64]) -> Result<()> {
    params.validate()?;
    if returns.is_empty() {
        return Err(Error::InsufficientData("return series is empty".into()));
    }
    if let Some(index) = returns.iter().position(|r| !r.is_finite()) {
        return Err(Error::NonFiniteReturn { index });
    }
    Ok(())
}

// Runs the recursion, handing each step to `sink`. Steps are 1-based in errors.
fn run(params: &ModelParams, returns: &[f64], mut sink: impl FnMut(Step)) -> Result<()> {
    let mut m = TransitionState::neutral(params.max_group)?;
    let mut b_prev = params.b0;
    for (idx, &r) in returns.iter().enumerate() {
        let step = idx + 1;
        let b = sentiment_step(b_prev, &m, &params.group_weights);
        let rb = bullishness_return(b, b_prev)
            .map_err(|_| Error::Collapse { step, bullishness: b_prev, partial: None })?;
        let sigma = conditional_volatility(rb, params.sigma0, params.beta);
        if !sigma.is_finite() {
            return Err(Error::Divergence { step, quantity: "sigma_hat", partial: None });
        }
        let log_density = gaussian_log_density(r, rb / params.lambda, sigma);
        if !log_density.is_finite() {
            return Err(Error::Divergence { step, quantity: "log density", partial: None });
        }
        sink(Step { b, rb, sigma, log_density });
        m.apply_return(r, params.alpha);
        b_prev = b;
    }
    Ok(())
}

/// Filters `returns` through the model and records every intermediate series.
pub fn filter(params: &ModelParams, returns: &[f64]) -> Result<FilterOutput> {
    check_inputs(params, returns)?;
    let n = returns.len();
    let mut out = FilterOutput {
        b_hat: Vec::with_capacity(n),
        sentiment_return: Vec::with_capacity(n),
        sigma_hat: Vec::with_capacity(n),
        loglik_terms: Vec::with_capacity(n),
        loglik: 0.0,
    };
    run(params, returns, |s| {
        out.b_hat.push(s.b);
        out.sentiment_return.push(s.rb);
        out.sigma_hat.push(s.sigma);
        out.loglik_terms.push(s.log_density);
    })?;
    out.loglik = out.loglik_terms.iter().sum();
    Ok(out)
}

/// Outcome of a log-likelihood evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLikelihood {
    /// The log-likelihood, or [`DEGENERATE_LOGLIK`] when the filter failed.
    pub value: f64,
    /// Why the filter failed, if it did.
    pub degenerate: Option<Degeneracy>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Degeneracy {
    pub step: usize,
    pub message: String,
}

impl LogLikelihood {
    pub fn is_finite(&self) -> bool {
        self.degenerate.is_none()
    }
}

/// Conditional log-likelihood of `returns`.
///
/// Input errors (invalid parameters, empty or non-finite returns) are
/// returned as `Err`. A collapsed or divergent filter yields the sentinel
/// [`DEGENERATE_LOGLIK`] together with the diagnostic, so optimizers can
/// move away from the offending region.
pub fn log_likelihood(params: &ModelParams, returns: &[f64]) -> Result<LogLikelihood> {
    check_inputs(params, returns)?;
    let mut total = 0.0;
    match run(params, returns, |s| total += s.log_density) {
        Ok(()) => Ok(LogLikelihood { value: total, degenerate: None }),
        Err(err @ (Error::Collapse { .. } | Error::Divergence { .. })) => Ok(LogLikelihood {
            value: DEGENERATE_LOGLIK,
            degenerate: Some(Degeneracy { step: err.step().unwrap_or(0), message: err.to_string() }),
        }),
        Err(err) => Err(err),
    }
}

/// Central finite-difference gradient of the log-likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gradient {
    /// `dL/dtheta_i` for `(lambda, sigma0, beta, alpha)`.
    pub natural: [f64; 4],
    /// `theta_i * dL/dtheta_i`, the gradient with respect to `ln theta_i`.
    pub normalized: [f64; 4],
}

impl Gradient {
    /// Infinity norm of the normalized gradient.
    pub fn norm(&self) -> f64 {
        self.normalized.iter().fold(0.0, |acc, g| acc.max(g.abs()))
    }
}

/// Central differences in each of `(lambda, sigma0, beta, alpha)` with step
/// `rel_step * |theta_i|`.
pub fn loglik_gradient_fd(params: &ModelParams, returns: &[f64], rel_step: f64) -> Result<Gradient> {
    if !(rel_step > 0.0 && rel_step <= 1e-2) {
        return Err(Error::Domain(format!("rel_step must lie in (0, 1e-2], got {rel_step}")));
    }
    check_inputs(params, returns)?;
    let theta = params.theta();
    let mut natural = [0.0; 4];
    let mut normalized = [0.0; 4];
    for i in 0..4 {
        let mut h = rel_step * theta[i].abs();
        // keep both probes inside the positive orthant
        while theta[i] - h <= 0.0 {
            h *= 0.5;
        }
        let probe = |x: f64| -> Result<f64> {
            let mut t = theta;
            t[i] = x;
            let ll = log_likelihood(&params.with_theta(t), returns)?;
            if ll.is_finite() && ll.value.is_finite() {
                Ok(ll.value)
            } else {
                Err(Error::NonFiniteGradient { parameter: THETA_NAMES[i] })
            }
        };
        let up = theta[i] + h;
        let down = theta[i] - h;
        let g = (probe(up)? - probe(down)?) / (up - down);
        natural[i] = g;
        normalized[i] = g * theta[i];
    }
    Ok(Gradient { natural, normalized })
}
