use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    bullishness_return, conditional_volatility, sentiment_step, ModelParams, TransitionState,
};

/// Aligned series produced by forward simulation, one entry per step `t = 1..=T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedPath {
    #[serde(rename = "B")]
    pub bullishness: Vec<f64>,
    #[serde(rename = "RB")]
    pub sentiment_return: Vec<f64>,
    pub sigma: Vec<f64>,
    pub eta: Vec<f64>,
    pub r: Vec<f64>,
    #[serde(rename = "P")]
    pub price: Vec<f64>,
    /// Initial bullishness `B(0)`.
    pub b0: f64,
    /// Initial price `P(0)`.
    pub p0: f64,
}

impl SimulatedPath {
    fn with_capacity(steps: usize, b0: f64, p0: f64) -> Self {
        Self {
            bullishness: Vec::with_capacity(steps),
            sentiment_return: Vec::with_capacity(steps),
            sigma: Vec::with_capacity(steps),
            eta: Vec::with_capacity(steps),
            r: Vec::with_capacity(steps),
            price: Vec::with_capacity(steps),
            b0,
            p0,
        }
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Simulates `steps` periods with Gaussian news drawn from a seeded ChaCha8 stream.
///
/// Bitwise reproducible for a fixed `(params, steps, seed, p0)`.
pub fn simulate_path(params: &ModelParams, steps: usize, seed: u64, p0: f64) -> Result<SimulatedPath> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    simulate_with_shocks(params, steps, p0, || rng.sample::<f64, _>(StandardNormal))
}

/// Simulates `paths` independent paths in parallel.
///
/// Path `i` draws from stream `i` of the generator seeded with `master_seed`,
/// so each path is reproducible on its own and independent of the others.
pub fn simulate_paths(
    params: &ModelParams,
    steps: usize,
    master_seed: u64,
    paths: usize,
    p0: f64,
) -> Vec<Result<SimulatedPath>> {
    (0..paths)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(index as u64);
            simulate_with_shocks(params, steps, p0, || rng.sample::<f64, _>(StandardNormal))
        })
        .collect()
}

/// Simulates with the news term switched off (`eta = 0`).
pub fn simulate_noiseless(params: &ModelParams, steps: usize, p0: f64) -> Result<SimulatedPath> {
    simulate_with_shocks(params, steps, p0, || 0.0)
}

/// Core recursion. `standard_shock` yields unit-variance draws that are
/// scaled by the conditional volatility to form the news term.
///
/// Per step: B(t) from m(t-1), RB(t), sigma(t), eta(t), r(t), then m(t) and P(t).
pub fn simulate_with_shocks(
    params: &ModelParams,
    steps: usize,
    p0: f64,
    mut standard_shock: impl FnMut() -> f64,
) -> Result<SimulatedPath> {
    params.validate()?;
    if steps < 1 {
        return Err(Error::Domain("number of steps T must be at least 1".into()));
    }
    if !(p0.is_finite() && p0 > 0.0) {
        return Err(Error::InvalidParameter { name: "P0", reason: format!("must be positive, got {p0}") });
    }

    let mut path = SimulatedPath::with_capacity(steps, params.b0, p0);
    let mut m = TransitionState::neutral(params.max_group)?;
    let mut b_prev = params.b0;
    let mut p_prev = p0;

    for step in 1..=steps {
        let b = sentiment_step(b_prev, &m, &params.group_weights);
        let rb = match bullishness_return(b, b_prev) {
            Ok(rb) => rb,
            Err(_) => {
                return Err(Error::Collapse {
                    step,
                    bullishness: b_prev,
                    partial: Some(Box::new(path)),
                })
            }
        };
        let sigma = conditional_volatility(rb, params.sigma0, params.beta);
        if !sigma.is_finite() {
            return Err(Error::Divergence { step, quantity: "sigma", partial: Some(Box::new(path)) });
        }
        let drift = rb / params.lambda;
        let r = drift + sigma * standard_shock();
        if !r.is_finite() {
            return Err(Error::Divergence { step, quantity: "r", partial: Some(Box::new(path)) });
        }
        // stored so that r - RB/lambda reproduces it bit for bit
        let eta = r - drift;
        m.apply_return(r, params.alpha);
        let price = p_prev * (1.0 + r);
        if !(price.is_finite() && price > 0.0) {
            return Err(Error::Divergence { step, quantity: "P", partial: Some(Box::new(path)) });
        }

        path.bullishness.push(b);
        path.sentiment_return.push(rb);
        path.sigma.push(sigma);
        path.eta.push(eta);
        path.r.push(r);
        path.price.push(price);
        b_prev = b;
        p_prev = price;
    }
    Ok(path)
}
