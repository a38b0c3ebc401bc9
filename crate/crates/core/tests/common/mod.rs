#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sentiment_market::model::ModelParams;

/// Independent evaluation of the conditional Gaussian log-likelihood.
///
/// Transition probabilities are kept as plain probabilities, binomial weights
/// come from factorials, and the likelihood is assembled from the closed-form
/// product expression `-(T/2) ln 2pi - sum ln sigma - 1/2 sum z^2` rather than
/// a running sum of per-step densities. Returns `None` when the bullishness
/// hits the floor or a volatility overflows.
pub fn naive_loglik(params: &ModelParams, returns: &[f64]) -> Option<f64> {
    let l = params.max_group;
    let factorial = |n: usize| -> f64 { (1..=n).map(|i| i as f64).product() };
    let mut m: Vec<Vec<f64>> = (1..=l).map(|k| (0..=k).map(|j| j as f64 / k as f64).collect()).collect();
    let mut b_prev = params.b0;
    let mut sigmas = Vec::with_capacity(returns.len());
    let mut residuals = Vec::with_capacity(returns.len());
    for &r in returns {
        let mut b = 0.0;
        for k in 1..=l {
            let mut inner = 0.0;
            for j in 0..=k {
                let c = factorial(k) / (factorial(j) * factorial(k - j));
                inner += m[k - 1][j] * c * b_prev.powf(j as f64) * (1.0 - b_prev).powf((k - j) as f64);
            }
            b += params.group_weights[k - 1] * inner;
        }
        if b_prev <= 1e-10 {
            return None;
        }
        let rb = (b - b_prev) / b_prev;
        let sigma = params.sigma0 * (rb.abs() / params.beta).exp();
        if !sigma.is_finite() {
            return None;
        }
        sigmas.push(sigma);
        residuals.push(r - rb / params.lambda);
        let factor = (r / params.alpha).exp();
        for row in &mut m {
            for p in row.iter_mut() {
                *p = (*p * factor).min(1.0);
            }
        }
        b_prev = b;
    }
    let t = returns.len() as f64;
    let sum_ln_sigma: f64 = sigmas.iter().map(|s| s.ln()).sum();
    let quad: f64 = residuals.iter().zip(&sigmas).map(|(e, s)| e * e / (s * s)).sum();
    Some(-0.5 * t * (2.0 * std::f64::consts::PI).ln() - sum_ln_sigma - 0.5 * quad)
}

/// Random parameters in a region where the filter stays finite over a few
/// thousand steps, with random group weights.
pub fn random_params(rng: &mut impl Rng) -> ModelParams {
    let l = rng.random_range(1..=10usize);
    let raw: Vec<f64> = (0..l).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let log_uniform = |rng: &mut dyn rand::RngCore, lo: f64, hi: f64| -> f64 {
        let u: f64 = rng.random_range(lo.ln()..hi.ln());
        u.exp()
    };
    let lambda = log_uniform(rng, 0.5, 5.0);
    let sigma0 = log_uniform(rng, 0.005, 0.03);
    let beta = log_uniform(rng, 1e-3, 1.0);
    let alpha = log_uniform(rng, 200.0, 5000.0);
    let b0 = rng.random_range(0.2..0.8);
    let mut p = ModelParams::uniform(lambda, sigma0, beta, alpha, l).unwrap();
    // renormalize exactly: tiny rounding can leave the sum 1 ± ulp
    let mut weights = weights;
    let s: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= s);
    p = p.with_group_weights(weights).unwrap();
    p.with_b0(b0).unwrap()
}

pub fn gaussian_returns(rng: &mut impl Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Writes `date,price` rows on consecutive weekdays starting 2008-11-07.
pub fn write_price_csv(path: &std::path::Path, prices: &[f64]) {
    use std::fmt::Write as _;
    let mut date = chrono::NaiveDate::from_ymd_opt(2008, 11, 7).unwrap();
    let mut text = String::from("date,price\n");
    for p in prices {
        writeln!(text, "{},{}", date.format("%Y-%m-%d"), p).unwrap();
        date = next_weekday(date);
    }
    std::fs::write(path, text).unwrap();
}

fn next_weekday(d: chrono::NaiveDate) -> chrono::NaiveDate {
    use chrono::Datelike;
    let mut next = d.succ_opt().unwrap();
    while matches!(next.weekday(), chrono::Weekday::Sat | chrono::Weekday::Sun) {
        next = next.succ_opt().unwrap();
    }
    next
}

/// Prices `P(0), P(1), ..., P(n-1)` from a simulated path.
pub fn synthetic_prices(params: &ModelParams, n: usize, seed: u64) -> Vec<f64> {
    let path = sentiment_market::model::simulate_path(params, n - 1, seed, 100.0).unwrap();
    std::iter::once(path.p0).chain(path.price.iter().copied()).collect()
}
