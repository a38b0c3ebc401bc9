//! Conditional maximum-likelihood estimation of `(lambda, sigma0, beta, alpha)`.
//!
//! Each start runs a Nelder–Mead search over the log of the parameters, so
//! positivity holds by construction and box bounds are enforced by rejecting
//! points outside them. Starts run in parallel and are merged in start order.

pub mod simplex;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{log_likelihood, loglik_gradient_fd, Gradient};
use crate::model::{ModelParams, THETA_NAMES};
pub use simplex::{minimize, SimplexOptions, SimplexResult};

/// One of the four estimable parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaComponent {
    Lambda,
    Sigma0,
    Beta,
    Alpha,
}

impl ThetaComponent {
    pub const ALL: [ThetaComponent; 4] =
        [ThetaComponent::Lambda, ThetaComponent::Sigma0, ThetaComponent::Beta, ThetaComponent::Alpha];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        THETA_NAMES[self.index()]
    }
}

impl fmt::Display for ThetaComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ThetaComponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ThetaComponent::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown parameter `{s}`, expected one of {THETA_NAMES:?}")))
    }
}

/// Closed box bounds in natural units, per component of `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: [f64; 4],
    pub upper: [f64; 4],
}

impl Default for Bounds {
    fn default() -> Self {
        Self { lower: [1e-3, 1e-6, 1e-6, 1e-4], upper: [1e3, 1.0, 1.0, 10.0] }
    }
}

impl Bounds {
    pub fn validate(&self) -> Result<()> {
        for i in 0..4 {
            let (lo, hi) = (self.lower[i], self.upper[i]);
            if !(lo > 0.0 && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidParameter {
                    name: THETA_NAMES[i],
                    reason: format!("bounds must satisfy 0 < lower < upper, got [{lo}, {hi}]"),
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, theta: &[f64; 4]) -> bool {
        (0..4).all(|i| theta[i] >= self.lower[i] && theta[i] <= self.upper[i])
    }
}

/// Where starting points are drawn from (log-uniformly).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StartRegion {
    /// The whole bounding box.
    Bounds,
    /// `reference * 10^u`, `u ~ U(-decades, decades)`, intersected with the bounds.
    AroundReference { decades: f64 },
}

/// Estimator settings.
#[derive(Debug, Clone)]
pub struct FitConfig {
    /// Structural settings (L, weights, B0) and the reference point for starts.
    pub template: ModelParams,
    pub starts: usize,
    pub seed: u64,
    pub bounds: Bounds,
    pub start_region: StartRegion,
    /// Gradient infinity-norm threshold (gradient with respect to ln theta).
    pub tol_g: f64,
    /// Agreement required between the best two starts' log-likelihoods.
    pub tol_f: f64,
    pub min_observations: usize,
    /// Relative step of the finite-difference gradient.
    pub rel_step: f64,
    /// Treat `B(0)` as a fifth free parameter.
    pub estimate_b0: bool,
    pub simplex: SimplexOptions,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            template: ModelParams::default(),
            starts: 5,
            seed: 0,
            bounds: Bounds::default(),
            start_region: StartRegion::Bounds,
            tol_g: 1e-3,
            tol_f: 1e-4,
            min_observations: 30,
            rel_step: 1e-5,
            estimate_b0: false,
            simplex: SimplexOptions::default(),
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        self.template.validate()?;
        self.bounds.validate()?;
        if self.starts < 1 {
            return Err(Error::Domain("at least one start is required".into()));
        }
        if !(self.tol_g > 0.0 && self.tol_f > 0.0) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        if let StartRegion::AroundReference { decades } = self.start_region {
            if !(decades >= 0.0 && decades.is_finite()) {
                return Err(Error::Domain(format!("start box half-width must be non-negative, got {decades}")));
            }
        }
        Ok(())
    }
}

/// Outcome of one start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartOutcome {
    pub index: usize,
    /// Initial `(lambda, sigma0, beta, alpha[, B0])`.
    pub initial: Vec<f64>,
    /// Final point in the same layout.
    pub final_point: Vec<f64>,
    pub loglik: f64,
    pub evaluations: usize,
    pub simplex_converged: bool,
    /// Set when the start ended in a collapsed or divergent region.
    pub failure: Option<String>,
}

/// Result of [`maximize_likelihood`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub theta_hat: ModelParams,
    pub loglik: f64,
    /// `None` when a finite-difference probe left the finite region.
    pub gradient: Option<Gradient>,
    /// Infinity norm of `gradient.normalized`; infinite when `gradient` is `None`.
    pub gradient_norm: f64,
    /// Why the gradient could not be evaluated, e.g. the maximizer borders a
    /// collapsed region.
    pub gradient_failure: Option<String>,
    pub parameter_names: Vec<String>,
    pub starts: Vec<StartOutcome>,
    /// Gap between the best and second-best start log-likelihoods.
    pub start_agreement: Option<f64>,
    pub converged: bool,
    pub observations: usize,
}

/// One point of a profile likelihood.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub value: f64,
    /// Maximum over the remaining parameters, `None` if every start failed.
    pub loglik: Option<f64>,
    pub theta: Option<[f64; 4]>,
    pub failure: Option<String>,
}

// Maps an unconstrained search vector onto (theta, b0).
struct Layout {
    free: Vec<usize>,
    fixed: Option<(usize, f64)>,
    estimate_b0: bool,
}

impl Layout {
    fn new(fixed: Option<(usize, f64)>, estimate_b0: bool) -> Self {
        let free = (0..4).filter(|i| fixed.map_or(true, |(f, _)| f != *i)).collect();
        Self { free, fixed, estimate_b0 }
    }

    fn dim(&self) -> usize {
        self.free.len() + usize::from(self.estimate_b0)
    }

    fn decode(&self, x: &[f64], template: &ModelParams) -> ([f64; 4], f64) {
        let mut theta = template.theta();
        for (slot, &i) in self.free.iter().enumerate() {
            theta[i] = x[slot].exp();
        }
        if let Some((i, v)) = self.fixed {
            theta[i] = v;
        }
        let b0 = if self.estimate_b0 { logistic(x[self.free.len()]) } else { template.b0 };
        (theta, b0)
    }

    fn encode(&self, theta: &[f64; 4], b0: f64) -> Vec<f64> {
        let mut x: Vec<f64> = self.free.iter().map(|&i| theta[i].ln()).collect();
        if self.estimate_b0 {
            x.push(logit(b0));
        }
        x
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn point_vec(theta: &[f64; 4], b0: f64, estimate_b0: bool) -> Vec<f64> {
    let mut v = theta.to_vec();
    if estimate_b0 {
        v.push(b0);
    }
    v
}

fn draw_start(config: &FitConfig, index: usize, layout: &Layout) -> ([f64; 4], f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let reference = config.template.theta();
    let mut theta = reference;
    for &i in &layout.free {
        let (lo, hi) = (config.bounds.lower[i].ln(), config.bounds.upper[i].ln());
        let (a, b) = match config.start_region {
            StartRegion::Bounds => (lo, hi),
            StartRegion::AroundReference { decades } => {
                let c = reference[i].ln();
                let w = decades * std::f64::consts::LN_10;
                ((c - w).max(lo), (c + w).min(hi))
            }
        };
        theta[i] = if b > a { rng.random_range(a..b).exp() } else { reference[i].ln().clamp(lo, hi).exp() };
    }
    let b0 = if layout.estimate_b0 { rng.random_range(0.05..0.95) } else { config.template.b0 };
    (theta, b0)
}

struct Search {
    outcomes: Vec<StartOutcome>,
    best: Option<([f64; 4], f64, f64)>,
}

fn check_returns(returns: &[f64], config: &FitConfig) -> Result<()> {
    config.validate()?;
    if returns.len() < config.min_observations {
        return Err(Error::InsufficientData(format!(
            "need at least {} returns to fit, got {}",
            config.min_observations,
            returns.len()
        )));
    }
    if let Some(index) = returns.iter().position(|r| !r.is_finite()) {
        return Err(Error::NonFiniteReturn { index });
    }
    Ok(())
}

fn search(returns: &[f64], config: &FitConfig, fixed: Option<(usize, f64)>) -> Search {
    let layout = Layout::new(fixed, config.estimate_b0);
    let template = &config.template;
    let bounds = config.bounds;

    let objective = |x: &[f64]| -> f64 {
        let (theta, b0) = layout.decode(x, template);
        if !bounds.contains(&theta) || !(b0 > 0.0 && b0 < 1.0) {
            return f64::INFINITY;
        }
        let mut params = template.with_theta(theta);
        params.b0 = b0;
        match log_likelihood(&params, returns) {
            Ok(ll) => -ll.value,
            Err(_) => f64::INFINITY,
        }
    };

    let outcomes: Vec<StartOutcome> = (0..config.starts)
        .into_par_iter()
        .map(|index| {
            let (theta0, b00) = draw_start(config, index, &layout);
            let x0 = layout.encode(&theta0, b00);
            let res = if layout.dim() == 0 {
                SimplexResult { value: objective(&x0), x: x0, evaluations: 1, converged: true }
            } else {
                minimize(objective, &x0, &config.simplex)
            };
            let (theta, b0) = layout.decode(&res.x, template);
            let mut params = template.with_theta(theta);
            params.b0 = b0;
            let (loglik, failure) = match log_likelihood(&params, returns) {
                Ok(ll) => (ll.value, ll.degenerate.map(|d| d.message)),
                Err(e) => (f64::NEG_INFINITY, Some(e.to_string())),
            };
            StartOutcome {
                index,
                initial: point_vec(&theta0, b00, config.estimate_b0),
                final_point: point_vec(&theta, b0, config.estimate_b0),
                loglik,
                evaluations: res.evaluations,
                simplex_converged: res.converged,
                failure,
            }
        })
        .collect();

    let mut best: Option<([f64; 4], f64, f64)> = None;
    for o in outcomes.iter().filter(|o| o.failure.is_none()) {
        if best.map_or(true, |(_, _, ll)| o.loglik > ll) {
            let theta = [o.final_point[0], o.final_point[1], o.final_point[2], o.final_point[3]];
            let b0 = if config.estimate_b0 { o.final_point[4] } else { template.b0 };
            best = Some((theta, b0, o.loglik));
        }
    }
    Search { outcomes, best }
}

fn failure_summary(outcomes: &[StartOutcome]) -> String {
    outcomes
        .iter()
        .map(|o| format!("start {}: {}", o.index, o.failure.as_deref().unwrap_or("no finite likelihood")))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Maximizes the conditional log-likelihood of `returns` from several starts.
///
/// `converged` holds when the normalized gradient norm at the maximizer is
/// below `tol_g` and the two best starts agree within `tol_f`.
pub fn maximize_likelihood(returns: &[f64], config: &FitConfig) -> Result<FitResult> {
    check_returns(returns, config)?;
    let Search { outcomes, best } = search(returns, config, None);
    let Some((theta, b0, loglik)) = best else {
        return Err(Error::FitFailed(format!("every start failed: {}", failure_summary(&outcomes))));
    };
    let mut theta_hat = config.template.with_theta(theta);
    theta_hat.b0 = b0;
    let (gradient, gradient_failure) = match loglik_gradient_fd(&theta_hat, returns, config.rel_step) {
        Ok(g) => (Some(g), None),
        Err(e @ Error::NonFiniteGradient { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let gradient_norm = gradient.map_or(f64::INFINITY, |g| g.norm());

    let mut finals: Vec<f64> = outcomes.iter().filter(|o| o.failure.is_none()).map(|o| o.loglik).collect();
    finals.sort_by(|a, b| b.total_cmp(a));
    let start_agreement = (finals.len() >= 2).then(|| finals[0] - finals[1]);
    let starts_agree = match start_agreement {
        Some(gap) => gap < config.tol_f,
        None => config.starts == 1,
    };

    let mut parameter_names: Vec<String> = THETA_NAMES.iter().map(|s| s.to_string()).collect();
    if config.estimate_b0 {
        parameter_names.push("B0".into());
    }
    Ok(FitResult {
        theta_hat,
        loglik,
        gradient,
        gradient_norm,
        gradient_failure,
        parameter_names,
        starts: outcomes,
        start_agreement,
        converged: gradient_norm < config.tol_g && starts_agree,
        observations: returns.len(),
    })
}

/// Profile log-likelihood of one parameter over `grid`.
///
/// Each grid value is held fixed while the other parameters are maximized
/// with the same multi-start search. Grid points where every start fails are
/// flagged rather than aborting the profile.
pub fn profile_likelihood(
    returns: &[f64],
    config: &FitConfig,
    parameter: ThetaComponent,
    grid: &[f64],
) -> Result<Vec<ProfilePoint>> {
    check_returns(returns, config)?;
    if grid.is_empty() {
        return Err(Error::Domain("profile grid is empty".into()));
    }
    if grid.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Domain("profile grid values must be finite and positive".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("profile grid must be strictly increasing".into()));
    }
    let i = parameter.index();
    Ok(grid
        .par_iter()
        .map(|&value| {
            let mut cfg = config.clone();
            cfg.bounds.lower[i] = cfg.bounds.lower[i].min(value);
            cfg.bounds.upper[i] = cfg.bounds.upper[i].max(value);
            let Search { outcomes, best } = search(returns, &cfg, Some((i, value)));
            match best {
                Some((theta, _, ll)) => ProfilePoint { value, loglik: Some(ll), theta: Some(theta), failure: None },
                None => ProfilePoint { value, loglik: None, theta: None, failure: Some(failure_summary(&outcomes)) },
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn component_names_round_trip() {
        for c in ThetaComponent::ALL {
            assert_eq!(c.name().parse::<ThetaComponent>().unwrap(), c);
        }
        assert!("gamma".parse::<ThetaComponent>().is_err());
    }

    #[test]
    fn layout_round_trips_through_logs() {
        let layout = Layout::new(None, true);
        let template = ModelParams::default();
        let theta = [1.1, 0.01, 0.001, 0.05];
        let x = layout.encode(&theta, 0.3);
        let (back, b0) = layout.decode(&x, &template);
        for i in 0..4 {
            assert!((back[i] - theta[i]).abs() <= 4.0 * f64::EPSILON * theta[i]);
        }
        assert!((b0 - 0.3).abs() < 1e-15);
    }

    #[test]
    fn fixed_component_is_held() {
        let layout = Layout::new(Some((1, 0.02)), false);
        assert_eq!(layout.dim(), 3);
        let (theta, _) = layout.decode(&[0.0, 0.0, 0.0], &ModelParams::default());
        assert_eq!(theta, [1.0, 0.02, 1.0, 1.0]);
    }

    #[test]
    fn starts_respect_region() {
        let config = FitConfig {
            start_region: StartRegion::AroundReference { decades: 1.0 },
            ..Default::default()
        };
        let layout = Layout::new(None, false);
        let reference = config.template.theta();
        for index in 0..20 {
            let (theta, _) = draw_start(&config, index, &layout);
            assert!(config.bounds.contains(&theta));
            for i in 0..4 {
                let ratio = theta[i] / reference[i];
                assert!((0.1 - 1e-12..=10.0 + 1e-12).contains(&ratio));
            }
        }
        assert_ne!(draw_start(&config, 0, &layout), draw_start(&config, 1, &layout));
        assert_eq!(draw_start(&config, 3, &layout), draw_start(&config, 3, &layout));
    }

    #[test]
    fn rejects_short_or_bad_input() {
        let config = FitConfig::default();
        assert!(matches!(maximize_likelihood(&[0.01; 10], &config), Err(Error::InsufficientData(_))));
        let mut r = vec![0.01; 40];
        r[7] = f64::NAN;
        assert!(matches!(maximize_likelihood(&r, &config), Err(Error::NonFiniteReturn { index: 7 })));
        let bad = FitConfig { starts: 0, ..Default::default() };
        assert!(maximize_likelihood(&[0.01; 40], &bad).is_err());
    }

    #[test]
    fn profile_grid_validation() {
        let r = vec![0.01; 40];
        let config = FitConfig::default();
        assert!(profile_likelihood(&r, &config, ThetaComponent::Sigma0, &[]).is_err());
        assert!(profile_likelihood(&r, &config, ThetaComponent::Sigma0, &[0.02, 0.01]).is_err());
        assert!(profile_likelihood(&r, &config, ThetaComponent::Sigma0, &[-1.0]).is_err());
    }
}
