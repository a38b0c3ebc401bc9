use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Names of the four estimable parameters, in `theta()` order.
pub const THETA_NAMES: [&str; 4] = ["lambda", "sigma0", "beta", "alpha"];

/// Largest group size for which binomial weights are evaluated exactly.
pub const MAX_GROUP_SIZE: usize = 60;

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Parameters of the sentiment/price model.
///
/// `lambda`, `sigma0`, `beta` and `alpha` form the estimable vector; the
/// group structure (`max_group`, `group_weights`) and the initial
/// bullishness `b0` are structural settings held fixed during estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Divides the sentiment return in the price equation.
    pub lambda: f64,
    /// Baseline volatility of the news term.
    pub sigma0: f64,
    /// Scale at which sentiment changes amplify volatility.
    pub beta: f64,
    /// Scale at which returns move the transition probabilities.
    pub alpha: f64,
    /// Largest communication group size `L`.
    #[serde(rename = "L")]
    pub max_group: usize,
    /// Weights `a_1..a_L` of each group size.
    pub group_weights: Vec<f64>,
    /// Initial bullishness `B(0)`.
    #[serde(rename = "B0")]
    pub b0: f64,
}

impl Default for ModelParams {
    /// λ = 1.1, σ₀ = 0.01, β = 0.001, L = 5 with α = 0.05, uniform weights
    /// and a symmetric start B(0) = 0.5.
    fn default() -> Self {
        Self::uniform(1.1, 0.01, 0.001, 0.05, 5).expect("default parameters are valid")
    }
}

impl ModelParams {
    /// Builds parameters with uniform group weights `a_k = 1/L` and `B(0) = 0.5`.
    pub fn uniform(lambda: f64, sigma0: f64, beta: f64, alpha: f64, max_group: usize) -> Result<Self> {
        if max_group < 1 {
            return Err(Error::Domain("largest group size L must be at least 1".into()));
        }
        let params = Self {
            lambda,
            sigma0,
            beta,
            alpha,
            max_group,
            group_weights: uniform_weights(max_group),
            b0: 0.5,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_b0(mut self, b0: f64) -> Result<Self> {
        self.b0 = b0;
        self.validate()?;
        Ok(self)
    }

    pub fn with_group_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        self.max_group = weights.len();
        self.group_weights = weights;
        self.validate()?;
        Ok(self)
    }

    /// The estimable vector `(λ, σ₀, β, α)`.
    pub fn theta(&self) -> [f64; 4] {
        [self.lambda, self.sigma0, self.beta, self.alpha]
    }

    /// Copy with the estimable vector replaced; structural settings are kept.
    pub fn with_theta(&self, theta: [f64; 4]) -> Self {
        Self {
            lambda: theta[0],
            sigma0: theta[1],
            beta: theta[2],
            alpha: theta[3],
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in THETA_NAMES.iter().zip(self.theta()) {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and strictly positive, got {value}"),
                });
            }
        }
        if self.max_group < 1 || self.max_group > MAX_GROUP_SIZE {
            return Err(Error::InvalidParameter {
                name: "L",
                reason: format!("must lie in 1..={MAX_GROUP_SIZE}, got {}", self.max_group),
            });
        }
        if self.group_weights.len() != self.max_group {
            return Err(Error::InvalidParameter {
                name: "group_weights",
                reason: format!(
                    "expected {} weights, got {}",
                    self.max_group,
                    self.group_weights.len()
                ),
            });
        }
        if self.group_weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "group_weights",
                reason: "weights must be finite and non-negative".into(),
            });
        }
        let total: f64 = self.group_weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidParameter {
                name: "group_weights",
                reason: format!("weights must sum to 1, got {total}"),
            });
        }
        if !(self.b0 > 0.0 && self.b0 < 1.0) {
            return Err(Error::InvalidParameter {
                name: "B0",
                reason: format!("must lie strictly between 0 and 1, got {}", self.b0),
            });
        }
        Ok(())
    }
}

/// `a_k = 1/L` for every group size.
pub fn uniform_weights(max_group: usize) -> Vec<f64> {
    vec![1.0 / max_group as f64; max_group]
}
