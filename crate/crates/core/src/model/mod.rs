//! Sentiment state, group-communication dynamics and forward simulation.

mod binomial;
mod dynamics;
pub mod params;
mod simulate;
mod transitions;

pub use binomial::{binomial_coefficient, ln_binomial, EXACT_BINOMIAL_MAX};
pub use dynamics::{
    bullishness_return, conditional_volatility, sentiment_step, BULLISHNESS_FLOOR,
};
pub use params::{uniform_weights, ModelParams, THETA_NAMES};
pub use simulate::{
    simulate_noiseless, simulate_path, simulate_paths, simulate_with_shocks, SimulatedPath,
};
pub use transitions::{transition_update, TransitionState};
