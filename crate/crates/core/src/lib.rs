//! Socio-financial market model in which sentiment spreads through group
//! communication and feeds back into returns and volatility.
//!
//! - [`model`]: transition probabilities, the group-update of bullishness,
//!   sentiment returns, conditional volatility and seeded forward simulation.
//! - [`filter`]: deterministic filtering of an observed return series and the
//!   conditional Gaussian log-likelihood with a finite-difference gradient.
//! - [`estimation`]: multi-start simplex maximum likelihood and profiles.
//! - [`stats`]: autocorrelations, excess kurtosis, Hill tail index.
//! - [`io`] and [`cli`]: price CSV ingestion, report emission and the
//!   `simulate` / `fit` / `filter` / `stats` commands.
//!
//! ```
//! use sentiment_market::model::{simulate_path, ModelParams};
//! use sentiment_market::filter::log_likelihood;
//!
//! let params = ModelParams::uniform(1.1, 0.01, 0.001, 5000.0, 5).unwrap();
//! let path = simulate_path(&params, 500, 7, 100.0).unwrap();
//! let ll = log_likelihood(&params, &path.r).unwrap();
//! assert!(ll.is_finite());
//! ```

pub mod cli;
pub mod error;
pub mod estimation;
pub mod filter;
pub mod io;
pub mod model;
pub mod stats;

pub use error::{Error, Result};
