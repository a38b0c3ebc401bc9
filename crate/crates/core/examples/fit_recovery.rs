//! Maximum-likelihood fit of (lambda, sigma0, beta, alpha) on a simulated
//! path, with several starts and a convergence report.
//!
//! cargo run --release --example fit_recovery -- [seed]

use sentiment_market::estimation::{maximize_likelihood, Bounds, FitConfig, StartRegion};
use sentiment_market::model::{simulate_path, ModelParams, THETA_NAMES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(0);
    let truth = ModelParams::uniform(1.1, 0.01, 0.001, 3000.0, 5)?;
    let path = simulate_path(&truth, 2000, seed, 100.0)?;

    let config = FitConfig {
        template: truth.clone(),
        seed,
        start_region: StartRegion::AroundReference { decades: 1.0 },
        bounds: Bounds { lower: [1e-3, 1e-6, 1e-6, 1e-4], upper: [1e3, 1.0, 1.0, 1e5] },
        ..FitConfig::default()
    };
    let fit = maximize_likelihood(&path.r, &config)?;

    for (name, (est, true_value)) in THETA_NAMES.iter().zip(fit.theta_hat.theta().iter().zip(truth.theta())) {
        println!("{name:>7}: {est:>12.6e}  (true {true_value:.6e})");
    }
    println!("log-likelihood {:.4}", fit.loglik);
    for s in &fit.starts {
        println!("  start {}: loglik {:.6}, {} evaluations", s.index, s.loglik, s.evaluations);
    }
    match &fit.gradient {
        Some(g) => println!("normalized gradient {:?}", g.normalized),
        None => println!("no gradient: {}", fit.gradient_failure.as_deref().unwrap_or("")),
    }
    println!("best-two agreement {:?}, converged {}", fit.start_agreement, fit.converged);
    Ok(())
}
