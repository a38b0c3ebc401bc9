//! Profile log-likelihood of sigma0: the other parameters are re-maximized
//! at each grid value.
//!
//! cargo run --release --example profile_likelihood

use sentiment_market::estimation::{profile_likelihood, Bounds, FitConfig, StartRegion, ThetaComponent};
use sentiment_market::model::{simulate_path, ModelParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let truth = ModelParams::uniform(1.1, 0.01, 0.001, 3000.0, 5)?;
    let path = simulate_path(&truth, 2000, 0, 100.0)?;
    let config = FitConfig {
        template: truth,
        starts: 3,
        start_region: StartRegion::AroundReference { decades: 0.5 },
        bounds: Bounds { lower: [1e-3, 1e-6, 1e-6, 1e-4], upper: [1e3, 1.0, 1.0, 1e5] },
        ..FitConfig::default()
    };
    let grid = [0.007, 0.008, 0.009, 0.010, 0.011, 0.012, 0.013];
    for point in profile_likelihood(&path.r, &config, ThetaComponent::Sigma0, &grid)? {
        match point.loglik {
            Some(ll) => println!("sigma0 = {:.3}: {ll:.3}", point.value),
            None => println!("sigma0 = {:.3}: failed ({})", point.value, point.failure.unwrap_or_default()),
        }
    }
    Ok(())
}
