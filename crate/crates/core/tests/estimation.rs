mod common;

use sentiment_market::estimation::{
    maximize_likelihood, profile_likelihood, Bounds, FitConfig, StartRegion, ThetaComponent,
};
use sentiment_market::filter::log_likelihood;
use sentiment_market::model::{simulate_path, ModelParams};

fn truth() -> ModelParams {
    ModelParams::uniform(1.1, 0.01, 0.001, 3000.0, 5).unwrap()
}

fn config(seed: u64) -> FitConfig {
    FitConfig {
        template: truth(),
        seed,
        start_region: StartRegion::AroundReference { decades: 1.0 },
        bounds: Bounds { lower: [1e-3, 1e-6, 1e-6, 1e-4], upper: [1e3, 1.0, 1.0, 1e5] },
        ..FitConfig::default()
    }
}

#[test]
fn recovers_sigma0_and_starts_agree() {
    for seed in [0, 1] {
        let path = simulate_path(&truth(), 2000, seed, 100.0).unwrap();
        let fit = maximize_likelihood(&path.r, &config(seed)).unwrap();
        let rel = (fit.theta_hat.sigma0 - 0.01).abs() / 0.01;
        assert!(rel < 0.1, "seed {seed}: sigma0 {}", fit.theta_hat.sigma0);
        assert!(fit.start_agreement.unwrap() < 1e-4, "seed {seed}: {:?}", fit.start_agreement);
        // sigma0, beta and alpha are interior; lambda may sit on its bound
        let gradient = fit.gradient.expect("gradient at an interior maximizer");
        for i in 1..4 {
            assert!(gradient.normalized[i].abs() < 1e-3, "seed {seed}: {gradient:?}");
        }
        assert_eq!(fit.starts.len(), 5);
        let best = fit.starts.iter().map(|s| s.loglik).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(fit.loglik, best);
        assert!(fit.theta_hat.theta().iter().all(|&v| v > 0.0));
        let again = log_likelihood(&fit.theta_hat, &path.r).unwrap().value;
        assert_eq!(again, fit.loglik);
    }
}

#[test]
fn fit_is_reproducible() {
    let path = simulate_path(&truth(), 300, 8, 100.0).unwrap();
    let cfg = FitConfig { starts: 3, ..config(5) };
    let a = maximize_likelihood(&path.r, &cfg).unwrap();
    let b = maximize_likelihood(&path.r, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn gaussian_noise_gives_sample_scale() {
    let r = common::gaussian_returns(&mut common::rng(9), 600, 0.02);
    let fit = maximize_likelihood(&r, &FitConfig { starts: 3, ..FitConfig::default() }).unwrap();
    let sd = (r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64).sqrt();
    assert!((fit.theta_hat.sigma0 - sd).abs() / sd < 0.1, "{} vs {sd}", fit.theta_hat.sigma0);
}

#[test]
fn estimating_b0_adds_a_fifth_coordinate() {
    let path = simulate_path(&truth(), 300, 2, 100.0).unwrap();
    let cfg = FitConfig { starts: 2, estimate_b0: true, ..config(1) };
    let fit = maximize_likelihood(&path.r, &cfg).unwrap();
    assert_eq!(fit.parameter_names.len(), 5);
    assert!(fit.starts.iter().all(|s| s.initial.len() == 5 && s.final_point.len() == 5));
    assert!(fit.theta_hat.b0 > 0.0 && fit.theta_hat.b0 < 1.0);
}

#[test]
fn profile_matches_unconstrained_maximum() {
    let path = simulate_path(&truth(), 2000, 0, 100.0).unwrap();
    let cfg = FitConfig { starts: 3, ..config(0) };
    let fit = maximize_likelihood(&path.r, &cfg).unwrap();
    let own = fit.theta_hat.sigma0;
    let profile = profile_likelihood(&path.r, &cfg, ThetaComponent::Sigma0, &[own]).unwrap();
    assert_eq!(profile.len(), 1);
    let ll = profile[0].loglik.unwrap();
    assert!((ll - fit.loglik).abs() < cfg.tol_f, "{ll} vs {}", fit.loglik);
    assert_eq!(profile[0].theta.unwrap()[1], own);
}

#[test]
fn maximizer_on_collapse_boundary_reports_missing_gradient() {
    // at T = 1500 the likelihood keeps rising as alpha shrinks until the
    // filtered bullishness reaches the floor on the last steps
    let path = simulate_path(&truth(), 1500, 0, 100.0).unwrap();
    let fit = maximize_likelihood(&path.r, &FitConfig { starts: 3, ..config(0) }).unwrap();
    assert!(fit.gradient.is_none());
    assert!(fit.gradient_failure.unwrap().contains("alpha"));
    assert!(fit.gradient_norm.is_infinite());
    assert!(!fit.converged);
}

#[test]
fn sigma0_profile_peaks_near_truth() {
    let path = simulate_path(&truth(), 1500, 1, 100.0).unwrap();
    let cfg = FitConfig { starts: 2, ..config(3) };
    let grid = [0.007, 0.008, 0.009, 0.010, 0.011, 0.012, 0.013];
    let profile = profile_likelihood(&path.r, &cfg, ThetaComponent::Sigma0, &grid).unwrap();
    let best = profile
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.loglik.unwrap().total_cmp(&b.1.loglik.unwrap()))
        .unwrap()
        .0;
    assert!((2..=4).contains(&best), "peak at {}", grid[best]);
    assert!(profile.iter().all(|p| p.failure.is_none()));
}
