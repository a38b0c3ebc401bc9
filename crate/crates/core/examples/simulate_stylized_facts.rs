//! Simulate a long path and check the stylized facts of its returns.
//!
//! cargo run --release --example simulate_stylized_facts -- [alpha] [seed]
//!
//! Small alpha (strong feedback from returns into sentiment) makes the
//! recursion explode within a few steps; the error carries the partial path.

use sentiment_market::model::{simulate_path, ModelParams};
use sentiment_market::stats::{ReportConfig, StylizedFactsReport};
use sentiment_market::Error;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let alpha: f64 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(1000.0);
    let seed: u64 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(7);
    let params = ModelParams::uniform(1.1, 0.01, 0.001, alpha, 5)?;

    let path = match simulate_path(&params, 10_000, seed, 100.0) {
        Ok(path) => path,
        Err(e @ Error::Divergence { .. }) => {
            let kept = e.partial_path().map_or(0, |p| p.len());
            println!("alpha = {alpha}: {e} ({kept} steps kept)");
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };

    let report = StylizedFactsReport::compute(&path.r, &ReportConfig::default())?;
    println!("alpha = {alpha}, seed = {seed}, T = {}", report.n);
    println!("white-noise band +-{:.4}", report.band);
    println!("lag   acf(r)   acf(|r|)");
    for (lag, (a, b)) in report.acf_returns.iter().zip(&report.acf_abs_returns).enumerate().take(10) {
        println!("{:>3} {a:>8.4} {b:>9.4}", lag + 1);
    }
    println!("excess kurtosis {:.3}", report.excess_kurtosis);
    if let Some(h) = report.hill_exponent {
        println!("Hill exponent {h:.3}");
    }
    println!("{:#?}", report.flags);
    Ok(())
}
