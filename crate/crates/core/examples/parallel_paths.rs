//! Many independent paths in parallel; each path has its own random stream
//! so results do not depend on thread scheduling.
//!
//! cargo run --release --example parallel_paths -- [alpha] [paths]

use sentiment_market::model::{simulate_paths, ModelParams};
use sentiment_market::stats::excess_kurtosis;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let alpha: f64 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(500.0);
    let paths: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(16);
    let params = ModelParams::uniform(1.1, 0.01, 0.001, alpha, 5)?;

    let results = simulate_paths(&params, 5000, 42, paths, 100.0);
    let mut diverged = 0;
    for (i, result) in results.iter().enumerate() {
        match result {
            Ok(path) => println!(
                "path {i:>2}: final price {:>10.3}, final B {:.4}, excess kurtosis {:>7.3}",
                path.price.last().unwrap(),
                path.bullishness.last().unwrap(),
                excess_kurtosis(&path.r)?
            ),
            Err(e) => {
                diverged += 1;
                println!("path {i:>2}: {e}");
            }
        }
    }
    println!("{diverged}/{paths} paths diverged at alpha = {alpha}");
    Ok(())
}
