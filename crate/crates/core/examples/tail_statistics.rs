//! Tail and dependence statistics on synthetic data with known answers.
//!
//! cargo run --release --example tail_statistics

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sentiment_market::stats::{acf, excess_kurtosis, hill_tail_exponent};

fn main() -> Result<(), sentiment_market::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 100_000;

    let gauss: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    println!("Gaussian: excess kurtosis {:.3}, acf(1) {:.4}", excess_kurtosis(&gauss)?, acf(&gauss, 1)?[0]);

    for index in [2.0, 3.0, 4.0] {
        let pareto: Vec<f64> = (0..n).map(|_| (1.0 - rng.random::<f64>()).powf(-1.0 / index)).collect();
        println!(
            "Pareto({index}): Hill at 5% {:.3}, at 2.5% {:.3}",
            hill_tail_exponent(&pareto, 0.05)?,
            hill_tail_exponent(&pareto, 0.025)?
        );
    }

    // AR(1) with coefficient 0.6 has acf(k) = 0.6^k
    let mut x = 0.0;
    let ar: Vec<f64> = gauss
        .iter()
        .map(|e| {
            x = 0.6 * x + e;
            x
        })
        .collect();
    for (lag, v) in acf(&ar, 4)?.iter().enumerate() {
        println!("AR(1) acf({}) = {v:.4} (theory {:.4})", lag + 1, 0.6f64.powi(lag as i32 + 1));
    }
    Ok(())
}
