//! Filter a daily price file: estimated bullishness, conditional volatility
//! and per-step log-likelihood terms.
//!
//! cargo run --release --example filter_prices -- [prices.csv]
//!
//! Without an argument a synthetic 1247-day series is generated first.

use std::path::PathBuf;

use sentiment_market::filter::filter;
use sentiment_market::io::{load_prices, write_file, write_filter_csv};
use sentiment_market::model::{simulate_path, ModelParams};
use sentiment_market::stats::spearman;

fn synthetic(params: &ModelParams) -> Result<PathBuf, Box<dyn std::error::Error>> {
    use std::fmt::Write as _;
    let path = simulate_path(params, 1246, 2008, 100.0)?;
    let mut date = chrono::NaiveDate::from_ymd_opt(2008, 11, 7).unwrap();
    let mut text = format!("date,price\n{date},{}\n", path.p0);
    for p in &path.price {
        date = date.succ_opt().unwrap();
        writeln!(text, "{date},{p}")?;
    }
    let file = std::env::temp_dir().join("sentiment_market_prices.csv");
    std::fs::write(&file, text)?;
    Ok(file)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::uniform(1.1, 0.01, 0.001, 1000.0, 5)?;
    let input = match std::env::args().nth(1) {
        Some(p) => PathBuf::from(p),
        None => synthetic(&params)?,
    };
    let series = load_prices(&input)?;
    let returns = series.returns();
    let out = filter(&params, &returns)?;

    let abs: Vec<f64> = returns.iter().map(|r| r.abs()).collect();
    let max = out.sigma_hat.iter().copied().fold(f64::MIN, f64::max);
    println!("{} prices from {}", series.len(), input.display());
    println!("log-likelihood {:.3}", out.loglik);
    println!("sigma_hat in [{:.5}, {max:.5}]", out.sigma_hat.iter().copied().fold(f64::MAX, f64::min));
    println!("Spearman(|r|, sigma_hat) = {:.3}", spearman(&abs, &out.sigma_hat)?);

    let busiest = (0..returns.len()).max_by(|&a, &b| out.sigma_hat[a].total_cmp(&out.sigma_hat[b])).unwrap();
    println!("most volatile day {}: B_hat {:.4}, r {:+.4}", series.dates[busiest + 1], out.b_hat[busiest], returns[busiest]);

    let csv = std::env::temp_dir().join("sentiment_market_filter.csv");
    write_file(&csv, |w| write_filter_csv(&returns, &out, w))?;
    println!("wrote {}", csv.display());
    Ok(())
}
