//! Stylized-facts statistics: autocorrelation, kurtosis and tail index.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default Hill tail fraction.
pub const DEFAULT_TAIL_FRACTION: f64 = 0.05;
/// Default number of autocorrelation lags.
pub const DEFAULT_MAX_LAG: usize = 20;

const MIN_HILL_SAMPLE: usize = 500;
const MIN_HILL_TAIL: usize = 20;
// relative gap between Hill estimates at f and f/2 above which the tail is
// reported as unstable
const HILL_STABILITY_TOL: f64 = 0.1;

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample autocorrelation at lags `1..=max_lag` (lag 0 is not included).
///
/// Uses the biased estimator: lagged cross products are divided by the
/// full-sample sum of squared deviations.
pub fn acf(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if max_lag < 1 {
        return Err(Error::Domain("max_lag must be at least 1".into()));
    }
    if x.len() <= max_lag + 1 {
        return Err(Error::InsufficientData(format!(
            "autocorrelation to lag {max_lag} needs more than {} points, got {}",
            max_lag + 1,
            x.len()
        )));
    }
    let mu = mean(x);
    let dev: Vec<f64> = x.iter().map(|v| v - mu).collect();
    let denom: f64 = dev.iter().map(|d| d * d).sum();
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::ConstantSeries);
    }
    Ok((1..=max_lag)
        .map(|lag| {
            let num: f64 = dev[..dev.len() - lag].iter().zip(&dev[lag..]).map(|(a, b)| a * b).sum();
            (num / denom).clamp(-1.0, 1.0)
        })
        .collect())
}

/// Fourth standardized sample moment minus three.
pub fn excess_kurtosis(x: &[f64]) -> Result<f64> {
    if x.len() < 4 {
        return Err(Error::InsufficientData(format!("kurtosis needs at least 4 points, got {}", x.len())));
    }
    let mu = mean(x);
    let (mut m2, mut m4) = (0.0, 0.0);
    for v in x {
        let d2 = (v - mu) * (v - mu);
        m2 += d2;
        m4 += d2 * d2;
    }
    let n = x.len() as f64;
    m2 /= n;
    m4 /= n;
    if m2 == 0.0 {
        return Err(Error::ConstantSeries);
    }
    Ok(m4 / (m2 * m2) - 3.0)
}

/// Hill estimator of the tail index of `|x|`.
///
/// Takes the `k = floor(tail_fraction * n)` largest absolute values and
/// returns `k / sum ln(|x|_(i) / u)` where `u` is the `(k+1)`-th largest.
pub fn hill_tail_exponent(x: &[f64], tail_fraction: f64) -> Result<f64> {
    if !(tail_fraction > 0.0 && tail_fraction <= 0.2) {
        return Err(Error::Domain(format!("tail_fraction must lie in (0, 0.2], got {tail_fraction}")));
    }
    if x.len() < MIN_HILL_SAMPLE {
        return Err(Error::InsufficientData(format!(
            "Hill estimator needs at least {MIN_HILL_SAMPLE} points, got {}",
            x.len()
        )));
    }
    let k = (tail_fraction * x.len() as f64).floor() as usize;
    if k < MIN_HILL_TAIL {
        return Err(Error::InsufficientData(format!(
            "only {k} tail observations selected, need at least {MIN_HILL_TAIL}"
        )));
    }
    let mut abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    // k largest end up in abs[n-k..], threshold at abs[n-k-1]
    let n = abs.len();
    abs.select_nth_unstable_by(n - k - 1, f64::total_cmp);
    let threshold = abs[n - k - 1];
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::InsufficientData("tail threshold is zero or non-finite".into()));
    }
    let sum: f64 = abs[n - k..].iter().map(|v| (v / threshold).ln()).sum();
    if sum <= 0.0 {
        return Err(Error::InsufficientData("tail observations are all tied at the threshold".into()));
    }
    Ok(k as f64 / sum)
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Domain(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData("rank correlation needs at least 2 points".into()));
    }
    pearson(&ranks(x), &ranks(y))
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut out = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = rank;
        }
        i = j + 1;
    }
    out
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantSeries);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Which transform of returns stands in for volatility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolatilityProxy {
    #[default]
    Absolute,
    Squared,
}

impl VolatilityProxy {
    fn apply(self, r: f64) -> f64 {
        match self {
            VolatilityProxy::Absolute => r.abs(),
            VolatilityProxy::Squared => r * r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub max_lag: usize,
    pub tail_fraction: f64,
    pub proxy: VolatilityProxy,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self { max_lag: DEFAULT_MAX_LAG, tail_fraction: DEFAULT_TAIL_FRACTION, proxy: VolatilityProxy::Absolute }
    }
}

/// Summary booleans derived from the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StylizedFlags {
    /// At least 90% of return autocorrelations lie inside the white-noise band.
    pub returns_uncorrelated: bool,
    /// Mean volatility-proxy autocorrelation exceeds the band half-width.
    pub volatility_clustering: bool,
    /// Excess kurtosis above one.
    pub fat_tails: bool,
    /// Hill estimates at the tail fraction and half of it agree within 10%.
    pub tail_index_stable: bool,
}

/// Stylized facts of a return series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StylizedFactsReport {
    pub n: usize,
    pub max_lag: usize,
    pub tail_fraction: f64,
    pub proxy: VolatilityProxy,
    pub acf_returns: Vec<f64>,
    /// Autocorrelations of the volatility proxy (`|r|` by default).
    pub acf_abs_returns: Vec<f64>,
    pub excess_kurtosis: f64,
    /// `None` when the sample is too short for the Hill estimator.
    pub hill_exponent: Option<f64>,
    /// Hill estimate at half the tail fraction, used for the stability flag.
    pub hill_exponent_half_fraction: Option<f64>,
    /// White-noise half-width `2 / sqrt(T)`.
    pub band: f64,
    pub flags: StylizedFlags,
}

impl StylizedFactsReport {
    pub fn compute(returns: &[f64], config: &ReportConfig) -> Result<Self> {
        let n = returns.len();
        let acf_returns = acf(returns, config.max_lag)?;
        let proxy: Vec<f64> = returns.iter().map(|&r| config.proxy.apply(r)).collect();
        let acf_abs_returns = acf(&proxy, config.max_lag)?;
        let excess_kurtosis = excess_kurtosis(returns)?;
        let hill_exponent = optional_hill(returns, config.tail_fraction)?;
        let hill_exponent_half_fraction = optional_hill(returns, config.tail_fraction / 2.0)?;
        let band = 2.0 / (n as f64).sqrt();

        let inside = acf_returns.iter().filter(|a| a.abs() < band).count();
        let mean_vol_acf = mean(&acf_abs_returns);
        let tail_index_stable = match (hill_exponent, hill_exponent_half_fraction) {
            (Some(full), Some(half)) => ((half - full) / full).abs() < HILL_STABILITY_TOL,
            _ => false,
        };
        let flags = StylizedFlags {
            returns_uncorrelated: inside as f64 >= 0.9 * acf_returns.len() as f64,
            volatility_clustering: mean_vol_acf > band,
            fat_tails: excess_kurtosis > 1.0,
            tail_index_stable,
        };
        Ok(Self {
            n,
            max_lag: config.max_lag,
            tail_fraction: config.tail_fraction,
            proxy: config.proxy,
            acf_returns,
            acf_abs_returns,
            excess_kurtosis,
            hill_exponent,
            hill_exponent_half_fraction,
            band,
            flags,
        })
    }
}

fn optional_hill(x: &[f64], fraction: f64) -> Result<Option<f64>> {
    match hill_tail_exponent(x, fraction) {
        Ok(h) => Ok(Some(h)),
        Err(Error::InsufficientData(_)) => Ok(None),
        Err(e) => Err(e),
    }
}
