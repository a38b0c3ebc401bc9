//! One-step sentiment, sentiment-return and volatility maps.

use crate::error::{Error, Result};
use crate::model::params::MAX_GROUP_SIZE;
use crate::model::TransitionState;

/// Bullishness at or below this level is treated as a collapsed population.
pub const BULLISHNESS_FLOOR: f64 = 1e-10;

/// Group-communication update of the bullish proportion.
///
/// Computes `sum_k a_k sum_j m_{k,j} C(k,j) B^j (1-B)^(k-j)`. The result is
/// clamped to `[0, 1]` to absorb rounding in the final ulp.
///
/// Panics if `weights` is longer than the transition table.
pub fn sentiment_step(b_prev: f64, m: &TransitionState, weights: &[f64]) -> f64 {
    assert!(
        weights.len() <= m.max_group() && weights.len() <= MAX_GROUP_SIZE,
        "{} group weights but transitions only cover L = {}",
        weights.len(),
        m.max_group()
    );
    let max_k = weights.len();
    let mut bull_pows = [1.0; MAX_GROUP_SIZE + 1];
    let mut bear_pows = [1.0; MAX_GROUP_SIZE + 1];
    let bear = 1.0 - b_prev;
    for i in 1..=max_k {
        bull_pows[i] = bull_pows[i - 1] * b_prev;
        bear_pows[i] = bear_pows[i - 1] * bear;
    }
    let mut total = 0.0;
    for (idx, &weight) in weights.iter().enumerate() {
        if weight == 0.0 {
            continue;
        }
        let k = idx + 1;
        let mut coeff = 1.0;
        let mut group = 0.0;
        for (j, &log_m) in m.log_row(k).iter().enumerate() {
            if log_m != f64::NEG_INFINITY {
                group += log_m.exp() * coeff * bull_pows[j] * bear_pows[k - j];
            }
            coeff = coeff * (k - j) as f64 / (j + 1) as f64;
        }
        total += weight * group;
    }
    total.clamp(0.0, 1.0)
}

/// Relative change of bullishness, `(B_now - B_prev) / B_prev`.
///
/// Fails with [`Error::Collapse`] (step 0) when `B_prev` is at or below
/// [`BULLISHNESS_FLOOR`]; callers fill in the step index.
pub fn bullishness_return(b_now: f64, b_prev: f64) -> Result<f64> {
    if !(b_prev > BULLISHNESS_FLOOR) {
        return Err(Error::Collapse { step: 0, bullishness: b_prev, partial: None });
    }
    Ok((b_now - b_prev) / b_prev)
}

/// `sigma0 * exp(|RB| / beta)`.
pub fn conditional_volatility(rb: f64, sigma0: f64, beta: f64) -> f64 {
    sigma0 * (rb.abs() / beta).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::params::uniform_weights;

    #[test]
    fn neutral_preserves_bullishness() {
        for l in [1, 2, 5, 12, 20] {
            let m = TransitionState::neutral(l).unwrap();
            let w = uniform_weights(l);
            let b = sentiment_step(0.35, &m, &w);
            assert!((b - 0.35).abs() < 1e-12, "L={l}: {b}");
        }
    }

    #[test]
    fn polarizing_pairs() {
        let m = TransitionState::from_probabilities(&[vec![0.0, 1.0], vec![0.0, 1.0, 1.0]]).unwrap();
        let b = sentiment_step(0.5, &m, &[0.0, 1.0]);
        assert!((b - 0.75).abs() < 1e-15);
    }

    #[test]
    fn zero_bullishness_is_absorbing_under_neutral() {
        let m = TransitionState::neutral(5).unwrap();
        assert_eq!(sentiment_step(0.0, &m, &uniform_weights(5)), 0.0);
    }

    #[test]
    fn shorter_weight_vector_uses_leading_sizes() {
        let m = TransitionState::neutral(6).unwrap();
        let b = sentiment_step(0.2, &m, &uniform_weights(3));
        assert!((b - 0.2).abs() < 1e-12);
    }

    #[test]
    fn sentiment_return_examples() {
        assert_eq!(bullishness_return(0.5, 0.5).unwrap(), 0.0);
        assert!((bullishness_return(0.55, 0.5).unwrap() - 0.1).abs() < 1e-15);
        assert!((bullishness_return(0.45, 0.5).unwrap() + 0.1).abs() < 1e-15);
    }

    #[test]
    fn sentiment_return_collapse() {
        assert!(matches!(bullishness_return(0.1, 1e-10), Err(Error::Collapse { .. })));
        assert!(matches!(bullishness_return(0.1, 0.0), Err(Error::Collapse { .. })));
        assert!(bullishness_return(0.1, 2e-10).is_ok());
    }

    #[test]
    fn volatility_examples() {
        assert_eq!(conditional_volatility(0.0, 0.01, 0.001), 0.01);
        let v = conditional_volatility(0.001, 0.01, 0.001);
        assert!((v - 0.01 * std::f64::consts::E).abs() < 1e-15);
        assert!((v - 0.027_182_8).abs() < 1e-7);
        assert_eq!(conditional_volatility(-0.3, 0.02, 0.5), conditional_volatility(0.3, 0.02, 0.5));
    }
}
