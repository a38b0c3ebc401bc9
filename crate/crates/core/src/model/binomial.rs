use crate::error::{Error, Result};

/// Largest `k` for which every `C(k, j)` fits in a `u64`.
pub const EXACT_BINOMIAL_MAX: u64 = 62;

/// Exact binomial coefficient `k! / (j! (k-j)!)`.
///
/// Exact for `k <= 62`; larger `k` is rejected, use [`ln_binomial`] instead.
pub fn binomial_coefficient(k: u64, j: u64) -> Result<u64> {
    if j > k {
        return Err(Error::Domain(format!("binomial coefficient requires j <= k, got k={k}, j={j}")));
    }
    if k > EXACT_BINOMIAL_MAX {
        return Err(Error::Domain(format!(
            "exact binomial coefficient limited to k <= {EXACT_BINOMIAL_MAX}, got {k}"
        )));
    }
    let j = j.min(k - j);
    // each partial product is itself a binomial coefficient, so the division is exact
    let mut acc: u128 = 1;
    for i in 0..j {
        acc = acc * u128::from(k - i) / u128::from(i + 1);
    }
    Ok(acc as u64)
}

/// Natural log of `C(k, j)` for any `k`.
pub fn ln_binomial(k: u64, j: u64) -> Result<f64> {
    if j > k {
        return Err(Error::Domain(format!("binomial coefficient requires j <= k, got k={k}, j={j}")));
    }
    let j = j.min(k - j);
    Ok((0..j).map(|i| ((k - i) as f64).ln() - ((i + 1) as f64).ln()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u64) -> u128 {
        (1..=u128::from(n)).product()
    }

    #[test]
    fn small_values() {
        assert_eq!(binomial_coefficient(6, 2).unwrap(), 15);
        assert_eq!(binomial_coefficient(5, 3).unwrap(), 10);
        for k in 0..30 {
            assert_eq!(binomial_coefficient(k, 0).unwrap(), 1);
            assert_eq!(binomial_coefficient(k, k).unwrap(), 1);
        }
    }

    #[test]
    fn matches_factorial_identity() {
        for k in 0..=30u64 {
            for j in 0..=k {
                let expected = factorial(k) / (factorial(j) * factorial(k - j));
                assert_eq!(u128::from(binomial_coefficient(k, j).unwrap()), expected);
            }
        }
    }

    #[test]
    fn largest_exact_value() {
        assert_eq!(binomial_coefficient(62, 31).unwrap(), 465_428_353_255_261_088);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(binomial_coefficient(3, 4), Err(Error::Domain(_))));
        assert!(matches!(ln_binomial(3, 4), Err(Error::Domain(_))));
        assert!(binomial_coefficient(63, 2).is_err());
    }

    #[test]
    fn log_matches_exact() {
        for k in 0..=40u64 {
            for j in 0..=k {
                let exact = binomial_coefficient(k, j).unwrap() as f64;
                assert!((ln_binomial(k, j).unwrap() - exact.ln()).abs() < 1e-10);
            }
        }
    }
}
