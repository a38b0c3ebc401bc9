use crate::error::{Error, Result};

/// Transition probabilities `m_{k,j}` for every group size `1 <= k <= L`
/// and bullish count `0 <= j <= k`, stored as natural logs.
///
/// `-inf` encodes an exact zero and `0.0` encodes certainty. Every entry
/// stays `<= 0` because updates are clamped at probability one.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionState {
    // rows[k - 1][j] = ln m_{k,j}
    rows: Vec<Vec<f64>>,
}

impl TransitionState {
    /// The unbiased initial state `m_{k,j} = j/k`.
    pub fn neutral(max_group: usize) -> Result<Self> {
        if max_group < 1 {
            return Err(Error::Domain("largest group size L must be at least 1".into()));
        }
        let rows = (1..=max_group)
            .map(|k| {
                (0..=k)
                    .map(|j| if j == 0 { f64::NEG_INFINITY } else { (j as f64 / k as f64).ln() })
                    .collect()
            })
            .collect();
        Ok(Self { rows })
    }

    /// Builds a state from probabilities laid out as `probs[k - 1][j]`.
    pub fn from_probabilities(probs: &[Vec<f64>]) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Domain("transition table needs at least one group size".into()));
        }
        let mut rows = Vec::with_capacity(probs.len());
        for (idx, row) in probs.iter().enumerate() {
            let k = idx + 1;
            if row.len() != k + 1 {
                return Err(Error::Domain(format!(
                    "row for group size {k} needs {} entries, got {}",
                    k + 1,
                    row.len()
                )));
            }
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::Domain(format!("row for group size {k} has entries outside [0, 1]")));
            }
            rows.push(row.iter().map(|p| p.ln()).collect());
        }
        Ok(Self { rows })
    }

    pub fn max_group(&self) -> usize {
        self.rows.len()
    }

    /// `ln m_{k,j}`. Panics if `(k, j)` is outside the table.
    pub fn log_probability(&self, k: usize, j: usize) -> f64 {
        self.rows[k - 1][j]
    }

    /// `m_{k,j}`. Panics if `(k, j)` is outside the table.
    pub fn probability(&self, k: usize, j: usize) -> f64 {
        self.log_probability(k, j).exp()
    }

    /// Row of log-probabilities for group size `k`.
    pub fn log_row(&self, k: usize) -> &[f64] {
        &self.rows[k - 1]
    }

    /// Multiplies every entry by `exp(r / alpha)` and clamps at one, in place.
    ///
    /// The clamp is sticky: later updates continue from the clamped value,
    /// not from the unclamped product. Zero entries stay zero.
    pub fn apply_return(&mut self, r: f64, alpha: f64) {
        let shift = r / alpha;
        for row in &mut self.rows {
            for log_m in row.iter_mut() {
                *log_m = (*log_m + shift).min(0.0);
            }
        }
    }

    /// Iterates `(k, j, ln m_{k,j})` over the whole table.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(idx, row)| row.iter().enumerate().map(move |(j, &v)| (idx + 1, j, v)))
    }
}

/// Returns the state after one market return: `m' = min(1, m * exp(r / alpha))`.
pub fn transition_update(m: &TransitionState, r: f64, alpha: f64) -> TransitionState {
    let mut next = m.clone();
    next.apply_return(r, alpha);
    next
}
