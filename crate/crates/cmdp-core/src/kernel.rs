use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Tolerance for probability-vector normalization checks.
pub const PROB_TOL: f64 = 1e-9;

/// Transition probabilities indexed by (state, action, next state).
///
/// Stored flat in (s, a, s') order; every (s, a) row is a distribution over
/// next states. Serializes as nested arrays in the same order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "KernelRepr", try_from = "KernelRepr")]
pub struct TransitionKernel {
    num_states: usize,
    num_actions: usize,
    probs: Vec<f64>,
}

impl TransitionKernel {
    /// Build from nested rows `rows[s][a][s']`, validating each distribution.
    pub fn from_rows(rows: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let num_states = rows.len();
        if num_states == 0 {
            return Err(CoreError::InvalidParameter("kernel has zero states".into()));
        }
        let num_actions = rows[0].len();
        if num_actions == 0 {
            return Err(CoreError::InvalidParameter("kernel has zero actions".into()));
        }
        let mut probs = Vec::with_capacity(num_states * num_actions * num_states);
        for (s, per_action) in rows.iter().enumerate() {
            if per_action.len() != num_actions {
                return Err(CoreError::DimensionMismatch(format!(
                    "state {s} has {} action rows, expected {num_actions}",
                    per_action.len()
                )));
            }
            for (a, row) in per_action.iter().enumerate() {
                if row.len() != num_states {
                    return Err(CoreError::DimensionMismatch(format!(
                        "row ({s},{a}) has length {}, expected {num_states}",
                        row.len()
                    )));
                }
                validate_distribution(row)
                    .map_err(|e| CoreError::InvalidDistribution(format!("row ({s},{a}): {e}")))?;
                probs.extend_from_slice(row);
            }
        }
        Ok(Self { num_states, num_actions, probs })
    }

    /// Build directly from a flat (s, a, s') buffer, validating rows.
    pub fn from_flat(num_states: usize, num_actions: usize, probs: Vec<f64>) -> Result<Self> {
        if num_states == 0 || num_actions == 0 {
            return Err(CoreError::InvalidParameter("kernel dimensions must be positive".into()));
        }
        if probs.len() != num_states * num_actions * num_states {
            return Err(CoreError::DimensionMismatch(format!(
                "flat kernel has {} entries, expected {}",
                probs.len(),
                num_states * num_actions * num_states
            )));
        }
        let k = Self { num_states, num_actions, probs };
        for s in 0..num_states {
            for a in 0..num_actions {
                validate_distribution(k.row(s, a))
                    .map_err(|e| CoreError::InvalidDistribution(format!("row ({s},{a}): {e}")))?;
            }
        }
        Ok(k)
    }

    /// Kernel with every row uniform over next states.
    pub fn uniform(num_states: usize, num_actions: usize) -> Self {
        let p = 1.0 / num_states as f64;
        Self {
            num_states,
            num_actions,
            probs: vec![p; num_states * num_actions * num_states],
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    /// Distribution over next states for one (s, a) pair.
    pub fn row(&self, s: usize, a: usize) -> &[f64] {
        let base = (s * self.num_actions + a) * self.num_states;
        &self.probs[base..base + self.num_states]
    }

    pub fn prob(&self, s: usize, a: usize, next: usize) -> f64 {
        self.probs[(s * self.num_actions + a) * self.num_states + next]
    }

    /// Flat view in (s, a, s') order.
    pub fn as_flat(&self) -> &[f64] {
        &self.probs
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.num_states == other.num_states && self.num_actions == other.num_actions
    }
}

fn validate_distribution(row: &[f64]) -> std::result::Result<(), String> {
    let mut sum = 0.0;
    for &p in row {
        if !(0.0..=1.0).contains(&p) {
            return Err(format!("entry {p} outside [0, 1]"));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(format!("sums to {sum}, expected 1"));
    }
    Ok(())
}

/// Validate an arbitrary probability vector (initial or context distribution).
pub fn validate_prob_vector(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(CoreError::InvalidDistribution(format!("{what} is empty")));
    }
    validate_distribution(v).map_err(|e| CoreError::InvalidDistribution(format!("{what}: {e}")))
}

#[derive(Serialize, Deserialize)]
struct KernelRepr {
    probs: Vec<Vec<Vec<f64>>>,
}

impl From<TransitionKernel> for KernelRepr {
    fn from(k: TransitionKernel) -> Self {
        let mut probs = Vec::with_capacity(k.num_states);
        for s in 0..k.num_states {
            let mut per_action = Vec::with_capacity(k.num_actions);
            for a in 0..k.num_actions {
                per_action.push(k.row(s, a).to_vec());
            }
            probs.push(per_action);
        }
        KernelRepr { probs }
    }
}

impl TryFrom<KernelRepr> for TransitionKernel {
    type Error = CoreError;

    fn try_from(repr: KernelRepr) -> Result<Self> {
        TransitionKernel::from_rows(repr.probs)
    }
}

/// Cumulative-distribution form of a kernel for O(log S) next-state sampling.
#[derive(Debug, Clone)]
pub struct CdfKernel {
    num_states: usize,
    num_actions: usize,
    cum: Vec<f64>,
}

impl CdfKernel {
    pub fn new(kernel: &TransitionKernel) -> Self {
        let mut cum = Vec::with_capacity(kernel.probs.len());
        for s in 0..kernel.num_states {
            for a in 0..kernel.num_actions {
                let mut acc = 0.0;
                for &p in kernel.row(s, a) {
                    acc += p;
                    cum.push(acc);
                }
            }
        }
        Self { num_states: kernel.num_states, num_actions: kernel.num_actions, cum }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    /// Inverse-CDF sample of the next state given u ∈ [0, 1).
    pub fn sample(&self, s: usize, a: usize, u: f64) -> usize {
        let base = (s * self.num_actions + a) * self.num_states;
        let row = &self.cum[base..base + self.num_states];
        let idx = row.partition_point(|&c| c <= u);
        idx.min(self.num_states - 1)
    }
}

/// Inverse-CDF sample from an arbitrary probability vector.
pub fn sample_index(dist: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    dist.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_sums_validated() {
        let bad = TransitionKernel::from_rows(vec![vec![vec![0.5, 0.4]], vec![vec![0.5, 0.5]]]);
        assert!(bad.is_err());
        let good =
            TransitionKernel::from_rows(vec![vec![vec![0.5, 0.5]], vec![vec![0.1, 0.9]]]).unwrap();
        assert_eq!(good.num_states(), 2);
        assert_eq!(good.row(1, 0), &[0.1, 0.9]);
    }

    #[test]
    fn negative_entries_rejected() {
        let bad = TransitionKernel::from_rows(vec![vec![vec![-0.1, 1.1]]]);
        assert!(bad.is_err());
    }

    #[test]
    fn uniform_rows_sum_to_one() {
        let k = TransitionKernel::uniform(100, 3);
        for s in 0..100 {
            for a in 0..3 {
                let sum: f64 = k.row(s, a).iter().sum();
                assert!((sum - 1.0).abs() < PROB_TOL);
            }
        }
    }

    #[test]
    fn cdf_sampling_matches_support() {
        let k = TransitionKernel::from_rows(vec![
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![vec![0.25, 0.75], vec![0.5, 0.5]],
        ])
        .unwrap();
        let cdf = CdfKernel::new(&k);
        assert_eq!(cdf.sample(0, 0, 0.0), 1);
        assert_eq!(cdf.sample(0, 0, 0.999), 1);
        assert_eq!(cdf.sample(0, 1, 0.999), 0);
        assert_eq!(cdf.sample(1, 0, 0.1), 0);
        assert_eq!(cdf.sample(1, 0, 0.3), 1);
    }

    #[test]
    fn sample_index_boundaries() {
        let dist = [0.2, 0.3, 0.5];
        assert_eq!(sample_index(&dist, 0.0), 0);
        assert_eq!(sample_index(&dist, 0.19), 0);
        assert_eq!(sample_index(&dist, 0.2), 1);
        assert_eq!(sample_index(&dist, 0.9999), 2);
    }

    #[test]
    fn nested_serialization_round_trips() {
        let k = TransitionKernel::from_rows(vec![
            vec![vec![0.125, 0.875], vec![1.0, 0.0]],
            vec![vec![0.5, 0.5], vec![0.0, 1.0]],
        ])
        .unwrap();
        let json = serde_json::to_string(&k).unwrap();
        let back: TransitionKernel = serde_json::from_str(&json).unwrap();
        assert_eq!(k, back);
    }
}
