use cmdp_core::TransitionKernel;
use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};

/// Distance between two kernels: the maximum over (s, a) of the L1 distance
/// between their next-state rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDistanceReport {
    /// max over (s, a) of the row L1 distance; always in [0, 2].
    pub epsilon: f64,
    /// The (state, action) pair achieving the maximum.
    pub worst_pair: (usize, usize),
}

/// L1 distance between two probability rows.
pub fn l1_row_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Max-over-(s, a) L1 row distance between two kernels of the same shape.
pub fn model_distance(k1: &TransitionKernel, k2: &TransitionKernel) -> Result<ModelDistanceReport> {
    if !k1.same_shape(k2) {
        return Err(EvalError::DimensionMismatch(format!(
            "kernel shapes differ: {}x{} vs {}x{}",
            k1.num_states(),
            k1.num_actions(),
            k2.num_states(),
            k2.num_actions()
        )));
    }
    let mut epsilon = 0.0;
    let mut worst_pair = (0, 0);
    for s in 0..k1.num_states() {
        for a in 0..k1.num_actions() {
            let d = l1_row_distance(k1.row(s, a), k2.row(s, a));
            if d > epsilon {
                epsilon = d;
                worst_pair = (s, a);
            }
        }
    }
    Ok(ModelDistanceReport { epsilon, worst_pair })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_kernels_have_zero_distance() {
        let k = TransitionKernel::uniform(3, 2);
        let r = model_distance(&k, &k).unwrap();
        assert_eq!(r.epsilon, 0.0);
    }

    #[test]
    fn disjoint_point_masses_reach_two() {
        let a = TransitionKernel::from_rows(vec![
            vec![vec![1.0, 0.0]],
            vec![vec![0.5, 0.5]],
        ])
        .unwrap();
        let b = TransitionKernel::from_rows(vec![
            vec![vec![0.0, 1.0]],
            vec![vec![0.5, 0.5]],
        ])
        .unwrap();
        let r = model_distance(&a, &b).unwrap();
        assert_eq!(r.epsilon, 2.0);
        assert_eq!(r.worst_pair, (0, 0));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let a = TransitionKernel::uniform(2, 1);
        let b = TransitionKernel::uniform(3, 1);
        assert!(model_distance(&a, &b).is_err());
    }

    #[test]
    fn matches_elementwise_recomputation() {
        let a = cmdp_core::generate_random_cmdp(3, 2, 1, 50).unwrap();
        let b = cmdp_core::generate_random_cmdp(3, 2, 1, 51).unwrap();
        let (ka, kb) = (a.context(0).kernel(), b.context(0).kernel());
        let r = model_distance(ka, kb).unwrap();

        // Independent elementwise recomputation over the flat buffers.
        let mut expected = 0.0f64;
        let s_n = 3;
        let rows = 3 * 2;
        let (fa, fb) = (ka.as_flat(), kb.as_flat());
        for row in 0..rows {
            let mut acc = 0.0;
            for i in 0..s_n {
                acc += (fa[row * s_n + i] - fb[row * s_n + i]).abs();
            }
            expected = expected.max(acc);
        }
        assert!((r.epsilon - expected).abs() < 1e-15);
    }
}
