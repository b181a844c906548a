use cmdp_core::{ContextualMdp, TransitionKernel};
use serde::{Deserialize, Serialize};

use crate::distance::model_distance;
use crate::error::{EvalError, Result};

/// Context matching between two model families.
///
/// The objective is minimax (bottleneck): the matching minimizes the largest
/// per-pair model distance, because an ε-approximated CMDP requires *every*
/// matched pair to be ε-close.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmdpMatchReport {
    /// matching[c] is the index in the second family matched to context c.
    pub matching: Vec<usize>,
    /// max over matched pairs of the per-model distance.
    pub epsilon: f64,
    /// Distance of each matched pair, indexed by the first family's context.
    pub per_pair: Vec<f64>,
}

/// Brute force is exact and cheap up to this many contexts; beyond it the
/// bottleneck assignment solver takes over.
const BRUTE_FORCE_LIMIT: usize = 8;

/// Match a CMDP's true models against a list of estimated kernels.
pub fn cmdp_match(x1: &ContextualMdp, x2: &[TransitionKernel]) -> Result<CmdpMatchReport> {
    let kernels1: Vec<&TransitionKernel> = x1.kernels().collect();
    let kernels2: Vec<&TransitionKernel> = x2.iter().collect();
    match_kernel_refs(&kernels1, &kernels2)
}

/// Match two lists of kernels of equal length.
pub fn match_kernels(a: &[TransitionKernel], b: &[TransitionKernel]) -> Result<CmdpMatchReport> {
    let ra: Vec<&TransitionKernel> = a.iter().collect();
    let rb: Vec<&TransitionKernel> = b.iter().collect();
    match_kernel_refs(&ra, &rb)
}

fn match_kernel_refs(a: &[&TransitionKernel], b: &[&TransitionKernel]) -> Result<CmdpMatchReport> {
    if a.len() != b.len() {
        return Err(EvalError::InvalidParameter(format!(
            "cannot match {} contexts against {}",
            a.len(),
            b.len()
        )));
    }
    let k = a.len();
    if k == 0 {
        return Err(EvalError::InvalidParameter("cannot match zero contexts".into()));
    }
    let mut dist = vec![vec![0.0f64; k]; k];
    for i in 0..k {
        for j in 0..k {
            dist[i][j] = model_distance(a[i], b[j])?.epsilon;
        }
    }

    let matching = if k <= BRUTE_FORCE_LIMIT {
        brute_force_bottleneck(&dist)
    } else {
        threshold_bottleneck(&dist)
    };

    let per_pair: Vec<f64> = matching.iter().enumerate().map(|(i, &j)| dist[i][j]).collect();
    let epsilon = per_pair.iter().cloned().fold(0.0, f64::max);
    Ok(CmdpMatchReport { matching, epsilon, per_pair })
}

/// Exhaustive search over all K! bijections for the minimax matching.
fn brute_force_bottleneck(dist: &[Vec<f64>]) -> Vec<usize> {
    let k = dist.len();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut perm: Vec<usize> = Vec::with_capacity(k);
    let mut used = vec![false; k];
    fn recurse(
        dist: &[Vec<f64>],
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        current_max: f64,
        best: &mut Option<(f64, Vec<usize>)>,
    ) {
        let i = perm.len();
        if i == dist.len() {
            if best.as_ref().map_or(true, |(b, _)| current_max < *b) {
                *best = Some((current_max, perm.clone()));
            }
            return;
        }
        for j in 0..dist.len() {
            if used[j] {
                continue;
            }
            let m = current_max.max(dist[i][j]);
            if let Some((b, _)) = best {
                if m >= *b {
                    continue;
                }
            }
            used[j] = true;
            perm.push(j);
            recurse(dist, perm, used, m, best);
            perm.pop();
            used[j] = false;
        }
    }
    recurse(dist, &mut perm, &mut used, 0.0, &mut best);
    best.expect("at least one bijection exists").1
}

/// Bottleneck assignment by thresholding: binary-search the entry values and
/// test each threshold with an augmenting-path perfect matching.
fn threshold_bottleneck(dist: &[Vec<f64>]) -> Vec<usize> {
    let k = dist.len();
    let mut values: Vec<f64> = dist.iter().flatten().cloned().collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values.dedup();

    let feasible = |threshold: f64| -> Option<Vec<usize>> {
        // Kuhn's algorithm on the graph of edges with dist <= threshold.
        let mut match_right: Vec<Option<usize>> = vec![None; k];
        fn try_assign(
            i: usize,
            dist: &[Vec<f64>],
            threshold: f64,
            seen: &mut [bool],
            match_right: &mut [Option<usize>],
        ) -> bool {
            for j in 0..dist.len() {
                if dist[i][j] <= threshold && !seen[j] {
                    seen[j] = true;
                    if match_right[j].is_none()
                        || try_assign(match_right[j].unwrap(), dist, threshold, seen, match_right)
                    {
                        match_right[j] = Some(i);
                        return true;
                    }
                }
            }
            false
        }
        for i in 0..k {
            let mut seen = vec![false; k];
            if !try_assign(i, dist, threshold, &mut seen, &mut match_right) {
                return None;
            }
        }
        let mut matching = vec![0usize; k];
        for (j, m) in match_right.iter().enumerate() {
            matching[m.expect("perfect matching")] = j;
        }
        Some(matching)
    };

    let mut lo = 0usize;
    let mut hi = values.len() - 1;
    let mut result = feasible(values[hi]).expect("complete graph always matches");
    while lo < hi {
        let mid = (lo + hi) / 2;
        if let Some(m) = feasible(values[mid]) {
            result = m;
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmdp_core::generate_random_cmdp;

    #[test]
    fn self_match_is_zero() {
        let x = generate_random_cmdp(3, 2, 4, 8).unwrap();
        let kernels: Vec<TransitionKernel> = x.kernels().cloned().collect();
        let r = cmdp_match(&x, &kernels).unwrap();
        assert_eq!(r.epsilon, 0.0);
        assert_eq!(r.matching, vec![0, 1, 2, 3]);
    }

    #[test]
    fn reversed_contexts_matched_back() {
        let x = generate_random_cmdp(3, 2, 4, 9).unwrap();
        let mut kernels: Vec<TransitionKernel> = x.kernels().cloned().collect();
        kernels.reverse();
        let r = cmdp_match(&x, &kernels).unwrap();
        assert_eq!(r.epsilon, 0.0);
        assert_eq!(r.matching, vec![3, 2, 1, 0]);
    }

    #[test]
    fn unequal_context_counts_rejected() {
        let x = generate_random_cmdp(2, 1, 3, 1).unwrap();
        let kernels: Vec<TransitionKernel> = x.kernels().take(2).cloned().collect();
        assert!(cmdp_match(&x, &kernels).is_err());
    }

    #[test]
    fn threshold_solver_agrees_with_brute_force() {
        // Force the threshold path by matching 10 contexts, then compare with
        // the exhaustive objective computed on the same distance matrix.
        let x = generate_random_cmdp(2, 1, 10, 12).unwrap();
        let y = generate_random_cmdp(2, 1, 10, 13).unwrap();
        let ka: Vec<TransitionKernel> = x.kernels().cloned().collect();
        let kb: Vec<TransitionKernel> = y.kernels().cloned().collect();
        let r = match_kernels(&ka, &kb).unwrap();

        let mut dist = vec![vec![0.0f64; 10]; 10];
        for i in 0..10 {
            for j in 0..10 {
                dist[i][j] = model_distance(&ka[i], &kb[j]).unwrap().epsilon;
            }
        }
        let brute = brute_force_bottleneck(&dist);
        let brute_eps = brute.iter().enumerate().map(|(i, &j)| dist[i][j]).fold(0.0, f64::max);
        assert!((r.epsilon - brute_eps).abs() < 1e-15);
    }
}
