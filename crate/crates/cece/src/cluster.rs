use cmdp_core::{EmpiricalModel, Trajectory};
use serde::{Deserialize, Serialize};

use crate::error::{CeceError, Result};

/// Largest trajectory count the exhaustive clusterer will accept; set
/// partitions grow like the Bell numbers beyond this.
pub const EXHAUSTIVE_LIMIT: usize = 12;

/// A partition of trajectories into clusters together with the per-cluster
/// pooled models and the partition's objective value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    /// Cluster index of each trajectory, in input order.
    pub labels: Vec<usize>,
    /// One pooled model per cluster; clusters left empty get the uniform
    /// (zero-count) model.
    pub models: Vec<EmpiricalModel>,
    /// Value of the clustering objective for this partition.
    pub score: f64,
}

impl ClusterAssignment {
    pub fn num_clusters(&self) -> usize {
        self.models.len()
    }
}

/// The clustering objective for a given labeling: for every cluster, the sum
/// over member trajectories of the max-(s, a) L1 distance between the
/// trajectory's empirical kernel and the cluster's pooled kernel.
pub fn partition_score(
    per_trajectory: &[EmpiricalModel],
    labels: &[usize],
    num_clusters: usize,
) -> f64 {
    let pooled = pool_clusters(per_trajectory, labels, num_clusters);
    let mut score = 0.0;
    for k in 0..num_clusters {
        for (h, model) in per_trajectory.iter().enumerate() {
            if labels[h] != k {
                continue;
            }
            score += max_l1_to_pooled(model, &pooled[k]);
        }
    }
    score
}

/// Pool the members of each cluster into one model; empty clusters pool to
/// the zero-count (all-uniform) model.
pub fn pool_clusters(
    per_trajectory: &[EmpiricalModel],
    labels: &[usize],
    num_clusters: usize,
) -> Vec<EmpiricalModel> {
    let (s_n, a_n) = match per_trajectory.first() {
        Some(m) => (m.num_states(), m.num_actions()),
        None => return Vec::new(),
    };
    (0..num_clusters)
        .map(|k| {
            let members: Vec<&EmpiricalModel> = per_trajectory
                .iter()
                .zip(labels)
                .filter(|(_, &l)| l == k)
                .map(|(m, _)| m)
                .collect();
            if members.is_empty() {
                EmpiricalModel::empty(s_n, a_n)
            } else {
                EmpiricalModel::pooled(&members).expect("member shapes agree")
            }
        })
        .collect()
}

fn max_l1_to_pooled(a: &EmpiricalModel, b: &EmpiricalModel) -> f64 {
    model_eval::model_distance(a.kernel_estimate(), b.kernel_estimate())
        .expect("shapes agree")
        .epsilon
}

/// Exhaustive search over all partitions into at most `num_contexts`
/// nonempty blocks, minimizing [`partition_score`]. Exact but exponential;
/// refuses instances above [`EXHAUSTIVE_LIMIT`].
pub fn exhaustive_cluster(
    trajectories: &[Trajectory],
    num_contexts: usize,
    num_states: usize,
    num_actions: usize,
) -> Result<ClusterAssignment> {
    let h = trajectories.len();
    if h == 0 {
        return Err(CeceError::InvalidParameter("no trajectories to cluster".into()));
    }
    if h > EXHAUSTIVE_LIMIT {
        return Err(CeceError::ExhaustiveLimitExceeded { count: h, limit: EXHAUSTIVE_LIMIT });
    }
    if num_contexts == 0 || num_contexts > h {
        return Err(CeceError::InvalidParameter(format!(
            "cluster count {num_contexts} must be in 1..={h}"
        )));
    }

    let per_trajectory: Vec<EmpiricalModel> = trajectories
        .iter()
        .map(|t| EmpiricalModel::from_trajectory(t, num_states, num_actions))
        .collect::<cmdp_core::Result<_>>()?;

    let mut best_labels: Option<Vec<usize>> = None;
    let mut best_score = f64::INFINITY;
    for_each_partition(h, num_contexts, |labels| {
        let score = partition_score(&per_trajectory, labels, num_contexts);
        if score < best_score {
            best_score = score;
            best_labels = Some(labels.to_vec());
        }
    });

    let labels = best_labels.expect("at least one partition exists");
    let models = pool_clusters(&per_trajectory, &labels, num_contexts);
    Ok(ClusterAssignment { labels, models, score: best_score })
}

/// Visit every set partition of {0..n} with at most `max_blocks` blocks,
/// encoded as restricted-growth labelings (block indices appear in first-use
/// order, so each partition is visited exactly once).
pub fn for_each_partition<F: FnMut(&[usize])>(n: usize, max_blocks: usize, mut f: F) {
    let mut labels = vec![0usize; n];
    fn recurse<F: FnMut(&[usize])>(
        i: usize,
        used: usize,
        max_blocks: usize,
        labels: &mut Vec<usize>,
        f: &mut F,
    ) {
        let n = labels.len();
        if i == n {
            f(labels);
            return;
        }
        let cap = (used + 1).min(max_blocks);
        for b in 0..cap {
            labels[i] = b;
            recurse(i + 1, used.max(b + 1), max_blocks, labels, f);
        }
    }
    recurse(0, 0, max_blocks, &mut labels, &mut f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmdp_core::{simulate_on_mdp, Mdp, Policy, StartState, TransitionKernel};

    fn mdp_from_kernel(k: TransitionKernel) -> Mdp {
        let s = k.num_states();
        Mdp::new(k, vec![0.5; s], vec![1.0 / s as f64; s]).unwrap()
    }

    fn identity_kernel() -> TransitionKernel {
        TransitionKernel::from_rows(vec![vec![vec![1.0, 0.0]], vec![vec![0.0, 1.0]]]).unwrap()
    }

    fn swap_kernel() -> TransitionKernel {
        TransitionKernel::from_rows(vec![vec![vec![0.0, 1.0]], vec![vec![1.0, 0.0]]]).unwrap()
    }

    #[test]
    fn partition_enumeration_counts() {
        // Partitions of 4 elements into at most 2 blocks: S(4,1) + S(4,2) = 8.
        let mut count = 0;
        for_each_partition(4, 2, |_| count += 1);
        assert_eq!(count, 8);
        // Bell number B(5) = 52 with unlimited blocks.
        let mut count = 0;
        for_each_partition(5, 5, |_| count += 1);
        assert_eq!(count, 52);
    }

    #[test]
    fn identical_trajectories_single_cluster_score_zero() {
        let mdp = mdp_from_kernel(identity_kernel());
        let t = simulate_on_mdp(&mdp, &Policy::Uniform, StartState::Fixed(0), 10, 1).unwrap();
        let assignment = exhaustive_cluster(&[t.clone(), t], 1, 2, 1).unwrap();
        assert_eq!(assignment.labels, vec![0, 0]);
        assert_eq!(assignment.score, 0.0);
    }

    #[test]
    fn separates_identity_from_swap() {
        let id = mdp_from_kernel(identity_kernel());
        let sw = mdp_from_kernel(swap_kernel());
        let mut trajs = Vec::new();
        for i in 0..2 {
            trajs.push(simulate_on_mdp(&id, &Policy::Uniform, StartState::InitialDraw, 40, i).unwrap());
        }
        for i in 2..4 {
            trajs.push(simulate_on_mdp(&sw, &Policy::Uniform, StartState::InitialDraw, 40, i).unwrap());
        }
        let assignment = exhaustive_cluster(&trajs, 2, 2, 1).unwrap();
        assert_eq!(assignment.labels[0], assignment.labels[1]);
        assert_eq!(assignment.labels[2], assignment.labels[3]);
        assert_ne!(assignment.labels[0], assignment.labels[2]);

        // The chosen partition beats every mixed two-block partition.
        let per: Vec<EmpiricalModel> = trajs
            .iter()
            .map(|t| EmpiricalModel::from_trajectory(t, 2, 1).unwrap())
            .collect();
        for_each_partition(4, 2, |labels| {
            let s = partition_score(&per, labels, 2);
            assert!(assignment.score <= s + 1e-12);
        });
    }

    #[test]
    fn refuses_oversized_instances() {
        let mdp = mdp_from_kernel(identity_kernel());
        let trajs: Vec<Trajectory> = (0..13)
            .map(|i| simulate_on_mdp(&mdp, &Policy::Uniform, StartState::InitialDraw, 5, i).unwrap())
            .collect();
        let err = exhaustive_cluster(&trajs, 2, 2, 1).unwrap_err();
        assert!(err.to_string().contains("k-means"));
    }
}
