use cmdp_core::{derive_seed, seeded_rng, EmpiricalModel, Trajectory};
use rand::Rng;

use crate::cluster::{partition_score, pool_clusters, ClusterAssignment};
use crate::error::{CeceError, Result};

/// Default Lloyd-iteration cap.
pub const DEFAULT_MAX_ITERS: usize = 100;
/// Default number of seeded restarts.
pub const DEFAULT_RESTARTS: usize = 10;

/// Plain k-means on raw f64 vectors: D²-weighted seeding, Lloyd iteration
/// with squared-Euclidean distance, convergence when assignments stop
/// changing, best of `restarts` runs by within-cluster sum of squares.
#[derive(Debug, Clone)]
pub struct KMeans {
    pub k: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl KMeans {
    pub fn new(k: usize, seed: u64) -> Self {
        Self { k, restarts: DEFAULT_RESTARTS, max_iters: DEFAULT_MAX_ITERS, seed }
    }

    /// Returns (labels, within-cluster sum of squares).
    pub fn run(&self, points: &[Vec<f64>]) -> (Vec<usize>, f64) {
        assert!(self.k >= 1 && points.len() >= self.k);
        let mut best: Option<(Vec<usize>, f64)> = None;
        for restart in 0..self.restarts.max(1) {
            let rng_seed = derive_seed(self.seed, restart as u64);
            let (labels, wcss) = self.lloyd(points, rng_seed);
            if best.as_ref().map_or(true, |(_, b)| wcss < *b) {
                best = Some((labels, wcss));
            }
        }
        best.unwrap()
    }

    fn lloyd(&self, points: &[Vec<f64>], seed: u64) -> (Vec<usize>, f64) {
        let n = points.len();
        let dim = points[0].len();
        let mut rng = seeded_rng(seed);
        let mut centroids = seed_centroids(points, self.k, &mut rng);
        let mut labels = vec![usize::MAX; n];

        for _ in 0..self.max_iters {
            let mut changed = false;
            for (i, p) in points.iter().enumerate() {
                let mut best = sq_dist(p, &centroids[0]);
                let mut best_k = 0;
                for (k, c) in centroids.iter().enumerate().skip(1) {
                    let d = sq_dist(p, c);
                    if d < best {
                        best = d;
                        best_k = k;
                    }
                }
                if labels[i] != best_k {
                    labels[i] = best_k;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            // Recompute centroids; clusters that lost every point keep their
            // previous position.
            let mut sums = vec![vec![0.0; dim]; self.k];
            let mut counts = vec![0usize; self.k];
            for (p, &l) in points.iter().zip(&labels) {
                counts[l] += 1;
                for (acc, v) in sums[l].iter_mut().zip(p) {
                    *acc += v;
                }
            }
            for k in 0..self.k {
                if counts[k] > 0 {
                    let inv = 1.0 / counts[k] as f64;
                    for (c, s) in centroids[k].iter_mut().zip(&sums[k]) {
                        *c = s * inv;
                    }
                }
            }
        }

        let wcss = points
            .iter()
            .zip(&labels)
            .map(|(p, &l)| sq_dist(p, &centroids[l]))
            .sum();
        (labels, wcss)
    }
}

/// D²-weighted seeding: first centroid uniform, each next sampled with
/// probability proportional to its squared distance from the chosen set.
fn seed_centroids<R: Rng>(points: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = points.len();
    let first = rng.random_range(0..n);
    let mut centroids = vec![points[first].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if u < w {
                    chosen = i;
                    break;
                }
                u -= w;
            }
            chosen
        } else {
            // All remaining mass at distance zero: duplicate points; any pick
            // works, take a uniform one.
            rng.random_range(0..n)
        };
        let c = points[idx].clone();
        for (d, p) in d2.iter_mut().zip(points) {
            let nd = sq_dist(p, &c);
            if nd < *d {
                *d = nd;
            }
        }
        centroids.push(c);
    }
    centroids
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

/// Cluster trajectories by k-means on their flattened empirical-kernel
/// embeddings (unvisited rows uniform), then re-estimate each cluster's model
/// by pooling its members. The reported score is the partition objective, so
/// it is directly comparable with the exhaustive clusterer's.
pub fn kmeans_cluster(
    trajectories: &[Trajectory],
    num_contexts: usize,
    restarts: usize,
    seed: u64,
    num_states: usize,
    num_actions: usize,
) -> Result<ClusterAssignment> {
    kmeans_cluster_with(
        trajectories,
        num_contexts,
        restarts,
        DEFAULT_MAX_ITERS,
        seed,
        num_states,
        num_actions,
    )
}

pub fn kmeans_cluster_with(
    trajectories: &[Trajectory],
    num_contexts: usize,
    restarts: usize,
    max_iters: usize,
    seed: u64,
    num_states: usize,
    num_actions: usize,
) -> Result<ClusterAssignment> {
    if num_contexts == 0 {
        return Err(CeceError::InvalidParameter("cluster count must be positive".into()));
    }
    if trajectories.len() < num_contexts {
        return Err(CeceError::InvalidParameter(format!(
            "{} trajectories cannot fill {} clusters",
            trajectories.len(),
            num_contexts
        )));
    }
    let per_trajectory: Vec<EmpiricalModel> = trajectories
        .iter()
        .map(|t| EmpiricalModel::from_trajectory(t, num_states, num_actions))
        .collect::<cmdp_core::Result<_>>()?;
    let points: Vec<Vec<f64>> = per_trajectory.iter().map(|m| m.embedding()).collect();

    let km = KMeans { k: num_contexts, restarts, max_iters, seed };
    let (labels, _wcss) = km.run(&points);

    let models = pool_clusters(&per_trajectory, &labels, num_contexts);
    let score = partition_score(&per_trajectory, &labels, num_contexts);
    Ok(ClusterAssignment { labels, models, score })
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmdp_core::{simulate_on_mdp, Mdp, Policy, StartState, TransitionKernel};

    #[test]
    fn single_cluster_centroid_is_mean() {
        let points = vec![vec![0.0, 0.0], vec![2.0, 2.0], vec![4.0, 1.0]];
        let km = KMeans::new(1, 7);
        let (labels, wcss) = km.run(&points);
        assert_eq!(labels, vec![0, 0, 0]);
        // WCSS around the mean (2, 1).
        let expected = 4.0 + 1.0 + 0.0 + 1.0 + 4.0 + 0.0;
        assert!((wcss - expected).abs() < 1e-12);
    }

    #[test]
    fn separates_two_obvious_blobs() {
        let mut points = Vec::new();
        for i in 0..10 {
            points.push(vec![0.0 + 0.01 * i as f64, 0.0]);
            points.push(vec![10.0 - 0.01 * i as f64, 10.0]);
        }
        let (labels, _) = KMeans::new(2, 3).run(&points);
        for i in (0..20).step_by(2) {
            assert_eq!(labels[i], labels[0]);
            assert_ne!(labels[i + 1], labels[0]);
        }
    }

    #[test]
    fn well_separated_kernels_cluster_perfectly() {
        // Two S=2 kernels with max-L1 separation 2 (disjoint rows).
        let id = Mdp::new(
            TransitionKernel::from_rows(vec![vec![vec![1.0, 0.0]], vec![vec![0.0, 1.0]]]).unwrap(),
            vec![0.5, 0.5],
            vec![0.5, 0.5],
        )
        .unwrap();
        let sw = Mdp::new(
            TransitionKernel::from_rows(vec![vec![vec![0.0, 1.0]], vec![vec![1.0, 0.0]]]).unwrap(),
            vec![0.5, 0.5],
            vec![0.5, 0.5],
        )
        .unwrap();
        let mut trajs = Vec::new();
        let mut truth = Vec::new();
        for i in 0..20 {
            trajs.push(
                simulate_on_mdp(&id, &Policy::Uniform, StartState::InitialDraw, 5000, i).unwrap(),
            );
            truth.push(0);
            trajs.push(
                simulate_on_mdp(&sw, &Policy::Uniform, StartState::InitialDraw, 5000, 1000 + i)
                    .unwrap(),
            );
            truth.push(1);
        }
        let assignment = kmeans_cluster(&trajs, 2, 5, 42, 2, 1).unwrap();
        let score = model_eval::entropy_score(&assignment.labels, &truth, 2).unwrap();
        assert_eq!(score, 0.0);
    }

    #[test]
    fn too_few_trajectories_rejected() {
        let id = Mdp::new(TransitionKernel::uniform(2, 1), vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        let t = simulate_on_mdp(&id, &Policy::Uniform, StartState::InitialDraw, 5, 0).unwrap();
        assert!(kmeans_cluster(&[t], 2, 3, 0, 2, 1).is_err());
    }
}
