//! The four pluggable algorithm slots as trait objects, with the concrete
//! implementations used by the orchestrator.

use cmdp_core::{EmpiricalModel, LiveEpisode, Mdp, Trajectory, TransitionKernel};

use crate::classify::{classify_with, L1Aggregate};
use crate::cluster::{exhaustive_cluster, ClusterAssignment};
use crate::error::Result;
use crate::exploit::{dp_exploit, qlearning_exploit, QLearningParams, QTable};
use crate::explore::uniform_explore;
use crate::kmeans::kmeans_cluster_with;

/// Groups completed trajectories into K models. `seed` feeds any internal
/// randomization; deterministic clusterers ignore it.
pub trait Clusterer {
    fn cluster(
        &self,
        trajectories: &[Trajectory],
        num_contexts: usize,
        seed: u64,
    ) -> Result<ClusterAssignment>;
}

/// Gathers identification data at the start of an episode.
pub trait Explorer {
    fn explore(&self, episode: &mut LiveEpisode<'_>, steps: usize) -> Trajectory;
}

/// Maps a partial trajectory to one of the candidate models.
pub trait Classifier {
    fn classify(&self, partial: &Trajectory, models: &[TransitionKernel]) -> Result<usize>;
}

/// Plays out the rest of an episode against a chosen model estimate.
/// `context` keys any state persisted across episodes; `stream` is a
/// per-episode seed for the exploiter's own randomness.
pub trait Exploiter {
    fn exploit(
        &mut self,
        episode: &mut LiveEpisode<'_>,
        model: &Mdp,
        context: usize,
        remaining: usize,
        stream: u64,
    ) -> Vec<f64>;
}

/// Exhaustive partition search (exact, small instances only).
pub struct ExhaustiveClusterer {
    pub num_states: usize,
    pub num_actions: usize,
}

impl Clusterer for ExhaustiveClusterer {
    fn cluster(
        &self,
        trajectories: &[Trajectory],
        num_contexts: usize,
        _seed: u64,
    ) -> Result<ClusterAssignment> {
        exhaustive_cluster(trajectories, num_contexts, self.num_states, self.num_actions)
    }
}

/// K-means on flattened empirical kernels.
pub struct KMeansClusterer {
    pub num_states: usize,
    pub num_actions: usize,
    pub restarts: usize,
    pub max_iters: usize,
}

impl Clusterer for KMeansClusterer {
    fn cluster(
        &self,
        trajectories: &[Trajectory],
        num_contexts: usize,
        seed: u64,
    ) -> Result<ClusterAssignment> {
        kmeans_cluster_with(
            trajectories,
            num_contexts,
            self.restarts,
            self.max_iters,
            seed,
            self.num_states,
            self.num_actions,
        )
    }
}

/// Injects fixed (typically ground-truth) kernels as the cluster models and
/// assigns each trajectory to its nearest one. Evaluation-only baseline.
pub struct OracleClusterer {
    pub kernels: Vec<TransitionKernel>,
}

impl Clusterer for OracleClusterer {
    fn cluster(
        &self,
        trajectories: &[Trajectory],
        num_contexts: usize,
        _seed: u64,
    ) -> Result<ClusterAssignment> {
        assert_eq!(num_contexts, self.kernels.len(), "oracle holds a fixed model count");
        let mut labels = Vec::with_capacity(trajectories.len());
        let mut score = 0.0;
        for t in trajectories {
            let label = classify_with(t, &self.kernels, L1Aggregate::Max)?;
            let emp = EmpiricalModel::from_trajectory(
                t,
                self.kernels[0].num_states(),
                self.kernels[0].num_actions(),
            )?;
            score += model_eval::model_distance(emp.kernel_estimate(), &self.kernels[label])?
                .epsilon;
            labels.push(label);
        }
        let models = self.kernels.iter().cloned().map(EmpiricalModel::from_kernel).collect();
        Ok(ClusterAssignment { labels, models, score })
    }
}

/// The uniform-policy explorer.
pub struct UniformExplorer;

impl Explorer for UniformExplorer {
    fn explore(&self, episode: &mut LiveEpisode<'_>, steps: usize) -> Trajectory {
        uniform_explore(episode, steps)
    }
}

/// Minimum-L1 classification over visited (s, a) pairs.
pub struct MinL1Classifier {
    pub aggregate: L1Aggregate,
}

impl Classifier for MinL1Classifier {
    fn classify(&self, partial: &Trajectory, models: &[TransitionKernel]) -> Result<usize> {
        classify_with(partial, models, self.aggregate)
    }
}

/// Backward-induction planner on the estimated model; stateless.
pub struct DpExploiter;

impl Exploiter for DpExploiter {
    fn exploit(
        &mut self,
        episode: &mut LiveEpisode<'_>,
        model: &Mdp,
        _context: usize,
        remaining: usize,
        _stream: u64,
    ) -> Vec<f64> {
        dp_exploit(episode, model, remaining)
    }
}

/// Q-learning exploiter with one table per context, persisted across calls.
pub struct QLearningExploiter {
    pub params: QLearningParams,
    tables: Vec<QTable>,
}

impl QLearningExploiter {
    pub fn new(params: QLearningParams, num_contexts: usize, num_states: usize, num_actions: usize) -> Self {
        let tables =
            (0..num_contexts).map(|_| QTable::new(num_states, num_actions, params.q_init)).collect();
        Self { params, tables }
    }

    pub fn table(&self, context: usize) -> &QTable {
        &self.tables[context]
    }
}

impl Exploiter for QLearningExploiter {
    fn exploit(
        &mut self,
        episode: &mut LiveEpisode<'_>,
        _model: &Mdp,
        context: usize,
        remaining: usize,
        stream: u64,
    ) -> Vec<f64> {
        qlearning_exploit(episode, remaining, &mut self.tables[context], &self.params, stream)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmdp_core::{generate_random_cmdp, simulate_episode, Policy};

    #[test]
    fn oracle_clusterer_labels_by_nearest_true_model() {
        let cmdp = generate_random_cmdp(3, 2, 2, 77).unwrap();
        let trajs: Vec<Trajectory> = (0..6)
            .map(|i| simulate_episode(&cmdp, &Policy::Uniform, 400, 900 + i).unwrap())
            .collect();
        let oracle = OracleClusterer { kernels: cmdp.kernels().cloned().collect() };
        let assignment = oracle.cluster(&trajs, 2, 0).unwrap();
        for (t, &label) in trajs.iter().zip(&assignment.labels) {
            assert_eq!(Some(label), t.true_context());
        }
    }
}
