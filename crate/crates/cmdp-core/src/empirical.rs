use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::kernel::TransitionKernel;
use crate::trajectory::Trajectory;

/// Visit counts and the empirical transition kernel estimated from one or
/// more trajectories.
///
/// Rows of visited (state, action) pairs are the count ratios; rows that were
/// never visited default to the uniform distribution, which keeps every row a
/// valid distribution and bounds the worst-case L1 error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalModel {
    num_states: usize,
    num_actions: usize,
    counts: Vec<u64>,
    total_visits: Vec<u64>,
    kernel_estimate: TransitionKernel,
}

impl EmpiricalModel {
    /// Estimate from a batch of trajectories; counts accumulate every
    /// (x_t, a_t, x_{t+1}) transition across all of them.
    pub fn from_trajectories<'a, I>(trajectories: I, num_states: usize, num_actions: usize) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Trajectory>,
    {
        let mut counts = vec![0u64; num_states * num_actions * num_states];
        let mut total = vec![0u64; num_states * num_actions];
        let mut any = false;
        for traj in trajectories {
            any = true;
            for (s, a, next) in traj.transitions() {
                if s >= num_states || next >= num_states {
                    return Err(CoreError::InvalidParameter(format!(
                        "state index out of range for {num_states} states"
                    )));
                }
                if a >= num_actions {
                    return Err(CoreError::InvalidParameter(format!(
                        "action index {a} out of range for {num_actions} actions"
                    )));
                }
                counts[(s * num_actions + a) * num_states + next] += 1;
                total[s * num_actions + a] += 1;
            }
        }
        if !any {
            return Err(CoreError::InvalidParameter("no trajectories given".into()));
        }
        Ok(Self::from_counts(num_states, num_actions, counts, total))
    }

    pub fn from_trajectory(trajectory: &Trajectory, num_states: usize, num_actions: usize) -> Result<Self> {
        Self::from_trajectories(std::iter::once(trajectory), num_states, num_actions)
    }

    /// Model with no observations: all rows uniform.
    pub fn empty(num_states: usize, num_actions: usize) -> Self {
        Self::from_counts(
            num_states,
            num_actions,
            vec![0; num_states * num_actions * num_states],
            vec![0; num_states * num_actions],
        )
    }

    /// Wrap a known kernel as a model with no supporting counts. Used when a
    /// caller injects ground-truth models where estimated ones are expected.
    pub fn from_kernel(kernel: TransitionKernel) -> Self {
        let num_states = kernel.num_states();
        let num_actions = kernel.num_actions();
        Self {
            num_states,
            num_actions,
            counts: vec![0; num_states * num_actions * num_states],
            total_visits: vec![0; num_states * num_actions],
            kernel_estimate: kernel,
        }
    }

    fn from_counts(num_states: usize, num_actions: usize, counts: Vec<u64>, total: Vec<u64>) -> Self {
        let uniform = 1.0 / num_states as f64;
        let mut probs = vec![0.0; counts.len()];
        for sa in 0..num_states * num_actions {
            let base = sa * num_states;
            let n = total[sa];
            if n == 0 {
                probs[base..base + num_states].fill(uniform);
            } else {
                let inv = 1.0 / n as f64;
                for next in 0..num_states {
                    probs[base + next] = counts[base + next] as f64 * inv;
                }
            }
        }
        let kernel_estimate = TransitionKernel::from_flat(num_states, num_actions, probs)
            .expect("count ratios form valid distributions");
        Self { num_states, num_actions, counts, total_visits: total, kernel_estimate }
    }

    /// Merge the counts of several models into a pooled estimate.
    pub fn pooled(models: &[&EmpiricalModel]) -> Result<Self> {
        let first = models.first().ok_or_else(|| {
            CoreError::InvalidParameter("cannot pool zero models".into())
        })?;
        let (s_n, a_n) = (first.num_states, first.num_actions);
        let mut counts = vec![0u64; s_n * a_n * s_n];
        let mut total = vec![0u64; s_n * a_n];
        for m in models {
            if m.num_states != s_n || m.num_actions != a_n {
                return Err(CoreError::DimensionMismatch("pooled models differ in shape".into()));
            }
            for (acc, &c) in counts.iter_mut().zip(&m.counts) {
                *acc += c;
            }
            for (acc, &c) in total.iter_mut().zip(&m.total_visits) {
                *acc += c;
            }
        }
        Ok(Self::from_counts(s_n, a_n, counts, total))
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn kernel_estimate(&self) -> &TransitionKernel {
        &self.kernel_estimate
    }

    pub fn visits(&self, s: usize, a: usize) -> u64 {
        self.total_visits[s * self.num_actions + a]
    }

    pub fn visited(&self, s: usize, a: usize) -> bool {
        self.visits(s, a) > 0
    }

    /// Iterate over (s, a) pairs with at least one observation.
    pub fn visited_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let a_n = self.num_actions;
        self.total_visits
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(move |(sa, _)| (sa / a_n, sa % a_n))
    }

    pub fn count(&self, s: usize, a: usize, next: usize) -> u64 {
        self.counts[(s * self.num_actions + a) * self.num_states + next]
    }

    pub fn total_transitions(&self) -> u64 {
        self.total_visits.iter().sum()
    }

    /// Flattened kernel estimate in (s, a, s') order; the embedding used for
    /// trajectory clustering.
    pub fn embedding(&self) -> Vec<f64> {
        self.kernel_estimate.as_flat().to_vec()
    }
}
