use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// One episode's realized states, actions and rewards.
///
/// For a horizon of T steps there are T+1 states, T actions and T+1 rewards
/// (the reward at every visited state, including the first and last).
/// `true_context` is the hidden label of the generating context; it is
/// carried for evaluation only and never read by learning algorithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrajectoryRepr", into = "TrajectoryRepr")]
pub struct Trajectory {
    states: Vec<usize>,
    actions: Vec<usize>,
    rewards: Vec<f64>,
    true_context: Option<usize>,
}

impl Trajectory {
    pub fn new(
        states: Vec<usize>,
        actions: Vec<usize>,
        rewards: Vec<f64>,
        true_context: Option<usize>,
    ) -> Result<Self> {
        if states.len() != actions.len() + 1 {
            return Err(CoreError::DimensionMismatch(format!(
                "{} states for {} actions",
                states.len(),
                actions.len()
            )));
        }
        if rewards.len() != states.len() {
            return Err(CoreError::DimensionMismatch(format!(
                "{} rewards for {} states",
                rewards.len(),
                states.len()
            )));
        }
        Ok(Self { states, actions, rewards, true_context })
    }

    /// Number of steps taken (T).
    pub fn horizon(&self) -> usize {
        self.actions.len()
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn true_context(&self) -> Option<usize> {
        self.true_context
    }

    pub fn total_reward(&self) -> f64 {
        self.rewards.iter().sum()
    }

    /// Iterate over (state, action, next state) transitions.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.actions
            .iter()
            .enumerate()
            .map(|(t, &a)| (self.states[t], a, self.states[t + 1]))
    }
}

#[derive(Serialize, Deserialize)]
struct TrajectoryRepr {
    states: Vec<usize>,
    actions: Vec<usize>,
    rewards: Vec<f64>,
    true_context: Option<usize>,
}

impl From<Trajectory> for TrajectoryRepr {
    fn from(t: Trajectory) -> Self {
        TrajectoryRepr {
            states: t.states,
            actions: t.actions,
            rewards: t.rewards,
            true_context: t.true_context,
        }
    }
}

impl TryFrom<TrajectoryRepr> for Trajectory {
    type Error = CoreError;

    fn try_from(r: TrajectoryRepr) -> Result<Self> {
        Trajectory::new(r.states, r.actions, r.rewards, r.true_context)
    }
}
