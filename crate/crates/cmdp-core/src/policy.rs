use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::kernel::{sample_index, PROB_TOL};

/// An action-selection rule. Time-varying policies index by (step, state);
/// the rest index by state alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Policy {
    Uniform,
    /// state -> action
    Deterministic { actions: Vec<usize> },
    /// state -> distribution over actions
    Stochastic { action_probs: Vec<Vec<f64>> },
    /// step -> state -> action
    TimeVarying { actions: Vec<Vec<usize>> },
}

impl Policy {
    /// Check the policy covers `num_states` states, `num_actions` actions and
    /// (for time-varying tables) at least `horizon` steps.
    pub fn validate(&self, num_states: usize, num_actions: usize, horizon: usize) -> Result<()> {
        match self {
            Policy::Uniform => Ok(()),
            Policy::Deterministic { actions } => {
                if actions.len() != num_states {
                    return Err(CoreError::DimensionMismatch(format!(
                        "deterministic policy covers {} states, expected {num_states}",
                        actions.len()
                    )));
                }
                for (x, &a) in actions.iter().enumerate() {
                    if a >= num_actions {
                        return Err(CoreError::InvalidParameter(format!(
                            "action {a} at state {x} out of range"
                        )));
                    }
                }
                Ok(())
            }
            Policy::Stochastic { action_probs } => {
                if action_probs.len() != num_states {
                    return Err(CoreError::DimensionMismatch(format!(
                        "stochastic policy covers {} states, expected {num_states}",
                        action_probs.len()
                    )));
                }
                for (x, row) in action_probs.iter().enumerate() {
                    if row.len() != num_actions {
                        return Err(CoreError::DimensionMismatch(format!(
                            "state {x} row has {} actions, expected {num_actions}",
                            row.len()
                        )));
                    }
                    let sum: f64 = row.iter().sum();
                    if (sum - 1.0).abs() > PROB_TOL || row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                        return Err(CoreError::InvalidDistribution(format!(
                            "state {x} action distribution is not a probability vector"
                        )));
                    }
                }
                Ok(())
            }
            Policy::TimeVarying { actions } => {
                if actions.len() < horizon {
                    return Err(CoreError::DimensionMismatch(format!(
                        "time-varying policy covers {} steps, expected at least {horizon}",
                        actions.len()
                    )));
                }
                for (t, per_state) in actions.iter().enumerate() {
                    if per_state.len() != num_states {
                        return Err(CoreError::DimensionMismatch(format!(
                            "step {t} covers {} states, expected {num_states}",
                            per_state.len()
                        )));
                    }
                    for (x, &a) in per_state.iter().enumerate() {
                        if a >= num_actions {
                            return Err(CoreError::InvalidParameter(format!(
                                "action {a} at (step {t}, state {x}) out of range"
                            )));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Sample an action at (step, state). Deterministic kinds consume no
    /// randomness.
    pub fn sample_action<R: Rng>(&self, step: usize, state: usize, num_actions: usize, rng: &mut R) -> usize {
        match self {
            Policy::Uniform => rng.random_range(0..num_actions),
            Policy::Deterministic { actions } => actions[state],
            Policy::Stochastic { action_probs } => {
                let u: f64 = rng.random();
                sample_index(&action_probs[state], u)
            }
            Policy::TimeVarying { actions } => actions[step][state],
        }
    }

    /// Probability of choosing `action` at (step, state).
    pub fn action_prob(&self, step: usize, state: usize, action: usize, num_actions: usize) -> f64 {
        match self {
            Policy::Uniform => 1.0 / num_actions as f64,
            Policy::Deterministic { actions } => {
                if actions[state] == action {
                    1.0
                } else {
                    0.0
                }
            }
            Policy::Stochastic { action_probs } => action_probs[state][action],
            Policy::TimeVarying { actions } => {
                if actions[step][state] == action {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}
