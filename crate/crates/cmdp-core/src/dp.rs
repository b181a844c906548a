//! Finite-horizon dynamic programming.
//!
//! Values follow the episodic convention used everywhere in this workspace:
//! a T-step problem collects T+1 reward terms, one at every visited state
//! including the first and last.

use crate::error::Result;
use crate::mdp::Mdp;
use crate::policy::Policy;

/// Result of backward induction on a T-step problem.
#[derive(Debug, Clone)]
pub struct DpSolution {
    /// Expected optimal value from the initial distribution.
    pub value: f64,
    /// Argmax policy, one row per step; empty when the horizon is 0.
    pub policy: Policy,
    /// Optimal value started from each state (the t = 0 value row).
    pub state_values: Vec<f64>,
}

/// Backward induction over `horizon` steps. Ties in the action argmax break
/// toward the lowest index.
pub fn optimal_finite_horizon(mdp: &Mdp, horizon: usize) -> DpSolution {
    let s_n = mdp.num_states();
    let a_n = mdp.num_actions();
    let rewards = mdp.rewards();

    let mut values: Vec<f64> = rewards.to_vec();
    let mut policy_rows: Vec<Vec<usize>> = Vec::with_capacity(horizon);

    for _ in 0..horizon {
        let mut next_values = vec![0.0; s_n];
        let mut row = vec![0usize; s_n];
        for x in 0..s_n {
            let mut best = f64::NEG_INFINITY;
            let mut best_a = 0;
            for a in 0..a_n {
                let p = mdp.kernel().row(x, a);
                let mut exp = 0.0;
                for (y, &py) in p.iter().enumerate() {
                    exp += py * values[y];
                }
                if exp > best {
                    best = exp;
                    best_a = a;
                }
            }
            next_values[x] = rewards[x] + best;
            row[x] = best_a;
        }
        values = next_values;
        policy_rows.push(row);
    }
    // Backward induction fills rows from the last step toward the first.
    policy_rows.reverse();

    let value = mdp
        .initial_dist()
        .iter()
        .zip(&values)
        .map(|(p, v)| p * v)
        .sum();
    DpSolution { value, policy: Policy::TimeVarying { actions: policy_rows }, state_values: values }
}

/// Exact expected cumulative reward of a policy by forward propagation of the
/// state distribution (no sampling).
pub fn policy_value(mdp: &Mdp, policy: &Policy, horizon: usize) -> Result<f64> {
    policy.validate(mdp.num_states(), mdp.num_actions(), horizon)?;
    Ok(policy_value_from(mdp, policy, mdp.initial_dist(), horizon))
}

/// As [`policy_value`] but from an explicit start distribution.
pub fn policy_value_from(mdp: &Mdp, policy: &Policy, start: &[f64], horizon: usize) -> f64 {
    let s_n = mdp.num_states();
    let a_n = mdp.num_actions();
    let mut dist = start.to_vec();
    let mut total = 0.0;
    for t in 0..horizon {
        total += dist.iter().zip(mdp.rewards()).map(|(d, r)| d * r).sum::<f64>();
        let mut next = vec![0.0; s_n];
        for x in 0..s_n {
            let dx = dist[x];
            if dx == 0.0 {
                continue;
            }
            for a in 0..a_n {
                let pa = policy.action_prob(t, x, a, a_n);
                if pa == 0.0 {
                    continue;
                }
                let w = dx * pa;
                for (y, &py) in mdp.kernel().row(x, a).iter().enumerate() {
                    next[y] += w * py;
                }
            }
        }
        dist = next;
    }
    total += dist.iter().zip(mdp.rewards()).map(|(d, r)| d * r).sum::<f64>();
    total
}
