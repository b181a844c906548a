use cmdp_core::{optimal_finite_horizon, seeded_rng, LiveEpisode, Mdp, Policy};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Compute the finite-horizon optimal policy on an estimated model and play
/// it out on the live episode for `remaining` steps. Returns the rewards
/// realized after each step.
pub fn dp_exploit(episode: &mut LiveEpisode<'_>, model: &Mdp, remaining: usize) -> Vec<f64> {
    if remaining == 0 {
        return Vec::new();
    }
    let solution = optimal_finite_horizon(model, remaining);
    let Policy::TimeVarying { actions } = &solution.policy else {
        unreachable!("backward induction returns a time-varying policy");
    };
    let mut rewards = Vec::with_capacity(remaining);
    for step in actions.iter().take(remaining) {
        let a = step[episode.current_state()];
        let next = episode.step(a);
        rewards.push(episode.mdp().reward(next));
    }
    rewards
}

/// Q-learning hyperparameters.
///
/// The discount keeps persistent tables convergent: with no discount and
/// tables carried across episodes, values drift upward without bound and the
/// greedy argmax tracks update recency instead of action quality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QLearningParams {
    pub learn_rate: f64,
    pub explore_rate: f64,
    pub q_init: f64,
    pub discount: f64,
}

impl Default for QLearningParams {
    fn default() -> Self {
        Self { learn_rate: 0.1, explore_rate: 0.1, q_init: 0.0, discount: 0.95 }
    }
}

impl QLearningParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.learn_rate > 0.0 && self.learn_rate <= 1.0) {
            return Err(format!("learn_rate {} outside (0, 1]", self.learn_rate));
        }
        if !(0.0..=1.0).contains(&self.explore_rate) {
            return Err(format!("explore_rate {} outside [0, 1]", self.explore_rate));
        }
        if !(self.discount > 0.0 && self.discount <= 1.0) {
            return Err(format!("discount {} outside (0, 1]", self.discount));
        }
        Ok(())
    }
}

/// Tabular action-value table persisted across the episodes classified to
/// one context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    num_states: usize,
    num_actions: usize,
    q: Vec<f64>,
}

impl QTable {
    pub fn new(num_states: usize, num_actions: usize, q_init: f64) -> Self {
        Self { num_states, num_actions, q: vec![q_init; num_states * num_actions] }
    }

    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.q[s * self.num_actions + a]
    }

    fn set(&mut self, s: usize, a: usize, v: f64) {
        self.q[s * self.num_actions + a] = v;
    }

    /// Greedy action at a state; ties break toward the lowest index.
    pub fn greedy(&self, s: usize) -> usize {
        let row = &self.q[s * self.num_actions..(s + 1) * self.num_actions];
        let mut best = row[0];
        let mut best_a = 0;
        for (a, &v) in row.iter().enumerate().skip(1) {
            if v > best {
                best = v;
                best_a = a;
            }
        }
        best_a
    }

    pub fn max_value(&self, s: usize) -> f64 {
        let row = &self.q[s * self.num_actions..(s + 1) * self.num_actions];
        row.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// One-step tabular Q-learning with ε-greedy action selection, run for
/// `remaining` steps of the live episode. Updates are undiscounted, matching
/// the finite-horizon objective; the table persists across calls so episodes
/// classified to the same context keep learning.
pub fn qlearning_exploit(
    episode: &mut LiveEpisode<'_>,
    remaining: usize,
    table: &mut QTable,
    params: &QLearningParams,
    seed: u64,
) -> Vec<f64> {
    let mut rng = seeded_rng(seed);
    let num_actions = episode.mdp().num_actions();
    let mut rewards = Vec::with_capacity(remaining);
    for _ in 0..remaining {
        let s = episode.current_state();
        let a = if rng.random::<f64>() < params.explore_rate {
            rng.random_range(0..num_actions)
        } else {
            table.greedy(s)
        };
        let next = episode.step(a);
        let r = episode.mdp().reward(next);
        let target = r + params.discount * table.max_value(next);
        let q = table.get(s, a);
        table.set(s, a, q + params.learn_rate * (target - q));
        rewards.push(r);
    }
    rewards
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmdp_core::{derive_seed, policy_value_from, CdfKernel, StartState, TransitionKernel};

    /// S=2, rewards [0, 1]; action 0 stays, action 1 swaps.
    fn stay_swap_mdp() -> Mdp {
        let k = TransitionKernel::from_rows(vec![
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        ])
        .unwrap();
        Mdp::new(k, vec![0.0, 1.0], vec![1.0, 0.0]).unwrap()
    }

    #[test]
    fn zero_remaining_is_a_no_op() {
        let mdp = stay_swap_mdp();
        let cdf = CdfKernel::new(mdp.kernel());
        let mut ep =
            LiveEpisode::new(&mdp, &cdf, None, StartState::Fixed(0), seeded_rng(0)).unwrap();
        assert!(dp_exploit(&mut ep, &mdp, 0).is_empty());
        let mut table = QTable::new(2, 2, 0.0);
        let before = table.clone();
        assert!(qlearning_exploit(&mut ep, 0, &mut table, &QLearningParams::default(), 1)
            .is_empty());
        assert_eq!(table, before);
        assert_eq!(ep.steps_taken(), 0);
    }

    #[test]
    fn dp_exploit_with_true_model_matches_dp_value() {
        // Realized average over many runs equals the optimal remaining-step
        // value from the start state (minus the start state's own reward,
        // which exploitation does not collect).
        let mdp = stay_swap_mdp();
        let cdf = CdfKernel::new(mdp.kernel());
        let remaining = 6;
        let start = 0;
        let reps = 10_000;
        let mut total = 0.0;
        for i in 0..reps {
            let mut ep = LiveEpisode::new(
                &mdp,
                &cdf,
                None,
                StartState::Fixed(start),
                seeded_rng(derive_seed(50, i)),
            )
            .unwrap();
            total += dp_exploit(&mut ep, &mdp, remaining).iter().sum::<f64>();
        }
        let mean = total / reps as f64;
        let solution = optimal_finite_horizon(&mdp, remaining);
        let mut point_mass = vec![0.0; 2];
        point_mass[start] = 1.0;
        let expected =
            policy_value_from(&mdp, &solution.policy, &point_mass, remaining) - mdp.reward(start);
        // The chain is deterministic here, so the match is exact up to
        // floating-point noise; keep a Monte-Carlo-sized tolerance anyway.
        assert!((mean - expected).abs() < 0.05, "mean {mean} vs expected {expected}");
    }

    #[test]
    fn qlearning_learns_to_move_and_stay() {
        let mdp = stay_swap_mdp();
        let cdf = CdfKernel::new(mdp.kernel());
        let mut table = QTable::new(2, 2, 0.0);
        let params = QLearningParams { learn_rate: 0.2, explore_rate: 0.2, q_init: 0.0, discount: 0.95 };
        for ep_idx in 0..100 {
            let mut ep = LiveEpisode::new(
                &mdp,
                &cdf,
                None,
                StartState::Fixed(0),
                seeded_rng(derive_seed(60, ep_idx)),
            )
            .unwrap();
            qlearning_exploit(&mut ep, 100, &mut table, &params, derive_seed(61, ep_idx));
        }
        // Greedy policy: swap out of state 0, stay in state 1.
        assert_eq!(table.greedy(0), 1);
        assert_eq!(table.greedy(1), 0);
    }

    #[test]
    fn full_exploration_rate_acts_uniformly() {
        let mdp = Mdp::new(TransitionKernel::uniform(2, 3), vec![0.5, 0.5], vec![0.5, 0.5])
            .unwrap();
        let cdf = CdfKernel::new(mdp.kernel());
        let mut ep =
            LiveEpisode::new(&mdp, &cdf, None, StartState::InitialDraw, seeded_rng(9)).unwrap();
        let mut table = QTable::new(2, 3, 0.0);
        let params = QLearningParams { learn_rate: 0.1, explore_rate: 1.0, q_init: 0.0, discount: 0.95 };
        qlearning_exploit(&mut ep, 9000, &mut table, &params, 10);
        let mut counts = [0usize; 3];
        for &a in ep.trajectory().actions() {
            counts[a] += 1;
        }
        for &c in &counts {
            let freq = c as f64 / 9000.0;
            assert!((freq - 1.0 / 3.0).abs() < 0.02, "action frequency {freq}");
        }
    }
}
