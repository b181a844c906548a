use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::kernel::{sample_index, CdfKernel};
use crate::mdp::{ContextualMdp, Mdp};
use crate::policy::Policy;
use crate::rng::seeded_rng;
use crate::trajectory::Trajectory;

/// How to choose the first state of an episode.
#[derive(Debug, Clone, Copy)]
pub enum StartState {
    /// Draw from the MDP's initial distribution.
    InitialDraw,
    /// Start at a fixed state index.
    Fixed(usize),
}

/// An in-progress episode on a fixed (hidden) MDP.
///
/// The episode owns its RNG stream; actions may come from a policy, from the
/// uniform rule, or from an external controller one step at a time. All draws
/// pull from the same per-episode stream, so a given seed fixes the entire
/// episode regardless of which controller drives it.
pub struct LiveEpisode<'a> {
    mdp: &'a Mdp,
    cdf: &'a CdfKernel,
    true_context: Option<usize>,
    states: Vec<usize>,
    actions: Vec<usize>,
    rng: ChaCha8Rng,
}

impl<'a> LiveEpisode<'a> {
    /// Start an episode on a known MDP with the given RNG stream.
    pub fn new(
        mdp: &'a Mdp,
        cdf: &'a CdfKernel,
        true_context: Option<usize>,
        start: StartState,
        mut rng: ChaCha8Rng,
    ) -> Result<Self> {
        let x0 = match start {
            StartState::InitialDraw => {
                let u: f64 = rng.random();
                sample_index(mdp.initial_dist(), u)
            }
            StartState::Fixed(x) => {
                if x >= mdp.num_states() {
                    return Err(CoreError::InvalidParameter(format!(
                        "start state {x} out of range for {} states",
                        mdp.num_states()
                    )));
                }
                x
            }
        };
        Ok(Self { mdp, cdf, true_context, states: vec![x0], actions: Vec::new(), rng })
    }

    /// Start an episode on a CMDP: the context is drawn from the context
    /// distribution, then the initial state from the shared initial
    /// distribution, all from this episode's stream.
    pub fn from_cmdp(cmdp: &'a ContextualMdp, cdfs: &'a [CdfKernel], seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let u: f64 = rng.random();
        let c = sample_index(cmdp.context_dist(), u);
        Self::new(cmdp.context(c), &cdfs[c], Some(c), StartState::InitialDraw, rng)
            .expect("initial draw cannot fail")
    }

    pub fn mdp(&self) -> &Mdp {
        self.mdp
    }

    pub fn true_context(&self) -> Option<usize> {
        self.true_context
    }

    pub fn current_state(&self) -> usize {
        *self.states.last().unwrap()
    }

    pub fn steps_taken(&self) -> usize {
        self.actions.len()
    }

    /// Execute one action; returns the next state.
    pub fn step(&mut self, action: usize) -> usize {
        debug_assert!(action < self.mdp.num_actions());
        let s = self.current_state();
        let u: f64 = self.rng.random();
        let next = self.cdf.sample(s, action, u);
        self.actions.push(action);
        self.states.push(next);
        next
    }

    /// Execute one uniformly random action; returns (action, next state).
    pub fn step_uniform(&mut self) -> (usize, usize) {
        let a = self.rng.random_range(0..self.mdp.num_actions());
        (a, self.step(a))
    }

    /// Execute one action chosen by `policy` at step index `t`.
    pub fn step_policy(&mut self, policy: &Policy, t: usize) -> (usize, usize) {
        let s = self.current_state();
        let a = policy.sample_action(t, s, self.mdp.num_actions(), &mut self.rng);
        (a, self.step(a))
    }

    /// Draw a uniform float from the episode stream (for controllers that
    /// need extra randomness tied to this episode).
    pub fn random_unit(&mut self) -> f64 {
        self.rng.random()
    }

    /// Snapshot of everything seen so far, with rewards filled in from the
    /// underlying MDP.
    pub fn trajectory(&self) -> Trajectory {
        let rewards = self.states.iter().map(|&x| self.mdp.reward(x)).collect();
        Trajectory::new(self.states.clone(), self.actions.clone(), rewards, self.true_context)
            .expect("episode buffers stay consistent")
    }

    /// Snapshot of the first `steps` transitions only.
    pub fn partial_trajectory(&self, steps: usize) -> Trajectory {
        let steps = steps.min(self.actions.len());
        let states = self.states[..=steps].to_vec();
        let rewards = states.iter().map(|&x| self.mdp.reward(x)).collect();
        Trajectory::new(states, self.actions[..steps].to_vec(), rewards, self.true_context)
            .expect("episode buffers stay consistent")
    }
}

/// Simulate one full episode on a CMDP: the environment draws a context, then
/// the policy interacts for `horizon` steps.
pub fn simulate_episode(
    cmdp: &ContextualMdp,
    policy: &Policy,
    horizon: usize,
    seed: u64,
) -> Result<Trajectory> {
    if horizon == 0 {
        return Err(CoreError::InvalidParameter("horizon must be at least 1".into()));
    }
    policy.validate(cmdp.num_states(), cmdp.num_actions(), horizon)?;
    let mut rng = seeded_rng(seed);
    let u: f64 = rng.random();
    let c = sample_index(cmdp.context_dist(), u);
    let cdf = CdfKernel::new(cmdp.context(c).kernel());
    let mut ep = LiveEpisode::new(cmdp.context(c), &cdf, Some(c), StartState::InitialDraw, rng)?;
    for t in 0..horizon {
        ep.step_policy(policy, t);
    }
    Ok(ep.trajectory())
}

/// Simulate on a fixed known MDP (no latent context), optionally from a fixed
/// start state.
pub fn simulate_on_mdp(
    mdp: &Mdp,
    policy: &Policy,
    start: StartState,
    horizon: usize,
    seed: u64,
) -> Result<Trajectory> {
    if horizon == 0 {
        return Err(CoreError::InvalidParameter("horizon must be at least 1".into()));
    }
    policy.validate(mdp.num_states(), mdp.num_actions(), horizon)?;
    let cdf = CdfKernel::new(mdp.kernel());
    let mut ep = LiveEpisode::new(mdp, &cdf, None, start, seeded_rng(seed))?;
    for t in 0..horizon {
        ep.step_policy(policy, t);
    }
    Ok(ep.trajectory())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::TransitionKernel;

    fn self_loop_mdp(num_states: usize) -> Mdp {
        let mut rows = Vec::new();
        for s in 0..num_states {
            let mut row = vec![0.0; num_states];
            row[s] = 1.0;
            rows.push(vec![row]);
        }
        let mut initial = vec![0.0; num_states];
        initial[0] = 1.0;
        Mdp::new(
            TransitionKernel::from_rows(rows).unwrap(),
            vec![0.5; num_states],
            initial,
        )
        .unwrap()
    }

    #[test]
    fn degenerate_chain_stays_put() {
        let mdp = self_loop_mdp(1);
        let cmdp = ContextualMdp::single(mdp);
        let t = simulate_episode(&cmdp, &Policy::Uniform, 5, 17).unwrap();
        assert_eq!(t.states(), &[0, 0, 0, 0, 0, 0]);
        assert_eq!(t.true_context(), Some(0));
    }

    #[test]
    fn fixed_start_respected_and_validated() {
        let mdp = self_loop_mdp(4);
        let t = simulate_on_mdp(&mdp, &Policy::Uniform, StartState::Fixed(3), 4, 0).unwrap();
        assert_eq!(t.states(), &[3, 3, 3, 3, 3]);
        assert!(t.true_context().is_none());
        assert!(simulate_on_mdp(&mdp, &Policy::Uniform, StartState::Fixed(4), 4, 0).is_err());
    }

    #[test]
    fn one_step_length_contract() {
        let mdp = self_loop_mdp(2);
        let t = simulate_on_mdp(&mdp, &Policy::Uniform, StartState::InitialDraw, 1, 5).unwrap();
        assert_eq!(t.actions().len(), 1);
        assert_eq!(t.states().len(), 2);
        assert_eq!(t.rewards().len(), 2);
    }

    #[test]
    fn rewards_match_visited_states() {
        let k = TransitionKernel::from_rows(vec![
            vec![vec![0.0, 1.0]],
            vec![vec![1.0, 0.0]],
        ])
        .unwrap();
        let mdp = Mdp::new(k, vec![0.25, 0.75], vec![1.0, 0.0]).unwrap();
        let t = simulate_on_mdp(&mdp, &Policy::Uniform, StartState::InitialDraw, 3, 1).unwrap();
        for (x, r) in t.states().iter().zip(t.rewards()) {
            assert_eq!(*r, mdp.reward(*x));
        }
        assert_eq!(t.states(), &[0, 1, 0, 1]);
    }

    #[test]
    fn same_seed_same_trajectory() {
        let cmdp = crate::generate::generate_random_cmdp(4, 2, 3, 11).unwrap();
        let a = simulate_episode(&cmdp, &Policy::Uniform, 50, 123).unwrap();
        let b = simulate_episode(&cmdp, &Policy::Uniform, 50, 123).unwrap();
        assert_eq!(a, b);
    }
}
