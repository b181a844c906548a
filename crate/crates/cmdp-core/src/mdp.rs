use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::kernel::{validate_prob_vector, TransitionKernel, PROB_TOL};

/// Tabular MDP with state-based rewards in [0, 1] and an initial state
/// distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MdpRepr", into = "MdpRepr")]
pub struct Mdp {
    num_states: usize,
    num_actions: usize,
    kernel: TransitionKernel,
    rewards: Vec<f64>,
    initial_dist: Vec<f64>,
}

impl Mdp {
    pub fn new(kernel: TransitionKernel, rewards: Vec<f64>, initial_dist: Vec<f64>) -> Result<Self> {
        let num_states = kernel.num_states();
        let num_actions = kernel.num_actions();
        if rewards.len() != num_states {
            return Err(CoreError::DimensionMismatch(format!(
                "{} rewards for {} states",
                rewards.len(),
                num_states
            )));
        }
        for (x, &r) in rewards.iter().enumerate() {
            if !(0.0..=1.0).contains(&r) {
                return Err(CoreError::InvalidParameter(format!(
                    "reward {r} at state {x} outside [0, 1]"
                )));
            }
        }
        if initial_dist.len() != num_states {
            return Err(CoreError::DimensionMismatch(format!(
                "initial distribution over {} states, expected {}",
                initial_dist.len(),
                num_states
            )));
        }
        validate_prob_vector(&initial_dist, "initial distribution")?;
        Ok(Self { num_states, num_actions, kernel, rewards, initial_dist })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn kernel(&self) -> &TransitionKernel {
        &self.kernel
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn reward(&self, state: usize) -> f64 {
        self.rewards[state]
    }

    pub fn initial_dist(&self) -> &[f64] {
        &self.initial_dist
    }
}

#[derive(Serialize, Deserialize)]
struct MdpRepr {
    kernel: TransitionKernel,
    rewards: Vec<f64>,
    initial_dist: Vec<f64>,
}

impl From<Mdp> for MdpRepr {
    fn from(m: Mdp) -> Self {
        MdpRepr { kernel: m.kernel, rewards: m.rewards, initial_dist: m.initial_dist }
    }
}

impl TryFrom<MdpRepr> for Mdp {
    type Error = CoreError;

    fn try_from(r: MdpRepr) -> Result<Self> {
        Mdp::new(r.kernel, r.rewards, r.initial_dist)
    }
}

/// A family of MDPs over shared state/action spaces, rewards and initial
/// distribution, indexed by a latent context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CmdpRepr", into = "CmdpRepr")]
pub struct ContextualMdp {
    contexts: Vec<Mdp>,
    context_dist: Vec<f64>,
}

impl ContextualMdp {
    pub fn new(contexts: Vec<Mdp>, context_dist: Vec<f64>) -> Result<Self> {
        if contexts.is_empty() {
            return Err(CoreError::InvalidParameter("CMDP needs at least one context".into()));
        }
        if context_dist.len() != contexts.len() {
            return Err(CoreError::DimensionMismatch(format!(
                "context distribution over {} contexts, expected {}",
                context_dist.len(),
                contexts.len()
            )));
        }
        validate_prob_vector(&context_dist, "context distribution")?;
        let first = &contexts[0];
        for (c, m) in contexts.iter().enumerate().skip(1) {
            if m.num_states() != first.num_states() || m.num_actions() != first.num_actions() {
                return Err(CoreError::DimensionMismatch(format!(
                    "context {c} has different state/action spaces"
                )));
            }
            if !rewards_equal(m.rewards(), first.rewards()) {
                return Err(CoreError::InvalidParameter(format!(
                    "context {c} has different rewards; rewards are shared"
                )));
            }
            if !rewards_equal(m.initial_dist(), first.initial_dist()) {
                return Err(CoreError::InvalidParameter(format!(
                    "context {c} has different initial distribution; it is shared"
                )));
            }
        }
        Ok(Self { contexts, context_dist })
    }

    /// Single-context CMDP wrapping one MDP.
    pub fn single(mdp: Mdp) -> Self {
        Self { contexts: vec![mdp], context_dist: vec![1.0] }
    }

    pub fn num_contexts(&self) -> usize {
        self.contexts.len()
    }

    pub fn num_states(&self) -> usize {
        self.contexts[0].num_states()
    }

    pub fn num_actions(&self) -> usize {
        self.contexts[0].num_actions()
    }

    pub fn context(&self, c: usize) -> &Mdp {
        &self.contexts[c]
    }

    pub fn contexts(&self) -> &[Mdp] {
        &self.contexts
    }

    pub fn context_dist(&self) -> &[f64] {
        &self.context_dist
    }

    /// Rewards shared by every context.
    pub fn rewards(&self) -> &[f64] {
        self.contexts[0].rewards()
    }

    /// Initial state distribution shared by every context.
    pub fn initial_dist(&self) -> &[f64] {
        self.contexts[0].initial_dist()
    }

    pub fn kernels(&self) -> impl Iterator<Item = &TransitionKernel> {
        self.contexts.iter().map(|m| m.kernel())
    }
}

fn rewards_equal(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= PROB_TOL)
}

#[derive(Serialize, Deserialize)]
struct CmdpRepr {
    contexts: Vec<Mdp>,
    context_dist: Vec<f64>,
}

impl From<ContextualMdp> for CmdpRepr {
    fn from(c: ContextualMdp) -> Self {
        CmdpRepr { contexts: c.contexts, context_dist: c.context_dist }
    }
}

impl TryFrom<CmdpRepr> for ContextualMdp {
    type Error = CoreError;

    fn try_from(r: CmdpRepr) -> Result<Self> {
        ContextualMdp::new(r.contexts, r.context_dist)
    }
}
