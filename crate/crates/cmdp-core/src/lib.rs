//! Tabular MDPs with latent contexts: data model, random instance
//! generation, trajectory simulation, empirical model estimation and
//! finite-horizon dynamic programming.
//!
//! Everything randomized takes an explicit seed and is reproducible bit for
//! bit; see [`rng`] for how sub-streams are derived.

pub mod dp;
pub mod empirical;
pub mod error;
pub mod generate;
pub mod kernel;
pub mod mdp;
pub mod policy;
pub mod rng;
pub mod serialize;
pub mod simulate;
pub mod trajectory;

pub use dp::{optimal_finite_horizon, policy_value, policy_value_from, DpSolution};
pub use empirical::EmpiricalModel;
pub use error::{CoreError, Result};
pub use generate::generate_random_cmdp;
pub use kernel::{CdfKernel, TransitionKernel, PROB_TOL};
pub use mdp::{ContextualMdp, Mdp};
pub use policy::Policy;
pub use rng::{derive_seed, mix64, seeded_rng};
pub use simulate::{simulate_episode, simulate_on_mdp, LiveEpisode, StartState};
pub use trajectory::Trajectory;
