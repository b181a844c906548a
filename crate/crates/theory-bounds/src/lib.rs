//! Closed-form bound calculators for the CMDP analysis and Monte-Carlo
//! verifiers for the inequalities that can be checked by simulation.

pub mod error;
pub mod rates;
pub mod simulation_lemma;
pub mod weissman;

pub use error::{BoundsError, Result};
pub use rates::{
    corollary_bound, delta2_two_term, lemma1_rates, theorem1_regret_bound,
    theorem1_regret_bound_from_rates, CorollaryBound, RateBundle, RateInputs,
};
pub use simulation_lemma::{
    perturb_kernel, simulation_lemma_bound, verify_simulation_lemma, SimLemmaTrial,
};
pub use weissman::{verify_weissman_mc, weissman_bound, BoundValue};
