//! Evaluation machinery for contextual MDP experiments: kernel distances,
//! context matching, the clustering entropy score, regret accounting and
//! regularity checks.

pub mod distance;
pub mod entropy;
pub mod error;
pub mod ledger;
pub mod matching;
pub mod regularity;

pub use distance::{l1_row_distance, model_distance, ModelDistanceReport};
pub use entropy::entropy_score;
pub use error::{EvalError, Result};
pub use ledger::{compute_regret, BatchSummary, EpisodeRecord, RegretLedger};
pub use matching::{cmdp_match, match_kernels, CmdpMatchReport};
pub use regularity::{check_regularity, HorizonAdvisory, RegularityReport, RegularityTargets};
