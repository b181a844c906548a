use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{CeceError, Result};
use crate::exploit::QLearningParams;
use crate::kmeans::{DEFAULT_MAX_ITERS, DEFAULT_RESTARTS};

/// Exploration budget: either an absolute step count or a fraction of the
/// horizon (T_EC = round(eta * T)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exploration {
    Steps(usize),
    Fraction(f64),
}

/// Mini-batch sizes: a constant size repeated until the episode budget is
/// exhausted, or an explicit schedule that must sum to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MinibatchSchedule {
    Constant(usize),
    Explicit(Vec<usize>),
}

/// Which clustering algorithm fills the Cluster slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClustererSlot {
    Exhaustive,
    KMeans { restarts: usize, max_iters: usize },
    /// Inject the environment's true kernels as the cluster models;
    /// an evaluation-only baseline.
    Oracle,
}

impl Default for ClustererSlot {
    fn default() -> Self {
        ClustererSlot::KMeans { restarts: DEFAULT_RESTARTS, max_iters: DEFAULT_MAX_ITERS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifierSlot {
    /// Minimum of the max-(s, a) L1 distance over visited pairs.
    #[default]
    MinL1,
    /// Minimum of the summed L1 distance over visited pairs.
    MinL1Sum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExploiterSlot {
    /// Plan with backward induction on the estimated model.
    Dp,
    /// Tabular Q-learning with per-context tables persisted across episodes.
    QLearning(QLearningParams),
}

/// Full configuration of one CECE run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CeceConfig {
    /// Number of cluster slots K (normally the environment's context count).
    pub num_contexts: usize,
    /// Total number of episodes H.
    pub total_episodes: usize,
    /// Steps per episode T.
    pub horizon: usize,
    pub exploration: Exploration,
    pub minibatches: MinibatchSchedule,
    pub clusterer: ClustererSlot,
    pub classifier: ClassifierSlot,
    pub exploiter: ExploiterSlot,
}

impl CeceConfig {
    /// Exploration steps T_EC resolved against the horizon.
    pub fn exploration_steps(&self) -> usize {
        match self.exploration {
            Exploration::Steps(n) => n,
            Exploration::Fraction(eta) => (eta * self.horizon as f64).round() as usize,
        }
    }

    /// Episode index ranges of the mini-batches, in order.
    pub fn batch_spans(&self) -> Vec<Range<usize>> {
        let mut spans = Vec::new();
        let mut start = 0usize;
        match &self.minibatches {
            MinibatchSchedule::Constant(size) => {
                while start < self.total_episodes {
                    let end = (start + size).min(self.total_episodes);
                    spans.push(start..end);
                    start = end;
                }
            }
            MinibatchSchedule::Explicit(sizes) => {
                for &size in sizes {
                    let end = (start + size).min(self.total_episodes);
                    if start < end {
                        spans.push(start..end);
                    }
                    start = end;
                }
            }
        }
        spans
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_contexts == 0 {
            return Err(CeceError::InvalidParameter("num_contexts must be positive".into()));
        }
        if self.total_episodes == 0 {
            return Err(CeceError::InvalidParameter("total_episodes must be positive".into()));
        }
        if self.horizon == 0 {
            return Err(CeceError::InvalidParameter("horizon must be positive".into()));
        }
        if let Exploration::Fraction(eta) = self.exploration {
            if !(0.0..1.0).contains(&eta) {
                return Err(CeceError::InvalidParameter(format!(
                    "exploration fraction {eta} outside [0, 1)"
                )));
            }
        }
        let t_ec = self.exploration_steps();
        if t_ec >= self.horizon {
            return Err(CeceError::InvalidParameter(format!(
                "exploration steps {t_ec} must be below the horizon {}",
                self.horizon
            )));
        }
        match &self.minibatches {
            MinibatchSchedule::Constant(size) => {
                if *size == 0 {
                    return Err(CeceError::InvalidParameter("mini-batch size must be positive".into()));
                }
            }
            MinibatchSchedule::Explicit(sizes) => {
                if sizes.iter().any(|&s| s == 0) {
                    return Err(CeceError::InvalidParameter("mini-batch sizes must be positive".into()));
                }
                let sum: usize = sizes.iter().sum();
                if sum != self.total_episodes {
                    return Err(CeceError::InvalidParameter(format!(
                        "explicit mini-batch sizes sum to {sum}, expected {}",
                        self.total_episodes
                    )));
                }
            }
        }
        let spans = self.batch_spans();
        if spans.len() > 1 && spans[0].len() < self.num_contexts {
            return Err(CeceError::InvalidParameter(format!(
                "first mini-batch ({} episodes) must hold at least num_contexts = {} \
                 episodes to seed clustering",
                spans[0].len(),
                self.num_contexts
            )));
        }
        if let ClustererSlot::KMeans { restarts, max_iters } = self.clusterer {
            if restarts == 0 || max_iters == 0 {
                return Err(CeceError::InvalidParameter(
                    "k-means restarts and max_iters must be positive".into(),
                ));
            }
        }
        if let ExploiterSlot::QLearning(p) = &self.exploiter {
            p.validate().map_err(CeceError::InvalidParameter)?;
        }
        Ok(())
    }
}
