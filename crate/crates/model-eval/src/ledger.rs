use serde::{Deserialize, Serialize};

/// Per-episode accounting entry.
///
/// `optimal_value` is the optimal T-step value of the episode's true context
/// (an evaluation-only oracle); `realized_reward` is what the agent actually
/// collected, split into exploration and exploitation phases at the phase
/// boundary (the reward at the boundary state belongs to exploration).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub batch: usize,
    pub optimal_value: f64,
    pub realized_reward: f64,
    pub exploration_reward: f64,
    pub exploitation_reward: f64,
    pub true_context: usize,
    /// Raw cluster index chosen by the classifier; None when the episode ran
    /// unclassified (bootstrap batch or classification failure with uniform
    /// fallback).
    pub classified_cluster: Option<usize>,
    /// The classified cluster translated to a true-context index by matching
    /// the batch's cluster models against the environment's kernels.
    /// Evaluation-only, like `optimal_value`; None when no translation
    /// exists (unclassified, or cluster count differs from context count).
    pub classified_context: Option<usize>,
    pub exploration_steps: usize,
    /// Set when the classifier returned an error for this episode.
    pub classification_failed: bool,
}

impl EpisodeRecord {
    pub fn regret(&self) -> f64 {
        self.optimal_value - self.realized_reward
    }

    pub fn correct_classification(&self) -> bool {
        self.classified_context == Some(self.true_context)
    }
}

/// Aggregates over one mini-batch, recomputed from the records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub batch: usize,
    pub episodes: usize,
    pub total_regret: f64,
    pub total_optimal: f64,
    pub total_realized: f64,
    pub classified: usize,
    pub correct: usize,
    pub classification_failures: usize,
}

/// Episode-by-episode regret accounting for a whole run.
///
/// Everything derivable (cumulative regret, per-batch aggregates) is computed
/// from the records on demand, so the exposed numbers are exactly the sums of
/// what is stored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RegretLedger {
    pub records: Vec<EpisodeRecord>,
}

impl RegretLedger {
    pub fn new(records: Vec<EpisodeRecord>) -> Self {
        Self { records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Σ_h J*_h − Σ_h Σ_t r_{h,t}, summed exactly from the records.
    pub fn cumulative_regret(&self) -> f64 {
        let optimal: f64 = self.records.iter().map(|r| r.optimal_value).sum();
        let realized: f64 = self.records.iter().map(|r| r.realized_reward).sum();
        optimal - realized
    }

    pub fn total_realized_reward(&self) -> f64 {
        self.records.iter().map(|r| r.realized_reward).sum()
    }

    pub fn total_optimal_value(&self) -> f64 {
        self.records.iter().map(|r| r.optimal_value).sum()
    }

    /// Fraction of classified episodes whose label was correct.
    pub fn classification_accuracy(&self) -> Option<f64> {
        let classified: Vec<&EpisodeRecord> =
            self.records.iter().filter(|r| r.classified_context.is_some()).collect();
        if classified.is_empty() {
            return None;
        }
        let correct = classified.iter().filter(|r| r.correct_classification()).count();
        Some(correct as f64 / classified.len() as f64)
    }

    pub fn batch_summaries(&self) -> Vec<BatchSummary> {
        let mut out: Vec<BatchSummary> = Vec::new();
        for r in &self.records {
            if out.last().map_or(true, |b| b.batch != r.batch) {
                out.push(BatchSummary {
                    batch: r.batch,
                    episodes: 0,
                    total_regret: 0.0,
                    total_optimal: 0.0,
                    total_realized: 0.0,
                    classified: 0,
                    correct: 0,
                    classification_failures: 0,
                });
            }
            let b = out.last_mut().unwrap();
            b.episodes += 1;
            b.total_regret += r.regret();
            b.total_optimal += r.optimal_value;
            b.total_realized += r.realized_reward;
            if r.classified_context.is_some() {
                b.classified += 1;
                if r.correct_classification() {
                    b.correct += 1;
                }
            }
            if r.classification_failed {
                b.classification_failures += 1;
            }
        }
        out
    }
}

/// Exact regret of a completed ledger.
pub fn compute_regret(ledger: &RegretLedger) -> f64 {
    ledger.cumulative_regret()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(episode: usize, batch: usize, optimal: f64, realized: f64) -> EpisodeRecord {
        EpisodeRecord {
            episode,
            batch,
            optimal_value: optimal,
            realized_reward: realized,
            exploration_reward: realized,
            exploitation_reward: 0.0,
            true_context: 0,
            classified_cluster: None,
            classified_context: None,
            exploration_steps: 0,
            classification_failed: false,
        }
    }

    #[test]
    fn zero_reward_agent_forfeits_everything() {
        let ledger =
            RegretLedger::new(vec![record(0, 0, 3.0, 0.0), record(1, 0, 2.5, 0.0)]);
        assert_eq!(compute_regret(&ledger), 5.5);
    }

    #[test]
    fn regret_is_linear_in_scaling() {
        let base = vec![record(0, 0, 3.0, 1.0), record(1, 1, 2.0, 1.5)];
        let ledger = RegretLedger::new(base.clone());
        let scaled = RegretLedger::new(
            base.into_iter()
                .map(|mut r| {
                    r.optimal_value *= 4.0;
                    r.realized_reward *= 4.0;
                    r
                })
                .collect(),
        );
        assert!((compute_regret(&scaled) - 4.0 * compute_regret(&ledger)).abs() < 1e-12);
    }

    #[test]
    fn batch_summaries_partition_the_records() {
        let ledger = RegretLedger::new(vec![
            record(0, 0, 1.0, 0.5),
            record(1, 0, 1.0, 0.25),
            record(2, 1, 2.0, 1.0),
        ]);
        let batches = ledger.batch_summaries();
        assert_eq!(batches.len(), 2);
        assert_eq!(batches[0].episodes, 2);
        assert_eq!(batches[1].episodes, 1);
        let total: f64 = batches.iter().map(|b| b.total_regret).sum();
        assert!((total - ledger.cumulative_regret()).abs() < 1e-12);
    }
}
