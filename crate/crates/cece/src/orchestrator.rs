//! The mini-batch loop: cluster everything seen so far, then for each new
//! episode explore, classify and exploit.
//!
//! Determinism contract: every episode owns an RNG stream keyed by
//! (run seed, episode index), ledger entries are assembled in episode order,
//! and Q-table updates are serialized per classified context in episode
//! order. Parallel and serial execution therefore produce identical ledgers.

use cmdp_core::{
    derive_seed, optimal_finite_horizon, CdfKernel, ContextualMdp, LiveEpisode, Mdp, Trajectory,
    TransitionKernel,
};
use model_eval::{match_kernels, EpisodeRecord, RegretLedger};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{classify_with, L1Aggregate};
use crate::cluster::exhaustive_cluster;
use crate::config::{CeceConfig, ClassifierSlot, ClustererSlot, ExploiterSlot};
use crate::error::{CeceError, Result};
use crate::exploit::{dp_exploit, qlearning_exploit, QTable};
use crate::explore::uniform_explore;
use crate::kmeans::kmeans_cluster_with;
use crate::slots::{Clusterer, OracleClusterer};

/// Everything observed about one finished episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    pub trajectory: Trajectory,
    pub classified_context: Option<usize>,
    pub exploration_reward: f64,
    pub exploitation_reward: f64,
    pub correct_classification: bool,
}

/// Run CECE on a CMDP and return the per-episode regret ledger.
pub fn run_cece(cmdp: &ContextualMdp, config: &CeceConfig, seed: u64) -> Result<RegretLedger> {
    Ok(run_internal(cmdp, config, seed)?.0)
}

/// As [`run_cece`], additionally returning each episode's outcome (including
/// the full trajectory).
pub fn run_cece_with_outcomes(
    cmdp: &ContextualMdp,
    config: &CeceConfig,
    seed: u64,
) -> Result<(RegretLedger, Vec<EpisodeOutcome>)> {
    run_internal(cmdp, config, seed)
}

struct Explored<'a> {
    idx: usize,
    episode: LiveEpisode<'a>,
    exploration_reward: f64,
    classified: Option<usize>,
    failed: bool,
}

struct Finished {
    idx: usize,
    trajectory: Trajectory,
    true_context: usize,
    exploration_reward: f64,
    exploitation_reward: f64,
    classified: Option<usize>,
    failed: bool,
    exploration_steps: usize,
}

/// Translate raw cluster indices into true-context indices by bottleneck
/// matching of the batch's cluster kernels against the environment's; used
/// only for evaluation fields, never by the algorithm.
fn evaluation_alignment(
    true_kernels: &[TransitionKernel],
    cluster_kernels: &[TransitionKernel],
) -> Result<Option<Vec<usize>>> {
    if true_kernels.len() != cluster_kernels.len() {
        return Ok(None);
    }
    let matching = match_kernels(true_kernels, cluster_kernels)?.matching;
    let mut inverse = vec![usize::MAX; matching.len()];
    for (context, &cluster) in matching.iter().enumerate() {
        inverse[cluster] = context;
    }
    Ok(Some(inverse))
}

fn run_internal(
    cmdp: &ContextualMdp,
    config: &CeceConfig,
    seed: u64,
) -> Result<(RegretLedger, Vec<EpisodeOutcome>)> {
    config.validate()?;
    let s_n = cmdp.num_states();
    let a_n = cmdp.num_actions();
    let horizon = config.horizon;
    let t_ec = config.exploration_steps();
    let remaining = horizon - t_ec;
    let k_cfg = config.num_contexts;

    let cdfs: Vec<CdfKernel> = cmdp.kernels().map(CdfKernel::new).collect();
    let episode_master = derive_seed(seed, 1);
    let cluster_master = derive_seed(seed, 2);
    let exploit_master = derive_seed(seed, 3);

    let oracle = match config.clusterer {
        ClustererSlot::Oracle => {
            if k_cfg != cmdp.num_contexts() {
                return Err(CeceError::InvalidParameter(
                    "oracle clustering requires num_contexts to match the environment".into(),
                ));
            }
            Some(OracleClusterer { kernels: cmdp.kernels().cloned().collect() })
        }
        _ => None,
    };

    let ql_params = match &config.exploiter {
        ExploiterSlot::QLearning(p) => Some(*p),
        ExploiterSlot::Dp => None,
    };
    let mut qtables: Vec<Option<QTable>> = match ql_params {
        Some(p) => (0..k_cfg).map(|_| Some(QTable::new(s_n, a_n, p.q_init))).collect(),
        None => Vec::new(),
    };

    let true_kernels: Vec<TransitionKernel> = cmdp.kernels().cloned().collect();
    let mut j_star: Vec<Option<f64>> = vec![None; cmdp.num_contexts()];
    let mut completed: Vec<Trajectory> = Vec::with_capacity(config.total_episodes);
    let mut records: Vec<EpisodeRecord> = Vec::with_capacity(config.total_episodes);
    let mut outcomes: Vec<EpisodeOutcome> = Vec::with_capacity(config.total_episodes);
    let mut prev_kernels: Option<Vec<TransitionKernel>> = None;

    for (batch_idx, span) in config.batch_spans().into_iter().enumerate() {
        let mut alignment: Option<Vec<usize>> = None;
        let finished: Vec<Finished> = if batch_idx == 0 {
            // Bootstrap: no models exist yet, run the uniform policy end to
            // end; these episodes seed the first clustering and their regret
            // is charged in full.
            span.clone()
                .into_par_iter()
                .map(|i| {
                    let mut ep =
                        LiveEpisode::from_cmdp(cmdp, &cdfs, derive_seed(episode_master, i as u64));
                    let trajectory = uniform_explore(&mut ep, horizon);
                    Finished {
                        idx: i,
                        true_context: ep.true_context().expect("episode carries its context"),
                        exploration_reward: trajectory.total_reward(),
                        exploitation_reward: 0.0,
                        classified: None,
                        failed: false,
                        exploration_steps: horizon,
                        trajectory,
                    }
                })
                .collect()
        } else {
            let cluster_seed = derive_seed(cluster_master, batch_idx as u64);
            let assignment = match &config.clusterer {
                ClustererSlot::Exhaustive => exhaustive_cluster(&completed, k_cfg, s_n, a_n)?,
                ClustererSlot::KMeans { restarts, max_iters } => kmeans_cluster_with(
                    &completed,
                    k_cfg,
                    *restarts,
                    *max_iters,
                    cluster_seed,
                    s_n,
                    a_n,
                )?,
                ClustererSlot::Oracle => {
                    oracle.as_ref().unwrap().cluster(&completed, k_cfg, cluster_seed)?
                }
            };
            let mut kernels: Vec<TransitionKernel> =
                assignment.models.iter().map(|m| m.kernel_estimate().clone()).collect();
            // Keep cluster identities stable across batches so per-context
            // state (Q-tables) stays coherent: permute the new models to
            // best line up with the previous batch's.
            if let Some(prev) = &prev_kernels {
                let matching = match_kernels(prev, &kernels)?.matching;
                kernels = matching.into_iter().map(|j| kernels[j].clone()).collect();
            }
            alignment = evaluation_alignment(&true_kernels, &kernels)?;
            let est_mdps: Vec<Mdp> = kernels
                .iter()
                .map(|k| {
                    Mdp::new(k.clone(), cmdp.rewards().to_vec(), cmdp.initial_dist().to_vec())
                })
                .collect::<cmdp_core::Result<_>>()?;

            let aggregate = match config.classifier {
                ClassifierSlot::MinL1 => L1Aggregate::Max,
                ClassifierSlot::MinL1Sum => L1Aggregate::Sum,
            };

            // Explore and classify every episode of the batch in parallel;
            // each episode's stream depends only on its index.
            let explored: Vec<Explored<'_>> = span
                .clone()
                .into_par_iter()
                .map(|i| -> Result<Explored<'_>> {
                    let mut episode =
                        LiveEpisode::from_cmdp(cmdp, &cdfs, derive_seed(episode_master, i as u64));
                    let partial = uniform_explore(&mut episode, t_ec);
                    let exploration_reward = partial.total_reward();
                    let (classified, failed) = match classify_with(&partial, &kernels, aggregate) {
                        Ok(k) => (Some(k), false),
                        Err(CeceError::ClassificationImpossible) => (None, true),
                        Err(e) => return Err(e),
                    };
                    Ok(Explored { idx: i, episode, exploration_reward, classified, failed })
                })
                .collect::<Result<_>>()?;

            let result = exploit_batch(
                explored,
                &est_mdps,
                remaining,
                t_ec,
                ql_params.as_ref(),
                &mut qtables,
                exploit_master,
            );
            prev_kernels = Some(kernels);
            result
        };

        // Fill the J* oracle cache for any context first seen in this batch.
        let mut missing: Vec<usize> = finished
            .iter()
            .map(|f| f.true_context)
            .filter(|&c| j_star[c].is_none())
            .collect();
        missing.sort_unstable();
        missing.dedup();
        let values: Vec<(usize, f64)> = missing
            .into_par_iter()
            .map(|c| (c, optimal_finite_horizon(cmdp.context(c), horizon).value))
            .collect();
        for (c, v) in values {
            j_star[c] = Some(v);
        }

        for f in finished {
            let classified_context = match (&f.classified, &alignment) {
                (Some(cluster), Some(map)) => Some(map[*cluster]),
                _ => None,
            };
            records.push(EpisodeRecord {
                episode: f.idx,
                batch: batch_idx,
                optimal_value: j_star[f.true_context].expect("filled above"),
                realized_reward: f.exploration_reward + f.exploitation_reward,
                exploration_reward: f.exploration_reward,
                exploitation_reward: f.exploitation_reward,
                true_context: f.true_context,
                classified_cluster: f.classified,
                classified_context,
                exploration_steps: f.exploration_steps,
                classification_failed: f.failed,
            });
            outcomes.push(EpisodeOutcome {
                trajectory: f.trajectory.clone(),
                classified_context,
                exploration_reward: f.exploration_reward,
                exploitation_reward: f.exploitation_reward,
                correct_classification: classified_context == Some(f.true_context),
            });
            completed.push(f.trajectory);
        }
    }

    Ok((RegretLedger::new(records), outcomes))
}

/// Phase B of a batch. DP exploitation is stateless and runs fully parallel.
/// Q-learning episodes are grouped by classified context: groups run in
/// parallel, members serially in episode order, which reproduces the serial
/// update sequence exactly.
fn exploit_batch<'a>(
    explored: Vec<Explored<'a>>,
    est_mdps: &[Mdp],
    remaining: usize,
    t_ec: usize,
    ql_params: Option<&crate::exploit::QLearningParams>,
    qtables: &mut [Option<QTable>],
    exploit_master: u64,
) -> Vec<Finished> {
    match ql_params {
        None => explored
            .into_par_iter()
            .map(|mut e| {
                let exploitation_reward = match e.classified {
                    Some(k) => dp_exploit(&mut e.episode, &est_mdps[k], remaining).iter().sum(),
                    None => uniform_rest(&mut e.episode, remaining),
                };
                finish(e, exploitation_reward, t_ec)
            })
            .collect(),
        Some(params) => {
            enum Unit<'a> {
                Single(Explored<'a>),
                Group { ctx: usize, table: QTable, members: Vec<Explored<'a>> },
            }
            let mut groups: Vec<Vec<Explored<'a>>> = (0..qtables.len()).map(|_| Vec::new()).collect();
            let mut units: Vec<Unit<'a>> = Vec::new();
            for e in explored {
                match e.classified {
                    Some(k) => groups[k].push(e),
                    None => units.push(Unit::Single(e)),
                }
            }
            for (ctx, members) in groups.into_iter().enumerate() {
                if !members.is_empty() {
                    let table = qtables[ctx].take().expect("table not checked out");
                    units.push(Unit::Group { ctx, table, members });
                }
            }

            let processed: Vec<(Vec<Finished>, Option<(usize, QTable)>)> = units
                .into_par_iter()
                .map(|unit| match unit {
                    Unit::Single(mut e) => {
                        let r = uniform_rest(&mut e.episode, remaining);
                        (vec![finish(e, r, t_ec)], None)
                    }
                    Unit::Group { ctx, mut table, members } => {
                        let mut out = Vec::with_capacity(members.len());
                        for mut e in members {
                            let stream = derive_seed(exploit_master, e.idx as u64);
                            let rewards = qlearning_exploit(
                                &mut e.episode,
                                remaining,
                                &mut table,
                                params,
                                stream,
                            );
                            out.push(finish(e, rewards.iter().sum(), t_ec));
                        }
                        (out, Some((ctx, table)))
                    }
                })
                .collect();

            let mut finished = Vec::new();
            for (mut batch, returned) in processed {
                finished.append(&mut batch);
                if let Some((ctx, table)) = returned {
                    qtables[ctx] = Some(table);
                }
            }
            finished.sort_by_key(|f| f.idx);
            finished
        }
    }
}

fn finish(e: Explored<'_>, exploitation_reward: f64, t_ec: usize) -> Finished {
    Finished {
        idx: e.idx,
        trajectory: e.episode.trajectory(),
        true_context: e.episode.true_context().expect("episode carries its context"),
        exploration_reward: e.exploration_reward,
        exploitation_reward,
        classified: e.classified,
        failed: e.failed,
        exploration_steps: t_ec,
    }
}

fn uniform_rest(episode: &mut LiveEpisode<'_>, steps: usize) -> f64 {
    let mut sum = 0.0;
    for _ in 0..steps {
        let (_, next) = episode.step_uniform();
        sum += episode.mdp().reward(next);
    }
    sum
}
