//! Scratch calibration runs (not part of the deliverable test suite).

use std::time::Instant;

use cece::{
    kmeans_cluster_with, run_cece, CeceConfig, ClassifierSlot, ClustererSlot, ExploiterSlot,
    Exploration, MinibatchSchedule, QLearningParams,
};
use cmdp_core::{derive_seed, generate_random_cmdp, simulate_episode, Policy};
use model_eval::entropy_score;

fn offset_uniform_cmdp(
    s_n: usize,
    a_n: usize,
    k: usize,
    offset: f64,
    seed: u64,
) -> cmdp_core::ContextualMdp {
    use cmdp_core::{seeded_rng, ContextualMdp, Mdp, TransitionKernel};
    use rand::Rng;
    let mut rng = seeded_rng(seed);
    let rewards: Vec<f64> = (0..s_n).map(|_| rng.random::<f64>()).collect();
    let initial = vec![1.0 / s_n as f64; s_n];
    let mut contexts = Vec::new();
    for _ in 0..k {
        let mut flat = Vec::with_capacity(s_n * a_n * s_n);
        for _ in 0..s_n * a_n {
            let mut row: Vec<f64> = (0..s_n).map(|_| offset + rng.random::<f64>()).collect();
            let sum: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= sum);
            flat.extend_from_slice(&row);
        }
        let kernel = TransitionKernel::from_flat(s_n, a_n, flat).unwrap();
        contexts.push(Mdp::new(kernel, rewards.clone(), initial.clone()).unwrap());
    }
    ContextualMdp::new(contexts, vec![1.0 / k as f64; k]).unwrap()
}

fn exp1_trial_gen(t: usize, h: usize, seed: u64, restarts: usize, offset: f64) -> f64 {
    let cmdp = if offset < 0.0 {
        generate_random_cmdp(100, 2, 5, derive_seed(seed, 0)).unwrap()
    } else {
        offset_uniform_cmdp(100, 2, 5, offset, derive_seed(seed, 0))
    };
    let mut trajs = Vec::new();
    let mut truth = Vec::new();
    for i in 0..h {
        let tr = simulate_episode(&cmdp, &Policy::Uniform, t, derive_seed(seed, 1 + i as u64))
            .unwrap();
        truth.push(tr.true_context().unwrap());
        trajs.push(tr);
    }
    let a = kmeans_cluster_with(&trajs, 5, restarts, 100, derive_seed(seed, 999), 100, 2).unwrap();
    entropy_score(&a.labels, &truth, 5).unwrap()
}

fn exp1_trial(t: usize, h: usize, seed: u64, restarts: usize) -> f64 {
    exp1_trial_gen(t, h, seed, restarts, -1.0)
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mode = args.get(1).map(String::as_str).unwrap_or("exp1");

    if mode == "exp1" {
        for &restarts in &[1usize, 3, 10] {
            for &t in &[1000usize, 2000, 4000, 8000] {
                let start = Instant::now();
                let mut scores = Vec::new();
                for trial in 0..4u64 {
                    scores.push(exp1_trial(t, 100, 100 + trial, restarts));
                }
                let mean = scores.iter().sum::<f64>() / scores.len() as f64;
                println!(
                    "restarts={restarts} T={t}: mean {mean:.3} scores {:?} elapsed {:.1?}",
                    scores.iter().map(|s| (s * 100.0).round() / 100.0).collect::<Vec<_>>(),
                    start.elapsed()
                );
            }
        }
    }

    if mode == "greedy" {
        // Farthest-point seeding variant, inline copy for comparison.
        use cmdp_core::EmpiricalModel;
        fn greedy_kmeans(points: &[Vec<f64>], k: usize, seed: u64, restarts: usize) -> Vec<usize> {
            use rand::Rng;
            let n = points.len();
            let sq = |a: &[f64], b: &[f64]| -> f64 {
                a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
            };
            let mut best: Option<(Vec<usize>, f64)> = None;
            for r in 0..restarts {
                let mut rng = cmdp_core::seeded_rng(derive_seed(seed, r as u64));
                let first = rng.random_range(0..n);
                let mut cents = vec![points[first].clone()];
                let mut d2: Vec<f64> = points.iter().map(|p| sq(p, &cents[0])).collect();
                while cents.len() < k {
                    let (idx, _) = d2
                        .iter()
                        .enumerate()
                        .fold((0, -1.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
                    let c = points[idx].clone();
                    for (d, p) in d2.iter_mut().zip(points) {
                        *d = d.min(sq(p, &c));
                    }
                    cents.push(c);
                }
                let mut labels = vec![usize::MAX; n];
                for _ in 0..100 {
                    let mut changed = false;
                    for (i, p) in points.iter().enumerate() {
                        let mut bk = 0;
                        let mut bd = sq(p, &cents[0]);
                        for (kk, c) in cents.iter().enumerate().skip(1) {
                            let d = sq(p, c);
                            if d < bd {
                                bd = d;
                                bk = kk;
                            }
                        }
                        if labels[i] != bk {
                            labels[i] = bk;
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                    let dim = points[0].len();
                    let mut sums = vec![vec![0.0; dim]; k];
                    let mut counts = vec![0usize; k];
                    for (p, &l) in points.iter().zip(&labels) {
                        counts[l] += 1;
                        for (a, v) in sums[l].iter_mut().zip(p) {
                            *a += v;
                        }
                    }
                    for kk in 0..k {
                        if counts[kk] > 0 {
                            for (c, s) in cents[kk].iter_mut().zip(&sums[kk]) {
                                *c = s / counts[kk] as f64;
                            }
                        }
                    }
                }
                let wcss: f64 =
                    points.iter().zip(&labels).map(|(p, &l)| sq(p, &cents[l])).sum();
                if best.as_ref().map_or(true, |(_, b)| wcss < *b) {
                    best = Some((labels, wcss));
                }
            }
            best.unwrap().0
        }
        for &t in &[1000usize, 2000, 4000, 8000] {
            let mut scores = Vec::new();
            for trial in 0..4u64 {
                let seed = 100 + trial;
                let cmdp = generate_random_cmdp(100, 2, 5, derive_seed(seed, 0)).unwrap();
                let mut trajs = Vec::new();
                let mut truth = Vec::new();
                for i in 0..100 {
                    let tr = simulate_episode(
                        &cmdp,
                        &Policy::Uniform,
                        t,
                        derive_seed(seed, 1 + i as u64),
                    )
                    .unwrap();
                    truth.push(tr.true_context().unwrap());
                    trajs.push(tr);
                }
                let points: Vec<Vec<f64>> = trajs
                    .iter()
                    .map(|tr| {
                        EmpiricalModel::from_trajectory(tr, 100, 2).unwrap().embedding()
                    })
                    .collect();
                let labels = greedy_kmeans(&points, 5, derive_seed(seed, 999), 10);
                scores.push(entropy_score(&labels, &truth, 5).unwrap());
            }
            let mean = scores.iter().sum::<f64>() / scores.len() as f64;
            println!(
                "greedy-seed T={t}: mean {mean:.3} scores {:?}",
                scores.iter().map(|s| (s * 100.0).round() / 100.0).collect::<Vec<_>>()
            );
        }
    }

    if mode == "gen" {
        for &offset in &[0.0f64, 0.5, 1.0] {
            for &t in &[1000usize, 2000, 4000, 8000] {
                let mut scores = Vec::new();
                for trial in 0..4u64 {
                    scores.push(exp1_trial_gen(t, 100, 100 + trial, 10, offset));
                }
                let mean = scores.iter().sum::<f64>() / scores.len() as f64;
                println!(
                    "offset={offset} T={t}: mean {mean:.3} scores {:?}",
                    scores.iter().map(|s| (s * 100.0).round() / 100.0).collect::<Vec<_>>()
                );
            }
        }
    }

    if mode == "exp1h" {
        for &h in &[20usize, 60, 100] {
            let mut scores = Vec::new();
            for trial in 0..6u64 {
                scores.push(exp1_trial(8000, h, 300 + trial, 10));
            }
            let mean = scores.iter().sum::<f64>() / scores.len() as f64;
            println!(
                "T=8000 H={h}: mean {mean:.3} scores {:?}",
                scores.iter().map(|s| (s * 100.0).round() / 100.0).collect::<Vec<_>>()
            );
        }
        for &h in &[20usize, 100] {
            let mut scores = Vec::new();
            for trial in 0..4u64 {
                scores.push(exp1_trial(2000, h, 500 + trial, 10));
            }
            let mean = scores.iter().sum::<f64>() / scores.len() as f64;
            println!("T=2000 H={h}: mean {mean:.3}");
        }
    }

    if mode == "exp2" {
        // Paired design: the same instances across all configs, so per-trial
        // differences isolate the config effect. `gen` picks the row sampler.
        use cmdp_core::{seeded_rng, ContextualMdp, Mdp, TransitionKernel};
        use rand::Rng;
        let gen_kind = args.get(2).map(String::as_str).unwrap_or("simplex");
        let make = |k: usize, seed: u64| -> ContextualMdp {
            if gen_kind == "norm" {
                generate_random_cmdp(100, 4, k, seed).unwrap()
            } else {
                let s_n = 100;
                let a_n = 4;
                let mut rng = seeded_rng(seed);
                let rewards: Vec<f64> = (0..s_n).map(|_| rng.random::<f64>()).collect();
                let initial = vec![1.0 / s_n as f64; s_n];
                let mut contexts = Vec::new();
                for _ in 0..k {
                    let mut flat = Vec::with_capacity(s_n * a_n * s_n);
                    let mut row = vec![0.0; s_n];
                    for _ in 0..s_n * a_n {
                        cmdp_core::generate::sample_simplex_row(&mut rng, &mut row);
                        flat.extend_from_slice(&row);
                    }
                    let kernel = TransitionKernel::from_flat(s_n, a_n, flat).unwrap();
                    contexts
                        .push(Mdp::new(kernel, rewards.clone(), initial.clone()).unwrap());
                }
                ContextualMdp::new(contexts, vec![1.0 / k as f64; k]).unwrap()
            }
        };
        let trials = 4u64;
        for (name, classifier) in
            [("max", ClassifierSlot::MinL1), ("sum", ClassifierSlot::MinL1Sum)]
        {
            for &(h, t, k, eta, batch) in &[
                (20usize, 2000usize, 20usize, 0.3f64, 20usize),
                (100, 2000, 20, 0.3, 20),
                (100, 2000, 20, 0.05, 20),
                (100, 2000, 20, 0.9, 20),
                (100, 2000, 5, 0.3, 20),
                (100, 500, 20, 0.3, 20),
            ] {
                let start = Instant::now();
                let mut rewards = Vec::new();
                let mut accs = Vec::new();
                for trial in 0..trials {
                    // Instance depends only on (K, trial): paired across configs.
                    let cmdp = make(k, derive_seed(7000 + trial, k as u64));
                    let cfg = CeceConfig {
                        num_contexts: k,
                        total_episodes: h,
                        horizon: t,
                        exploration: Exploration::Fraction(eta),
                        minibatches: MinibatchSchedule::Constant(batch),
                        clusterer: ClustererSlot::KMeans { restarts: 3, max_iters: 30 },
                        classifier,
                        exploiter: ExploiterSlot::QLearning(QLearningParams::default()),
                    };
                    let ledger = run_cece(&cmdp, &cfg, derive_seed(8000 + trial, 1)).unwrap();
                    let avg = ledger.total_realized_reward() / (h as f64 * (t + 1) as f64);
                    rewards.push((avg * 100000.0).round() / 100000.0);
                    accs.push(
                        ledger
                            .classification_accuracy()
                            .map(|a| (a * 1000.0).round() / 1000.0)
                            .unwrap_or(-1.0),
                    );
                }
                let mean = rewards.iter().sum::<f64>() / trials as f64;
                println!(
                    "[{name}/{gen_kind}] H={h} T={t} K={k} eta={eta}: mean {mean:.5} rewards {rewards:?} acc {accs:?} elapsed {:.1?}",
                    start.elapsed()
                );
            }
        }
    }
}
