use cmdp_core::{
    derive_seed, generate::sample_simplex_row, generate_random_cmdp, policy_value, seeded_rng,
    Mdp, Policy, TransitionKernel,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{BoundsError, Result};

/// Value-difference bound between an MDP and an eps-approximation of it over
/// a T-step episode: S^2 T^2 eps for a fixed policy, 3 S^2 T^2 eps when each
/// side plays its own optimal policy.
pub fn simulation_lemma_bound(
    num_states: usize,
    horizon: usize,
    eps: f64,
    optimal: bool,
) -> Result<f64> {
    if eps < 0.0 {
        return Err(BoundsError::InvalidParameter(format!("eps {eps} must be nonnegative")));
    }
    let s = num_states as f64;
    let t = horizon as f64;
    let factor = if optimal { 3.0 } else { 1.0 };
    Ok(factor * s * s * t * t * eps)
}

/// Perturb every row of a kernel by at most `max_row_l1` in L1, staying on
/// the simplex: move a random amount of mass from one entry to another.
pub fn perturb_kernel(kernel: &TransitionKernel, max_row_l1: f64, seed: u64) -> TransitionKernel {
    let s_n = kernel.num_states();
    let a_n = kernel.num_actions();
    let mut rng = seeded_rng(seed);
    let mut rows = Vec::with_capacity(s_n);
    for s in 0..s_n {
        let mut per_action = Vec::with_capacity(a_n);
        for a in 0..a_n {
            let mut row = kernel.row(s, a).to_vec();
            if s_n > 1 {
                let from = rng.random_range(0..s_n);
                let mut to = rng.random_range(0..s_n - 1);
                if to >= from {
                    to += 1;
                }
                let mass: f64 = rng.random::<f64>() * (max_row_l1 / 2.0);
                let moved = mass.min(row[from]);
                row[from] -= moved;
                row[to] += moved;
            }
            per_action.push(row);
        }
        rows.push(per_action);
    }
    TransitionKernel::from_rows(rows).expect("mass moves keep rows on the simplex")
}

/// One randomized check of the value-difference bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimLemmaTrial {
    pub num_states: usize,
    pub num_actions: usize,
    pub horizon: usize,
    /// Actual max-(s, a) L1 distance between the pair.
    pub eps: f64,
    /// Largest |J_M - J_M_hat| over the sampled policies.
    pub worst_gap: f64,
    pub bound: f64,
    pub ok: bool,
}

/// Draw random MDP pairs at controlled L1 perturbation and compare exact
/// policy values on both, against the stated bound.
pub fn verify_simulation_lemma(
    pairs: usize,
    policies_per_pair: usize,
    max_states: usize,
    max_horizon: usize,
    eps_cap: f64,
    seed: u64,
) -> Vec<SimLemmaTrial> {
    (0..pairs as u64)
        .map(|i| {
            let mut rng = seeded_rng(derive_seed(seed, i));
            let s_n = rng.random_range(2..=max_states.max(2));
            let a_n = rng.random_range(1..=2);
            let horizon = rng.random_range(1..=max_horizon.max(1));
            let base = generate_random_cmdp(s_n, a_n, 1, derive_seed(seed, i ^ 0xA5A5))
                .expect("valid dimensions");
            let mdp = base.context(0).clone();
            let perturbed_kernel =
                perturb_kernel(mdp.kernel(), eps_cap, derive_seed(seed, i ^ 0x5A5A));
            let perturbed = Mdp::new(
                perturbed_kernel,
                mdp.rewards().to_vec(),
                mdp.initial_dist().to_vec(),
            )
            .expect("perturbation preserves validity");

            let eps = model_distance_eps(mdp.kernel(), perturbed.kernel());
            let bound = simulation_lemma_bound(s_n, horizon, eps, false).expect("eps >= 0");

            let mut worst_gap = 0.0f64;
            for p in 0..policies_per_pair {
                let policy = random_stochastic_policy(s_n, a_n, &mut rng, p);
                let v1 = policy_value(&mdp, &policy, horizon).expect("policy fits");
                let v2 = policy_value(&perturbed, &policy, horizon).expect("policy fits");
                worst_gap = worst_gap.max((v1 - v2).abs());
            }
            SimLemmaTrial {
                num_states: s_n,
                num_actions: a_n,
                horizon,
                eps,
                worst_gap,
                bound,
                ok: worst_gap <= bound + 1e-12,
            }
        })
        .collect()
}

fn model_distance_eps(a: &TransitionKernel, b: &TransitionKernel) -> f64 {
    let mut eps = 0.0f64;
    for s in 0..a.num_states() {
        for act in 0..a.num_actions() {
            let d: f64 =
                a.row(s, act).iter().zip(b.row(s, act)).map(|(x, y)| (x - y).abs()).sum();
            eps = eps.max(d);
        }
    }
    eps
}

fn random_stochastic_policy(s_n: usize, a_n: usize, rng: &mut ChaCha8Rng, _idx: usize) -> Policy {
    let mut action_probs = Vec::with_capacity(s_n);
    let mut row = vec![0.0; a_n];
    for _ in 0..s_n {
        sample_simplex_row(rng, &mut row);
        action_probs.push(row.clone());
    }
    Policy::Stochastic { action_probs }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_eps_zero_bound() {
        assert_eq!(simulation_lemma_bound(4, 9, 0.0, false).unwrap(), 0.0);
        assert_eq!(simulation_lemma_bound(4, 9, 0.0, true).unwrap(), 0.0);
    }

    #[test]
    fn worked_fixed_policy_value() {
        let b = simulation_lemma_bound(2, 3, 0.1, false).unwrap();
        assert!((b - 3.6).abs() < 1e-12);
        let b3 = simulation_lemma_bound(2, 3, 0.1, true).unwrap();
        assert!((b3 - 10.8).abs() < 1e-12);
    }

    #[test]
    fn perturbation_stays_within_budget() {
        let base = generate_random_cmdp(4, 2, 1, 77).unwrap();
        let kernel = base.context(0).kernel();
        for seed in 0..20 {
            let p = perturb_kernel(kernel, 0.2, seed);
            assert!(model_distance_eps(kernel, &p) <= 0.2 + 1e-12);
        }
    }

    #[test]
    fn small_verification_sweep_passes() {
        let trials = verify_simulation_lemma(30, 5, 4, 6, 0.2, 11);
        assert_eq!(trials.len(), 30);
        for t in &trials {
            assert!(t.ok, "gap {} above bound {} (eps {})", t.worst_gap, t.bound, t.eps);
        }
    }
}
