use rand::Rng;

use crate::error::{CoreError, Result};
use crate::kernel::TransitionKernel;
use crate::mdp::{ContextualMdp, Mdp};
use crate::rng::seeded_rng;

/// Draw a random CMDP: each transition row uniform on the probability
/// simplex, rewards uniform in [0, 1] shared across contexts, uniform
/// initial and context distributions. Deterministic given the seed.
pub fn generate_random_cmdp(
    num_states: usize,
    num_actions: usize,
    num_contexts: usize,
    seed: u64,
) -> Result<ContextualMdp> {
    if num_states == 0 || num_actions == 0 || num_contexts == 0 {
        return Err(CoreError::InvalidParameter(
            "state, action and context counts must all be at least 1".into(),
        ));
    }
    let mut rng = seeded_rng(seed);

    let rewards: Vec<f64> = (0..num_states).map(|_| rng.random::<f64>()).collect();
    let initial_dist = vec![1.0 / num_states as f64; num_states];
    let context_dist = vec![1.0 / num_contexts as f64; num_contexts];

    let mut contexts = Vec::with_capacity(num_contexts);
    let mut row = vec![0.0; num_states];
    for _ in 0..num_contexts {
        let mut flat = Vec::with_capacity(num_states * num_actions * num_states);
        for _ in 0..num_states * num_actions {
            sample_normalized_uniform_row(&mut rng, &mut row);
            flat.extend_from_slice(&row);
        }
        let kernel = TransitionKernel::from_flat(num_states, num_actions, flat)?;
        contexts.push(Mdp::new(kernel, rewards.clone(), initial_dist.clone())?);
    }
    ContextualMdp::new(contexts, context_dist)
}

/// Uniform sample from the probability simplex via normalized Exp(1) draws.
pub fn sample_simplex_row<R: Rng>(rng: &mut R, out: &mut [f64]) {
    let mut sum = 0.0;
    for v in out.iter_mut() {
        let u: f64 = rng.random();
        let e = -(1.0 - u).ln();
        *v = e;
        sum += e;
    }
    if sum <= 0.0 {
        let p = 1.0 / out.len() as f64;
        out.fill(p);
    } else {
        for v in out.iter_mut() {
            *v /= sum;
        }
    }
}

/// Transition row with i.i.d. uniform [0, 1] weights, normalized.
pub fn sample_normalized_uniform_row<R: Rng>(rng: &mut R, out: &mut [f64]) {
    let mut sum = 0.0;
    for v in out.iter_mut() {
        let u: f64 = rng.random();
        *v = u;
        sum += u;
    }
    if sum <= 0.0 {
        let p = 1.0 / out.len() as f64;
        out.fill(p);
    } else {
        for v in out.iter_mut() {
            *v /= sum;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::PROB_TOL;

    #[test]
    fn single_point_simplex_is_forced() {
        let cmdp = generate_random_cmdp(1, 1, 1, 99).unwrap();
        assert_eq!(cmdp.context(0).kernel().row(0, 0), &[1.0]);
    }

    #[test]
    fn zero_counts_rejected() {
        assert!(generate_random_cmdp(0, 1, 1, 0).is_err());
        assert!(generate_random_cmdp(1, 0, 1, 0).is_err());
        assert!(generate_random_cmdp(1, 1, 0, 0).is_err());
    }

    #[test]
    fn rows_normalized_and_seed_reproducible() {
        let a = generate_random_cmdp(3, 2, 2, 42).unwrap();
        let b = generate_random_cmdp(3, 2, 2, 42).unwrap();
        assert_eq!(a, b);
        for m in a.contexts() {
            for s in 0..3 {
                for act in 0..2 {
                    let sum: f64 = m.kernel().row(s, act).iter().sum();
                    assert!((sum - 1.0).abs() < PROB_TOL);
                }
            }
        }
        let c = generate_random_cmdp(3, 2, 2, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rewards_shared_across_contexts() {
        let cmdp = generate_random_cmdp(5, 2, 3, 7).unwrap();
        let r0 = cmdp.context(0).rewards().to_vec();
        for c in 1..3 {
            assert_eq!(cmdp.context(c).rewards(), &r0[..]);
        }
        assert!(r0.iter().all(|&r| (0.0..=1.0).contains(&r)));
    }
}
