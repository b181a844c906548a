use cmdp_core::{derive_seed, generate::sample_simplex_row, seeded_rng};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BoundsError, Result};

/// A probability bound that may exceed 1; callers sweeping parameter grids
/// get the clipped value plus a flag instead of an error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    /// The expression evaluated as written (may exceed 1 or overflow).
    pub raw: f64,
    /// raw clipped to [0, 1].
    pub value: f64,
    /// True when the raw expression was no bound at all (raw > 1).
    pub vacuous: bool,
}

impl BoundValue {
    pub fn from_raw(raw: f64) -> Self {
        let vacuous = !(raw <= 1.0);
        Self { raw, value: raw.clamp(0.0, 1.0), vacuous }
    }
}

/// Tail bound on the L1 deviation of an empirical distribution over S atoms
/// from its source after m samples: exp(S - m eps^2 / 2), clipped to [0, 1].
pub fn weissman_bound(num_atoms: usize, samples: usize, eps: f64) -> Result<BoundValue> {
    if eps <= 0.0 {
        return Err(BoundsError::InvalidParameter(format!("eps {eps} must be positive")));
    }
    let exponent = num_atoms as f64 - samples as f64 * eps * eps / 2.0;
    Ok(BoundValue::from_raw(exponent.exp()))
}

/// Empirical exceedance frequency for the same event: draw one distribution
/// P uniformly on the simplex, then per trial sample m points i.i.d. and
/// test whether the empirical distribution deviates from P by at least eps
/// in L1. With m = 0 the empirical distribution is taken uniform.
pub fn verify_weissman_mc(
    num_atoms: usize,
    samples: usize,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if num_atoms == 0 {
        return Err(BoundsError::InvalidParameter("need at least one atom".into()));
    }
    if trials == 0 {
        return Err(BoundsError::InvalidParameter("need at least one trial".into()));
    }
    if eps <= 0.0 {
        return Err(BoundsError::InvalidParameter(format!("eps {eps} must be positive")));
    }
    let mut rng = seeded_rng(seed);
    let mut p = vec![0.0; num_atoms];
    sample_simplex_row(&mut rng, &mut p);
    let cdf: Vec<f64> = p
        .iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect();

    let trial_master = derive_seed(seed, 1);
    let exceedances: u64 = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut counts = vec![0u64; num_atoms];
            if samples > 0 {
                let mut trng = seeded_rng(derive_seed(trial_master, trial));
                for _ in 0..samples {
                    let u: f64 = trng.random();
                    let idx = cdf.partition_point(|&c| c <= u).min(num_atoms - 1);
                    counts[idx] += 1;
                }
            }
            let l1: f64 = if samples == 0 {
                let uniform = 1.0 / num_atoms as f64;
                p.iter().map(|&pi| (pi - uniform).abs()).sum()
            } else {
                let inv = 1.0 / samples as f64;
                counts.iter().zip(&p).map(|(&c, &pi)| (c as f64 * inv - pi).abs()).sum()
            };
            u64::from(l1 >= eps)
        })
        .sum();
    Ok(exceedances as f64 / trials as f64)
}
