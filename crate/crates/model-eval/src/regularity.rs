use cmdp_core::{ContextualMdp, EmpiricalModel, Trajectory};
use serde::{Deserialize, Serialize};

use crate::distance::model_distance;
use crate::error::{EvalError, Result};

/// Target constants for the regularity check.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RegularityTargets {
    pub alpha: f64,
    pub beta: f64,
    pub separation: f64,
}

/// Horizon-length clause, reported as an order-of-magnitude advisory: the
/// stated threshold has a logarithm whose argument is below 1 for any
/// realistic D, so only the magnitude |log(D / KSA)| is meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonAdvisory {
    /// (S / (alpha * D^2)) * |ln(D / (K * S * A))|.
    pub threshold_magnitude: f64,
    /// Whether the shortest observed trajectory reaches the magnitude.
    pub satisfied: bool,
}

/// Observed regularity constants and per-clause verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    /// min over trajectories and (s, a) of visits / T.
    pub alpha_observed: f64,
    /// min over contexts of (episodes with that context) / H.
    pub beta_observed: f64,
    /// min over context pairs of the max-(s, a) L1 distance.
    pub separation_d: f64,
    /// Every context sampled at least beta * H times.
    pub sampling_clause_ok: bool,
    /// Every context pair separated by at least the target D.
    pub separation_clause_ok: bool,
    /// Every (s, a) visited at least alpha * T times in every trajectory.
    pub visitation_clause_ok: bool,
    pub horizon_advisory: HorizonAdvisory,
}

/// Evaluate Assumption-style regularity of a batch of labeled trajectories
/// against target constants.
pub fn check_regularity(
    cmdp: &ContextualMdp,
    trajectories: &[Trajectory],
    targets: RegularityTargets,
) -> Result<RegularityReport> {
    if trajectories.is_empty() {
        return Err(EvalError::InvalidParameter("no trajectories given".into()));
    }
    let s_n = cmdp.num_states();
    let a_n = cmdp.num_actions();
    let k = cmdp.num_contexts();

    let mut context_counts = vec![0usize; k];
    let mut alpha_observed = f64::INFINITY;
    let mut min_horizon = usize::MAX;
    for t in trajectories {
        let c = t.true_context().ok_or_else(|| {
            EvalError::InvalidParameter("trajectory lacks a true-context label".into())
        })?;
        if c >= k {
            return Err(EvalError::InvalidParameter(format!("context {c} out of range")));
        }
        context_counts[c] += 1;
        min_horizon = min_horizon.min(t.horizon());
        let model = EmpiricalModel::from_trajectory(t, s_n, a_n)
            .map_err(|e| EvalError::InvalidParameter(e.to_string()))?;
        let horizon = t.horizon() as f64;
        for s in 0..s_n {
            for a in 0..a_n {
                alpha_observed = alpha_observed.min(model.visits(s, a) as f64 / horizon);
            }
        }
    }

    let h = trajectories.len() as f64;
    let beta_observed = context_counts
        .iter()
        .map(|&n| n as f64 / h)
        .fold(f64::INFINITY, f64::min);

    let mut separation_d = if k > 1 { f64::INFINITY } else { 0.0 };
    for c1 in 0..k {
        for c2 in c1 + 1..k {
            let d = model_distance(cmdp.context(c1).kernel(), cmdp.context(c2).kernel())?.epsilon;
            separation_d = separation_d.min(d);
        }
    }

    let threshold_magnitude = if targets.alpha > 0.0 && targets.separation > 0.0 {
        let ratio = targets.separation / (k * s_n * a_n) as f64;
        (s_n as f64 / (targets.alpha * targets.separation * targets.separation))
            * ratio.ln().abs()
    } else {
        f64::INFINITY
    };

    Ok(RegularityReport {
        alpha_observed,
        beta_observed,
        separation_d,
        sampling_clause_ok: beta_observed >= targets.beta,
        separation_clause_ok: separation_d >= targets.separation,
        visitation_clause_ok: alpha_observed >= targets.alpha,
        horizon_advisory: HorizonAdvisory {
            threshold_magnitude,
            satisfied: min_horizon as f64 >= threshold_magnitude,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmdp_core::{generate_random_cmdp, simulate_episode, Mdp, Policy, TransitionKernel};

    fn identity_swap_cmdp() -> ContextualMdp {
        let identity = TransitionKernel::from_rows(vec![
            vec![vec![1.0, 0.0]],
            vec![vec![0.0, 1.0]],
        ])
        .unwrap();
        let swap = TransitionKernel::from_rows(vec![
            vec![vec![0.0, 1.0]],
            vec![vec![1.0, 0.0]],
        ])
        .unwrap();
        let rewards = vec![0.0, 1.0];
        let initial = vec![0.5, 0.5];
        ContextualMdp::new(
            vec![
                Mdp::new(identity, rewards.clone(), initial.clone()).unwrap(),
                Mdp::new(swap, rewards, initial).unwrap(),
            ],
            vec![0.5, 0.5],
        )
        .unwrap()
    }

    fn targets() -> RegularityTargets {
        RegularityTargets { alpha: 0.01, beta: 0.2, separation: 1.0 }
    }

    #[test]
    fn single_context_beta_is_one() {
        let cmdp = generate_random_cmdp(3, 2, 1, 3).unwrap();
        let trajs: Vec<_> = (0..5)
            .map(|i| simulate_episode(&cmdp, &Policy::Uniform, 30, i).unwrap())
            .collect();
        let r = check_regularity(&cmdp, &trajs, targets()).unwrap();
        assert_eq!(r.beta_observed, 1.0);
        assert!(r.sampling_clause_ok);
    }

    #[test]
    fn identical_contexts_have_zero_separation() {
        let base = generate_random_cmdp(3, 2, 1, 4).unwrap();
        let m = base.context(0).clone();
        let cmdp = ContextualMdp::new(vec![m.clone(), m], vec![0.5, 0.5]).unwrap();
        let trajs: Vec<_> = (0..4)
            .map(|i| simulate_episode(&cmdp, &Policy::Uniform, 20, i).unwrap())
            .collect();
        let r = check_regularity(&cmdp, &trajs, targets()).unwrap();
        assert_eq!(r.separation_d, 0.0);
        assert!(!r.separation_clause_ok);
    }

    #[test]
    fn disjoint_kernels_have_separation_two() {
        let cmdp = identity_swap_cmdp();
        let trajs: Vec<_> = (0..6)
            .map(|i| simulate_episode(&cmdp, &Policy::Uniform, 50, 100 + i).unwrap())
            .collect();
        let r = check_regularity(&cmdp, &trajs, targets()).unwrap();
        assert_eq!(r.separation_d, 2.0);
        assert!(r.separation_clause_ok);
    }

    #[test]
    fn unlabeled_trajectories_rejected() {
        let cmdp = generate_random_cmdp(2, 1, 1, 5).unwrap();
        let t = cmdp_core::simulate_on_mdp(
            cmdp.context(0),
            &Policy::Uniform,
            cmdp_core::StartState::InitialDraw,
            10,
            0,
        )
        .unwrap();
        assert!(check_regularity(&cmdp, &[t], targets()).is_err());
    }
}
