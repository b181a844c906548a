//! The analysis rates for the concrete CECE instance and the mini-batch
//! regret bound assembled from them.
//!
//! The rate expressions are order-of-magnitude statements; every evaluator
//! takes an explicit `constant_scale` multiplier (default 1) and the results
//! are reporting tools, not quantities asserted against simulation.

use serde::{Deserialize, Serialize};

use crate::error::{BoundsError, Result};
use crate::weissman::BoundValue;

/// Inputs shared by the rate and regret-bound calculators.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RateInputs {
    pub num_states: usize,
    pub num_actions: usize,
    pub num_contexts: usize,
    pub horizon: usize,
    pub exploration_steps: usize,
    pub episodes: usize,
    /// Minimum max-(s, a) L1 separation between context kernels.
    pub separation: f64,
    /// Minimum per-trajectory visit fraction of each (s, a) pair.
    pub alpha: f64,
    /// Minimum per-context share of the episodes.
    pub beta: f64,
    pub constant_scale: f64,
}

impl RateInputs {
    fn validate(&self) -> Result<()> {
        if self.separation <= 0.0 {
            return Err(BoundsError::InvalidParameter(format!(
                "separation {} must be positive",
                self.separation
            )));
        }
        if !(0.0 < self.alpha && self.alpha <= 1.0) {
            return Err(BoundsError::InvalidParameter(format!(
                "alpha {} outside (0, 1]",
                self.alpha
            )));
        }
        if !(0.0 < self.beta && self.beta <= 1.0) {
            return Err(BoundsError::InvalidParameter(format!(
                "beta {} outside (0, 1]",
                self.beta
            )));
        }
        if self.constant_scale <= 0.0 {
            return Err(BoundsError::InvalidParameter("constant_scale must be positive".into()));
        }
        Ok(())
    }
}

/// The four rates of the analyzed instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateBundle {
    /// Model-estimation error scale: c K S A exp(S - alpha T D^2).
    pub epsilon: f64,
    /// Clustering failure probability: c K S A exp(S - alpha T beta H D^2).
    pub delta1: BoundValue,
    /// Misclassification probability: c K exp(S - T_EC (D/2 - eps)^2);
    /// None when the guard D > 2 eps fails (no silent value).
    pub delta2: Option<BoundValue>,
    /// Exploitation value loss: c S^2 T^2 eps.
    pub zeta: f64,
    pub constant_scale: f64,
}

/// Evaluate the four rates for the concrete instance.
pub fn lemma1_rates(inputs: &RateInputs) -> Result<RateBundle> {
    inputs.validate()?;
    let s = inputs.num_states as f64;
    let a = inputs.num_actions as f64;
    let k = inputs.num_contexts as f64;
    let t = inputs.horizon as f64;
    let t_ec = inputs.exploration_steps as f64;
    let h = inputs.episodes as f64;
    let d = inputs.separation;
    let c = inputs.constant_scale;

    let epsilon = c * k * s * a * (s - inputs.alpha * t * d * d).exp();
    let delta1 =
        BoundValue::from_raw(c * k * s * a * (s - inputs.alpha * t * inputs.beta * h * d * d).exp());
    let delta2 = if d > 2.0 * epsilon {
        let gap = d / 2.0 - epsilon;
        Some(BoundValue::from_raw(c * k * (s - t_ec * gap * gap).exp()))
    } else {
        None
    };
    let zeta = c * s * s * t * t * epsilon;
    Ok(RateBundle { epsilon, delta1, delta2, zeta, constant_scale: c })
}

/// The misclassification probability in the two-term form carried by the
/// underlying argument (exponents divided by 2, union bound over the wrong
/// models); exposed separately from the headline single-term rate.
pub fn delta2_two_term(
    num_states: usize,
    num_contexts: usize,
    exploration_steps: usize,
    separation: f64,
    epsilon: f64,
    constant_scale: f64,
) -> Result<BoundValue> {
    if separation <= 2.0 * epsilon {
        return Err(BoundsError::InvalidParameter(format!(
            "requires separation > 2 eps, got D = {separation}, eps = {epsilon}"
        )));
    }
    let s = num_states as f64;
    let k = num_contexts as f64;
    let t_ec = exploration_steps as f64;
    let close = separation / 2.0 - epsilon;
    let far = 1.5 * separation + epsilon;
    let raw = constant_scale
        * ((s - t_ec * close * close / 2.0).exp() + k * (s - t_ec * far * far / 2.0).exp());
    Ok(BoundValue::from_raw(raw))
}

/// Mini-batch regret bound:
/// (1 - d1) H_L (d2 E[T] + (1 - d2)(zeta + E[T_EC])) + d1 H_L E[T].
pub fn theorem1_regret_bound(
    batch_episodes: usize,
    expected_horizon: f64,
    expected_exploration: f64,
    delta1: f64,
    delta2: f64,
    zeta: f64,
) -> Result<f64> {
    for (name, p) in [("delta1", delta1), ("delta2", delta2)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(BoundsError::InvalidParameter(format!("{name} = {p} outside [0, 1]")));
        }
    }
    if zeta < 0.0 {
        return Err(BoundsError::InvalidParameter(format!("zeta {zeta} must be nonnegative")));
    }
    let h_l = batch_episodes as f64;
    Ok((1.0 - delta1)
        * h_l
        * (delta2 * expected_horizon + (1.0 - delta2) * (zeta + expected_exploration))
        + delta1 * h_l * expected_horizon)
}

/// As [`theorem1_regret_bound`] with the rates taken from a bundle; requires
/// a defined misclassification rate.
pub fn theorem1_regret_bound_from_rates(
    batch_episodes: usize,
    expected_horizon: f64,
    expected_exploration: f64,
    rates: &RateBundle,
) -> Result<f64> {
    let delta2 = rates
        .delta2
        .as_ref()
        .ok_or_else(|| {
            BoundsError::InvalidParameter(
                "misclassification rate undefined (separation <= 2 eps)".into(),
            )
        })?
        .value;
    theorem1_regret_bound(
        batch_episodes,
        expected_horizon,
        expected_exploration,
        rates.delta1.value,
        delta2,
        rates.zeta,
    )
}

/// The three-summand end-to-end bound for the concrete instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorollaryBound {
    /// Misclassification loss: c H_L T K exp(S - T_EC D^2 / 4).
    pub misclassification: f64,
    /// Model-uncertainty loss plus the exploration floor:
    /// c (H_L T^2 K S^3 A exp(S - alpha T D^2) + H_L T_EC).
    pub model_uncertainty: f64,
    /// Misclustering loss, the only term that decays with the episodes seen
    /// before this batch: c H_L T K S A exp(S - alpha T beta H_prev D^2).
    pub misclustering: f64,
    pub total: f64,
}

/// Evaluate the per-mini-batch corollary bound; `inputs.episodes` is read as
/// the episode count seen before this batch (H-bar).
pub fn corollary_bound(inputs: &RateInputs, batch_episodes: usize) -> Result<CorollaryBound> {
    inputs.validate()?;
    let s = inputs.num_states as f64;
    let a = inputs.num_actions as f64;
    let k = inputs.num_contexts as f64;
    let t = inputs.horizon as f64;
    let t_ec = inputs.exploration_steps as f64;
    let h_prev = inputs.episodes as f64;
    let h_l = batch_episodes as f64;
    let d = inputs.separation;
    let c = inputs.constant_scale;

    let misclassification = c * h_l * t * k * (s - t_ec * d * d / 4.0).exp();
    let model_uncertainty = c
        * (h_l * t * t * k * s * s * s * a * (s - inputs.alpha * t * d * d).exp() + h_l * t_ec);
    let misclustering =
        c * h_l * t * k * s * a * (s - inputs.alpha * t * inputs.beta * h_prev * d * d).exp();
    Ok(CorollaryBound {
        misclassification,
        model_uncertainty,
        misclustering,
        total: misclassification + model_uncertainty + misclustering,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs() -> RateInputs {
        RateInputs {
            num_states: 2,
            num_actions: 2,
            num_contexts: 2,
            horizon: 100,
            exploration_steps: 30,
            episodes: 50,
            separation: 2.0,
            alpha: 0.25,
            beta: 0.5,
            constant_scale: 1.0,
        }
    }

    #[test]
    fn epsilon_is_constant_in_episodes_but_delta1_decays() {
        let mut a = inputs();
        a.episodes = 10;
        let mut b = inputs();
        b.episodes = 10_000;
        let ra = lemma1_rates(&a).unwrap();
        let rb = lemma1_rates(&b).unwrap();
        assert_eq!(ra.epsilon, rb.epsilon);
        assert!(rb.delta1.raw < ra.delta1.raw);
        assert!(rb.delta1.raw < 1e-30);
    }

    #[test]
    fn tiny_instance_worked_value() {
        let i = RateInputs {
            num_states: 1,
            num_actions: 1,
            num_contexts: 1,
            horizon: 20,
            exploration_steps: 5,
            episodes: 10,
            separation: 2.0,
            alpha: 1.0,
            beta: 1.0,
            constant_scale: 1.0,
        };
        let r = lemma1_rates(&i).unwrap();
        // exp(1 - 80) = exp(-79), about 4.9e-35.
        assert!((r.epsilon - (-79.0f64).exp()).abs() < 1e-45);
        assert!(r.epsilon > 4.8e-35 && r.epsilon < 5.0e-35);
    }

    #[test]
    fn zero_exploration_makes_delta2_vacuous() {
        let mut i = inputs();
        i.exploration_steps = 0;
        let r = lemma1_rates(&i).unwrap();
        let d2 = r.delta2.expect("separation dominates epsilon here");
        assert!(d2.vacuous);
        assert_eq!(d2.value, 1.0);
    }

    #[test]
    fn delta2_undefined_without_separation_margin() {
        let mut i = inputs();
        // Make epsilon enormous: no data at all.
        i.horizon = 0;
        i.alpha = 1.0;
        let r = lemma1_rates(&i).unwrap();
        assert!(r.epsilon > 1.0);
        assert!(r.delta2.is_none());
        assert!(delta2_two_term(2, 2, 30, 2.0, r.epsilon, 1.0).is_err());
    }

    #[test]
    fn theorem1_degenerate_cases() {
        // No failures anywhere: only the exploration floor remains.
        let b = theorem1_regret_bound(100, 2000.0, 600.0, 0.0, 0.0, 0.0).unwrap();
        assert!((b - 100.0 * 600.0).abs() < 1e-9);
        // Certain clustering failure: the whole batch is lost.
        let b = theorem1_regret_bound(100, 2000.0, 600.0, 1.0, 0.0, 0.0).unwrap();
        assert!((b - 100.0 * 2000.0).abs() < 1e-9);
    }

    #[test]
    fn theorem1_monotone_in_each_failure_rate() {
        let base = theorem1_regret_bound(50, 1000.0, 200.0, 0.05, 0.1, 20.0).unwrap();
        assert!(theorem1_regret_bound(50, 1000.0, 200.0, 0.06, 0.1, 20.0).unwrap() > base);
        assert!(theorem1_regret_bound(50, 1000.0, 200.0, 0.05, 0.2, 20.0).unwrap() > base);
        assert!(theorem1_regret_bound(50, 1000.0, 200.0, 0.05, 0.1, 30.0).unwrap() > base);
        assert!(theorem1_regret_bound(50, 1000.0, 250.0, 0.05, 0.1, 20.0).unwrap() > base);
    }

    #[test]
    fn corollary_misclustering_vanishes_with_history() {
        let mut few = inputs();
        few.episodes = 10;
        let mut many = inputs();
        many.episodes = 100_000;
        let b_few = corollary_bound(&few, 25).unwrap();
        let b_many = corollary_bound(&many, 25).unwrap();
        assert!(b_many.misclustering < b_few.misclustering);
        assert!(b_many.misclustering < 1e-30);
        // Exploration floor dominates once every exponential is negligible.
        let floor = 25.0 * few.exploration_steps as f64;
        assert!((b_many.total - (b_many.misclassification + b_many.model_uncertainty
            + b_many.misclustering))
            .abs()
            < 1e-12);
        assert!(b_many.model_uncertainty >= floor);
    }
}
