use cmdp_core::{EmpiricalModel, Trajectory, TransitionKernel};
use model_eval::l1_row_distance;

use crate::error::{CeceError, Result};

/// How per-row distances combine into one score per candidate model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L1Aggregate {
    /// max over visited (s, a) rows; the worst-row criterion.
    Max,
    /// sum over visited (s, a) rows; averages noise across rows.
    Sum,
}

/// Classify a partial trajectory to the candidate model at the smallest
/// max-(s, a) L1 distance, where the max runs only over (s, a) pairs actually
/// visited (unvisited rows carry no information and would bias toward
/// near-uniform models). Ties break toward the lowest index.
pub fn min_l1_classify(partial: &Trajectory, models: &[TransitionKernel]) -> Result<usize> {
    classify_with(partial, models, L1Aggregate::Max)
}

/// As [`min_l1_classify`] but summing row distances over visited pairs.
pub fn min_l1_sum_classify(partial: &Trajectory, models: &[TransitionKernel]) -> Result<usize> {
    classify_with(partial, models, L1Aggregate::Sum)
}

pub fn classify_with(
    partial: &Trajectory,
    models: &[TransitionKernel],
    aggregate: L1Aggregate,
) -> Result<usize> {
    let first = models
        .first()
        .ok_or_else(|| CeceError::InvalidParameter("no candidate models".into()))?;
    if models.iter().any(|m| !m.same_shape(first)) {
        return Err(CeceError::InvalidParameter("candidate models differ in shape".into()));
    }
    let empirical =
        EmpiricalModel::from_trajectory(partial, first.num_states(), first.num_actions())?;
    classify_empirical(&empirical, models, aggregate)
}

/// Classification given an already-built empirical model of the partial
/// trajectory.
pub fn classify_empirical(
    empirical: &EmpiricalModel,
    models: &[TransitionKernel],
    aggregate: L1Aggregate,
) -> Result<usize> {
    if models.is_empty() {
        return Err(CeceError::InvalidParameter("no candidate models".into()));
    }
    if empirical.total_transitions() == 0 {
        return Err(CeceError::ClassificationImpossible);
    }
    let visited: Vec<(usize, usize)> = empirical.visited_pairs().collect();
    let mut best = f64::INFINITY;
    let mut best_k = 0;
    for (k, model) in models.iter().enumerate() {
        let mut acc = 0.0f64;
        for &(s, a) in &visited {
            let d = l1_row_distance(empirical.kernel_estimate().row(s, a), model.row(s, a));
            match aggregate {
                L1Aggregate::Max => acc = acc.max(d),
                L1Aggregate::Sum => acc += d,
            }
        }
        if acc < best {
            best = acc;
            best_k = k;
        }
    }
    Ok(best_k)
}
