use crate::error::{EvalError, Result};

/// Clustering quality score in nats.
///
/// For each true context, take the Shannon entropy of the empirical
/// distribution of cluster labels among that context's trajectories, then
/// average the entropies weighted by each context's share of the sample.
/// 0 means every context maps into a single cluster; log K means labels and
/// contexts are independent.
pub fn entropy_score(labels: &[usize], true_contexts: &[usize], num_clusters: usize) -> Result<f64> {
    if labels.is_empty() {
        return Err(EvalError::InvalidParameter("no labels given".into()));
    }
    if labels.len() != true_contexts.len() {
        return Err(EvalError::DimensionMismatch(format!(
            "{} labels for {} contexts",
            labels.len(),
            true_contexts.len()
        )));
    }
    if num_clusters == 0 {
        return Err(EvalError::InvalidParameter("cluster count must be positive".into()));
    }
    let max_context = true_contexts.iter().copied().max().unwrap();
    if let Some(&bad) = labels.iter().find(|&&l| l >= num_clusters) {
        return Err(EvalError::InvalidParameter(format!(
            "label {bad} out of range for {num_clusters} clusters"
        )));
    }

    // counts[c][k]: trajectories of true context c assigned to cluster k.
    let mut counts = vec![vec![0usize; num_clusters]; max_context + 1];
    for (&l, &c) in labels.iter().zip(true_contexts) {
        counts[c][l] += 1;
    }

    let total = labels.len() as f64;
    let mut score = 0.0;
    for per_context in &counts {
        let n_c: usize = per_context.iter().sum();
        if n_c == 0 {
            continue;
        }
        let mut h = 0.0;
        for &n in per_context {
            if n > 0 {
                let p = n as f64 / n_c as f64;
                h -= p * p.ln();
            }
        }
        score += (n_c as f64 / total) * h;
    }
    Ok(score)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_labels_score_zero() {
        let contexts = vec![0, 1, 2, 0, 1, 2];
        let score = entropy_score(&contexts, &contexts, 3).unwrap();
        assert_eq!(score, 0.0);
    }

    #[test]
    fn half_split_context() {
        // K=2: one context split 50/50 across clusters, the other pure,
        // equal sizes -> 0.5 * ln 2.
        let labels = vec![0, 1, 0, 0];
        let contexts = vec![0, 0, 1, 1];
        let score = entropy_score(&labels, &contexts, 2).unwrap();
        assert!((score - 0.5 * 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn permuted_labels_still_zero() {
        let contexts = vec![0, 1, 0, 1];
        let labels = vec![1, 0, 1, 0];
        assert_eq!(entropy_score(&labels, &contexts, 2).unwrap(), 0.0);
    }

    #[test]
    fn empty_and_out_of_range_rejected() {
        assert!(entropy_score(&[], &[], 2).is_err());
        assert!(entropy_score(&[2], &[0], 2).is_err());
        assert!(entropy_score(&[0, 0], &[0], 2).is_err());
    }
}
