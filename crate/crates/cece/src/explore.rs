use cmdp_core::{LiveEpisode, Trajectory};

/// Run the uniform policy for exactly `steps` actions on a live episode and
/// return the trajectory observed so far. The episode is left positioned at
/// the last state reached, ready for exploitation.
pub fn uniform_explore(episode: &mut LiveEpisode<'_>, steps: usize) -> Trajectory {
    for _ in 0..steps {
        episode.step_uniform();
    }
    episode.trajectory()
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmdp_core::{seeded_rng, CdfKernel, Mdp, StartState, TransitionKernel};

    fn uniform_mdp(s: usize, a: usize) -> Mdp {
        Mdp::new(TransitionKernel::uniform(s, a), vec![0.5; s], vec![1.0 / s as f64; s]).unwrap()
    }

    #[test]
    fn one_step_records_two_states() {
        let mdp = uniform_mdp(3, 2);
        let cdf = CdfKernel::new(mdp.kernel());
        let mut ep =
            LiveEpisode::new(&mdp, &cdf, None, StartState::InitialDraw, seeded_rng(1)).unwrap();
        let partial = uniform_explore(&mut ep, 1);
        assert_eq!(partial.actions().len(), 1);
        assert_eq!(partial.states().len(), 2);
        assert_eq!(ep.steps_taken(), 1);
    }

    #[test]
    fn single_action_space_is_forced() {
        let mdp = uniform_mdp(2, 1);
        let cdf = CdfKernel::new(mdp.kernel());
        let mut ep =
            LiveEpisode::new(&mdp, &cdf, None, StartState::InitialDraw, seeded_rng(2)).unwrap();
        let partial = uniform_explore(&mut ep, 10);
        assert!(partial.actions().iter().all(|&a| a == 0));
    }

    #[test]
    fn action_frequencies_are_uniform() {
        let mdp = uniform_mdp(4, 4);
        let cdf = CdfKernel::new(mdp.kernel());
        let mut ep =
            LiveEpisode::new(&mdp, &cdf, None, StartState::InitialDraw, seeded_rng(3)).unwrap();
        let partial = uniform_explore(&mut ep, 10_000);
        let mut counts = [0usize; 4];
        for &a in partial.actions() {
            counts[a] += 1;
        }
        for &c in &counts {
            let freq = c as f64 / 10_000.0;
            assert!((freq - 0.25).abs() < 0.02, "action frequency {freq}");
        }
    }
}
