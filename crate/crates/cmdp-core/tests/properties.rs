use cmdp_core::{
    generate_random_cmdp, optimal_finite_horizon, serialize, simulate_episode, Policy, PROB_TOL,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_kernel_rows_normalize(
        s in 1usize..8,
        a in 1usize..4,
        k in 1usize..4,
        seed in any::<u64>(),
    ) {
        let cmdp = generate_random_cmdp(s, a, k, seed).unwrap();
        for m in cmdp.contexts() {
            for x in 0..s {
                for act in 0..a {
                    let row = m.kernel().row(x, act);
                    let sum: f64 = row.iter().sum();
                    prop_assert!((sum - 1.0).abs() <= PROB_TOL);
                    prop_assert!(row.iter().all(|&p| (0.0..=1.0).contains(&p)));
                }
            }
        }
    }

    #[test]
    fn optimal_value_bounded_by_reward_budget(
        s in 1usize..6,
        a in 1usize..3,
        horizon in 0usize..8,
        seed in any::<u64>(),
    ) {
        let cmdp = generate_random_cmdp(s, a, 1, seed).unwrap();
        let sol = optimal_finite_horizon(cmdp.context(0), horizon);
        prop_assert!(sol.value <= (horizon + 1) as f64 + 1e-12);
        prop_assert!(sol.value >= 0.0);
    }

    #[test]
    fn simulation_reproducible_byte_for_byte(
        s in 1usize..5,
        a in 1usize..3,
        k in 1usize..3,
        horizon in 1usize..20,
        seed in any::<u64>(),
        ep_seed in any::<u64>(),
    ) {
        let cmdp = generate_random_cmdp(s, a, k, seed).unwrap();
        let t1 = simulate_episode(&cmdp, &Policy::Uniform, horizon, ep_seed).unwrap();
        let t2 = simulate_episode(&cmdp, &Policy::Uniform, horizon, ep_seed).unwrap();
        let j1 = serialize::to_json_string(&t1).unwrap();
        let j2 = serialize::to_json_string(&t2).unwrap();
        prop_assert_eq!(j1, j2);
    }

    #[test]
    fn empirical_rows_normalize(
        s in 1usize..5,
        a in 1usize..3,
        horizon in 1usize..40,
        seed in any::<u64>(),
    ) {
        let cmdp = generate_random_cmdp(s, a, 1, seed).unwrap();
        let t = simulate_episode(&cmdp, &Policy::Uniform, horizon, seed ^ 1).unwrap();
        let m = cmdp_core::EmpiricalModel::from_trajectory(&t, s, a).unwrap();
        for x in 0..s {
            for act in 0..a {
                let sum: f64 = m.kernel_estimate().row(x, act).iter().sum();
                prop_assert!((sum - 1.0).abs() <= PROB_TOL);
            }
        }
    }
}
