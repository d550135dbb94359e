use proptest::prelude::*;
use rstre_core::branching::{
    bp_height_tail, coupled_domination_trial_with_p, explore_component, max_valid_j, simulate_bp, BPRun,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn full_runs_take_n_steps(n in 1usize..2000, c in 0.2f64..3.0, start in 0usize..2000, seed in any::<u64>()) {
        let p = (c / n as f64).min(1.0);
        let log = explore_component(n, p, start % n, seed, true).unwrap();
        prop_assert_eq!(log.steps, n);
        prop_assert!(log.recursion_holds());
        // every vertex is either discovered once or starts a component
        let restarts = log.active_sizes[..n].iter().skip(1).filter(|&&a| a == 0).count() as u64;
        prop_assert_eq!(log.eta.iter().sum::<u64>() + 1 + restarts, n as u64);
        prop_assert_eq!(*log.active_sizes.last().unwrap(), 0);
        prop_assert!(log.cycle_edges_found <= log.cycle_edges_total);
    }

    #[test]
    fn single_component_runs(n in 1usize..5000, seed in any::<u64>()) {
        let log = explore_component(n, 1.0 / n as f64, 0, seed, false).unwrap();
        prop_assert!(log.recursion_holds());
        prop_assert_eq!(log.steps, log.component_size());
        prop_assert_eq!(log.component_of_start[0], 0);
        let mut seen = log.component_of_start.clone();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), log.component_size());
    }

    #[test]
    fn domination_holds(n in 2usize..3000, c in 0.5f64..1.5, seed in any::<u64>()) {
        let t = coupled_domination_trial_with_p(n, c / n as f64, seed).unwrap();
        prop_assert!(t.dominated);
        prop_assert!(t.component_diameter as usize <= t.twice_height());
        prop_assert_eq!(t.sphere_sizes.iter().sum::<u64>(), t.component_size as u64);
    }

    #[test]
    fn bp_generations_are_consistent(n in 2usize..10_000, seed in any::<u64>()) {
        // critical offspring law Bin(n, 1/n)
        let cap = 200;
        let run = simulate_bp(n, cap, seed).unwrap();
        prop_assert_eq!(run.generation_sizes[0], 1);
        prop_assert!(run.generation_sizes[run.height] > 0);
        prop_assert_eq!(run.total_progeny, run.generation_sizes.iter().sum::<u64>());
        prop_assert_eq!(run.height + 1, run.generation_sizes.len());
        prop_assert!(run.height <= cap);
        prop_assert_eq!(run.capped, run.height == cap);
    }
}

#[test]
fn bp_tail_is_monotone() {
    let cap = 500;
    let runs: Vec<BPRun> = (0..5000).map(|s| simulate_bp(1000, cap, s).unwrap()).collect();
    let tails: Vec<f64> = [1, 2, 5, 10, 50, 100]
        .iter()
        .map(|&k| bp_height_tail(&runs, k, cap).unwrap())
        .collect();
    assert!(tails.windows(2).all(|w| w[0] >= w[1]), "{tails:?}");
    assert!(bp_height_tail(&runs, cap, cap).is_err());
}

#[test]
fn valid_j_range() {
    assert_eq!(max_valid_j(1), 1);
    assert_eq!(max_valid_j(31), 1);
    assert_eq!(max_valid_j(32), 2);
    assert_eq!(max_valid_j(100_000), 10);
}

#[test]
fn supercritical_processes_saturate_instead_of_overflowing() {
    let mut rng = rstre_core::seeds::rng_from_seed(3);
    let run = rstre_core::branching::simulate_bp_with_rng(1000, 0.5, 200, &mut rng).unwrap();
    assert!(run.capped);
    assert_eq!(run.height, 200);
    let t = coupled_domination_trial_with_p(500, 0.01, 4).unwrap();
    assert!(t.bp_capped && t.dominated);
}
