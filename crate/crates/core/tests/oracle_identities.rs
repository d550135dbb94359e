use proptest::prelude::*;
use rstre_core::oracles::{
    bottleneck_ratio_exact, effective_resistance, effective_resistance_exact, enumerate_spanning_trees,
    km_distance_tail, matrix_tree_determinant, matrix_tree_determinant_exact, partition_function_exact,
    ust_edge_probability, SmallWeightedGraph,
};
use rstre_core::component_sampling::rational_to_f64;

fn graph_strategy(max_m: usize) -> impl Strategy<Value = SmallWeightedGraph> {
    (2..=max_m)
        .prop_flat_map(|m| (Just(m), prop::collection::vec(prop::option::weighted(0.7, 0.1f64..10.0), m * (m - 1) / 2)))
        .prop_filter_map("connected", |(m, ws)| {
            let mut g = SmallWeightedGraph::empty(m).unwrap();
            let mut i = 0;
            for a in 0..m {
                for b in a + 1..m {
                    if let Some(w) = ws[i] {
                        g.set_weight(a, b, w).unwrap();
                    }
                    i += 1;
                }
            }
            g.is_connected().then_some(g)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_tree_matches_enumeration(g in graph_strategy(8)) {
        let z = enumerate_spanning_trees(&g).unwrap().partition;
        prop_assert!((z - matrix_tree_determinant(&g)).abs() <= 1e-10 * z);
        prop_assert_eq!(partition_function_exact(&g).unwrap(), matrix_tree_determinant_exact(&g));
    }

    #[test]
    fn kirchhoff_and_handshake(g in graph_strategy(7)) {
        let mut total = 0.0;
        for (a, b, _) in g.edges() {
            let p = ust_edge_probability(&g, a, b).unwrap();
            prop_assert!(p.discrepancy() < 1e-10);
            total += p.enumeration;
        }
        prop_assert!((total - (g.m() - 1) as f64).abs() < 1e-10);
    }

    #[test]
    fn resistance_is_monotone_in_weights(g in graph_strategy(6), bump in 0.5f64..5.0) {
        // raising a conductance never raises an effective resistance
        let (a, b, w) = g.edges()[0];
        let mut h = g.clone();
        h.set_weight(a, b, w + bump).unwrap();
        let m = g.m();
        for u in 0..m {
            for v in u + 1..m {
                prop_assert!(effective_resistance(&h, u, v).unwrap() <= effective_resistance(&g, u, v).unwrap() + 1e-12);
            }
        }
        let exact = rational_to_f64(&effective_resistance_exact(&g, a, b).unwrap());
        prop_assert!((exact - effective_resistance(&g, a, b).unwrap()).abs() < 1e-12 * exact.max(1.0));
    }

    #[test]
    fn bottleneck_ratio_is_at_most_half(g in graph_strategy(7)) {
        let phi = bottleneck_ratio_exact(&g).unwrap();
        prop_assert!(phi > 0.0 && phi <= 0.5 + 1e-12);
    }
}

#[test]
fn distance_tail_is_a_distribution() {
    for m in 2..=60 {
        assert_eq!(km_distance_tail(m, 1).unwrap(), 1.0);
        assert_eq!(km_distance_tail(m, m).unwrap(), 0.0);
        let mut mass = 0.0;
        for len in 1..m {
            let here = km_distance_tail(m, len).unwrap() - km_distance_tail(m, len + 1).unwrap();
            assert!(here >= 0.0, "m = {m}, len = {len}");
            mass += here;
        }
        assert!((mass - 1.0).abs() < 1e-12);
    }
    assert!((km_distance_tail(3, 2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
}
