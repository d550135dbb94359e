use num_rational::BigRational;
use proptest::prelude::*;
use rstre_core::component_sampling::{
    no_repeat_prob_exact, no_repeat_prob_rational, rational_to_f64, s_from_sizes, size_biased_stream_on,
};
use rstre_core::disorder::ContractedGraph;
use rstre_core::seeds::rng_from_seed;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn sizes_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..40, 1..20)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tail_is_a_survival_function(sizes in sizes_strategy()) {
        let m = sizes.len() as i64;
        let mut prev = 1.0;
        for k in 0..=m + 1 {
            let p = no_repeat_prob_exact(&sizes, k).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!(p <= prev + 1e-15);
            prev = p;
        }
        prop_assert_eq!(no_repeat_prob_exact(&sizes, 1).unwrap(), 1.0);
        prop_assert_eq!(no_repeat_prob_exact(&sizes, m + 1).unwrap(), 0.0);
    }

    #[test]
    fn float_matches_rational(sizes in sizes_strategy(), k in 0i64..22) {
        let f = no_repeat_prob_exact(&sizes, k).unwrap();
        let r = rational_to_f64(&no_repeat_prob_rational(&sizes, k).unwrap());
        prop_assert!((f - r).abs() <= 1e-12, "{} vs {}", f, r);
    }

    #[test]
    fn order_of_sizes_is_irrelevant(mut sizes in sizes_strategy(), k in 0i64..10) {
        let a = no_repeat_prob_rational(&sizes, k).unwrap();
        sizes.reverse();
        prop_assert_eq!(a, no_repeat_prob_rational(&sizes, k).unwrap());
    }

    #[test]
    fn s_statistic_bounds(sizes in sizes_strategy()) {
        let s = s_from_sizes(&sizes);
        let n: usize = sizes.iter().sum();
        prop_assert!(s <= 1.0 + 1e-12);
        prop_assert!(s >= 1.0 / (n as f64).sqrt() - 1e-12);
    }
}

#[test]
fn equal_sizes_give_falling_factorial() {
    // m equal components: P(t_1 > k) = m (m-1) ... (m-k+1) / m^k
    let m = 12usize;
    for k in 0..=m as i64 {
        let mut expect = BigRational::from_integer(1.into());
        for i in 0..k {
            expect *= BigRational::new(((m as i64) - i).into(), (m as i64).into());
        }
        assert_eq!(no_repeat_prob_rational(&vec![4; m], k).unwrap(), expect);
    }
}

/// Components picked through a uniform vertex follow the size-biased law.
#[test]
fn uniform_vertex_draws_are_size_biased() {
    let sizes = [7usize, 4, 4, 2, 1, 1, 1];
    let g = ContractedGraph::from_sizes(&sizes).unwrap();
    let n = g.n() as f64;
    let draws = 100_000;
    let mut rng = rng_from_seed(0xc41);
    let mut comp = vec![0u64; sizes.len()];
    let mut vert = vec![0u64; g.n()];
    for _ in 0..draws {
        let (c, v) = g.step(&mut rng);
        assert_eq!(g.component_of(v as usize), c);
        comp[c] += 1;
        vert[v as usize] += 1;
    }
    let stat: f64 = comp
        .iter()
        .zip(&sizes)
        .map(|(&o, &s)| {
            let e = draws as f64 * s as f64 / n;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let crit = ChiSquared::new((sizes.len() - 1) as f64).unwrap().inverse_cdf(0.99);
    assert!(stat < crit, "component chi-square {stat} >= {crit}");
    let e = draws as f64 / n;
    let stat: f64 = vert.iter().map(|&o| (o as f64 - e).powi(2) / e).sum();
    let crit = ChiSquared::new(n - 1.0).unwrap().inverse_cdf(0.99);
    assert!(stat < crit, "vertex chi-square {stat} >= {crit}");
}

#[test]
fn streams_stop_at_the_first_repeat() {
    let g = ContractedGraph::from_sizes(&[3, 2, 1]).unwrap();
    let mut rng = rng_from_seed(5);
    for _ in 0..1000 {
        let t = size_biased_stream_on(&g, 4, &mut rng).unwrap();
        let t1 = t.t_1.expect("a repeat within m + 1 draws");
        assert!((2..=4).contains(&t1));
        assert_eq!(t.component_ids.len(), t1);
        let last = t.component_ids[t1 - 1];
        assert_eq!(t.component_ids[..t1 - 1].iter().filter(|&&c| c == last).count(), 1);
    }
}
