use contact_core::bounds::{exit_bound, gamma_factor, lambda2_upper, life_bound, transfer_bound};
use contact_core::chain::{exact_drift, hitting_prob_exact, make_params, ChainMode};
use contact_core::graph::{
    generate_config_model, generate_star, generate_star_chain, max_eigenvalue, read_edge_list,
    sample_gw_tree, write_edge_list, DegreeDistribution, OffspringDistribution,
};
use contact_core::rng::replica_rng;
use contact_core::sim::{simulate, simulate_star, StarState, StopCondition};
use proptest::prelude::*;

fn degree_law() -> impl Strategy<Value = DegreeDistribution> {
    prop_oneof![
        (0.2f64..0.9).prop_map(DegreeDistribution::Geometric),
        (2.1f64..4.0).prop_map(DegreeDistribution::PowerLawTail),
        (1.0f64..3.0).prop_map(DegreeDistribution::StretchedExpTail),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn config_model_has_even_degree_sum_and_valid_adjacency(
        n in 2usize..400, law in degree_law(), seed in any::<u64>()
    ) {
        let g = generate_config_model(n, law, &mut replica_rng(seed, 0)).unwrap();
        prop_assert_eq!(g.n_vertices(), n);
        prop_assert_eq!(g.degrees().iter().sum::<usize>() % 2, 0);
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.n_edges());
        g.check_invariants().unwrap();
        prop_assert!(g.degrees().iter().all(|&d| d >= law.min_support()));
    }

    #[test]
    fn edge_list_round_trips(n in 2usize..200, seed in any::<u64>()) {
        let g = generate_config_model(n, DegreeDistribution::Geometric(0.4), &mut replica_rng(seed, 1)).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = read_edge_list(buf.as_slice()).unwrap();
        prop_assert_eq!(back.degrees(), g.degrees());
        prop_assert_eq!(back.n_edges(), g.n_edges());
    }

    #[test]
    fn star_chain_shape(k in 1usize..40, r in 1usize..8) {
        let g = generate_star_chain(k, r).unwrap();
        g.check_invariants().unwrap();
        let (_, count) = g.components();
        prop_assert_eq!(count, 1);
        prop_assert_eq!(g.n_edges(), g.n_vertices() - 1);
    }

    #[test]
    fn spectral_radius_sits_between_root_and_max_degree(n in 10usize..300, law in degree_law(), seed in any::<u64>()) {
        let g = generate_config_model(n, law, &mut replica_rng(seed, 2)).unwrap();
        let lam = max_eigenvalue(&g, 1e-10, 1_000_000).unwrap();
        let dmax = g.max_degree() as f64;
        prop_assert!(dmax.sqrt() <= lam + 1e-6, "{} < sqrt {}", lam, dmax);
        prop_assert!(lam <= dmax + 1e-6);
    }

    #[test]
    fn gw_tree_is_a_tree_within_budget(p in 0.2f64..0.8, budget in 1usize..2000, seed in any::<u64>()) {
        let t = sample_gw_tree(OffspringDistribution::ShiftedGeometric(p), budget, &mut replica_rng(seed, 3)).unwrap();
        prop_assert!(t.n_vertices() <= budget);
        prop_assert_eq!(t.graph.n_edges() + 1, t.n_vertices());
        let (_, count) = t.graph.components();
        prop_assert_eq!(count, 1);
    }

    #[test]
    fn simulation_is_a_pure_function_of_the_stream(k in 1usize..30, lambda in 0.1f64..3.0, seed in any::<u64>(), r in 0u64..100) {
        let g = generate_star(k).unwrap();
        let stop = StopCondition::FirstOf(vec![StopCondition::Extinction, StopCondition::TimeHorizon(50.0)]);
        let a = simulate(&g, lambda, &[0], &stop, &mut replica_rng(seed, r)).unwrap();
        let b = simulate(&g, lambda, &[0], &stop, &mut replica_rng(seed, r)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.stop_time >= 0.0 && a.stop_time <= 50.0);
        let c = simulate_star(k, lambda, StarState::new(0, 1), &stop, &mut replica_rng(seed, r)).unwrap();
        let d = simulate_star(k, lambda, StarState::new(0, 1), &stop, &mut replica_rng(seed, r)).unwrap();
        prop_assert_eq!(c, d);
    }

    #[test]
    fn hitting_probability_is_a_monotone_probability(lambda in 0.3f64..3.0, k in 20usize..120) {
        let p = make_params(lambda, k, ChainMode::FixedP).unwrap();
        prop_assume!(p.floor_l >= 3);
        let b = 1;
        let mut last = 1.0;
        for a in (b + 1)..p.floor_l {
            let h = hitting_prob_exact(&p, a, b, p.floor_l).unwrap();
            prop_assert!((0.0..=1.0).contains(&h));
            prop_assert!(h <= last + 1e-12, "not decreasing in a at a={}", a);
            prop_assert!(h <= exit_bound(a as f64, b as f64, lambda).unwrap() * (1.0 + 1e-12));
            last = h;
        }
    }

    #[test]
    fn drift_is_non_positive_at_the_tilt(lambda in 0.25f64..3.0) {
        let p = make_params(lambda, 2000, ChainMode::FixedP).unwrap();
        for y in 1..p.floor_l {
            prop_assert!(exact_drift(p.theta_star, y, &p).unwrap() <= 0.0);
        }
    }

    #[test]
    fn bounds_are_probabilities_or_flagged(lambda in 0.01f64..5.0, r in 1usize..20, k in 1usize..5000) {
        let t = transfer_bound(r, lambda, 0.0).unwrap();
        prop_assert!((0.0..=1.0).contains(&t));
        let life = life_bound(k, lambda, 0.1).unwrap();
        prop_assert!(life.fail_prob >= 0.0);
        prop_assert!(life.horizon >= 0.0);
        prop_assert!(gamma_factor(lambda, 1.0, 0.0).unwrap() > 0.0);
    }

    #[test]
    fn lambda2_upper_never_exceeds_the_cap(p in 0.01f64..0.99) {
        let l2 = lambda2_upper(p, 0.0, 1e-10).unwrap();
        prop_assert!(l2.value <= 2.0);
        prop_assert!(l2.value > 0.0);
        prop_assert_eq!(l2.capped, l2.uncapped > 2.0);
    }
}
