use contact_core::experiments::{
    load_config, run_experiment, wang_comparison, ExperimentConfig, ExperimentId, Grid, LambdaCSearch,
};
use contact_core::graph::generate_star;
use proptest::prelude::*;

fn small(id: ExperimentId, seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(id);
    c.seed = Some(seed);
    c
}

#[test]
fn every_experiment_id_parses_back() {
    for id in ExperimentId::ALL {
        assert_eq!(id.as_str().parse::<ExperimentId>().unwrap(), id);
    }
    assert!("lamda-c".parse::<ExperimentId>().is_err());
}

#[test]
fn csv_carries_config_header_and_fixed_columns() {
    let mut c = small(ExperimentId::Transfer, 3);
    c.replicas = Some(500);
    let out = run_experiment(c).unwrap();
    let csv = out.to_csv();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# config: {"));
    let json: serde_json::Value = serde_json::from_str(header.trim_start_matches("# config: ")).unwrap();
    assert_eq!(json["seed"], 3);
    assert_eq!(json["experiment"], "transfer");
    let columns = lines.next().unwrap();
    for col in ["quantity", "estimate", "ci_halfwidth", "bound", "vacuous", "censored_fraction"] {
        assert!(columns.split(',').any(|c| c == col), "missing {col}");
    }
    assert_eq!(lines.count(), out.rows.len());
}

#[test]
fn resolved_config_reproduces_the_run() {
    let mut c = small(ExperimentId::StarWalk, 9);
    c.replicas = Some(2000);
    let first = run_experiment(c).unwrap();
    let replay = ExperimentConfig::from_json(&first.config.to_canonical_json()).unwrap();
    let second = run_experiment(replay).unwrap();
    assert_eq!(first.to_json(), second.to_json());
}

#[test]
fn missing_seed_is_drawn_and_recorded() {
    let mut c = ExperimentConfig::new(ExperimentId::Curve);
    c.p = Some(Grid::One(0.5));
    let out = run_experiment(c).unwrap();
    assert!(out.config.seed.is_some());
}

#[test]
fn config_file_keys_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"experiment": "transfer", "seed": 4, "replicas": 100, "r": [1, 2]}"#).unwrap();
    let c = load_config(Some(&path), &[("replicas".into(), "200".into()), ("time-horizon".into(), "7".into())]).unwrap();
    assert_eq!(c.replicas, Some(200));
    assert_eq!(c.seed, Some(4));
    assert_eq!(c.time_horizon, Some(7.0));

    std::fs::write(&path, r#"{"experiment": "transfer", "lamda": 1}"#).unwrap();
    let err = load_config(Some(&path), &[]).unwrap_err();
    assert!(err.to_string().contains("lamda"), "{err}");
    assert!(err.is_usage());
}

#[test]
fn star_walk_matches_its_exact_solution() {
    let mut c = small(ExperimentId::StarWalk, 12);
    c.replicas = Some(20_000);
    let out = run_experiment(c).unwrap();
    for mc in out.rows_for("hit0_mc") {
        let exact = out
            .rows_for("hit0_exact")
            .find(|r| r.params == mc.params)
            .unwrap();
        let tol = 4.0 * mc.std_error.unwrap().max(1.0 / 20_000.0);
        assert!((mc.estimate - exact.estimate).abs() <= tol, "{} vs {}", mc.estimate, exact.estimate);
    }
    assert!(out.violations().is_empty());
}

#[test]
fn exponents_flag_the_mean_field_singularity() {
    let out = run_experiment(small(ExperimentId::Exponents, 1)).unwrap();
    let at3 = out
        .rows_for("beta_meanfield")
        .find(|r| r.param_f64("alpha") == Some(3.0))
        .unwrap();
    assert!(at3.estimate.is_nan());
    assert!(at3.note.is_some());
    assert_eq!(out.rows_for("beta_rigorous").count(), 50);
}

#[test]
fn star_threshold_sits_above_the_spectral_guess() {
    let g = generate_star(400).unwrap();
    let search = LambdaCSearch { horizon: 401.0, replicas: 3, steps: 8, lo: 1e-3, hi: 4.0 };
    let est = wang_comparison(&g, &search, 2).unwrap();
    assert!(est.bracketed);
    assert!(est.lambda_c > 2.0 * est.inv_spectral_radius, "{est:?}");
}

#[test]
fn supercritical_tree_keeps_the_root_occupied() {
    let mut c = small(ExperimentId::GwLocal, 21);
    c.lambda = Some(Grid::One(3.0));
    c.replicas = Some(30);
    let out = run_experiment(c).unwrap();
    let freq = out.rows_for("root_occupied_freq").next().unwrap().estimate;
    assert!(freq >= 0.05, "root occupancy {freq}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn canonical_config_round_trips(
        seed in any::<u64>(),
        replicas in 1u64..100_000,
        lambda in proptest::collection::vec(0.01f64..10.0, 1..4),
        k in proptest::collection::vec(1usize..10_000, 1..4),
    ) {
        let mut c = ExperimentConfig::new(ExperimentId::StarPersistence);
        c.seed = Some(seed);
        c.replicas = Some(replicas);
        c.lambda = Some(Grid::Many(lambda));
        c.k = Some(Grid::Many(k));
        let resolved = c.resolve().unwrap();
        let again = ExperimentConfig::from_json(&resolved.to_canonical_json()).unwrap();
        prop_assert_eq!(&again, &resolved);
        prop_assert_eq!(again.resolve().unwrap(), resolved);
    }
}
