use super::{grid, replicate, set, ExperimentConfig, Grid, ResultRow};
use crate::bounds::{transfer_bound, BoundKind};
use crate::error::{Error, Result};
use crate::graph::{generate_star_chain, path_graph, Graph};
use crate::rng::derive_seed;
use crate::sim::{simulate, StopCondition, StopReason};
use crate::stats::ProportionEstimate;

pub(super) fn defaults(c: &mut ExperimentConfig) {
    set(&mut c.graph, "path".to_string());
    set(&mut c.r, Grid::Many(vec![1, 3, 5]));
    set(&mut c.lambda, Grid::One(1.0));
    set(&mut c.replicas, 10_000);
    set(&mut c.horizon, 10_000.0);
    if c.graph.as_deref() == Some("star_chain") {
        set(&mut c.k, Grid::One(50));
    }
}

/// Relay along a path `v_0 .. v_r` from `v_0` alone infected: chance that
/// `v_r` is ever infected and that it is infected by time `2r`.
pub(super) fn transfer(c: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let kind = c.graph.as_deref().unwrap_or("path");
    let ks: Vec<usize> = match kind {
        "path" => vec![0],
        "star_chain" => grid(&c.k),
        other => return Err(Error::Config(format!("key `graph`: transfer needs path or star_chain, got {other:?}"))),
    };
    let reps = c.replicas.unwrap_or(1);
    let horizon = c.horizon.unwrap_or(f64::INFINITY);
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for &lambda in &grid(&c.lambda) {
        for &r in &grid(&c.r) {
            for &k in &ks {
                let cell_seed = derive_seed(c.seed(), cell);
                cell += 1;
                let (g, target): (Graph, usize) =
                    if kind == "path" { (path_graph(r)?, r) } else { (generate_star_chain(k, r)?, k + r) };
                let stop = StopCondition::FirstOf(vec![
                    StopCondition::VertexInfected(target),
                    StopCondition::Extinction,
                    StopCondition::TimeHorizon(horizon),
                ]);
                let outcomes = replicate(cell_seed, reps, |rng| simulate(&g, lambda, &[0], &stop, rng))?;
                let hit: Vec<f64> = outcomes
                    .iter()
                    .filter(|o| o.stop_reason == StopReason::VertexInfected)
                    .map(|o| o.stop_time)
                    .collect();
                let censored = outcomes.iter().filter(|o| o.censored).count() as f64 / reps as f64;
                let by = 2.0 * r as f64;
                let cols = |row: ResultRow| {
                    let row = row.param("graph", kind).param("lambda", lambda).param("r", r).censored(censored);
                    if kind == "star_chain" {
                        row.param("k", k)
                    } else {
                        row
                    }
                };
                let lower = transfer_bound(r, lambda, 0.0)?;
                let mut ever = cols(ResultRow::proportion("ever_infected", &ProportionEstimate::new(hit.len() as u64, reps)))
                    .lower(lower, BoundKind::ProbabilityLower.is_vacuous(lower));
                let within = hit.iter().filter(|&&t| t <= by).count() as u64;
                let mut timely = cols(ResultRow::proportion("infected_by_2r", &ProportionEstimate::new(within, reps)));
                if kind == "path" && r == 1 {
                    let race = lambda / (1.0 + lambda);
                    ever = ever.reference(race);
                    timely = timely.reference(race * -(-2.0 * (1.0 + lambda)).exp_m1());
                }
                rows.push(ever);
                rows.push(timely);
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::super::{run_experiment, ExperimentId};
    use super::*;

    #[test]
    fn zero_rate_never_transfers() {
        let mut c = ExperimentConfig::new(ExperimentId::Transfer);
        c.seed = Some(4);
        c.lambda = Some(Grid::One(0.0));
        c.replicas = Some(50);
        let out = run_experiment(c).unwrap();
        assert!(out.rows.iter().all(|r| r.estimate == 0.0));
    }

    #[test]
    fn star_chain_target_is_the_far_end() {
        let mut c = ExperimentConfig::new(ExperimentId::Transfer);
        c.seed = Some(5);
        c.graph = Some("star_chain".into());
        c.r = Some(Grid::One(2));
        c.replicas = Some(2000);
        let out = run_experiment(c).unwrap();
        assert_eq!(out.config.k, Some(Grid::One(50)));
        let ever = out.rows_for("ever_infected").next().unwrap();
        assert_eq!(ever.dominated(), Some(true));
    }
}
