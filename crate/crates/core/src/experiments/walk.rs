use rand::Rng;

use super::{grid, replicate, set, ExperimentConfig, Grid, ResultRow};
use crate::error::{Error, Result};
use crate::linalg::BandMatrix;
use crate::rng::derive_seed;
use crate::stats::ProportionEstimate;

pub(super) fn defaults(c: &mut ExperimentConfig) {
    set(&mut c.m, Grid::Many(vec![10, 20]));
    set(&mut c.p_up, 0.75);
    set(&mut c.replicas, 10_000);
}

fn check(m: usize, p_up: f64, start: usize) -> Result<()> {
    let threshold = std::f64::consts::E / (std::f64::consts::E + 1.0);
    if !(p_up > threshold && p_up < 1.0) {
        return Err(Error::invalid(format!("up-probability must lie in (e/(e+1), 1) = ({threshold:.4}, 1), got {p_up}")));
    }
    if m == 0 || start > m {
        return Err(Error::invalid(format!("need 1 <= M and start <= M, got M={m}, start={start}")));
    }
    Ok(())
}

/// `P_start(hit 0 before M)` for the walk stepping up with probability
/// `p_up`, by a tridiagonal solve.
pub fn ruin_probability_exact(m: usize, p_up: f64, start: usize) -> Result<f64> {
    check(m, p_up, start)?;
    let mut a = BandMatrix::zeros(m + 1, 1, 1);
    let mut rhs = vec![0.0; m + 1];
    a.add(0, 0, 1.0);
    rhs[0] = 1.0;
    a.add(m, m, 1.0);
    for x in 1..m {
        a.add(x, x, 1.0);
        a.add(x, x + 1, -p_up);
        a.add(x, x - 1, -(1.0 - p_up));
    }
    Ok(a.solve(&rhs)?[start])
}

/// Gambler's-ruin closed form `(rho^x - rho^M) / (1 - rho^M)`, `rho = (1-p)/p`.
fn ruin_closed_form(m: usize, p_up: f64, start: usize) -> f64 {
    let rho: f64 = (1.0 - p_up) / p_up;
    (rho.powi(start as i32) - rho.powi(m as i32)) / (1.0 - rho.powi(m as i32))
}

pub(super) fn star_walk(c: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let p_up = c.p_up.unwrap_or(0.75);
    let reps = c.replicas.unwrap_or(1);
    let mut rows = Vec::new();
    for (cell, &m) in grid(&c.m).iter().enumerate() {
        let start = (0.9 * m as f64).ceil() as usize;
        let exact = ruin_probability_exact(m, p_up, start)?;
        let bound = (-0.9 * m as f64).exp();
        rows.push(
            ResultRow::new("hit0_exact", exact)
                .param("M", m)
                .param("p_up", p_up)
                .param("start", start)
                .upper(bound, false)
                .reference(ruin_closed_form(m, p_up, start)),
        );
        let hits = replicate(derive_seed(c.seed(), cell as u64), reps, |rng| {
            let mut x = start;
            while x != 0 && x != m {
                if rng.random::<f64>() < p_up {
                    x += 1;
                } else {
                    x -= 1;
                }
            }
            Ok(x == 0)
        })?;
        let est = ProportionEstimate::new(hits.iter().filter(|&&h| h).count() as u64, reps);
        rows.push(
            ResultRow::proportion("hit0_mc", &est)
                .param("M", m)
                .param("p_up", p_up)
                .param("start", start)
                .upper(bound, false)
                .reference(exact),
        );
    }
    Ok(rows)
}
