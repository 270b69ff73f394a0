use super::{grid, set, ExperimentConfig, Grid, ResultRow};
use crate::bounds::{critical_exponent_curves, lambda2_curve};
use crate::error::Result;

pub(super) fn curve_defaults(c: &mut ExperimentConfig) {
    if c.p.is_none() {
        c.p = Some(Grid::Many((1..=99).map(|i| f64::from(i) / 100.0).collect()));
    }
    set(&mut c.epsilon, Grid::One(0.0));
    set(&mut c.tol, 1e-10);
}

/// Upper bounds on both critical rates of the geometric-offspring tree.
pub(super) fn curve(c: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let eps = grid(&c.epsilon).first().copied().unwrap_or(0.0);
    let mut rows = Vec::new();
    for r in lambda2_curve(&grid(&c.p), eps, c.tol.unwrap_or(1e-10))? {
        let mut l2 = ResultRow::new("lambda2_upper", r.lambda2_upper).param("p", r.p);
        if r.capped {
            l2 = l2.note("capped at 2");
        }
        rows.push(l2);
        rows.push(ResultRow::new("lambda1_upper", r.lambda1_upper).param("p", r.p));
    }
    Ok(rows)
}

pub(super) fn exponents_defaults(c: &mut ExperimentConfig) {
    if c.alpha.is_none() {
        c.alpha = Some(Grid::Many((41..=90).map(|i| f64::from(i) / 20.0).collect()));
    }
}

/// Mean-field and rigorous density exponents over the tail exponent.
pub(super) fn exponents(c: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for r in critical_exponent_curves(&grid(&c.alpha))? {
        let mf = match r.beta_meanfield {
            Some(b) => ResultRow::new("beta_meanfield", b),
            None => ResultRow::new("beta_meanfield", f64::NAN).note("undefined at alpha = 3"),
        };
        rows.push(mf.param("alpha", r.alpha));
        rows.push(ResultRow::new("beta_rigorous", r.beta_rigorous).param("alpha", r.alpha));
    }
    Ok(rows)
}
