//! The contact process on a star reduced to `(i, j)`: `i` infected leaves and
//! centre indicator `j`. Leaves are exchangeable so this chain has the same
//! law for `(infected leaves, centre)` as the full-graph process.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::{Atom, CompiledStop, NoObserver, Observer, SimOutcome, StopCondition, StopReason};
use crate::error::{Error, Result};
use crate::linalg::BandMatrix;

/// Largest star handled by [`exact_star_mean_extinction`].
pub const STAR_ORACLE_CAP: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StarState {
    /// Infected leaves.
    pub i: usize,
    /// 1 when the centre is infected.
    pub j: usize,
}

impl StarState {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }

    pub fn is_absorbing(&self) -> bool {
        self.i == 0 && self.j == 0
    }

    pub fn n_infected(&self) -> usize {
        self.i + self.j
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        if self.i > k || self.j > 1 {
            return Err(Error::invalid(format!(
                "star state ({}, {}) invalid for k={k}: need i <= k and j in {{0, 1}}",
                self.i, self.j
            )));
        }
        Ok(())
    }

    fn hit(&self, atom: Atom) -> bool {
        match atom {
            Atom::Extinction => self.is_absorbing(),
            Atom::Vertex(_) => self.j == 1,
            Atom::AtLeast(m) => self.n_infected() >= m,
            Atom::AtMost(m) => self.n_infected() <= m,
            Atom::LeavesAtLeast(m) => self.i >= m,
            Atom::LeavesAtMost(m) => self.i <= m,
        }
    }
}

fn check_star_args(k: usize, lambda: f64, init: StarState) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("star size k must be >= 1"));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("infection rate must be finite and >= 0, got {lambda}")));
    }
    init.validate(k)
}

pub fn simulate_star<R: Rng + ?Sized>(
    k: usize,
    lambda: f64,
    init: StarState,
    stop: &StopCondition,
    rng: &mut R,
) -> Result<SimOutcome> {
    simulate_star_observed(k, lambda, init, stop, rng, &mut NoObserver)
}

/// Runs the reduced chain. Vertex stop conditions may only name the centre
/// (vertex 0); observers see `Some(0)` for centre events and `None` for leaves.
pub fn simulate_star_observed<R: Rng + ?Sized, O: Observer + ?Sized>(
    k: usize,
    lambda: f64,
    init: StarState,
    stop: &StopCondition,
    rng: &mut R,
    observer: &mut O,
) -> Result<SimOutcome> {
    check_star_args(k, lambda, init)?;
    let stop = CompiledStop::compile(stop, k + 1, true)?;
    let mut s = init;
    let mut time = 0.0;
    let mut n_events = 0u64;
    observer.on_start(s.n_infected());

    let (reason, time, censored) = loop {
        if let Some(atom) = stop.tests.iter().copied().find(|&a| s.hit(a)) {
            break (atom.reason(), time, false);
        }
        if time >= stop.horizon {
            break (StopReason::TimeHorizon, stop.horizon, stop.censors());
        }
        if s.is_absorbing() {
            break (StopReason::Extinction, time, false);
        }
        let i = s.i as f64;
        let (up, centre) = if s.j == 1 { (lambda * (k - s.i) as f64, 1.0) } else { (0.0, lambda * i) };
        let total = up + centre + i;
        let dt: f64 = Exp1.sample(rng);
        let next = time + dt / total;
        if next > stop.horizon {
            time = stop.horizon;
            continue;
        }
        time = next;
        let u = rng.random::<f64>() * total;
        let vertex = if u < i {
            s.i -= 1;
            None
        } else if u < i + centre {
            s.j ^= 1;
            Some(0)
        } else {
            s.i += 1;
            None
        };
        n_events += 1;
        let now_infected = match vertex {
            Some(_) => s.j == 1,
            None => u >= i,
        };
        observer.on_event(time, vertex, now_infected, s.n_infected());
    };
    observer.on_stop(time, s.n_infected());
    Ok(SimOutcome { stop_reason: reason, stop_time: time, n_events, final_infected: s.n_infected(), censored })
}

/// Mean time to reach `(0, 0)` from every state, as `out[i][j]`.
pub fn exact_star_mean_extinction_all(k: usize, lambda: f64) -> Result<Vec<[f64; 2]>> {
    check_star_args(k, lambda, StarState::new(0, 0))?;
    if k > STAR_ORACLE_CAP {
        return Err(Error::DimensionCap { requested: k, cap: STAR_ORACLE_CAP });
    }
    let n = 2 * (k + 1);
    let mut a = BandMatrix::zeros(n, 2, 2);
    let mut rhs = vec![1.0; n];
    a.add(0, 0, 1.0);
    rhs[0] = 0.0;
    for i in 0..=k {
        let fi = i as f64;
        if i > 0 {
            // (i, 0): centre reinfection and leaf recovery.
            let r = 2 * i;
            a.add(r, r, lambda * fi + fi);
            a.add(r, r + 1, -lambda * fi);
            a.add(r, r - 2, -fi);
        }
        // (i, 1): leaf infection, leaf recovery, centre recovery.
        let r = 2 * i + 1;
        let up = lambda * (k - i) as f64;
        a.add(r, r, up + fi + 1.0);
        if i < k {
            a.add(r, r + 2, -up);
        }
        if i > 0 {
            a.add(r, r - 2, -fi);
        }
        a.add(r, r - 1, -1.0);
    }
    let x = a.solve(&rhs)?;
    Ok(x.chunks_exact(2).map(|c| [c[0], c[1]]).collect())
}

/// Exact `E[T_{(0,0)}]` from `init` on a star with `k <= STAR_ORACLE_CAP` leaves.
pub fn exact_star_mean_extinction(k: usize, lambda: f64, init: StarState) -> Result<f64> {
    check_star_args(k, lambda, init)?;
    Ok(exact_star_mean_extinction_all(k, lambda)?[init.i][init.j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replica_rng;
    use crate::stats::MeanVar;

    #[test]
    fn small_exact_values() {
        let e = |k, l, i, j| exact_star_mean_extinction(k, l, StarState::new(i, j)).unwrap();
        assert!((e(1, 0.0, 0, 1) - 1.0).abs() < 1e-12);
        assert!((e(1, 0.0, 1, 1) - 1.5).abs() < 1e-12);
        assert_eq!(e(4, 2.0, 0, 0), 0.0);
        // Rational value from an independent symbolic solve.
        assert!((e(3, 1.0, 3, 1) - 1661.0 / 420.0).abs() < 1e-12);
        assert!((e(5, 0.5, 5, 1) - 3.780_546_987_734_487_7).abs() < 1e-10);
    }

    #[test]
    fn larger_values_match_reference() {
        let e = |k, l| exact_star_mean_extinction(k, l, StarState::new(k / 3, 1)).unwrap();
        let rel = |x: f64, y: f64| (x - y).abs() / y;
        assert!(rel(e(20, 1.0), 207.598) < 1e-4);
        assert!(rel(e(60, 1.0), 1.2139e7) < 1e-3);
    }

    #[test]
    fn cap_and_validation() {
        assert!(matches!(
            exact_star_mean_extinction(201, 1.0, StarState::new(1, 1)),
            Err(Error::DimensionCap { .. })
        ));
        assert!(exact_star_mean_extinction(3, 1.0, StarState::new(4, 1)).is_err());
        assert!(exact_star_mean_extinction(3, 1.0, StarState::new(1, 2)).is_err());
        assert!(exact_star_mean_extinction(0, 1.0, StarState::new(0, 1)).is_err());
        let mut rng = replica_rng(0, 0);
        assert!(simulate_star(3, -1.0, StarState::new(1, 1), &StopCondition::Extinction, &mut rng).is_err());
        assert!(simulate_star(3, 1.0, StarState::new(1, 1), &StopCondition::VertexInfected(2), &mut rng).is_err());
    }

    #[test]
    fn absorbed_start_returns_at_zero() {
        let mut rng = replica_rng(0, 0);
        let out = simulate_star(5, 1.0, StarState::new(0, 0), &StopCondition::Extinction, &mut rng).unwrap();
        assert_eq!(out.stop_reason, StopReason::Extinction);
        assert_eq!(out.stop_time, 0.0);
    }

    #[test]
    fn monte_carlo_agrees_with_exact() {
        let exact = exact_star_mean_extinction(4, 0.8, StarState::new(2, 1)).unwrap();
        let mv: MeanVar = (0..20_000)
            .map(|r| {
                let mut rng = replica_rng(11, r);
                simulate_star(4, 0.8, StarState::new(2, 1), &StopCondition::Extinction, &mut rng)
                    .unwrap()
                    .stop_time
            })
            .collect();
        assert!((mv.mean() - exact).abs() < 4.0 * mv.std_error());
    }

    #[test]
    fn leaf_stop_conditions() {
        let mut rng = replica_rng(3, 0);
        let stop = StopCondition::FirstOf(vec![StopCondition::LeavesAtLeast(10), StopCondition::Extinction]);
        let out = simulate_star(10, 50.0, StarState::new(0, 1), &stop, &mut rng).unwrap();
        assert!(matches!(out.stop_reason, StopReason::LeavesAtLeast | StopReason::Extinction));
        if out.stop_reason == StopReason::LeavesAtLeast {
            assert!(out.final_infected >= 10);
        }
    }
}
