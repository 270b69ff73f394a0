use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::fenwick::Fenwick;
use super::{Atom, CompiledStop, NoObserver, Observer, SimOutcome, StopCondition, StopReason};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Events between from-scratch recounts of the infection pressure.
pub const AUDIT_INTERVAL: u64 = 1 << 16;

/// Mutable contact-process state on a fixed graph.
///
/// `pressure[v]` counts infected neighbour slots of `v` (multi-edges counted
/// with multiplicity, loops excluded). The Fenwick tree holds
/// `pressure[v]` for susceptible `v` and 0 for infected `v`, so its total is
/// the number of infected-to-susceptible slots and the infection rate is
/// `lambda` times that total.
pub struct CpState<'g> {
    graph: &'g Graph,
    infected: Vec<bool>,
    infected_list: Vec<u32>,
    position: Vec<u32>,
    pressure: Vec<u32>,
    susceptible_slots: Fenwick,
    pub time: f64,
}

impl<'g> CpState<'g> {
    pub fn new(graph: &'g Graph, init: &[usize]) -> Result<Self> {
        let n = graph.n_vertices();
        let mut infected = vec![false; n];
        let mut infected_list = Vec::with_capacity(init.len());
        let mut position = vec![u32::MAX; n];
        for &v in init {
            if v >= n {
                return Err(Error::invalid(format!("initial vertex {v} out of range ({n} vertices)")));
            }
            if !infected[v] {
                infected[v] = true;
                position[v] = infected_list.len() as u32;
                infected_list.push(v as u32);
            }
        }
        let mut pressure = vec![0u32; n];
        for &u in &infected_list {
            for &w in graph.proper_neighbors(u as usize) {
                pressure[w as usize] += 1;
            }
        }
        let weights: Vec<u64> =
            (0..n).map(|v| if infected[v] { 0 } else { u64::from(pressure[v]) }).collect();
        Ok(Self {
            graph,
            infected,
            infected_list,
            position,
            pressure,
            susceptible_slots: Fenwick::from_weights(&weights),
            time: 0.0,
        })
    }

    #[inline]
    pub fn n_infected(&self) -> usize {
        self.infected_list.len()
    }

    #[inline]
    pub fn is_infected(&self, v: usize) -> bool {
        self.infected[v]
    }

    /// Number of infected-to-susceptible neighbour slots.
    #[inline]
    pub fn infection_slots(&self) -> u64 {
        self.susceptible_slots.total()
    }

    pub fn total_recovery_rate(&self) -> f64 {
        self.n_infected() as f64
    }

    pub fn total_infection_rate(&self, lambda: f64) -> f64 {
        lambda * self.infection_slots() as f64
    }

    /// Recounts infected-to-susceptible slots from the infected set alone.
    pub fn recount_slots(&self) -> u64 {
        self.infected_list
            .iter()
            .map(|&u| {
                self.graph
                    .proper_neighbors(u as usize)
                    .iter()
                    .filter(|&&w| !self.infected[w as usize])
                    .count() as u64
            })
            .sum()
    }

    pub fn infect(&mut self, v: usize) {
        debug_assert!(!self.infected[v]);
        self.infected[v] = true;
        self.position[v] = self.infected_list.len() as u32;
        self.infected_list.push(v as u32);
        self.susceptible_slots.sub(v, u64::from(self.pressure[v]));
        for &w in self.graph.proper_neighbors(v) {
            let w = w as usize;
            self.pressure[w] += 1;
            if !self.infected[w] {
                self.susceptible_slots.add(w, 1);
            }
        }
    }

    pub fn recover(&mut self, v: usize) {
        debug_assert!(self.infected[v]);
        self.infected[v] = false;
        let pos = self.position[v] as usize;
        let last = self.infected_list.pop().expect("non-empty");
        if last as usize != v {
            self.infected_list[pos] = last;
            self.position[last as usize] = pos as u32;
        }
        self.position[v] = u32::MAX;
        for &w in self.graph.proper_neighbors(v) {
            let w = w as usize;
            self.pressure[w] -= 1;
            if !self.infected[w] {
                self.susceptible_slots.sub(w, 1);
            }
        }
        self.susceptible_slots.add(v, u64::from(self.pressure[v]));
    }

    /// Performs one event of the jump chain: returns `(vertex, now_infected)`.
    /// The caller has already advanced time and checked the total rate is > 0.
    #[inline]
    fn jump<R: Rng + ?Sized>(&mut self, lambda: f64, rng: &mut R) -> (usize, bool) {
        let rec = self.total_recovery_rate();
        let total = rec + self.total_infection_rate(lambda);
        if rng.random::<f64>() * total < rec {
            let idx = rng.random_range(0..self.infected_list.len());
            let v = self.infected_list[idx] as usize;
            self.recover(v);
            (v, false)
        } else {
            let r = rng.random_range(0..self.infection_slots());
            let v = self.susceptible_slots.find(r);
            self.infect(v);
            (v, true)
        }
    }

    fn check(&self, tests: &[Atom]) -> Option<StopReason> {
        let n = self.n_infected();
        tests.iter().copied().find_map(|atom| {
            let hit = match atom {
                Atom::Extinction => n == 0,
                Atom::Vertex(v) => self.infected[v],
                Atom::AtLeast(m) => n >= m,
                Atom::AtMost(m) => n <= m,
                Atom::LeavesAtLeast(_) | Atom::LeavesAtMost(_) => false,
            };
            hit.then(|| atom.reason())
        })
    }
}

/// Simulates the contact process on `g` from the infected set `init` until
/// `stop` fires. Once no vertex is infected the process is absorbed and the
/// run ends with [`StopReason::Extinction`] whatever the stop condition.
pub fn simulate<R: Rng + ?Sized>(
    g: &Graph,
    lambda: f64,
    init: &[usize],
    stop: &StopCondition,
    rng: &mut R,
) -> Result<SimOutcome> {
    simulate_observed(g, lambda, init, stop, rng, &mut NoObserver)
}

pub fn simulate_observed<R: Rng + ?Sized, O: Observer + ?Sized>(
    g: &Graph,
    lambda: f64,
    init: &[usize],
    stop: &StopCondition,
    rng: &mut R,
    observer: &mut O,
) -> Result<SimOutcome> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("infection rate must be finite and >= 0, got {lambda}")));
    }
    let stop = CompiledStop::compile(stop, g.n_vertices(), false)?;
    let mut state = CpState::new(g, init)?;
    observer.on_start(state.n_infected());
    let mut n_events = 0u64;

    let finish = |state: &CpState, reason: StopReason, time: f64, n_events: u64, censored: bool, obs: &mut O| {
        obs.on_stop(time, state.n_infected());
        SimOutcome { stop_reason: reason, stop_time: time, n_events, final_infected: state.n_infected(), censored }
    };

    loop {
        if let Some(reason) = state.check(&stop.tests) {
            return Ok(finish(&state, reason, state.time, n_events, false, observer));
        }
        if state.time >= stop.horizon {
            return Ok(finish(&state, StopReason::TimeHorizon, stop.horizon, n_events, stop.censors(), observer));
        }
        if state.n_infected() == 0 {
            return Ok(finish(&state, StopReason::Extinction, state.time, n_events, false, observer));
        }
        let total = state.total_recovery_rate() + state.total_infection_rate(lambda);
        let dt: f64 = Exp1.sample(rng);
        let next = state.time + dt / total;
        if next > stop.horizon {
            state.time = stop.horizon;
            continue;
        }
        state.time = next;
        let (v, now_infected) = state.jump(lambda, rng);
        n_events += 1;
        observer.on_event(state.time, Some(v), now_infected, state.n_infected());
        if n_events.is_multiple_of(AUDIT_INTERVAL) {
            let recomputed = state.recount_slots();
            if recomputed != state.infection_slots() {
                return Err(Error::RateDrift { incremental: state.infection_slots(), recomputed });
            }
        }
    }
}

/// Runs until `target` is infected or `horizon` passes (`f64::INFINITY`
/// allowed). A run that dies out first ends with `Extinction`.
pub fn first_infection_time_of<R: Rng + ?Sized>(
    g: &Graph,
    lambda: f64,
    init: &[usize],
    target: usize,
    horizon: f64,
    rng: &mut R,
) -> Result<SimOutcome> {
    if init.contains(&target) {
        return Err(Error::invalid(format!("target vertex {target} is already infected")));
    }
    let stop = StopCondition::FirstOf(vec![
        StopCondition::VertexInfected(target),
        StopCondition::TimeHorizon(horizon),
    ]);
    simulate(g, lambda, init, &stop, rng)
}
