/// Hooks into a running simulation. All methods default to no-ops.
pub trait Observer {
    fn on_start(&mut self, _n_infected: usize) {}
    /// Called after each event at `time`. `vertex` is the vertex whose state
    /// changed (`None` for leaves of the reduced star chain).
    fn on_event(&mut self, _time: f64, _vertex: Option<usize>, _now_infected: bool, _n_infected: usize) {}
    fn on_stop(&mut self, _time: f64, _n_infected: usize) {}
}

#[derive(Debug, Default, Clone, Copy)]
pub struct NoObserver;
impl Observer for NoObserver {}

/// Records the infected count on a regular time grid `0, dt, 2 dt, ...`
/// up to the stop time.
#[derive(Debug, Clone)]
pub struct TrajectorySampler {
    interval: f64,
    next: f64,
    current: usize,
    pub samples: Vec<(f64, usize)>,
}

impl TrajectorySampler {
    pub fn new(interval: f64) -> Self {
        assert!(interval > 0.0, "sampling interval must be positive");
        Self { interval, next: 0.0, current: 0, samples: Vec::new() }
    }

    fn flush_before(&mut self, time: f64, inclusive: bool) {
        while self.next < time || (inclusive && self.next == time) {
            self.samples.push((self.next, self.current));
            self.next = self.samples.len() as f64 * self.interval;
        }
    }

    /// `time,infected_count` CSV.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("time,infected_count\n");
        for (t, c) in &self.samples {
            s.push_str(&format!("{t},{c}\n"));
        }
        s
    }
}

impl Observer for TrajectorySampler {
    fn on_start(&mut self, n_infected: usize) {
        self.current = n_infected;
    }
    fn on_event(&mut self, time: f64, _: Option<usize>, _: bool, n_infected: usize) {
        self.flush_before(time, false);
        self.current = n_infected;
    }
    fn on_stop(&mut self, time: f64, n_infected: usize) {
        self.current = n_infected;
        self.flush_before(time, true);
    }
}

/// Tracks one vertex: its state at fixed probe times and whether any vertex
/// of a marked set was ever infected.
#[derive(Debug, Clone)]
pub struct VertexWatch<'a> {
    vertex: usize,
    state: bool,
    probes: Vec<f64>,
    next_probe: usize,
    /// State of `vertex` at each probe time reached before the stop.
    pub occupied_at_probe: Vec<Option<bool>>,
    marked: Option<&'a [bool]>,
    pub marked_hit: bool,
}

impl<'a> VertexWatch<'a> {
    pub fn new(vertex: usize, initially_infected: bool, mut probes: Vec<f64>, marked: Option<&'a [bool]>) -> Self {
        probes.sort_by(f64::total_cmp);
        let n = probes.len();
        Self {
            vertex,
            state: initially_infected,
            probes,
            next_probe: 0,
            occupied_at_probe: vec![None; n],
            marked,
            marked_hit: false,
        }
    }

    fn advance(&mut self, time: f64, inclusive: bool) {
        while self.next_probe < self.probes.len() {
            let p = self.probes[self.next_probe];
            if p < time || (inclusive && p <= time) {
                self.occupied_at_probe[self.next_probe] = Some(self.state);
                self.next_probe += 1;
            } else {
                break;
            }
        }
    }
}

impl Observer for VertexWatch<'_> {
    fn on_event(&mut self, time: f64, vertex: Option<usize>, now_infected: bool, _: usize) {
        self.advance(time, false);
        if let Some(v) = vertex {
            if v == self.vertex {
                self.state = now_infected;
            }
            if now_infected && self.marked.is_some_and(|m| m[v]) {
                self.marked_hit = true;
            }
        }
    }
    fn on_stop(&mut self, time: f64, n_infected: usize) {
        // After extinction nothing changes, so later probes are known too.
        let until = if n_infected == 0 { f64::INFINITY } else { time };
        self.advance(until, true);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampler_grid() {
        let mut s = TrajectorySampler::new(1.0);
        s.on_start(3);
        s.on_event(0.5, Some(0), false, 2);
        s.on_event(2.5, Some(1), false, 1);
        s.on_stop(3.0, 1);
        assert_eq!(s.samples, vec![(0.0, 3), (1.0, 2), (2.0, 2), (3.0, 1)]);
        assert!(s.to_csv().starts_with("time,infected_count\n0,3\n"));
    }

    #[test]
    fn watch_probes() {
        let marked = [false, false, true];
        let mut w = VertexWatch::new(0, true, vec![1.0, 5.0], Some(&marked));
        w.on_event(0.5, Some(2), true, 2);
        w.on_event(2.0, Some(0), false, 1);
        w.on_stop(3.0, 1);
        assert_eq!(w.occupied_at_probe, vec![Some(true), None]);
        assert!(w.marked_hit);
    }
}
