//! Multigraphs, graph families and adjacency spectra.

mod degree;
mod generators;
mod gw;
mod io;
mod spectral;

pub use degree::{hurwitz_zeta, DegreeDistribution, OffspringDistribution};
pub use generators::{
    complete_graph, cycle_graph, generate_config_model, generate_star, generate_star_chain,
    path_graph,
};
pub use gw::{sample_gw_tree, sample_gw_tree_to_depth, GwTree};
pub use io::{read_edge_list, write_edge_list};
pub use spectral::{max_eigenvalue, max_eigenvalue_default, DEFAULT_MAX_ITERS, DEFAULT_TOL};

use crate::error::{Error, Result};

/// Immutable undirected multigraph in compressed adjacency form.
///
/// Parallel edges appear once per copy in each endpoint's list. A self-loop
/// at `v` appears once in `v`'s list and adds 2 to its degree; loop entries
/// are stored after the proper neighbours so the simulator can skip them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    /// Number of non-loop entries of each vertex (prefix of its list).
    proper: Vec<u32>,
    degrees: Vec<usize>,
    n_edges: usize,
}

impl Graph {
    /// Builds a graph on `n` vertices from an edge list. `(v, v)` is a self-loop.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::invalid(format!("{n} vertices exceeds u32 indexing")));
        }
        let mut proper_count = vec![0usize; n];
        let mut loop_count = vec![0usize; n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u}, {v}) out of range for {n} vertices")));
            }
            if u == v {
                loop_count[u] += 1;
            } else {
                proper_count[u] += 1;
                proper_count[v] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for v in 0..n {
            offsets.push(offsets[v] + proper_count[v] + loop_count[v]);
        }
        let mut targets = vec![0u32; offsets[n]];
        let mut fill: Vec<usize> = offsets[..n].to_vec();
        for &(u, v) in edges {
            if u != v {
                targets[fill[u]] = v as u32;
                fill[u] += 1;
                targets[fill[v]] = u as u32;
                fill[v] += 1;
            }
        }
        for &(u, v) in edges {
            if u == v {
                targets[fill[u]] = u as u32;
                fill[u] += 1;
            }
        }
        let degrees = (0..n).map(|v| proper_count[v] + 2 * loop_count[v]).collect();
        Ok(Self {
            offsets,
            targets,
            proper: proper_count.iter().map(|&c| c as u32).collect(),
            degrees,
            n_edges: edges.len(),
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.degrees.len()
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Full adjacency list of `v`, self-loops included once each.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Adjacency list of `v` without self-loop entries.
    #[inline]
    pub fn proper_neighbors(&self, v: usize) -> &[u32] {
        let start = self.offsets[v];
        &self.targets[start..start + self.proper[v] as usize]
    }

    pub fn self_loops(&self, v: usize) -> usize {
        (self.offsets[v + 1] - self.offsets[v]) - self.proper[v] as usize
    }

    /// Edge list with each undirected edge once (`u <= v`), in vertex order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n_edges);
        for u in 0..self.n_vertices() {
            for &v in self.neighbors(u) {
                let v = v as usize;
                if u <= v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Connected components as a label per vertex plus the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.n_vertices();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &w in self.proper_neighbors(u) {
                    let w = w as usize;
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Breadth-first hop distances from `source` (`None` when unreachable).
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n_vertices()];
        dist[source] = Some(0);
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued vertices have a distance");
            for &w in self.proper_neighbors(u) {
                let w = w as usize;
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Verifies the structural invariants: even degree sum, degree equals
    /// list length plus loop count, and multiset symmetry of adjacency.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n_vertices();
        let sum: usize = self.degrees.iter().sum();
        if !sum.is_multiple_of(2) {
            return Err(Error::invalid(format!("odd degree sum {sum}")));
        }
        let mut counts: std::collections::HashMap<(usize, usize), isize> = Default::default();
        for u in 0..n {
            let list = self.neighbors(u);
            if self.degrees[u] != list.len() + self.self_loops(u) {
                return Err(Error::invalid(format!("degree mismatch at {u}")));
            }
            if self.proper_neighbors(u).iter().any(|&w| w as usize == u) {
                return Err(Error::invalid(format!("loop stored among proper neighbours of {u}")));
            }
            for &w in self.proper_neighbors(u) {
                let w = w as usize;
                let key = (u.min(w), u.max(w));
                *counts.entry(key).or_default() += if u < w { 1 } else { -1 };
            }
        }
        if let Some((k, _)) = counts.iter().find(|(_, &c)| c != 0) {
            return Err(Error::invalid(format!("asymmetric multiplicity for pair {k:?}")));
        }
        Ok(())
    }
}
