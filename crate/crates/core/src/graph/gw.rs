use std::collections::VecDeque;

use rand::Rng;

use super::{Graph, OffspringDistribution};
use crate::error::{Error, Result};

/// A Galton-Watson tree revealed breadth-first under a vertex budget.
#[derive(Debug, Clone)]
pub struct GwTree {
    pub graph: Graph,
    pub root: usize,
    /// Generation of each vertex (root is 0).
    pub depth: Vec<usize>,
    /// True when all children of the vertex were revealed.
    pub interior: Vec<bool>,
}

impl GwTree {
    pub fn n_vertices(&self) -> usize {
        self.graph.n_vertices()
    }

    /// Vertices whose offspring were never (fully) revealed.
    pub fn boundary(&self) -> impl Iterator<Item = usize> + '_ {
        self.interior.iter().enumerate().filter(|(_, &i)| !i).map(|(v, _)| v)
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        !self.interior[v]
    }

    /// Sizes of generations `0..=max_depth` (counts of revealed vertices).
    pub fn generation_sizes(&self) -> Vec<usize> {
        let max = self.depth.iter().copied().max().unwrap_or(0);
        let mut sizes = vec![0; max + 1];
        for &d in &self.depth {
            sizes[d] += 1;
        }
        sizes
    }
}

/// Samples a tree breadth-first until the frontier is exhausted or
/// `max_vertices` vertices exist. Root is vertex 0.
pub fn sample_gw_tree<R: Rng + ?Sized>(
    offspring: OffspringDistribution,
    max_vertices: usize,
    rng: &mut R,
) -> Result<GwTree> {
    sample_gw_tree_to_depth(offspring, max_vertices, usize::MAX, rng)
}

/// As [`sample_gw_tree`], but vertices in generation `max_depth` are left
/// unrevealed as well.
pub fn sample_gw_tree_to_depth<R: Rng + ?Sized>(
    offspring: OffspringDistribution,
    max_vertices: usize,
    max_depth: usize,
    rng: &mut R,
) -> Result<GwTree> {
    if max_vertices == 0 {
        return Err(Error::invalid("vertex budget must be at least 1"));
    }
    offspring.validate()?;
    let mut depth = vec![0usize];
    let mut interior = vec![false];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        if depth[v] >= max_depth {
            continue;
        }
        let room = max_vertices - depth.len();
        if room == 0 {
            break;
        }
        let children = offspring.sample(rng);
        let revealed = children.min(room);
        for _ in 0..revealed {
            let c = depth.len();
            depth.push(depth[v] + 1);
            interior.push(false);
            edges.push((v, c));
            queue.push_back(c);
        }
        interior[v] = revealed == children;
    }
    let graph = Graph::from_edges(depth.len(), &edges)?;
    Ok(GwTree { graph, root: 0, depth, interior })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DegreeDistribution;
    use crate::rng::replica_rng;

    #[test]
    fn deterministic_one_gives_a_path() {
        let mut rng = replica_rng(0, 0);
        let t = sample_gw_tree(DegreeDistribution::Deterministic(1).into(), 10, &mut rng).unwrap();
        assert_eq!(t.n_vertices(), 10);
        assert_eq!(t.graph.n_edges(), 9);
        assert_eq!(t.graph.distances_from(0)[9], Some(9));
        assert_eq!(t.boundary().collect::<Vec<_>>(), vec![9]);
    }

    #[test]
    fn deterministic_zero_gives_root_only() {
        let mut rng = replica_rng(0, 0);
        let t = sample_gw_tree(DegreeDistribution::Deterministic(0).into(), 10, &mut rng).unwrap();
        assert_eq!(t.n_vertices(), 1);
        assert!(t.interior[0]);
    }

    #[test]
    fn budget_and_depth_limits_mark_boundary() {
        let mut rng = replica_rng(0, 0);
        let t = sample_gw_tree(DegreeDistribution::Deterministic(2).into(), 6, &mut rng).unwrap();
        assert_eq!(t.n_vertices(), 6);
        // 0 -> 1,2 ; 1 -> 3,4 ; 2 -> 5 (partial)
        assert!(t.interior[0] && t.interior[1]);
        assert!(!t.interior[2]);
        let t = sample_gw_tree_to_depth(DegreeDistribution::Deterministic(2).into(), 1000, 3, &mut rng)
            .unwrap();
        assert_eq!(t.generation_sizes(), vec![1, 2, 4, 8]);
        assert_eq!(t.boundary().count(), 8);
        assert!(sample_gw_tree(DegreeDistribution::Deterministic(2).into(), 0, &mut rng).is_err());
    }
}
