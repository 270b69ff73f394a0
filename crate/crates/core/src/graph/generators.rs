use rand::seq::SliceRandom;
use rand::Rng;

use super::{DegreeDistribution, Graph};
use crate::error::{Error, Result};

/// Star with centre 0 and leaves `1..=k`.
pub fn generate_star(k: usize) -> Result<Graph> {
    if k == 0 {
        return Err(Error::invalid("star needs k >= 1 leaves"));
    }
    let edges: Vec<_> = (1..=k).map(|leaf| (0, leaf)).collect();
    Graph::from_edges(k + 1, &edges)
}

/// Star with centre 0 and leaves `1..=k`, plus a chain `v_1 .. v_r` on
/// vertices `k+1 ..= k+r` with `v_1` adjacent to the centre.
pub fn generate_star_chain(k: usize, r: usize) -> Result<Graph> {
    if k == 0 || r == 0 {
        return Err(Error::invalid(format!("star chain needs k >= 1 and r >= 1 (got k={k}, r={r})")));
    }
    let mut edges: Vec<_> = (1..=k).map(|leaf| (0, leaf)).collect();
    edges.push((0, k + 1));
    edges.extend((k + 1..k + r).map(|v| (v, v + 1)));
    Graph::from_edges(k + r + 1, &edges)
}

/// Path `0 - 1 - ... - r` with `r` edges.
pub fn path_graph(r: usize) -> Result<Graph> {
    if r == 0 {
        return Err(Error::invalid("path needs r >= 1 edges"));
    }
    let edges: Vec<_> = (0..r).map(|v| (v, v + 1)).collect();
    Graph::from_edges(r + 1, &edges)
}

pub fn complete_graph(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::invalid("complete graph needs n >= 1"));
    }
    let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    Graph::from_edges(n, &edges)
}

pub fn cycle_graph(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::invalid("cycle needs n >= 3"));
    }
    let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
    Graph::from_edges(n, &edges)
}

/// Configuration-model multigraph on `n` vertices.
///
/// Degrees are i.i.d. from `dist`; a sequence with odd sum is discarded and
/// redrawn whole, which conditions on an even sum without distorting the
/// per-vertex law. Half-edges are paired by a uniform perfect matching
/// (shuffle, then pair neighbours). Loops and multi-edges are kept.
pub fn generate_config_model<R: Rng + ?Sized>(
    n: usize,
    dist: DegreeDistribution,
    rng: &mut R,
) -> Result<Graph> {
    if n < 2 {
        return Err(Error::invalid("configuration model needs n >= 2"));
    }
    dist.validate()?;
    if let DegreeDistribution::Deterministic(d) = dist {
        if !(n * d).is_multiple_of(2) {
            return Err(Error::invalid(format!("n={n} vertices of degree {d} cannot have even degree sum")));
        }
    }
    let degrees = loop {
        let degrees: Vec<usize> = (0..n).map(|_| dist.sample(rng)).collect();
        if degrees.iter().sum::<usize>() % 2 == 0 {
            break degrees;
        }
    };
    let mut stubs: Vec<usize> = Vec::with_capacity(degrees.iter().sum());
    for (v, &d) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(v, d));
    }
    stubs.shuffle(rng);
    let edges: Vec<_> = stubs.chunks_exact(2).map(|pair| (pair[0], pair[1])).collect();
    Graph::from_edges(n, &edges)
}
