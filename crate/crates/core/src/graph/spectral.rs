use super::Graph;
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 100_000;

pub fn max_eigenvalue_default(g: &Graph) -> Result<f64> {
    max_eigenvalue(g, DEFAULT_TOL, DEFAULT_MAX_ITERS)
}

/// Largest adjacency eigenvalue `Lambda` of a multigraph (a loop contributes
/// 2 on the diagonal, so row sums equal degrees).
///
/// Power iteration on `A + I` per connected component, started from the
/// degree vector; the shift keeps bipartite components (stars, trees,
/// even cycles) from oscillating between `+Lambda` and `-Lambda`. Stops when
/// `||A x - theta x|| <= tol * theta * ||x||`. Components whose maximum
/// degree cannot beat the running best are skipped, since their spectral
/// radius is at most their maximum degree.
pub fn max_eigenvalue(g: &Graph, tol: f64, max_iters: usize) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let (label, count) = g.components();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (v, &c) in label.iter().enumerate() {
        members[c].push(v);
    }
    let comp_max: Vec<usize> =
        members.iter().map(|vs| vs.iter().map(|&v| g.degree(v)).max().unwrap_or(0)).collect();
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| comp_max[b].cmp(&comp_max[a]).then(members[b].len().cmp(&members[a].len())));

    let mut best: f64 = 0.0;
    for c in order {
        if comp_max[c] == 0 || (comp_max[c] as f64) <= best {
            continue;
        }
        best = best.max(component_radius(g, &members[c], tol, max_iters)?);
    }
    Ok(best)
}

fn component_radius(g: &Graph, vertices: &[usize], tol: f64, max_iters: usize) -> Result<f64> {
    let n = vertices.len();
    let mut local = vec![usize::MAX; g.n_vertices()];
    for (i, &v) in vertices.iter().enumerate() {
        local[v] = i;
    }
    let apply = |x: &[f64], out: &mut [f64]| {
        for (i, &v) in vertices.iter().enumerate() {
            let mut acc = 2.0 * g.self_loops(v) as f64 * x[i];
            for &w in g.proper_neighbors(v) {
                acc += x[local[w as usize]];
            }
            out[i] = acc;
        }
    };
    let mut x: Vec<f64> = vertices.iter().map(|&v| g.degree(v) as f64).collect();
    normalize(&mut x);
    let mut ax = vec![0.0; n];
    let mut theta = 0.0;
    let mut residual = f64::INFINITY;
    for _ in 0..max_iters {
        apply(&x, &mut ax);
        theta = dot(&x, &ax);
        residual = x
            .iter()
            .zip(&ax)
            .map(|(xi, ai)| (ai - theta * xi).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= tol * theta.abs() {
            return Ok(theta);
        }
        for (xi, ai) in x.iter_mut().zip(&ax) {
            *xi += ai;
        }
        normalize(&mut x);
    }
    Err(Error::NonConvergence { iterations: max_iters, last_estimate: theta, residual })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) {
    let norm = dot(x, x).sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|xi| *xi /= norm);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle_graph, generate_star, path_graph};

    #[test]
    fn closed_form_spectra() {
        let l = max_eigenvalue_default(&generate_star(4).unwrap()).unwrap();
        assert!((l - 2.0).abs() < 1e-8);
        let l = max_eigenvalue_default(&generate_star(100).unwrap()).unwrap();
        assert!((l - 10.0).abs() < 1e-6);
        let l = max_eigenvalue_default(&complete_graph(5).unwrap()).unwrap();
        assert!((l - 4.0).abs() < 1e-8);
        let l = max_eigenvalue_default(&cycle_graph(8).unwrap()).unwrap();
        assert!((l - 2.0).abs() < 1e-8);
        // P_5 (5 vertices): 2 cos(pi/6)
        let l = max_eigenvalue_default(&path_graph(4).unwrap()).unwrap();
        assert!((l - 2.0 * (std::f64::consts::PI / 6.0).cos()).abs() < 1e-8);
    }

    #[test]
    fn disconnected_and_looped() {
        // K4 beside a 10-star: Lambda = max(3, sqrt 10).
        let mut edges: Vec<_> = (1..=10).map(|v| (0, v)).collect();
        for u in 11..15 {
            for v in u + 1..15 {
                edges.push((u, v));
            }
        }
        let g = Graph::from_edges(15, &edges).unwrap();
        assert!((max_eigenvalue_default(&g).unwrap() - 10f64.sqrt()).abs() < 1e-8);
        // single vertex with one loop: A = [2]
        let g = Graph::from_edges(2, &[(0, 0)]).unwrap();
        assert!((max_eigenvalue_default(&g).unwrap() - 2.0).abs() < 1e-12);
        let empty = Graph::from_edges(3, &[]).unwrap();
        assert_eq!(max_eigenvalue_default(&empty).unwrap(), 0.0);
    }

    #[test]
    fn non_convergence_carries_last_iterate() {
        let g = path_graph(30).unwrap();
        match max_eigenvalue(&g, 1e-14, 3) {
            Err(Error::NonConvergence { iterations, last_estimate, .. }) => {
                assert_eq!(iterations, 3);
                assert!(last_estimate > 1.0 && last_estimate <= 2.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
        assert!(max_eigenvalue(&g, 0.0, 10).is_err());
    }
}
