//! Discrete equilibrium capacity of balls.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{distances_from, VertexId, WeightedGraph};
use crate::spectral::sparse::{conjugate_gradient, CsrMatrix};

/// Unknown count above which the solve switches to conjugate gradients.
const DENSE_LIMIT: usize = 3000;

/// `min { ‖df‖² : f(o) = 1, f(x) = 0 whenever d(o, x) ≥ N }`.
pub fn classical_capacity(g: &WeightedGraph, o: VertexId, n: usize) -> Result<f64> {
    g.check_vertex(o)?;
    if n == 0 {
        return Err(Error::BadParameter("capacity radius must be >= 1".into()));
    }
    let dist = distances_from(g, &[o])?;
    let inside = |x: VertexId| matches!(dist[x.0], Some(dd) if dd < n);
    if let Some(dd) = g.vertices().filter(|&x| inside(x) && g.is_frontier(x)).filter_map(|x| dist[x.0]).min() {
        return Err(Error::FrontierContamination {
            what: "capacity ball",
            distance: dd,
            buffer: n,
        });
    }

    // unknowns: 0 < d(o, x) < N
    let mut index = vec![usize::MAX; g.vertex_count()];
    let mut unknowns = Vec::new();
    for x in g.vertices() {
        if x != o && inside(x) {
            index[x.0] = unknowns.len();
            unknowns.push(x);
        }
    }
    let m = unknowns.len();
    let mut f = vec![0.0; g.vertex_count()];
    f[o.0] = 1.0;
    if m > 0 {
        let mut trip = Vec::new();
        let mut rhs = vec![0.0; m];
        for (i, &x) in unknowns.iter().enumerate() {
            for e in g.emanating(x) {
                let r = g.r(e.edge);
                trip.push((i, i, r));
                if e.head == o {
                    rhs[i] += r;
                } else if index[e.head.0] != usize::MAX {
                    trip.push((i, index[e.head.0], -r));
                }
            }
        }
        let lap = CsrMatrix::from_triplets(m, m, &trip);
        let sol = if m <= DENSE_LIMIT {
            let a: DMatrix<f64> = lap.to_dense();
            let chol = a
                .cholesky()
                .ok_or_else(|| Error::SolverBreakdown("capacity system is not positive definite".into()))?;
            chol.solve(&DVector::from_vec(rhs)).iter().copied().collect()
        } else {
            let out = conjugate_gradient(|v| lap.matvec(v), &rhs, 1e-14, 20 * m);
            if out.relative_residual > 1e-10 {
                return Err(Error::SolverBreakdown(format!(
                    "capacity solve stalled at residual {:e}",
                    out.relative_residual
                )));
            }
            out.x
        };
        for (i, &x) in unknowns.iter().enumerate() {
            f[x.0] = sol[i];
        }
    }
    Ok(g
        .canonical_edges()
        .map(|e| g.r(e.edge) * (f[e.head.0] - f[e.tail.0]).powi(2))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{grid, grid_index, path_graph};

    #[test]
    fn line_capacity() {
        let g = path_graph(21).unwrap();
        for n in 1..=10 {
            let c = classical_capacity(&g, VertexId(10), n).unwrap();
            assert!((c - 2.0 / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn frontier_inside_ball_is_rejected() {
        let g = grid(2, 5).unwrap();
        let o = VertexId(grid_index(5, &[2, 2]));
        assert!(classical_capacity(&g, o, 2).is_ok());
        assert!(matches!(
            classical_capacity(&g, o, 3),
            Err(Error::FrontierContamination { .. })
        ));
    }
}
