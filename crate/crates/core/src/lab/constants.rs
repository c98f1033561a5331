//! Pointwise control constants and the W-norm.

use serde::Serialize;

use crate::cochain::{norm_on_squared, norm_section, Section};
use crate::error::Result;
use crate::graph::{combinatorial_neighborhood, shortest_path, OrientedEdge, Region, VertexId, VertexSet, WeightedGraph};
use crate::operators::gauss_bonnet;
use crate::spectral::gram::{assemble_d_gram, Admissibility, ConstraintMask, QuadraticForm};
use crate::spectral::rayleigh::{min_rayleigh_constrained, SolverOptions};

#[derive(Debug, Clone, Serialize)]
pub struct PathConstant {
    /// `S = (Σ_{e ∈ γ} 1/r(e))^{1/2}` along the chosen shortest path
    pub s: f64,
    /// `max(S, 1)`
    pub c: f64,
    #[serde(skip)]
    pub path: Vec<OrientedEdge>,
}

/// Constant `C` with `|f(x)| ≤ C (|f(x0)| + ‖df‖)` for every `f`, from the
/// deterministic shortest path `x → x0`.
pub fn lemma2_constant(g: &WeightedGraph, x: VertexId, x0: VertexId) -> Result<PathConstant> {
    g.check_vertex(x)?;
    g.check_vertex(x0)?;
    let path = shortest_path(g, x, x0)?;
    let s = path.iter().map(|e| 1.0 / g.r(e.edge)).sum::<f64>().sqrt();
    Ok(PathConstant {
        s,
        c: s.max(1.0),
        path,
    })
}

/// `N_K̃(σ) = (‖σ‖²_{l²(G_K̃)} + ‖Dσ‖²_{l²(G)})^{1/2}`.
#[derive(Debug, Clone)]
pub struct WNorm {
    pub neighborhood: Region,
}

impl WNorm {
    /// Uses the combinatorial neighbourhood of `K`.
    pub fn new(g: &WeightedGraph, k: &VertexSet) -> Result<Self> {
        Ok(Self {
            neighborhood: combinatorial_neighborhood(g, k)?,
        })
    }

    pub fn eval(&self, g: &WeightedGraph, s: &Section) -> Result<f64> {
        let local = norm_on_squared(g, s, &self.neighborhood)?;
        let ds = norm_section(g, &gauss_bonnet(g, s))?;
        Ok((local + ds * ds).sqrt())
    }
}

pub fn w_norm(g: &WeightedGraph, s: &Section, k: &VertexSet) -> Result<f64> {
    WNorm::new(g, k)?.eval(g, s)
}

/// `‖Dσ‖² + ‖σ‖²_{inner}` over every section of `g`.
fn augmented_form(g: &WeightedGraph, inner: &Region) -> Result<QuadraticForm> {
    let q = assemble_d_gram(g, &Admissibility::full(g))?;
    let nv = g.vertex_count();
    let mut diag: Vec<(usize, f64)> = inner.vertices.iter().map(|x| (x.0, g.c(x))).collect();
    diag.extend(inner.edges.iter().map(|e| (nv + e.0, g.r(e))));
    Ok(q.with_diagonal(&diag))
}

/// Constant `C` with `N_inner ≤ N_outer ≤ C · N_inner` for nested regions.
/// It is `(1 + 1/λ)^{1/2}` where `λ` is the smallest value of
/// `N_inner(σ)² / ‖σ‖²_{outer ∖ inner}`; infinite when `λ = 0`.
pub fn w_norm_equivalence(
    g: &WeightedGraph,
    inner: &Region,
    outer: &Region,
    solver: &SolverOptions,
) -> Result<f64> {
    let extra = outer.difference(inner);
    if extra.is_empty() {
        return Ok(1.0);
    }
    let q = augmented_form(g, inner)?;
    let mask = ConstraintMask::from_region(&q, g, &extra)?;
    let sol = min_rayleigh_constrained(&q, &mask, solver)?;
    if sol.value == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((1.0 + 1.0 / sol.value).sqrt())
}

/// Best `C'` in `C' ‖σ‖_U ≤ ‖Dσ‖ + ‖σ‖_{G_K̃}` over all sections.
pub fn lemma34_constant(
    g: &WeightedGraph,
    neighborhood: &Region,
    u: &Region,
    solver: &SolverOptions,
) -> Result<f64> {
    let q = augmented_form(g, neighborhood)?;
    let mask = ConstraintMask::from_region(&q, g, u)?;
    Ok(min_rayleigh_constrained(&q, &mask, solver)?.value.sqrt())
}
