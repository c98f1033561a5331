//! Section coordinates, admissibility masks and the Gram form `‖Dσ‖²`.
//!
//! Coordinates are laid out as `[f(0..V); φ(0..E)]`. The Gram form is kept
//! in factored form `A = MᵀM`, where `M` is the matrix of `D` scaled so that
//! the Euclidean norm of `Mσ` is the weighted norm of `Dσ`:
//!
//! ```text
//! vertex row x:  (1/√c(x)) Σ_{e⁺=x} r(e) φ(e)     (√c(x) δφ(x))
//! edge row e:    √r(e) (f(e⁺) - f(e⁻))             (√r(e) df(e))
//! ```

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::sparse::CsrMatrix;
use crate::cochain::{Cochain0, Cochain1, Section};
use crate::error::{Error, Result};
use crate::graph::{FrontierKind, Region, VertexSet, WeightedGraph};

/// Which components of `Dσ` enter the right-hand norm of the probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormConvention {
    /// `‖Dσ‖` over the whole graph.
    #[default]
    WholeGraph,
    /// `‖Dσ‖` over `G ∖ G_K`: `δσ` at vertices of `K` is dropped.
    OutsideK,
}

impl NormConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            NormConvention::WholeGraph => "whole_graph",
            NormConvention::OutsideK => "outside_k",
        }
    }
}

impl std::str::FromStr for NormConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "whole_graph" | "whole" => Ok(NormConvention::WholeGraph),
            "outside_k" | "outside" => Ok(NormConvention::OutsideK),
            other => Err(Error::BadParameter(format!("unknown convention {other:?}"))),
        }
    }
}

/// Coordinate masks for a probe on `g`.
#[derive(Debug, Clone)]
pub struct Admissibility {
    pub n_vertices: usize,
    pub n_edges: usize,
    /// free section coordinates, length `V + E`
    pub coords: Vec<bool>,
    /// vertices where `δφ` is counted
    pub counted_vertices: Vec<bool>,
    /// edges where `df` is counted
    pub counted_edges: Vec<bool>,
}

impl Admissibility {
    /// Every coordinate free, every output counted.
    pub fn full(g: &WeightedGraph) -> Self {
        let (v, e) = (g.vertex_count(), g.edge_count());
        Self {
            n_vertices: v,
            n_edges: e,
            coords: vec![true; v + e],
            counted_vertices: vec![true; v],
            counted_edges: vec![true; e],
        }
    }

    pub fn vertex_coord(&self, x: usize) -> usize {
        x
    }

    pub fn edge_coord(&self, e: usize) -> usize {
        self.n_vertices + e
    }

    pub fn admissible_count(&self) -> usize {
        self.coords.iter().filter(|&&b| b).count()
    }

    pub fn admissible_vertex(&self, x: usize) -> bool {
        self.coords[x]
    }

    pub fn admissible_edge(&self, e: usize) -> bool {
        self.coords[self.n_vertices + e]
    }
}

/// Masks for sections supported in `(V ∖ K) × (E ∖ ℰ_K)` away from sealed
/// frontier vertices. Ray ends keep their value free and their `δ`
/// uncounted.
pub fn probe_masks(
    g: &WeightedGraph,
    k: &VertexSet,
    convention: NormConvention,
) -> Result<Admissibility> {
    let in_k = {
        k.iter().try_for_each(|x| g.check_vertex(x))?;
        k.mask(g.vertex_count())
    };
    let sealed: Vec<bool> = g
        .vertices()
        .map(|x| g.frontier_kind(x) == Some(FrontierKind::Sealed))
        .collect();
    let mut adm = Admissibility::full(g);
    for x in g.vertices() {
        let i = x.0;
        adm.coords[i] = !in_k[i] && !sealed[i];
        adm.counted_vertices[i] = g.frontier_kind(x) != Some(FrontierKind::RayEnd)
            && !(convention == NormConvention::OutsideK && in_k[i]);
    }
    for e in g.canonical_edges() {
        let (t, h) = (e.tail.0, e.head.0);
        let inner = in_k[t] && in_k[h];
        adm.coords[adm.n_vertices + e.edge.0] = !inner && !sealed[t] && !sealed[h];
        adm.counted_edges[e.edge.0] = !(convention == NormConvention::OutsideK && inner);
    }
    Ok(adm)
}

/// Full weighted matrix of `D`, rows `[vertices; edges]`, columns the
/// section coordinates.
pub fn weighted_d_matrix(g: &WeightedGraph) -> CsrMatrix {
    weighted_d_rows(g, &Admissibility::full(g))
}

fn weighted_d_rows(g: &WeightedGraph, adm: &Admissibility) -> CsrMatrix {
    let (nv, ne) = (g.vertex_count(), g.edge_count());
    let mut t = Vec::new();
    for x in g.vertices() {
        if !adm.counted_vertices[x.0] {
            continue;
        }
        let s = 1.0 / g.c(x).sqrt();
        for e in g.emanating(x) {
            // incoming orientation -e has sign -sign(e)
            t.push((x.0, nv + e.edge.0, -e.sign() * g.r(e.edge) * s));
        }
    }
    for e in g.canonical_edges() {
        if !adm.counted_edges[e.edge.0] {
            continue;
        }
        let s = g.r(e.edge).sqrt();
        t.push((nv + e.edge.0, e.head.0, s));
        t.push((nv + e.edge.0, e.tail.0, -s));
    }
    CsrMatrix::from_triplets(nv + ne, nv + ne, &t)
}

/// `σᵀAσ` with `A = MᵀM` over a subset of section coordinates.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    /// global coordinate of each local coordinate
    pub coords: Vec<usize>,
    /// `c` on vertex coordinates, `r` on edge coordinates
    pub metric: Vec<f64>,
    /// factor, columns = local coordinates
    pub m: CsrMatrix,
}

impl QuadraticForm {
    /// A form given directly by its factor, with coordinates `0..ncols`.
    pub fn from_factor(m: CsrMatrix, metric: Vec<f64>) -> Result<Self> {
        if m.ncols() == 0 {
            return Err(Error::EmptyAdmissibleSet);
        }
        if metric.len() != m.ncols() {
            return Err(Error::LengthMismatch {
                expected: m.ncols(),
                got: metric.len(),
            });
        }
        Ok(Self {
            coords: (0..m.ncols()).collect(),
            metric,
            m,
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.m.normal_matvec(x)
    }

    /// `xᵀAx = ‖Mx‖²`.
    pub fn energy(&self, x: &[f64]) -> f64 {
        self.m.matvec(x).iter().map(|v| v * v).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let m = self.m.to_dense();
        m.transpose() * m
    }

    pub fn local_index(&self, global: usize) -> Option<usize> {
        self.coords.binary_search(&global).ok()
    }

    /// Adds `Σ w_i σ_i²` for the given local coordinates (stacks `√w` rows).
    pub fn with_diagonal(&self, entries: &[(usize, f64)]) -> Self {
        let t: Vec<_> = entries
            .iter()
            .enumerate()
            .map(|(row, &(j, w))| (row, j, w.sqrt()))
            .collect();
        let extra = CsrMatrix::from_triplets(entries.len(), self.dim(), &t);
        Self {
            coords: self.coords.clone(),
            metric: self.metric.clone(),
            m: self.m.vstack(&extra),
        }
    }

    /// Expands local coordinates into a section of `g`.
    pub fn section(&self, g: &WeightedGraph, local: &[f64]) -> Result<Section> {
        let nv = g.vertex_count();
        let mut f = Cochain0::zeros(g);
        let mut phi = Cochain1::zeros(g);
        if local.len() != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                got: local.len(),
            });
        }
        for (&gi, &v) in self.coords.iter().zip(local) {
            if gi < nv {
                f.values_mut()[gi] = v;
            } else {
                phi.values_mut()[gi - nv] = v;
            }
        }
        Section::new(f, phi)
    }

    /// Restricts a section to the local coordinates.
    pub fn local(&self, g: &WeightedGraph, s: &Section) -> Vec<f64> {
        let global = s.to_coordinates();
        debug_assert_eq!(global.len(), g.vertex_count() + g.edge_count());
        self.coords.iter().map(|&i| global[i]).collect()
    }
}

/// Assembles `‖Dσ‖²` over the counted outputs for σ on admissible
/// coordinates.
pub fn assemble_d_gram(g: &WeightedGraph, adm: &Admissibility) -> Result<QuadraticForm> {
    let coords: Vec<usize> = (0..adm.coords.len()).filter(|&i| adm.coords[i]).collect();
    if coords.is_empty() {
        return Err(Error::EmptyAdmissibleSet);
    }
    let nv = g.vertex_count();
    let metric = coords
        .iter()
        .map(|&i| {
            if i < nv {
                g.vertex_weights()[i]
            } else {
                g.edge_weights()[i - nv]
            }
        })
        .collect();
    let m = weighted_d_rows(g, adm)
        .select_columns(&coords)
        .compress_rows();
    Ok(QuadraticForm { coords, metric, m })
}

/// The seminorm `‖σ‖²_{l²(U)}` as weights on local coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintMask {
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
}

impl ConstraintMask {
    pub fn new(indices: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyConstraint);
        }
        if indices.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: indices.len(),
                got: weights.len(),
            });
        }
        if let Some(&w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::NonPositiveWeight {
                what: "constraint",
                value: w,
            });
        }
        let mut pairs: Vec<_> = indices.into_iter().zip(weights).collect();
        pairs.sort_by_key(|p| p.0);
        pairs.dedup_by_key(|p| p.0);
        let (indices, weights) = pairs.into_iter().unzip();
        Ok(Self { indices, weights })
    }

    /// Every coordinate of the form, weighted by the metric.
    pub fn everything(q: &QuadraticForm) -> Self {
        Self {
            indices: (0..q.dim()).collect(),
            weights: q.metric.clone(),
        }
    }

    /// `U = (V_U, E_U)` on the form's coordinates, weighted by `c` and `r`.
    pub fn from_region(q: &QuadraticForm, g: &WeightedGraph, u: &Region) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::EmptyConstraint);
        }
        let nv = g.vertex_count();
        let mut idx = Vec::new();
        let mut w = Vec::new();
        for x in u.vertices.iter() {
            g.check_vertex(x)?;
            let i = q.local_index(x.0).ok_or_else(|| {
                Error::InvalidRegion(format!("vertex {} of U is not admissible", x.0))
            })?;
            idx.push(i);
            w.push(g.c(x));
        }
        for e in u.edges.iter() {
            g.check_edge(e)?;
            let i = q.local_index(nv + e.0).ok_or_else(|| {
                Error::InvalidRegion(format!("edge {} of U is not admissible", e.0))
            })?;
            idx.push(i);
            w.push(g.r(e));
        }
        Self::new(idx, w)
    }

    pub fn seminorm_squared(&self, x: &[f64]) -> f64 {
        self.indices
            .iter()
            .zip(&self.weights)
            .map(|(&i, w)| w * x[i] * x[i])
            .sum()
    }
}
