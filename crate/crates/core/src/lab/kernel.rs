//! Exact kernel of `D` on admissible sections.
//!
//! `δφ = 0` at every counted vertex says that `ψ = rφ` is a circulation on
//! the admissible edges once all uncounted vertices are merged into one
//! sink. The kernel is therefore the cycle space of that multigraph, with a
//! fundamental-cycle basis read off a breadth-first spanning forest. On the
//! vertex side `df = 0` forces `f` to be constant on admissible components,
//! and zero on any component touching a vertex where `f` is pinned to zero.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::cochain::{Cochain0, Cochain1, Section};
use crate::error::Result;
use crate::graph::{EdgeId, Region, VertexId, VertexSet, WeightedGraph};
use crate::spectral::gram::{probe_masks, weighted_d_matrix, Admissibility, NormConvention};

/// Kernel of `D` restricted to the admissible coordinates.
#[derive(Debug, Clone)]
pub struct KernelAnalysis {
    /// divergence-free flows, one per fundamental cycle
    pub delta_basis: Vec<Cochain1>,
    /// admissible vertex components on which `f` may be a free constant
    pub free_components: Vec<VertexSet>,
}

impl KernelAnalysis {
    pub fn dimension(&self) -> usize {
        self.delta_basis.len() + self.free_components.len()
    }

    /// First basis element that does not vanish on `U`, as a section.
    pub fn element_meeting(&self, g: &WeightedGraph, u: &Region) -> Option<Section> {
        for phi in &self.delta_basis {
            if u.edges.iter().any(|e| phi.get(e) != 0.0) {
                return Some(Section {
                    f: Cochain0::zeros(g),
                    phi: phi.clone(),
                });
            }
        }
        for comp in &self.free_components {
            if u.vertices.iter().any(|x| comp.contains(x)) {
                return Some(Section {
                    f: Cochain0::indicator(g, comp),
                    phi: Cochain1::zeros(g),
                });
            }
        }
        None
    }
}

pub fn analyze_kernel(g: &WeightedGraph, adm: &Admissibility) -> KernelAnalysis {
    KernelAnalysis {
        delta_basis: cycle_basis(g, adm),
        free_components: free_components(g, adm),
    }
}

fn cycle_basis(g: &WeightedGraph, adm: &Admissibility) -> Vec<Cochain1> {
    let nv = g.vertex_count();
    // node of each vertex; all uncounted vertices share the sink `nv`
    let node = |x: VertexId| if adm.counted_vertices[x.0] { x.0 } else { nv };
    let edges: Vec<EdgeId> = g.edge_ids().filter(|e| adm.admissible_edge(e.0)).collect();
    let mut adj: Vec<Vec<(usize, EdgeId)>> = vec![Vec::new(); nv + 1];
    for &e in &edges {
        let (t, h) = g.endpoints(e);
        let (a, b) = (node(t), node(h));
        adj[a].push((b, e));
        if a != b {
            adj[b].push((a, e));
        }
    }
    let mut parent: Vec<Option<(usize, EdgeId)>> = vec![None; nv + 1];
    let mut depth = vec![usize::MAX; nv + 1];
    let mut tree_edge = vec![false; g.edge_count()];
    for root in 0..=nv {
        if depth[root] != usize::MAX || adj[root].is_empty() {
            continue;
        }
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            for &(b, e) in &adj[a] {
                if depth[b] == usize::MAX {
                    depth[b] = depth[a] + 1;
                    parent[b] = Some((a, e));
                    tree_edge[e.0] = true;
                    queue.push_back(b);
                }
            }
        }
    }
    let mut basis = Vec::new();
    for &e in &edges {
        if tree_edge[e.0] {
            continue;
        }
        let (t, h) = g.endpoints(e);
        let mut psi = vec![0.0; g.edge_count()];
        psi[e.0] = 1.0;
        // close the loop: walk from node(h) back to node(t) through the tree
        let (mut a, mut b) = (node(h), node(t));
        let mut tail_part = Vec::new();
        while a != b {
            if depth[a] >= depth[b] {
                let (p, pe) = parent[a].expect("tree parent");
                push_step(g, &mut psi, pe, a, p, node);
                a = p;
            } else {
                let (p, pe) = parent[b].expect("tree parent");
                tail_part.push((pe, p, b));
                b = p;
            }
        }
        for (pe, from, to) in tail_part.into_iter().rev() {
            push_step(g, &mut psi, pe, from, to, node);
        }
        let phi: Vec<f64> = psi
            .iter()
            .zip(g.edge_weights())
            .map(|(p, r)| p / r)
            .collect();
        basis.push(Cochain1::from_values(g, phi).expect("edge count"));
    }
    basis
}

/// Adds unit flow along tree edge `e` travelled from node `from` to `to`.
fn push_step(
    g: &WeightedGraph,
    psi: &mut [f64],
    e: EdgeId,
    from: usize,
    to: usize,
    node: impl Fn(VertexId) -> usize,
) {
    let (t, h) = g.endpoints(e);
    let forward = node(t) == from && node(h) == to;
    psi[e.0] += if forward { 1.0 } else { -1.0 };
}

fn free_components(g: &WeightedGraph, adm: &Admissibility) -> Vec<VertexSet> {
    let nv = g.vertex_count();
    let mut comp = vec![usize::MAX; nv];
    let mut out = Vec::new();
    for s in g.vertices() {
        if !adm.admissible_vertex(s.0) || comp[s.0] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![s];
        let mut pinned = false;
        comp[s.0] = id;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for e in g.emanating(x) {
                if !adm.counted_edges[e.edge.0] {
                    continue;
                }
                let y = e.head;
                if !adm.admissible_vertex(y.0) {
                    pinned = true;
                } else if comp[y.0] == usize::MAX {
                    comp[y.0] = id;
                    members.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.push((!pinned).then(|| VertexSet::new(members)));
    }
    out.into_iter().flatten().collect()
}

/// `E - V + components` of the admissible-edge multigraph with uncounted
/// vertices merged, counted directly.
pub fn euler_cycle_count(g: &WeightedGraph, adm: &Admissibility) -> usize {
    let nv = g.vertex_count();
    let node = |x: VertexId| if adm.counted_vertices[x.0] { x.0 } else { nv };
    let mut parent: Vec<usize> = (0..=nv).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut touched = vec![false; nv + 1];
    let mut e_count = 0;
    for e in g.canonical_edges() {
        if !adm.admissible_edge(e.edge.0) {
            continue;
        }
        e_count += 1;
        let (a, b) = (node(e.tail), node(e.head));
        touched[a] = true;
        touched[b] = true;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let v_count = touched.iter().filter(|&&t| t).count();
    let comps = (0..=nv)
        .filter(|&i| touched[i] && find(&mut parent, i) == i)
        .count();
    e_count + comps - v_count
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaKernel {
    pub dimension: usize,
    #[serde(skip)]
    pub basis: Vec<Cochain1>,
    pub euler_count: usize,
    /// nullity from a dense SVD, when the problem is small enough
    pub numeric_dimension: Option<usize>,
}

/// Columns above which the numerical cross-check is skipped.
const NUMERIC_LIMIT: usize = 1500;

/// Divergence-free 1-cochains supported off `ℰ_K` and off the sealed
/// frontier.
pub fn delta_kernel_outside(
    g: &WeightedGraph,
    k: &VertexSet,
    convention: NormConvention,
) -> Result<DeltaKernel> {
    let adm = probe_masks(g, k, convention)?;
    let basis = cycle_basis(g, &adm);
    let numeric_dimension = numeric_delta_nullity(g, &adm);
    Ok(DeltaKernel {
        dimension: basis.len(),
        euler_count: euler_cycle_count(g, &adm),
        basis,
        numeric_dimension,
    })
}

fn numeric_delta_nullity(g: &WeightedGraph, adm: &Admissibility) -> Option<usize> {
    let nv = g.vertex_count();
    let cols: Vec<usize> = (0..g.edge_count())
        .filter(|&e| adm.admissible_edge(e))
        .collect();
    if cols.is_empty() {
        return Some(0);
    }
    if cols.len() > NUMERIC_LIMIT {
        return None;
    }
    let rows: Vec<usize> = (0..nv).filter(|&x| adm.counted_vertices[x]).collect();
    let full = weighted_d_matrix(g).to_dense();
    let m = DMatrix::from_fn(rows.len(), cols.len(), |i, j| full[(rows[i], nv + cols[j])]);
    if rows.is_empty() {
        return Some(cols.len());
    }
    let sv = m.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > 1e-10 * top.max(1.0)).count();
    Some(cols.len() - rank)
}
