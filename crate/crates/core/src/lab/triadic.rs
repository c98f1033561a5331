//! Truncated test flows on regular trees.
//!
//! From a vertex `x_n` two outward edges `e₀`, `b₀` carry `+1` and `−1`.
//! Each generation splits the flow evenly among the children, so `δφ`
//! vanishes everywhere except at the heads of the last generation kept.

use std::collections::VecDeque;

use serde::Serialize;

use crate::cochain::{Cochain1, Section};
use crate::error::{Error, Result};
use crate::graph::{EdgeSet, OrientedEdge, Region, VertexId, WeightedGraph};
use crate::operators::delta;

/// Breadth-first orientation of a tree away from `root`.
#[derive(Debug, Clone)]
pub struct RootedTree {
    pub root: VertexId,
    parent: Vec<Option<VertexId>>,
    children: Vec<Vec<VertexId>>,
    depth: Vec<usize>,
}

impl RootedTree {
    pub fn new(g: &WeightedGraph, root: VertexId) -> Result<Self> {
        g.check_vertex(root)?;
        if !g.is_tree() {
            return Err(Error::NotATree);
        }
        let n = g.vertex_count();
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![usize::MAX; n];
        depth[root.0] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for y in g.neighbors(x) {
                if depth[y.0] == usize::MAX {
                    depth[y.0] = depth[x.0] + 1;
                    parent[y.0] = Some(x);
                    children[x.0].push(y);
                    queue.push_back(y);
                }
            }
        }
        for c in &mut children {
            c.sort();
        }
        Ok(Self {
            root,
            parent,
            children,
            depth,
        })
    }

    pub fn parent(&self, x: VertexId) -> Option<VertexId> {
        self.parent[x.0]
    }

    /// Children in increasing index order.
    pub fn children(&self, x: VertexId) -> &[VertexId] {
        &self.children[x.0]
    }

    pub fn depth(&self, x: VertexId) -> usize {
        self.depth[x.0]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TriadicWitness {
    #[serde(skip)]
    pub phi: Cochain1,
    /// `{e₀, b₀}`
    pub u: Region,
    /// `‖δφ‖²` over all vertices
    pub delta_norm_sq: f64,
    /// `‖φ‖²` on `U`
    pub u_norm_sq: f64,
    /// `‖δφ‖ / ‖φ‖_U`
    pub ratio: f64,
    /// `b^{−M/2}`
    pub closed_form_ratio: f64,
    /// largest `|δφ|` away from the last generation's heads
    pub max_interior_delta: f64,
    pub generations: usize,
    pub branching: usize,
}

impl TriadicWitness {
    pub fn section(&self, g: &WeightedGraph) -> Section {
        Section {
            f: crate::cochain::Cochain0::zeros(g),
            phi: self.phi.clone(),
        }
    }
}

/// Builds the flow out of `x_n` truncated after `m` generations.
pub fn triadic_witness(
    g: &WeightedGraph,
    root: VertexId,
    x_n: VertexId,
    m: usize,
) -> Result<TriadicWitness> {
    g.check_vertex(x_n)?;
    let tree = RootedTree::new(g, root)?;
    let kids = tree.children(x_n);
    if kids.len() < 2 {
        return Err(Error::InsufficientDepth {
            vertex: x_n,
            required: m,
            available: 0,
        });
    }
    let (c1, c2) = (kids[0], kids[1]);
    let branching = tree.children(c1).len();
    let short = |available| Error::InsufficientDepth {
        vertex: x_n,
        required: m,
        available,
    };
    if g.is_frontier(c1) || g.is_frontier(c2) {
        return Err(short(0));
    }

    let mut phi = Cochain1::zeros(g);
    let edge = |a: VertexId, b: VertexId| -> OrientedEdge {
        g.find_edge(a, b).expect("tree edge")
    };
    let e0 = edge(x_n, c1);
    let b0 = edge(x_n, c2);
    // ψ = rφ is the conserved flow
    let mut layer: Vec<(VertexId, f64)> = vec![(c1, 1.0), (c2, -1.0)];
    phi.set_oriented(e0, 1.0 / g.r(e0.edge));
    phi.set_oriented(b0, -1.0 / g.r(b0.edge));
    for generation in 1..=m {
        let mut next = Vec::new();
        for &(v, psi) in &layer {
            let ch = tree.children(v);
            if ch.is_empty() || ch.iter().any(|&y| g.is_frontier(y)) {
                return Err(short(generation - 1));
            }
            let share = psi / ch.len() as f64;
            for &y in ch {
                let e = edge(v, y);
                phi.set_oriented(e, share / g.r(e.edge));
                next.push((y, share));
            }
        }
        layer = next;
    }

    let dphi = delta(g, &phi);
    let mut heads = vec![false; g.vertex_count()];
    for &(v, _) in &layer {
        heads[v.0] = true;
    }
    let delta_norm_sq: f64 = g.vertices().map(|x| g.c(x) * dphi.get(x).powi(2)).sum();
    let max_interior_delta = g
        .vertices()
        .filter(|x| !heads[x.0])
        .map(|x| dphi.get(x).abs())
        .fold(0.0, f64::max);
    let u_norm_sq = g.r(e0.edge) * phi.get(e0.edge).powi(2) + g.r(b0.edge) * phi.get(b0.edge).powi(2);
    Ok(TriadicWitness {
        u: Region::from_edges(EdgeSet::new([e0.edge, b0.edge])),
        ratio: (delta_norm_sq / u_norm_sq).sqrt(),
        closed_form_ratio: (branching as f64).powf(-(m as f64) / 2.0),
        phi,
        delta_norm_sq,
        u_norm_sq,
        max_interior_delta,
        generations: m,
        branching,
    })
}
