//! Deterministic generators for lattices, regular trees and star-like graphs.
//!
//! Every generator returns a finite truncation with its frontier marked:
//! lattice shells and the deepest tree generation are sealed, path ends and
//! star-like ray tips are ray ends.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};

/// Path `0 - 1 - … - (n-1)`, unit weights, both ends ray ends.
pub fn path_graph(n: usize) -> Result<WeightedGraph> {
    if n < 2 {
        return Err(Error::BadParameter(format!("path needs n >= 2, got {n}")));
    }
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    WeightedGraph::new(vec![1.0; n], &edges)?.with_frontier(&[], &[VertexId(0), VertexId(n - 1)])
}

/// A copy of `ℕ` cut after `length` edges: vertex 0 is the true end, the
/// tip `length` is a ray end.
pub fn ray(length: usize) -> Result<WeightedGraph> {
    if length < 1 {
        return Err(Error::BadParameter("ray needs length >= 1".into()));
    }
    let edges: Vec<_> = (0..length).map(|i| (i, i + 1, 1.0)).collect();
    WeightedGraph::new(vec![1.0; length + 1], &edges)?.with_frontier(&[], &[VertexId(length)])
}

/// `Z^d` box with `side^d` vertices, lexicographic indexing (last axis
/// fastest), unit weights, outer shell sealed.
pub fn grid(d: usize, side: usize) -> Result<WeightedGraph> {
    if !(1..=3).contains(&d) {
        return Err(Error::BadParameter(format!("grid dimension must be 1..=3, got {d}")));
    }
    if side < 2 {
        return Err(Error::BadParameter(format!("grid side must be >= 2, got {side}")));
    }
    let n = side.pow(d as u32);
    let coords = |mut i: usize| {
        let mut c = [0usize; 3];
        for a in (0..d).rev() {
            c[a] = i % side;
            i /= side;
        }
        c
    };
    let mut edges = Vec::with_capacity(d * n);
    for i in 0..n {
        let c = coords(i);
        for (a, &ca) in c[..d].iter().enumerate() {
            if ca + 1 < side {
                let stride = side.pow((d - 1 - a) as u32);
                edges.push((i, i + stride, 1.0));
            }
        }
    }
    let shell: Vec<VertexId> = (0..n)
        .filter(|&i| coords(i)[..d].iter().any(|&x| x == 0 || x == side - 1))
        .map(VertexId)
        .collect();
    WeightedGraph::new(vec![1.0; n], &edges)?.with_frontier(&shell, &[])
}

/// Index of the lattice point `c` in [`grid`]`(c.len(), side)`.
pub fn grid_index(side: usize, c: &[usize]) -> usize {
    c.iter().fold(0, |acc, &x| acc * side + x)
}

/// Regular tree where every vertex has degree `b + 1`: the root has `b + 1`
/// children, every other vertex `b`. Breadth-first indexing, root 0,
/// `depth` generations below the root, the deepest one sealed.
pub fn dary_tree(b: usize, depth: usize) -> Result<WeightedGraph> {
    if b < 2 {
        return Err(Error::BadParameter(format!("branching must be >= 2, got {b}")));
    }
    if depth < 1 {
        return Err(Error::BadParameter("tree depth must be >= 1".into()));
    }
    let mut edges = Vec::new();
    let mut level = vec![0usize];
    let mut next_id = 1;
    for gen in 0..depth {
        let kids = if gen == 0 { b + 1 } else { b };
        let mut next = Vec::with_capacity(level.len() * kids);
        for &p in &level {
            for _ in 0..kids {
                edges.push((p, next_id, 1.0));
                next.push(next_id);
                next_id += 1;
            }
        }
        level = next;
    }
    let leaves: Vec<VertexId> = level.into_iter().map(VertexId).collect();
    WeightedGraph::new(vec![1.0; next_id], &edges)?.with_frontier(&leaves, &[])
}

/// `core` plus `ray_count` unit-weight rays of `ray_length` edges. Rays are
/// glued at core vertices `0, 1, …`; a single-vertex core hosts every ray.
/// Core vertices keep their indices, ray vertices follow ray by ray, and
/// each ray tip is a ray end.
pub fn star_like(core: &WeightedGraph, ray_count: usize, ray_length: usize) -> Result<WeightedGraph> {
    if ray_count == 0 {
        return Err(Error::BadParameter("star-like graph needs at least one ray".into()));
    }
    if ray_length < 2 {
        return Err(Error::BadParameter(format!(
            "ray length must be >= 2, got {ray_length}"
        )));
    }
    let k = core.vertex_count();
    if k > 1 && k < ray_count {
        return Err(Error::CoreTooSmall {
            core: k,
            rays: ray_count,
        });
    }
    let mut c = core.vertex_weights().to_vec();
    let mut edges = core.edge_triples();
    let mut tips = Vec::with_capacity(ray_count);
    for a in 0..ray_count {
        let anchor = if k == 1 { 0 } else { a };
        let mut prev = anchor;
        for _ in 0..ray_length {
            let v = c.len();
            c.push(1.0);
            edges.push((prev, v, 1.0));
            prev = v;
        }
        tips.push(VertexId(prev));
    }
    let sealed: Vec<VertexId> = core
        .vertices()
        .filter(|&x| core.frontier_kind(x) == Some(crate::graph::FrontierKind::Sealed))
        .collect();
    WeightedGraph::new(c, &edges)?.with_frontier(&sealed, &tips)
}

/// Same graph with `c(x) = Σ_y 1/r(x, y)`.
pub fn electrical_weights(g: &WeightedGraph) -> Result<WeightedGraph> {
    let c = g
        .vertices()
        .map(|x| g.emanating(x).iter().map(|e| 1.0 / g.r(e.edge)).sum())
        .collect();
    g.reweighted(c, g.edge_weights().to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    /// `c = r = 1`
    #[default]
    Simple,
    /// `c(x) = Σ 1/r`
    Electrical,
    /// weights as given in a graph file
    Explicit,
}

/// A family of truncations indexed by a radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    /// `Z`: path of `2T + 1` vertices, origin in the middle.
    Line,
    /// `ℕ`: ray of `T` edges, origin at the end.
    Ray,
    /// `Z^dim`: box of side `2T + 1`, origin at the centre.
    Grid { dim: usize },
    /// Regular tree of degree `branching + 1`, `T` generations.
    Tree { branching: usize },
    /// Path core of `core` vertices with `rays` rays of length `T`.
    StarLike {
        rays: usize,
        #[serde(default = "one")]
        core: usize,
    },
}

fn one() -> usize {
    1
}

/// One member of a family: the graph and its origin `o`.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub graph: WeightedGraph,
    pub origin: VertexId,
}

impl FamilySpec {
    /// Parses names like `line`, `z`, `ray`, `grid2`, `triadic`, `tree3`,
    /// `star-like`.
    pub fn from_name(name: &str) -> Result<Self> {
        let n = name.to_ascii_lowercase().replace('_', "-");
        let parsed = match n.as_str() {
            "line" | "z" | "path" => FamilySpec::Line,
            "ray" | "n" => FamilySpec::Ray,
            "triadic" => FamilySpec::Tree { branching: 2 },
            "star-like" | "starlike" | "star" => FamilySpec::StarLike { rays: 3, core: 1 },
            "grid" => FamilySpec::Grid { dim: 2 },
            _ => {
                if let Some(d) = n.strip_prefix("grid").and_then(|s| s.parse().ok()) {
                    FamilySpec::Grid { dim: d }
                } else if let Some(d) = n.strip_prefix('z').and_then(|s| s.parse().ok()) {
                    FamilySpec::Grid { dim: d }
                } else if let Some(b) = n.strip_prefix("tree").and_then(|s| s.parse().ok()) {
                    FamilySpec::Tree { branching: b }
                } else {
                    return Err(Error::BadParameter(format!("unknown family {name:?}")));
                }
            }
        };
        Ok(parsed)
    }

    /// Short name used in reports.
    pub fn name(&self) -> String {
        match self {
            FamilySpec::Line => "line".into(),
            FamilySpec::Ray => "ray".into(),
            FamilySpec::Grid { dim } => format!("grid{dim}"),
            FamilySpec::Tree { branching: 2 } => "triadic".into(),
            FamilySpec::Tree { branching } => format!("tree{branching}"),
            FamilySpec::StarLike { rays, .. } => format!("star-like{rays}"),
        }
    }

    pub fn branching(&self) -> Option<usize> {
        match self {
            FamilySpec::Tree { branching } => Some(*branching),
            _ => None,
        }
    }

    pub fn truncate(&self, radius: usize, weights: WeightScheme) -> Result<Truncation> {
        if radius == 0 {
            return Err(Error::BadParameter("truncation radius must be >= 1".into()));
        }
        let (graph, origin) = match *self {
            FamilySpec::Line => (path_graph(2 * radius + 1)?, radius),
            FamilySpec::Ray => (ray(radius)?, 0),
            FamilySpec::Grid { dim } => {
                let side = 2 * radius + 1;
                (grid(dim, side)?, grid_index(side, &vec![radius; dim]))
            }
            FamilySpec::Tree { branching } => (dary_tree(branching, radius)?, 0),
            FamilySpec::StarLike { rays, core } => {
                let core_graph = if core <= 1 {
                    WeightedGraph::new(vec![1.0], &[])?
                } else {
                    let edges: Vec<_> = (0..core - 1).map(|i| (i, i + 1, 1.0)).collect();
                    WeightedGraph::new(vec![1.0; core], &edges)?
                };
                (star_like(&core_graph, rays, radius.max(2))?, 0)
            }
        };
        let graph = match weights {
            WeightScheme::Simple | WeightScheme::Explicit => graph,
            WeightScheme::Electrical => electrical_weights(&graph)?,
        };
        Ok(Truncation {
            graph,
            origin: VertexId(origin),
        })
    }
}
