//! Finite weighted graphs with a fixed orientation and a frontier layer.
//!
//! A [`WeightedGraph`] stores each unoriented edge once, in its canonical
//! orientation, together with the symmetric weight `r`. Both orientations are
//! available through [`OrientedEdge`]; reversal flips the canonical flag.
//!
//! Graphs standing for truncations of infinite graphs carry a frontier: the
//! vertices whose neighbourhoods are incomplete. See [`FrontierKind`].

mod io;
mod set;
mod subsets;

use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{GraphFile, GraphFileEdge, GraphFileVertex};
pub use set::{EdgeSet, IndexSet, Region, VertexSet};
pub use subsets::{
    ball, combinatorial_neighborhood, distances_from, edge_boundary, exhaustion, induced_edges,
    shortest_path, vertex_boundary,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

/// An edge `e = (e⁻, e⁺)` together with the canonical edge it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrientedEdge {
    pub edge: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
    pub canonical: bool,
}

impl OrientedEdge {
    /// `-e`.
    #[inline]
    pub fn reversed(self) -> Self {
        Self {
            edge: self.edge,
            tail: self.head,
            head: self.tail,
            canonical: !self.canonical,
        }
    }

    /// +1 for the canonical orientation, -1 for its reverse.
    #[inline]
    pub fn sign(self) -> f64 {
        if self.canonical {
            1.0
        } else {
            -1.0
        }
    }
}

/// How a truncation continues past a frontier vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontierKind {
    /// Continuation unknown. Test sections vanish on the vertex and on its
    /// incident edges; every component of `D` stays counted.
    Sealed,
    /// The vertex starts an infinite unit-weight ray. Continuing a function
    /// or a flow along the ray costs nothing in the infimum, so the vertex
    /// value stays free and `δ` at the vertex is not counted.
    RayEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GraphId(u64);

static NEXT_GRAPH_ID: AtomicU64 = AtomicU64::new(1);

impl GraphId {
    fn fresh() -> Self {
        GraphId(NEXT_GRAPH_ID.fetch_add(1, Ordering::Relaxed))
    }
}

/// A connected, locally finite weighted graph `(G, c, r)`.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    id: GraphId,
    labels: Vec<String>,
    label_index: HashMap<String, VertexId>,
    vertex_weight: Vec<f64>,
    edges: Vec<(VertexId, VertexId)>,
    edge_weight: Vec<f64>,
    adjacency: Vec<Vec<OrientedEdge>>,
    frontier: Vec<Option<FrontierKind>>,
}

fn check_weight(what: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveWeight { what, value })
    }
}

/// Builds a graph from vertex weights and `(tail, head, r)` triples. The
/// triples fix the canonical orientation.
pub fn build_graph(vertex_weights: &[f64], edges: &[(usize, usize, f64)]) -> Result<WeightedGraph> {
    WeightedGraph::new(vertex_weights.to_vec(), edges)
}

impl WeightedGraph {
    pub fn new(vertex_weights: Vec<f64>, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let n = vertex_weights.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        for &c in &vertex_weights {
            check_weight("vertex", c)?;
        }
        let mut seen: HashMap<(usize, usize), f64> = HashMap::with_capacity(edges.len());
        let mut canonical = Vec::with_capacity(edges.len());
        let mut weights = Vec::with_capacity(edges.len());
        for &(u, v, r) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::UnknownVertex(VertexId(x)));
                }
            }
            if u == v {
                return Err(Error::LoopEdge(u));
            }
            check_weight("edge", r)?;
            let key = (u.min(v), u.max(v));
            if let Some(&prev) = seen.get(&key) {
                if prev != r {
                    return Err(Error::AsymmetricWeight(key.0, key.1, prev, r));
                }
                return Err(Error::DuplicateEdge(key.0, key.1));
            }
            seen.insert(key, r);
            canonical.push((VertexId(u), VertexId(v)));
            weights.push(r);
        }

        let mut adjacency = vec![Vec::new(); n];
        for (i, &(t, h)) in canonical.iter().enumerate() {
            let e = OrientedEdge {
                edge: EdgeId(i),
                tail: t,
                head: h,
                canonical: true,
            };
            adjacency[t.0].push(e);
            adjacency[h.0].push(e.reversed());
        }
        for list in &mut adjacency {
            list.sort_by_key(|e| (e.head, e.edge));
        }

        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let label_index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), VertexId(i)))
            .collect();
        let g = Self {
            id: GraphId::fresh(),
            labels,
            label_index,
            vertex_weight: vertex_weights,
            edges: canonical,
            edge_weight: weights,
            adjacency,
            frontier: vec![None; n],
        };
        let components = g.component_count();
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(g)
    }

    /// Replaces the frontier markers. Later lists win on overlap.
    pub fn with_frontier(mut self, sealed: &[VertexId], ray_ends: &[VertexId]) -> Result<Self> {
        self.frontier = vec![None; self.vertex_count()];
        for (list, kind) in [(sealed, FrontierKind::Sealed), (ray_ends, FrontierKind::RayEnd)] {
            for &v in list {
                self.check_vertex(v)?;
                self.frontier[v.0] = Some(kind);
            }
        }
        Ok(self)
    }

    /// Attaches user labels (side map to the dense indices).
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.vertex_count() {
            return Err(Error::LengthMismatch {
                expected: self.vertex_count(),
                got: labels.len(),
            });
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), VertexId(i)).is_some() {
                return Err(Error::Format(format!("duplicate vertex id {l:?}")));
            }
        }
        self.labels = labels;
        self.label_index = index;
        Ok(self)
    }

    pub fn id(&self) -> GraphId {
        self.id
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_weight.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        (0..self.vertex_count()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl ExactSizeIterator<Item = EdgeId> + '_ {
        (0..self.edge_count()).map(EdgeId)
    }

    /// Canonical orientation of `e`.
    pub fn oriented(&self, e: EdgeId) -> OrientedEdge {
        let (tail, head) = self.edges[e.0];
        OrientedEdge {
            edge: e,
            tail,
            head,
            canonical: true,
        }
    }

    pub fn canonical_edges(&self) -> impl ExactSizeIterator<Item = OrientedEdge> + '_ {
        self.edge_ids().map(move |e| self.oriented(e))
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e.0]
    }

    pub fn c(&self, x: VertexId) -> f64 {
        self.vertex_weight[x.0]
    }

    pub fn r(&self, e: EdgeId) -> f64 {
        self.edge_weight[e.0]
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weight
    }

    pub fn edge_weights(&self) -> &[f64] {
        &self.edge_weight
    }

    /// Oriented edges emanating from `x` (`e⁻ = x`), sorted by head.
    pub fn emanating(&self, x: VertexId) -> &[OrientedEdge] {
        &self.adjacency[x.0]
    }

    pub fn neighbors(&self, x: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adjacency[x.0].iter().map(|e| e.head)
    }

    /// `deg(x) = #{e : e⁻ = x}`.
    pub fn degree(&self, x: VertexId) -> Result<usize> {
        self.check_vertex(x)?;
        Ok(self.adjacency[x.0].len())
    }

    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<OrientedEdge> {
        self.adjacency
            .get(u.0)?
            .iter()
            .find(|e| e.head == v)
            .copied()
    }

    pub fn frontier_kind(&self, x: VertexId) -> Option<FrontierKind> {
        self.frontier[x.0]
    }

    pub fn is_frontier(&self, x: VertexId) -> bool {
        self.frontier[x.0].is_some()
    }

    pub fn frontier(&self) -> VertexSet {
        VertexSet::from_sorted_unchecked(
            self.vertices().filter(|&x| self.is_frontier(x)).collect(),
        )
    }

    pub fn has_frontier(&self) -> bool {
        self.frontier.iter().any(Option::is_some)
    }

    pub fn label(&self, x: VertexId) -> &str {
        &self.labels[x.0]
    }

    pub fn vertex_by_label(&self, label: &str) -> Result<VertexId> {
        self.label_index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_owned()))
    }

    pub fn check_vertex(&self, x: VertexId) -> Result<()> {
        if x.0 < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(x))
        }
    }

    pub fn check_edge(&self, e: EdgeId) -> Result<()> {
        if e.0 < self.edge_count() {
            Ok(())
        } else {
            Err(Error::UnknownEdge(e))
        }
    }

    pub fn vertex_set<I: IntoIterator<Item = VertexId>>(&self, items: I) -> Result<VertexSet> {
        let set = VertexSet::new(items);
        set.iter().try_for_each(|x| self.check_vertex(x))?;
        Ok(set)
    }

    pub fn edge_set<I: IntoIterator<Item = EdgeId>>(&self, items: I) -> Result<EdgeSet> {
        let set = EdgeSet::new(items);
        set.iter().try_for_each(|e| self.check_edge(e))?;
        Ok(set)
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::from_sorted_unchecked(self.vertices().collect())
    }

    pub fn all_edges(&self) -> EdgeSet {
        EdgeSet::from_sorted_unchecked(self.edge_ids().collect())
    }

    /// Whole graph as a region `(V, E)`.
    pub fn whole(&self) -> Region {
        Region::new(self.all_vertices(), self.all_edges())
    }

    fn component_count(&self) -> usize {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut components = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            components += 1;
            seen[s] = true;
            queue.push_back(VertexId(s));
            while let Some(x) = queue.pop_front() {
                for y in self.neighbors(x) {
                    if !seen[y.0] {
                        seen[y.0] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        components
    }

    /// True when the graph has no cycles.
    pub fn is_tree(&self) -> bool {
        self.edge_count() + 1 == self.vertex_count()
    }

    /// Edges as `(tail, head, r)` triples in canonical orientation.
    pub fn edge_triples(&self) -> Vec<(usize, usize, f64)> {
        self.edges
            .iter()
            .zip(&self.edge_weight)
            .map(|(&(t, h), &r)| (t.0, h.0, r))
            .collect()
    }

    /// Same graph with new weights (fresh identity).
    pub fn reweighted(&self, vertex_weights: Vec<f64>, edge_weights: Vec<f64>) -> Result<Self> {
        if edge_weights.len() != self.edge_count() {
            return Err(Error::LengthMismatch {
                expected: self.edge_count(),
                got: edge_weights.len(),
            });
        }
        let triples: Vec<_> = self
            .edges
            .iter()
            .zip(edge_weights)
            .map(|(&(t, h), r)| (t.0, h.0, r))
            .collect();
        let mut g = Self::new(vertex_weights, &triples)?;
        g.frontier = self.frontier.clone();
        g.labels = self.labels.clone();
        g.label_index = self.label_index.clone();
        Ok(g)
    }
}
