use serde::{Deserialize, Serialize};

use super::{EdgeId, VertexId};

/// Sorted, deduplicated index set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexSet<T>(Vec<T>);

pub type VertexSet = IndexSet<VertexId>;
pub type EdgeSet = IndexSet<EdgeId>;

impl<T: Ord + Copy> IndexSet<T> {
    pub fn new<I: IntoIterator<Item = T>>(items: I) -> Self {
        let mut v: Vec<T> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub(crate) fn from_sorted_unchecked(v: Vec<T>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Self(v)
    }

    pub fn contains(&self, x: T) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = T> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::new(self.iter().chain(other.iter()))
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self(self.iter().filter(|&x| !other.contains(x)).collect())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self(self.iter().filter(|&x| other.contains(x)).collect())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.iter().all(|x| !other.contains(x))
    }
}

impl VertexSet {
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for x in self.iter() {
            m[x.0] = true;
        }
        m
    }
}

impl EdgeSet {
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for e in self.iter() {
            m[e.0] = true;
        }
        m
    }
}

impl<T> Default for IndexSet<T> {
    fn default() -> Self {
        Self(Vec::new())
    }
}

impl<T: Ord + Copy> FromIterator<T> for IndexSet<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        Self::new(iter)
    }
}

/// A finite couple `U = (V_U, E_U)` of vertices and edges.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Region {
    pub vertices: VertexSet,
    pub edges: EdgeSet,
}

impl Region {
    pub fn new(vertices: VertexSet, edges: EdgeSet) -> Self {
        Self { vertices, edges }
    }

    pub fn from_vertices(vertices: VertexSet) -> Self {
        Self {
            vertices,
            edges: EdgeSet::empty(),
        }
    }

    pub fn from_edges(edges: EdgeSet) -> Self {
        Self {
            vertices: VertexSet::empty(),
            edges,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty()
    }

    pub fn union(&self, other: &Region) -> Region {
        Region::new(
            self.vertices.union(&other.vertices),
            self.edges.union(&other.edges),
        )
    }

    pub fn difference(&self, other: &Region) -> Region {
        Region::new(
            self.vertices.difference(&other.vertices),
            self.edges.difference(&other.edges),
        )
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.vertices.is_subset(&other.vertices) && self.edges.is_subset(&other.edges)
    }

    /// Compact text form, e.g. `V{1,2} E{0}`.
    pub fn describe(&self) -> String {
        let vs: Vec<String> = self.vertices.iter().map(|v| v.0.to_string()).collect();
        let es: Vec<String> = self.edges.iter().map(|e| e.0.to_string()).collect();
        format!("V{{{}}} E{{{}}}", vs.join(","), es.join(","))
    }
}
