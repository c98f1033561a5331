//! Cochains on a weighted graph and the spaces `l²(V)`, `l²(E)`, `l²(G)`.
//!
//! A [`Cochain1`] stores one value per canonical edge; evaluating it on the
//! reversed orientation negates the value, so skew-symmetry cannot be
//! violated. Every cochain remembers the graph it was built for and the inner
//! products refuse to mix graphs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    edge_boundary, induced_edges, EdgeId, EdgeSet, GraphId, OrientedEdge, Region, VertexId,
    VertexSet, WeightedGraph,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Cochain0 {
    graph: GraphId,
    values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cochain1 {
    graph: GraphId,
    values: Vec<f64>,
}

/// Orientation-independent edge function, e.g. the mean value `f̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeScalar {
    graph: GraphId,
    values: Vec<f64>,
}

/// `(f, φ) ∈ l²(V) ⊕ l²(E)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub f: Cochain0,
    pub phi: Cochain1,
}

fn same(a: GraphId, b: GraphId) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GraphMismatch)
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}

macro_rules! dense_common {
    ($ty:ident, $count:ident) => {
        impl $ty {
            pub fn zeros(g: &WeightedGraph) -> Self {
                Self {
                    graph: g.id(),
                    values: vec![0.0; g.$count()],
                }
            }

            pub fn constant(g: &WeightedGraph, value: f64) -> Self {
                Self {
                    graph: g.id(),
                    values: vec![value; g.$count()],
                }
            }

            pub fn from_values(g: &WeightedGraph, values: Vec<f64>) -> Result<Self> {
                check_len(g.$count(), values.len())?;
                Ok(Self {
                    graph: g.id(),
                    values,
                })
            }

            pub fn graph_id(&self) -> GraphId {
                self.graph
            }

            pub fn values(&self) -> &[f64] {
                &self.values
            }

            pub fn values_mut(&mut self) -> &mut [f64] {
                &mut self.values
            }

            pub fn into_values(self) -> Vec<f64> {
                self.values
            }

            pub fn belongs_to(&self, g: &WeightedGraph) -> Result<()> {
                same(self.graph, g.id())?;
                check_len(g.$count(), self.values.len())
            }

            pub fn max_abs(&self) -> f64 {
                self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
            }

            pub fn scaled(&self, s: f64) -> Self {
                Self {
                    graph: self.graph,
                    values: self.values.iter().map(|v| v * s).collect(),
                }
            }

            pub fn try_add(&self, other: &Self) -> Result<Self> {
                same(self.graph, other.graph)?;
                Ok(Self {
                    graph: self.graph,
                    values: self
                        .values
                        .iter()
                        .zip(&other.values)
                        .map(|(a, b)| a + b)
                        .collect(),
                })
            }

            pub fn try_sub(&self, other: &Self) -> Result<Self> {
                same(self.graph, other.graph)?;
                Ok(Self {
                    graph: self.graph,
                    values: self
                        .values
                        .iter()
                        .zip(&other.values)
                        .map(|(a, b)| a - b)
                        .collect(),
                })
            }
        }
    };
}

dense_common!(Cochain0, vertex_count);
dense_common!(Cochain1, edge_count);
dense_common!(EdgeScalar, edge_count);

impl Cochain0 {
    pub fn indicator(g: &WeightedGraph, set: &VertexSet) -> Self {
        let mut f = Self::zeros(g);
        for x in set.iter() {
            f.values[x.0] = 1.0;
        }
        f
    }

    pub fn get(&self, x: VertexId) -> f64 {
        self.values[x.0]
    }

    pub fn set(&mut self, x: VertexId, value: f64) {
        self.values[x.0] = value;
    }

    pub fn support(&self) -> VertexSet {
        VertexSet::new(
            self.values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, _)| VertexId(i)),
        )
    }

    /// Pointwise product `fg`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        same(self.graph, other.graph)?;
        Ok(Self {
            graph: self.graph,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }
}

impl Cochain1 {
    /// `φ(e)` for either orientation of an edge.
    #[inline]
    pub fn eval(&self, e: OrientedEdge) -> f64 {
        e.sign() * self.values[e.edge.0]
    }

    /// Value on the canonical orientation.
    pub fn get(&self, e: EdgeId) -> f64 {
        self.values[e.0]
    }

    pub fn set(&mut self, e: EdgeId, value: f64) {
        self.values[e.0] = value;
    }

    /// Sets `φ(e) = value` for the given orientation (so `φ(-e) = -value`).
    pub fn set_oriented(&mut self, e: OrientedEdge, value: f64) {
        self.values[e.edge.0] = e.sign() * value;
    }

    pub fn support(&self) -> EdgeSet {
        EdgeSet::new(
            self.values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, _)| EdgeId(i)),
        )
    }

    /// Product with a symmetric edge function, e.g. `χ̄ φ`.
    pub fn try_mul_scalar(&self, s: &EdgeScalar) -> Result<Self> {
        same(self.graph, s.graph)?;
        Ok(Self {
            graph: self.graph,
            values: self
                .values
                .iter()
                .zip(&s.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }
}

impl EdgeScalar {
    #[inline]
    pub fn eval(&self, e: OrientedEdge) -> f64 {
        self.values[e.edge.0]
    }

    pub fn get(&self, e: EdgeId) -> f64 {
        self.values[e.0]
    }

    /// `1 - s`.
    pub fn complement(&self) -> Self {
        Self {
            graph: self.graph,
            values: self.values.iter().map(|v| 1.0 - v).collect(),
        }
    }
}

impl Section {
    pub fn new(f: Cochain0, phi: Cochain1) -> Result<Self> {
        same(f.graph, phi.graph)?;
        Ok(Self { f, phi })
    }

    pub fn zeros(g: &WeightedGraph) -> Self {
        Self {
            f: Cochain0::zeros(g),
            phi: Cochain1::zeros(g),
        }
    }

    pub fn graph_id(&self) -> GraphId {
        self.f.graph
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            f: self.f.try_add(&other.f)?,
            phi: self.phi.try_add(&other.phi)?,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            f: self.f.try_sub(&other.f)?,
            phi: self.phi.try_sub(&other.phi)?,
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            f: self.f.scaled(s),
            phi: self.phi.scaled(s),
        }
    }

    /// Concatenated coordinates `[f; φ]`.
    pub fn to_coordinates(&self) -> Vec<f64> {
        self.f
            .values
            .iter()
            .chain(&self.phi.values)
            .copied()
            .collect()
    }

    pub fn from_coordinates(g: &WeightedGraph, coords: &[f64]) -> Result<Self> {
        let n = g.vertex_count();
        check_len(n + g.edge_count(), coords.len())?;
        Ok(Self {
            f: Cochain0::from_values(g, coords[..n].to_vec())?,
            phi: Cochain1::from_values(g, coords[n..].to_vec())?,
        })
    }
}

/// `⟨f, g⟩_V = Σ c(x) f(x) g(x)`.
pub fn inner0(g: &WeightedGraph, a: &Cochain0, b: &Cochain0) -> Result<f64> {
    a.belongs_to(g)?;
    b.belongs_to(g)?;
    Ok(g.vertex_weights()
        .iter()
        .zip(a.values.iter().zip(&b.values))
        .map(|(c, (x, y))| c * x * y)
        .sum())
}

pub fn norm0(g: &WeightedGraph, f: &Cochain0) -> Result<f64> {
    inner0(g, f, f).map(f64::sqrt)
}

/// `⟨φ, ψ⟩_E = ½ Σ_{e ∈ E} r(e) φ(e) ψ(e)`, summed once per canonical edge.
pub fn inner1(g: &WeightedGraph, a: &Cochain1, b: &Cochain1) -> Result<f64> {
    a.belongs_to(g)?;
    b.belongs_to(g)?;
    Ok(g.edge_weights()
        .iter()
        .zip(a.values.iter().zip(&b.values))
        .map(|(r, (x, y))| r * x * y)
        .sum())
}

pub fn norm1(g: &WeightedGraph, phi: &Cochain1) -> Result<f64> {
    inner1(g, phi, phi).map(f64::sqrt)
}

pub fn inner_section(g: &WeightedGraph, a: &Section, b: &Section) -> Result<f64> {
    Ok(inner0(g, &a.f, &b.f)? + inner1(g, &a.phi, &b.phi)?)
}

pub fn norm_section(g: &WeightedGraph, s: &Section) -> Result<f64> {
    inner_section(g, s, s).map(f64::sqrt)
}

/// Seminorm `‖(f, φ)‖_{l²(U)}` over the couple `U = (V_U, E_U)`.
pub fn norm_on(g: &WeightedGraph, s: &Section, u: &Region) -> Result<f64> {
    Ok(norm_on_squared(g, s, u)?.sqrt())
}

pub fn norm_on_squared(g: &WeightedGraph, s: &Section, u: &Region) -> Result<f64> {
    s.f.belongs_to(g)?;
    s.phi.belongs_to(g)?;
    u.vertices.iter().try_for_each(|x| g.check_vertex(x))?;
    u.edges.iter().try_for_each(|e| g.check_edge(e))?;
    // same association as `inner_section`, so the whole region agrees exactly
    let vertex_part: f64 = u
        .vertices
        .iter()
        .map(|x| {
            let v = s.f.get(x);
            g.c(x) * v * v
        })
        .sum();
    let edge_part: f64 = u
        .edges
        .iter()
        .map(|e| {
            let v = s.phi.get(e);
            g.r(e) * v * v
        })
        .sum();
    Ok(vertex_part + edge_part)
}

/// `f̄(e) = (f(e⁺) + f(e⁻)) / 2`.
pub fn mean_value(g: &WeightedGraph, f: &Cochain0) -> EdgeScalar {
    debug_assert!(f.belongs_to(g).is_ok());
    EdgeScalar {
        graph: f.graph,
        values: g
            .canonical_edges()
            .map(|e| 0.5 * (f.get(e.head) + f.get(e.tail)))
            .collect(),
    }
}

/// Cutoff built from the indicator of `K^c`.
#[derive(Debug, Clone)]
pub struct Cutoff {
    pub k: VertexSet,
    /// `χ = 1_{K^c}`
    pub chi: Cochain0,
    /// `dχ`, values in `{0, ±1}`
    pub dchi: Cochain1,
    /// `χ̄`, values in `{0, ½, 1}`
    pub chibar: EdgeScalar,
}

pub fn cutoff(g: &WeightedGraph, k: &VertexSet) -> Result<Cutoff> {
    let k = g.vertex_set(k.iter())?;
    let mut chi = Cochain0::constant(g, 1.0);
    for x in k.iter() {
        chi.set(x, 0.0);
    }
    let dchi = Cochain1 {
        graph: g.id(),
        values: g
            .canonical_edges()
            .map(|e| chi.get(e.head) - chi.get(e.tail))
            .collect(),
    };
    let chibar = mean_value(g, &chi);
    Ok(Cutoff {
        k,
        chi,
        dchi,
        chibar,
    })
}

impl Cutoff {
    /// `ℰ_K`, where `dχ = 0` and `χ̄ = 0`.
    pub fn inner_edges(&self, g: &WeightedGraph) -> Result<EdgeSet> {
        induced_edges(g, &self.k)
    }

    /// `∂ℰ_K = supp dχ`.
    pub fn boundary_edges(&self, g: &WeightedGraph) -> Result<EdgeSet> {
        edge_boundary(g, &self.k)
    }
}

/// `χ.(f, φ) = (χ f, χ̄ φ)`.
pub fn multiply(cut: &Cutoff, s: &Section) -> Result<Section> {
    Ok(Section {
        f: cut.chi.try_mul(&s.f)?,
        phi: s.phi.try_mul_scalar(&cut.chibar)?,
    })
}

/// `(1-χ).(f, φ) = ((1-χ) f, (1-χ̄) φ)`.
pub fn multiply_complement(cut: &Cutoff, s: &Section) -> Result<Section> {
    let one_minus = Cochain0 {
        graph: cut.chi.graph,
        values: cut.chi.values.iter().map(|v| 1.0 - v).collect(),
    };
    Ok(Section {
        f: one_minus.try_mul(&s.f)?,
        phi: s.phi.try_mul_scalar(&cut.chibar.complement())?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexEntry {
    pub vertex: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub edge: usize,
    pub tail: usize,
    pub head: usize,
    pub value: f64,
}

/// JSON export of a cochain: nonzero entries keyed by index. Edge values
/// refer to the listed `tail → head` orientation (the canonical one).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "degree")]
pub enum CochainJson {
    #[serde(rename = "0")]
    Zero { entries: Vec<VertexEntry> },
    #[serde(rename = "1")]
    One { entries: Vec<EdgeEntry> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionJson {
    pub f: CochainJson,
    pub phi: CochainJson,
}

impl Cochain0 {
    pub fn to_json(&self) -> CochainJson {
        CochainJson::Zero {
            entries: self
                .values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, &value)| VertexEntry { vertex: i, value })
                .collect(),
        }
    }
}

impl Cochain1 {
    pub fn to_json(&self, g: &WeightedGraph) -> CochainJson {
        CochainJson::One {
            entries: self
                .values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, &value)| {
                    let (t, h) = g.endpoints(EdgeId(i));
                    EdgeEntry {
                        edge: i,
                        tail: t.0,
                        head: h.0,
                        value,
                    }
                })
                .collect(),
        }
    }
}

impl Section {
    pub fn to_json(&self, g: &WeightedGraph) -> SectionJson {
        SectionJson {
            f: self.f.to_json(),
            phi: self.phi.to_json(g),
        }
    }
}

impl CochainJson {
    pub fn to_cochain0(&self, g: &WeightedGraph) -> Result<Cochain0> {
        match self {
            CochainJson::Zero { entries } => {
                let mut f = Cochain0::zeros(g);
                for en in entries {
                    g.check_vertex(VertexId(en.vertex))?;
                    f.set(VertexId(en.vertex), en.value);
                }
                Ok(f)
            }
            CochainJson::One { .. } => Err(Error::Format("expected a 0-cochain".into())),
        }
    }

    pub fn to_cochain1(&self, g: &WeightedGraph) -> Result<Cochain1> {
        match self {
            CochainJson::One { entries } => {
                let mut phi = Cochain1::zeros(g);
                for en in entries {
                    let e = EdgeId(en.edge);
                    g.check_edge(e)?;
                    let oe = g.oriented(e);
                    let sign = if (oe.tail.0, oe.head.0) == (en.tail, en.head) {
                        1.0
                    } else if (oe.tail.0, oe.head.0) == (en.head, en.tail) {
                        -1.0
                    } else {
                        return Err(Error::Format(format!(
                            "edge {} does not join {} and {}",
                            en.edge, en.tail, en.head
                        )));
                    };
                    phi.set(e, sign * en.value);
                }
                Ok(phi)
            }
            CochainJson::Zero { .. } => Err(Error::Format("expected a 1-cochain".into())),
        }
    }
}

impl SectionJson {
    pub fn to_section(&self, g: &WeightedGraph) -> Result<Section> {
        Ok(Section {
            f: self.f.to_cochain0(g)?,
            phi: self.phi.to_cochain1(g)?,
        })
    }
}
