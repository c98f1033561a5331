//! The difference operator `d`, its adjoint `δ` and the Gauss-Bonnet
//! operator `D = d + δ`, with the derivation and commutator identities.
//!
//! The operators take cochains built for `g` and panic otherwise; the
//! fallible inner products in [`crate::cochain`] are the checked entry
//! points.

use rand::Rng;
use serde::Serialize;

use crate::cochain::{
    inner0, inner1, inner_section, mean_value, Cochain0, Cochain1, Cutoff, Section,
};
use crate::error::Result;
use crate::graph::{VertexSet, WeightedGraph};
use crate::spectral::sparse::CsrMatrix;

fn assert_same(g: &WeightedGraph, id: crate::graph::GraphId) {
    assert!(g.id() == id, "cochain belongs to a different graph");
}

/// `df(e) = f(e⁺) - f(e⁻)` on canonical edges.
pub fn d(g: &WeightedGraph, f: &Cochain0) -> Cochain1 {
    assert_same(g, f.graph_id());
    let values = g
        .canonical_edges()
        .map(|e| f.get(e.head) - f.get(e.tail))
        .collect();
    Cochain1::from_values(g, values).expect("edge count")
}

/// `δφ(x) = (1/c(x)) Σ_{e⁺ = x} r(e) φ(e)`, summed over every oriented edge
/// pointing at `x`.
pub fn delta(g: &WeightedGraph, phi: &Cochain1) -> Cochain0 {
    assert_same(g, phi.graph_id());
    let values = g
        .vertices()
        .map(|x| {
            let s: f64 = g
                .emanating(x)
                .iter()
                .map(|e| {
                    let incoming = e.reversed();
                    g.r(incoming.edge) * phi.eval(incoming)
                })
                .sum();
            s / g.c(x)
        })
        .collect();
    Cochain0::from_values(g, values).expect("vertex count")
}

/// `D(f, φ) = (δφ, df)`.
pub fn gauss_bonnet(g: &WeightedGraph, s: &Section) -> Section {
    Section {
        f: delta(g, &s.phi),
        phi: d(g, &s.f),
    }
}

/// Incidence and weight matrices; `d = B`, `δ = C⁻¹ Bᵀ R`.
#[derive(Debug, Clone)]
pub struct OperatorMatrices {
    /// rows = canonical edges, columns = vertices; +1 at the head, -1 at the tail
    pub incidence: CsrMatrix,
    pub c: Vec<f64>,
    pub r: Vec<f64>,
}

impl OperatorMatrices {
    pub fn new(g: &WeightedGraph) -> Self {
        let mut t = Vec::with_capacity(2 * g.edge_count());
        for e in g.canonical_edges() {
            t.push((e.edge.0, e.head.0, 1.0));
            t.push((e.edge.0, e.tail.0, -1.0));
        }
        Self {
            incidence: CsrMatrix::from_triplets(g.edge_count(), g.vertex_count(), &t),
            c: g.vertex_weights().to_vec(),
            r: g.edge_weights().to_vec(),
        }
    }

    pub fn d(&self, f: &[f64]) -> Vec<f64> {
        self.incidence.matvec(f)
    }

    pub fn delta(&self, phi: &[f64]) -> Vec<f64> {
        let rphi: Vec<f64> = phi.iter().zip(&self.r).map(|(p, r)| p * r).collect();
        self.incidence
            .matvec_transpose(&rphi)
            .into_iter()
            .zip(&self.c)
            .map(|(v, c)| v / c)
            .collect()
    }
}

/// `|⟨df, φ⟩_E - ⟨f, δφ⟩_V|`.
pub fn check_adjointness(g: &WeightedGraph, f: &Cochain0, phi: &Cochain1) -> Result<f64> {
    let lhs = inner1(g, &d(g, f), phi)?;
    let rhs = inner0(g, f, &delta(g, phi))?;
    Ok((lhs - rhs).abs())
}

/// Edgewise `d(fg)(e) - [f(e⁺) dg(e) + g(e⁻) df(e)]`.
pub fn derivation_d(g: &WeightedGraph, f: &Cochain0, h: &Cochain0) -> Result<Cochain1> {
    let lhs = d(g, &f.try_mul(h)?);
    let (df, dh) = (d(g, f), d(g, h));
    let values = g
        .canonical_edges()
        .map(|e| {
            lhs.get(e.edge) - (f.get(e.head) * dh.get(e.edge) + h.get(e.tail) * df.get(e.edge))
        })
        .collect();
    Cochain1::from_values(g, values)
}

/// Vertexwise `δ(f̄φ)(x) - [f(x) δφ(x) - (1/2c(x)) Σ_{e⁺=x} r(e) df(e) φ(e)]`.
pub fn derivation_delta(g: &WeightedGraph, f: &Cochain0, phi: &Cochain1) -> Result<Cochain0> {
    let lhs = delta(g, &phi.try_mul_scalar(&mean_value(g, f))?);
    let dphi = delta(g, phi);
    let df = d(g, f);
    let values = g
        .vertices()
        .map(|x| {
            let s: f64 = g
                .emanating(x)
                .iter()
                .map(|e| {
                    let incoming = e.reversed();
                    g.r(incoming.edge) * df.eval(incoming) * phi.eval(incoming)
                })
                .sum();
            lhs.get(x) - (f.get(x) * dphi.get(x) - s / (2.0 * g.c(x)))
        })
        .collect();
    Cochain0::from_values(g, values)
}

/// `[χ, d] f (e) = -½ dχ(e) df(e) - f(e⁻) dχ(e)`.
pub fn commutator_chi_d(g: &WeightedGraph, cut: &Cutoff, f: &Cochain0) -> Cochain1 {
    let df = d(g, f);
    let values = g
        .canonical_edges()
        .map(|e| {
            let dc = cut.dchi.get(e.edge);
            -0.5 * dc * df.get(e.edge) - f.get(e.tail) * dc
        })
        .collect();
    Cochain1::from_values(g, values).expect("edge count")
}

/// `[χ, δ] φ (x) = (1/2c(x)) Σ_{e⁺=x} r(e) dχ(e) φ(e)`.
pub fn commutator_chi_delta(g: &WeightedGraph, cut: &Cutoff, phi: &Cochain1) -> Cochain0 {
    let values = g
        .vertices()
        .map(|x| {
            let s: f64 = g
                .emanating(x)
                .iter()
                .map(|e| {
                    let incoming = e.reversed();
                    g.r(incoming.edge) * cut.dchi.eval(incoming) * phi.eval(incoming)
                })
                .sum();
            s / (2.0 * g.c(x))
        })
        .collect();
    Cochain0::from_values(g, values).expect("vertex count")
}

/// `χ̄·df - d(χf)`, the commutator straight from its definition.
pub fn commutator_chi_d_direct(g: &WeightedGraph, cut: &Cutoff, f: &Cochain0) -> Result<Cochain1> {
    let lhs = d(g, f).try_mul_scalar(&cut.chibar)?;
    lhs.try_sub(&d(g, &cut.chi.try_mul(f)?))
}

/// `χ·δφ - δ(χ̄φ)`.
pub fn commutator_chi_delta_direct(
    g: &WeightedGraph,
    cut: &Cutoff,
    phi: &Cochain1,
) -> Result<Cochain0> {
    let lhs = cut.chi.try_mul(&delta(g, phi))?;
    lhs.try_sub(&delta(g, &phi.try_mul_scalar(&cut.chibar)?))
}

pub fn random_cochain0<R: Rng>(g: &WeightedGraph, rng: &mut R) -> Cochain0 {
    let v = (0..g.vertex_count())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    Cochain0::from_values(g, v).expect("vertex count")
}

pub fn random_cochain1<R: Rng>(g: &WeightedGraph, rng: &mut R) -> Cochain1 {
    let v = (0..g.edge_count())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    Cochain1::from_values(g, v).expect("edge count")
}

pub fn random_section<R: Rng>(g: &WeightedGraph, rng: &mut R) -> Section {
    Section {
        f: random_cochain0(g, rng),
        phi: random_cochain1(g, rng),
    }
}

/// Largest residual of each identity over a batch of random inputs.
#[derive(Debug, Clone, Default, Serialize)]
pub struct IdentityResiduals {
    pub trials: usize,
    /// `|⟨df,φ⟩ - ⟨f,δφ⟩| / (1 + ‖f‖‖φ‖)`
    pub adjointness: f64,
    /// `|⟨Dσ,τ⟩ - ⟨σ,Dτ⟩| / (1 + ‖σ‖‖τ‖)`
    pub symmetry: f64,
    pub derivation_d: f64,
    pub derivation_delta: f64,
    pub commutator_d: f64,
    pub commutator_delta: f64,
    /// summation formula for `δ` against `C⁻¹BᵀRφ`
    pub delta_matrix: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        [
            self.adjointness,
            self.symmetry,
            self.derivation_d,
            self.derivation_delta,
            self.commutator_d,
            self.commutator_delta,
            self.delta_matrix,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn merge(&mut self, other: &Self) {
        self.trials += other.trials;
        self.adjointness = self.adjointness.max(other.adjointness);
        self.symmetry = self.symmetry.max(other.symmetry);
        self.derivation_d = self.derivation_d.max(other.derivation_d);
        self.derivation_delta = self.derivation_delta.max(other.derivation_delta);
        self.commutator_d = self.commutator_d.max(other.commutator_d);
        self.commutator_delta = self.commutator_delta.max(other.commutator_delta);
        self.delta_matrix = self.delta_matrix.max(other.delta_matrix);
    }
}

/// Runs every identity `trials` times on `g` with random cochains and a
/// random cutoff set.
pub fn identity_suite<R: Rng>(
    g: &WeightedGraph,
    trials: usize,
    rng: &mut R,
) -> Result<IdentityResiduals> {
    let mats = OperatorMatrices::new(g);
    let mut out = IdentityResiduals {
        trials,
        ..Default::default()
    };
    for _ in 0..trials {
        let f = random_cochain0(g, rng);
        let h = random_cochain0(g, rng);
        let phi = random_cochain1(g, rng);
        let (s, t) = (random_section(g, rng), random_section(g, rng));
        let k = VertexSet::new(g.vertices().filter(|_| rng.random_bool(0.3)));
        let cut = crate::cochain::cutoff(g, &k)?;

        let scale = 1.0 + crate::cochain::norm0(g, &f)? * crate::cochain::norm1(g, &phi)?;
        out.adjointness = out
            .adjointness
            .max(check_adjointness(g, &f, &phi)? / scale);

        let lhs = inner_section(g, &gauss_bonnet(g, &s), &t)?;
        let rhs = inner_section(g, &s, &gauss_bonnet(g, &t))?;
        let scale = 1.0
            + crate::cochain::norm_section(g, &s)? * crate::cochain::norm_section(g, &t)?;
        out.symmetry = out.symmetry.max((lhs - rhs).abs() / scale);

        out.derivation_d = out.derivation_d.max(derivation_d(g, &f, &h)?.max_abs());
        out.derivation_delta = out
            .derivation_delta
            .max(derivation_delta(g, &f, &phi)?.max_abs());
        out.commutator_d = out.commutator_d.max(
            commutator_chi_d(g, &cut, &f)
                .try_sub(&commutator_chi_d_direct(g, &cut, &f)?)?
                .max_abs(),
        );
        out.commutator_delta = out.commutator_delta.max(
            commutator_chi_delta(g, &cut, &phi)
                .try_sub(&commutator_chi_delta_direct(g, &cut, &phi)?)?
                .max_abs(),
        );
        let fast = mats.delta(phi.values());
        let slow = delta(g, &phi);
        let gap = fast
            .iter()
            .zip(slow.values())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        out.delta_matrix = out.delta_matrix.max(gap);
    }
    Ok(out)
}
