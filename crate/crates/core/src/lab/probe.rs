//! The non-parabolicity constant `C(U, K)` on a truncation.

use serde::Serialize;

use super::kernel::analyze_kernel;
use crate::cochain::{Section, SectionJson};
use crate::error::{Error, Result};
use crate::graph::{distances_from, induced_edges, FrontierKind, Region, VertexId, VertexSet, WeightedGraph};
use crate::operators::{d, delta};
use crate::spectral::gram::{assemble_d_gram, probe_masks, Admissibility, ConstraintMask, NormConvention};
use crate::spectral::rayleigh::{min_rayleigh_constrained, SolveMethod, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    /// minimum hop distance from `U` and `K` to the frontier
    pub buffer: usize,
    pub convention: NormConvention,
    pub solver: SolverOptions,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            buffer: 0,
            convention: NormConvention::WholeGraph,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeDiagnostics {
    pub method: SolveMethod,
    pub raw_value: f64,
    pub residual: f64,
    pub zero_mode: bool,
    pub numeric_kernel_dim: usize,
    pub admissible_coords: usize,
    pub components: usize,
    pub inner_residual: f64,
    pub frontier_distance: Option<usize>,
    pub buffer: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub family: String,
    pub radius: Option<usize>,
    /// generations available beyond `U` inside the truncation
    pub depth: Option<i64>,
    pub k: String,
    pub u: String,
    pub k_vertices: VertexSet,
    pub u_region: Region,
    /// `C(U, K)`
    pub constant: f64,
    /// dimension of the kernel of `D` on admissible sections
    pub kernel_dim: usize,
    /// some kernel element is nonzero on `U`; then `constant` is exactly 0
    pub kernel_meets_u: bool,
    pub convention: NormConvention,
    pub witness: SectionJson,
    pub diagnostics: ProbeDiagnostics,
    #[serde(skip)]
    pub witness_section: Section,
}

fn describe_vertices(k: &VertexSet) -> String {
    Region::from_vertices(k.clone()).describe()
}

fn region_vertices(g: &WeightedGraph, u: &Region) -> Vec<VertexId> {
    let mut v: Vec<VertexId> = u.vertices.iter().collect();
    for e in u.edges.iter() {
        let (a, b) = g.endpoints(e);
        v.push(a);
        v.push(b);
    }
    v
}

fn frontier_distance(g: &WeightedGraph, sources: &[VertexId]) -> Result<Option<usize>> {
    if !g.has_frontier() || sources.is_empty() {
        return Ok(None);
    }
    let dist = distances_from(g, sources)?;
    Ok(g.frontier().iter().filter_map(|x| dist[x.0]).min())
}

fn check_region(g: &WeightedGraph, k: &VertexSet, u: &Region) -> Result<()> {
    if u.is_empty() {
        return Err(Error::InvalidRegion("U is empty".into()));
    }
    u.vertices.iter().try_for_each(|x| g.check_vertex(x))?;
    u.edges.iter().try_for_each(|e| g.check_edge(e))?;
    if let Some(x) = u.vertices.iter().find(|&x| k.contains(x)) {
        return Err(Error::InvalidRegion(format!("vertex {} of U lies in K", x.0)));
    }
    let inner = induced_edges(g, k)?;
    if let Some(e) = u.edges.iter().find(|&e| inner.contains(e)) {
        return Err(Error::InvalidRegion(format!("edge {} of U lies in E_K", e.0)));
    }
    Ok(())
}

/// `C(U, K)²` as the minimum of `‖Dσ‖² / ‖σ‖²_U` over admissible sections.
pub fn nonparabolicity_constant(
    g: &WeightedGraph,
    k: &VertexSet,
    u: &Region,
    opts: &ProbeOptions,
) -> Result<ProbeReport> {
    let k = g.vertex_set(k.iter())?;
    check_region(g, &k, u)?;
    let u_vertices = region_vertices(g, u);
    // a sealed vertex carries no admissible coordinates at all
    if u_vertices.iter().any(|&x| g.frontier_kind(x) == Some(FrontierKind::Sealed)) {
        return Err(Error::FrontierContamination {
            what: "U",
            distance: 0,
            buffer: opts.buffer,
        });
    }
    let u_dist = frontier_distance(g, &u_vertices)?;
    if let Some(dist) = u_dist.filter(|&dd| dd < opts.buffer) {
        return Err(Error::FrontierContamination {
            what: "U",
            distance: dist,
            buffer: opts.buffer,
        });
    }
    let k_dist = frontier_distance(g, k.as_slice())?;
    if let Some(dist) = k_dist.filter(|&dd| dd < opts.buffer) {
        return Err(Error::FrontierContamination {
            what: "K",
            distance: dist,
            buffer: opts.buffer,
        });
    }

    let adm = probe_masks(g, &k, opts.convention)?;
    let q = assemble_d_gram(g, &adm)?;
    let mask = ConstraintMask::from_region(&q, g, u)?;
    let sol = min_rayleigh_constrained(&q, &mask, &opts.solver)?;
    let kernel = analyze_kernel(g, &adm);
    let certificate = kernel.element_meeting(g, u);
    let certified = certificate.is_some();

    let (constant, witness) = match certificate {
        Some(s) => {
            let scale = crate::cochain::norm_on(g, &s, u)?;
            (0.0, s.scaled(1.0 / scale))
        }
        None => (sol.value.sqrt(), q.section(g, &sol.witness)?),
    };
    Ok(ProbeReport {
        family: "custom".into(),
        radius: None,
        depth: None,
        k: describe_vertices(&k),
        u: u.describe(),
        k_vertices: k,
        u_region: u.clone(),
        constant,
        kernel_dim: kernel.dimension(),
        kernel_meets_u: certified,
        convention: opts.convention,
        witness: witness.to_json(g),
        diagnostics: ProbeDiagnostics {
            method: sol.method,
            raw_value: sol.raw_value,
            residual: sol.residual,
            zero_mode: sol.zero_mode,
            numeric_kernel_dim: sol.numeric_kernel_dim,
            admissible_coords: q.dim(),
            components: sol.components,
            inner_residual: sol.inner_residual,
            frontier_distance: u_dist,
            buffer: opts.buffer,
        },
        witness_section: witness,
    })
}

/// `‖Dσ‖_counted / ‖σ‖_U` evaluated straight from `d` and `δ`, for
/// re-checking an exported witness. Fails if `σ` is not admissible.
pub fn rayleigh_ratio(
    g: &WeightedGraph,
    k: &VertexSet,
    u: &Region,
    convention: NormConvention,
    s: &Section,
) -> Result<f64> {
    let adm = probe_masks(g, k, convention)?;
    check_admissible(g, &adm, s)?;
    let dphi = delta(g, &s.phi);
    let df = d(g, &s.f);
    let mut num = 0.0;
    for x in g.vertices() {
        if adm.counted_vertices[x.0] {
            num += g.c(x) * dphi.get(x).powi(2);
        }
    }
    for e in g.edge_ids() {
        if adm.counted_edges[e.0] {
            num += g.r(e) * df.get(e).powi(2);
        }
    }
    let den = crate::cochain::norm_on_squared(g, s, u)?;
    if den == 0.0 {
        return Err(Error::InvalidRegion("section vanishes on U".into()));
    }
    Ok((num / den).sqrt())
}

fn check_admissible(g: &WeightedGraph, adm: &Admissibility, s: &Section) -> Result<()> {
    s.f.belongs_to(g)?;
    s.phi.belongs_to(g)?;
    for x in g.vertices() {
        if !adm.admissible_vertex(x.0) && s.f.get(x) != 0.0 {
            return Err(Error::InvalidRegion(format!(
                "section is nonzero at inadmissible vertex {}",
                x.0
            )));
        }
    }
    for e in g.edge_ids() {
        if !adm.admissible_edge(e.0) && s.phi.get(e) != 0.0 {
            return Err(Error::InvalidRegion(format!(
                "section is nonzero on inadmissible edge {}",
                e.0
            )));
        }
    }
    Ok(())
}
