//! Radius sweeps over a family of truncations.

use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::capacity::classical_capacity;
use super::kernel::delta_kernel_outside;
use super::probe::{nonparabolicity_constant, ProbeOptions, ProbeReport};
use super::triadic::RootedTree;
use crate::error::{Error, Result};
use crate::families::{FamilySpec, Truncation, WeightScheme};
use crate::graph::{
    ball, combinatorial_neighborhood, distances_from, edge_boundary, vertex_boundary, EdgeSet, Region,
    VertexId, VertexSet, WeightedGraph,
};
use crate::spectral::gram::NormConvention;
use crate::spectral::rayleigh::SolverOptions;

/// How the test region `U` is placed relative to `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum URule {
    /// lowest-index edge leaving `K ∪ ∂K`, with its outer endpoint
    BoundaryPair,
    /// lowest-index vertex at the given hop distance from `K`
    Vertex { distance: usize },
    /// the two lowest outward edges at the lowest vertex of `∂K` (trees)
    OutwardPair,
}

impl FromStr for URule {
    type Err = Error;

    /// `boundary_pair`, `outward_pair` or `vertex:N`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase().replace('-', "_");
        match s.as_str() {
            "boundary_pair" | "boundary" => Ok(URule::BoundaryPair),
            "outward_pair" | "outward" => Ok(URule::OutwardPair),
            _ => s
                .strip_prefix("vertex:")
                .and_then(|d| d.parse().ok())
                .map(|distance| URule::Vertex { distance })
                .ok_or_else(|| Error::BadParameter(format!("unknown U rule {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    #[default]
    Nonparabolicity,
    Capacity,
    Kernel,
}

impl FromStr for ProbeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nonparabolicity" | "constant" => Ok(ProbeKind::Nonparabolicity),
            "capacity" => Ok(ProbeKind::Capacity),
            "kernel" => Ok(ProbeKind::Kernel),
            other => Err(Error::BadParameter(format!("unknown probe kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecayConfig {
    pub family: FamilySpec,
    pub weights: WeightScheme,
    pub radii: Vec<usize>,
    /// `K = ball(o, k_radius)`; family default when absent
    pub k_radius: Option<usize>,
    pub u_rule: Option<URule>,
    /// frontier buffer; `radius / 2` when absent
    pub buffer: Option<usize>,
    /// PASS needs every constant at or above this
    pub threshold: f64,
    /// slopes below this are read as decay
    pub decay_slope: f64,
    pub convention: NormConvention,
    pub solver: SolverOptions,
    pub probe: ProbeKind,
    pub timing: bool,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            family: FamilySpec::Tree { branching: 2 },
            weights: WeightScheme::Simple,
            radii: (3..=8).collect(),
            k_radius: None,
            u_rule: None,
            buffer: None,
            threshold: 1e-2,
            decay_slope: -0.1,
            convention: NormConvention::WholeGraph,
            solver: SolverOptions::default(),
            probe: ProbeKind::Nonparabolicity,
            timing: false,
        }
    }
}

impl DecayConfig {
    pub fn k_radius(&self) -> usize {
        self.k_radius.unwrap_or(match self.family {
            FamilySpec::Tree { .. } | FamilySpec::Ray => 0,
            _ => 1,
        })
    }

    pub fn u_rule(&self) -> URule {
        self.u_rule.unwrap_or(match self.family {
            FamilySpec::Tree { .. } => URule::OutwardPair,
            _ => URule::BoundaryPair,
        })
    }

    pub fn buffer(&self, radius: usize) -> usize {
        self.buffer.unwrap_or(radius / 2)
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayRow {
    pub family: String,
    pub radius: Option<usize>,
    #[serde(rename = "M")]
    pub m: Option<i64>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub kernel_dim: Option<usize>,
    pub slope: Option<f64>,
    pub verdict: Verdict,
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayResult {
    pub probe: ProbeKind,
    pub rows: Vec<DecayRow>,
    pub reports: Vec<ProbeReport>,
    /// least-squares slope of `log₂ C` against the radius; for capacities
    /// `log₂ C` against `log₂ N` over the upper half of the radii
    pub slope: Option<f64>,
    pub verdict: Verdict,
}

/// Places `U` next to `K` on `g`, rooted at `o` for tree rules.
pub fn place_u(g: &WeightedGraph, o: VertexId, k: &VertexSet, rule: URule) -> Result<Region> {
    match rule {
        URule::BoundaryPair => {
            let nb = combinatorial_neighborhood(g, k)?;
            let e = edge_boundary(g, &nb.vertices)?
                .iter()
                .next()
                .ok_or_else(|| Error::InvalidRegion("K ∪ ∂K has no boundary edge".into()))?;
            let (a, b) = g.endpoints(e);
            let outer = if nb.vertices.contains(a) { b } else { a };
            Ok(Region::new(VertexSet::new([outer]), EdgeSet::new([e])))
        }
        URule::Vertex { distance } => {
            if distance == 0 {
                return Err(Error::BadParameter("U vertex distance must be >= 1".into()));
            }
            let dist = distances_from(g, k.as_slice())?;
            let x = g
                .vertices()
                .find(|x| dist[x.0] == Some(distance))
                .ok_or_else(|| Error::InvalidRegion(format!("no vertex at distance {distance} from K")))?;
            Ok(Region::from_vertices(VertexSet::new([x])))
        }
        URule::OutwardPair => {
            let tree = RootedTree::new(g, o)?;
            let x = vertex_boundary(g, k)?
                .iter()
                .next()
                .ok_or_else(|| Error::InvalidRegion("K has empty vertex boundary".into()))?;
            let kids = tree.children(x);
            if kids.len() < 2 {
                return Err(Error::InvalidRegion(format!("vertex {} has fewer than two children", x.0)));
            }
            let edges = kids[..2]
                .iter()
                .map(|&y| g.find_edge(x, y).expect("tree edge").edge);
            Ok(Region::from_edges(EdgeSet::new(edges)))
        }
    }
}

/// Generations available beyond `U`: hop distance from `U` to the frontier
/// minus one.
fn depth_beyond(report: &ProbeReport) -> Option<i64> {
    report.diagnostics.frontier_distance.map(|d| d as i64 - 1)
}

/// Nonparabolicity probe on one graph with origin `o`.
pub fn probe_graph(
    g: &WeightedGraph,
    o: VertexId,
    family: &str,
    radius: Option<usize>,
    cfg: &DecayConfig,
) -> Result<ProbeReport> {
    let k = ball(g, o, cfg.k_radius())?;
    let u = place_u(g, o, &k, cfg.u_rule())?;
    let opts = ProbeOptions {
        buffer: radius.map_or(cfg.buffer.unwrap_or(0), |r| cfg.buffer(r)),
        convention: cfg.convention,
        solver: cfg.solver,
    };
    let mut rep = nonparabolicity_constant(g, &k, &u, &opts)?;
    rep.family = family.to_string();
    rep.radius = radius;
    rep.depth = depth_beyond(&rep);
    Ok(rep)
}

struct Measured {
    row: DecayRow,
    report: Option<ProbeReport>,
    kernel_meets_u: bool,
}

fn measure(cfg: &DecayConfig, t: &Truncation, family: &str, radius: Option<usize>) -> Result<Measured> {
    let start = Instant::now();
    let mut row = DecayRow {
        family: family.to_string(),
        radius,
        m: None,
        c: None,
        kernel_dim: None,
        slope: None,
        verdict: Verdict::Inconclusive,
        wall_ms: None,
    };
    let mut report = None;
    let mut meets = false;
    match cfg.probe {
        ProbeKind::Nonparabolicity => {
            let rep = probe_graph(&t.graph, t.origin, family, radius, cfg)?;
            row.m = rep.depth;
            row.c = Some(rep.constant);
            row.kernel_dim = Some(rep.kernel_dim);
            meets = rep.kernel_meets_u;
            report = Some(rep);
        }
        ProbeKind::Capacity => {
            let n = radius.ok_or_else(|| Error::BadParameter("capacity probe needs a radius".into()))?;
            row.c = Some(classical_capacity(&t.graph, t.origin, n)?);
        }
        ProbeKind::Kernel => {
            let k = ball(&t.graph, t.origin, cfg.k_radius())?;
            row.kernel_dim = Some(delta_kernel_outside(&t.graph, &k, cfg.convention)?.dimension);
        }
    }
    if cfg.timing {
        row.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(Measured {
        row,
        report,
        kernel_meets_u: meets,
    })
}

/// Least-squares slope of `y` against `x`; `None` with fewer than two
/// distinct abscissae.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

fn conclude(cfg: &DecayConfig, measured: &[Measured]) -> (Option<f64>, Verdict) {
    if cfg.probe == ProbeKind::Kernel {
        let any = measured.iter().any(|m| m.row.kernel_dim.unwrap_or(0) > 0);
        return (None, if any { Verdict::Fail } else { Verdict::Pass });
    }
    let points: Vec<(f64, f64)> = measured
        .iter()
        .filter_map(|m| Some((m.row.radius? as f64, m.row.c?)))
        .filter(|&(_, c)| c > 0.0)
        .map(|(r, c)| match cfg.probe {
            ProbeKind::Capacity => (r.log2(), c.log2()),
            _ => (r, c.log2()),
        })
        .collect();
    // capacities approach their limit like 1/N, so only the upper half of
    // the sweep says whether that limit is zero
    let slope = match cfg.probe {
        ProbeKind::Capacity => fit_slope(&points[points.len() / 2..]),
        _ => fit_slope(&points),
    };
    let min_c = measured
        .iter()
        .filter_map(|m| m.row.c)
        .fold(f64::INFINITY, f64::min);
    let certified = measured.iter().any(|m| m.kernel_meets_u) || min_c == 0.0;
    let verdict = if certified || slope.is_some_and(|s| s < cfg.decay_slope) {
        Verdict::Fail
    } else if min_c >= cfg.threshold {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    (slope, verdict)
}

/// Runs the configured probe at every radius. Radii are processed in
/// parallel and merged in input order.
pub fn probe_decay(cfg: &DecayConfig) -> Result<DecayResult> {
    if cfg.radii.is_empty() {
        return Err(Error::BadParameter("no radii given".into()));
    }
    if cfg.radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadParameter("radii must be strictly increasing".into()));
    }
    let family = cfg.family.name();
    let measured: Vec<Measured> = cfg
        .radii
        .par_iter()
        .map(|&r| {
            let t = cfg.family.truncate(r, cfg.weights)?;
            measure(cfg, &t, &family, Some(r))
        })
        .collect::<Result<_>>()?;
    Ok(finish(cfg, measured))
}

/// Single-graph variant of [`probe_decay`] for user-supplied graphs.
pub fn probe_single(cfg: &DecayConfig, t: &Truncation, family: &str, radius: Option<usize>) -> Result<DecayResult> {
    let measured = vec![measure(cfg, t, family, radius)?];
    Ok(finish(cfg, measured))
}

fn finish(cfg: &DecayConfig, measured: Vec<Measured>) -> DecayResult {
    let (slope, verdict) = conclude(cfg, &measured);
    let mut rows = Vec::with_capacity(measured.len());
    let mut reports = Vec::new();
    for m in measured {
        let mut row = m.row;
        row.slope = slope;
        row.verdict = verdict;
        rows.push(row);
        reports.extend(m.report);
    }
    DecayResult {
        probe: cfg.probe,
        rows,
        reports,
        slope,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        let pts: Vec<_> = (0..5).map(|i| (i as f64, 3.0 - 0.5 * i as f64)).collect();
        assert!((fit_slope(&pts).unwrap() + 0.5).abs() < 1e-14);
        assert_eq!(fit_slope(&pts[..1]), None);
    }

    #[test]
    fn rule_parsing() {
        assert_eq!("vertex:3".parse::<URule>().unwrap(), URule::Vertex { distance: 3 });
        assert_eq!("outward-pair".parse::<URule>().unwrap(), URule::OutwardPair);
        assert!("sideways".parse::<URule>().is_err());
    }

    #[test]
    fn line_boundary_pair_is_half() {
        let cfg = DecayConfig {
            family: FamilySpec::Line,
            radii: vec![6, 8, 11],
            ..Default::default()
        };
        let res = probe_decay(&cfg).unwrap();
        for row in &res.rows {
            assert!((row.c.unwrap() - 0.5f64.sqrt()).abs() < 1e-10);
        }
        assert_eq!(res.verdict, Verdict::Pass);
    }

    #[test]
    fn grid_fails_with_certificate() {
        let cfg = DecayConfig {
            family: FamilySpec::Grid { dim: 2 },
            radii: vec![6, 7],
            ..Default::default()
        };
        let res = probe_decay(&cfg).unwrap();
        assert_eq!(res.verdict, Verdict::Fail);
        assert!(res.reports.iter().all(|r| r.kernel_meets_u && r.constant == 0.0));
    }

    #[test]
    fn rejects_unsorted_radii() {
        let cfg = DecayConfig {
            radii: vec![5, 4],
            ..Default::default()
        };
        assert!(probe_decay(&cfg).is_err());
    }
}
