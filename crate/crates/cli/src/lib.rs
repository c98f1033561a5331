//! Batch runner behind the `gblab` binary: configs, probes, identity
//! checks and witness export.

use std::fs;
use std::path::{Path, PathBuf};

use gblab::cochain::CochainJson;
use gblab::families::{FamilySpec, Truncation, WeightScheme};
use gblab::graph::{ball, Region, VertexId, WeightedGraph};
use gblab::lab::{
    csv_string, delta_kernel_outside, json_string, probe_decay, probe_single, triadic_witness, DecayConfig,
    DecayResult, ProbeKind, URule, Verdict,
};
use gblab::operators::{delta, identity_suite, IdentityResiduals};
use gblab::spectral::{NormConvention, SolverOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lab(#[from] gblab::Error),
    #[error("{path}: {source}")]
    Config {
        path: String,
        source: serde_json::Error,
    },
    #[error("config: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// What a run does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    #[default]
    Nonparabolicity,
    Capacity,
    Kernel,
    Identities,
    Witness,
}

impl std::str::FromStr for Task {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nonparabolicity" | "constant" => Ok(Task::Nonparabolicity),
            "capacity" => Ok(Task::Capacity),
            "kernel" => Ok(Task::Kernel),
            "identities" => Ok(Task::Identities),
            "witness" => Ok(Task::Witness),
            other => Err(CliError::Invalid(format!("unknown probe kind {other:?}"))),
        }
    }
}

/// One experiment, as read from a JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: FamilySpec,
    /// user graph; replaces `family` when set
    pub graph_file: Option<PathBuf>,
    /// origin vertex of a user graph
    pub origin: usize,
    pub probe: Task,
    /// family default from [`default_radii`] when absent
    pub radii: Option<Vec<usize>>,
    pub weights: WeightScheme,
    pub k_radius: Option<usize>,
    pub u_rule: Option<URule>,
    pub buffer: Option<usize>,
    pub threshold: f64,
    pub decay_slope: f64,
    pub convention: NormConvention,
    pub solver: SolverOptions,
    /// residual bound for the identity suite
    pub tol: f64,
    /// random trials per graph for the identity suite
    pub trials: usize,
    pub seed: u64,
    /// generations of the tree witness
    pub generations: Option<usize>,
    /// output stem; `.csv` and `.json` are appended
    pub out: Option<PathBuf>,
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let d = DecayConfig::default();
        Self {
            family: d.family,
            graph_file: None,
            origin: 0,
            probe: Task::Nonparabolicity,
            radii: None,
            weights: d.weights,
            k_radius: None,
            u_rule: None,
            buffer: None,
            threshold: d.threshold,
            decay_slope: d.decay_slope,
            convention: d.convention,
            solver: d.solver,
            tol: 1e-12,
            trials: 20,
            seed: 0,
            generations: None,
            out: None,
            timing: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str, path: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|source| CliError::Config {
            path: path.to_string(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&read(path)?, &path.display().to_string())
    }

    pub fn radii(&self) -> Vec<usize> {
        self.radii.clone().unwrap_or_else(|| default_radii(&self.family))
    }

    pub fn validate(&self) -> Result<()> {
        let radii = self.radii();
        if radii.is_empty() {
            return Err(CliError::Invalid("radii: empty".into()));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Invalid("radii: must be strictly increasing".into()));
        }
        if radii[0] == 0 {
            return Err(CliError::Invalid("radii: must be >= 1".into()));
        }
        for (name, v) in [("tol", self.tol), ("threshold", self.threshold), ("solver.cg_tol", self.solver.cg_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Invalid(format!("{name}: must be positive, got {v}")));
            }
        }
        if self.solver.zero_tol.is_nan() || self.solver.zero_tol <= 0.0 {
            return Err(CliError::Invalid("solver.zero_tol: must be positive".into()));
        }
        Ok(())
    }

    pub fn decay_config(&self) -> Result<DecayConfig> {
        let probe = match self.probe {
            Task::Nonparabolicity => ProbeKind::Nonparabolicity,
            Task::Capacity => ProbeKind::Capacity,
            Task::Kernel => ProbeKind::Kernel,
            other => return Err(CliError::Invalid(format!("probe: {other:?} is not a sweep"))),
        };
        Ok(DecayConfig {
            family: self.family.clone(),
            weights: self.weights,
            radii: self.radii(),
            k_radius: self.k_radius,
            u_rule: self.u_rule,
            buffer: self.buffer,
            threshold: self.threshold,
            decay_slope: self.decay_slope,
            convention: self.convention,
            solver: self.solver,
            probe,
            timing: self.timing,
        })
    }

    fn user_graph(&self) -> Result<Option<Truncation>> {
        let Some(path) = &self.graph_file else {
            return Ok(None);
        };
        let graph = load_graph(path)?;
        let origin = VertexId(self.origin);
        graph.check_vertex(origin)?;
        Ok(Some(Truncation { graph, origin }))
    }

    fn family_name(&self) -> String {
        match &self.graph_file {
            Some(p) => p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "graph".into()),
            None => self.family.name(),
        }
    }

    /// The graphs the identity suite and witnesses run on.
    fn graphs(&self) -> Result<Vec<(Option<usize>, Truncation)>> {
        if let Some(t) = self.user_graph()? {
            return Ok(vec![(None, t)]);
        }
        self.radii()
            .into_iter()
            .map(|r| Ok((Some(r), self.family.truncate(r, self.weights)?)))
            .collect()
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Radii at which every family member keeps `U` clear of the frontier
/// under the default placement rules.
pub fn default_radii(family: &FamilySpec) -> Vec<usize> {
    match family {
        FamilySpec::Tree { .. } => (3..=8).collect(),
        FamilySpec::Line | FamilySpec::Ray | FamilySpec::StarLike { .. } => (6..=12).collect(),
        FamilySpec::Grid { dim: 0..=2 } => (6..=10).collect(),
        FamilySpec::Grid { .. } => vec![6, 7],
    }
}

/// Reads a JSON graph file; empty and malformed files are rejected.
pub fn load_graph(path: &Path) -> Result<WeightedGraph> {
    let text = read(path)?;
    if text.trim().is_empty() {
        return Err(gblab::Error::Format(format!("{} is empty", path.display())).into());
    }
    Ok(WeightedGraph::from_json_str(&text)?)
}

/// Parses `A..B` (inclusive), `A..=B` or a comma list.
pub fn parse_radii(s: &str) -> Result<Vec<usize>> {
    let bad = || CliError::Invalid(format!("radii: cannot parse {s:?}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(num).collect()
}

fn with_suffix(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Output of [`cmd_probe`].
pub struct ProbeOutput {
    pub result: DecayResult,
    pub csv: String,
    pub json: String,
}

/// Runs a sweep and writes `<out>.csv` and `<out>.json` when an output
/// stem is configured.
pub fn cmd_probe(cfg: &ExperimentConfig) -> Result<ProbeOutput> {
    cfg.validate()?;
    let decay = cfg.decay_config()?;
    let result = match cfg.user_graph()? {
        Some(t) => probe_single(&decay, &t, &cfg.family_name(), None)?,
        None => probe_decay(&decay)?,
    };
    let csv = csv_string(&result.rows)?;
    let json = json_string(&result)?;
    if let Some(stem) = &cfg.out {
        write(&with_suffix(stem, "csv"), &csv)?;
        write(&with_suffix(stem, "json"), &json)?;
    }
    Ok(ProbeOutput { result, csv, json })
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityRow {
    pub family: String,
    pub radius: Option<usize>,
    pub vertices: usize,
    pub edges: usize,
    pub residuals: IdentityResiduals,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentitySummary {
    pub tol: f64,
    pub rows: Vec<IdentityRow>,
    pub total: IdentityResiduals,
    pub verdict: Verdict,
}

impl IdentitySummary {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let radius = r.radius.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
            s += &format!(
                "{} radius={} V={} E={} max_residual={:e}\n",
                r.family,
                radius,
                r.vertices,
                r.edges,
                r.residuals.max()
            );
        }
        let t = &self.total;
        s += &format!(
            "adjointness={:e} symmetry={:e} derivation_d={:e} derivation_delta={:e} \
             commutator_d={:e} commutator_delta={:e} delta_matrix={:e}\n",
            t.adjointness, t.symmetry, t.derivation_d, t.derivation_delta, t.commutator_d, t.commutator_delta,
            t.delta_matrix
        );
        s += &format!("{} (max {:e}, tol {:e})\n", self.verdict.as_str(), t.max(), self.tol);
        s
    }
}

/// Identity suite on every configured graph. Each graph gets its own seed
/// so the result does not depend on scheduling.
pub fn cmd_identities(cfg: &ExperimentConfig) -> Result<IdentitySummary> {
    cfg.validate()?;
    let family = cfg.family_name();
    let graphs = cfg.graphs()?;
    let rows: Vec<IdentityRow> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, (radius, t))| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
            Ok(IdentityRow {
                family: family.clone(),
                radius: *radius,
                vertices: t.graph.vertex_count(),
                edges: t.graph.edge_count(),
                residuals: identity_suite(&t.graph, cfg.trials, &mut rng)?,
            })
        })
        .collect::<Result<_>>()?;
    let mut total = IdentityResiduals::default();
    for r in &rows {
        total.merge(&r.residuals);
    }
    let verdict = if total.max() < cfg.tol { Verdict::Pass } else { Verdict::Fail };
    let summary = IdentitySummary {
        tol: cfg.tol,
        rows,
        total,
        verdict,
    };
    if let Some(stem) = &cfg.out {
        write(&with_suffix(stem, "json"), &serde_json::to_string_pretty(&summary)?)?;
    }
    Ok(summary)
}

/// Exported witness: a truncated tree flow or a basis of divergence-free
/// flows off `K`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessExport {
    Tree {
        family: String,
        radius: Option<usize>,
        #[serde(rename = "M")]
        m: usize,
        branching: usize,
        x_n: usize,
        u: Region,
        delta_norm: f64,
        u_norm: f64,
        ratio: f64,
        closed_form_ratio: f64,
        phi: CochainJson,
    },
    Kernel {
        family: String,
        radius: Option<usize>,
        k_radius: usize,
        dimension: usize,
        euler_count: usize,
        /// largest `|δφ|` over all basis elements and counted vertices
        max_abs_delta: f64,
        basis: Vec<CochainJson>,
    },
}

/// Generations needed beyond `x_n` so that `m` of them are interior.
fn tree_radius(m: usize) -> usize {
    m + 3
}

/// Tree families (or an explicit generation count) give the truncated flow;
/// everything else exports the divergence-free basis off `K`.
pub fn cmd_witness(cfg: &ExperimentConfig) -> Result<WitnessExport> {
    cfg.validate()?;
    let family = cfg.family_name();
    let tree = cfg.graph_file.is_none() && matches!(cfg.family, FamilySpec::Tree { .. });
    let export = match cfg.generations {
        Some(m) => tree_witness(cfg, &family, m)?,
        None if tree => tree_witness(cfg, &family, DEFAULT_GENERATIONS)?,
        None => kernel_witness(cfg, &family)?,
    };
    if let Some(stem) = &cfg.out {
        write(&with_suffix(stem, "json"), &serde_json::to_string_pretty(&export)?)?;
    }
    Ok(export)
}

const DEFAULT_GENERATIONS: usize = 6;

fn tree_witness(cfg: &ExperimentConfig, family: &str, m: usize) -> Result<WitnessExport> {
    if m == 0 {
        return Err(CliError::Invalid("generations: must be >= 1".into()));
    }
    let (radius, t) = match cfg.user_graph()? {
        Some(t) => (None, t),
        None => {
            let r = tree_radius(m);
            (Some(r), cfg.family.truncate(r, cfg.weights)?)
        }
    };
    let tree = gblab::lab::RootedTree::new(&t.graph, t.origin)?;
    let x_n = *tree
        .children(t.origin)
        .first()
        .ok_or_else(|| CliError::Invalid("origin has no children".into()))?;
    let w = triadic_witness(&t.graph, t.origin, x_n, m)?;
    Ok(WitnessExport::Tree {
        family: family.to_string(),
        radius,
        m,
        branching: w.branching,
        x_n: x_n.0,
        u: w.u.clone(),
        delta_norm: w.delta_norm_sq.sqrt(),
        u_norm: w.u_norm_sq.sqrt(),
        ratio: w.ratio,
        closed_form_ratio: w.closed_form_ratio,
        phi: w.phi.to_json(&t.graph),
    })
}

fn kernel_witness(cfg: &ExperimentConfig, family: &str) -> Result<WitnessExport> {
    let (radius, t) = cfg
        .graphs()?
        .pop()
        .ok_or_else(|| CliError::Invalid("radii: empty".into()))?;
    let k_radius = DecayConfig {
        family: cfg.family.clone(),
        k_radius: cfg.k_radius,
        ..Default::default()
    }
    .k_radius();
    let k = ball(&t.graph, t.origin, k_radius)?;
    let dk = delta_kernel_outside(&t.graph, &k, cfg.convention)?;
    let max_abs_delta = dk
        .basis
        .iter()
        .map(|phi| delta(&t.graph, phi).max_abs())
        .fold(0.0, f64::max);
    Ok(WitnessExport::Kernel {
        family: family.to_string(),
        radius,
        k_radius,
        dimension: dk.dimension,
        euler_count: dk.euler_count,
        max_abs_delta,
        basis: dk.basis.iter().map(|phi| phi.to_json(&t.graph)).collect(),
    })
}

/// JSON graph file of one family member.
pub fn cmd_graph(cfg: &ExperimentConfig) -> Result<String> {
    let (_, t) = cfg
        .graphs()?
        .pop()
        .ok_or_else(|| CliError::Invalid("radii: empty".into()))?;
    let text = t.graph.to_json_string()?;
    if let Some(stem) = &cfg.out {
        write(&with_suffix(stem, "json"), &text)?;
    }
    Ok(text)
}
