use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gblab::families::{FamilySpec, WeightScheme};
use gblab::lab::URule;
use gblab::spectral::NormConvention;
use gblab_cli::{
    cmd_graph, cmd_identities, cmd_probe, cmd_witness, parse_radii, CliError, ExperimentConfig, Result, Task,
};

#[derive(Parser)]
#[command(name = "gblab", version, about = "Gauss-Bonnet operator experiments on graph truncations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a family over radii and write CSV + JSON
    Probe(Common),
    /// Check operator identities on random cochains
    Identities(Common),
    /// Export a test flow or a kernel basis as JSON
    Witness(Common),
    /// Export a truncation in the JSON graph format
    Graph(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config file; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// family name: line, ray, grid2, grid3, triadic, tree3, star-like
    #[arg(long)]
    family: Option<String>,
    /// JSON graph file used instead of a family
    #[arg(long)]
    graph_file: Option<PathBuf>,
    /// origin vertex of --graph-file
    #[arg(long)]
    origin: Option<usize>,
    /// radii as A..B (inclusive) or a comma list
    #[arg(long)]
    radii: Option<String>,
    /// nonparabolicity, capacity or kernel (probe only)
    #[arg(long)]
    probe: Option<String>,
    /// output stem; .csv/.json are appended
    #[arg(long)]
    out: Option<PathBuf>,
    /// residual bound for identities, zero tolerance for probes
    #[arg(long)]
    tol: Option<f64>,
    /// worker threads; falls back to GBLAB_THREADS
    #[arg(long)]
    threads: Option<usize>,
    /// number of rays for star-like graphs
    #[arg(long)]
    rays: Option<usize>,
    /// children per vertex for trees
    #[arg(long)]
    branching: Option<usize>,
    #[arg(long)]
    k_radius: Option<usize>,
    /// boundary_pair, outward_pair or vertex:N
    #[arg(long)]
    u_rule: Option<String>,
    #[arg(long)]
    buffer: Option<usize>,
    /// whole_graph or outside_k
    #[arg(long)]
    convention: Option<String>,
    /// simple or electrical
    #[arg(long)]
    weights: Option<String>,
    /// generations of the tree witness
    #[arg(short = 'M', long)]
    generations: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// record wall-clock time per row (makes CSV output run-dependent)
    #[arg(long)]
    timing: bool,
}

fn parse_enum<T: serde::de::DeserializeOwned>(what: &str, s: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_")))
        .map_err(|_| CliError::Invalid(format!("{what}: unknown value {s:?}")))
}

impl Common {
    fn config(&self, task: Option<Task>) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(f) = &self.family {
            cfg.family = FamilySpec::from_name(f)?;
        }
        match (&mut cfg.family, self.rays, self.branching) {
            (FamilySpec::StarLike { rays, .. }, Some(n), _) => *rays = n,
            (FamilySpec::Tree { branching }, _, Some(b)) => *branching = b,
            (_, None, None) => {}
            _ => return Err(CliError::Invalid("--rays/--branching do not apply to this family".into())),
        }
        if let Some(p) = &self.graph_file {
            cfg.graph_file = Some(p.clone());
            cfg.weights = WeightScheme::Explicit;
        }
        if let Some(o) = self.origin {
            cfg.origin = o;
        }
        if let Some(r) = &self.radii {
            cfg.radii = Some(parse_radii(r)?);
        }
        if let Some(p) = &self.probe {
            cfg.probe = p.parse()?;
        }
        if let Some(t) = task {
            cfg.probe = t;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
            cfg.solver.zero_tol = t;
        }
        if let Some(k) = self.k_radius {
            cfg.k_radius = Some(k);
        }
        if let Some(u) = &self.u_rule {
            cfg.u_rule = Some(u.parse::<URule>()?);
        }
        if let Some(b) = self.buffer {
            cfg.buffer = Some(b);
        }
        if let Some(c) = &self.convention {
            cfg.convention = parse_enum::<NormConvention>("convention", c)?;
        }
        if let Some(w) = &self.weights {
            cfg.weights = parse_enum::<WeightScheme>("weights", w)?;
        }
        if let Some(m) = self.generations {
            cfg.generations = Some(m);
        }
        if let Some(n) = self.trials {
            cfg.trials = n;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.timing |= self.timing;
        cfg.validate()?;
        Ok(cfg)
    }

    fn threads(&self) -> Result<Option<usize>> {
        if let Some(n) = self.threads {
            return Ok(Some(n));
        }
        match std::env::var("GBLAB_THREADS") {
            Ok(v) => v
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| CliError::Invalid(format!("GBLAB_THREADS: not a number: {v:?}"))),
            Err(_) => Ok(None),
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let (common, task) = match &cli.command {
        Command::Probe(c) => (c, None),
        Command::Identities(c) => (c, Some(Task::Identities)),
        Command::Witness(c) => (c, Some(Task::Witness)),
        Command::Graph(c) => (c, None),
    };
    let cfg = common.config(task)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.threads()? {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Invalid(format!("threads: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Probe(_) => {
            let out = cmd_probe(&cfg)?;
            if cfg.out.is_none() {
                print!("{}", out.csv);
            } else {
                eprintln!("verdict {}", out.result.verdict.as_str());
            }
            Ok(true)
        }
        Command::Identities(_) => {
            let summary = cmd_identities(&cfg)?;
            print!("{}", summary.render());
            Ok(summary.passed())
        }
        Command::Witness(_) => {
            let w = cmd_witness(&cfg)?;
            if cfg.out.is_none() {
                println!("{}", serde_json::to_string_pretty(&w)?);
            }
            Ok(true)
        }
        Command::Graph(_) => {
            let text = cmd_graph(&cfg)?;
            if cfg.out.is_none() {
                println!("{text}");
            }
            Ok(true)
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
