use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use corrcolor::cover::{self, random_cover, shifted_cycle_cover, validate_cover, CoverMode};
use corrcolor::first_moment::run_lb_experiment;
use corrcolor::graph::{self, Graph};
use corrcolor::io::{self, Label, Restriction};
use corrcolor::manifest::{manifest_path, RunManifest};
use corrcolor::nibble::{run_nibble, NibbleError, NotNice};
use corrcolor::solver::{
    count_colorings, first_violation, solve_exact, ColoringViolation, SolverConfig, SolverError,
    DEFAULT_NODE_BUDGET,
};
use corrcolor::{Coloring, Cover, NibbleParams, ReductState, Weighting};

#[derive(Parser)]
#[command(name = "corrcolor", version, about = "Correspondence coloring toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph.
    GenGraph(GenGraphArgs),
    /// Generate a random cover of a graph, or the shifted cover of an even cycle.
    GenCover(GenCoverArgs),
    /// Lift a list assignment to its canonical cover.
    Lift(LiftArgs),
    /// Decide or count colorings of a cover.
    Solve(SolveArgs),
    /// Sample random covers and compare against the first-moment bound.
    LbExperiment(LbArgs),
    /// Run the nibble on a triangle-free graph.
    Nibble(NibbleArgs),
    /// Weight statistics of a weighted cover.
    Stats(StatsArgs),
    /// Check a cover, and optionally a coloring of it.
    Validate(ValidateArgs),
}

#[derive(Args, Serialize)]
struct Output {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Manifest path (default: next to --out).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct GenGraphArgs {
    #[command(subcommand)]
    kind: GraphKind,
    #[command(flatten)]
    #[serde(skip)]
    output: Output,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
enum GraphKind {
    Cycle {
        #[arg(long)]
        n: usize,
    },
    Path {
        #[arg(long)]
        n: usize,
    },
    Complete {
        #[arg(long)]
        n: usize,
    },
    Bipartite {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
    Star {
        #[arg(long)]
        leaves: usize,
    },
    Petersen,
    Regular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        triangle_free: bool,
    },
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        triangle_free: bool,
    },
}

#[derive(Args, Serialize)]
struct GenCoverArgs {
    #[arg(long, required_unless_present = "shifted_cycle")]
    graph: Option<PathBuf>,
    #[arg(long, required_unless_present = "shifted_cycle")]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep each pair of the perfect matching with this probability.
    #[arg(long)]
    bernoulli: Option<f64>,
    /// Shifted cover of the cycle of this even length (k = 2).
    #[arg(long, conflicts_with_all = ["graph", "k", "bernoulli"])]
    shifted_cycle: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    output: Output,
}

#[derive(Args, Serialize)]
struct LiftArgs {
    #[arg(long)]
    graph: PathBuf,
    /// JSON array with one array of labels (integers or strings) per vertex.
    #[arg(long)]
    lists: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    output: Output,
}

#[derive(Args, Serialize)]
struct SolveArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    cover: PathBuf,
    /// Count all colorings instead of finding one.
    #[arg(long, conflicts_with = "restrict")]
    count: bool,
    /// JSON array of allowed color ids per vertex.
    #[arg(long)]
    restrict: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
    #[command(flatten)]
    #[serde(skip)]
    output: Output,
}

#[derive(Args, Serialize)]
struct LbArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    bernoulli: Option<f64>,
    /// Write the first non-colorable cover found.
    #[arg(long)]
    witness_out: Option<PathBuf>,
    /// Write per-trial counts as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
    #[command(flatten)]
    #[serde(skip)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Preset {
    Theory,
    Relaxed,
}

#[derive(Args, Serialize)]
struct NibbleArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    cover: PathBuf,
    #[arg(long, value_enum, default_value_t = Preset::Relaxed)]
    preset: Preset,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trajectory CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    ck: Option<f64>,
    #[arg(long)]
    phat_exp: Option<f64>,
    #[arg(long)]
    alpha_scale: Option<f64>,
    #[arg(long)]
    tolerance_scale: Option<f64>,
    #[arg(long)]
    niceness_target: Option<f64>,
    #[arg(long)]
    schedule_slack_scale: Option<f64>,
    #[arg(long)]
    max_retries: Option<usize>,
    #[arg(long)]
    max_final_retries: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    output: Output,
}

#[derive(Args, Serialize)]
struct StatsArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    cover: PathBuf,
    /// JSON `{"p_hat": .., "p": [..]}` with one weight per color id.
    #[arg(long)]
    weights: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    output: Output,
}

#[derive(Args, Serialize)]
struct ValidateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    cover: PathBuf,
    /// JSON `{"chosen": [..]}`.
    #[arg(long)]
    coloring: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    output: Output,
}

/// Exit 1 for domain outcomes, 2 for malformed input.
enum Failure {
    Domain(String),
    Malformed(String),
}

impl From<io::IoError> for Failure {
    fn from(e: io::IoError) -> Self {
        Failure::Malformed(e.to_string())
    }
}

type Outcome = Result<ExitCode, Failure>;

fn malformed(e: impl std::fmt::Display) -> Failure {
    Failure::Malformed(e.to_string())
}

fn emit(out: &Output, text: &str) -> Result<(), Failure> {
    match &out.out {
        Some(path) => io::write_text(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Writes the manifest to `--manifest`, else next to `--out`, else (for
/// experiments only) to stderr.
fn emit_manifest(out: &Output, manifest: &RunManifest, experiment: bool) -> Result<(), Failure> {
    let path = out
        .manifest
        .clone()
        .or_else(|| out.out.as_deref().map(manifest_path));
    match path {
        Some(p) => io::write_json(&p, manifest)?,
        None if experiment => eprint!("{}", io::to_json(manifest)),
        None => {}
    }
    Ok(())
}

fn manifest_for<A: Serialize>(command: &str, args: &A, seed: Option<u64>) -> RunManifest {
    RunManifest::new(
        command,
        serde_json::to_value(args).expect("arguments serialize"),
        seed,
    )
}

fn read_cover(path: &Path) -> Result<Cover, Failure> {
    Ok(io::read_json(path)?)
}

fn require_valid_cover(g: &Graph, c: &Cover) -> Result<(), Failure> {
    let report = validate_cover(g, c);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(Failure::Malformed(format!(
            "cover does not fit the graph: {v} ({} violation(s); run `validate` for the list)",
            report.violations.len()
        ))),
    }
}

fn gen_graph(a: GenGraphArgs) -> Outcome {
    let g = match a.kind {
        GraphKind::Cycle { n } => graph::cycle(n).map_err(malformed)?,
        GraphKind::Path { n } => graph::path(n),
        GraphKind::Complete { n } => graph::complete(n),
        GraphKind::Bipartite { a, b } => graph::complete_bipartite(a, b),
        GraphKind::Star { leaves } => graph::star(leaves),
        GraphKind::Petersen => graph::petersen(),
        GraphKind::Regular {
            n,
            d,
            seed,
            triangle_free,
        } => graph::random_regular(n, d, seed, triangle_free).map_err(|e| match e {
            graph::GraphError::AttemptsExhausted(_) => Failure::Domain(e.to_string()),
            _ => malformed(e),
        })?,
        GraphKind::Gnp {
            n,
            p,
            seed,
            triangle_free,
        } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Failure::Malformed(format!("--p must lie in [0, 1], got {p}")));
            }
            if triangle_free {
                graph::random_triangle_free(n, p, seed)
            } else {
                graph::gnp(n, p, seed)
            }
        }
    };
    let seed = match a.kind {
        GraphKind::Regular { seed, .. } | GraphKind::Gnp { seed, .. } => Some(seed),
        _ => None,
    };
    emit(&a.output, &io::to_json(&g))?;
    emit_manifest(&a.output, &manifest_for("gen-graph", &a, seed), false)?;
    Ok(ExitCode::SUCCESS)
}

fn gen_cover(a: GenCoverArgs) -> Outcome {
    let mut manifest = manifest_for("gen-cover", &a, Some(a.seed));
    let c = if let Some(m) = a.shifted_cycle {
        shifted_cycle_cover(m).map_err(malformed)?
    } else {
        let path = a.graph.as_deref().expect("clap enforces --graph");
        let g = io::read_graph(path)?;
        manifest.add_input("graph", path)?;
        let mode = match a.bernoulli {
            Some(q) => CoverMode::Bernoulli(q),
            None => CoverMode::Perfect,
        };
        let k = a.k.expect("clap enforces --k");
        if k == 0 {
            return Err(Failure::Malformed("--k must be at least 1".into()));
        }
        random_cover(&g, k, a.seed, mode).map_err(malformed)?
    };
    emit(&a.output, &io::to_json(&c))?;
    emit_manifest(&a.output, &manifest, false)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct LiftDoc<'a> {
    cover: &'a Cover,
    /// Label of each color id.
    labels: &'a [Label],
}

fn lift(a: LiftArgs) -> Outcome {
    let g = io::read_graph(&a.graph)?;
    let lists: Vec<Vec<Label>> = io::read_json(&a.lists)?;
    if lists.len() != g.n() {
        return Err(Failure::Malformed(format!(
            "{} lists for {} vertices",
            lists.len(),
            g.n()
        )));
    }
    let l = cover::lift_from_lists(&g, &lists);
    emit(
        &a.output,
        &io::to_json(&LiftDoc {
            cover: &l.cover,
            labels: &l.labels,
        }),
    )?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum SolveStatus {
    Colorable,
    NotColorable,
    BudgetExceeded,
}

#[derive(Serialize)]
struct SolveReport {
    status: SolveStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    coloring: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    count: Option<u64>,
    nodes_explored: u64,
}

fn solve(a: SolveArgs) -> Outcome {
    let g = io::read_graph(&a.graph)?;
    let c = read_cover(&a.cover)?;
    require_valid_cover(&g, &c)?;
    let cfg = SolverConfig {
        node_budget: a.node_budget,
    };
    let restrict: Option<Restriction> = a.restrict.as_deref().map(io::read_json).transpose()?;
    let result = if a.count {
        count_colorings(&g, &c, cfg).map(|o| SolveReport {
            status: if o.count > 0 {
                SolveStatus::Colorable
            } else {
                SolveStatus::NotColorable
            },
            coloring: None,
            count: Some(o.count),
            nodes_explored: o.nodes_explored,
        })
    } else {
        solve_exact(&g, &c, restrict.as_deref(), cfg).map(|o| SolveReport {
            status: if o.coloring.is_some() {
                SolveStatus::Colorable
            } else {
                SolveStatus::NotColorable
            },
            coloring: o.coloring.map(|c| c.chosen),
            count: None,
            nodes_explored: o.nodes_explored,
        })
    };
    let (report, code) = match result {
        Ok(r) => (r, ExitCode::SUCCESS),
        Err(SolverError::BudgetExceeded { budget }) => (
            SolveReport {
                status: SolveStatus::BudgetExceeded,
                coloring: None,
                count: None,
                nodes_explored: budget,
            },
            ExitCode::from(1),
        ),
        Err(e @ SolverError::Malformed(_)) => return Err(malformed(e)),
    };
    emit(&a.output, &io::to_json(&report))?;
    Ok(code)
}

fn lb_experiment(a: LbArgs) -> Outcome {
    let g = io::read_graph(&a.graph)?;
    let mut manifest = manifest_for("lb-experiment", &a, Some(a.seed));
    manifest.add_input("graph", &a.graph)?;
    let mode = match a.bernoulli {
        Some(q) if !(0.0..=1.0).contains(&q) => {
            return Err(Failure::Malformed(format!("--bernoulli must lie in [0, 1], got {q}")))
        }
        Some(q) => CoverMode::Bernoulli(q),
        None => CoverMode::Perfect,
    };
    let cfg = SolverConfig {
        node_budget: a.node_budget,
    };
    let outcome = run_lb_experiment(&g, a.k, a.trials, a.seed, mode, cfg).map_err(malformed)?;
    if let Some(path) = &a.witness_out {
        match &outcome.witness {
            Some(w) => io::write_json(path, w)?,
            None => eprintln!("no non-colorable cover found; {} not written", path.display()),
        }
    }
    if let Some(path) = &a.csv {
        io::write_text(path, &io::trials_csv(&outcome.trials))?;
    }
    emit(&a.output, &io::to_json(&outcome.report))?;
    emit_manifest(&a.output, &manifest, true)?;
    Ok(ExitCode::SUCCESS)
}

fn nibble(a: NibbleArgs) -> Outcome {
    let g = io::read_graph(&a.graph)?;
    let c = read_cover(&a.cover)?;
    let mut manifest = manifest_for("nibble", &a, Some(a.seed));
    manifest.add_input("graph", &a.graph)?;
    manifest.add_input("cover", &a.cover)?;
    let mut p = match a.preset {
        Preset::Theory => NibbleParams::theory(),
        Preset::Relaxed => NibbleParams::relaxed(),
    };
    macro_rules! set {
        ($($field:ident <- $flag:expr),*) => {
            $(if let Some(v) = $flag { p.$field = v; })*
        };
    }
    set!(
        ck <- a.ck,
        phat_exp <- a.phat_exp,
        alpha_scale <- a.alpha_scale,
        tolerance_scale <- a.tolerance_scale,
        niceness_target <- a.niceness_target,
        schedule_slack_scale <- a.schedule_slack_scale,
        max_retries_per_step <- a.max_retries,
        max_final_retries <- a.max_final_retries
    );
    let report = match run_nibble(&g, &c, &p, a.seed) {
        Ok(r) => r,
        Err(e @ (NibbleError::BadParams(_) | NibbleError::BadCover(_) | NibbleError::BadWeighting(_))) => {
            return Err(malformed(e))
        }
        Err(e) => return Err(Failure::Domain(e.to_string())),
    };
    if let Some(path) = &a.trace {
        io::write_text(path, &io::trajectory_csv(&report.trajectory))?;
    }
    emit(&a.output, &io::to_json(&report))?;
    emit_manifest(&a.output, &manifest, true)?;
    Ok(if report.succeeded() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[derive(Serialize)]
struct VertexStats {
    vertex: usize,
    p: f64,
    p_m: f64,
    q: f64,
    capped: usize,
}

#[derive(Serialize)]
struct EdgeStats {
    u: usize,
    v: usize,
    p: f64,
    p_m: f64,
}

#[derive(Serialize)]
struct StatsReport {
    vertices: Vec<VertexStats>,
    edges: Vec<EdgeStats>,
    /// Largest δ for which the weighting is nice, or null.
    nice: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    not_nice: Option<NotNice<f64>>,
}

fn stats(a: StatsArgs) -> Outcome {
    let g = io::read_graph(&a.graph)?;
    let c = read_cover(&a.cover)?;
    require_valid_cover(&g, &c)?;
    let w: Weighting = io::read_json(&a.weights)?;
    let w = Weighting::new(w.values().to_vec(), w.p_hat()).map_err(malformed)?;
    let s = ReductState::new(g.clone().into(), c.into(), w).map_err(malformed)?;
    let vertices = (0..g.n())
        .map(|v| VertexStats {
            vertex: v,
            p: s.vertex_mass(v),
            p_m: s.moderate_mass(v),
            q: s.entropy(v),
            capped: s.capped_count(v),
        })
        .collect();
    let edges = g
        .edges()
        .iter()
        .map(|&(u, v)| EdgeStats {
            u,
            v,
            p: s.edge_mass(u, v),
            p_m: s.moderate_edge_mass(u, v),
        })
        .collect();
    let (nice, not_nice) = match s.check_nice() {
        Ok(d) => (Some(d), None),
        Err(r) => (None, Some(r)),
    };
    let report = StatsReport {
        vertices,
        edges,
        nice,
        not_nice,
    };
    emit(&a.output, &io::to_json(&report))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ValidateReport {
    ok: bool,
    violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coloring_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coloring_violation: Option<ColoringViolation>,
}

fn validate(a: ValidateArgs) -> Outcome {
    let g = io::read_graph(&a.graph)?;
    let c = read_cover(&a.cover)?;
    let report = validate_cover(&g, &c);
    let mut out = ValidateReport {
        ok: report.is_ok(),
        violations: report.violations.iter().map(ToString::to_string).collect(),
        coloring_ok: None,
        coloring_violation: None,
    };
    if let Some(path) = &a.coloring {
        let col: Coloring = io::read_json(path)?;
        let v = first_violation(&g, &c, &col).map_err(malformed)?;
        out.coloring_ok = Some(v.is_none());
        out.coloring_violation = v;
    }
    emit(&a.output, &io::to_json(&out))?;
    let fine = out.ok && out.coloring_ok.unwrap_or(true);
    Ok(if fine { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("CORRCOLOR_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Malformed(format!("CORRCOLOR_THREADS must be a count, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(malformed)
}

fn run(cli: Cli) -> Outcome {
    configure_threads()?;
    match cli.command {
        Command::GenGraph(a) => gen_graph(a),
        Command::GenCover(a) => gen_cover(a),
        Command::Lift(a) => lift(a),
        Command::Solve(a) => solve(a),
        Command::LbExperiment(a) => lb_experiment(a),
        Command::Nibble(a) => nibble(a),
        Command::Stats(a) => stats(a),
        Command::Validate(a) => validate(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Malformed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
