//! Command-line front end for the `gainwalk` library.
//!
//! Every subcommand writes either CSV (`t,p_0,...,p_{n-1}`, 17 significant
//! digits, LF line endings) or JSON carrying `"schema": "1"`.

pub mod alpha;
pub mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use gainwalk::hamiltonian::{binomial, sector_masks};
use gainwalk::spectral::DEFAULT_ZERO_THRESHOLD;
use gainwalk::{
    adjacency_matrix, charpoly, complete_family, cycle_family, directed_cycle, distribution_at,
    eigendecompose, gauge, lift_full, path_family, propagator, random_tree, time_series,
    transfer_probability, tree_gauge, zero_transfer_certificate, GainGraph, HermitianMatrix,
    PhaseMode, DEFAULT_CLUSTER_TOL,
};

pub use alpha::{parse_alpha_expr, parse_pi_expr};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "GAINWALK_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write output: {0}")]
    Stdout(#[source] std::io::Error),
    #[error("invalid graph: {0}")]
    Graph(#[from] gainwalk::GraphError),
    #[error("hamiltonian: {0}")]
    Hamiltonian(#[from] gainwalk::HamiltonianError),
    #[error("evolution: {0}")]
    Evolution(#[from] gainwalk::EvolutionError),
    #[error("spectral: {0}")]
    Spectral(#[from] gainwalk::SpectralError),
    #[error("gauge: {0}")]
    Gauge(#[from] gainwalk::GaugeError),
    #[error("malformed alpha or time expression {0:?}")]
    AlphaExpr(String),
    #[error("{0}")]
    Usage(String),
    #[error("invalid {THREADS_ENV}: {0}")]
    Threads(String),
}

#[derive(Debug, Parser)]
#[command(name = "gainwalk", version, about = "Chiral continuous-time quantum walks on gain graphs")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the site distribution of a walk on a uniform time grid (CSV).
    Simulate(SimulateArgs),
    /// Site distribution at a single time (one-row CSV).
    Distribution(DistributionArgs),
    /// Characteristic polynomial, ascending coefficients (JSON).
    Charpoly(GraphOnly),
    /// Zero-transfer certificate between two vertices (JSON).
    ZeroTransfer(ZeroTransferArgs),
    /// Diagonal gauge removing every phase of a forest (JSON).
    Gauge(GraphOnly),
    /// Check the two-body qubit lift of a graph Hamiltonian (JSON).
    LiftCheck(GraphOnly),
    /// Write a graph from one of the built-in families (graph JSON).
    Family(FamilyArgs),
    /// Run one walk per phase over a family and write one CSV per phase.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct GraphOnly {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub source: usize,
    /// Final time; accepts pi expressions such as `10pi`.
    #[arg(long, value_parser = time_arg)]
    pub t_max: f64,
    /// Number of samples, both ends included.
    #[arg(long)]
    pub steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistributionArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub source: usize,
    #[arg(long, value_parser = time_arg, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ZeroTransferArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub source: usize,
    #[arg(long)]
    pub target: usize,
    #[arg(long, default_value_t = DEFAULT_ZERO_THRESHOLD)]
    pub threshold: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Cycle,
    DirectedCycle,
    Complete,
    Path,
    Tree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhaseModeArg {
    Zero,
    Uniform,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    pub kind: FamilyKind,
    #[arg(long)]
    pub n: usize,
    /// Number of leading arcs carrying the phase (cycle only; default all).
    #[arg(long)]
    pub weighted_arcs: Option<usize>,
    #[arg(long, default_value = "0", value_parser = alpha_arg, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = PhaseModeArg::Uniform)]
    pub phase_mode: PhaseModeArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepFamily {
    Cycle,
    Complete,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: SweepFamily,
    #[arg(long)]
    pub n: usize,
    /// Cycle only: how many leading arcs carry the phase (default all).
    #[arg(long)]
    pub weighted_arcs: Option<usize>,
    /// Comma-separated phases, e.g. `pi/6,pi/3,2pi`.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub alphas: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub source: usize,
    /// Vertex whose peak probability is reported in the manifest.
    #[arg(long)]
    pub target: Option<usize>,
    #[arg(long, value_parser = time_arg)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Emit the distribution at this single time instead of a time series.
    #[arg(long, value_parser = time_arg, conflicts_with_all = ["t_max", "steps"])]
    pub at: Option<f64>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

fn time_arg(s: &str) -> Result<f64, String> {
    parse_pi_expr(s).map_err(|e| e.to_string())
}

fn alpha_arg(s: &str) -> Result<f64, String> {
    parse_alpha_expr(s).map_err(|e| e.to_string())
}

fn read_graph(path: &Path) -> Result<GainGraph, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(GainGraph::from_json(&text)?)
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        }),
        None => stdout.write_all(bytes).map_err(CliError::Stdout),
    }
}

fn emit_json(out: Option<&Path>, stdout: &mut dyn Write, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    emit(out, stdout, text.as_bytes())
}

/// Builds the worker pool, honouring [`THREADS_ENV`] when set.
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Threads(v.clone()))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Threads(e.to_string()))
}

/// Executes one command, writing to `--out` paths or to `stdout`.
pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let pool = thread_pool()?;
    let mut buffer = Vec::new();
    pool.install(|| dispatch(&config.command, &mut buffer))?;
    stdout.write_all(&buffer).map_err(CliError::Stdout)
}

fn dispatch(command: &Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Simulate(args) => simulate(args, stdout),
        Command::Distribution(args) => distribution(args, stdout),
        Command::Charpoly(args) => charpoly_cmd(args, stdout),
        Command::ZeroTransfer(args) => zero_transfer(args, stdout),
        Command::Gauge(args) => gauge_cmd(args, stdout),
        Command::LiftCheck(args) => lift_check(args, stdout),
        Command::Family(args) => family(args, stdout),
        Command::Sweep(args) => sweep(args, stdout),
    }
}

fn simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let g = read_graph(&args.graph)?;
    let spec = eigendecompose(&adjacency_matrix(&g), DEFAULT_CLUSTER_TOL)?;
    let ts = time_series(&spec, args.source, args.t_max, args.steps)?;
    emit(args.out.as_deref(), stdout, output::time_series_csv(&ts).as_bytes())
}

fn distribution(args: &DistributionArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let g = read_graph(&args.graph)?;
    let spec = eigendecompose(&adjacency_matrix(&g), DEFAULT_CLUSTER_TOL)?;
    let row = distribution_at(&spec, args.source, args.t)?;
    emit(
        args.out.as_deref(),
        stdout,
        output::rows_csv(g.n_vertices(), &[(args.t, row)]).as_bytes(),
    )
}

fn charpoly_cmd(args: &GraphOnly, stdout: &mut dyn Write) -> Result<(), CliError> {
    let g = read_graph(&args.graph)?;
    let p = charpoly(&adjacency_matrix(&g))?;
    let value = json!({
        "schema": "1",
        "n": g.n_vertices(),
        "coefficients": p.coefficients(),
    });
    emit_json(args.out.as_deref(), stdout, &value)
}

fn zero_transfer(args: &ZeroTransferArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let g = read_graph(&args.graph)?;
    let h = adjacency_matrix(&g);
    let spec = eigendecompose(&h, DEFAULT_CLUSTER_TOL)?;
    let cert = zero_transfer_certificate(&spec, &h, args.source, args.target, args.threshold)?;
    let value = json!({
        "schema": "1",
        "source": cert.source,
        "target": cert.target,
        "max_idempotent_entry": cert.max_idempotent_entry,
        "krylov_max": cert.krylov_max,
        "threshold": cert.threshold,
        "distinct_eigenvalues": spec.eigenvalues().len(),
        "verdict": cert.verdict.as_str(),
    });
    emit_json(args.out.as_deref(), stdout, &value)
}

/// Times at which the gauge command compares directed and undirected walks.
const GAUGE_CHECK_TIMES: [f64; 3] = [0.5, 2.0, 9.0];

fn gauge_cmd(args: &GraphOnly, stdout: &mut dyn Write) -> Result<(), CliError> {
    let g = read_graph(&args.graph)?;
    let d = tree_gauge(&g)?;
    let phases: Vec<[f64; 2]> = d.phases().iter().map(|z| [z.re, z.im]).collect();
    let value = json!({
        "schema": "1",
        "phases": phases,
        "residual": gauge::gauge_residual(&g, &d),
        "max_amplitude_deviation": gauge::verify_gauge_invariance(&g, &GAUGE_CHECK_TIMES)?,
    });
    emit_json(args.out.as_deref(), stdout, &value)
}

/// Largest qubit count for which lift-check also compares full walks.
const LIFT_WALK_MAX_QUBITS: usize = 6;

fn lift_check(args: &GraphOnly, stdout: &mut dyn Write) -> Result<(), CliError> {
    let g = read_graph(&args.graph)?;
    let m = adjacency_matrix(&g);
    let lifted = lift_full(&m)?;
    let n = g.n_vertices();
    let block = lifted.excitation_block(1)?;
    let sector_dims: Vec<usize> = (0..=n).map(|k| sector_masks(n, k).len()).collect();
    let dims_match = sector_dims
        .iter()
        .enumerate()
        .all(|(k, &d)| d == binomial(n, k));

    let walk_deviation = if n <= LIFT_WALK_MAX_QUBITS {
        Some(lift_walk_deviation(&m, &lifted, &GAUGE_CHECK_TIMES)?)
    } else {
        None
    };

    let value = json!({
        "schema": "1",
        "n_qubits": n,
        "dimension": lifted.dim(),
        "nonzeros": lifted.nnz(),
        "block_max_deviation": block.max_abs_diff(&m),
        "cross_sector_nonzeros": lifted.cross_sector_nonzeros(),
        "sector_dims": sector_dims,
        "sector_dims_match_binomial": dims_match,
        "walk_max_deviation": walk_deviation,
    });
    emit_json(args.out.as_deref(), stdout, &value)
}

/// Largest amplitude gap between the walk of `m` and the lifted walk
/// restricted to single-excitation states.
pub fn lift_walk_deviation(
    m: &HermitianMatrix,
    lifted: &gainwalk::LiftedHamiltonian,
    times: &[f64],
) -> Result<f64, CliError> {
    let full = HermitianMatrix::from_matrix(lifted.to_dense(), 1e-12)?;
    let small = eigendecompose(m, DEFAULT_CLUSTER_TOL)?;
    let big = eigendecompose(&full, DEFAULT_CLUSTER_TOL)?;
    let n = m.dim();
    let mut worst = 0.0f64;
    for &t in times {
        let u = propagator(&small, t);
        let v = propagator(&big, t);
        for a in 0..n {
            for b in 0..n {
                worst = worst.max((u[(b, a)] - v[(1 << b, 1 << a)]).norm());
            }
        }
    }
    Ok(worst)
}

fn family(args: &FamilyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let g = match args.kind {
        FamilyKind::Cycle => {
            cycle_family(args.n, args.weighted_arcs.unwrap_or(args.n), args.alpha)?
        }
        FamilyKind::DirectedCycle => directed_cycle(args.n, args.alpha)?,
        FamilyKind::Complete => complete_family(args.n, args.alpha)?,
        FamilyKind::Path => path_family(args.n, args.alpha)?,
        FamilyKind::Tree => {
            let mode = match args.phase_mode {
                PhaseModeArg::Zero => PhaseMode::Zero,
                PhaseModeArg::Uniform => PhaseMode::Uniform,
            };
            random_tree(args.n, args.seed, mode)?
        }
    };
    if args.weighted_arcs.is_some() && args.kind != FamilyKind::Cycle {
        return Err(CliError::Usage(
            "--weighted-arcs only applies to the cycle family".into(),
        ));
    }
    let mut text = g.to_json();
    text.push('\n');
    emit(args.out.as_deref(), stdout, text.as_bytes())
}

/// File-name-safe form of an alpha expression: `pi/8` -> `pi_8`, `-0.5` -> `m0p5`.
pub fn alpha_label(text: &str) -> String {
    text.trim()
        .chars()
        .map(|c| match c {
            '/' => '_',
            '-' => 'm',
            '.' => 'p',
            '+' => 'p',
            c if c.is_ascii_alphanumeric() => c,
            _ => '_',
        })
        .collect()
}

fn sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mode_at = match (args.at, args.t_max, args.steps) {
        (Some(t), None, None) => Some(t),
        (None, Some(_), Some(_)) => None,
        _ => {
            return Err(CliError::Usage(
                "sweep needs either --at, or both --t-max and --steps".into(),
            ))
        }
    };
    if args.weighted_arcs.is_some() && args.family != SweepFamily::Cycle {
        return Err(CliError::Usage(
            "--weighted-arcs only applies to the cycle family".into(),
        ));
    }
    fs::create_dir_all(&args.out_dir).map_err(|source| CliError::Write {
        path: args.out_dir.clone(),
        source,
    })?;
    let family_name = match args.family {
        SweepFamily::Cycle => "cycle",
        SweepFamily::Complete => "complete",
    };

    let mut entries = Vec::with_capacity(args.alphas.len());
    for (idx, text) in args.alphas.iter().enumerate() {
        let alpha = parse_alpha_expr(text)?;
        let g = match args.family {
            SweepFamily::Cycle => {
                cycle_family(args.n, args.weighted_arcs.unwrap_or(args.n), alpha)?
            }
            SweepFamily::Complete => complete_family(args.n, alpha)?,
        };
        if let Some(b) = args.target {
            if b >= g.n_vertices() {
                return Err(CliError::Usage(format!("target {b} out of range")));
            }
        }
        let spec = eigendecompose(&adjacency_matrix(&g), DEFAULT_CLUSTER_TOL)?;
        let file = format!("{family_name}_n{}_{idx:02}_{}.csv", args.n, alpha_label(text));
        let (csv, peak) = match mode_at {
            Some(t) => {
                let row = distribution_at(&spec, args.source, t)?;
                let peak = match args.target {
                    Some(b) => Some(transfer_probability(&spec, args.source, b, t)?),
                    None => None,
                };
                (output::rows_csv(g.n_vertices(), &[(t, row)]), peak)
            }
            None => {
                let ts = time_series(
                    &spec,
                    args.source,
                    args.t_max.unwrap(),
                    args.steps.unwrap(),
                )?;
                let peak = args
                    .target
                    .map(|b| ts.target(b).into_iter().fold(0.0, f64::max));
                (output::time_series_csv(&ts), peak)
            }
        };
        let path = args.out_dir.join(&file);
        fs::write(&path, csv.as_bytes()).map_err(|source| CliError::Write { path, source })?;
        entries.push(json!({
            "alpha_expr": text,
            "alpha": alpha,
            "file": file,
            "max_target_probability": peak,
        }));
    }

    let manifest = json!({
        "schema": "1",
        "family": family_name,
        "n": args.n,
        "weighted_arcs": match args.family {
            SweepFamily::Cycle => Some(args.weighted_arcs.unwrap_or(args.n)),
            SweepFamily::Complete => None,
        },
        "source": args.source,
        "target": args.target,
        "mode": if mode_at.is_some() { "distribution" } else { "time_series" },
        "t": mode_at,
        "t_max": args.t_max,
        "steps": args.steps,
        "entries": entries,
    });
    let manifest_path = args.out_dir.join("sweep.json");
    emit_json(Some(&manifest_path), stdout, &manifest)?;
    writeln!(stdout, "{}", manifest_path.display()).map_err(CliError::Stdout)
}
