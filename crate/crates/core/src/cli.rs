//! The `quickim` command line.
//!
//! Exit codes: 0 success, 2 usage, 3 parse or domain error, 4 capacity
//! guard, 5 IO. Outputs are written to a temporary file next to the target
//! and renamed into place, so a failed run never leaves a partial file.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{mc_spread, resolve_labels, robustness_bench, DEFAULT_SIMULATIONS};
use crate::graph::{
    assign_probabilities, read_graph, write_binary, write_edge_list, GraphFormat, InfluenceGraph,
    ModelKind, ProbabilityModel, ProbabilitySource,
};
use crate::oracle::run_battery;
use crate::score::score_est;
use crate::select::{basic_greedy, mc_greedy, quickim_with_state, DEFAULT_K, DEFAULT_WALK_LENGTH};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "QUICKIM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "quickim", version, about = "Influence maximization with walk-probability scores")]
pub struct Cli {
    /// Worker threads; 1 forces the sequential path. Defaults to all cores.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    /// Repeat for more detail on stderr and in JSON outputs.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assign influence probabilities to an edge list.
    Probs(ProbsArgs),
    /// Select seeds.
    Seeds(SeedsArgs),
    /// Estimate the spread of a seed set by Monte-Carlo simulation.
    Eval(EvalArgs),
    /// Run the exact oracle battery on a tiny graph.
    Oracle(OracleArgs),
    /// Time QuickIM across a probability grid.
    Bench(BenchArgs),
    /// Dump the initial walk scores.
    Scores(ScoresArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Probability model.
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Trivalency base probability.
    #[arg(long, default_value_t = 0.1)]
    pub p_t: f64,
    /// Uniform probability.
    #[arg(long, default_value_t = 0.1)]
    pub p_u: f64,
    /// Seed for randomized choices.
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
}

impl ModelArgs {
    fn model(&self, kind: ModelKind) -> Result<ProbabilityModel> {
        let m = ProbabilityModel {
            kind,
            p_t: self.p_t,
            p_u: self.p_u,
            rng_seed: self.rng_seed,
        };
        m.validate()?;
        Ok(m)
    }

    /// Reassigns when `--model` is given or the file carries no probabilities.
    fn apply(&self, graph: InfluenceGraph) -> Result<InfluenceGraph> {
        let kind = match (self.model, graph.probability_source()) {
            (Some(kind), _) => kind,
            (None, ProbabilitySource::Unassigned) => ModelKind::Wc,
            (None, _) => return Ok(graph),
        };
        assign_probabilities(&graph, &self.model(kind)?)
    }
}

#[derive(Debug, Args)]
pub struct ProbsArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Write the binary cache instead of an edge list.
    #[arg(long)]
    pub binary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Quickim,
    Basic,
    McGreedy,
}

#[derive(Debug, Args)]
pub struct SeedsArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    /// Maximum walk length.
    #[arg(long = "l", default_value_t = DEFAULT_WALK_LENGTH)]
    pub walk_length: usize,
    #[arg(long, value_enum, default_value_t = AlgoArg::Quickim)]
    pub algo: AlgoArg,
    /// Simulations per estimate for mc-greedy.
    #[arg(long, default_value_t = DEFAULT_SIMULATIONS)]
    pub simulations: usize,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub input: PathBuf,
    /// JSON from `seeds`, or whitespace-separated labels.
    #[arg(long)]
    pub seeds: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SIMULATIONS)]
    pub simulations: usize,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub input: PathBuf,
    #[arg(long = "l", default_value_t = DEFAULT_WALK_LENGTH)]
    pub walk_length: usize,
    /// Seeds used by the update-equivalence checks.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub input: PathBuf,
    /// tr or un.
    #[arg(long, value_enum, default_value_t = ModelKind::Un)]
    pub model: ModelKind,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.01, 0.05, 0.1, 0.2])]
    pub grid: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    #[arg(long = "l", default_value_t = DEFAULT_WALK_LENGTH)]
    pub walk_length: usize,
    /// Timed runs per grid value; the median is reported.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    /// Also write the table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VectorFormat {
    Json,
    /// Little-endian f64 per vertex, in internal id order.
    Binary,
}

#[derive(Debug, Args)]
pub struct ScoresArgs {
    pub input: PathBuf,
    #[arg(long = "l", default_value_t = DEFAULT_WALK_LENGTH)]
    pub walk_length: usize,
    #[arg(long, value_enum, default_value_t = VectorFormat::Json)]
    pub format: VectorFormat,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) => 2,
        Error::Parse { .. } | Error::Domain(_) | Error::Format(_) => 3,
        Error::Capacity(_) => 4,
        Error::Io { .. } => 5,
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match output {
        Some(p) => write_atomic(p, bytes),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn emit_json<T: Serialize>(output: Option<&Path>, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    emit(output, s.as_bytes())
}

fn load(path: &Path, model: &ModelArgs, verbose: u8) -> Result<InfluenceGraph> {
    let g = model.apply(read_graph(path, GraphFormat::Auto)?)?;
    if verbose > 0 {
        let s = g.summary();
        eprintln!(
            "loaded {}: n={} m={} model={}",
            path.display(),
            s.n,
            s.m,
            s.probability_model
        );
    }
    Ok(g)
}

fn positive(name: &str, value: usize) -> Result<()> {
    if value == 0 {
        Err(Error::invalid(format!("--{name} must be at least 1")))
    } else {
        Ok(())
    }
}

fn read_seed_labels(path: &Path) -> Result<Vec<u64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim_start().starts_with('{') {
        #[derive(serde::Deserialize)]
        struct SeedsFile {
            seeds: Vec<u64>,
        }
        let f: SeedsFile = serde_json::from_str(&text)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        return Ok(f.seeds);
    }
    text.split_whitespace()
        .enumerate()
        .map(|(i, tok)| {
            tok.parse().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("invalid seed label {tok:?}"),
            })
        })
        .collect()
}

#[derive(Serialize)]
struct EvalOutput {
    seeds: Vec<u64>,
    n: usize,
    #[serde(flatten)]
    estimate: crate::eval::SpreadEstimate,
}

#[derive(Serialize)]
struct ScoresOutput {
    max_walk_length: usize,
    labels: Vec<u64>,
    total: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_hop: Option<Vec<Vec<f64>>>,
}

fn dispatch(cli: &Cli) -> Result<()> {
    let v = cli.verbose;
    match &cli.command {
        Command::Probs(a) => {
            let g = read_graph(&a.input, GraphFormat::Auto)?;
            let g = assign_probabilities(&g, &a.model.model(a.model.model.unwrap_or(ModelKind::Wc))?)?;
            let mut buf = Vec::new();
            if a.binary {
                write_binary(&g, &mut buf).map_err(|e| Error::io(&a.output, e))?;
            } else {
                write_edge_list(&g, &mut buf).map_err(|e| Error::io(&a.output, e))?;
            }
            write_atomic(&a.output, &buf)
        }
        Command::Seeds(a) => {
            positive("k", a.k)?;
            positive("l", a.walk_length)?;
            positive("simulations", a.simulations)?;
            let g = load(&a.input, &a.model, v)?;
            let sel = match a.algo {
                AlgoArg::Quickim => {
                    let (mut sel, state) = quickim_with_state(&g, a.k, a.walk_length)?;
                    if v > 0 {
                        sel.diagnostics = Some(state.diagnostics());
                    }
                    sel
                }
                AlgoArg::Basic => basic_greedy(&g, a.k, a.walk_length)?,
                AlgoArg::McGreedy => mc_greedy(&g, a.k, a.simulations, a.model.rng_seed)?,
            };
            if v > 0 {
                for it in &sel.per_iteration {
                    eprintln!(
                        "iteration {} seed {} score {:.6} touched {} skipped {} ({:.3}s)",
                        it.iteration, it.label, it.score, it.touched, it.skipped, it.seconds
                    );
                }
                eprintln!("selected {} seeds in {:.3}s", sel.seeds.len(), sel.wall_seconds);
            }
            emit_json(a.output.as_deref(), &sel)
        }
        Command::Eval(a) => {
            positive("simulations", a.simulations)?;
            let g = load(&a.input, &a.model, v)?;
            let labels = read_seed_labels(&a.seeds)?;
            let ids = resolve_labels(&g, &labels)?;
            let estimate = mc_spread(&g, &ids, a.simulations, a.model.rng_seed)?;
            emit_json(
                a.output.as_deref(),
                &EvalOutput {
                    seeds: labels,
                    n: g.vertex_count(),
                    estimate,
                },
            )
        }
        Command::Oracle(a) => {
            positive("l", a.walk_length)?;
            let g = load(&a.input, &a.model, v)?;
            let report = run_battery(&g, a.walk_length, a.k)?;
            if v > 0 {
                for c in &report.checks {
                    eprintln!(
                        "{:<28} {} (cases {}, max error {:.3e})",
                        c.name,
                        if c.passed { "pass" } else { "FAIL" },
                        c.cases,
                        c.max_error
                    );
                }
            }
            emit_json(a.output.as_deref(), &report)
        }
        Command::Bench(a) => {
            positive("k", a.k)?;
            positive("l", a.walk_length)?;
            if let Some(p) = a.grid.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
                return Err(Error::invalid(format!("grid value {p} outside (0, 1)")));
            }
            let g = read_graph(&a.input, GraphFormat::Auto)?;
            let report = robustness_bench(&g, a.model, &a.grid, a.k, a.walk_length, a.repeats)?;
            if let Some(csv) = &a.csv {
                write_atomic(csv, report.to_csv().as_bytes())?;
            }
            emit_json(a.output.as_deref(), &report)
        }
        Command::Scores(a) => {
            positive("l", a.walk_length)?;
            let g = load(&a.input, &a.model, v)?;
            let scores = score_est(&g, a.walk_length)?;
            match a.format {
                VectorFormat::Binary => {
                    let bytes: Vec<u8> = scores.total().iter().flat_map(|x| x.to_le_bytes()).collect();
                    emit(a.output.as_deref(), &bytes)
                }
                VectorFormat::Json => emit_json(
                    a.output.as_deref(),
                    &ScoresOutput {
                        max_walk_length: a.walk_length,
                        labels: g.labels().to_vec(),
                        total: scores.total().to_vec(),
                        per_hop: (v > 0).then(|| scores.per_hop().to_vec()),
                    },
                ),
            }
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return 5;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
