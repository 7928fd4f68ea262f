//! The `kcore` command line.
//!
//! Exit codes:
//!
//! | code | meaning                                              |
//! |------|------------------------------------------------------|
//! | 0    | success                                              |
//! | 1    | input could not be parsed (line number on stderr)    |
//! | 2    | superstep cap reached before termination             |
//! | 3    | I/O error (missing input, unwritable output, ...)    |
//! | 4    | `verify`: engine and oracle disagree                 |
//! | 5    | internal error (engine contract or counter mismatch) |
//! | 64   | invalid command line                                 |
//!
//! Diagnostics go to stderr. Only `verify` writes to stdout.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use kcore::bsp::{EngineConfig, EngineError};
use kcore::kcore::{DecomposeError, KCore};
use kcore::{normalize, peel, Graph};

use crate::io::{read_edge_list, write_cores_to_path, ParseError};
use crate::report::{emit_json, emit_superstep_csv, BenchCsvWriter, BenchRow};
use crate::{decompose_timed, RunError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_NONTERMINATION: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "kcore",
    version,
    about = "Distributed-style k-core decomposition on a BSP engine"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose a graph with the vertex-centric engine.
    Run(RunArgs),
    /// Decompose a graph with the sequential peeling oracle.
    Oracle(OracleArgs),
    /// Run engine and oracle and compare every core number.
    Verify(VerifyArgs),
    /// Time the engine across worker counts.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Core numbers, one `id<TAB>core` line per vertex.
    #[arg(long)]
    pub output: PathBuf,
    /// JSON run report.
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: u32,
    /// Defaults to the number of workers.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub partitions: Option<u32>,
    #[arg(long)]
    pub max_supersteps: Option<usize>,
    /// Also write the per-superstep series as CSV.
    #[arg(long)]
    pub superstep_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: u32,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub inputs: Vec<PathBuf>,
    /// Comma-separated worker counts, e.g. `1,2,4,8`.
    #[arg(long, value_delimiter = ',', required = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers_list: Vec<u32>,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub repeat: u32,
    #[arg(long)]
    pub out: PathBuf,
}

/// Anything that ends a command early, tagged with its exit code.
#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Run(#[from] RunError),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Parse {
                source: ParseError::Io(_),
                ..
            } => EXIT_IO,
            Failure::Parse { .. } => EXIT_PARSE,
            Failure::Io { .. } => EXIT_IO,
            Failure::Run(RunError::Decompose(DecomposeError::Engine(
                EngineError::NonTermination { .. },
            ))) => EXIT_NONTERMINATION,
            Failure::Run(_) => EXIT_INTERNAL,
        }
    }

    fn io(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
        move |source| Failure::Io {
            path: path.to_owned(),
            source,
        }
    }
}

fn load(path: &Path) -> Result<Graph, Failure> {
    let el = read_edge_list(path).map_err(|source| Failure::Parse {
        path: path.to_owned(),
        source,
    })?;
    Ok(normalize(&el))
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn engine_config(
    workers: u32,
    partitions: Option<u32>,
    max_supersteps: Option<usize>,
) -> EngineConfig {
    let workers = workers as usize;
    let mut cfg = EngineConfig::new(partitions.map_or(workers, |p| p as usize), workers);
    cfg.max_supersteps = max_supersteps;
    cfg
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(Failure::io(path))
}

fn cmd_run(args: &RunArgs) -> Result<(), Failure> {
    let g = load(&args.input)?;
    let cfg = engine_config(args.workers, args.partitions, args.max_supersteps);
    let (cores, report) = decompose_timed(&KCore::new(), &dataset_name(&args.input), &g, &cfg)?;
    write_cores_to_path(&cores, &g, &args.output).map_err(Failure::io(&args.output))?;
    write_file(&args.report, &emit_json(&report))?;
    if let Some(path) = &args.superstep_csv {
        write_file(path, &emit_superstep_csv(&report))?;
    }
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<(), Failure> {
    let g = load(&args.input)?;
    write_cores_to_path(&peel(&g), &g, &args.output).map_err(Failure::io(&args.output))
}

/// Outcome of comparing the engine with the oracle on one graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub n: usize,
    pub k_max: u32,
    /// `(original id, engine core, oracle core)` for every disagreement.
    pub mismatches: Vec<(u64, u32, u32)>,
}

impl Verdict {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub fn verify_graph(program: &KCore, g: &Graph, cfg: &EngineConfig) -> Result<Verdict, RunError> {
    let (engine, _) = decompose_timed(program, "", g, cfg)?;
    let oracle = peel(g);
    let mismatches = g
        .vertices()
        .filter(|&v| engine.core[v as usize] != oracle.core[v as usize])
        .map(|v| {
            (
                g.original_id(v),
                engine.core[v as usize],
                oracle.core[v as usize],
            )
        })
        .collect();
    Ok(Verdict {
        n: g.n(),
        k_max: oracle.core.iter().copied().max().unwrap_or(0),
        mismatches,
    })
}

/// `verify` with an explicit program, so a deliberately broken program can be
/// checked against the oracle.
pub fn cmd_verify_with(
    program: &KCore,
    args: &VerifyArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let result = load(&args.input).and_then(|g| {
        let cfg = engine_config(args.workers, None, None);
        Ok(verify_graph(program, &g, &cfg)?)
    });
    match result {
        Ok(v) if v.ok() => {
            let _ = writeln!(out, "OK n={} kmax={}", v.n, v.k_max);
            EXIT_OK
        }
        Ok(v) => {
            let _ = writeln!(out, "MISMATCH n={} differing={}", v.n, v.mismatches.len());
            for (id, engine, oracle) in v.mismatches.iter().take(10) {
                let _ = writeln!(err, "vertex {id}: engine {engine}, oracle {oracle}");
            }
            EXIT_MISMATCH
        }
        Err(f) => report_failure(&f, err),
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<(), Failure> {
    let file = File::create(&args.out).map_err(Failure::io(&args.out))?;
    let mut csv = BenchCsvWriter::new(file).map_err(Failure::io(&args.out))?;
    for input in &args.inputs {
        let g = load(input)?;
        let name = dataset_name(input);
        for &workers in &args.workers_list {
            let cfg = engine_config(workers, None, None);
            for repeat in 1..=args.repeat {
                let (_, report) = decompose_timed(&KCore::new(), &name, &g, &cfg)?;
                csv.write_row(&BenchRow::from_report(&report, repeat))
                    .map_err(Failure::io(&args.out))?;
            }
        }
    }
    Ok(())
}

fn report_failure(f: &Failure, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "kcore: {f}");
    f.code()
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Verify(a) => return cmd_verify_with(&KCore::new(), a, out, err),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => report_failure(&f, err),
    }
}
