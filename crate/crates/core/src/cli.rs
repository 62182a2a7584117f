//! Command-line front end.
//!
//! Exit codes: 0 success, 1 unreadable or unparsable input, 2 invariant
//! violation, 3 kind or dimension mismatch (and unknown suite names), 4 every
//! evaluation point singular, 5 property failure in `verify`.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::conjclass::TriColligation;
use crate::document::{Document, Object};
use crate::doublecoset::DoubleCosetFamily;
use crate::error::Error;
use crate::grid::{self, GridSpec, Point};
use crate::matrixcore::{rng, Tolerances};
use crate::multicolligation::MultiColligation;
use crate::verify::{self, experiments, Dims};
use crate::Colligation;

pub const EXIT_INPUT: u8 = 1;
pub const EXIT_INVARIANT: u8 = 2;
pub const EXIT_MISMATCH: u8 = 3;
pub const EXIT_ALL_SINGULAR: u8 = 4;
pub const EXIT_PROPERTY: u8 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "colligations",
    version,
    about = "Operator colligations and their characteristic functions"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Override the unitarity tolerance.
    #[arg(long, global = true)]
    pub tol_unitarity: Option<f64>,
    /// Override the solve residual tolerance.
    #[arg(long, global = true)]
    pub tol_residual: Option<f64>,
    /// Override the rank cutoff.
    #[arg(long, global = true)]
    pub tol_rank: Option<f64>,
    /// Override the near-singularity guard.
    #[arg(long, global = true)]
    pub tol_surface: Option<f64>,
    /// Worker threads for grids and suites (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a document parses and satisfies its invariants.
    Validate { path: PathBuf },
    /// Multiply two documents of the same kind.
    Product { left: PathBuf, right: PathBuf },
    /// Evaluate the characteristic function at points or over a grid (NDJSON).
    Eval {
        path: PathBuf,
        /// Point literal: `[re, im]`, a matrix, or `{"S": .., "R": ..}`.
        #[arg(long = "point", conflicts_with = "grid")]
        points: Vec<String>,
        /// Grid spec as inline JSON or a file path.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Sample |det| and the smallest singular value of the eliminated system.
    Surface {
        path: PathBuf,
        #[arg(long)]
        grid: String,
    },
    /// Run a property suite, or `all`.
    Verify(VerifyArgs),
    /// Emit a seeded random document.
    Random(RandomArgs),
    /// Run a numerical experiment and print its observations.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(required_unless_present = "list")]
    pub suite: Option<String>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = Dims::default().n)]
    pub max_n: usize,
    #[arg(long, default_value_t = Dims::default().alpha)]
    pub max_alpha: usize,
    #[arg(long, default_value_t = Dims::default().inner)]
    pub max_inner: usize,
    /// List suite names and descriptions.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kind {
    Colligation,
    Multi,
    Tri,
    Doublecoset,
}

#[derive(Debug, Args)]
pub struct RandomArgs {
    pub kind: Kind,
    #[arg(long, default_value_t = 1)]
    pub alpha: usize,
    /// Inner dimension (slot size for `tri`).
    #[arg(long, default_value_t = 2)]
    pub inner: usize,
    /// Number of members (slots for `tri`).
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(required_unless_present = "list")]
    pub name: Option<String>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub list: bool,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

/// Exit code for a library error.
fn code_for(e: &Error) -> u8 {
    match e {
        Error::NotUnitary { .. } | Error::NotOrthogonal { .. } | Error::BadSplit { .. } | Error::NonFinite => {
            EXIT_INVARIANT
        }
        Error::AlphaMismatch { .. } | Error::ArityMismatch { .. } | Error::DimensionMismatch(_) => EXIT_MISMATCH,
        _ => EXIT_INPUT,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::new(code_for(&e), e.to_string())
    }
}

type Outcome = std::result::Result<u8, Failure>;

pub fn tolerances(g: &GlobalArgs) -> std::result::Result<Tolerances, Failure> {
    let mut tol = Tolerances::from_env();
    let overrides = [
        (g.tol_unitarity, &mut tol.unitarity_tol),
        (g.tol_residual, &mut tol.residual_tol),
        (g.tol_rank, &mut tol.rank_tol),
        (g.tol_surface, &mut tol.surface_guard),
    ];
    for (value, slot) in overrides {
        if let Some(v) = value {
            *slot = v;
        }
    }
    if !tol.is_valid() {
        return Err(Failure::new(EXIT_INPUT, "tolerances must lie in (0, 1)"));
    }
    Ok(tol)
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn load_document(path: &Path) -> std::result::Result<Document, Failure> {
    Document::parse(&read(path)?).map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn load_object(path: &Path, tol: &Tolerances) -> std::result::Result<Object, Failure> {
    Ok(load_document(path)?.to_object(tol)?)
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
fn load_grid(arg: &str) -> std::result::Result<GridSpec, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        read(Path::new(arg))?
    };
    GridSpec::parse(&text).map_err(|e| Failure::new(EXIT_INPUT, format!("grid spec: {e}")))
}

fn io_failure(e: io::Error) -> Failure {
    Failure::new(EXIT_INPUT, format!("write failed: {e}"))
}

fn output(g: &GlobalArgs) -> std::result::Result<Box<dyn Write>, Failure> {
    Ok(match &g.out {
        Some(path) => Box::new(BufWriter::new(
            fs::File::create(path).map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(out: &mut dyn Write, value: &Value) -> std::result::Result<(), Failure> {
    writeln!(out, "{}", serde_json::to_string(value).expect("values serialize")).map_err(io_failure)
}

fn threads(g: &GlobalArgs) -> usize {
    g.threads
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn validate(path: &Path, tol: &Tolerances, out: &mut dyn Write) -> Outcome {
    let doc = load_document(path)?;
    doc.to_object(tol)?;
    write_json(out, &json!({ "valid": true, "kind": doc.kind() }))?;
    Ok(0)
}

fn product(left: &Path, right: &Path, tol: &Tolerances, out: &mut dyn Write) -> Outcome {
    let a = load_object(left, tol)?;
    let b = load_object(right, tol)?;
    let ab = a.product(&b)?;
    out.write_all(ab.to_document(None).emit().as_bytes())
        .map_err(io_failure)?;
    Ok(0)
}

fn eval(
    path: &Path,
    points: &[String],
    grid_arg: Option<&str>,
    g: &GlobalArgs,
    tol: &Tolerances,
    out: &mut dyn Write,
) -> Outcome {
    let obj = load_object(path, tol)?;
    let stats = match grid_arg {
        Some(arg) => {
            let spec = load_grid(arg)?;
            grid::eval_grid(&obj, &spec, tol, threads(g), out)?
        }
        None => {
            if points.is_empty() {
                return Err(Failure::new(EXIT_INPUT, "eval needs --point or --grid"));
            }
            let mut regular = 0;
            for (index, literal) in points.iter().enumerate() {
                let value: Value = serde_json::from_str(literal)
                    .map_err(|e| Failure::new(EXIT_INPUT, format!("point {index}: {e}")))?;
                let point = Point::from_json(&value, &obj)?;
                let rec = grid::evaluate(&obj, &point, index, tol)?;
                regular += usize::from(rec.regular);
                write_json(out, &serde_json::to_value(&rec).expect("records serialize"))?;
            }
            grid::RunStats {
                points: points.len(),
                regular,
            }
        }
    };
    if stats.points > 0 && stats.regular == 0 {
        eprintln!("every point is singular");
        return Ok(EXIT_ALL_SINGULAR);
    }
    Ok(0)
}

fn surface(path: &Path, grid_arg: &str, g: &GlobalArgs, tol: &Tolerances, out: &mut dyn Write) -> Outcome {
    let obj = load_object(path, tol)?;
    if matches!(obj, Object::Colligation(_)) {
        return Err(Failure::new(
            EXIT_MISMATCH,
            "surfaces are defined for multi, tri and doublecoset documents",
        ));
    }
    let spec = load_grid(grid_arg)?;
    grid::surface_grid(&obj, &spec, threads(g), out)?;
    Ok(0)
}

fn run_verify(args: &VerifyArgs, tol: &Tolerances, out: &mut dyn Write) -> Outcome {
    if args.list {
        for s in verify::registry() {
            write_json(
                out,
                &json!({ "suite": s.name, "kind": s.kind, "description": s.description }),
            )?;
        }
        return Ok(0);
    }
    let name = args.suite.as_deref().unwrap_or_default();
    let suites: Vec<_> = if name == "all" {
        verify::registry()
    } else {
        vec![verify::find(name).ok_or_else(|| Failure::new(EXIT_MISMATCH, format!("unknown suite {name:?}")))?]
    };
    let dims = Dims {
        n: args.max_n,
        alpha: args.max_alpha,
        inner: args.max_inner,
    };
    let mut failed = false;
    for suite in &suites {
        let report = verify::run_suite(suite, args.trials, args.seed, dims, tol);
        failed |= !report.passed();
        let mut value = serde_json::to_value(&report).expect("reports serialize");
        value["passed"] = json!(report.passed());
        write_json(out, &value)?;
    }
    Ok(if failed { EXIT_PROPERTY } else { 0 })
}

fn random(args: &RandomArgs, out: &mut dyn Write) -> Outcome {
    if args.alpha == 0 || args.inner == 0 || args.n == 0 {
        return Err(Failure::new(EXIT_INPUT, "dimensions must be positive"));
    }
    let mut g = rng(args.seed);
    let obj = match args.kind {
        Kind::Colligation => Object::Colligation(Colligation::random(args.alpha, args.inner, &mut g)),
        Kind::Multi => Object::Multi(MultiColligation::random(args.n, args.alpha, args.inner, &mut g)),
        Kind::Tri => Object::Tri(TriColligation::random(args.alpha, args.inner, args.n, &mut g)),
        Kind::Doublecoset => Object::DoubleCoset(DoubleCosetFamily::random(args.n, args.alpha, args.inner, &mut g)),
    };
    out.write_all(obj.to_document(Some(args.seed)).emit().as_bytes())
        .map_err(io_failure)?;
    Ok(0)
}

fn experiment(args: &ExperimentArgs, tol: &Tolerances, out: &mut dyn Write) -> Outcome {
    if args.list {
        for e in experiments::registry() {
            write_json(out, &json!({ "experiment": e.name, "description": e.description }))?;
        }
        return Ok(0);
    }
    let name = args.name.as_deref().unwrap_or_default();
    let e =
        experiments::find(name).ok_or_else(|| Failure::new(EXIT_MISMATCH, format!("unknown experiment {name:?}")))?;
    write_json(out, &e.run(args.trials, args.seed, Dims::default(), tol))?;
    Ok(0)
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: &Cli) -> std::result::Result<u8, Failure> {
    let tol = tolerances(&cli.global)?;
    if let Some(t) = cli.global.threads.filter(|&t| t > 0) {
        // Suites use the global pool; ignore a second initialization.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let mut out = output(&cli.global)?;
    let code = match &cli.command {
        Command::Validate { path } => validate(path, &tol, &mut out)?,
        Command::Product { left, right } => product(left, right, &tol, &mut out)?,
        Command::Eval { path, points, grid } => eval(path, points, grid.as_deref(), &cli.global, &tol, &mut out)?,
        Command::Surface { path, grid } => surface(path, grid, &cli.global, &tol, &mut out)?,
        Command::Verify(args) => run_verify(args, &tol, &mut out)?,
        Command::Random(args) => random(args, &mut out)?,
        Command::Experiment(args) => experiment(args, &tol, &mut out)?,
    };
    out.flush().map_err(io_failure)?;
    Ok(code)
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
