//! The `surfrig` command line: argument parsing, file I/O and dispatch.
//!
//! Every command prints JSON on stdout. Exit codes: 0 success, 1 negative
//! answer to a check (`congruent`), 2 input error, 3 numerical failure.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::RigidityError;
use crate::exact;
use crate::flextrace::{self, TraceParams, TraceSummary};
use crate::framework::{self, Framework, RigidityReport};
use crate::graph::{self, Graph};
use crate::hendrickson::{self, DEFAULT_TRIALS};
use crate::linalg::DEFAULT_RANK_TOL;
use crate::surface::{Surface, SurfaceKind};

pub const DEFAULT_SEED: u64 = 20130;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "surfrig",
    version,
    about = "Rigidity of bar-joint frameworks on the sphere, cylinder, cone and ellipsoid",
    after_help = "All randomness is seeded; the default seed is 20130.\n\
                  Inputs are JSON files; use '-' to read stdin."
)]
pub struct AnalysisRequest {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// sphere | cylinder | cone | ellipsoid[:A,B]; overrides the input's surface
    #[arg(long)]
    pub surface: Option<Surface>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Resampling budget for borderline rank decisions
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    /// Relative singular-value cutoff for numerical rank
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    pub tol: f64,
    /// Write the output here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank-based rigidity report for a framework
    Analyze {
        input: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// (2, ℓ)-sparsity, tightness and the count characterization
    Sparsity {
        input: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Necessary conditions for generic global rigidity
    Hendrickson {
        input: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Trace the flex after deleting an edge and look for a second realization
    Trace {
        input: String,
        /// Edge to delete, as 1-based labels "i,j"
        #[arg(long, value_parser = parse_edge)]
        edge: (usize, usize),
        #[arg(long, default_value_t = TraceParams::default().step)]
        step: f64,
        #[arg(long, default_value_t = TraceParams::default().max_steps)]
        max_steps: usize,
        #[arg(long, default_value_t = TraceParams::default().corrector_tol)]
        corrector_tol: f64,
        #[arg(long, default_value_t = TraceParams::default().closure_tol)]
        closure_tol: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sample a framework on a surface
    Sample {
        /// Graph (or framework) file; omit to sample isolated vertices
        input: Option<String>,
        /// Vertex count when no graph is given
        #[arg(long)]
        n: Option<usize>,
        /// Emit exact rational coordinates as well
        #[arg(long)]
        rational: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compare all pairwise distances of two frameworks
    Congruent {
        first: String,
        second: String,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn parse_edge(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected i,j, got '{s}'"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad label '{a}'"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad label '{b}'"))?;
    if a == 0 || b == 0 {
        return Err("labels are 1-based".into());
    }
    Ok((a, b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOutput {
    pub report: RigidityReport,
    pub flex: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityOutput {
    pub surface: SurfaceKind,
    pub ell: usize,
    pub is_sparse: bool,
    pub is_tight: bool,
    /// Null on the ellipsoid, where no characterization is known.
    pub combinatorial_isostatic: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CongruenceOutput {
    pub congruent: bool,
    pub max_deviation: f64,
    /// Congruent with enough vertices that an isometry of the surface
    /// relates the two frameworks.
    pub surface_congruent: bool,
}

/// Result of one CLI invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Numerical(String),
}

impl From<RigidityError> for Failure {
    fn from(e: RigidityError) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read_input(path: &str) -> CliResult<String> {
    if path == "-" {
        let mut buf = String::new();
        io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::Input(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("reading {path}: {e}")))
    }
}

fn parse_json(path: &str) -> CliResult<Value> {
    serde_json::from_str(&read_input(path)?)
        .map_err(|e| Failure::Input(format!("{path}: {e}")))
}

fn decode<T: serde::de::DeserializeOwned>(path: &str, value: Value) -> CliResult<T> {
    serde_json::from_value(value).map_err(|e| Failure::Input(format!("{path}: {e}")))
}

/// Reads a framework, applying a surface override if given.
fn load_framework(path: &str, surface: Option<Surface>) -> CliResult<Framework> {
    let fw: Framework = decode(path, parse_json(path)?)?;
    match surface {
        Some(s) if s != *fw.surface() => {
            Ok(Framework::new(fw.graph().clone(), s, fw.config().to_vec())?)
        }
        _ => Ok(fw),
    }
}

/// Reads either a bare graph or a framework (whose surface is returned).
fn load_graph(path: &str) -> CliResult<(Graph, Option<Surface>)> {
    let value = parse_json(path)?;
    if value.get("graph").is_some() {
        let fw: Framework = decode(path, value)?;
        Ok((fw.graph().clone(), Some(*fw.surface())))
    } else {
        Ok((decode(path, value)?, None))
    }
}

fn pick_surface(flag: Option<Surface>, from_file: Option<Surface>) -> CliResult<Surface> {
    flag.or(from_file)
        .ok_or_else(|| Failure::Input("no surface given; pass --surface".into()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn analyze(input: &str, common: &CommonArgs) -> CliResult<String> {
    let fw = load_framework(input, common.surface)?;
    let report = if fw.rational_config().is_some() {
        framework::classify_exact(&fw)?
    } else {
        framework::classify_with_tol(&fw, common.tol)?
    };
    let flex = framework::nontrivial_flex_with_tol(&fw, common.tol)?
        .map(|v| v.iter().copied().collect());
    Ok(to_json(&AnalyzeOutput { report, flex }))
}

fn sparsity(input: &str, common: &CommonArgs) -> CliResult<String> {
    let (g, file_surface) = load_graph(input)?;
    let surface = pick_surface(common.surface, file_surface)?;
    let ell = surface.ell();
    let combinatorial_isostatic = match graph::combinatorial_isostatic(&g, surface.kind()) {
        Ok(b) => Some(b),
        Err(RigidityError::CharacterizationUnknown) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(to_json(&SparsityOutput {
        surface: surface.kind(),
        ell,
        is_sparse: graph::is_sparse(&g, ell),
        is_tight: graph::is_tight(&g, ell),
        combinatorial_isostatic,
    }))
}

fn hendrickson_cmd(input: &str, common: &CommonArgs) -> CliResult<String> {
    let (g, file_surface) = load_graph(input)?;
    let surface = pick_surface(common.surface, file_surface)?;
    let verdict = hendrickson::check_necessary_conditions(&g, &surface, common.trials, common.seed)?;
    Ok(to_json(&verdict))
}

fn trace_cmd(
    input: &str,
    edge: (usize, usize),
    params: TraceParams,
    common: &CommonArgs,
) -> CliResult<(String, Option<String>)> {
    params.validate()?;
    let fw = load_framework(input, common.surface)?.to_standard_position()?;
    let removed = (edge.0 - 1, edge.1 - 1);
    let path = flextrace::trace(&fw, removed, &params)?;
    let witness = flextrace::second_realization_on_path(&fw, removed, &params, &path)?;
    let summary = TraceSummary {
        closed: path.closed,
        crossings: path.crossings().len(),
        witness,
    };
    let mut lines = String::new();
    for record in path.records() {
        lines += &serde_json::to_string(&record).expect("serializable");
        lines.push('\n');
    }
    let summary_line = serde_json::to_string(&summary).expect("serializable") + "\n";
    lines += &summary_line;
    match &common.out {
        Some(_) => Ok((summary_line, Some(lines))),
        None => Ok((lines, None)),
    }
}

fn sample(
    input: Option<&str>,
    n: Option<usize>,
    rational: bool,
    common: &CommonArgs,
) -> CliResult<String> {
    let (g, file_surface) = match (input, n) {
        (Some(path), _) => load_graph(path)?,
        (None, Some(n)) => (Graph::new(n, [])?, None),
        (None, None) => return Err(Failure::Input("give a graph file or --n".into())),
    };
    let surface = pick_surface(common.surface, file_surface)?;
    let fw = if rational {
        let pts = exact::sample_rational_config(&surface, g.n(), common.seed);
        Framework::with_rational_config(g, surface, pts)?
    } else {
        Framework::sample(g, surface, common.seed)
    };
    Ok(to_json(&fw))
}

fn congruent(first: &str, second: &str, common: &CommonArgs) -> CliResult<(String, bool)> {
    let a = load_framework(first, common.surface)?;
    let b = load_framework(second, common.surface)?;
    if a.n() != b.n() {
        return Err(Failure::Input(format!(
            "vertex counts differ: {} vs {}",
            a.n(),
            b.n()
        )));
    }
    let max_deviation = flextrace::max_distance_deviation(a.config(), b.config());
    let congruent = max_deviation <= common.tol;
    let enough = a.n() >= 4 + a.surface().meta().gamma && a.surface() == b.surface();
    let out = CongruenceOutput {
        congruent,
        max_deviation,
        surface_congruent: congruent && enough,
    };
    Ok((to_json(&out), congruent))
}

fn write_out(path: &PathBuf, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| Failure::Input(format!("writing {}: {e}", path.display())))
}

type Emitted = (String, Option<(PathBuf, String)>);

/// Routes `text` to the `--out` file when given, else to stdout.
fn emit(common: &CommonArgs, text: String) -> Emitted {
    match &common.out {
        Some(path) => (String::new(), Some((path.clone(), text))),
        None => (text, None),
    }
}

fn dispatch(request: &AnalysisRequest) -> CliResult<(Emitted, i32)> {
    Ok(match &request.command {
        Command::Analyze { input, common } => (emit(common, analyze(input, common)?), EXIT_OK),
        Command::Sparsity { input, common } => (emit(common, sparsity(input, common)?), EXIT_OK),
        Command::Hendrickson { input, common } => {
            (emit(common, hendrickson_cmd(input, common)?), EXIT_OK)
        }
        Command::Sample {
            input,
            n,
            rational,
            common,
        } => (
            emit(common, sample(input.as_deref(), *n, *rational, common)?),
            EXIT_OK,
        ),
        Command::Trace {
            input,
            edge,
            step,
            max_steps,
            corrector_tol,
            closure_tol,
            common,
        } => {
            let params = TraceParams {
                step: *step,
                corrector_tol: *corrector_tol,
                max_steps: *max_steps,
                closure_tol: *closure_tol,
            };
            let (stdout, file) = trace_cmd(input, *edge, params, common)?;
            ((stdout, common.out.clone().zip(file)), EXIT_OK)
        }
        Command::Congruent {
            first,
            second,
            common,
        } => {
            let (text, same) = congruent(first, second, common)?;
            let code = if same { EXIT_OK } else { EXIT_NEGATIVE };
            (emit(common, text), code)
        }
    })
}

/// Runs one request, returning the exit code and captured output.
pub fn run(request: &AnalysisRequest) -> Outcome {
    let result = dispatch(request).and_then(|((stdout, file), code)| {
        if let Some((path, text)) = file {
            write_out(&path, &text)?;
        }
        Ok((stdout, code))
    });
    match result {
        Ok((stdout, code)) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(Failure::Input(msg)) => Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(Failure::Numerical(msg)) => Outcome {
            code: EXIT_NUMERICAL,
            stdout: String::new(),
            stderr: format!("numerical failure: {msg}\n"),
        },
    }
}

/// Parses `args` (including the program name) and runs the request.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match AnalysisRequest::try_parse_from(args) {
        Ok(req) => run(&req),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}

/// Entry point used by the binary.
pub fn main_with_args(args: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    let outcome = run_args(args);
    print!("{}", outcome.stdout);
    let _ = io::stdout().flush();
    eprint!("{}", outcome.stderr);
    outcome.code
}
