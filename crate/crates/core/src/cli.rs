//! Command-line driver.
//!
//! Exit codes: 0 success, 2 invalid input, 3 node budget or oracle cap
//! exceeded, 4 a decay bound failed to verify.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::counter::{count_cnf, count_matchings, CountMode, Estimate};
use crate::decay::{render_table, verify_all_bounds, SuiteConfig, MIN_REFINE_PASSES, MIN_RESOLUTION};
use crate::formula::{FormulaError, MonotoneCnf};
use crate::io::formats::{self, InputFormat, Instance};
use crate::io::report::{self, ReportHeader};
use crate::matching::{from_hypergraph, AmoInstance};
use crate::oracle::{self, OracleError, DEFAULT_ORACLE_CAP};
use crate::DEFAULT_NODE_BUDGET;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_REGRESSION: i32 = 4;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "COVERCOUNT_THREADS";

#[derive(Parser, Debug)]
#[command(name = "covercount", version, about = "Deterministic approximate counting of set covers and hypergraph matchings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count satisfying assignments of a monotone CNF (DIMACS by default).
    CountCnf(CountArgs),
    /// Count set covers of a set system.
    CountSetcover(CountArgs),
    /// Count matchings of a hypergraph or solutions of an at-most-one instance.
    CountMatching(CountArgs),
    /// Count matchings of a 3-uniform hypergraph (partial 3D matchings).
    #[command(name = "count-3dm")]
    Count3dm(CountArgs),
    /// Exact count by exhaustive enumeration.
    Exact(ExactArgs),
    /// Numerically verify the decay-rate bounds.
    VerifyDecay(VerifyArgs),
    /// Write a random instance to stdout.
    Gen(GenArgs),
    /// Compare estimates with exact counts on random instances.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Dimacs,
    Setcover,
    Hypergraph,
    AmoJson,
}

impl From<FormatArg> for InputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Dimacs => InputFormat::Dimacs,
            FormatArg::Setcover => InputFormat::SetCover,
            FormatArg::Hypergraph => InputFormat::Hypergraph,
            FormatArg::AmoJson => InputFormat::AmoJson,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Certified,
    Heuristic,
    Adaptive,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Problem {
    Cnf,
    Matching,
}

#[derive(Args, Debug, Clone)]
struct ModeOpts {
    /// Depth selection; defaults to heuristic when --depth is given, else adaptive.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Target relative error (certified) or tolerance (adaptive).
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Fixed truncation depth.
    #[arg(long)]
    depth: Option<u32>,
    /// Per-marginal cap on computation-tree nodes.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
}

#[derive(Args, Debug)]
struct CountArgs {
    /// Input file, or `-` for stdin.
    input: PathBuf,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[command(flatten)]
    mode: ModeOpts,
    /// Recorded in the report.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json: bool,
    /// Add wall-clock time to the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct ExactArgs {
    input: PathBuf,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Largest number of live variables to enumerate.
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    cap: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = MIN_RESOLUTION)]
    resolution: usize,
    #[arg(long, default_value_t = SuiteConfig::default().refine_passes)]
    refine: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(value_enum)]
    problem: Problem,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Variables (cnf) or vertices (matching).
    #[arg(long, default_value_t = 12)]
    vars: usize,
    /// Clauses (cnf) or edges (matching).
    #[arg(long, default_value_t = 15)]
    count: usize,
    /// Smallest clause arity or edge size.
    #[arg(long, default_value_t = 2)]
    min_size: usize,
    /// Largest clause arity or edge size.
    #[arg(long, default_value_t = 3)]
    max_size: usize,
    /// Output format; dimacs for cnf and hypergraph for matching by default.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(value_enum, default_value = "cnf")]
    problem: Problem,
    #[arg(long, default_value_t = 20)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 12)]
    vars: usize,
    #[arg(long, default_value_t = 15)]
    count: usize,
    #[arg(long, default_value_t = 2)]
    min_size: usize,
    #[arg(long, default_value_t = 3)]
    max_size: usize,
    #[command(flatten)]
    mode: ModeOpts,
    #[arg(long)]
    json: bool,
}

struct Failure {
    code: i32,
    message: String,
}

fn invalid(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_INVALID_INPUT,
        message: message.to_string(),
    }
}

fn budget(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_BUDGET,
        message: message.to_string(),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
            } else {
                let _ = out.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    configure_threads();
    let result = match cli.command {
        Command::CountCnf(a) => count_command("count-cnf", a, InputFormat::Dimacs, out),
        Command::CountSetcover(a) => count_command("count-setcover", a, InputFormat::SetCover, out),
        Command::CountMatching(a) => count_command("count-matching", a, InputFormat::Hypergraph, out),
        Command::Count3dm(a) => count_command("count-3dm", a, InputFormat::Hypergraph, out),
        Command::Exact(a) => exact_command(a, out),
        Command::VerifyDecay(a) => verify_command(a, out),
        Command::Gen(a) => gen_command(a, out),
        Command::Bench(a) => bench_command(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Caps the global rayon pool at `COVERCOUNT_THREADS` when it is set.
pub fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| invalid(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }
}

fn load(path: &Path, format: Option<FormatArg>, fallback: InputFormat) -> Result<(Vec<u8>, InputFormat, Instance), Failure> {
    let bytes = read_input(path)?;
    let format = format
        .map(InputFormat::from)
        .or_else(|| InputFormat::from_path(path))
        .unwrap_or(fallback);
    let text = std::str::from_utf8(&bytes).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let inst = formats::parse(text, format).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    Ok((bytes, format, inst))
}

fn resolve_mode(m: &ModeOpts) -> Result<CountMode, Failure> {
    let kind = m.mode.unwrap_or(if m.depth.is_some() { ModeArg::Heuristic } else { ModeArg::Adaptive });
    if !(m.epsilon.is_finite() && m.epsilon > 0.0) {
        return Err(invalid("--epsilon must be a positive number"));
    }
    Ok(match kind {
        ModeArg::Certified => CountMode::Certified { epsilon: m.epsilon },
        ModeArg::Adaptive => CountMode::Adaptive { tol: m.epsilon },
        ModeArg::Heuristic => CountMode::Heuristic {
            depth: m.depth.ok_or_else(|| invalid("--mode heuristic needs --depth"))?,
        },
    })
}

/// Brings a parsed CNF into the form the counter expects. Duplicate and
/// superset clauses are dropped; an empty clause is kept so the count is 0.
fn prepare_cnf(c: MonotoneCnf) -> Result<MonotoneCnf, Failure> {
    if c.has_empty_clause() {
        return Ok(c);
    }
    match c.wellform() {
        Ok(w) => Ok(w),
        Err(e @ FormulaError::DegreeExceeded { .. }) => Err(invalid(e)),
        Err(e) => Err(invalid(e)),
    }
}

fn amo_of(inst: Instance, command: &str) -> Result<AmoInstance, Failure> {
    match inst {
        Instance::Hypergraph(h) => {
            if command == "count-3dm" && !h.is_uniform(3) {
                return Err(invalid("count-3dm needs a 3-uniform hypergraph"));
            }
            Ok(from_hypergraph(&h))
        }
        Instance::Amo(a) if command != "count-3dm" => Ok(a),
        Instance::Amo(_) => Err(invalid("count-3dm needs a hypergraph input")),
        Instance::Cnf(_) => Err(invalid(format!("{command} needs a hypergraph or at-most-one input"))),
    }
}

fn emit(out: &mut dyn Write, m: &Map<String, Value>, as_json: bool) -> Result<(), Failure> {
    let s = if as_json { report::render_json(m) } else { report::render_text(m) };
    out.write_all(s.as_bytes()).map_err(|e| invalid(format!("writing output: {e}")))
}

fn count_command(command: &str, a: CountArgs, fallback: InputFormat, out: &mut dyn Write) -> Result<i32, Failure> {
    let mode = resolve_mode(&a.mode)?;
    let (bytes, format, inst) = load(&a.input, a.format, fallback)?;
    let start = Instant::now();
    let (n_vars, est): (usize, Estimate) = match command {
        "count-cnf" | "count-setcover" => {
            let Instance::Cnf(c) = inst else {
                return Err(invalid(format!("{command} needs a CNF or set-cover input")));
            };
            let c = prepare_cnf(c)?;
            (c.n_vars(), count_cnf(&c, mode, a.mode.node_budget).map_err(budget)?)
        }
        _ => {
            let inst = amo_of(inst, command)?;
            (inst.n_vars(), count_matchings(&inst, mode, a.mode.node_budget).map_err(budget)?)
        }
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let digest = report::input_digest(&bytes);
    let header = ReportHeader {
        command,
        input_digest: &digest,
        format,
        n_vars,
        seed: a.seed,
    };
    let mut m = report::estimate_report(&header, &est);
    if a.timing {
        m = report::with_timing(m, elapsed);
    }
    emit(out, &m, a.json)?;
    Ok(EXIT_OK)
}

fn exact_command(a: ExactArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let (bytes, format, inst) = load(&a.input, a.format, InputFormat::Dimacs)?;
    let start = Instant::now();
    let oracle_err = |e: OracleError| match e {
        OracleError::TooLargeForOracle { .. } => budget(e),
        other => invalid(other),
    };
    let (n_vars, count) = match inst {
        Instance::Cnf(c) => (c.n_vars(), oracle::exact_count_cnf(&c, a.cap).map_err(oracle_err)?),
        Instance::Hypergraph(h) => {
            let i = from_hypergraph(&h);
            (i.n_vars(), oracle::exact_count_amo(&i, a.cap).map_err(oracle_err)?)
        }
        Instance::Amo(i) => (i.n_vars(), oracle::exact_count_amo(&i, a.cap).map_err(oracle_err)?),
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let digest = report::input_digest(&bytes);
    let header = ReportHeader {
        command: "exact",
        input_digest: &digest,
        format,
        n_vars,
        seed: a.seed,
    };
    let mut m = report::exact_report(&header, &count.0);
    if a.timing {
        m = report::with_timing(m, elapsed);
    }
    emit(out, &m, a.json)?;
    Ok(EXIT_OK)
}

fn verify_command(a: VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if a.resolution < MIN_RESOLUTION {
        return Err(invalid(format!("--resolution must be at least {MIN_RESOLUTION}")));
    }
    if a.refine < MIN_REFINE_PASSES {
        return Err(invalid(format!("--refine must be at least {MIN_REFINE_PASSES}")));
    }
    let rep = verify_all_bounds(SuiteConfig {
        resolution: a.resolution,
        refine_passes: a.refine,
    });
    let s = if a.json {
        let mut s = serde_json::to_string_pretty(&rep).expect("report serializes");
        s.push('\n');
        s
    } else {
        render_table(&rep)
    };
    out.write_all(s.as_bytes()).map_err(|e| invalid(format!("writing output: {e}")))?;
    Ok(if rep.all_passed() { EXIT_OK } else { EXIT_REGRESSION })
}

fn generate(problem: Problem, seed: u64, vars: usize, count: usize, sizes: (usize, usize)) -> Result<Instance, Failure> {
    let (lo, hi) = sizes;
    if lo == 0 || lo > hi {
        return Err(invalid("need 1 <= --min-size <= --max-size"));
    }
    match problem {
        Problem::Cnf => oracle::gen_random_read5_cnf(seed, vars, count, lo..=hi)
            .map(Instance::Cnf)
            .map_err(invalid),
        Problem::Matching => {
            if hi > crate::matching::MAX_EDGE_SIZE {
                return Err(invalid(format!("edges have at most {} vertices", crate::matching::MAX_EDGE_SIZE)));
            }
            oracle::gen_random_deg4_hypergraph(seed, vars, count, lo..=hi)
                .map(Instance::Hypergraph)
                .map_err(invalid)
        }
    }
}

fn gen_command(a: GenArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let inst = generate(a.problem, a.seed, a.vars, a.count, (a.min_size, a.max_size))?;
    let format = a.format.map(InputFormat::from);
    let text = match (inst, format) {
        (Instance::Cnf(c), None | Some(InputFormat::Dimacs)) => formats::to_dimacs(&c),
        (Instance::Cnf(c), Some(InputFormat::SetCover)) => formats::to_setcover(&c),
        (Instance::Hypergraph(h), None | Some(InputFormat::Hypergraph)) => formats::to_hypergraph(&h),
        (Instance::Hypergraph(h), Some(InputFormat::AmoJson)) => {
            let mut s = formats::to_amo_json(&from_hypergraph(&h));
            s.push('\n');
            s
        }
        (_, Some(f)) => return Err(invalid(format!("cannot write this instance as {}", f.name()))),
        (Instance::Amo(_), None) => unreachable!("generator yields cnf or hypergraph"),
    };
    out.write_all(text.as_bytes()).map_err(|e| invalid(format!("writing output: {e}")))?;
    Ok(EXIT_OK)
}

fn bench_command(a: BenchArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let mode = resolve_mode(&a.mode)?;
    let mut rows = Vec::with_capacity(a.instances);
    let mut worst: f64 = 0.0;
    for k in 0..a.instances as u64 {
        let seed = a.seed.wrapping_add(k);
        let inst = generate(a.problem, seed, a.vars, a.count, (a.min_size, a.max_size))?;
        let start = Instant::now();
        let (est, exact) = match inst {
            Instance::Cnf(c) => {
                let c = prepare_cnf(c)?;
                let est = count_cnf(&c, mode, a.mode.node_budget).map_err(budget)?;
                (est, oracle::exact_count_cnf(&c, DEFAULT_ORACLE_CAP).ok())
            }
            Instance::Hypergraph(h) => {
                let i = from_hypergraph(&h);
                let est = count_matchings(&i, mode, a.mode.node_budget).map_err(budget)?;
                (est, oracle::exact_count_amo(&i, DEFAULT_ORACLE_CAP).ok())
            }
            Instance::Amo(_) => unreachable!("generator yields cnf or hypergraph"),
        };
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let ln_exact = exact.map(|e| report::ln_biguint(&e.0));
        let err = ln_exact.map(|l| (est.log_count - l).abs()).filter(|e| e.is_finite());
        if let Some(e) = err {
            worst = worst.max(e);
        }
        rows.push(json!({
            "seed": seed,
            "depth": est.depth,
            "ln_estimate": est.log_count,
            "ln_exact": ln_exact,
            "abs_ln_error": err,
            "nodes_visited": est.nodes_visited,
            "wall_time_ms": ms,
        }));
    }
    if a.json {
        let summary = json!({ "mode": mode.name(), "instances": rows, "worst_abs_ln_error": worst });
        let mut s = serde_json::to_string_pretty(&summary).expect("summary serializes");
        s.push('\n');
        out.write_all(s.as_bytes()).map_err(|e| invalid(format!("writing output: {e}")))?;
    } else {
        let mut s = format!("{:>8} {:>6} {:>12} {:>12} {:>10} {:>10} {:>10}\n", "seed", "depth", "ln_est", "ln_exact", "ln_err", "nodes", "ms");
        for r in &rows {
            let f = |k: &str| r[k].as_f64().map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into());
            s.push_str(&format!(
                "{:>8} {:>6} {:>12} {:>12} {:>10} {:>10} {:>10.1}\n",
                r["seed"],
                r["depth"],
                f("ln_estimate"),
                f("ln_exact"),
                f("abs_ln_error"),
                r["nodes_visited"],
                r["wall_time_ms"].as_f64().unwrap_or(0.0),
            ));
        }
        s.push_str(&format!("worst |ln error|: {worst:.3e}\n"));
        out.write_all(s.as_bytes()).map_err(|e| invalid(format!("writing output: {e}")))?;
    }
    Ok(EXIT_OK)
}
