//! Command-line surface: build example kernels, integrate them into
//! hypermatrices, audit, certify, apply, invert and lift fixed points.
//!
//! Exit codes: 0 success or certified, 1 a check failed, was inconclusive
//! or a solver gave up, 2 usage or I/O error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use pso_core::io::{self as pio, HypermatrixFile, KernelFile, VectorFile};
use pso_core::pso::{CertifyConfig, FixedPointConfig, SolverConfig};
use pso_core::tolerance::{FIX_TOL, ROW_TOL, SOLVE_TOL};
use pso_core::{Error, Hypermatrix64, IntegralSystem64, Kernel64, MergedPso, MomentFunction, Pso64, SimplexVector64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "pso", version, about = "Polynomial stochastic operators and their integral-equation counterparts")]
pub struct Cli {
    #[command(flatten)]
    pub global: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Truncation N for generated examples; elsewhere must match the input.
    #[arg(long, global = true)]
    pub truncate: Option<usize>,
    /// Row tolerance for audits, residual tolerance for solvers.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    Ex1,
    Ex3,
    /// Hypermatrix of the vertex-merging operator built over ex3.
    Merge,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Writes an example kernel (or, for `merge`, a hypermatrix).
    Examples {
        #[arg(long, value_enum)]
        name: ExampleName,
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Rescale the ex1 tents to unit integral.
        #[arg(long)]
        normalize: bool,
    },
    /// Integrates a kernel into its hypermatrix and audits the rows.
    Quadrature { kernel: PathBuf },
    /// Audits a hypermatrix; with no flag every check runs.
    Check {
        matrix: PathBuf,
        #[arg(long)]
        stochastic: bool,
        #[arg(long)]
        op: bool,
        #[arg(long)]
        surjective: bool,
        /// Certify only outputs 1..=K.
        #[arg(long)]
        target_dim: Option<usize>,
    },
    /// Applies V once. VECTOR is a file or an inline list like "0.5,0.5,0".
    Apply { matrix: PathBuf, vector: String },
    /// Iterates V; `--csv` also writes the trajectory as CSV.
    Iterate {
        matrix: PathBuf,
        vector: String,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Solves V x = y for y in the ball.
    Preimage {
        matrix: PathBuf,
        vector: String,
        #[arg(long)]
        target_dim: Option<usize>,
    },
    /// Lists fixed points of V.
    FixedPoints {
        matrix: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_face_dim: usize,
        #[arg(long, default_value_t = 16)]
        multistarts: usize,
    },
    /// Solves A x = φ on a kernel; PHI is a file or inline JSON.
    Solve {
        kernel: PathBuf,
        phi: String,
        /// Also lift every fixed point of V to a fixed function of A.
        #[arg(long)]
        fixed_points: bool,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) => match e {
                Error::Io(_)
                | Error::Json(_)
                | Error::Format(_)
                | Error::InvalidArgument(_)
                | Error::DimensionMismatch { .. }
                | Error::OrderMismatch { .. }
                | Error::IndexOutOfRange { .. }
                | Error::Breakpoints(_)
                | Error::ConflictingEntry { .. } => EXIT_USAGE,
                _ => EXIT_FAILED,
            },
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Result of one command: the JSON document, a short summary and the exit
/// code it implies.
pub struct Outcome {
    pub code: i32,
    pub summary: String,
    pub json: Value,
    /// Emit `json` bare (loadable input files) rather than in a report envelope.
    pub raw: bool,
}

impl Outcome {
    fn report(code: i32, summary: String, json: Value) -> Self {
        Self { code, summary, json, raw: false }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_matrix(path: &Path, cfg: &RunConfig) -> CliResult<Hypermatrix64> {
    let file: HypermatrixFile = serde_json::from_str(&read(path)?).map_err(Error::from)?;
    let p = file.into_matrix()?;
    if let Some(n) = cfg.truncate.filter(|&n| n != p.dim()) {
        return Err(CliError::Usage(format!("--truncate {n} does not match matrix dimension {}", p.dim())));
    }
    Ok(p)
}

fn load_pso(path: &Path, cfg: &RunConfig) -> CliResult<Pso64> {
    Ok(Pso64::with_row_tol(load_matrix(path, cfg)?, cfg.tol.unwrap_or(ROW_TOL))?)
}

fn load_kernel(path: &Path, cfg: &RunConfig) -> CliResult<Kernel64> {
    let mut file: KernelFile = serde_json::from_str(&read(path)?).map_err(Error::from)?;
    if file.a.is_none() {
        if let Some(n) = cfg.truncate {
            file.truncation = n;
        }
    }
    Ok(file.into_kernel()?)
}

/// Inline text or a path to a file holding it.
fn inline_or_file(arg: &str) -> CliResult<String> {
    let path = Path::new(arg);
    if path.is_file() {
        read(path)
    } else if arg.trim_start().starts_with('{') || arg.contains(',') || arg.parse::<f64>().is_ok() {
        Ok(arg.to_string())
    } else {
        Err(CliError::Usage(format!("{arg:?} is neither a file nor an inline value")))
    }
}

fn load_vector(arg: &str, dim: usize) -> CliResult<SimplexVector64> {
    let v = pio::parse_vector(&inline_or_file(arg)?)?;
    if v.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: v.dim() }.into());
    }
    Ok(v)
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|c| format!("{c:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn to_value<S: Serialize>(v: &S) -> CliResult<Value> {
    Ok(serde_json::to_value(v).map_err(Error::from)?)
}

fn solver_config(cfg: &RunConfig, target_dim: Option<usize>) -> SolverConfig {
    SolverConfig {
        solve_tol: cfg.tol.unwrap_or(SOLVE_TOL),
        certify: CertifyConfig { target_dim, ..CertifyConfig::default() },
        ..SolverConfig::default()
    }
}

fn cmd_examples(cfg: &RunConfig, name: ExampleName, m: usize, normalize: bool) -> CliResult<Outcome> {
    let n = cfg.truncate.unwrap_or(6);
    let (json, summary) = match name {
        ExampleName::Ex3 => {
            let k = Kernel64::ex3(m, n)?;
            (to_value(&KernelFile::explicit(&k))?, format!("ex3 kernel, m = {m}, N = {n}"))
        }
        ExampleName::Ex1 => {
            let k = Kernel64::ex1(m, n, normalize)?;
            let tag = if normalize { "normalized" } else { "raw" };
            (to_value(&KernelFile::explicit(&k))?, format!("ex1 kernel ({tag} tents), m = {m}, N = {n}"))
        }
        ExampleName::Merge => {
            let (p, _) = Kernel64::ex3(m, n)?.compute_hypermatrix()?;
            let merged = MergedPso::from_base(Pso64::new(p)?)?;
            (
                to_value(&HypermatrixFile::new(merged.merged().matrix()))?,
                format!("merged ex3 hypermatrix, m = {m}, N = {n}, outputs 1..={}", merged.target_dim()),
            )
        }
    };
    Ok(Outcome { code: EXIT_OK, summary, json, raw: true })
}

fn cmd_quadrature(cfg: &RunConfig, kernel: &Path) -> CliResult<Outcome> {
    let k = load_kernel(kernel, cfg)?;
    let (p, audit) = k.compute_hypermatrix_with(cfg.tol.unwrap_or(ROW_TOL))?;
    let mut json = to_value(&HypermatrixFile::new(&p))?;
    json["audit"] = to_value(&audit)?;
    let summary = if audit.is_clean() {
        format!("stochastic: {} rows within {:e}", audit.rows_checked, audit.row_tol)
    } else {
        format!(
            "NOT stochastic: {} of {} rows deviate (worst {:e}), {} negative entries",
            audit.violations.len(),
            audit.rows_checked,
            audit.worst_deviation(),
            audit.negative_entries.len()
        )
    };
    let code = if audit.is_clean() { EXIT_OK } else { EXIT_FAILED };
    // the matrix file stays loadable by the other commands
    Ok(Outcome { code, summary, json, raw: true })
}

fn cmd_check(cfg: &RunConfig, matrix: &Path, flags: [bool; 3], target_dim: Option<usize>) -> CliResult<Outcome> {
    let [mut stochastic, mut op, mut surjective] = flags;
    if !(stochastic || op || surjective) {
        (stochastic, op, surjective) = (true, true, true);
    }
    let p = load_matrix(matrix, cfg)?;
    let row_tol = cfg.tol.unwrap_or(ROW_TOL);
    let mut json = json!({});
    let mut lines = Vec::new();
    let mut pass = true;
    let audit = p.validate_stochastic_with(row_tol);
    if stochastic {
        pass &= audit.is_clean();
        lines.push(format!("stochastic: {}", audit.is_clean()));
        json["stochastic"] = json!({ "pass": audit.is_clean(), "audit": to_value(&audit)? });
    }
    if op || surjective {
        match Pso64::with_row_tol(p, row_tol) {
            Err(e) => {
                pass = false;
                lines.push(format!("operator checks skipped: {e}"));
                json["error"] = json!(e.to_string());
            }
            Ok(v) => {
                if op {
                    let r = v.check_op();
                    pass &= r.is_op;
                    lines.push(format!("is_op: {} (fixes vertices: {})", r.is_op, r.fixes_vertices));
                    json["op"] = to_value(&r)?;
                }
                if surjective {
                    let c = v.surjectivity_certificate_with(&CertifyConfig { target_dim, ..Default::default() });
                    pass &= c.is_surjective();
                    let verdict = serde_json::to_value(c.verdict).map_err(Error::from)?;
                    lines.push(match c.sequence() {
                        Some(w) => format!("surjectivity: {} with witness {w:?}", verdict.as_str().unwrap_or_default()),
                        None => format!("surjectivity: {}", verdict.as_str().unwrap_or_default()),
                    });
                    json["surjective"] = to_value(&c)?;
                }
            }
        }
    }
    json["pass"] = json!(pass);
    Ok(Outcome::report(if pass { EXIT_OK } else { EXIT_FAILED }, lines.join("\n"), json))
}

fn cmd_apply(cfg: &RunConfig, matrix: &Path, vector: &str) -> CliResult<Outcome> {
    let v = load_pso(matrix, cfg)?;
    let x = load_vector(vector, v.dim())?;
    let y = v.apply(&x)?;
    let summary = format!("V{} = {}", fmt_vec(x.coords()), fmt_vec(y.coords()));
    let json = json!({ "input": to_value(&VectorFile::new(&x))?, "image": to_value(&VectorFile::new(&y))?, "mass": y.mass() });
    Ok(Outcome::report(EXIT_OK, summary, json))
}

fn cmd_iterate(cfg: &RunConfig, matrix: &Path, vector: &str, steps: usize, csv: Option<&Path>) -> CliResult<Outcome> {
    let v = load_pso(matrix, cfg)?;
    let x = load_vector(vector, v.dim())?;
    let traj = v.iterate(&x, steps)?;
    if let Some(path) = csv {
        let mut text = String::from("step");
        for i in 1..=v.dim() {
            text.push_str(&format!(",x{i}"));
        }
        text.push('\n');
        for (s, p) in traj.iter().enumerate() {
            let row: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
            text.push_str(&format!("{s},{}\n", row.join(",")));
        }
        fs::write(path, text).map_err(Error::from)?;
    }
    let last = traj.last().expect("trajectory includes the start");
    let summary = format!("after {steps} steps: {}", fmt_vec(last.coords()));
    let json = json!({ "steps": steps, "trajectory": traj.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>() });
    Ok(Outcome::report(EXIT_OK, summary, json))
}

fn cmd_preimage(cfg: &RunConfig, matrix: &Path, vector: &str, target_dim: Option<usize>) -> CliResult<Outcome> {
    let v = load_pso(matrix, cfg)?;
    let y = load_vector(vector, v.dim())?;
    let solver = solver_config(cfg, target_dim);
    let cert = v.surjectivity_certificate_with(&solver.certify);
    let pre = v.ball_preimage_with_certificate(&y, &cert, &solver)?;
    let summary = format!("x = {}, residual {:e}, certified {}", fmt_vec(pre.x.coords()), pre.residual, pre.certified);
    let code = if pre.certified { EXIT_OK } else { EXIT_FAILED };
    let json = json!({ "target": to_value(&VectorFile::new(&y))?, "preimage": to_value(&pre)?, "certificate": to_value(&cert)? });
    Ok(Outcome::report(code, summary, json))
}

fn cmd_fixed_points(cfg: &RunConfig, matrix: &Path, max_face_dim: usize, multistarts: usize) -> CliResult<Outcome> {
    let v = load_pso(matrix, cfg)?;
    let fp = FixedPointConfig { fix_tol: cfg.tol.unwrap_or(FIX_TOL), max_face_dim, multistarts, seed: cfg.seed, ..Default::default() };
    let points = v.fixed_points(&fp);
    let summary = points.iter().map(|p| fmt_vec(p.coords())).collect::<Vec<_>>().join("\n");
    let json = json!({ "config": to_value(&fp)?, "count": points.len(), "fixed_points": points.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>() });
    Ok(Outcome::report(EXIT_OK, format!("{} fixed points\n{summary}", points.len()), json))
}

fn cmd_solve(cfg: &RunConfig, kernel: &Path, phi: &str, fixed_points: bool) -> CliResult<Outcome> {
    let sys = IntegralSystem64::new(load_kernel(kernel, cfg)?)?;
    let phi: MomentFunction<f64> = serde_json::from_str(&inline_or_file(phi)?).map_err(Error::from)?;
    let sol = sys.solve_integral_equation(&phi, &solver_config(cfg, None))?;
    let mut summary = match &sol.x {
        MomentFunction::Basis { r, weights, .. } => format!("x = {r} * {} over the D' basis, moment residual {:e}", fmt_vec(weights), sol.residual),
        MomentFunction::Raw { .. } => format!("moment residual {:e}", sol.residual),
    };
    let mut json = json!({ "witness": sys.basis().witness, "solution": to_value(&sol)? });
    let mut code = EXIT_OK;
    if fixed_points {
        let fp = FixedPointConfig { seed: cfg.seed, ..Default::default() };
        let lifted = sys.lift_fixed_points(&fp)?;
        if !lifted.iter().all(|l| l.verified) {
            code = EXIT_FAILED;
        }
        summary.push_str(&format!("\n{} fixed functions of A", lifted.len()));
        json["fixed_points"] = to_value(&lifted)?;
    }
    Ok(Outcome::report(code, summary, json))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Examples { .. } => "examples",
        Command::Quadrature { .. } => "quadrature",
        Command::Check { .. } => "check",
        Command::Apply { .. } => "apply",
        Command::Iterate { .. } => "iterate",
        Command::Preimage { .. } => "preimage",
        Command::FixedPoints { .. } => "fixed-points",
        Command::Solve { .. } => "solve",
    }
}

pub fn dispatch(cli: &Cli) -> CliResult<Outcome> {
    let cfg = &cli.global;
    if cfg.tol.is_some_and(|t| t.is_nan() || t <= 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    if cfg.truncate == Some(0) {
        return Err(CliError::Usage("--truncate must be at least 1".into()));
    }
    match &cli.command {
        Command::Examples { name, m, normalize } => cmd_examples(cfg, *name, *m, *normalize),
        Command::Quadrature { kernel } => cmd_quadrature(cfg, kernel),
        Command::Check { matrix, stochastic, op, surjective, target_dim } => {
            cmd_check(cfg, matrix, [*stochastic, *op, *surjective], *target_dim)
        }
        Command::Apply { matrix, vector } => cmd_apply(cfg, matrix, vector),
        Command::Iterate { matrix, vector, steps, csv } => cmd_iterate(cfg, matrix, vector, *steps, csv.as_deref()),
        Command::Preimage { matrix, vector, target_dim } => cmd_preimage(cfg, matrix, vector, *target_dim),
        Command::FixedPoints { matrix, max_face_dim, multistarts } => {
            cmd_fixed_points(cfg, matrix, *max_face_dim, *multistarts)
        }
        Command::Solve { kernel, phi, fixed_points } => cmd_solve(cfg, kernel, phi, *fixed_points),
    }
}

/// Runs a parsed command, writing the summary to `stdout` (or the JSON when
/// no `--out` is given) and errors to `stderr`. Returns the exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let outcome = match dispatch(cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let doc = if outcome.raw {
        outcome.json
    } else {
        let mut doc = json!({ "command": command_name(&cli.command) });
        if !cli.global.no_timestamp {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            doc["generated_at"] = json!(secs);
        }
        doc["exit_code"] = json!(outcome.code);
        doc["result"] = outcome.json;
        doc
    };
    let text = match pio::to_json(&doc) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    match &cli.global.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
            let _ = writeln!(stdout, "{}", outcome.summary);
        }
        None => {
            let _ = writeln!(stderr, "{}", outcome.summary);
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    outcome.code
}

/// Parses `args` (program name first) and runs, mapping parse failures to
/// the usage exit code.
pub fn run_args<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, stdout, stderr),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            code
        }
    }
}
