//! Command-line front end. Every command prints one JSON [`Report`] on
//! standard output.
//!
//! Exit codes: 0 on success, 1 on input errors, 2 when a bound's hypotheses
//! fail or a comparison certificate is invalid.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bounds::{
    canonical_m, canonical_m_lower, comparison_certificate, duan_zhou_bound, entrysum_bound,
    lower_bound, refined_duan_zhou, stanley_bound, upper_bound, Direction,
};
use crate::error::Error;
use crate::extremal::{
    construct_a0, construct_a0_prime, small_t_extremal, verify_conjecture, ExtremalParams,
    SearchOptions,
};
use crate::matrix::Matrix;
use crate::partition::{is_equitable, Partition};
use crate::rooted::{is_rooted_matrix, q_matrix, Rootedness};
use crate::spectral::{left_eigenvector_nonneg, rho_r, spectral_radius_nonneg, PowerOptions};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_ESTABLISHED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qbound", version, about = "Spectral radius bounds from rooted quotient matrices")]
struct Cli {
    /// Convergence tolerance for eigenvalue iterations.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Iteration cap for eigenvalue iterations.
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Accepted for reproducible scripting; every command is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Perron root or largest real eigenvalue.
    #[command(subcommand)]
    Spectral(SpectralCmd),
    /// Tests whether a matrix is rooted and reports the minimal shift.
    RootedCheck(MatrixArg),
    /// Quotient matrix of a partition and an equitability check.
    Quotient(MatrixPartition),
    /// Spectral radius bounds.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Conjectured extremal matrices.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Exhaustive checks of the extremal conjectures.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Debug, Subcommand)]
enum SpectralCmd {
    /// Spectral radius of a nonnegative matrix.
    Radius(MatrixArg),
    /// Largest real eigenvalue of an arbitrary real matrix.
    RhoR(MatrixArg),
}

#[derive(Debug, Args)]
struct MatrixArg {
    #[arg(long)]
    matrix: PathBuf,
}

#[derive(Debug, Args)]
struct MatrixPartition {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    partition: PathBuf,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    partition: PathBuf,
    /// Comparison matrix; the canonical block row-sum matrix when omitted.
    #[arg(long)]
    m: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DirectionArg {
    Upper,
    Lower,
}

#[derive(Debug, Subcommand)]
enum BoundCmd {
    Upper(BoundArgs),
    Lower(BoundArgs),
    DuanZhou {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        refined: bool,
    },
    EntrySum(MatrixArg),
    Stanley {
        #[arg(long)]
        e: u64,
    },
    /// Checks an eigenvector comparison certificate between C and C′.
    Certificate {
        #[arg(long)]
        matrix: PathBuf,
        /// The matrix C′ compared against.
        #[arg(long)]
        compare: PathBuf,
        /// Left multiplier; the identity when omitted.
        #[arg(long)]
        p: Option<PathBuf>,
        /// Right multiplier; the rooting transform when omitted.
        #[arg(long)]
        q: Option<PathBuf>,
        /// Comma-separated vector u with `Qu` an eigenvector of C′.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        u: Vec<f64>,
        /// Comma-separated vector v with `vᵀP` a left eigenvector of C;
        /// the left Perron vector of C when omitted (needs `P = I`).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        v: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value = "upper")]
        direction: DirectionArg,
    },
}

#[derive(Debug, Subcommand)]
enum ConstructCmd {
    A0 {
        #[arg(long)]
        c: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        zero_trace: bool,
    },
    A0Prime {
        #[arg(long)]
        c: usize,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    e: usize,
    #[arg(long, default_value_t = 1_000_000)]
    budget: usize,
    /// Search all (0,1)-matrices instead of the staircase class (n ≤ 3).
    #[arg(long)]
    full: bool,
    /// Also write the maximizer to this file in matrix text format.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum VerifyCmd {
    ConjectureC(VerifyArgs),
    ZeroTrace(VerifyArgs),
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs_digest: String,
    pub result: Value,
    pub warnings: Vec<String>,
}

/// What a run produced: the exit code and the text for each stream.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// A failure that ends the run before a report is produced.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: EXIT_INPUT, message: e.to_string() }
    }
}

type Run<T> = std::result::Result<T, Failure>;

/// Accumulates everything a report depends on.
struct Ctx {
    power: PowerOptions,
    hasher: Sha256,
    warnings: Vec<String>,
    code: i32,
}

impl Ctx {
    fn record(&mut self, name: &str, bytes: &[u8]) {
        self.hasher.update((name.len() as u64).to_le_bytes());
        self.hasher.update(name.as_bytes());
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    fn param(&mut self, name: &str, value: impl std::fmt::Display) {
        self.record(name, value.to_string().as_bytes());
    }

    fn read(&mut self, name: &str, path: &Path) -> Run<String> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure {
            code: EXIT_INPUT,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        self.record(name, text.as_bytes());
        Ok(text)
    }

    fn matrix(&mut self, name: &str, path: &Path) -> Run<Matrix> {
        let text = self.read(name, path)?;
        text.parse().map_err(|e: Error| Failure {
            code: EXIT_INPUT,
            message: format!("{}: {e}", path.display()),
        })
    }

    fn partition(&mut self, path: &Path) -> Run<Partition> {
        let text = self.read("partition", path)?;
        Partition::from_json(&text).map_err(|e| Failure {
            code: EXIT_INPUT,
            message: format!("{}: {e}", path.display()),
        })
    }

    fn vector(&mut self, name: &str, v: &[f64]) {
        let text: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        self.record(name, text.join(",").as_bytes());
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_INPUT, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    let mut power = PowerOptions::default();
    if let Some(t) = cli.tol {
        power.tol = t;
    }
    if let Some(m) = cli.max_iter {
        power.max_iter = m;
    }
    let mut ctx = Ctx { power, hasher: Sha256::new(), warnings: Vec::new(), code: EXIT_OK };
    if !(power.tol.is_finite() && power.tol > 0.0) || power.max_iter == 0 {
        return fail(Failure {
            code: EXIT_INPUT,
            message: "--tol must be positive and --max-iter at least 1".into(),
        });
    }
    let name = command_name(&cli.command);
    ctx.param("command", &name);
    ctx.param("tol", power.tol);
    ctx.param("max_iter", power.max_iter);
    if let Some(seed) = cli.seed {
        ctx.param("seed", seed);
    }

    match dispatch(&mut ctx, &cli.command) {
        Ok(result) => {
            let report = Report {
                schema_version: SCHEMA_VERSION,
                command: name,
                inputs_digest: hex::encode(ctx.hasher.finalize()),
                result,
                warnings: ctx.warnings,
            };
            let mut stdout = serde_json::to_string_pretty(&report).expect("report serializes");
            stdout.push('\n');
            Outcome { code: ctx.code, stdout, stderr: String::new() }
        }
        Err(f) => fail(f),
    }
}

fn fail(f: Failure) -> Outcome {
    let line = f.message.replace('\n', " ");
    Outcome { code: f.code, stdout: String::new(), stderr: format!("error: {line}\n") }
}

fn command_name(cmd: &Command) -> String {
    match cmd {
        Command::Spectral(SpectralCmd::Radius(_)) => "spectral radius",
        Command::Spectral(SpectralCmd::RhoR(_)) => "spectral rho-r",
        Command::RootedCheck(_) => "rooted-check",
        Command::Quotient(_) => "quotient",
        Command::Bound(BoundCmd::Upper(_)) => "bound upper",
        Command::Bound(BoundCmd::Lower(_)) => "bound lower",
        Command::Bound(BoundCmd::DuanZhou { .. }) => "bound duan-zhou",
        Command::Bound(BoundCmd::EntrySum(_)) => "bound entry-sum",
        Command::Bound(BoundCmd::Stanley { .. }) => "bound stanley",
        Command::Bound(BoundCmd::Certificate { .. }) => "bound certificate",
        Command::Construct(ConstructCmd::A0 { .. }) => "construct a0",
        Command::Construct(ConstructCmd::A0Prime { .. }) => "construct a0-prime",
        Command::Verify(VerifyCmd::ConjectureC(_)) => "verify conjecture-c",
        Command::Verify(VerifyCmd::ZeroTrace(_)) => "verify zero-trace",
    }
    .to_string()
}

fn dispatch(ctx: &mut Ctx, cmd: &Command) -> Run<Value> {
    match cmd {
        Command::Spectral(SpectralCmd::Radius(a)) => {
            let c = ctx.matrix("matrix", &a.matrix)?;
            Ok(to_value(&spectral_radius_nonneg(&c, &ctx.power)?))
        }
        Command::Spectral(SpectralCmd::RhoR(a)) => {
            let c = ctx.matrix("matrix", &a.matrix)?;
            let rooted = is_rooted_matrix(&c)?;
            let r = rho_r(&c, &ctx.power)?;
            let value = match r.value {
                Some(v) => json!(v),
                None => {
                    ctx.warnings.push("matrix has no real eigenvalue; rho_r is infinite".into());
                    json!("infinity")
                }
            };
            Ok(json!({
                "value": value,
                "rooted": rooted.is_rooted(),
                "d": rooted.certificate().map(|cert| cert.shift),
                "eigenvector": r.eigenvector,
            }))
        }
        Command::RootedCheck(a) => {
            let c = ctx.matrix("matrix", &a.matrix)?;
            Ok(match is_rooted_matrix(&c)? {
                Rootedness::Rooted(cert) => json!({
                    "rooted": true,
                    "d": cert.shift,
                    "violations": [],
                    "transformed": cert.transformed,
                }),
                Rootedness::NotRooted(v) => json!({
                    "rooted": false,
                    "d": null,
                    "violations": v,
                    "transformed": null,
                }),
            })
        }
        Command::Quotient(a) => {
            let c = ctx.matrix("matrix", &a.matrix)?;
            let p = ctx.partition(&a.partition)?;
            Ok(to_value(&is_equitable(&c, &p, None)?))
        }
        Command::Bound(b) => bound(ctx, b),
        Command::Construct(ConstructCmd::A0 { c, t, n, zero_trace }) => {
            for (k, v) in [("c", c), ("t", t), ("n", n)] {
                ctx.param(k, v);
            }
            ctx.param("zero_trace", zero_trace);
            let a = if *t < 2 {
                ctx.warnings.push(format!("t = {t} is below 2; returning the small-t maximizer"));
                let core = if *zero_trace { c * c.saturating_sub(1) } else { c * c };
                let p = ExtremalParams { n: *n, e: core + t, c: *c, t: *t, zero_trace: *zero_trace };
                small_t_extremal(&p)?.remove(0)
            } else {
                construct_a0(&ExtremalParams::new(*n, *c, *t, *zero_trace)?)?
            };
            constructed(ctx, &a)
        }
        Command::Construct(ConstructCmd::A0Prime { c, n }) => {
            ctx.param("c", c);
            ctx.param("n", n);
            let a = construct_a0_prime(*c, *n)?;
            constructed(ctx, &a)
        }
        Command::Verify(VerifyCmd::ConjectureC(v)) => verify(ctx, v, false),
        Command::Verify(VerifyCmd::ZeroTrace(v)) => verify(ctx, v, true),
    }
}

fn constructed(ctx: &Ctx, a: &Matrix) -> Run<Value> {
    let rho = spectral_radius_nonneg(a, &ctx.power)?.value;
    Ok(json!({
        "matrix": a,
        "text": a.to_text(),
        "ones": a.sum() as u64,
        "rho": rho,
    }))
}

fn bound(ctx: &mut Ctx, cmd: &BoundCmd) -> Run<Value> {
    match cmd {
        BoundCmd::Upper(a) | BoundCmd::Lower(a) => {
            let direction = match cmd {
                BoundCmd::Upper(_) => Direction::Upper,
                _ => Direction::Lower,
            };
            let c = ctx.matrix("matrix", &a.matrix)?;
            let p = ctx.partition(&a.partition)?;
            let m = match &a.m {
                Some(path) => ctx.matrix("m", path)?,
                None => {
                    let canon = match direction {
                        Direction::Upper => canonical_m(&c, &p)?,
                        Direction::Lower => canonical_m_lower(&c, &p)?,
                    };
                    canon.m
                }
            };
            let report = match direction {
                Direction::Upper => upper_bound(&c, &p, &m, &ctx.power),
                Direction::Lower => lower_bound(&c, &p, &m, &ctx.power),
            };
            match report {
                Ok(r) => {
                    if !r.hypothesis_ok {
                        ctx.code = EXIT_NOT_ESTABLISHED;
                        ctx.warnings.push("block row-sum hypotheses fail; no bound is established".into());
                    }
                    if !r.consistent {
                        ctx.warnings.push("bound lies outside the numerical bracket of rho(C)".into());
                    }
                    Ok(to_value(&r))
                }
                Err(Error::NotRooted(v)) => {
                    ctx.code = EXIT_NOT_ESTABLISHED;
                    ctx.warnings.push("M is not rooted; no bound is established".into());
                    Ok(json!({
                        "direction": direction,
                        "bound": null,
                        "m_used": m,
                        "m_rooted": false,
                        "m_violations": v,
                        "hypothesis_ok": false,
                    }))
                }
                Err(e) => Err(e.into()),
            }
        }
        BoundCmd::DuanZhou { matrix, ell, refined } => {
            let c = ctx.matrix("matrix", matrix)?;
            ctx.param("ell", ell);
            ctx.param("refined", refined);
            Ok(if *refined {
                to_value(&refined_duan_zhou(&c, *ell)?)
            } else {
                to_value(&duan_zhou_bound(&c, *ell)?)
            })
        }
        BoundCmd::EntrySum(a) => {
            let c = ctx.matrix("matrix", &a.matrix)?;
            Ok(to_value(&entrysum_bound(&c)?))
        }
        BoundCmd::Stanley { e } => {
            ctx.param("e", e);
            Ok(json!({ "bound": stanley_bound(*e), "e": e }))
        }
        BoundCmd::Certificate { matrix, compare, p, q, u, v, direction } => {
            let c = ctx.matrix("matrix", matrix)?;
            let cp = ctx.matrix("compare", compare)?;
            let n = c.order()?;
            let pmat = match p {
                Some(path) => ctx.matrix("p", path)?,
                None => Matrix::identity(n),
            };
            let qmat = match q {
                Some(path) => ctx.matrix("q", path)?,
                None => q_matrix(n),
            };
            ctx.vector("u", u);
            let v = match v {
                Some(v) => {
                    ctx.vector("v", v);
                    v.clone()
                }
                None => {
                    if p.is_some() {
                        return Err(Failure {
                            code: EXIT_INPUT,
                            message: "--v is required when --p is given".into(),
                        });
                    }
                    left_eigenvector_nonneg(&c, &ctx.power)?.eigenvector
                }
            };
            let dir = match direction {
                DirectionArg::Upper => Direction::Upper,
                DirectionArg::Lower => Direction::Lower,
            };
            ctx.param("direction", format!("{dir:?}"));
            let rep = comparison_certificate(&c, &cp, &pmat, &qmat, u, &v, dir)?;
            if !rep.valid {
                ctx.code = EXIT_NOT_ESTABLISHED;
            }
            Ok(to_value(&rep))
        }
    }
}

fn verify(ctx: &mut Ctx, args: &VerifyArgs, zero_trace: bool) -> Run<Value> {
    ctx.param("n", args.n);
    ctx.param("e", args.e);
    ctx.param("budget", args.budget);
    ctx.param("full", args.full);
    let opts = SearchOptions {
        budget: args.budget,
        full: args.full,
        power: ctx.power,
        ..SearchOptions::default()
    };
    let rep = verify_conjecture(args.n, args.e, zero_trace, &opts)?;
    let text = rep.maximizer.to_text();
    if let Some(path) = &args.out {
        std::fs::write(path, &text).map_err(|e| Failure {
            code: EXIT_INPUT,
            message: format!("cannot write {}: {e}", path.display()),
        })?;
    }
    if rep.bound_violations > 0 {
        ctx.warnings.push(format!(
            "{} candidate(s) exceed their rooted bound",
            rep.bound_violations
        ));
    }
    let mut value = to_value(&rep);
    value["maximizer_text"] = json!(text);
    Ok(value)
}
