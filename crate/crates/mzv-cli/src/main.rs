//! Command-line surface over the `mzv` library: dual indices, series
//! evaluation, duality proof traces, and batch verification sweeps.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input or domain error,
//! 3 unmet convergence precondition.

use std::fmt;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mzv::eval::{
    default_truncation, eval_connected, eval_generating, eval_ohno_sum, eval_qmzv, EvalConfig,
    EvalResult,
};
use mzv::index::Index;
use mzv::scalar::{Params, Regime, Scalar, DEFAULT_PRECISION};
use mzv::suite::{
    derived_tolerance, duality_sweep_indices, run_duality, run_ohno, run_sum_formula,
    run_telescope, DualityOptions, OhnoOptions, SumFormulaOptions, TelescopeOptions,
};
use mzv::transport::{prove_duality, verify_trace_numeric};

enum CliError {
    Usage(String),
    Lib(mzv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(e) => {
                if e.is_convergence() {
                    3
                } else {
                    2
                }
            }
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<mzv::Error> for CliError {
    fn from(e: mzv::Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Writes one line to stdout; a closed pipe ends the process quietly.
fn emit(line: impl fmt::Display) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{line}").is_err() {
        std::process::exit(0);
    }
}

/// Multiple zeta values: dual indices, q-series evaluation, duality proof
/// traces, and verification sweeps.
#[derive(Parser)]
#[command(name = "mzv", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the dual of an admissible index.
    Dual {
        /// Index as comma-separated parts, e.g. "1,2".
        index: String,
    },
    /// Evaluate a series; prints value, tail estimate, and truncation.
    Eval(EvalArgs),
    /// Emit a machine-checkable duality proof trace as JSON.
    Prove(ProveArgs),
    /// Run a verification sweep and report per-case deviations.
    Check(CheckArgs),
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum EvalKind {
    /// Classical zeta(k): qzeta fixed at q = 1.
    Zeta,
    /// q-deformation zeta_q(k).
    Qzeta,
    /// Connected sum Z(left; right) at (q, x).
    Conn,
    /// Generating series Z(k; x), the connected sum with empty right index.
    Gen,
    /// Ohno sum S(k; c): the x^c coefficient of Z(k; x).
    Ohno,
}

#[derive(Args)]
struct EvalArgs {
    /// Series to evaluate.
    #[arg(value_enum)]
    kind: EvalKind,
    /// Index as comma-separated parts, e.g. "1,2".
    index: String,
    /// Right index of the connected sum (conn only).
    right: Option<String>,
    /// Base q in (0, 1], a rational or decimal (qzeta, conn, gen, ohno).
    #[arg(long)]
    q: Option<String>,
    /// Connector parameter x in (-1, 1) (conn, gen).
    #[arg(long)]
    x: Option<String>,
    /// Elevation weight (ohno only).
    #[arg(long)]
    c: Option<u32>,
    /// Truncation bound M >= 1 (default depends on q).
    #[arg(long)]
    trunc: Option<u32>,
    /// Float precision in bits, >= 53 (default 128, or MZV_DEFAULT_PREC).
    #[arg(long)]
    prec: Option<u32>,
    /// Exact rational arithmetic instead of floats.
    #[arg(long)]
    exact: bool,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ProveArgs {
    /// Index as comma-separated parts, e.g. "1,2".
    index: String,
    /// Evaluate every state of the trace and check the value spread.
    #[arg(long)]
    verify: bool,
    /// Base q in (0, 1] for --verify (default 1).
    #[arg(long)]
    q: Option<String>,
    /// Connector parameter x in (-1, 1) for --verify (default 0).
    #[arg(long)]
    x: Option<String>,
    /// Truncation bound for --verify (default depends on q).
    #[arg(long)]
    trunc: Option<u32>,
    /// Float precision in bits for --verify.
    #[arg(long)]
    prec: Option<u32>,
    /// Spread tolerance for --verify (default: tail-derived).
    #[arg(long)]
    tol: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum SuiteKind {
    /// Z(k; x) against Z(dual k; x) over indices and parameter points.
    Duality,
    /// Ohno sums S(k; c) against S(dual k; c).
    Ohno,
    /// Exact telescoping residuals on a rational grid.
    Telescope,
    /// Sums of zeta over fixed weight and depth against zeta(weight).
    Sumformula,
}

#[derive(Args)]
struct CheckArgs {
    /// Sweep to run.
    #[arg(value_enum)]
    suite: SuiteKind,
    /// Largest index weight (duality default 6, ohno default 4).
    #[arg(long)]
    max_weight: Option<u32>,
    /// Largest elevation weight (ohno; default 2).
    #[arg(long)]
    max_c: Option<u32>,
    /// Single weight (sumformula; default sweeps 2..=6).
    #[arg(long)]
    weight: Option<u32>,
    /// Single depth (sumformula; default sweeps all depths).
    #[arg(long)]
    depth: Option<u32>,
    /// Base q in (0, 1] (duality, ohno, sumformula; default 1).
    #[arg(long)]
    q: Option<String>,
    /// Connector parameter x in (-1, 1) (duality; default 0).
    #[arg(long)]
    x: Option<String>,
    /// Parameter grid: "q,x" pairs separated by ';' (duality, telescope).
    #[arg(long)]
    grid: Option<String>,
    /// Largest left window offset (telescope; default 5).
    #[arg(long)]
    m_max: Option<u32>,
    /// Largest right window offset (telescope; default 5).
    #[arg(long)]
    n_max: Option<u32>,
    /// Partial sums run to this bound (telescope; default 30).
    #[arg(long)]
    a_max: Option<u32>,
    /// Truncation bound M >= 1 (default depends on q).
    #[arg(long)]
    trunc: Option<u32>,
    /// Float precision in bits, >= 53 (default 128, or MZV_DEFAULT_PREC).
    #[arg(long)]
    prec: Option<u32>,
    /// Per-case tolerance, a rational or decimal (default: tail-derived).
    #[arg(long)]
    tol: Option<String>,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<ExitCode> {
    match &cli.cmd {
        Cmd::Dual { index } => run_dual(index),
        Cmd::Eval(args) => run_eval(args),
        Cmd::Prove(args) => run_prove(args),
        Cmd::Check(args) => run_check(args),
    }
}

/// Parses a non-empty index argument.
fn parse_index(s: &str) -> CliResult<Index> {
    let k = Index::from_str(s)?;
    if k.is_empty() {
        return Err(usage("an empty index is not accepted as input"));
    }
    Ok(k)
}

/// Parses a scalar flag exactly; rationals, decimals, and exponent forms
/// are all representable without rounding.
fn parse_rational(name: &str, s: &str) -> CliResult<Scalar> {
    Scalar::parse(s, Regime::Exact, DEFAULT_PRECISION)
        .map_err(|_| usage(format!("{name} must be a rational like 1/2 or 0.25, got {s:?}")))
}

fn opt_rational(v: &Option<String>, name: &str) -> CliResult<Option<Scalar>> {
    v.as_deref().map(|s| parse_rational(name, s)).transpose()
}

/// Flag, then MZV_DEFAULT_PREC, then the library default; at least 53 bits.
fn resolve_precision(flag: Option<u32>) -> CliResult<u32> {
    let prec = match flag {
        Some(p) => p,
        None => match std::env::var("MZV_DEFAULT_PREC") {
            Ok(v) => v.trim().parse().map_err(|_| {
                usage(format!(
                    "MZV_DEFAULT_PREC must be an unsigned integer, got {v:?}"
                ))
            })?,
            Err(std::env::VarError::NotPresent) => DEFAULT_PRECISION,
            Err(e) => return Err(usage(format!("MZV_DEFAULT_PREC: {e}"))),
        },
    };
    if prec < 53 {
        return Err(usage(format!("precision must be at least 53 bits, got {prec}")));
    }
    Ok(prec)
}

fn run_dual(index: &str) -> CliResult<ExitCode> {
    let k = parse_index(index)?;
    let d = k.dual()?;
    emit(&d);
    Ok(ExitCode::SUCCESS)
}

fn run_eval(a: &EvalArgs) -> CliResult<ExitCode> {
    if a.q.is_some() && a.kind == EvalKind::Zeta {
        return Err(usage("zeta fixes q = 1; use qzeta to vary the base"));
    }
    if a.x.is_some() && !matches!(a.kind, EvalKind::Conn | EvalKind::Gen) {
        return Err(usage("--x applies to conn and gen"));
    }
    if a.c.is_some() && a.kind != EvalKind::Ohno {
        return Err(usage("--c applies to ohno"));
    }
    if a.right.is_some() && a.kind != EvalKind::Conn {
        return Err(usage("a right index applies to conn"));
    }
    if a.exact && a.prec.is_some() {
        return Err(usage("--prec has no effect with --exact"));
    }

    let k = parse_index(&a.index)?;
    let q = match &a.q {
        Some(s) => parse_rational("--q", s)?,
        None => Scalar::integer(1),
    };
    let x = match &a.x {
        Some(s) => parse_rational("--x", s)?,
        None => Scalar::integer(0),
    };
    let trunc = a.trunc.unwrap_or_else(|| default_truncation(&q));
    let cfg = if a.exact {
        EvalConfig::exact(trunc)
    } else {
        EvalConfig::float(trunc, resolve_precision(a.prec)?)
    };

    let result = match a.kind {
        EvalKind::Zeta | EvalKind::Qzeta => eval_qmzv(&k, &q, &cfg)?,
        EvalKind::Conn => {
            let right = a
                .right
                .as_deref()
                .ok_or_else(|| usage("conn takes two indices: LEFT RIGHT"))?;
            let r = parse_index(right)?;
            let params = Params::new(q, x)?;
            eval_connected(&k, &r, &params, &cfg)?
        }
        EvalKind::Gen => {
            let params = Params::new(q, x)?;
            eval_generating(&k, &params, &cfg)?
        }
        EvalKind::Ohno => {
            let c = a.c.ok_or_else(|| usage("ohno requires --c"))?;
            eval_ohno_sum(&k, c, &q, &cfg)?
        }
    };
    print_eval(&result, a.json);
    Ok(ExitCode::SUCCESS)
}

fn print_eval(r: &EvalResult, json: bool) {
    if json {
        let obj = serde_json::json!({
            "value": r.value.to_decimal_string(),
            "tail_estimate": r.tail_estimate.to_decimal_string(),
            "truncation": r.truncation_used,
            "regime": if r.value.is_exact() { "exact" } else { "float" },
            "precision": r.value.precision(),
        });
        emit(&obj);
    } else {
        emit(format_args!("value       {}", r.value.to_decimal_string()));
        emit(format_args!("tail        {}", r.tail_estimate.to_decimal_string()));
        emit(format_args!("truncation  {}", r.truncation_used));
    }
}

fn run_prove(a: &ProveArgs) -> CliResult<ExitCode> {
    if !a.verify
        && (a.q.is_some()
            || a.x.is_some()
            || a.trunc.is_some()
            || a.prec.is_some()
            || a.tol.is_some())
    {
        return Err(usage("--q, --x, --trunc, --prec, and --tol require --verify"));
    }
    let k = parse_index(&a.index)?;
    let trace = prove_duality(&k)?;
    if !a.verify {
        emit(trace.to_json());
        return Ok(ExitCode::SUCCESS);
    }

    let q = match &a.q {
        Some(s) => parse_rational("--q", s)?,
        None => Scalar::integer(1),
    };
    let x = match &a.x {
        Some(s) => parse_rational("--x", s)?,
        None => Scalar::integer(0),
    };
    let params = Params::new(q, x)?;
    let trunc = a.trunc.unwrap_or_else(|| default_truncation(params.q()));
    let prec = resolve_precision(a.prec)?;
    let cfg = EvalConfig::float(trunc, prec);
    let verification = verify_trace_numeric(&trace, &params, &cfg)?;

    let tails: Vec<&Scalar> = verification
        .per_state
        .iter()
        .map(|ev| &ev.result.tail_estimate)
        .collect();
    let values: Vec<&Scalar> = verification
        .per_state
        .iter()
        .map(|ev| &ev.result.value)
        .collect();
    let tol = match &a.tol {
        Some(s) => parse_rational("--tol", s)?.to_float(prec)?,
        None => derived_tolerance(&tails, &values)?,
    };
    let pass = verification.within(&tol);

    let states: Vec<serde_json::Value> = verification
        .per_state
        .iter()
        .map(|ev| {
            serde_json::json!({
                "left": &ev.state.left,
                "right": &ev.state.right,
                "value": ev.result.value.to_decimal_string(),
                "tail_estimate": ev.result.tail_estimate.to_decimal_string(),
            })
        })
        .collect();
    let report = serde_json::json!({
        "max_deviation": verification.max_deviation.to_decimal_string(),
        "tolerance": tol.to_decimal_string(),
        "pass": pass,
        "states": states,
    });
    emit(trace.to_json());
    emit(&report);
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Parses a grid flag: "q,x" pairs separated by ';'.
fn parse_grid(s: &str) -> CliResult<Vec<Params>> {
    let mut grid = Vec::new();
    for pair in s.split(';') {
        let (qs, xs) = pair.split_once(',').ok_or_else(|| {
            usage(format!(
                "grid entries are \"q,x\" pairs separated by ';', got {pair:?}"
            ))
        })?;
        let q = parse_rational("grid q", qs.trim())?;
        let x = parse_rational("grid x", xs.trim())?;
        grid.push(Params::new(q, x)?);
    }
    Ok(grid)
}

/// The exact default grid: q in {1/4, 1/2, 3/4, 1} by x in {-1/2, 0, 1/3}.
fn default_exact_grid() -> CliResult<Vec<Params>> {
    let qs = [(1i64, 4i64), (1, 2), (3, 4), (1, 1)];
    let xs = [(-1i64, 2i64), (0, 1), (1, 3)];
    let mut grid = Vec::new();
    for q in qs {
        for x in xs {
            grid.push(Params::from_ratios(q, x)?);
        }
    }
    Ok(grid)
}

fn reject_flags(present: &[(&str, bool)], suite: &str) -> CliResult<()> {
    for (name, given) in present {
        if *given {
            return Err(usage(format!("{name} does not apply to the {suite} suite")));
        }
    }
    Ok(())
}

fn run_check(a: &CheckArgs) -> CliResult<ExitCode> {
    let report = match a.suite {
        SuiteKind::Duality => {
            reject_flags(
                &[
                    ("--max-c", a.max_c.is_some()),
                    ("--weight", a.weight.is_some()),
                    ("--depth", a.depth.is_some()),
                    ("--m-max", a.m_max.is_some()),
                    ("--n-max", a.n_max.is_some()),
                    ("--a-max", a.a_max.is_some()),
                ],
                "duality",
            )?;
            let grid = match &a.grid {
                Some(g) => {
                    if a.q.is_some() || a.x.is_some() {
                        return Err(usage("--grid conflicts with --q and --x"));
                    }
                    parse_grid(g)?
                }
                None => {
                    let q = opt_rational(&a.q, "--q")?.unwrap_or_else(|| Scalar::integer(1));
                    let x = opt_rational(&a.x, "--x")?.unwrap_or_else(|| Scalar::integer(0));
                    vec![Params::new(q, x)?]
                }
            };
            let trunc = a.trunc.unwrap_or_else(|| {
                grid.iter()
                    .map(|p| default_truncation(p.q()))
                    .max()
                    .expect("grid is non-empty")
            });
            run_duality(&DualityOptions {
                indices: duality_sweep_indices(a.max_weight.unwrap_or(6)),
                grid,
                cfg: EvalConfig::float(trunc, resolve_precision(a.prec)?),
                tol: opt_rational(&a.tol, "--tol")?,
            })?
        }
        SuiteKind::Ohno => {
            reject_flags(
                &[
                    ("--weight", a.weight.is_some()),
                    ("--depth", a.depth.is_some()),
                    ("--x", a.x.is_some()),
                    ("--grid", a.grid.is_some()),
                    ("--m-max", a.m_max.is_some()),
                    ("--n-max", a.n_max.is_some()),
                    ("--a-max", a.a_max.is_some()),
                ],
                "ohno",
            )?;
            let q = opt_rational(&a.q, "--q")?.unwrap_or_else(|| Scalar::integer(1));
            run_ohno(&OhnoOptions {
                indices: duality_sweep_indices(a.max_weight.unwrap_or(4)),
                c_max: a.max_c.unwrap_or(2),
                q_list: vec![q],
                precision: resolve_precision(a.prec)?,
                truncation: a.trunc,
                tol: opt_rational(&a.tol, "--tol")?,
            })?
        }
        SuiteKind::Telescope => {
            reject_flags(
                &[
                    ("--max-weight", a.max_weight.is_some()),
                    ("--max-c", a.max_c.is_some()),
                    ("--weight", a.weight.is_some()),
                    ("--depth", a.depth.is_some()),
                    ("--q", a.q.is_some()),
                    ("--x", a.x.is_some()),
                    ("--trunc", a.trunc.is_some()),
                    ("--prec", a.prec.is_some()),
                    ("--tol", a.tol.is_some()),
                ],
                "telescope",
            )?;
            let grid = match &a.grid {
                Some(g) => parse_grid(g)?,
                None => default_exact_grid()?,
            };
            run_telescope(&TelescopeOptions {
                grid,
                m_max: a.m_max.unwrap_or(5),
                n_max: a.n_max.unwrap_or(5),
                a_max: a.a_max.unwrap_or(30),
            })?
        }
        SuiteKind::Sumformula => {
            reject_flags(
                &[
                    ("--max-c", a.max_c.is_some()),
                    ("--x", a.x.is_some()),
                    ("--grid", a.grid.is_some()),
                    ("--m-max", a.m_max.is_some()),
                    ("--n-max", a.n_max.is_some()),
                    ("--a-max", a.a_max.is_some()),
                ],
                "sumformula",
            )?;
            let weights = match (a.weight, a.max_weight) {
                (Some(_), Some(_)) => {
                    return Err(usage("--weight conflicts with --max-weight"));
                }
                (Some(w), None) => vec![w],
                (None, mw) => (2..=mw.unwrap_or(6)).collect(),
            };
            let q = opt_rational(&a.q, "--q")?.unwrap_or_else(|| Scalar::integer(1));
            let trunc = a.trunc.unwrap_or_else(|| default_truncation(&q));
            run_sum_formula(&SumFormulaOptions {
                weights,
                depth: a.depth,
                q,
                cfg: EvalConfig::float(trunc, resolve_precision(a.prec)?),
                tol: opt_rational(&a.tol, "--tol")?,
            })?
        }
    };

    if a.json {
        emit(report.to_json());
    } else {
        emit(report.render_text().trim_end());
    }
    Ok(if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
