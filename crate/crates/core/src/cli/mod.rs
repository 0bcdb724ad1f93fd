//! Command-line front end shared by the `hyperderiv` binary and its tests.
//!
//! Exit codes: 0 success, 2 parse error, 3 domain error, 4 usage error,
//! 5 verification failure.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::bch::{bch_product, bch_symmetric, with_doubling, QuadratureRule};
use crate::error::Error;
use crate::hyperop::{d_arrow_pow, delta_arrow_pow, inner_derivation};
use crate::matproof::check::{run_suite, CheckOptions, SCHEMA};
use crate::matproof::fixtures::MAX_DIM;
use crate::matproof::linalg::{expm, identity, logm, relative_residual, CMat};
use crate::ncpoly::{parse, NcPoly, Symbol};
use crate::qderiv::{derivative_hyper, taylor};
use crate::series::ScalarSeries;
pub use config::{Config, SEED_ENV};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_USAGE: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "hyperderiv", version, about = "Noncommutative derivatives, hyperoperators and BCH formulas")]
struct Cli {
    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Variant {
    Symmetric,
    Product,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse an expression and print its canonical form.
    Parse {
        expr: String,
        /// Print the JSON serialization instead.
        #[arg(long)]
        json: bool,
    },
    /// Apply `delta[X]`, `darrow[A->P]` or `deltaarrow[A->B]` to a polynomial.
    Apply {
        #[arg(long)]
        op: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 1)]
        power: usize,
        #[arg(long)]
        json: bool,
    },
    /// n-th derivative hyperoperator of a scalar function and its expansion.
    Derive {
        #[arg(long)]
        f: String,
        #[arg(long, short, visible_alias = "order", default_value_t = 1)]
        n: usize,
        #[arg(long, default_value = "A")]
        var: String,
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Coefficients of `x^k` in `f(A + x B)`.
    Taylor {
        #[arg(long)]
        f: String,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value = "A")]
        a: String,
        #[arg(long, default_value = "B")]
        b: String,
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Quadrature BCH formula on matrices read from JSON.
    Bch {
        #[arg(long, value_enum)]
        variant: Variant,
        /// JSON list of matrices, each a list of rows of `[re, im]` pairs.
        #[arg(long)]
        inputs: PathBuf,
        #[arg(long)]
        nodes: Option<usize>,
        /// Allowed node-doubling change is `tol / 10`.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run identity checks and emit a JSON report.
    Verify {
        /// `all`, a group (`symbolic`, `numeric`, `exponential`) or an identity.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, value_delimiter = ',')]
        dim: Vec<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides every identity tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// List identities instead of running them.
        #[arg(long)]
        list: bool,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    /// Maps a library error; syntax errors get a caret under `source`.
    fn from_error(err: Error, source: Option<(&str, &str)>) -> Self {
        let code = exit_code(&err);
        let message = match (&err, source) {
            (Error::Syntax { offset, message }, Some((label, text))) => caret(label, text, *offset, message),
            _ => format!("error: {err}"),
        };
        Failure { code, message }
    }
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Syntax { .. } => EXIT_PARSE,
        Error::UnknownIdentity(_) | Error::InvalidArgument(_) => EXIT_USAGE,
        _ => EXIT_DOMAIN,
    }
}

/// `error: msg`, the offending input, and a caret under byte `offset`.
pub fn caret(label: &str, text: &str, offset: usize, message: &str) -> String {
    let offset = offset.min(text.len());
    let column = text.char_indices().take_while(|(i, _)| *i < offset).count();
    let prefix = format!("  {label}: ");
    format!(
        "error: syntax error at offset {offset}: {message}\n{prefix}{text}\n{}^",
        " ".repeat(prefix.chars().count() + column)
    )
}

/// Parses argv and runs the command. `HYPERDERIV_SEED` is read from the
/// process environment.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    let result = Config::resolve(cli.config.as_deref(), env_seed.as_deref())
        .map_err(Failure::usage)
        .and_then(|cfg| dispatch(cli.command, &cfg, out, err));
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, cfg: &Config, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Parse { expr, json } => {
            let p = parse(&expr).map_err(|e| Failure::from_error(e, Some(("expr", &expr))))?;
            print_poly(out, &p, json)?;
        }
        Command::Apply { op, to, power, json } => {
            let operator = parse_op(&op).map_err(|e| Failure::from_error(e, Some(("op", &op))))?;
            let p = parse(&to).map_err(|e| Failure::from_error(e, Some(("to", &to))))?;
            let result = operator.apply(&p, power).map_err(|e| Failure::from_error(e, None))?;
            print_poly(out, &result, json)?;
        }
        Command::Derive { f, n, var, truncation } => {
            let series = parse_series(&f, truncation.unwrap_or(cfg.truncation_degree))?;
            let a = parse_symbol(&var, "var")?;
            let hyper = derivative_hyper(&series, n);
            let da = NcPoly::symbol(a.differential());
            let base = NcPoly::symbol(a);
            let expanded = hyper.apply(&vec![da; n], &base).map_err(|e| Failure::from_error(e, None))?;
            emit(out, &format!("hyperoperator: {hyper}\nexpanded: {expanded}"))?;
        }
        Command::Taylor { f, order, a, b, truncation } => {
            let series = parse_series(&f, truncation.unwrap_or(cfg.truncation_degree))?;
            let (a, b) = (parse_symbol(&a, "a")?, parse_symbol(&b, "b")?);
            let coeffs = taylor(&series, &a, &b, order).map_err(|e| Failure::from_error(e, None))?;
            for (k, c) in coeffs.iter().enumerate() {
                emit(out, &format!("x^{k}: {c}"))?;
            }
        }
        Command::Bch { variant, inputs, nodes, tol, out: path } => {
            let report = run_bch(variant, &inputs, nodes.unwrap_or(cfg.quad_nodes), tol)?;
            let json = serde_json::to_string_pretty(&report).expect("serializable");
            if let Some(p) = path {
                write_file(&p, &json)?;
            }
            emit(out, &json)?;
        }
        Command::Verify { suite, dim, trials, seed, tol, report, list } => {
            return run_verify(cfg, VerifyArgs { suite, dim, trials, seed, tol, report, list }, out, err);
        }
    }
    Ok(EXIT_OK)
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    writeln!(out, "{text}").map_err(|e| Failure::usage(format!("error: {e}")))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, format!("{text}\n")).map_err(|e| Failure::usage(format!("error: {}: {e}", path.display())))
}

fn print_poly(out: &mut dyn Write, p: &NcPoly, json: bool) -> Result<(), Failure> {
    if json {
        emit(out, &serde_json::to_string(p).expect("serializable"))
    } else {
        emit(out, &p.to_string())
    }
}

fn parse_series(text: &str, truncation: usize) -> Result<ScalarSeries, Failure> {
    ScalarSeries::parse(text, truncation).map_err(|e| Failure::from_error(e, Some(("f", text))))
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_symbol(text: &str, label: &str) -> Result<Symbol, Failure> {
    if is_identifier(text) {
        Ok(Symbol::new(text))
    } else {
        Err(Failure::from_error(
            Error::Syntax { offset: 0, message: "expected an identifier".into() },
            Some((label, text)),
        ))
    }
}

/// Hyperoperator named on the command line.
#[derive(Clone, Debug, PartialEq)]
pub enum OpSpec {
    /// `delta[X]`: inner derivation by the polynomial `X`.
    Delta(NcPoly),
    /// `darrow[A->P]`: replace one `A` at a time by `P`.
    DArrow(Symbol, NcPoly),
    /// `deltaarrow[A->B]`: `{A^m B^n}_sym -> {A^(m-1) B^(n+1)}_sym`.
    DeltaArrow(Symbol, Symbol),
}

impl OpSpec {
    pub fn apply(&self, p: &NcPoly, power: usize) -> crate::Result<NcPoly> {
        match self {
            OpSpec::Delta(x) => Ok((0..power).fold(p.clone(), |acc, _| inner_derivation(x, &acc))),
            OpSpec::DArrow(a, b) => Ok(d_arrow_pow(a, b, p, power)),
            OpSpec::DeltaArrow(a, b) => delta_arrow_pow(a, b, p, power),
        }
    }
}

fn syntax(offset: usize, message: &str) -> Error {
    Error::Syntax { offset, message: message.to_string() }
}

/// Parses `name[args]`. Offsets in errors refer to `text`.
pub fn parse_op(text: &str) -> crate::Result<OpSpec> {
    let open = text.find('[').ok_or_else(|| syntax(text.len(), "expected `[`"))?;
    let close = text.rfind(']').filter(|&c| c > open).ok_or_else(|| syntax(text.len(), "expected `]`"))?;
    if !text[close + 1..].trim().is_empty() {
        return Err(syntax(close + 1, "unexpected text after `]`"));
    }
    let name = text[..open].trim();
    let inner = &text[open + 1..close];
    let shift = |e: Error, base: usize| match e {
        Error::Syntax { offset, message } => Error::Syntax { offset: offset + base, message },
        other => other,
    };
    let arrow = |text_inner: &str| -> crate::Result<(Symbol, usize)> {
        let at = text_inner.find("->").ok_or_else(|| syntax(open + 1 + text_inner.len(), "expected `->`"))?;
        let lhs = text_inner[..at].trim();
        if !is_identifier(lhs) {
            return Err(syntax(open + 1, "expected an identifier before `->`"));
        }
        Ok((Symbol::new(lhs), open + 1 + at + 2))
    };
    match name {
        "delta" => Ok(OpSpec::Delta(parse(inner).map_err(|e| shift(e, open + 1))?)),
        "darrow" => {
            let (a, rhs_at) = arrow(inner)?;
            let rhs = parse(&text[rhs_at..close]).map_err(|e| shift(e, rhs_at))?;
            Ok(OpSpec::DArrow(a, rhs))
        }
        "deltaarrow" => {
            let (a, rhs_at) = arrow(inner)?;
            let rhs = text[rhs_at..close].trim();
            if !is_identifier(rhs) {
                return Err(syntax(rhs_at, "expected an identifier after `->`"));
            }
            Ok(OpSpec::DeltaArrow(a, Symbol::new(rhs)))
        }
        _ => Err(syntax(0, "unknown operator; expected delta, darrow or deltaarrow")),
    }
}

type JsonMatrix = Vec<Vec<[f64; 2]>>;

/// Output of the `bch` command.
#[derive(Debug, Serialize)]
pub struct BchReport {
    pub schema: &'static str,
    pub variant: &'static str,
    pub nodes: usize,
    pub matrix: JsonMatrix,
    /// Relative residual against the principal matrix logarithm.
    pub residual: f64,
}

pub fn matrix_from_json(rows: &JsonMatrix) -> Result<CMat, String> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err("each input must be a non-empty square matrix".into());
    }
    Ok(CMat::from_fn(d, d, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

pub fn matrix_to_json(m: &CMat) -> JsonMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

fn run_bch(variant: Variant, inputs: &Path, nodes: usize, tol: f64) -> Result<BchReport, Failure> {
    let text =
        std::fs::read_to_string(inputs).map_err(|e| Failure::usage(format!("error: {}: {e}", inputs.display())))?;
    let parse_failure = |m: String| Failure { code: EXIT_PARSE, message: format!("error: {}: {m}", inputs.display()) };
    let raw: Vec<JsonMatrix> = serde_json::from_str(&text).map_err(|e| parse_failure(e.to_string()))?;
    let ms = raw.iter().map(matrix_from_json).collect::<Result<Vec<_>, _>>().map_err(parse_failure)?;
    if ms.is_empty() || ms.iter().any(|m| m.nrows() != ms[0].nrows()) {
        return Err(parse_failure("inputs must be one or more matrices of equal size".into()));
    }
    let lib = |e| Failure::from_error(e, None);
    let (z, group) = match variant {
        Variant::Symmetric => {
            if ms.len() != 2 {
                return Err(Failure::usage("error: the symmetric variant takes exactly two matrices"));
            }
            let (a, b) = (&ms[0], &ms[1]);
            let z = with_doubling(nodes, tol, |q: &QuadratureRule| bch_symmetric(a, b, q)).map_err(lib)?;
            let ea = expm(a);
            (z, &ea * expm(b) * &ea)
        }
        Variant::Product => {
            let z = with_doubling(nodes, tol, |q: &QuadratureRule| bch_product(&ms, q)).map_err(lib)?;
            let d = ms[0].nrows();
            (z, ms.iter().fold(identity(d), |acc, m| acc * expm(m)))
        }
    };
    let reference = logm(&group).map_err(lib)?;
    Ok(BchReport {
        schema: SCHEMA,
        variant: match variant {
            Variant::Symmetric => "symmetric",
            Variant::Product => "product",
        },
        nodes,
        matrix: matrix_to_json(&z),
        residual: relative_residual(&z, &reference),
    })
}

struct VerifyArgs {
    suite: String,
    dim: Vec<usize>,
    trials: Option<usize>,
    seed: Option<u64>,
    tol: Option<f64>,
    report: Option<PathBuf>,
    list: bool,
}

fn run_verify(cfg: &Config, args: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let identities = crate::matproof::catalog::select(&args.suite).map_err(|e| Failure::from_error(e, None))?;
    if args.list {
        for i in identities {
            emit(out, &format!("{:<28} {:<12} {}", i.name, i.group.name(), i.summary))?;
        }
        return Ok(EXIT_OK);
    }
    let dims = if args.dim.is_empty() { cfg.dims.clone() } else { args.dim };
    if let Some(&d) = dims.iter().find(|&&d| !(2..=MAX_DIM).contains(&d)) {
        return Err(Failure::usage(format!("error: dimension {d} outside 2..={MAX_DIM}")));
    }
    if args.tol.is_some_and(|t| t.is_nan() || t <= 0.0) {
        return Err(Failure::usage("error: --tol must be positive"));
    }
    let opts = CheckOptions {
        trials: args.trials.unwrap_or(cfg.trials),
        seed: args.seed.unwrap_or(cfg.seed),
        tol: args.tol,
        tol_exact: cfg.tol_exact,
        tol_fd: cfg.tol_fd,
        perturbation: None,
    };
    if opts.trials == 0 {
        return Err(Failure::usage("error: --trials must be positive"));
    }
    let reports = run_suite(&args.suite, &dims, &opts).map_err(|e| Failure::from_error(e, None))?;
    let json = serde_json::to_string_pretty(&reports).expect("serializable");
    if let Some(path) = args.report.or_else(|| cfg.report_path.clone()) {
        write_file(&path, &json)?;
    }
    emit(out, &json)?;
    for r in &reports {
        let _ = writeln!(
            err,
            "{} {:<28} d={} residual={:e} tol={:e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.identity,
            r.dim,
            r.max_residual,
            r.tol
        );
    }
    Ok(if reports.iter().all(|r| r.pass) { EXIT_OK } else { EXIT_VERIFY })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("hyperderiv").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn apply_examples() {
        assert_eq!(run_args(&["apply", "--op", "delta[A]", "--to", "B"]).1.trim(), "A*B - B*A");
        assert_eq!(run_args(&["apply", "--op", "darrow[A->B]", "--to", "A*B*A"]).1.trim(), "A*B*B + B*B*A");
        let (code, _, err) = run_args(&["apply", "--op", "deltaarrow[A->B]", "--to", "A*B - B*A"]);
        assert_eq!(code, EXIT_DOMAIN, "{err}");
    }

    #[test]
    fn parse_errors_get_a_caret() {
        let (code, _, err) = run_args(&["parse", "A*B)"]);
        assert_eq!(code, EXIT_PARSE);
        let lines: Vec<&str> = err.lines().collect();
        assert_eq!(lines[1], "  expr: A*B)");
        assert_eq!(lines[2].find('^'), Some("  expr: A*B".len()));
    }

    #[test]
    fn op_parser() {
        assert_eq!(parse_op("delta[A]").unwrap(), OpSpec::Delta(parse("A").unwrap()));
        assert_eq!(parse_op("darrow[A -> B*C]").unwrap(), OpSpec::DArrow(Symbol::new("A"), parse("B*C").unwrap()));
        assert!(matches!(parse_op("deltaarrow[A->B*C]"), Err(Error::Syntax { offset: 14, .. })));
        assert!(matches!(parse_op("nabla[A]"), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse_op("delta[A*]"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn derive_and_taylor() {
        let (code, out, _) = run_args(&["derive", "--f", "x^2", "--n", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out, "hyperoperator: 2*Â - δ̂1\nexpanded: A*dA + dA*A\n");
        let (_, out, _) = run_args(&["taylor", "--f", "x^3", "--order", "2"]);
        assert_eq!(out, "x^0: A*A*A\nx^1: A*A*B + A*B*A + B*A*A\nx^2: A*B*B + B*A*B + B*B*A\n");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args(&["verify", "--suite", "nope"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["verify", "--dim", "9", "--suite", "lemma2"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn verify_exit_codes() {
        let (code, out, _) = run_args(&["verify", "--suite", "lemma2", "--dim", "2", "--trials", "2"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("\"schema\": \"hyperderiv/1\""));
        let (code, _, _) = run_args(&["verify", "--suite", "lemma2", "--dim", "2", "--trials", "2", "--tol", "1e-30"]);
        assert_eq!(code, EXIT_VERIFY);
    }
}
