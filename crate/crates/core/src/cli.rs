//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad usage or input domain,
//! 3 I/O failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::analysis::{
    converge_1d, degeneracy_survey, spectrum, write_convergence_csv, write_survey_csv, zeta_action,
};
use crate::calculus::{blocks, commutator, off_block_residual, BlockSummary};
use crate::dirac::{
    check_couplings, parse_couplings, validate_axioms, AxiomReport, DiracOperator, FiniteTriple,
    LatticeTriple, Normalization, AXIOM_TOLERANCE,
};
use crate::product::{leibniz_residual, limit_frame_2d, limit_study, tensor_triple, LimitRow};
use crate::qmatrix::{build_q, det_sequence, Shape};
use crate::samples::{lattice_spacing, TestFunction};
use crate::triple::AlgebraElement;
use crate::{Error, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const SEED_ENV: &str = "FINTRIPLE_SEED";

/// Leibniz residual bound used by `product --check-leibniz`.
pub const LEIBNIZ_TOLERANCE: f64 = 1e-12;

#[derive(Parser, Debug)]
#[command(
    name = "fintriple",
    version,
    about = "Finite real spectral triples on lattice circles and segments"
)]
struct Cli {
    /// Seed for pseudorandom algebra elements (decimal or 0x-hex).
    /// Falls back to FINTRIPLE_SEED, then to the built-in default.
    #[arg(long, global = true, value_parser = parse_seed)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy, PartialEq, Eq, Default)]
#[group(multiple = false)]
pub struct FormatArgs {
    /// JSON output (default).
    #[arg(long)]
    pub json: bool,
    /// CSV output.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Command {
    /// Intersection matrix, determinant and kernel dimension.
    Qmatrix {
        #[arg(long, value_enum)]
        shape: Shape,
        #[arg(long)]
        n: usize,
        /// Also list determinants from the smallest size up to MAX.
        #[arg(long, value_name = "MAX")]
        det_seq: Option<usize>,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Run the axiom checks on a lattice triple.
    Validate {
        #[arg(long, value_enum)]
        shape: Shape,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t)]
        normalization: Normalization,
        /// Replace the default Dirac operator by couplings read from FILE
        /// (lines `i,j,k,l,re,im`).
        #[arg(long, value_name = "FILE")]
        couplings: Option<PathBuf>,
    },
    /// Per-point blocks of [D, a].
    Commutator {
        #[arg(long, value_enum)]
        shape: Shape,
        #[arg(long)]
        n: usize,
        /// sin, cos, exp, linear, const or file:PATH.
        #[arg(long = "fn", value_parser = check_fn_spec)]
        function: String,
        /// Wave number for `exp`.
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, value_enum, default_value_t)]
        normalization: Normalization,
        /// Report only the block at point L.
        #[arg(long, value_name = "L")]
        block: Option<usize>,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Product of two circles.
    Product {
        /// Points per factor.
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = check_fn_spec)]
        fn_x: String,
        #[arg(long, value_parser = check_fn_spec)]
        fn_y: String,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, value_enum, default_value_t)]
        normalization: Normalization,
        /// Also test the Leibniz identity on seeded random elements and fail
        /// if it is violated.
        #[arg(long)]
        check_leibniz: bool,
        /// Comma-separated sizes for the projected-block study.
        #[arg(long, value_delimiter = ',', value_name = "N1,N2,...")]
        limit_study: Vec<usize>,
    },
    /// Convergence of the rotated block values to |a′|.
    Converge {
        #[arg(long, value_enum)]
        shape: Shape,
        #[arg(long = "fn", value_parser = check_fn_spec)]
        function: String,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, value_delimiter = ',', required = true, value_name = "N1,N2,...")]
        n_list: Vec<usize>,
        #[arg(long, value_enum, default_value_t)]
        normalization: Normalization,
        /// Write the table to PATH as CSV (`-` for standard output).
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Partial sums of |λ|^(−s) over the Dirac spectrum (exploratory).
    Zeta {
        #[arg(long, value_enum)]
        shape: Shape,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: f64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        cutoff: u64,
        #[arg(long, value_enum, default_value_t)]
        normalization: Normalization,
    },
    /// Determinant and kernel dimension for every size up to N_MAX.
    Survey {
        #[arg(long, value_enum)]
        shape: Shape,
        #[arg(long)]
        n_max: usize,
        #[command(flatten)]
        format: FormatArgs,
    },
}

/// Parsed invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
}

/// Rejected command line. `exit_code` is 0 for `--help` and `--version`.
#[derive(Debug)]
pub struct UsageError {
    pub message: String,
    pub exit_code: i32,
}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for UsageError {}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => s.replace('_', "").parse(),
    };
    parsed.map_err(|e| format!("invalid seed `{s}`: {e}"))
}

fn check_fn_spec(s: &str) -> Result<String, String> {
    let builtin = ["sin", "cos", "exp", "linear", "const"];
    if builtin.contains(&s) || s.strip_prefix("file:").is_some_and(|p| !p.is_empty()) {
        Ok(s.to_string())
    } else {
        Err(format!(
            "expected one of {} or file:PATH",
            builtin.join(", ")
        ))
    }
}

/// Parses `argv` (including the program name), reading the seed fallback from
/// the environment.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    parse_args_with_env(argv, std::env::var(SEED_ENV).ok().as_deref())
}

/// Like [`parse_args`] with an explicit value standing in for `FINTRIPLE_SEED`.
pub fn parse_args_with_env<I, T>(argv: I, env_seed: Option<&str>) -> Result<RunConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| UsageError {
        message: e.render().to_string(),
        exit_code: if e.use_stderr() { EXIT_USAGE } else { EXIT_OK },
    })?;
    let seed = match (cli.seed, env_seed) {
        (Some(s), _) => s,
        (None, Some(v)) => parse_seed(v).map_err(|m| UsageError {
            message: format!("{SEED_ENV}: {m}"),
            exit_code: EXIT_USAGE,
        })?,
        (None, None) => DEFAULT_SEED,
    };
    Ok(RunConfig {
        command: cli.command,
        seed,
    })
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Csv(c) if matches!(c.kind(), csv::ErrorKind::Io(_)) => EXIT_IO,
        Error::Json(j) if j.is_io() => EXIT_IO,
        Error::PatternViolation { .. }
        | Error::ChiralityViolation { .. }
        | Error::SymmetryViolation { .. }
        | Error::UnknownSubspace(_)
        | Error::NotBlockDiagonal { .. }
        | Error::NotSelfAdjoint { .. }
        | Error::AxiomFailure { .. } => EXIT_CHECK_FAILED,
        _ => EXIT_USAGE,
    }
}

/// Runs a parsed command, writing the report to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut warnings = Vec::new();
    match execute(config, out, &mut warnings) {
        Ok(code) => {
            for w in &warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            code
        }
        Err(e) => {
            for w in &warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Parses `argv` and runs it against the process streams.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(argv) {
        Ok(cfg) => run(&cfg, &mut io::stdout().lock(), &mut io::stderr().lock()),
        Err(u) => {
            if u.exit_code == EXIT_OK {
                print!("{}", u.message);
            } else {
                eprint!("{}", u.message);
            }
            u.exit_code
        }
    }
}

fn emit_json<T: Serialize + ?Sized>(out: &mut dyn Write, value: &T) -> crate::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn degeneracy_warning(shape: Shape, n: usize, warnings: &mut Vec<String>) -> crate::Result<()> {
    if build_q(shape, n)?.is_degenerate() {
        warnings.push(Error::DegenerateSize { shape, n }.to_string());
    }
    Ok(())
}

fn load_function(spec: &str, k: f64) -> crate::Result<TestFunction> {
    TestFunction::parse(spec, k)
}

#[derive(Serialize)]
struct QmatrixReport {
    shape: Shape,
    n: usize,
    entries: Vec<Vec<i64>>,
    det: String,
    kernel_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    det_sequence: Option<Vec<SeqEntry>>,
}

#[derive(Serialize)]
struct SeqEntry {
    n: usize,
    det: i64,
}

#[derive(Serialize)]
struct ValidateReport<'a> {
    shape: Shape,
    n: usize,
    normalization: Normalization,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    couplings: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coupling_check: Option<String>,
    warnings: &'a [String],
    tolerance: f64,
    checks: &'a [crate::dirac::AxiomCheck],
    all_pass: bool,
}

#[derive(Serialize)]
struct CommutatorReport<'a> {
    shape: Shape,
    n: usize,
    function: String,
    normalization: Normalization,
    warnings: &'a [String],
    off_block_residual: f64,
    blocks: Vec<BlockSummary>,
}

#[derive(Serialize)]
struct ProductReport<'a> {
    n: usize,
    fn_x: String,
    fn_y: String,
    normalization: Normalization,
    seed: u64,
    axioms: &'a AxiomReport,
    leibniz_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    leibniz_random_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    anticomm_norm: Option<f64>,
    block_sv_table: Vec<LimitRow>,
}

fn execute(
    config: &RunConfig,
    out: &mut dyn Write,
    warnings: &mut Vec<String>,
) -> crate::Result<i32> {
    match &config.command {
        Command::Qmatrix {
            shape,
            n,
            det_seq,
            format,
        } => {
            let q = build_q(*shape, *n)?;
            let seq = match det_seq {
                Some(max) => {
                    let dets = det_sequence(*shape, *max)?;
                    Some(
                        dets.into_iter()
                            .enumerate()
                            .map(|(k, det)| SeqEntry {
                                n: shape.min_size() + k,
                                det,
                            })
                            .collect::<Vec<_>>(),
                    )
                }
                None => None,
            };
            if format.csv {
                let mut w = csv::WriterBuilder::new()
                    .has_headers(false)
                    .from_writer(&mut *out);
                match &seq {
                    Some(seq) => {
                        w.write_record(["n", "det"])?;
                        for e in seq {
                            w.write_record([e.n.to_string(), e.det.to_string()])?;
                        }
                    }
                    None => {
                        for row in q.rows() {
                            w.write_record(row.iter().map(i64::to_string))?;
                        }
                    }
                }
                w.flush()?;
            } else {
                emit_json(
                    out,
                    &QmatrixReport {
                        shape: *shape,
                        n: *n,
                        entries: q.rows(),
                        det: q.determinant().to_string(),
                        kernel_dim: q.kernel_dimension(),
                        det_sequence: seq,
                    },
                )?;
            }
            Ok(EXIT_OK)
        }
        Command::Validate {
            shape,
            n,
            normalization,
            couplings,
        } => {
            degeneracy_warning(*shape, *n, warnings)?;
            let mut triple = LatticeTriple::new(*shape, *n, *normalization)?;
            let mut coupling_check = None;
            if let Some(path) = couplings {
                let text = std::fs::read_to_string(path)?;
                let basis = triple.basis().clone();
                let origin = path.display().to_string();
                let c =
                    parse_couplings(&text, &origin, lattice_spacing(*shape, *n), *normalization)?;
                if let Err(e) = check_couplings(&basis, &c) {
                    coupling_check = Some(e.to_string());
                }
                triple = LatticeTriple::with_dirac(DiracOperator::assemble_unchecked(&basis, c)?);
            }
            let report = validate_axioms(&triple, config.seed, AXIOM_TOLERANCE);
            let ok = report.all_pass() && coupling_check.is_none();
            emit_json(
                out,
                &ValidateReport {
                    shape: *shape,
                    n: *n,
                    normalization: *normalization,
                    seed: config.seed,
                    couplings: couplings.as_ref().map(|p| p.display().to_string()),
                    coupling_check,
                    warnings,
                    tolerance: report.tolerance,
                    checks: &report.checks,
                    all_pass: ok,
                },
            )?;
            Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Commutator {
            shape,
            n,
            function,
            k,
            normalization,
            block,
            format,
        } => {
            degeneracy_warning(*shape, *n, warnings)?;
            let f = load_function(function, *k)?;
            let t = LatticeTriple::new(*shape, *n, *normalization)?;
            let a = f.sample(*shape, *n)?;
            let c = commutator(t.dirac(), &a)?;
            let residual = off_block_residual(&c, t.basis());
            let sets = blocks(&c, t.dirac())?;
            let mut summaries: Vec<BlockSummary> = sets.iter().map(BlockSummary::from).collect();
            if let Some(l) = block {
                if *l >= *n {
                    return Err(Error::InvalidArgument(format!(
                        "block {l} out of range for n = {n}"
                    )));
                }
                summaries.retain(|b| b.l == *l);
            }
            if format.csv {
                let mut w = csv::Writer::from_writer(&mut *out);
                w.write_record([
                    "l",
                    "nu",
                    "a_minus_re",
                    "a_minus_im",
                    "a_plus_re",
                    "a_plus_im",
                ])?;
                let cell =
                    |z: Option<[f64; 2]>, k: usize| z.map(|v| v[k].to_string()).unwrap_or_default();
                for b in &summaries {
                    w.write_record([
                        b.l.to_string(),
                        b.nu.to_string(),
                        cell(b.a_minus, 0),
                        cell(b.a_minus, 1),
                        cell(b.a_plus, 0),
                        cell(b.a_plus, 1),
                    ])?;
                }
                w.flush()?;
            } else {
                emit_json(
                    out,
                    &CommutatorReport {
                        shape: *shape,
                        n: *n,
                        function: f.to_string(),
                        normalization: *normalization,
                        warnings,
                        off_block_residual: residual,
                        blocks: summaries,
                    },
                )?;
            }
            Ok(EXIT_OK)
        }
        Command::Product {
            n,
            fn_x,
            fn_y,
            k,
            normalization,
            check_leibniz,
            limit_study: sizes,
        } => {
            let (fx, fy) = (load_function(fn_x, *k)?, load_function(fn_y, *k)?);
            let left = LatticeTriple::new(Shape::Circle, *n, *normalization)?;
            let right = LatticeTriple::new(Shape::Circle, *n, *normalization)?;
            let p = tensor_triple(left, right, config.seed)?;
            let a = fx.sample(Shape::Circle, *n)?;
            let b = fy.sample(Shape::Circle, *n)?;
            let residual = leibniz_residual(&p, &a, &b)?;
            let random_residual = if *check_leibniz {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                let mut worst: f64 = 0.0;
                for _ in 0..crate::dirac::AXIOM_SAMPLES {
                    let ra = AlgebraElement::random(*n, &mut rng);
                    let rb = AlgebraElement::random(*n, &mut rng);
                    worst = worst.max(leibniz_residual(&p, &ra, &rb)?);
                }
                Some(worst)
            } else {
                None
            };
            let analytic = fx.derivative(0.0).is_some() && fy.derivative(0.0).is_some();
            let mut anticomm = None;
            let mut table = Vec::new();
            if analytic {
                match limit_frame_2d(&p, &a, &b) {
                    Ok(projected) => {
                        anticomm = Some(
                            projected
                                .iter()
                                .map(|blk| blk.anticommutator_norm)
                                .fold(0.0, f64::max),
                        )
                    }
                    Err(e @ Error::DegeneratePair { .. }) => warnings.push(e.to_string()),
                    Err(e) => return Err(e),
                }
                let mut study_sizes = sizes.clone();
                if study_sizes.is_empty() {
                    study_sizes.push(*n);
                }
                table = limit_study(&fx, &fy, &study_sizes, *normalization, config.seed)?;
            } else if !sizes.is_empty() {
                return Err(Error::InvalidArgument(
                    "--limit-study needs analytic functions".into(),
                ));
            }
            let failed = residual > LEIBNIZ_TOLERANCE
                || random_residual.is_some_and(|r| r > LEIBNIZ_TOLERANCE);
            emit_json(
                out,
                &ProductReport {
                    n: *n,
                    fn_x: fx.to_string(),
                    fn_y: fy.to_string(),
                    normalization: *normalization,
                    seed: config.seed,
                    axioms: p.report(),
                    leibniz_residual: residual,
                    leibniz_random_residual: random_residual,
                    anticomm_norm: anticomm,
                    block_sv_table: table,
                },
            )?;
            Ok(if failed { EXIT_CHECK_FAILED } else { EXIT_OK })
        }
        Command::Converge {
            shape,
            function,
            k,
            n_list,
            normalization,
            csv,
        } => {
            let f = load_function(function, *k)?;
            let study = converge_1d(&f, *shape, n_list, *normalization)?;
            match csv.as_deref() {
                Some(p) if p.as_os_str() == "-" => {
                    write_convergence_csv(&study.records, &mut *out)?
                }
                Some(p) => {
                    write_convergence_csv(&study.records, File::create(p)?)?;
                    emit_json(out, &study)?;
                }
                None => emit_json(out, &study)?,
            }
            Ok(EXIT_OK)
        }
        Command::Zeta {
            shape,
            n,
            s,
            cutoff,
            normalization,
        } => {
            degeneracy_warning(*shape, *n, warnings)?;
            let t = LatticeTriple::new(*shape, *n, *normalization)?;
            let spec = spectrum(t.dirac_matrix(), *n)?;
            let z = zeta_action(&spec, *s, usize::try_from(*cutoff).unwrap_or(usize::MAX))?;
            emit_json(
                out,
                &json!({
                    "shape": shape,
                    "n": n,
                    "normalization": normalization,
                    "warnings": warnings,
                    "kernel_dim": spec.kernel_dim,
                    "symmetry_residual": spec.symmetry_residual(),
                    "eigenvalues": spec.eigenvalues,
                    "zeta": z,
                }),
            )?;
            Ok(EXIT_OK)
        }
        Command::Survey {
            shape,
            n_max,
            format,
        } => {
            let rows = degeneracy_survey(*shape, *n_max)?;
            if format.csv {
                write_survey_csv(&rows, &mut *out)?;
            } else {
                emit_json(out, &json!({ "shape": shape, "rows": rows }))?;
            }
            Ok(EXIT_OK)
        }
    }
}
