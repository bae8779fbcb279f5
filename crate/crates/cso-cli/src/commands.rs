//! The seven subcommands.  Each returns the process exit code on success;
//! errors are mapped to exit codes in `main`.

use std::fs;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use cso_core::approx::{
    certify_with_cap, verify_certificate, ApproxCertificate, COracle, KakutaniOracle, ScanOracle,
    DEFAULT_N_SEARCH_CAP,
};
use cso_core::io as core_io;
use cso_core::linalg::CMat;
use cso_core::scalar::{format_rational, parse_rational};
use cso_core::shift::{
    assemble_shift_matrix, decompose, shift_distance, truncate_by_threshold, ConjugationSpec,
    DecompositionReport,
};
use cso_core::sst::{principal_submatrix, sot_residual_grid, sst_approximant, DenseOperator};
use cso_core::weights::{sequence_by_spec, AccumulationReport, DEFAULT_SCAN_LIMIT};
use cso_core::{fit, CoreError, Rational, Result};

use crate::output::{emit, resolve_out, to_json_doc, Format};

/// Largest prefix any list-emitting command will materialize.
const PREFIX_CAP: u64 = 1 << 22;

fn check_prefix(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(CoreError::domain("prefix length must be ≥ 1"));
    }
    if n > PREFIX_CAP {
        return Err(CoreError::domain(format!(
            "prefix length {n} exceeds the emission cap {PREFIX_CAP}"
        )));
    }
    Ok(n)
}

fn parse_positive_rational(s: &str, what: &str) -> Result<Rational> {
    let r = parse_rational(s)?;
    if r <= Rational::from_integer(0.into()) {
        return Err(CoreError::domain(format!("{what} must be > 0, got {s}")));
    }
    Ok(r)
}

fn unsupported_format(command: &str, format: Format) -> CoreError {
    CoreError::domain(format!(
        "`{command}` does not support --format {}",
        match format {
            Format::Text => "text",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    ))
}

fn complex_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| [m[(r, c)].re, m[(r, c)].im])
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// weights
// ---------------------------------------------------------------------------

/// Emit the first weights of a named sequence as exact rationals.
#[derive(Debug, Args)]
pub struct WeightsArgs {
    /// Sequence: `kakutani`, `example`, or `file:<path>`.
    #[arg(long = "seq")]
    pub seq: String,
    /// Number of leading weights to emit.
    #[arg(long = "n")]
    pub n: u64,
    /// Output format: `text` is one `p/q` value per line.
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Output file (stdout when absent; relative paths land in $CSO_OUT_DIR).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct WeightsDoc {
    sequence: String,
    prefix_len: u64,
    values: Vec<String>,
}

pub fn weights(args: &WeightsArgs) -> Result<i32> {
    let n = check_prefix(args.n)?;
    let seq = sequence_by_spec(&args.seq)?;
    let values: Vec<Rational> = (1..=n).map(|i| seq.eval(i)).collect::<Result<_>>()?;
    let rendered: Vec<String> = values.iter().map(format_rational).collect();
    let payload = match args.format {
        Format::Text => {
            let mut s = rendered.join("\n");
            s.push('\n');
            s
        }
        Format::Json => to_json_doc(&WeightsDoc {
            sequence: seq.name().to_string(),
            prefix_len: n,
            values: rendered,
        })?,
        Format::Csv => {
            let mut s = String::from("n,value\n");
            for (i, v) in rendered.iter().enumerate() {
                s.push_str(&format!("{},{v}\n", i + 1));
            }
            s
        }
    };
    emit(&resolve_out(args.out.clone()), &payload)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

/// Cluster the weight values of |T| and flag accumulation candidates.
#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Sequence: `kakutani`, `example`, or `file:<path>`.
    #[arg(long = "seq")]
    pub seq: String,
    /// Prefix length to cluster (the scan doubles it to detect growth).
    #[arg(long)]
    pub prefix: u64,
    /// Cluster separation tolerance.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file (stdout when absent; relative paths land in $CSO_OUT_DIR).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SpectrumDoc {
    sequence: String,
    #[serde(flatten)]
    report: AccumulationReport,
}

pub fn spectrum(args: &SpectrumArgs) -> Result<i32> {
    check_prefix(args.prefix)?;
    let seq = sequence_by_spec(&args.seq)?;
    let report = cso_core::weights::accumulation_analysis(seq.as_ref(), args.prefix, args.tol)?;
    let payload = match args.format {
        Format::Json => to_json_doc(&SpectrumDoc {
            sequence: seq.name().to_string(),
            report,
        })?,
        Format::Csv => {
            let mut s = String::from(
                "center,min,max,multiplicity_at_prefix,multiplicity_at_extended,accumulating\n",
            );
            for c in &report.clusters {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    format_rational(&c.center),
                    format_rational(&c.min),
                    format_rational(&c.max),
                    c.multiplicity_at_prefix,
                    c.multiplicity_at_extended,
                    c.accumulating
                ));
            }
            s
        }
        Format::Text => return Err(unsupported_format("spectrum", args.format)),
    };
    emit(&resolve_out(args.out.clone()), &payload)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// truncate
// ---------------------------------------------------------------------------

/// Zero out all weights ≤ ε on a prefix and report the exact decomposition.
#[derive(Debug, Args)]
pub struct TruncateArgs {
    /// Sequence: `kakutani`, `example`, or `file:<path>`.
    #[arg(long = "seq")]
    pub seq: String,
    /// Threshold ε as an exact rational `p/q`.
    #[arg(long)]
    pub eps: String,
    /// Prefix length.
    #[arg(long)]
    pub prefix: u64,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file (stdout when absent; relative paths land in $CSO_OUT_DIR).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct TruncateDoc {
    sequence: String,
    eps: String,
    prefix_len: u64,
    /// Exact ‖T − T′‖ over the prefix: the largest zeroed weight.
    distance: String,
    palindromic: bool,
    decomposition: DecompositionReport,
    beta: Vec<String>,
}

pub fn truncate(args: &TruncateArgs) -> Result<i32> {
    let prefix = check_prefix(args.prefix)?;
    let eps = parse_positive_rational(&args.eps, "threshold ε")?;
    let seq = sequence_by_spec(&args.seq)?;
    let beta = truncate_by_threshold(seq.as_ref(), &eps, prefix)?;
    let original: Vec<Rational> = (1..=prefix).map(|i| seq.eval(i)).collect::<Result<_>>()?;
    let distance = shift_distance(&original, &beta)?;
    let report = decompose(&beta)?.report();
    let payload = match args.format {
        Format::Json => to_json_doc(&TruncateDoc {
            sequence: seq.name().to_string(),
            eps: format_rational(&eps),
            prefix_len: prefix,
            distance: format_rational(&distance),
            palindromic: report.palindromic,
            decomposition: report,
            beta: beta.iter().map(format_rational).collect(),
        })?,
        Format::Csv => {
            let mut s = String::from("n,alpha,beta\n");
            for (i, (a, b)) in original.iter().zip(beta.iter()).enumerate() {
                s.push_str(&format!(
                    "{},{},{}\n",
                    i + 1,
                    format_rational(a),
                    format_rational(b)
                ));
            }
            s
        }
        Format::Text => {
            let zeroed = beta
                .iter()
                .filter(|w| *w == &Rational::from_integer(0.into()))
                .count();
            format!(
                "sequence {}  prefix {}  eps {}\nzeroed {} weights; decomposition {} blocks; \
                 palindromic: {}\nexact distance ‖T − T′‖ = {}\n",
                seq.name(),
                prefix,
                format_rational(&eps),
                zeroed,
                report.blocks.len(),
                report.palindromic,
                format_rational(&distance)
            )
        }
    };
    emit(&resolve_out(args.out.clone()), &payload)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// approximate
// ---------------------------------------------------------------------------

/// Which index oracle answers the cut-point queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OracleKind {
    /// Closed-form answers for the dyadic sequence (re-verified regardless).
    Kakutani,
    /// Bounded linear scan; works for any sequence.
    Scan,
}

/// Run the full approximation pipeline and emit a verifiable certificate.
#[derive(Debug, Args)]
pub struct ApproximateArgs {
    /// Sequence: `kakutani`, `example`, or `file:<path>`.
    #[arg(long = "seq")]
    pub seq: String,
    /// Approximation target ε as an exact rational `p/q`.
    #[arg(long)]
    pub eps: String,
    /// Number of pipeline rounds K ≥ 1.
    #[arg(long)]
    pub rounds: u32,
    /// Index oracle.
    #[arg(long, value_enum, default_value = "kakutani")]
    pub oracle: OracleKind,
    /// Scan budget for the scan oracle.
    #[arg(long, default_value_t = DEFAULT_SCAN_LIMIT)]
    pub scan_limit: u64,
    /// Search cap for the initial index N.
    #[arg(long, default_value_t = DEFAULT_N_SEARCH_CAP)]
    pub n_cap: u64,
    /// Output format (certificates are JSON documents).
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file (stdout when absent; relative paths land in $CSO_OUT_DIR).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn approximate(args: &ApproximateArgs) -> Result<i32> {
    if args.format != Format::Json {
        return Err(unsupported_format("approximate", args.format));
    }
    let eps = parse_positive_rational(&args.eps, "target ε")?;
    let seq = sequence_by_spec(&args.seq)?;
    let oracle: Box<dyn COracle> = match args.oracle {
        OracleKind::Kakutani => Box::new(KakutaniOracle),
        OracleKind::Scan => Box::new(ScanOracle {
            search_limit: args.scan_limit,
        }),
    };
    let cert = certify_with_cap(seq.as_ref(), &eps, args.rounds, oracle.as_ref(), args.n_cap)?;
    let mut payload = cert.to_json()?;
    payload.push('\n');
    emit(&resolve_out(args.out.clone()), &payload)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

/// Independently re-check every claim of an emitted certificate.
#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Path to the certificate JSON document.
    #[arg(long)]
    pub certificate: PathBuf,
    /// Re-check against this sequence instead of the one the certificate
    /// names.
    #[arg(long = "seq")]
    pub seq: Option<String>,
}

pub fn verify(args: &VerifyArgs) -> Result<i32> {
    let text = fs::read_to_string(&args.certificate)?;
    // Within `verify`, an unparseable document *is* an invalid certificate.
    let cert = ApproxCertificate::from_json(&text).map_err(|e| CoreError::CertificateInvalid {
        field: "document".to_string(),
        detail: e.to_string(),
    })?;
    let spec = args.seq.clone().unwrap_or_else(|| cert.sequence.clone());
    let seq = sequence_by_spec(&spec)?;
    verify_certificate(seq.as_ref(), &cert)?;
    println!(
        "certificate OK: sequence {} eps {} rounds {} verified prefix {} distance {}",
        cert.sequence,
        format_rational(&cert.eps),
        cert.rounds,
        cert.verified_prefix,
        cert.prefix_distance
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

/// Numerically search for a best-fitting conjugation witness.
#[derive(Debug, Args)]
pub struct FitArgs {
    /// Complex matrix file (`rows cols` header, comma-separated re,im pairs).
    #[arg(long, conflicts_with = "weights")]
    pub matrix: Option<PathBuf>,
    /// Shift-block weights as comma-separated rationals, e.g. `1,1/2,1`.
    #[arg(long)]
    pub weights: Option<String>,
    /// Number of starts (warm start + random restarts).
    #[arg(long, default_value_t = 8)]
    pub restarts: u32,
    /// Iteration cap per start.
    #[arg(long, default_value_t = 250)]
    pub max_iters: u32,
    /// Objective value treated as converged.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Seed for the random restarts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file (stdout when absent; relative paths land in $CSO_OUT_DIR).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct FitDoc {
    dim: usize,
    restarts: u32,
    max_iters: u32,
    tol: f64,
    seed: u64,
    /// ‖T·S − S·Tᵀ‖ in operator norm, re-evaluated from the reported S.
    residual: f64,
    objective_frobenius: f64,
    converged: bool,
    best_restart: u32,
    /// Best symmetric unitary, rows of [re, im] pairs.
    s: Vec<Vec<[f64; 2]>>,
}

fn load_fit_input(args: &FitArgs) -> Result<CMat> {
    match (&args.matrix, &args.weights) {
        (Some(path), None) => core_io::read_complex_matrix(path),
        (None, Some(list)) => {
            let weights: Vec<Rational> = list
                .split(',')
                .map(|w| parse_rational(w.trim()))
                .collect::<Result<_>>()?;
            assemble_shift_matrix(&weights)
        }
        _ => Err(CoreError::domain(
            "provide exactly one of --matrix or --weights",
        )),
    }
}

pub fn fit_cmd(args: &FitArgs) -> Result<i32> {
    let t = load_fit_input(args)?;
    let opts = fit::FitOptions {
        restarts: args.restarts,
        max_iters: args.max_iters,
        tol: args.tol,
        seed: args.seed,
    };
    let result = fit::fit(&t, &opts)?;
    let payload = match args.format {
        Format::Json => to_json_doc(&FitDoc {
            dim: t.nrows(),
            restarts: args.restarts,
            max_iters: args.max_iters,
            tol: args.tol,
            seed: args.seed,
            residual: result.residual,
            objective_frobenius: result.objective_frobenius,
            converged: result.converged,
            best_restart: result.best_restart,
            s: complex_rows(&result.best_s),
        })?,
        Format::Text => format!(
            "dim {}  residual {:.6e}  frobenius {:.6e}  converged {}  best restart {}\nS =\n{}",
            t.nrows(),
            result.residual,
            result.objective_frobenius,
            result.converged,
            result.best_restart,
            core_io::format_complex_matrix(&result.best_s)
        ),
        Format::Csv => return Err(unsupported_format("fit", args.format)),
    };
    emit(&resolve_out(args.out.clone()), &payload)?;
    // A fit that only stalled is reported, but the exit code says so.
    Ok(if result.converged { 0 } else { 3 })
}

// ---------------------------------------------------------------------------
// sst
// ---------------------------------------------------------------------------

/// Build the complex symmetric corner approximant and its residual grid.
#[derive(Debug, Args)]
pub struct SstArgs {
    /// Complex matrix file for the ambient operator T.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Corner size n for the approximant A_n ⊕ C A_n* C ⊕ 0.
    #[arg(long = "n")]
    pub n: usize,
    /// Ambient dimension of the approximant (default 2n + 4; must be ≥ 2n).
    #[arg(long)]
    pub ambient: Option<usize>,
    /// Truncation sizes for the residual grid, e.g. `1,2,4,8`
    /// (default: powers of two up to the dimension, plus the dimension).
    #[arg(long = "ns")]
    pub ns: Option<String>,
    /// Column indices for the residual grid, e.g. `1,2,3` (default `1,2,3`).
    #[arg(long = "is")]
    pub is: Option<String>,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file (stdout when absent; relative paths land in $CSO_OUT_DIR).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SstDoc {
    dim: usize,
    corner: usize,
    ambient: usize,
    /// Checked defect of the approximant under its explicit witness.
    witness_defect: f64,
    ns: Vec<usize>,
    /// Column indices; grid cells with i > n are reported as null.
    is: Vec<usize>,
    grid: Vec<Vec<f64>>,
}

fn parse_index_list(list: &str, what: &str) -> Result<Vec<usize>> {
    list.split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|e| CoreError::domain(format!("invalid {what} entry `{x}`: {e}")))
        })
        .collect()
}

pub fn sst(args: &SstArgs) -> Result<i32> {
    let t = DenseOperator::new(core_io::read_complex_matrix(&args.matrix)?)?;
    let d = t.dim();
    let a = principal_submatrix(&t, args.n)?;
    let built = sst_approximant(
        &a,
        &ConjugationSpec::BlockReversal {
            sizes: vec![args.n],
        },
        args.ambient,
    )?;
    let ns = match &args.ns {
        Some(list) => parse_index_list(list, "--ns")?,
        None => {
            let mut ns: Vec<usize> = (0..).map(|k| 1usize << k).take_while(|&n| n < d).collect();
            ns.push(d);
            ns
        }
    };
    let is = match &args.is {
        Some(list) => parse_index_list(list, "--is")?,
        None => (1..=3).filter(|&i| i <= d).collect(),
    };
    let grid = sot_residual_grid(&t, &ns, &is)?;
    let payload = match args.format {
        Format::Csv => {
            eprintln!(
                "approximant: corner {} ambient {} witness defect {:.3e}",
                args.n,
                built.operator.dim(),
                built.defect
            );
            core_io::format_residual_grid(&ns, &is, &grid)?
        }
        Format::Json => to_json_doc(&SstDoc {
            dim: d,
            corner: args.n,
            ambient: built.operator.dim(),
            witness_defect: built.defect,
            ns: ns.clone(),
            is: is.clone(),
            grid: (0..ns.len())
                .map(|r| (0..is.len()).map(|c| grid[(r, c)]).collect())
                .collect(),
        })?,
        Format::Text => return Err(unsupported_format("sst", args.format)),
    };
    emit(&resolve_out(args.out.clone()), &payload)?;
    Ok(0)
}
