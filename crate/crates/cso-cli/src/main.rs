//! `cso` — command-line surface of the shift-operator toolkit.
//!
//! Exit codes:
//! - 0: success
//! - 2: domain error (bad arguments, unreadable input, malformed files)
//! - 3: search or convergence failure (scan budgets exhausted, resource
//!   caps hit, a fit that only stalled)
//! - 4: certificate verification failure (including an oracle answer that
//!   fails re-verification)
//! - 1: internal invariant violation — always a bug, never a usage error

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cso_core::CoreError;

mod commands;
mod output;

#[derive(Debug, Parser)]
#[command(
    name = "cso",
    version,
    about = "Exact and numerical experiments with weighted shifts and complex symmetric operators",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit the first weights of a sequence as exact rationals.
    Weights(commands::WeightsArgs),
    /// Cluster weight values of |T| and flag accumulation candidates.
    Spectrum(commands::SpectrumArgs),
    /// Zero out weights ≤ ε on a prefix; report decomposition and distance.
    Truncate(commands::TruncateArgs),
    /// Run the approximation pipeline and emit a verifiable certificate.
    Approximate(commands::ApproximateArgs),
    /// Independently re-check an emitted certificate.
    Verify(commands::VerifyArgs),
    /// Search for a best-fitting conjugation witness of a matrix.
    Fit(commands::FitArgs),
    /// Build the corner approximant A ⊕ CA*C ⊕ 0 and its residual grid.
    Sst(commands::SstArgs),
}

/// The exit-code contract for library errors.
fn exit_for(err: &CoreError) -> u8 {
    match err {
        CoreError::Domain(_) | CoreError::Parse(_) | CoreError::Io(_) => 2,
        CoreError::SearchExhausted { .. } | CoreError::Resource { .. } => 3,
        CoreError::CertificateInvalid { .. } | CoreError::OracleContract { .. } => 4,
        CoreError::InternalInvariant(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Weights(args) => commands::weights(args),
        Command::Spectrum(args) => commands::spectrum(args),
        Command::Truncate(args) => commands::truncate(args),
        Command::Approximate(args) => commands::approximate(args),
        Command::Verify(args) => commands::verify(args),
        Command::Fit(args) => commands::fit_cmd(args),
        Command::Sst(args) => commands::sst(args),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_for(&err))
        }
    }
}
