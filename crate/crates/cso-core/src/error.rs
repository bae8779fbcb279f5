//! Error taxonomy shared by the whole crate.
//!
//! The split mirrors the exit-code contract of the CLI: domain errors
//! (invalid input), search/convergence failures (no result within the
//! configured budget), certificate verification failures, and internal
//! invariant trips (which always indicate a bug, never bad input).

use thiserror::Error;

/// A near-miss recorded when an index scan exhausts its budget: the best
/// candidate seen and how badly it violated the acceptance conditions.
#[derive(Debug, Clone)]
pub struct NearMiss {
    /// Candidate index.
    pub index: u64,
    /// Whether the candidate satisfied 0 < α_c < ε.
    pub value_in_range: bool,
    /// Worst pair defect max_k |α_k − α_{c−k}| observed (display form).
    pub worst_pair_defect: Option<String>,
}

#[derive(Debug, Error)]
pub enum CoreError {
    /// Invalid input: bad index, negative weight, dimension mismatch, …
    #[error("domain error: {0}")]
    Domain(String),

    /// A linear scan ran out of budget without finding an admissible index.
    #[error("search exhausted after scanning up to {limit}{}", near_miss_suffix(.near_miss))]
    SearchExhausted {
        limit: u64,
        near_miss: Option<NearMiss>,
    },

    /// An oracle answer failed re-verification against the sequence.
    #[error("oracle contract violated at c = {c} (n = {n}, eps = {eps}): {detail}")]
    OracleContract {
        c: u64,
        n: u64,
        eps: String,
        detail: String,
    },

    /// A certificate failed independent re-verification.
    #[error("certificate invalid in field `{field}`: {detail}")]
    CertificateInvalid { field: String, detail: String },

    /// A resource limit was hit mid-computation; carries how far we got.
    #[error("resource limit: {detail} (largest completed step: {completed})")]
    Resource { completed: u64, detail: String },

    /// An internal invariant failed. Always a bug.
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),

    /// Malformed file contents.
    #[error("parse error: {0}")]
    Parse(String),

    /// Underlying I/O failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn near_miss_suffix(near_miss: &Option<NearMiss>) -> String {
    match near_miss {
        None => String::new(),
        Some(nm) => match &nm.worst_pair_defect {
            Some(d) => format!(
                " (best near-miss at c = {}, value in range: {}, worst pair defect {})",
                nm.index, nm.value_in_range, d
            ),
            None => format!(
                " (best near-miss at c = {}, value in range: {})",
                nm.index, nm.value_in_range
            ),
        },
    }
}

impl CoreError {
    /// Shorthand used throughout the crate.
    pub fn domain(msg: impl Into<String>) -> Self {
        CoreError::Domain(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        CoreError::InternalInvariant(msg.into())
    }

    pub fn certificate(field: impl Into<String>, detail: impl Into<String>) -> Self {
        CoreError::CertificateInvalid {
            field: field.into(),
            detail: detail.into(),
        }
    }
}
