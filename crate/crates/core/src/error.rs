//! Crate-wide error type.

use thiserror::Error;

use crate::graph::Violation;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in this crate.
///
/// Validation problems carry structured payloads (e.g. the full list of
/// colouring violations) so callers can report them precisely instead of
/// pattern-matching message strings.
#[derive(Debug, Error)]
pub enum Error {
    /// A coloured graph failed validation; all violations are listed.
    #[error("invalid coloured graph: {}", format_violations(.0))]
    InvalidGraph(Vec<Violation>),

    /// A vertex id outside `0..p`.
    #[error("vertex {vertex} out of range for p = {p}")]
    InvalidVertex { vertex: usize, p: usize },

    /// Mismatched vector/matrix dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    /// A matrix required to be positive definite is not.
    #[error("matrix not positive definite: {context}")]
    NotPositiveDefinite { context: String },

    /// A parameter vector left the cone where an operation requires membership.
    #[error("parameter outside the model cone: {context}")]
    OutsideCone { context: String },

    /// Invalid run/sampler/benchmark configuration.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Fisher information (or another normal matrix) could not be factorized.
    #[error("singular information matrix: {context}")]
    SingularInformation { context: String },

    /// Too few replicates for an empirical-covariance computation.
    #[error("insufficient replicates: need at least 2, got {got}")]
    InsufficientReplicates { got: usize },

    /// Per-vertex failures collected by the distributed estimator.
    #[error("local estimation failed for {} vertex/vertices: {}", .0.len(),
        .0.iter().map(|(v, e)| format!("vertex {v}: {e}")).collect::<Vec<_>>().join("; "))]
    LocalFailures(Vec<(usize, String)>),

    /// Underlying I/O failure (report writing, data loading).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
