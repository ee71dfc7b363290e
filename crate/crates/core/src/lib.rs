//! Numerical toolkit for query dynamics under Hamiltonian oracles.
//!
//! The library studies a two-party game: one side holds a hidden parameter
//! and answers queries through a fixed diagonal Hamiltonian (or its
//! fixed-time unitary), the other side drives an algorithm register and
//! tries to identify the parameter.  Everything is organised around the
//! reduced dynamics that survive symmetrization over the problem's
//! invariance group.
//!
//! Modules:
//!
//! * [`oracle`]: problem construction, brute-force purified evolution,
//!   final-measurement optima, and a minimum-distinguishing-time solver.
//! * [`grover`]: closed-form optimal schedules for one-item search,
//!   continuous and discrete, plus a unitary realization check.
//! * [`interrogation`]: reduced sphere dynamics for full bit-string
//!   readout and for the XOR of the hidden bits, with matching bounds.
//! * [`geodesic`]: the exact two-bit optimum as a geodesic problem on a
//!   sphere with a stretched metric.
//! * [`search`]: derivative-free rediscovery of optimal schedules.
//! * [`acceptance`]: the end-to-end verification suite used by tests and
//!   the command-line `verify-all` run.

pub mod acceptance;
pub mod geodesic;
pub mod grover;
pub mod interrogation;
pub mod linalg;
pub mod oracle;
pub mod search;

/// Crate version, re-exported for tool metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix or vector had the wrong shape for the requested operation.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// An input failed validation (norms, positivity, admissibility, ...).
    #[error("{0}")]
    Validation(String),
    /// A runtime invariant was violated mid-computation.
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// The requested quantity is outside the structured cases handled here.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An iterative numerical procedure failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Schedule file could not be parsed.
    #[error("schedule parse error: {0}")]
    Schedule(String),
}

pub type Result<T> = std::result::Result<T, Error>;
