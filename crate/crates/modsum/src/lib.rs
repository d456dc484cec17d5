//! Sum-rate lower bounds for zero-error distributed computation of the
//! modulo-two sum of binary sources sharing a common observation.
//!
//! A transmitter observes `(X, Z)`, another observes `(Y, Z)`, and a receiver
//! must recover `X xor Y` with zero error, where `X - Z - Y` is a Markov
//! chain. This crate evaluates four sum-rate lower bounds (cut-set, an
//! extension of a Nair-Wang bound via convex envelopes, and two
//! coupling-based bounds), and exhaustively searches small-blocklength
//! zero-error schemes to check the coupling lemmas exactly.
//!
//! All rates and entropies are in bits.

pub mod bounds;
pub mod model;
pub mod optim;
pub mod schemes;

/// Errors surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An optimization problem has an empty feasible set.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// An internal solver invariant was violated.
    #[error("internal solver error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
