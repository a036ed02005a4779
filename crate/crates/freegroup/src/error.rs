//! Error type shared across the library.

use thiserror::Error;

/// Errors produced by parsing, validation, and the computational routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed textual or JSON input.
    #[error("parse error: {0}")]
    Parse(String),

    /// Structurally valid input that violates a precondition.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A cyclic word was requested for a trivial group element.
    #[error("the word is trivial; cyclic words must be nontrivial")]
    TrivialWord,

    /// An operation that needs an automorphism was given a non-automorphism.
    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),

    /// A caller-supplied contract was violated (e.g. a walk that did not
    /// start on an initial edge).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The suffix-window method ran out of window without stabilizing.
    #[error(
        "increment table did not stabilize (last window {window}, {violations} unstable entries); \
         the map is likely not injective or needs a larger budget"
    )]
    Unstable { window: usize, violations: usize },

    /// Rejection sampling exhausted its retry budget.
    #[error("sampling failed after {tries} tries: {reason}")]
    SamplingFailed { tries: usize, reason: String },

    /// An exact enumeration would exceed the configured size bound.
    #[error("enumeration too large: {0}")]
    TooLarge(String),

    /// A computation exceeded its configured resource budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// An internal invariant failed; indicates a bug.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Whether the error is the caller's input (as opposed to a computation
    /// that could not be completed). CLI maps input errors to exit code 2 and
    /// computational failures to exit code 3.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::Invalid(_)
                | Error::TrivialWord
                | Error::NotAutomorphism(_)
                | Error::Contract(_)
        )
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
