//! Crate-wide error type.

use crate::poly::Poly;
use crate::rational::Rat;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arity mismatch: program expects {expected} inputs, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown variable `{name}` at byte {pos}")]
    UnknownVariable { name: String, pos: usize },

    #[error("singular matrix")]
    SingularMatrix,

    #[error("singular Jacobian at a start point")]
    SingularJacobian,

    #[error("element not invertible modulo the modulus; gcd factor of degree {}", .gcd.degree().unwrap_or(0))]
    NotInvertible { gcd: Poly<Rat> },

    #[error("no rational-function reconstruction within the degree bounds")]
    NoReconstruction,

    #[error("non-generic linear form or projection point; retry with fresh randomness")]
    BadAlpha,

    #[error("random choices exhausted after {attempts} attempts (seed {seed}): {context}")]
    BadRandomness {
        attempts: usize,
        seed: u64,
        context: String,
    },

    #[error("internal count mismatch: expected {expected} solutions, found {found}")]
    CountMismatch { expected: usize, found: usize },

    #[error("reconstructed denominator degree {got} exceeds the bound {bound}")]
    DegreeBound { got: usize, bound: usize },

    #[error("inexact polynomial division")]
    InexactDivision,

    #[error("degree structure mismatch between target and initial system")]
    DegreeMismatch,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("dual-path sign verification disagrees: {0}")]
    Disagreement(String),

    #[error("corrupt geometric resolution: {0}")]
    CorruptResolution(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
