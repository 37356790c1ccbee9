use thiserror::Error;

use crate::toric::AxiomViolation;

/// Broad classes of failure, used by front ends to pick exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorCategory {
    /// The input could not be read or parsed.
    Malformed,
    /// The input parsed but violates a mathematical precondition.
    Validation,
    /// A well-formed, valid input on which a computation failed.
    Computation,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("dimension mismatch: expected rank {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("Riemann-Roch parity violation: D.(D-K) = {0} is odd")]
    Parity(i64),

    #[error("non-integral Euler pairing: 2*chi = {0}")]
    NonIntegralPairing(i64),

    #[error("model has chi(O_X) = {0}; toric-system routines require chi(O_X) = 1")]
    ChiNotOne(i64),

    #[error("models differ")]
    ModelMismatch,

    #[error("not a toric system: {0}")]
    Axiom(AxiomViolation),

    #[error("collection is not numerically exceptional: chi(-(D_{j} - D_{i})) = {chi}")]
    NotExceptional { i: usize, j: usize, chi: i64 },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("entry {index} is not a (-1)-class: D^2 = {self_intersection}, D.K = {canonical_degree}")]
    NotMinusOneClass { index: usize, self_intersection: i64, canonical_degree: i64 },

    #[error("not a del Pezzo model: {0}")]
    NotDelPezzo(String),

    #[error("not of maximal length: n = {length}, expected {expected}")]
    NotMaximal { length: usize, expected: usize },

    #[error("no standard model is isometric to this lattice: {reason} (K^2 = {canonical_square}, lattice {parity}, divisibility of K = {divisibility})")]
    NoStandardModel { reason: String, canonical_square: i64, parity: &'static str, divisibility: i64 },

    #[error("no (-1)-entry in a toric system of length {length}; self-intersections {witness:?}")]
    NoMinusOneEntry { length: usize, witness: Vec<i64> },

    #[error("length-4 system matches no Hirzebruch family: {0}")]
    Unclassified(String),

    #[error("toric shadow contraction is stuck at {sequence:?}")]
    ShadowStuck { sequence: Vec<i64> },

    #[error("certificate does not replay: {0}")]
    Replay(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Format(_) | Error::Json(_) => ErrorCategory::Malformed,
            Error::NoMinusOneEntry { .. }
            | Error::Unclassified(_)
            | Error::ShadowStuck { .. }
            | Error::Replay(_)
            | Error::Invariant(_)
            | Error::NoStandardModel { .. } => ErrorCategory::Computation,
            _ => ErrorCategory::Validation,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
