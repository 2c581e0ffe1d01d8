use thiserror::Error;

use crate::linalg::Subspace;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building, analysing or certifying frames.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input contains a non-finite entry")]
    NonFiniteInput,

    #[error("ambient dimension mismatch: expected {expected}, found {found}")]
    AmbientMismatch { expected: usize, found: usize },

    #[error("operator is singular (rank {rank} < {dim})")]
    SingularOperator { rank: usize, dim: usize },

    #[error("operator must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("family is not a frame (rank of synthesis {rank} < ambient {ambient})")]
    NotAFrame { rank: usize, ambient: usize },

    #[error("member {index}: weight {weight} is not positive")]
    NonPositiveWeight { index: usize, weight: f64 },

    #[error("member {index} is the zero subspace")]
    EmptyMember { index: usize },

    #[error("family has no members")]
    NoMembers,

    #[error("member {member}, column {column}: vector lies {distance:e} away from the subspace")]
    NotInSubspace { member: usize, column: usize, distance: f64 },

    #[error("member {member}: local basis has rank {rank}, expected {expected} independent columns")]
    RankDeficientLocalBasis { member: usize, rank: usize, expected: usize },

    #[error("orthogonal complements do not form a frame: the members share a {} dimensional intersection", .intersection.dim())]
    ComplementNotFrame { intersection: Subspace },

    #[error("family is not a fusion Riesz basis")]
    NotRieszBasis,

    #[error("index mismatch: {left} members against {right}")]
    IndexMismatch { left: usize, right: usize },

    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch { expected: (usize, usize), got: (usize, usize) },

    #[error("block column {index} of the left inverse is zero")]
    DegenerateMember { index: usize },

    #[error("operator is not component preserving")]
    NotComponentPreserving,

    #[error("candidate is not a dual: residual {residual:e}")]
    NotADual { residual: f64 },

    #[error("identity `{name}` violated: {lhs} != {rhs}")]
    IdentityViolated { name: String, lhs: f64, rhs: f64 },

    #[error("value {value} is {distance:e} away from the nearest integer")]
    NotIntegral { value: f64, distance: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("{field}: expected length {expected}, got {got}")]
    DimensionMismatch { field: String, expected: usize, got: usize },

    #[error("no frame found after {attempts} attempts")]
    RetryExhausted { attempts: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::DimensionMismatch { .. }
            | Error::NonPositiveWeight { .. }
            | Error::EmptyMember { .. }
            | Error::NoMembers
            | Error::AmbientMismatch { .. }
            | Error::NonFiniteInput
            | Error::InvalidArgument(_)
            | Error::IndexMismatch { .. }
            | Error::ShapeMismatch { .. }
            | Error::NotInSubspace { .. }
            | Error::RankDeficientLocalBasis { .. }
            | Error::Io(_) => 2,
            Error::NotAFrame { .. } | Error::ComplementNotFrame { .. } => 3,
            Error::NotADual { .. }
            | Error::IdentityViolated { .. }
            | Error::NotRieszBasis
            | Error::NotComponentPreserving
            | Error::DegenerateMember { .. } => 4,
            Error::SingularOperator { .. }
            | Error::NotSquare { .. }
            | Error::NotIntegral { .. }
            | Error::RetryExhausted { .. } => 5,
        }
    }
}
