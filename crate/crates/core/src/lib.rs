//! Excess of fusion frames in finite-dimensional real spaces, computed by
//! several independent methods, together with dual fusion frame construction
//! and certification.

pub mod check;
pub mod commands;
pub mod corpus;
pub mod document;
pub mod dual;
pub mod error;
pub mod excess;
pub mod fixtures;
pub mod frame;
pub mod linalg;
pub mod random;
pub mod report;

pub use check::Check;
pub use error::{Error, Result};
pub use frame::{DirectSumIndex, FusionFrame};
pub use linalg::{Matrix, Subspace};
