//! Exact construction and verification of BRST-type differentials for
//! quadratic-linear algebras defined by a braiding and a bracket.

pub mod bar;
pub mod braid;
pub mod brst;
pub mod error;
pub mod field;
pub mod format;
pub mod graded;
pub mod linalg;
pub mod linop;
pub mod qlie;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use linop::{LegFlag, LinOp, Projector};
pub use scalar::Scalar;
