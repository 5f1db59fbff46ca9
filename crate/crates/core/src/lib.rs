//! Primal-dual monotone operator splitting: Chambolle-Pock iteration,
//! preconditioner factorizations, solution-set recovery and duality checks.

// `!(x > 0.0)` rejects NaN alongside nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod codec;
pub mod error;
pub mod fenchel;
pub mod instances;
pub mod linalg;
pub mod operators;
pub mod oracle;
pub mod problem;
pub mod projections;
pub mod solution_sets;
pub mod splitting;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};
