use thiserror::Error;

use crate::linalg::Vector;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("power iteration did not converge after {iterations} iterations (best estimate {estimate})")]
    NoConvergence { estimate: f64, iterations: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not PSD: eigenvalue {eigenvalue:e} is below -{tol:e}")]
    NotPsd { eigenvalue: f64, tol: f64 },

    #[error("projection onto empty set")]
    EmptyProjection,

    #[error("unsupported structure: {0}")]
    Unsupported(String),

    #[error("step sizes violate sigma*tau*||L||^2 <= 1: sigma={sigma}, tau={tau}, ||L||={norm}")]
    StepSize { sigma: f64, tau: f64, norm: f64 },

    #[error("recovery requires paramonotonicity")]
    NotParamonotone,

    #[error("infeasible problem{}", certificate.as_ref().map(|c| format!(" (separating direction of norm {:e})", c.norm())).unwrap_or_default())]
    Infeasible { certificate: Option<Vector> },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("identity mismatch: gap {gap:e} between {lhs:?} and {rhs:?}")]
    IdentityMismatch { lhs: Vec<f64>, rhs: Vec<f64>, gap: f64 },

    #[error("sample {index} is not a saddle point (residual {residual:e})")]
    InvalidSample { index: usize, residual: f64 },

    #[error("grid has {points} points, above the cap of {cap}")]
    GridCap { points: u128, cap: u128 },

    #[error("invalid dual solution: {0}")]
    InvalidDual(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            got,
        })
    }
}
