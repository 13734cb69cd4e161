use num_complex::Complex64;
use thiserror::Error;

use crate::params::CaseLabel;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter triple: {0}")]
    InvalidTriple(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("ambiguous case: {0}")]
    AmbiguousCase(String),
    #[error("root finder did not converge (residual {residual:e})")]
    Convergence { residual: f64 },
    #[error("no branch-cut layout for case {0:?}")]
    UnsupportedCase(CaseLabel),
    #[error("branch-cut construction failed: {0}")]
    CutConstruction(String),
    #[error("point {k} lies on a branch cut")]
    OnCut { k: Complex64 },
    #[error("continuation path to {k} failed: {reason}")]
    Path { k: Complex64, reason: String },
    #[error("point {k} is a pole of E(k)")]
    Pole { k: Complex64 },
    #[error("resolution too coarse: {0}")]
    Resolution(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("tail integral did not converge: {0}")]
    Tail(String),
    #[error("step-size control failed at x = {x}: {reason}")]
    Stiffness { x: f64, reason: String },
    #[error("column evaluated outside its validity region: {0}")]
    Validity(String),
    #[error("boundary values deviate from the background by {deviation:e}")]
    NotExactBackground { deviation: f64 },
    #[error("point {k} is not in the closure of D1")]
    Region { k: Complex64 },
}

pub type Result<T> = std::result::Result<T, Error>;
