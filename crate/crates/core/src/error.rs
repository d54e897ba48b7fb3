use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("non-finite value in {0}")]
    NumericDomain(String),
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("root refinement did not converge in bracket [{lo}, {hi}]")]
    RootNotConverged { lo: f64, hi: f64 },
    #[error("eigenmode at k = {k} violates the boundary condition (residual {residual:e})")]
    BoundaryViolation { k: f64, residual: f64 },
    #[error("found {found} modes below the cutoff, {wanted} requested")]
    InsufficientModes { found: usize, wanted: usize },
    #[error("wall width {width} at t = {t} is below the allowed minimum {min}")]
    WidthTooSmall { t: f64, width: f64, min: f64 },
    #[error("supplied derivative disagrees with finite difference at t = {t} (gap {gap:e})")]
    DerivativeMismatch { t: f64, gap: f64 },
    #[error("linear solve failed (pivot ratio {pivot_ratio:e})")]
    LinearSolve { pivot_ratio: f64 },
    #[error("state does not fit the frame: {0}")]
    Support(String),
    #[error("reference basis is not isometric on the modes (defect {defect:e})")]
    ReferenceTooSmall { defect: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
