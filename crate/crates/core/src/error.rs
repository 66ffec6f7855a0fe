use thiserror::Error;

use crate::lattice::LatticeError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("window mismatch: n={n_a},N={big_n_a} vs n={n_b},N={big_n_b}")]
    WindowMismatch { n_a: usize, big_n_a: usize, n_b: usize, big_n_b: usize },
    #[error("shift {shift:?} exceeds window reach {reach}")]
    ShiftOutsideWindow { shift: Vec<i64>, reach: i64 },
    #[error("window too large for dense method: size {size} > {limit}")]
    WindowTooLarge { size: usize, limit: usize },
    #[error("quadrature did not converge: residual {residual:e} > {tol:e}")]
    Quadrature { residual: f64, tol: f64 },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
