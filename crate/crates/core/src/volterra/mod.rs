//! Matrix-valued Lebesgue–Stieltjes integration against purely atomic
//! measures in one and two dimensions, product integrals, the Peano series
//! and the two-dimensional inhomogeneous Volterra equation.

mod grid;
mod integral;
mod peano;
mod solver;
mod variation;

pub use grid::{AtomicMeasure1D, CellRange, Grid2D, MatrixMeasure2D, MatrixSurface, Rect, VectorSurface};
pub use integral::{ls_integral_2d, product_integral_1d};
pub use peano::{duhamel_residual, peano_series_2d};
pub use solver::{solve_volterra_2d, volterra_closed_form, volterra_residual};
pub use variation::{integral_bound_check, variation_1d, variation_2d};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VolterraError {
    #[error("grid must be strictly increasing, finite and above the origin")]
    InvalidGrid,
    #[error("operands live on different grids")]
    GridMismatch,
    #[error("rectangle corner {time} is not a grid point")]
    NotGridAligned { time: f64 },
    #[error("rectangle is inverted: lower corner {lo} exceeds upper corner {hi}")]
    InvertedRect { lo: f64, hi: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("atom times must be strictly increasing and above the origin")]
    UnsortedAtoms,
}
