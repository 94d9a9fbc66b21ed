use super::{AtomicMeasure1D, MatrixMeasure2D, MatrixSurface, Rect, VolterraError};
use crate::matrix::Matrix;

/// `∫_rect F(u-) G(du)`: the sum over cells of `F` at the cell's lower-left
/// node times the cell mass.
pub fn ls_integral_2d(f: &MatrixSurface, g: &MatrixMeasure2D, rect: &Rect) -> Result<Matrix, VolterraError> {
    if f.grid() != g.grid() {
        return Err(VolterraError::GridMismatch);
    }
    let range = rect.resolve(g.grid())?;
    let rows = f.at(0, 0).rows();
    if f.at(0, 0).cols() != g.dim() {
        return Err(VolterraError::DimensionMismatch {
            expected: g.dim(),
            actual: f.at(0, 0).cols(),
        });
    }
    let mut out = Matrix::zeros(rows, g.dim());
    for (a, b, mass) in g.atoms() {
        if range.contains(a, b) {
            out.add_assign(&f.at(a - 1, b - 1).matmul(mass));
        }
    }
    Ok(out)
}

/// Ordered product `∏_(s,t] (Id + Λ(du))` over the atoms of `measure`.
pub fn product_integral_1d(measure: &AtomicMeasure1D, s: f64, t: f64) -> Matrix {
    let mut out = Matrix::identity(measure.dim());
    for (time, atom) in measure.times().iter().zip(measure.atoms()) {
        if *time <= s {
            continue;
        }
        if *time > t {
            break;
        }
        out = out.add(&out.matmul(atom));
    }
    out
}
