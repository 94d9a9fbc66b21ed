use alloc::vec;
use alloc::vec::Vec;

use super::{CellRange, MatrixMeasure2D, Rect, VolterraError};
use crate::matrix::Matrix;

/// Peano series `Id + Σ_n Σ_{u1 < ... < un} Λ(u1)⋯Λ(un)` over the cells of
/// `range`, where `<` is strict in both coordinates.
///
/// On a finite grid the series is a finite sum. It is evaluated by the
/// backward recursion `T(c) = Λ(c) (Id + Σ_{c' > c} T(c'))`, with the inner
/// sum maintained as a two-dimensional suffix sum.
pub(crate) fn peano_range(lambda: &MatrixMeasure2D, range: CellRange) -> Matrix {
    let dim = lambda.dim();
    let id = Matrix::identity(dim);
    if range.is_empty() {
        return id;
    }
    let w = range.b1 - range.b0 + 1;
    let h = range.a1 - range.a0 + 1;
    // suffix[(a - a0 - 1) * w + (b - b0 - 1)] for a in a0+1..=a1+1
    let mut suffix = vec![Matrix::zeros(dim, dim); h * w];
    let at = |a: usize, b: usize| (a - range.a0 - 1) * w + (b - range.b0 - 1);
    for a in (range.a0 + 1..=range.a1).rev() {
        for b in (range.b0 + 1..=range.b1).rev() {
            let mut s = suffix[at(a + 1, b)].add(&suffix[at(a, b + 1)]);
            s = s.sub(&suffix[at(a + 1, b + 1)]);
            if let Some(mass) = lambda.get(a, b) {
                let tail = id.add(&suffix[at(a + 1, b + 1)]);
                s.add_assign(&mass.matmul(&tail));
            }
            suffix[at(a, b)] = s;
        }
    }
    id.add(&suffix[at(range.a0 + 1, range.b0 + 1)])
}

/// `𝒫(rect, Λ)`.
pub fn peano_series_2d(lambda: &MatrixMeasure2D, rect: &Rect) -> Result<Matrix, VolterraError> {
    let range = rect.resolve(lambda.grid())?;
    Ok(peano_range(lambda, range))
}

/// Sup-norm of
/// `𝒫(R, A) - 𝒫(R, B) - Σ_{u ∈ R} 𝒫(R ∩ below(u), A) (A(u) - B(u)) 𝒫(R ∩ above(u), B)`,
/// where `below(u)` and `above(u)` are the cells strictly below-left and
/// strictly above-right of `u`.
pub fn duhamel_residual(a: &MatrixMeasure2D, b: &MatrixMeasure2D, rect: &Rect) -> Result<f64, VolterraError> {
    if a.grid() != b.grid() || a.dim() != b.dim() {
        return Err(VolterraError::GridMismatch);
    }
    let range = rect.resolve(a.grid())?;
    let diff = a.sub(b)?;
    let mut total = peano_range(a, range).sub(&peano_range(b, range));
    let cells: Vec<(usize, usize)> = diff
        .atoms()
        .filter(|&(x, y, _)| range.contains(x, y))
        .map(|(x, y, _)| (x, y))
        .collect();
    for (x, y) in cells {
        let below = CellRange {
            a0: range.a0,
            a1: x - 1,
            b0: range.b0,
            b1: y - 1,
        };
        let above = CellRange {
            a0: x,
            a1: range.a1,
            b0: y,
            b1: range.b1,
        };
        let d = diff.get(x, y).expect("listed atom");
        let term = peano_range(a, below).matmul(d).matmul(&peano_range(b, above));
        total = total.sub(&term);
    }
    Ok(total.max_abs())
}
