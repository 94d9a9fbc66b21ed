use alloc::vec;
use alloc::vec::Vec;

use super::peano::peano_range;
use super::{CellRange, MatrixMeasure2D, VectorSurface, VolterraError};

fn check(phi: &VectorSurface, lambda: &MatrixMeasure2D) -> Result<(), VolterraError> {
    if phi.grid() != lambda.grid() {
        return Err(VolterraError::GridMismatch);
    }
    if phi.dim() != lambda.dim() {
        return Err(VolterraError::DimensionMismatch {
            expected: lambda.dim(),
            actual: phi.dim(),
        });
    }
    Ok(())
}

fn axpy_row(out: &mut [f64], row: &[f64], m: &crate::matrix::Matrix) {
    for (i, &v) in row.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate() {
            *o += v * m[(i, j)];
        }
    }
}

/// Solves `Y(t) = φ(t) + ∫_(s,t] Y(u-) Λ(du)` for row vectors `Y`.
///
/// With `W(t)` the integral term,
/// `W(a, b) = W(a-1, b) + W(a, b-1) - W(a-1, b-1) + Y(a-1, b-1) Λ(a, b)`
/// and `W = 0` on the lower boundary, which is exact
/// because the integrand only sees values strictly below-left of each cell.
pub fn solve_volterra_2d(phi: &VectorSurface, lambda: &MatrixMeasure2D) -> Result<VectorSurface, VolterraError> {
    check(phi, lambda)?;
    let grid = phi.grid().clone();
    let dim = phi.dim();
    let (n1, n2) = (grid.n1(), grid.n2());
    let mut w = vec![0.0; grid.node_count() * dim];
    let mut y = phi.clone();
    let node = |a: usize, b: usize| (a * (n2 + 1) + b) * dim;
    let mut cell = vec![0.0; dim];
    for a in 1..=n1 {
        for b in 1..=n2 {
            for k in 0..dim {
                cell[k] = w[node(a - 1, b) + k] + w[node(a, b - 1) + k] - w[node(a - 1, b - 1) + k];
            }
            if let Some(mass) = lambda.get(a, b) {
                axpy_row(&mut cell, y.at(a - 1, b - 1), mass);
            }
            w[node(a, b)..node(a, b) + dim].copy_from_slice(&cell);
            for (yk, ck) in y.at_mut(a, b).iter_mut().zip(&cell) {
                *yk += ck;
            }
        }
    }
    Ok(y)
}

/// `Y(t) = φ(t) + ∫_(s,t] φ(u-) Λ(du) 𝒫((u,t], Λ)`, evaluated with the Peano
/// series at every node. Cost grows like the fourth power of the grid size;
/// meant for cross-checking on small grids.
pub fn volterra_closed_form(phi: &VectorSurface, lambda: &MatrixMeasure2D) -> Result<VectorSurface, VolterraError> {
    check(phi, lambda)?;
    let atoms: Vec<(usize, usize)> = lambda.atoms().map(|(a, b, _)| (a, b)).collect();
    let mut y = phi.clone();
    let dim = phi.dim();
    for a in 1..=phi.grid().n1() {
        for b in 1..=phi.grid().n2() {
            let mut acc = vec![0.0; dim];
            for &(c, d) in atoms.iter().filter(|&&(c, d)| c <= a && d <= b) {
                let mass = lambda.get(c, d).expect("listed atom");
                let tail = peano_range(
                    lambda,
                    CellRange {
                        a0: c,
                        a1: a,
                        b0: d,
                        b1: b,
                    },
                );
                let row = mass.matmul(&tail);
                axpy_row(&mut acc, phi.at(c - 1, d - 1), &row);
            }
            for (yk, ak) in y.at_mut(a, b).iter_mut().zip(&acc) {
                *yk += ak;
            }
        }
    }
    Ok(y)
}

/// Largest absolute residual of the integral equation at any node, with the
/// integral evaluated as a direct double sum.
pub fn volterra_residual(
    y: &VectorSurface,
    phi: &VectorSurface,
    lambda: &MatrixMeasure2D,
) -> Result<f64, VolterraError> {
    check(phi, lambda)?;
    if y.grid() != phi.grid() || y.dim() != phi.dim() {
        return Err(VolterraError::GridMismatch);
    }
    let mut worst: f64 = 0.0;
    for a in 0..=phi.grid().n1() {
        for b in 0..=phi.grid().n2() {
            let mut rhs = phi.at(a, b).to_vec();
            for c in 1..=a {
                for d in 1..=b {
                    if let Some(mass) = lambda.get(c, d) {
                        axpy_row(&mut rhs, y.at(c - 1, d - 1), mass);
                    }
                }
            }
            for (v, r) in y.at(a, b).iter().zip(&rhs) {
                worst = worst.max((v - r).abs());
            }
        }
    }
    Ok(worst)
}
