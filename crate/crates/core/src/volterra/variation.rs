use super::VolterraError;
use crate::model::{StepFunction1D, StepSurface2D};

/// `‖f‖∞ + sup over partitions of Σ |f(t_k) - f(t_{k-1})|`.
///
/// For a step function the supremum is attained on its own grid.
pub fn variation_1d(f: &StepFunction1D) -> f64 {
    f.sup_norm() + f.jumps().map(|(_, d)| d.abs()).sum::<f64>()
}

/// Vitali variation plus the one-dimensional variations of the two lower
/// boundary sections, minus `‖f‖∞`.
///
/// This is the literal definition. It is not a norm: a surface that vanishes
/// on both lower boundary sections gets `Vitali - ‖f‖∞`, which can be zero
/// for a surface with nonzero rectangle increments.
pub fn variation_2d(f: &StepSurface2D) -> f64 {
    let (n1, n2) = f.shape();
    let mut vitali = 0.0;
    for a in 1..=n1 {
        for b in 1..=n2 {
            vitali += f.cell_mass(a, b).abs();
        }
    }
    vitali + variation_1d(&f.lower_row()) + variation_1d(&f.lower_column()) - f.sup_norm()
}

/// `(|∫ f dg|, ‖f‖∞ ‖g‖_v)` with `f` evaluated at the atom of each cell (its
/// upper-right node) and the variation of [`variation_2d`].
pub fn integral_bound_check(f: &StepSurface2D, g: &StepSurface2D) -> Result<(f64, f64), VolterraError> {
    if f.origin() != g.origin() || f.grid1() != g.grid1() || f.grid2() != g.grid2() {
        return Err(VolterraError::GridMismatch);
    }
    let (n1, n2) = g.shape();
    let mut integral = 0.0;
    for a in 1..=n1 {
        for b in 1..=n2 {
            integral += f.node(a, b) * g.cell_mass(a, b);
        }
    }
    Ok((integral.abs(), f.sup_norm() * variation_2d(g)))
}
