use alloc::vec::Vec;

use super::empirical::lower_node;
use super::{check_epsilon, Cohort, EstimateError};
use crate::matrix::Matrix;
use crate::model::{Landmark, StepFunction1D, StepSurface2D};
use crate::volterra::{AtomicMeasure1D, Grid2D, MatrixMeasure2D};

/// Position of the state pair `(i1, i2)` in the rearranged `l²` system.
pub fn pair_index(l: usize, i1: usize, i2: usize) -> usize {
    l * i2 + i1
}

/// A rate increment whose denominator fell below ε.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonEvent {
    pub time1: f64,
    pub time2: Option<f64>,
    /// `(row, column)` of the rate matrix, when known.
    pub entry: Option<(usize, usize)>,
    pub occupation: f64,
    pub increment: f64,
}

/// Atomic transition-rate measure of one landmark class.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMeasure1D {
    landmark: Landmark,
    measure: AtomicMeasure1D,
}

impl RateMeasure1D {
    pub fn new(landmark: Landmark, measure: AtomicMeasure1D) -> Self {
        Self { landmark, measure }
    }

    pub fn zero(landmark: Landmark, s: f64, states: usize) -> Self {
        Self::new(landmark, AtomicMeasure1D::zero(s, states))
    }

    pub fn landmark(&self) -> &Landmark {
        &self.landmark
    }

    pub fn origin(&self) -> f64 {
        self.measure.origin()
    }

    pub fn states(&self) -> usize {
        self.measure.dim()
    }

    pub fn times(&self) -> &[f64] {
        self.measure.times()
    }

    pub fn atoms(&self) -> &[Matrix] {
        self.measure.atoms()
    }

    pub fn measure(&self) -> &AtomicMeasure1D {
        &self.measure
    }

    pub fn cumulative(&self, t: f64) -> Matrix {
        self.measure.cumulative(t)
    }

    /// Largest deviation from zero of any atom row sum.
    pub fn max_row_sum(&self) -> f64 {
        self.atoms()
            .iter()
            .flat_map(|m| m.row_sums())
            .fold(0.0, |acc, x| acc.max(x.abs()))
    }
}

/// Bivariate rate measure: an `l² x l²` matrix per cell, rows and columns
/// indexed by [`pair_index`].
#[derive(Debug, Clone, PartialEq)]
pub struct RateMeasure2D {
    landmark: Landmark,
    states: usize,
    measure: MatrixMeasure2D,
}

impl RateMeasure2D {
    pub fn new(landmark: Landmark, states: usize, measure: MatrixMeasure2D) -> Result<Self, EstimateError> {
        if measure.dim() != states * states {
            return Err(EstimateError::DimensionMismatch {
                expected: states * states,
                actual: measure.dim(),
            });
        }
        Ok(Self {
            landmark,
            states,
            measure,
        })
    }

    pub fn zero(landmark: Landmark, grid: Grid2D, states: usize) -> Self {
        Self {
            landmark,
            states,
            measure: MatrixMeasure2D::zero(grid, states * states),
        }
    }

    pub fn landmark(&self) -> &Landmark {
        &self.landmark
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn grid(&self) -> &Grid2D {
        self.measure.grid()
    }

    pub fn measure(&self) -> &MatrixMeasure2D {
        &self.measure
    }

    /// Mass of cell `(a, b)` for pairs `i = (i1, i2)` and `j = (j1, j2)`.
    pub fn mass(&self, a: usize, b: usize, i: (usize, usize), j: (usize, usize)) -> f64 {
        let l = self.states;
        self.measure
            .get(a, b)
            .map_or(0.0, |m| m[(pair_index(l, i.0, i.1), pair_index(l, j.0, j.1))])
    }
}

/// One component `ΔΛ_jk` of the univariate estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct NelsonAalen1D {
    pub origin: f64,
    pub atoms: Vec<(f64, f64)>,
    pub events: Vec<EpsilonEvent>,
}

impl NelsonAalen1D {
    pub fn cumulative(&self, t: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 <= t).map(|a| a.1).sum()
    }
}

/// One component of the bivariate estimator as `(t1, t2, mass)` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct NelsonAalen2D {
    pub origin: f64,
    pub cells: Vec<(f64, f64, f64)>,
    pub events: Vec<EpsilonEvent>,
}

/// `ΔΛ(t) = ΔN(t) / (I(t-) ∨ ε)` at every jump of `n`.
pub fn nelson_aalen_1d(
    occupation: &StepFunction1D,
    counting: &StepFunction1D,
    epsilon: f64,
) -> Result<NelsonAalen1D, EstimateError> {
    check_epsilon(epsilon)?;
    let mut atoms = Vec::new();
    let mut events = Vec::new();
    for (t, dn) in counting.jumps() {
        if dn == 0.0 {
            continue;
        }
        let den = occupation.left_limit(t);
        if den < epsilon {
            events.push(EpsilonEvent {
                time1: t,
                time2: None,
                entry: None,
                occupation: den,
                increment: dn,
            });
        }
        atoms.push((t, dn / den.max(epsilon)));
    }
    Ok(NelsonAalen1D {
        origin: counting.origin(),
        atoms,
        events,
    })
}

/// `Δ²Λ(cell) = Δ²N(cell) / (I(u1-, u2-) ∨ ε)` with `(u1, u2)` the upper-right corner.
pub fn nelson_aalen_2d(
    occupation: &StepSurface2D,
    counting: &StepSurface2D,
    epsilon: f64,
) -> Result<NelsonAalen2D, EstimateError> {
    check_epsilon(epsilon)?;
    let (n1, n2) = counting.shape();
    let mut cells = Vec::new();
    let mut events = Vec::new();
    for a in 1..=n1 {
        for b in 1..=n2 {
            let dn = counting.cell_mass(a, b);
            if dn == 0.0 {
                continue;
            }
            let (t1, t2) = (counting.time1(a), counting.time2(b));
            let den = occupation.left_limit(t1, t2);
            if den < epsilon {
                events.push(EpsilonEvent {
                    time1: t1,
                    time2: Some(t2),
                    entry: None,
                    occupation: den,
                    increment: dn,
                });
            }
            cells.push((t1, t2, dn / den.max(epsilon)));
        }
    }
    Ok(NelsonAalen2D {
        origin: counting.origin(),
        cells,
        events,
    })
}

/// Univariate rate matrices from unit-sum occupation and counting arrays
/// (see `empirical`). Only nonzero atoms are kept.
#[allow(clippy::too_many_arguments)]
pub(crate) fn rates_from_counts_1d(
    landmark: Landmark,
    s: f64,
    grid: &[f64],
    occupation: &[Vec<f64>],
    counts: &[Vec<f64>],
    scale: f64,
    epsilon: f64,
    events: &mut Vec<EpsilonEvent>,
) -> RateMeasure1D {
    let l = occupation.len();
    let mut times = Vec::new();
    let mut atoms = Vec::new();
    for (k, &t) in grid.iter().enumerate().map(|(k, t)| (k + 1, t)) {
        let mut m = Matrix::zeros(l, l);
        for j in 0..l {
            let den = occupation[j][k - 1] * scale;
            let mut out = 0.0;
            for q in (0..l).filter(|&q| q != j) {
                let c = &counts[j * l + q];
                let dn = (c[k] - c[k - 1]) * scale;
                if dn == 0.0 {
                    continue;
                }
                if den < epsilon {
                    events.push(EpsilonEvent {
                        time1: t,
                        time2: None,
                        entry: Some((j, q)),
                        occupation: den,
                        increment: dn,
                    });
                }
                let rate = dn / den.max(epsilon);
                m[(j, q)] = rate;
                out += rate;
            }
            m[(j, j)] = -out;
        }
        if !m.is_zero() {
            times.push(t);
            atoms.push(m);
        }
    }
    let measure = AtomicMeasure1D::new(s, l, times, atoms).expect("grid is sorted and above s");
    RateMeasure1D::new(landmark, measure)
}

/// Bivariate rate matrices. The numerator of each cell expands the product
/// of increments bilinearly: a jump `a → b` adds `+1` to `N_ab` and `-1` to
/// `N_aa`, so a pair of jumps `(a1 → b1, a2 → b2)` on one path contributes
/// to row `(a1, a2)` with signs `+ (b1, b2)`, `- (a1, b2)`, `- (b1, a2)`, `+ (a1, a2)`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn rates_from_paths_2d(
    cohort: &Cohort,
    members: &[usize],
    landmark: Landmark,
    grid: Grid2D,
    occupation: &[Vec<f64>],
    epsilon: f64,
    events: &mut Vec<EpsilonEvent>,
) -> RateMeasure2D {
    let l = cohort.states().len();
    let s = grid.origin();
    let (n1, n2) = (grid.n1(), grid.n2());
    let mut measure = MatrixMeasure2D::zero(grid.clone(), l * l);
    let mut cells1 = Vec::new();
    let mut cells2 = Vec::new();
    for &m in members {
        let unit = cohort.unit(m);
        let jumps = cohort.paths()[m].observed_jumps();
        cells1.clear();
        cells2.clear();
        for j in jumps {
            let a = lower_node(grid.t1(), s, j.time);
            if (1..=n1).contains(&a) {
                cells1.push((a, j.from, j.to));
            }
            let b = lower_node(grid.t2(), s, j.time);
            if (1..=n2).contains(&b) {
                cells2.push((b, j.from, j.to));
            }
        }
        for &(a, a1, b1) in &cells1 {
            for &(b, a2, b2) in &cells2 {
                let cell = measure.entry_mut(a, b);
                let row = pair_index(l, a1, a2);
                cell[(row, pair_index(l, b1, b2))] += unit;
                cell[(row, pair_index(l, a1, b2))] -= unit;
                cell[(row, pair_index(l, b1, a2))] -= unit;
                cell[(row, pair_index(l, a1, a2))] += unit;
            }
        }
    }
    let scale = cohort.scale();
    let width = n2 + 1;
    for (a, b, cell) in measure.atoms_mut() {
        let corner = (a - 1) * width + (b - 1);
        for (row, occ) in occupation.iter().enumerate().take(l * l) {
            let values = cell.row_mut(row);
            if values.iter().all(|&v| v == 0.0) {
                continue;
            }
            let den = occ[corner] * scale;
            if den < epsilon {
                let increment = values.iter().map(|v| v.abs()).sum::<f64>() * scale;
                events.push(EpsilonEvent {
                    time1: grid.time1(a),
                    time2: Some(grid.time2(b)),
                    entry: Some((row, row)),
                    occupation: den,
                    increment,
                });
            }
            let d = den.max(epsilon);
            for v in values.iter_mut() {
                *v = *v * scale / d;
            }
        }
    }
    RateMeasure2D {
        landmark,
        states: l,
        measure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn hand_computed_atoms() {
        // deaths at {1, 1, 2, ∞}, n = 4
        let i = StepFunction1D::from_nodes(0.0, vec![1.0, 2.0], vec![1.0, 0.5, 0.25]).unwrap();
        let n = StepFunction1D::from_nodes(0.0, vec![1.0, 2.0], vec![0.0, 0.5, 0.75]).unwrap();
        let na = nelson_aalen_1d(&i, &n, 1e-9).unwrap();
        assert_eq!(na.atoms, vec![(1.0, 0.5), (2.0, 0.5)]);
        assert!(na.events.is_empty());
        assert_eq!(na.cumulative(1.5), 0.5);
    }

    #[test]
    fn zero_counting_gives_zero_measure() {
        let i = StepFunction1D::constant(0.0, 1.0);
        let n = StepFunction1D::from_nodes(0.0, vec![1.0], vec![0.0, 0.0]).unwrap();
        assert!(nelson_aalen_1d(&i, &n, 0.1).unwrap().atoms.is_empty());
    }

    #[test]
    fn epsilon_binds_and_is_flagged() {
        let i = StepFunction1D::constant(0.0, 0.0);
        let n = StepFunction1D::from_nodes(0.0, vec![1.0], vec![0.0, 0.25]).unwrap();
        let na = nelson_aalen_1d(&i, &n, 0.125).unwrap();
        assert_eq!(na.atoms, vec![(1.0, 2.0)]);
        assert_eq!(na.events.len(), 1);
        assert_eq!(
            nelson_aalen_1d(&i, &n, 0.0),
            Err(EstimateError::InvalidEpsilon { epsilon: 0.0 })
        );
    }

    #[test]
    fn bivariate_cell_uses_lower_left_corner() {
        let g = vec![1.0, 2.0];
        let occ = StepSurface2D::from_fn(0.0, g.clone(), g.clone(), |a, b| [1.0, 0.5, 0.25][a.max(b)]).unwrap();
        let cnt = StepSurface2D::from_fn(0.0, g.clone(), g, |a, b| [0.0, 0.5, 0.75][a.min(b)]).unwrap();
        let na = nelson_aalen_2d(&occ, &cnt, 1e-9).unwrap();
        assert_eq!(na.cells, vec![(1.0, 1.0, 0.5), (2.0, 2.0, 0.5)]);

        let flat = StepSurface2D::from_fn(0.0, vec![1.0], vec![1.0], |_, _| 0.0).unwrap();
        let one = StepSurface2D::from_fn(0.0, vec![1.0], vec![1.0], |a, b| (a * b) as f64).unwrap();
        let na = nelson_aalen_2d(&flat, &one, 0.5).unwrap();
        assert_eq!(na.cells, vec![(1.0, 1.0, 2.0)]);
        assert_eq!(na.events.len(), 1);
    }
}
