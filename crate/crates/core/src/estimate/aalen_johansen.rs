use alloc::vec;
use alloc::vec::Vec;

use super::empirical::occupation_counts;
use super::{pair_index, Cohort, EstimateError, RateMeasure1D, RateMeasure2D};
use crate::model::{Landmark, StepFunction1D, StepSurface2D};
use crate::volterra::{solve_volterra_2d, Grid2D, VectorSurface};

/// `P_z(s)`: the class occupation at `s` normalised to a probability vector,
/// all zero for a class with no member at risk at `s`.
pub fn initial_distribution(cohort: &Cohort, z: &Landmark, s: f64) -> Vec<f64> {
    let members = cohort.members(z);
    let counts = occupation_counts(cohort, &members, s, &[]);
    let at_s: Vec<f64> = counts.iter().map(|c| c[0]).collect();
    let total: f64 = at_s.iter().sum();
    if total > 0.0 {
        at_s.iter().map(|x| x / total).collect()
    } else {
        at_s
    }
}

fn check_initial(initial: &[f64], l: usize) -> Result<(), EstimateError> {
    if initial.len() != l {
        return Err(EstimateError::DimensionMismatch {
            expected: l,
            actual: initial.len(),
        });
    }
    let sum: f64 = initial.iter().sum();
    let valid = initial.iter().all(|&p| p >= 0.0 && p.is_finite()) && (sum == 0.0 || (sum - 1.0).abs() <= 1e-9);
    if valid {
        Ok(())
    } else {
        Err(EstimateError::InitialDistribution { sum })
    }
}

/// `P(t) = P(s) ∏_(s,t] (Id + Λ(du))`, one step function per state, on the
/// atom times of `rates`.
pub fn aalen_johansen_1d(rates: &RateMeasure1D, initial: &[f64]) -> Result<Vec<StepFunction1D>, EstimateError> {
    let l = rates.states();
    check_initial(initial, l)?;
    let mut nodes: Vec<Vec<f64>> = initial.iter().map(|&p| vec![p]).collect();
    let mut p = initial.to_vec();
    for atom in rates.atoms() {
        let step = atom.left_mul(&p);
        for (pi, di) in p.iter_mut().zip(&step) {
            *pi += di;
        }
        for (n, &pi) in nodes.iter_mut().zip(&p) {
            n.push(pi);
        }
    }
    nodes
        .into_iter()
        .map(|n| StepFunction1D::from_nodes(rates.origin(), rates.times().to_vec(), n).map_err(EstimateError::from))
        .collect()
}

/// Joint occupation probabilities `P_(i1,i2)(t1, t2)` at every node of a
/// product grid, stored as one `l²`-vector per node.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateProbabilities {
    states: usize,
    surface: VectorSurface,
}

impl BivariateProbabilities {
    pub fn states(&self) -> usize {
        self.states
    }

    pub fn grid(&self) -> &Grid2D {
        self.surface.grid()
    }

    pub fn vectors(&self) -> &VectorSurface {
        &self.surface
    }

    pub fn at(&self, a: usize, b: usize, i1: usize, i2: usize) -> f64 {
        self.surface.at(a, b)[pair_index(self.states, i1, i2)]
    }

    pub fn eval(&self, t1: f64, t2: f64, i1: usize, i2: usize) -> f64 {
        let g = self.grid();
        let a = g.t1().partition_point(|&x| x <= t1);
        let b = g.t2().partition_point(|&x| x <= t2);
        self.at(a, b, i1, i2)
    }

    pub fn surface(&self, i1: usize, i2: usize) -> StepSurface2D {
        let g = self.grid();
        StepSurface2D::from_fn(g.origin(), g.t1().to_vec(), g.t2().to_vec(), |a, b| {
            self.at(a, b, i1, i2)
        })
        .expect("grid already validated")
    }
}

/// Forcing term `φ` of the bivariate equation on `grid`, built from the
/// univariate occupation probabilities `p1` and the start distribution.
pub fn bivariate_forcing(grid: &Grid2D, p1: &[StepFunction1D], initial: &[f64]) -> VectorSurface {
    let l = initial.len();
    let axis = |times: &[f64]| -> Vec<Vec<f64>> {
        let mut out = vec![initial.to_vec()];
        out.extend(times.iter().map(|&t| p1.iter().map(|f| f.eval(t)).collect()));
        out
    };
    let (q1, q2) = (axis(grid.t1()), axis(grid.t2()));
    VectorSurface::from_fn(grid.clone(), l * l, |a, b, out| {
        for i2 in 0..l {
            for i1 in 0..l {
                let diag = if i1 == i2 { initial[i1] } else { 0.0 };
                out[pair_index(l, i1, i2)] =
                    diag + initial[i2] * (q1[a][i1] - initial[i1]) + initial[i1] * (q2[b][i2] - initial[i2]);
            }
        }
    })
}

/// Solves `P(t) = φ(t) + ∫_(s,t] P(u-) Λ(du)` on the grid of `rates2d`, where
/// `φ_(i1,i2)(t) = δ_{i1 i2} p0_{i1} + p0_{i2} (P_{i1}(t1) - p0_{i1}) + p0_{i1} (P_{i2}(t2) - p0_{i2})`
/// carries the univariate solutions on the boundary. `p0` must be a unit
/// vector (or zero): the state at `s` has to be known within the class.
pub fn aalen_johansen_2d(
    rates2d: &RateMeasure2D,
    rates1d: &RateMeasure1D,
    initial: &[f64],
) -> Result<BivariateProbabilities, EstimateError> {
    let l = rates2d.states();
    if rates1d.states() != l {
        return Err(EstimateError::DimensionMismatch {
            expected: l,
            actual: rates1d.states(),
        });
    }
    check_initial(initial, l)?;
    let degenerate = initial.iter().all(|&p| p == 0.0 || (p - 1.0).abs() <= 1e-12)
        && initial.iter().filter(|&&p| p != 0.0).count() <= 1;
    if !degenerate {
        return Err(EstimateError::NonDegenerateInitial);
    }
    let p1 = aalen_johansen_1d(rates1d, initial)?;
    let phi = bivariate_forcing(rates2d.grid(), &p1, initial);
    let surface = solve_volterra_2d(&phi, rates2d.measure())?;
    Ok(BivariateProbabilities { states: l, surface })
}
