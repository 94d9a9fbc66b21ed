use alloc::vec;
use alloc::vec::Vec;

use super::{check_epsilon, pair_index, EstimateError, EstimationWindow, RateMeasure1D, RateMeasure2D};
use crate::matrix::Matrix;
use crate::model::{Landmark, SamplePath};
use crate::simulate::ExactLaw;
use crate::volterra::{AtomicMeasure1D, Grid2D, MatrixMeasure2D};

fn law_grid(law: &ExactLaw, s: f64, tau: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = (1..=law.horizon()).map(|k| k as f64).collect();
    grid.extend(law.censor().atoms().iter().map(|a| a.0));
    grid.retain(|&t| t > s && t <= tau);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

fn jump_at(path: &SamplePath, t: f64) -> Option<(usize, usize)> {
    path.jumps().iter().find(|j| j.time == t).map(|j| (j.from, j.to))
}

/// Population rates of class `z` under the censored law:
/// `ΔΛ_ij(t) = E[1{ξ=z} 1{t ≤ R} ΔN_ij(t)] / (E[1{ξ=z} 1{t ≤ R} I_i(t-)] ∨ ε)`
/// and the bivariate analogue with `1{t1 ∨ t2 ≤ R}` and the products of
/// increments, computed by direct summation over every (trajectory,
/// censoring time) pair.
pub fn true_rates_from_law(
    law: &ExactLaw,
    z: &Landmark,
    window: &EstimationWindow,
    epsilon: f64,
) -> Result<(RateMeasure1D, RateMeasure2D), EstimateError> {
    check_epsilon(epsilon)?;
    let s = window.s;
    let tau = window.tau_max();
    if law.censor().survival(tau) == 0.0 {
        return Err(EstimateError::ZeroCensoringSurvival { tau });
    }
    let l = law.states().len();
    let grid = law_grid(law, s, tau);
    let grid1 = law_grid(law, s, window.tau1);
    let grid2 = law_grid(law, s, window.tau2);

    let mut den1 = vec![vec![0.0; l]; grid.len()];
    let mut num1 = vec![Matrix::zeros(l, l); grid.len()];
    let (n1, n2) = (grid1.len(), grid2.len());
    let mut den2 = vec![vec![0.0; l * l]; n1 * n2];
    let mut num2 = vec![Matrix::zeros(l * l, l * l); n1 * n2];

    for (path, p) in law.paths().iter().filter(|(path, _)| path.landmark() == z) {
        for &(r, q) in law.censor().atoms() {
            let w = p * q;
            if w == 0.0 {
                continue;
            }
            for (k, &t) in grid.iter().enumerate().filter(|(_, &t)| t <= r) {
                den1[k][path.state_before(t)] += w;
                if let Some((i, j)) = jump_at(path, t) {
                    num1[k][(i, j)] += w;
                }
            }
            for (a, &t1) in grid1.iter().enumerate().filter(|(_, &t)| t <= r) {
                for (b, &t2) in grid2.iter().enumerate().filter(|(_, &t)| t <= r) {
                    let cell = a * n2 + b;
                    den2[cell][pair_index(l, path.state_before(t1), path.state_before(t2))] += w;
                    if let (Some((a1, b1)), Some((a2, b2))) = (jump_at(path, t1), jump_at(path, t2)) {
                        let m = &mut num2[cell];
                        let row = pair_index(l, a1, a2);
                        m[(row, pair_index(l, b1, b2))] += w;
                        m[(row, pair_index(l, a1, b2))] -= w;
                        m[(row, pair_index(l, b1, a2))] -= w;
                        m[(row, pair_index(l, a1, a2))] += w;
                    }
                }
            }
        }
    }

    let mut times = Vec::new();
    let mut atoms = Vec::new();
    for (k, &t) in grid.iter().enumerate() {
        let mut m = Matrix::zeros(l, l);
        for i in 0..l {
            let d = den1[k][i].max(epsilon);
            for j in (0..l).filter(|&j| j != i) {
                m[(i, j)] = num1[k][(i, j)] / d;
                m[(i, i)] -= m[(i, j)];
            }
        }
        if !m.is_zero() {
            times.push(t);
            atoms.push(m);
        }
    }
    let rates1 = RateMeasure1D::new(z.clone(), AtomicMeasure1D::new(s, l, times, atoms)?);

    let mut measure = MatrixMeasure2D::zero(Grid2D::new(s, grid1, grid2)?, l * l);
    for a in 0..n1 {
        for b in 0..n2 {
            let cell = a * n2 + b;
            let mut m = num2[cell].clone();
            for (row, den) in den2[cell].iter().enumerate().take(l * l) {
                let d = den.max(epsilon);
                for v in m.row_mut(row) {
                    *v /= d;
                }
            }
            measure.set(a + 1, b + 1, m)?;
        }
    }
    let rates2 = RateMeasure2D::new(z.clone(), l, measure)?;
    Ok((rates1, rates2))
}

/// `sup_t max_entry |Λ_a((s,t]) - Λ_b((s,t])|` over the union of atom times.
pub fn sup_distance_1d(a: &RateMeasure1D, b: &RateMeasure1D) -> Result<f64, EstimateError> {
    if a.states() != b.states() {
        return Err(EstimateError::DimensionMismatch {
            expected: a.states(),
            actual: b.states(),
        });
    }
    let l = a.states();
    let mut diff = Matrix::zeros(l, l);
    let (mut i, mut j) = (0, 0);
    let mut best: f64 = 0.0;
    let (ta, tb) = (a.times(), b.times());
    while i < ta.len() || j < tb.len() {
        let t = match (ta.get(i), tb.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        if ta.get(i) == Some(&t) {
            diff.add_assign(&a.atoms()[i]);
            i += 1;
        }
        if tb.get(j) == Some(&t) {
            diff = diff.sub(&b.atoms()[j]);
            j += 1;
        }
        best = best.max(diff.max_abs());
    }
    Ok(best)
}

fn union(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = x.iter().chain(y).copied().collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Sup-distance of the cumulative bivariate measures over the union grid.
pub fn sup_distance_2d(a: &RateMeasure2D, b: &RateMeasure2D) -> Result<f64, EstimateError> {
    if a.states() != b.states() {
        return Err(EstimateError::DimensionMismatch {
            expected: a.states(),
            actual: b.states(),
        });
    }
    let dim = a.states() * a.states();
    let u1 = union(a.grid().t1(), b.grid().t1());
    let u2 = union(a.grid().t2(), b.grid().t2());
    let w = u2.len() + 1;
    let mut cum = vec![0.0; (u1.len() + 1) * w * dim * dim];
    let block = dim * dim;
    let mut place = |m: &RateMeasure2D, sign: f64| {
        let g = m.grid();
        for (x, y, mass) in m.measure().atoms() {
            let ua = u1.partition_point(|&t| t < g.time1(x)) + 1;
            let ub = u2.partition_point(|&t| t < g.time2(y)) + 1;
            let k = (ua * w + ub) * block;
            for (c, v) in cum[k..k + block].iter_mut().zip(mass.as_slice()) {
                *c += sign * v;
            }
        }
    };
    place(a, 1.0);
    place(b, -1.0);
    let mut best: f64 = 0.0;
    for x in 1..=u1.len() {
        for y in 1..=u2.len() {
            for e in 0..block {
                let v = cum[(x * w + y) * block + e]
                    + cum[((x - 1) * w + y) * block + e]
                    + cum[(x * w + y - 1) * block + e]
                    - cum[((x - 1) * w + y - 1) * block + e];
                cum[(x * w + y) * block + e] = v;
                best = best.max(v.abs());
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::StateSpace;
    use crate::simulate::{exact_law, CensorLaw, DiscreteMarkovModel};

    fn two_state(censor: CensorLaw) -> ExactLaw {
        let states = StateSpace::new(&["alive", "dead"]).unwrap();
        let p = Matrix::from_rows(&[vec![0.5, 0.5], vec![0.0, 1.0]]);
        let model = DiscreteMarkovModel::homogeneous(states, vec![1.0, 0.0], p, 2).unwrap();
        exact_law(&model, censor, 0.0, 2).unwrap()
    }

    #[test]
    fn constant_hazard_oracle() {
        let w = EstimationWindow::single(0.0, 2.0).unwrap();
        let (r1, r2) = true_rates_from_law(&two_state(CensorLaw::never()), &Landmark::universal(), &w, 1e-9).unwrap();
        assert_eq!(r1.times(), &[1.0, 2.0]);
        assert!(r1.atoms().iter().all(|m| m[(0, 1)] == 0.5 && m[(0, 0)] == -0.5));
        // ((0,0),(1,1)) in pair notation
        assert_eq!(r2.mass(1, 1, (0, 0), (1, 1)), 0.5);
        assert_eq!(r2.mass(2, 2, (0, 0), (1, 1)), 0.5);
        assert_eq!(r2.mass(1, 2, (0, 0), (1, 1)), 0.0);
    }

    #[test]
    fn censoring_leaves_rates_unchanged() {
        let w = EstimationWindow::single(0.0, 2.0).unwrap();
        let z = Landmark::universal();
        let censor = CensorLaw::new(vec![(1.5, 0.3), (f64::INFINITY, 0.7)]).unwrap();
        let (c1, c2) = true_rates_from_law(&two_state(censor), &z, &w, 1e-12).unwrap();
        let (u1, u2) = true_rates_from_law(&two_state(CensorLaw::never()), &z, &w, 1e-12).unwrap();
        assert!(sup_distance_1d(&c1, &u1).unwrap() < 1e-12);
        assert!(sup_distance_2d(&c2, &u2).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_certain_censoring() {
        let w = EstimationWindow::single(0.0, 2.0).unwrap();
        let censor = CensorLaw::new(vec![(1.5, 1.0)]).unwrap();
        assert_eq!(
            true_rates_from_law(&two_state(censor), &Landmark::universal(), &w, 1e-9).map(|_| ()),
            Err(EstimateError::ZeroCensoringSurvival { tau: 2.0 })
        );
    }

    #[test]
    fn sup_distance_of_shifted_atoms() {
        let l = Landmark::universal();
        let m = |t: f64| {
            let atom = Matrix::from_rows(&[vec![-1.0, 1.0], vec![0.0, 0.0]]);
            RateMeasure1D::new(l.clone(), AtomicMeasure1D::new(0.0, 2, vec![t], vec![atom]).unwrap())
        };
        assert_eq!(sup_distance_1d(&m(1.0), &m(2.0)).unwrap(), 1.0);
        assert_eq!(sup_distance_1d(&m(1.0), &m(1.0)).unwrap(), 0.0);
    }
}
