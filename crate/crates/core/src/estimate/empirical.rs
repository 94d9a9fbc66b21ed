//! Empirical occupation and counting processes of a landmark class.
//!
//! Everything is accumulated in "unit" space first (each path adds its unit
//! weight, which is 1 for uniform cohorts, so sums are exact integers) and
//! scaled to averages at the end.

use alloc::vec;
use alloc::vec::Vec;

use super::{Cohort, EstimateError};
use crate::model::{IndexPair, Landmark, SamplePath, StepFunction1D, StepSurface2D};

/// Evaluation time `s` and the endpoints of the two time axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationWindow {
    pub s: f64,
    pub tau1: f64,
    pub tau2: f64,
}

impl EstimationWindow {
    pub fn new(s: f64, tau1: f64, tau2: f64) -> Result<Self, EstimateError> {
        for tau in [tau1, tau2] {
            if !(s.is_finite() && tau.is_finite() && s < tau) {
                return Err(EstimateError::InvalidWindow { s, tau });
            }
        }
        Ok(Self { s, tau1, tau2 })
    }

    /// Same endpoint on both axes.
    pub fn single(s: f64, tau: f64) -> Result<Self, EstimateError> {
        Self::new(s, tau, tau)
    }

    pub fn tau_max(&self) -> f64 {
        self.tau1.max(self.tau2)
    }
}

/// Smallest node index `k` with `t_k >= t`, where `t_0 = s` and
/// `t_k = grid[k - 1]`. Returns `grid.len() + 1` past the end.
pub(crate) fn lower_node(grid: &[f64], s: f64, t: f64) -> usize {
    if t <= s {
        0
    } else {
        1 + grid.partition_point(|&g| g < t)
    }
}

/// Every time in `(s, tau]` at which some member's observed occupation or
/// counting processes can change (observed jumps and finite censoring
/// times), merged with `extra`.
pub(crate) fn class_grid(cohort: &Cohort, members: &[usize], s: f64, tau: f64, extra: &[f64]) -> Vec<f64> {
    let mut grid: Vec<f64> = Vec::new();
    let inside = |t: f64| t > s && t <= tau;
    for &m in members {
        let path = &cohort.paths()[m];
        grid.extend(path.observed_jumps().iter().map(|j| j.time).filter(|&t| inside(t)));
        if inside(path.censor_time()) {
            grid.push(path.censor_time());
        }
    }
    grid.extend(extra.iter().copied().filter(|&t| inside(t)));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Node intervals `[lo, hi)` on which the path is in a given state and not
/// yet censored (`t < R`), as `(state, lo, hi)`.
fn occupation_intervals(path: &SamplePath, s: f64, grid: &[f64], out: &mut Vec<(usize, usize, usize)>) {
    out.clear();
    let r = path.censor_time();
    if r <= s {
        return;
    }
    let mut state = path.state_at(s);
    let mut start = s;
    for jump in path.jumps_in(s, f64::INFINITY) {
        if jump.time >= r {
            break;
        }
        out.push((state, lower_node(grid, s, start), lower_node(grid, s, jump.time)));
        state = jump.to;
        start = jump.time;
    }
    out.push((state, lower_node(grid, s, start), lower_node(grid, s, r)));
}

/// `[state][node]` unit sums of `1{t < R} 1{Z(t) = state}`.
pub(crate) fn occupation_counts(cohort: &Cohort, members: &[usize], s: f64, grid: &[f64]) -> Vec<Vec<f64>> {
    let l = cohort.states().len();
    let len = grid.len() + 1;
    let mut diff = vec![vec![0.0; len + 1]; l];
    let mut intervals = Vec::new();
    for &m in members {
        let unit = cohort.unit(m);
        occupation_intervals(&cohort.paths()[m], s, grid, &mut intervals);
        for &(state, lo, hi) in &intervals {
            if lo < hi {
                diff[state][lo] += unit;
                diff[state][hi.min(len)] -= unit;
            }
        }
    }
    diff.into_iter()
        .map(|d| {
            let mut acc = 0.0;
            d[..len]
                .iter()
                .map(|x| {
                    acc += x;
                    acc
                })
                .collect()
        })
        .collect()
}

/// `[from * l + to][node]` unit sums of `N_{from,to}(t ∧ R)`, counted from time 0.
pub(crate) fn counting_counts(cohort: &Cohort, members: &[usize], s: f64, grid: &[f64]) -> Vec<Vec<f64>> {
    let l = cohort.states().len();
    let len = grid.len() + 1;
    let mut diff = vec![vec![0.0; len]; l * l];
    for &m in members {
        let unit = cohort.unit(m);
        for jump in cohort.paths()[m].observed_jumps() {
            let k = lower_node(grid, s, jump.time);
            if k < len {
                diff[jump.from * l + jump.to][k] += unit;
            }
        }
    }
    for d in &mut diff {
        let mut acc = 0.0;
        for x in d.iter_mut() {
            acc += *x;
            *x = acc;
        }
    }
    diff
}

/// `[l * i2 + i1][node]` unit sums of `1{t1 < R, t2 < R} 1{Z(t1) = i1, Z(t2) = i2}`
/// over nodes `(a, b)` stored at `a * (n2 + 1) + b`.
pub(crate) fn occupation_counts_2d(
    cohort: &Cohort,
    members: &[usize],
    s: f64,
    grid1: &[f64],
    grid2: &[f64],
) -> Vec<Vec<f64>> {
    let l = cohort.states().len();
    let (len1, len2) = (grid1.len() + 1, grid2.len() + 1);
    let width = len2 + 1;
    let mut diff = vec![vec![0.0; (len1 + 1) * width]; l * l];
    let (mut iv1, mut iv2) = (Vec::new(), Vec::new());
    for &m in members {
        let unit = cohort.unit(m);
        let path = &cohort.paths()[m];
        occupation_intervals(path, s, grid1, &mut iv1);
        occupation_intervals(path, s, grid2, &mut iv2);
        for &(x, lo1, hi1) in &iv1 {
            let hi1 = hi1.min(len1);
            if lo1 >= hi1 {
                continue;
            }
            for &(y, lo2, hi2) in &iv2 {
                let hi2 = hi2.min(len2);
                if lo2 >= hi2 {
                    continue;
                }
                let d = &mut diff[l * y + x];
                d[lo1 * width + lo2] += unit;
                d[lo1 * width + hi2] -= unit;
                d[hi1 * width + lo2] -= unit;
                d[hi1 * width + hi2] += unit;
            }
        }
    }
    diff.into_iter().map(|d| prefix_2d(&d, len1, len2, width)).collect()
}

fn prefix_2d(diff: &[f64], len1: usize, len2: usize, width: usize) -> Vec<f64> {
    let mut out = vec![0.0; len1 * len2];
    for a in 0..len1 {
        let mut row = 0.0;
        for b in 0..len2 {
            row += diff[a * width + b];
            out[a * len2 + b] = row + if a > 0 { out[(a - 1) * len2 + b] } else { 0.0 };
        }
    }
    out
}

fn check_state(cohort: &Cohort, i: usize) -> Result<(), EstimateError> {
    cohort.states().check(i).map_err(EstimateError::from)
}

fn scaled(values: &[f64], scale: f64) -> Vec<f64> {
    values.iter().map(|v| v * scale).collect()
}

/// I_{z,j}(t) = (1/n) Σ_m 1{ξ = z} 1{t < R} 1{Z(t) = j} on `[s, τ]`.
pub fn occupation_estimator(
    cohort: &Cohort,
    z: &Landmark,
    j: usize,
    window: &EstimationWindow,
) -> Result<StepFunction1D, EstimateError> {
    check_state(cohort, j)?;
    let members = cohort.members(z);
    let grid = class_grid(cohort, &members, window.s, window.tau_max(), &[]);
    let counts = occupation_counts(cohort, &members, window.s, &grid);
    Ok(StepFunction1D::from_nodes(
        window.s,
        grid,
        scaled(&counts[j], cohort.scale()),
    )?)
}

/// N_{z,jk}(t) = (1/n) Σ_m 1{ξ = z} N_jk(t ∧ R) on `[s, τ]`.
pub fn counting_estimator(
    cohort: &Cohort,
    z: &Landmark,
    j: usize,
    k: usize,
    window: &EstimationWindow,
) -> Result<StepFunction1D, EstimateError> {
    check_state(cohort, j)?;
    check_state(cohort, k)?;
    if j == k {
        return Err(EstimateError::DiagonalIndex);
    }
    let members = cohort.members(z);
    let grid = class_grid(cohort, &members, window.s, window.tau_max(), &[]);
    let counts = counting_counts(cohort, &members, window.s, &grid);
    let l = cohort.states().len();
    Ok(StepFunction1D::from_nodes(
        window.s,
        grid,
        scaled(&counts[j * l + k], cohort.scale()),
    )?)
}

/// Bivariate occupation `(1/n) Σ_m 1{ξ = z} 1{t1 < R, t2 < R} 1{Z(t1) = i1, Z(t2) = i2}`.
pub fn occupation_estimator_2d(
    cohort: &Cohort,
    z: &Landmark,
    pair: (usize, usize),
    window: &EstimationWindow,
) -> Result<StepSurface2D, EstimateError> {
    check_state(cohort, pair.0)?;
    check_state(cohort, pair.1)?;
    let members = cohort.members(z);
    let grid1 = class_grid(cohort, &members, window.s, window.tau1, &[]);
    let grid2 = class_grid(cohort, &members, window.s, window.tau2, &[]);
    let counts = occupation_counts_2d(cohort, &members, window.s, &grid1, &grid2);
    let l = cohort.states().len();
    let nodes = scaled(&counts[l * pair.1 + pair.0], cohort.scale());
    Ok(StepSurface2D::new(window.s, grid1, grid2, nodes)?)
}

/// Bivariate counting `(1/n) Σ_m 1{ξ = z} N_{i1 j1}(t1 ∧ R) N_{i2 j2}(t2 ∧ R)`
/// for off-diagonal index pairs.
pub fn counting_estimator_2d(
    cohort: &Cohort,
    z: &Landmark,
    pair: IndexPair,
    window: &EstimationWindow,
) -> Result<StepSurface2D, EstimateError> {
    let ((i1, j1), (i2, j2)) = pair;
    for i in [i1, j1, i2, j2] {
        check_state(cohort, i)?;
    }
    if i1 == j1 || i2 == j2 {
        return Err(EstimateError::DiagonalIndex);
    }
    let s = window.s;
    let members = cohort.members(z);
    let grid1 = class_grid(cohort, &members, s, window.tau1, &[]);
    let grid2 = class_grid(cohort, &members, s, window.tau2, &[]);
    let (len1, len2) = (grid1.len() + 1, grid2.len() + 1);
    let mut diff = vec![0.0; len1 * len2];
    for &m in &members {
        let unit = cohort.unit(m);
        let jumps = cohort.paths()[m].observed_jumps();
        for e1 in jumps.iter().filter(|e| e.from == i1 && e.to == j1) {
            let a = lower_node(&grid1, s, e1.time);
            if a >= len1 {
                continue;
            }
            for e2 in jumps.iter().filter(|e| e.from == i2 && e.to == j2) {
                let b = lower_node(&grid2, s, e2.time);
                if b < len2 {
                    diff[a * len2 + b] += unit;
                }
            }
        }
    }
    let mut nodes = prefix_2d(
        &{
            // prefix_2d expects a row stride one wider than the output
            let mut wide = vec![0.0; (len1 + 1) * (len2 + 1)];
            for a in 0..len1 {
                wide[a * (len2 + 1)..a * (len2 + 1) + len2].copy_from_slice(&diff[a * len2..(a + 1) * len2]);
            }
            wide
        },
        len1,
        len2,
        len2 + 1,
    );
    for v in &mut nodes {
        *v *= cohort.scale();
    }
    Ok(StepSurface2D::new(s, grid1, grid2, nodes)?)
}
