//! Pathwise check of the censored decomposition of the bivariate occupation.
//!
//! For one path with `u_k = t_k ∧ R` and `I = 1{Z = i}`,
//!
//! `1{t1 < R, t2 < R} I_{i1}(t1) I_{i2}(t2) = c1 c2 + c1 A2(t2) + c2 A1(t1) + A1(t1) A2(t2) - C(t1, t2)`
//!
//! where `c_k = I_{ik}(s)`, `A_k(t) = Σ_{j≠ik} (N_{j ik} - N_{ik j})` over `(s, u_k]`
//! and `C = 1{R ≤ t1 ∨ t2} I_{i1}(u1) I_{i2}(u2)`. Both sides are accumulated
//! over the class from independent ingredients (sojourn intervals on the
//! left, jump counts and states at `t ∧ R` on the right) in exact unit
//! arithmetic.

use alloc::vec;
use alloc::vec::Vec;

use super::empirical::{class_grid, lower_node, occupation_counts_2d};
use super::{Cohort, EstimateError, EstimationWindow};
use crate::model::{Landmark, SamplePath};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionReport {
    /// Largest absolute difference between the two sides over all grid nodes.
    pub residual: f64,
    /// Largest value of the censoring correction `C`.
    pub max_correction: f64,
    pub nodes: usize,
}

/// Value changes of a node array as `(node, delta)`.
fn deltas(values: &[f64]) -> Vec<(usize, f64)> {
    let mut prev = 0.0;
    let mut out = Vec::new();
    for (k, &v) in values.iter().enumerate() {
        if v != prev {
            out.push((k, v - prev));
            prev = v;
        }
    }
    out
}

struct Axis {
    c: f64,
    a: Vec<(usize, f64)>,
    z: Vec<(usize, f64)>,
    observed_z: Vec<(usize, f64)>,
}

fn axis(path: &SamplePath, i: usize, s: f64, grid: &[f64]) -> Axis {
    let r = path.censor_time();
    let len = grid.len() + 1;
    let time = |k: usize| if k == 0 { s } else { grid[k - 1] };
    let mut a = Vec::new();
    for j in path.jumps_in(s, r) {
        let node = lower_node(grid, s, j.time);
        if node < len {
            let delta = f64::from(u8::from(j.to == i)) - f64::from(u8::from(j.from == i));
            if delta != 0.0 {
                a.push((node, delta));
            }
        }
    }
    let z: Vec<f64> = (0..len)
        .map(|k| f64::from(u8::from(path.state_at(time(k).min(r)) == i)))
        .collect();
    let observed: Vec<f64> = (0..len).map(|k| if time(k) < r { z[k] } else { 0.0 }).collect();
    Axis {
        c: f64::from(u8::from(path.state_at(s) == i)),
        a,
        z: deltas(&z),
        observed_z: deltas(&observed),
    }
}

fn quadrants(diff: &mut [f64], width: usize, x: &[(usize, f64)], y: &[(usize, f64)], weight: f64) {
    for &(p, u) in x {
        for &(q, v) in y {
            diff[p * width + q] += weight * u * v;
        }
    }
}

fn cumulate(diff: &mut [f64], len1: usize, len2: usize) {
    for a in 0..len1 {
        for b in 0..len2 {
            let mut v = diff[a * len2 + b];
            if a > 0 {
                v += diff[(a - 1) * len2 + b];
            }
            if b > 0 {
                v += diff[a * len2 + b - 1];
            }
            if a > 0 && b > 0 {
                v -= diff[(a - 1) * len2 + b - 1];
            }
            diff[a * len2 + b] = v;
        }
    }
}

/// Maximal residual of the decomposition for the state pair `(i1, i2)` over
/// the class grid of `z`, scaled to averages.
pub fn decomposition_residual_2d(
    cohort: &Cohort,
    z: &Landmark,
    pair: (usize, usize),
    window: &EstimationWindow,
) -> Result<DecompositionReport, EstimateError> {
    let (i1, i2) = pair;
    cohort.states().check(i1)?;
    cohort.states().check(i2)?;
    let s = window.s;
    let members = cohort.members(z);
    for &m in &members {
        let p = &cohort.paths()[m];
        if p.censor_time() <= s {
            return Err(EstimateError::CensoredBeforeLandmark {
                id: p.id(),
                censor: p.censor_time(),
                s,
            });
        }
    }
    let grid1 = class_grid(cohort, &members, s, window.tau1, &[]);
    let grid2 = class_grid(cohort, &members, s, window.tau2, &[]);
    let (len1, len2) = (grid1.len() + 1, grid2.len() + 1);
    let l = cohort.states().len();
    let lhs = &occupation_counts_2d(cohort, &members, s, &grid1, &grid2)[super::pair_index(l, i1, i2)];

    let mut main = vec![0.0; len1 * len2];
    let mut correction = vec![0.0; len1 * len2];
    for &m in &members {
        let unit = cohort.unit(m);
        let path = &cohort.paths()[m];
        let x = axis(path, i1, s, &grid1);
        let y = axis(path, i2, s, &grid2);
        main[0] += unit * x.c * y.c;
        quadrants(&mut main, len2, &[(0, x.c)], &y.a, unit);
        quadrants(&mut main, len2, &x.a, &[(0, y.c)], unit);
        quadrants(&mut main, len2, &x.a, &y.a, unit);
        // 1{R ≤ t1 ∨ t2} Z1 Z2 = Z1 Z2 - 1{t1 < R} Z1 1{t2 < R} Z2
        quadrants(&mut correction, len2, &x.z, &y.z, unit);
        quadrants(&mut correction, len2, &x.observed_z, &y.observed_z, -unit);
    }
    cumulate(&mut main, len1, len2);
    cumulate(&mut correction, len1, len2);

    let scale = cohort.scale();
    let mut residual: f64 = 0.0;
    let mut max_correction: f64 = 0.0;
    for k in 0..len1 * len2 {
        residual = residual.max((lhs[k] - (main[k] - correction[k])).abs());
        max_correction = max_correction.max(correction[k].abs());
    }
    Ok(DecompositionReport {
        residual: residual * scale,
        max_correction: max_correction * scale,
        nodes: len1 * len2,
    })
}
