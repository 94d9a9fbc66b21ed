use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{ModelError, SamplePath, StepFunction1D};

/// A pair of transitions `((i1, j1), (i2, j2))`, one per time axis.
pub type IndexPair = ((usize, usize), (usize, usize));

/// N_ij on `[0, horizon]`: the number of `i -> j` jumps in `(0, t]`.
pub fn counting_process(path: &SamplePath, i: usize, j: usize, horizon: f64) -> Result<StepFunction1D, ModelError> {
    if i == j {
        return Err(ModelError::DiagonalCounting { i });
    }
    if horizon.is_nan() || horizon < 0.0 {
        return Err(ModelError::InvalidHorizon { s: 0.0, horizon });
    }
    let mut grid = Vec::new();
    let mut values = Vec::new();
    let mut count = 0.0;
    for jump in path.jumps_in(0.0, horizon) {
        if jump.from == i && jump.to == j {
            count += 1.0;
            grid.push(jump.time);
            values.push(count);
        }
    }
    StepFunction1D::new(0.0, 0.0, grid, values)
}

/// N_ii on `[s, horizon]`: minus the number of departures from `i` in `(s, t]`.
pub fn diagonal_counting(path: &SamplePath, i: usize, s: f64, horizon: f64) -> Result<StepFunction1D, ModelError> {
    if horizon.partial_cmp(&s) != Some(Ordering::Greater) {
        return Err(ModelError::InvalidHorizon { s, horizon });
    }
    let mut grid = Vec::new();
    let mut values = Vec::new();
    let mut count = 0.0;
    for jump in path.jumps_in(s, horizon) {
        if jump.from == i {
            count -= 1.0;
            grid.push(jump.time);
            values.push(count);
        }
    }
    StepFunction1D::new(s, 0.0, grid, values)
}

/// I_i(t) = 1{Z(t) = i} on `[0, horizon]`.
pub fn indicator_process(path: &SamplePath, i: usize, horizon: f64) -> StepFunction1D {
    let indicator = |state: usize| if state == i { 1.0 } else { 0.0 };
    let base = indicator(path.initial_state());
    let mut grid = Vec::new();
    let mut values = Vec::new();
    if horizon >= 0.0 {
        for jump in path.jumps_in(0.0, horizon) {
            if jump.from == i || jump.to == i {
                grid.push(jump.time);
                values.push(indicator(jump.to));
            }
        }
    }
    StepFunction1D::new(0.0, base, grid, values).expect("jump times of a valid path form a grid")
}

/// Largest absolute value of `I_i(t) - I_i(s) - sum_j (N_ji(t) - N_ji(s))` over
/// all states and all event times in `(s, horizon]`, where the `j = i` term
/// is the diagonal process.
pub fn verify_indicator_identity(path: &SamplePath, s: f64, horizon: f64) -> Result<f64, ModelError> {
    if horizon.partial_cmp(&s) != Some(Ordering::Greater) {
        return Err(ModelError::InvalidHorizon { s, horizon });
    }
    let states = path.max_state() + 1;
    let mut times: Vec<f64> = alloc::vec![s];
    times.extend(path.jumps_in(s, horizon).iter().map(|j| j.time));
    times.push(horizon);

    let mut worst: f64 = 0.0;
    for i in 0..states {
        let indicator = indicator_process(path, i, horizon);
        let diagonal = diagonal_counting(path, i, s, horizon)?;
        let arrivals: Vec<StepFunction1D> = (0..states)
            .filter(|&j| j != i)
            .map(|j| counting_process(path, j, i, horizon))
            .collect::<Result<_, _>>()?;
        for &t in &times {
            let mut rhs = indicator.eval(s) + diagonal.eval(t);
            for n in &arrivals {
                rhs += n.eval(t) - n.eval(s);
            }
            worst = worst.max((indicator.eval(t) - rhs).abs());
        }
    }
    Ok(worst)
}

/// Value of one factor of a bivariate product: N_ij(t) for `i != j`, and the
/// diagonal process N_ii(t) (relative to `s`) otherwise.
fn factor(path: &SamplePath, i: usize, j: usize, t: f64, s: f64) -> i64 {
    if i != j {
        path.count(i, j, t) as i64
    } else {
        -(path.jumps_in(s, t).iter().filter(|jump| jump.from == i).count() as i64)
    }
}

/// N_{i1 j1}(t1) N_{i2 j2}(t2), or with both times stopped at the censoring
/// time when `censor` is set. Diagonal indices use the diagonal process, so
/// the product is the bilinear expansion over off-diagonal components.
pub fn bivariate_product(path: &SamplePath, pair: IndexPair, t1: f64, t2: f64, s: f64, censor: bool) -> f64 {
    let ((i1, j1), (i2, j2)) = pair;
    let stop = |t: f64| if censor { t.min(path.censor_time()) } else { t };
    (factor(path, i1, j1, stop(t1), s) * factor(path, i2, j2, stop(t2), s)) as f64
}
