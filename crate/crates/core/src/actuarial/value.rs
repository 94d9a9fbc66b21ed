use alloc::vec;
use alloc::vec::Vec;

use super::{ActuarialError, CashFlow1D, CashFlow2D, DiscountFunction};
use crate::estimate::{pair_index, BivariateProbabilities, LandmarkFit, RateMeasure1D, RateMeasure2D};
use crate::model::{SamplePath, StepFunction1D};

/// Which occupation a sojourn payment at time `u` looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SojournTiming {
    /// The state at `u` (after any jump at `u`).
    #[default]
    AtPayment,
    /// The state just before `u`.
    BeforePayment,
}

/// Breakpoints of a piecewise integral over `(a, b]`.
fn pieces(a: f64, b: f64, cuts: impl Iterator<Item = f64>) -> Vec<(f64, f64)> {
    let mut points: Vec<f64> = cuts.filter(|&t| t > a && t < b).collect();
    points.push(a);
    points.push(b);
    points.sort_by(f64::total_cmp);
    points.dedup();
    points.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Discounted payments of one fully observed path over `(s, T]`.
pub fn pathwise_value(
    path: &SamplePath,
    cf: &CashFlow1D,
    discount: &DiscountFunction,
    s: f64,
    timing: SojournTiming,
) -> Result<f64, ActuarialError> {
    let horizon = cf.horizon();
    if path.censor_time() < horizon {
        return Err(ActuarialError::CensoredPath { id: path.id() });
    }
    let d = |u: f64| discount.factor(s, u);
    let state = |u: f64| match timing {
        SojournTiming::AtPayment => path.state_at(u),
        SojournTiming::BeforePayment => path.state_before(u),
    };
    let mut total = 0.0;
    for i in 0..cf.states() {
        for &(t, amount) in cf.sojourn(i) {
            if t > s && t <= horizon && state(t) == i {
                total += amount * d(t);
            }
        }
        for piece in cf.continuous(i) {
            let (a, b) = (piece.from.max(s), piece.to.min(horizon));
            if a >= b {
                continue;
            }
            let cuts = path.jumps().iter().map(|j| j.time).chain(discount.breakpoints());
            for (x, y) in pieces(a, b, cuts) {
                if path.state_at(x) == i {
                    total += piece.rate * (y - x) * d(x);
                }
            }
        }
    }
    for jump in path.jumps_in(s, horizon) {
        if let Some(f) = cf.transitions().get(&(jump.from, jump.to)) {
            total += f.left_value(jump.time) * d(jump.time);
        }
    }
    Ok(total)
}

fn check_states(expected: usize, actual: usize) -> Result<(), ActuarialError> {
    if expected == actual {
        Ok(())
    } else {
        Err(ActuarialError::DimensionMismatch { expected, actual })
    }
}

/// `V = Σ_i ∫ d(u) P_i(u) A_i(du) + Σ_{i≠j} ∫ d(u) a_ij(u-) P_i(u-) Λ_ij(du)`,
/// with `P_i(u-)` in the sojourn part under [`SojournTiming::BeforePayment`].
pub fn expected_value_1d(
    cf: &CashFlow1D,
    probabilities: &[StepFunction1D],
    rates: &RateMeasure1D,
    discount: &DiscountFunction,
    timing: SojournTiming,
) -> Result<f64, ActuarialError> {
    check_states(cf.states(), probabilities.len())?;
    check_states(cf.states(), rates.states())?;
    let s = rates.origin();
    let horizon = cf.horizon();
    let d = |u: f64| discount.factor(s, u);
    let mut total = 0.0;
    for (i, p) in probabilities.iter().enumerate() {
        for &(t, amount) in cf.sojourn(i) {
            if t > s && t <= horizon {
                let occupation = match timing {
                    SojournTiming::AtPayment => p.eval(t),
                    SojournTiming::BeforePayment => p.left_limit(t),
                };
                total += amount * d(t) * occupation;
            }
        }
        for piece in cf.continuous(i) {
            let (a, b) = (piece.from.max(s), piece.to.min(horizon));
            if a >= b {
                continue;
            }
            let cuts = p.grid().iter().copied().chain(discount.breakpoints());
            for (x, y) in pieces(a, b, cuts) {
                total += piece.rate * (y - x) * d(x) * p.eval(x);
            }
        }
    }
    for (&t, atom) in rates.times().iter().zip(rates.atoms()) {
        if t > horizon {
            break;
        }
        for (&(i, j), f) in cf.transitions() {
            total += f.left_value(t) * d(t) * probabilities[i].left_limit(t) * atom[(i, j)];
        }
    }
    Ok(total)
}

fn node_for(times: &[f64], t: f64, timing: SojournTiming) -> usize {
    match timing {
        SojournTiming::AtPayment => times.partition_point(|&x| x <= t),
        SojournTiming::BeforePayment => times.partition_point(|&x| x < t),
    }
}

/// Bivariate plug-in value `E[∫∫ d(u1) d(u2) B(du1, du2) | ξ = z]` of a
/// two-dimensional payment stream, summed term by term:
///
/// * sojourn pairs against `P_(i,j)(u1, u2)`;
/// * mixed terms through `E[I_i(u1) N_kl(du2)] = p0_i P_k(u2-) Λ_kl(du2)
///   + Σ_m Σ_{v ≤ u1} P_(m,k)(v-, u2-) Λ_{(m,k),(i,l)}(dv, du2)`;
/// * transition pairs against `P_(i,k)(u1-, u2-) Λ_{(i,k),(j,l)}(du1, du2)`.
pub fn expected_value_2d(
    cf: &CashFlow2D,
    fit: &LandmarkFit,
    discount: &DiscountFunction,
    timing: SojournTiming,
) -> Result<f64, ActuarialError> {
    let (Some(rates2), Some(p2)) = (&fit.rates2d, &fit.probabilities2d) else {
        return Err(ActuarialError::MissingBivariate);
    };
    expected_value_2d_parts(
        cf,
        &fit.initial,
        &fit.probabilities,
        &fit.rates,
        p2,
        rates2,
        discount,
        timing,
    )
}

/// [`expected_value_2d`] on explicit inputs.
#[allow(clippy::too_many_arguments)]
pub fn expected_value_2d_parts(
    cf: &CashFlow2D,
    initial: &[f64],
    probabilities: &[StepFunction1D],
    rates: &RateMeasure1D,
    p2: &BivariateProbabilities,
    rates2: &RateMeasure2D,
    discount: &DiscountFunction,
    timing: SojournTiming,
) -> Result<f64, ActuarialError> {
    let l = cf.states;
    for actual in [
        initial.len(),
        probabilities.len(),
        rates.states(),
        p2.states(),
        rates2.states(),
    ] {
        check_states(l, actual)?;
    }
    if p2.grid() != rates2.grid() {
        return Err(ActuarialError::GridMismatch);
    }
    let grid = rates2.grid();
    let s = grid.origin();
    let horizon = cf.horizon;
    let inside = |t: f64| t > s && t <= horizon;
    let d = |u: f64| discount.factor(s, u);
    let (t1, t2) = (grid.t1(), grid.t2());
    let mut total = 0.0;

    for pair in &cf.sojourn_pairs {
        for &(u1, u2, v) in &pair.atoms {
            if inside(u1) && inside(u2) {
                let (a, b) = (node_for(t1, u1, timing), node_for(t2, u2, timing));
                total += v * d(u1) * d(u2) * p2.at(a, b, pair.i, pair.j);
            }
        }
    }

    for term in &cf.mixed {
        let (i, k, m) = (term.i, term.k, term.l);
        let mut direct = 0.0;
        for (&u, atom) in rates.times().iter().zip(rates.atoms()) {
            if inside(u) {
                direct +=
                    term.payment.left_value(u) * d(u) * initial[i] * probabilities[k].left_limit(u) * atom[(k, m)];
            }
        }
        // row[a] = Σ_b weight(b) Σ_q P_(q,k)(a-1, b-1) Λ_{(q,k),(i,m)}(a, b)
        let mut row = vec![0.0; grid.n1() + 1];
        let col = pair_index(l, i, m);
        for (a, b, cell) in rates2.measure().atoms() {
            let u2 = grid.time2(b);
            if !inside(u2) {
                continue;
            }
            let weight = term.payment.left_value(u2) * d(u2);
            let mut x = 0.0;
            for q in 0..l {
                x += p2.at(a - 1, b - 1, q, k) * cell[(pair_index(l, q, k), col)];
            }
            row[a] += weight * x;
        }
        for a in 1..row.len() {
            row[a] += row[a - 1];
        }
        for &(u1, v) in &term.sojourn {
            if inside(u1) {
                total += v * d(u1) * (direct + row[node_for(t1, u1, timing)]);
            }
        }
    }

    for pair in &cf.transition_pairs {
        if pair.from1 == pair.to1 || pair.from2 == pair.to2 {
            return Err(ActuarialError::DiagonalTransition { state: pair.from1 });
        }
        let row = pair_index(l, pair.from1, pair.from2);
        let col = pair_index(l, pair.to1, pair.to2);
        for (a, b, cell) in rates2.measure().atoms() {
            let (u1, u2) = (grid.time1(a), grid.time2(b));
            if inside(u1) && inside(u2) {
                let pay = pair.first.left_value(u1) * pair.second.left_value(u2) * d(u1) * d(u2);
                total += pay * p2.at(a - 1, b - 1, pair.from1, pair.from2) * cell[(row, col)];
            }
        }
    }
    Ok(total)
}
