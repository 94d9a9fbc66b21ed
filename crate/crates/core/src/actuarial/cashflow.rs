use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::ActuarialError;

fn check_value(value: f64) -> Result<(), ActuarialError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ActuarialError::NonFinite { value })
    }
}

fn check_time(time: f64) -> Result<(), ActuarialError> {
    if time.is_finite() {
        Ok(())
    } else {
        Err(ActuarialError::InvalidTime { time })
    }
}

/// Savings-account value κ as a positive right-continuous step function.
/// Before its first point κ takes the first value.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountFunction {
    points: Vec<(f64, f64)>,
}

impl DiscountFunction {
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self, ActuarialError> {
        if points.is_empty() {
            return Ok(Self::constant());
        }
        for &(t, k) in &points {
            check_time(t)?;
            if !(k > 0.0 && k.is_finite()) {
                return Err(ActuarialError::InvalidDiscount { time: t, value: k });
            }
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(ActuarialError::InvalidTime { time: points[0].0 });
        }
        Ok(Self { points })
    }

    /// κ ≡ 1.
    pub fn constant() -> Self {
        Self {
            points: vec![(0.0, 1.0)],
        }
    }

    /// κ(t) = e^{δ t} sampled on the integers `0..=horizon` and held constant in between.
    pub fn yearly(rate: f64, horizon: usize) -> Result<Self, ActuarialError> {
        Self::new((0..=horizon).map(|k| (k as f64, libm::exp(rate * k as f64))).collect())
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn kappa(&self, t: f64) -> f64 {
        let k = self.points.partition_point(|p| p.0 <= t);
        self.points[k.saturating_sub(1)].1
    }

    /// κ(s) / κ(u).
    pub fn factor(&self, s: f64, u: f64) -> f64 {
        self.kappa(s) / self.kappa(u)
    }

    pub(crate) fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }
}

/// Right-continuous step function used for transition payments; payments on
/// a jump at `u` use the left limit `a(u-)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PaymentFunction {
    base: f64,
    steps: Vec<(f64, f64)>,
}

impl PaymentFunction {
    pub fn constant(value: f64) -> Result<Self, ActuarialError> {
        check_value(value)?;
        Ok(Self {
            base: value,
            steps: Vec::new(),
        })
    }

    /// `base` before the first step, then the value of the latest `(time, value)` step.
    pub fn new(base: f64, mut steps: Vec<(f64, f64)>) -> Result<Self, ActuarialError> {
        check_value(base)?;
        for &(t, v) in &steps {
            check_time(t)?;
            check_value(v)?;
        }
        steps.sort_by(|a, b| a.0.total_cmp(&b.0));
        if steps.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(ActuarialError::InvalidTime { time: steps[0].0 });
        }
        Ok(Self { base, steps })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn steps(&self) -> &[(f64, f64)] {
        &self.steps
    }

    pub fn value(&self, t: f64) -> f64 {
        match self.steps.partition_point(|p| p.0 <= t) {
            0 => self.base,
            k => self.steps[k - 1].1,
        }
    }

    pub fn left_value(&self, t: f64) -> f64 {
        match self.steps.partition_point(|p| p.0 < t) {
            0 => self.base,
            k => self.steps[k - 1].1,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            base: self.base * factor,
            steps: self.steps.iter().map(|&(t, v)| (t, v * factor)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.base == 0.0 && self.steps.iter().all(|s| s.1 == 0.0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.steps.iter().fold(self.base.abs(), |m, s| m.max(s.1.abs()))
    }

    /// Split into `up - down` with both parts nondecreasing, starting from
    /// `max(base, 0)` and `max(-base, 0)`.
    pub fn monotone_split(&self) -> (PaymentFunction, PaymentFunction) {
        let mut up = (self.base.max(0.0), Vec::new());
        let mut down = ((-self.base).max(0.0), Vec::new());
        let (mut u, mut d) = (up.0, down.0);
        let mut prev = self.base;
        for &(t, v) in &self.steps {
            let jump = v - prev;
            if jump > 0.0 {
                u += jump;
                up.1.push((t, u));
            } else if jump < 0.0 {
                d -= jump;
                down.1.push((t, d));
            }
            prev = v;
        }
        (
            PaymentFunction {
                base: up.0,
                steps: up.1,
            },
            PaymentFunction {
                base: down.0,
                steps: down.1,
            },
        )
    }
}

/// Absolutely continuous sojourn payment at `rate` per time unit on `(from, to]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousPiece {
    pub from: f64,
    pub to: f64,
    pub rate: f64,
}

/// One-dimensional payment stream: sojourn payments `A_i(du)` while in
/// state `i` and transition payments `a_ij(u-)` on `i → j` jumps, all
/// vanishing after the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct CashFlow1D {
    states: usize,
    horizon: f64,
    sojourn: Vec<Vec<(f64, f64)>>,
    continuous: Vec<Vec<ContinuousPiece>>,
    transitions: BTreeMap<(usize, usize), PaymentFunction>,
}

impl CashFlow1D {
    pub fn new(states: usize, horizon: f64) -> Result<Self, ActuarialError> {
        check_time(horizon)?;
        Ok(Self {
            states,
            horizon,
            sojourn: vec![Vec::new(); states],
            continuous: vec![Vec::new(); states],
            transitions: BTreeMap::new(),
        })
    }

    fn check_state(&self, i: usize) -> Result<(), ActuarialError> {
        if i < self.states {
            Ok(())
        } else {
            Err(ActuarialError::StateOutOfRange {
                index: i,
                size: self.states,
            })
        }
    }

    /// Adds `amount` to `A_i` at time `t`.
    pub fn add_sojourn_atom(&mut self, i: usize, t: f64, amount: f64) -> Result<(), ActuarialError> {
        self.check_state(i)?;
        check_time(t)?;
        check_value(amount)?;
        let atoms = &mut self.sojourn[i];
        let k = atoms.partition_point(|a| a.0 < t);
        if k < atoms.len() && atoms[k].0 == t {
            atoms[k].1 += amount;
        } else {
            atoms.insert(k, (t, amount));
        }
        Ok(())
    }

    pub fn add_sojourn_rate(&mut self, i: usize, from: f64, to: f64, rate: f64) -> Result<(), ActuarialError> {
        self.check_state(i)?;
        check_time(from)?;
        check_time(to)?;
        check_value(rate)?;
        if from >= to {
            return Err(ActuarialError::InvalidTime { time: to });
        }
        self.continuous[i].push(ContinuousPiece { from, to, rate });
        Ok(())
    }

    pub fn set_transition(&mut self, i: usize, j: usize, payment: PaymentFunction) -> Result<(), ActuarialError> {
        self.check_state(i)?;
        self.check_state(j)?;
        if i == j {
            return Err(ActuarialError::DiagonalTransition { state: i });
        }
        self.transitions.insert((i, j), payment);
        Ok(())
    }

    /// Unit payment at each of `times` while in `state`.
    pub fn annuity(states: usize, state: usize, times: &[f64], horizon: f64) -> Result<Self, ActuarialError> {
        let mut cf = Self::new(states, horizon)?;
        for &t in times {
            cf.add_sojourn_atom(state, t, 1.0)?;
        }
        Ok(cf)
    }

    /// `amount` paid on every `from → to` jump.
    pub fn transition_benefit(
        states: usize,
        from: usize,
        to: usize,
        amount: f64,
        horizon: f64,
    ) -> Result<Self, ActuarialError> {
        let mut cf = Self::new(states, horizon)?;
        cf.set_transition(from, to, PaymentFunction::constant(amount)?)?;
        Ok(cf)
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn sojourn(&self, i: usize) -> &[(f64, f64)] {
        &self.sojourn[i]
    }

    pub fn continuous(&self, i: usize) -> &[ContinuousPiece] {
        &self.continuous[i]
    }

    pub fn transitions(&self) -> &BTreeMap<(usize, usize), PaymentFunction> {
        &self.transitions
    }

    pub fn has_continuous(&self) -> bool {
        self.continuous.iter().any(|c| !c.is_empty())
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for atoms in &mut out.sojourn {
            for a in atoms.iter_mut() {
                a.1 *= factor;
            }
        }
        for pieces in &mut out.continuous {
            for p in pieces.iter_mut() {
                p.rate *= factor;
            }
        }
        for f in out.transitions.values_mut() {
            *f = f.scale(factor);
        }
        out
    }

    /// Replaces the continuous pieces by atoms at the points of `grid` (and
    /// the piece endpoints): the mass of `(g_{k-1}, g_k]` is placed at `g_k`.
    pub fn discretized(&self, grid: &[f64]) -> Self {
        let mut out = self.clone();
        for i in 0..self.states {
            for piece in core::mem::take(&mut out.continuous[i]) {
                let mut cuts: Vec<f64> = grid
                    .iter()
                    .copied()
                    .filter(|&g| g > piece.from && g < piece.to)
                    .collect();
                cuts.push(piece.to);
                let mut prev = piece.from;
                for c in cuts {
                    out.add_sojourn_atom(i, c, piece.rate * (c - prev))
                        .expect("finite inputs stay finite");
                    prev = c;
                }
            }
        }
        out
    }
}

/// Sojourn-pair payments: `v` at `(t1, t2)` if in `i` at `t1` and in `j` at `t2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SojournPair {
    pub i: usize,
    pub j: usize,
    pub atoms: Vec<(f64, f64, f64)>,
}

/// Sojourn-by-transition payments `Σ_t1 v(t1) I_i(t1) ∫ a(u2-) N_kl(du2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedTerm {
    pub i: usize,
    pub k: usize,
    pub l: usize,
    pub sojourn: Vec<(f64, f64)>,
    pub payment: PaymentFunction,
}

/// Transition-pair payments `∫∫ f(u1-) g(u2-) N_ij(du1) N_kl(du2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionPair {
    pub from1: usize,
    pub to1: usize,
    pub from2: usize,
    pub to2: usize,
    pub first: PaymentFunction,
    pub second: PaymentFunction,
}

/// Two-dimensional payment stream built from separable components.
#[derive(Debug, Clone, PartialEq)]
pub struct CashFlow2D {
    pub states: usize,
    pub horizon: f64,
    pub sojourn_pairs: Vec<SojournPair>,
    pub mixed: Vec<MixedTerm>,
    pub transition_pairs: Vec<TransitionPair>,
}

impl CashFlow2D {
    pub fn zero(states: usize, horizon: f64) -> Self {
        Self {
            states,
            horizon,
            sojourn_pairs: Vec::new(),
            mixed: Vec::new(),
            transition_pairs: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sojourn_pairs.iter().all(|p| p.atoms.iter().all(|a| a.2 == 0.0))
            && self
                .mixed
                .iter()
                .all(|m| m.payment.is_zero() || m.sojourn.iter().all(|a| a.1 == 0.0))
            && self
                .transition_pairs
                .iter()
                .all(|t| t.first.is_zero() || t.second.is_zero())
    }

    /// Swaps the two time coordinates. Mixed terms carry no orientation and
    /// are kept as they are.
    pub fn transposed(&self) -> Self {
        let mut out = self.clone();
        for p in &mut out.sojourn_pairs {
            core::mem::swap(&mut p.i, &mut p.j);
            for a in &mut p.atoms {
                *a = (a.1, a.0, a.2);
            }
        }
        for t in &mut out.transition_pairs {
            core::mem::swap(&mut t.from1, &mut t.from2);
            core::mem::swap(&mut t.to1, &mut t.to2);
            core::mem::swap(&mut t.first, &mut t.second);
        }
        out
    }

    /// Every payment function split into nondecreasing parts.
    pub fn monotone_parts(&self) -> Vec<(PaymentFunction, PaymentFunction)> {
        self.mixed
            .iter()
            .map(|m| m.payment.monotone_split())
            .chain(
                self.transition_pairs
                    .iter()
                    .flat_map(|t| [t.first.monotone_split(), t.second.monotone_split()]),
            )
            .collect()
    }
}

/// Representation of `Y²` for the cash flow `Y` of `cf`: sojourn pairs
/// `A_i(du1) A_j(du2)`, mixed terms `2 A_i(u1) a_kl(u2-)` (the two orientations
/// of the cross product are equal) and transition pairs `a_ij(u1-) a_kl(u2-)`,
/// the last one including the diagonal `u1 = u2`. Discounting is applied at
/// valuation. Continuous sojourn pieces must be discretized first.
pub fn second_moment_representation(cf: &CashFlow1D) -> Result<CashFlow2D, ActuarialError> {
    if cf.has_continuous() {
        return Err(ActuarialError::ContinuousPieces);
    }
    let l = cf.states();
    let mut out = CashFlow2D::zero(l, cf.horizon());
    for i in 0..l {
        for j in 0..l {
            let (x, y) = (cf.sojourn(i), cf.sojourn(j));
            if x.is_empty() || y.is_empty() {
                continue;
            }
            let atoms = x
                .iter()
                .flat_map(|&(t1, v1)| y.iter().map(move |&(t2, v2)| (t1, t2, v1 * v2)))
                .collect();
            out.sojourn_pairs.push(SojournPair { i, j, atoms });
        }
    }
    for i in 0..l {
        if cf.sojourn(i).is_empty() {
            continue;
        }
        for (&(k, m), payment) in cf.transitions() {
            out.mixed.push(MixedTerm {
                i,
                k,
                l: m,
                sojourn: cf.sojourn(i).iter().map(|&(t, v)| (t, 2.0 * v)).collect(),
                payment: payment.clone(),
            });
        }
    }
    for (&(i, j), first) in cf.transitions() {
        for (&(k, m), second) in cf.transitions() {
            out.transition_pairs.push(TransitionPair {
                from1: i,
                to1: j,
                from2: k,
                to2: m,
                first: first.clone(),
                second: second.clone(),
            });
        }
    }
    Ok(out)
}
