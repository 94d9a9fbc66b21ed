use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_distribution, draw_index, individual_rng, SimulateError};
use crate::matrix::Matrix;
use crate::model::{Jump, SamplePath, StateSpace};

/// Discrete-time model on the integer times `0, 1, ..., horizon`.
///
/// The state at time `step` is drawn given the states at `0..step`, which
/// lets the model be non-Markov.
pub trait DiscreteModel {
    fn states(&self) -> &StateSpace;
    fn initial_distribution(&self) -> &[f64];
    fn horizon(&self) -> usize;
    /// Distribution of the state at time `step >= 1` given `history`, the
    /// states at times `0..step`.
    fn step_distribution(&self, step: usize, history: &[usize], out: &mut [f64]);
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMarkovModel {
    states: StateSpace,
    initial: Vec<f64>,
    transitions: Vec<Matrix>,
}

impl DiscreteMarkovModel {
    /// `transitions[t - 1]` moves the chain from time `t - 1` to `t`.
    pub fn new(states: StateSpace, initial: Vec<f64>, transitions: Vec<Matrix>) -> Result<Self, SimulateError> {
        let l = states.len();
        if initial.len() != l {
            return Err(SimulateError::DimensionMismatch {
                expected: l,
                actual: initial.len(),
            });
        }
        check_distribution("initial distribution", &initial)?;
        if transitions.is_empty() {
            return Err(SimulateError::InvalidHorizon);
        }
        for (k, p) in transitions.iter().enumerate() {
            if p.rows() != l || p.cols() != l {
                return Err(SimulateError::DimensionMismatch {
                    expected: l,
                    actual: p.rows().max(p.cols()),
                });
            }
            for row in 0..l {
                let entries = p.row(row);
                if entries.iter().any(|x| !(0.0..=1.0).contains(x)) {
                    return Err(SimulateError::InvalidTransitionMatrix {
                        step: k + 1,
                        row,
                        reason: "entries must lie in [0, 1]".into(),
                    });
                }
                let sum: f64 = entries.iter().sum();
                if (sum - 1.0).abs() > 1e-12 {
                    return Err(SimulateError::InvalidTransitionMatrix {
                        step: k + 1,
                        row,
                        reason: format!("row sums to {sum}"),
                    });
                }
            }
        }
        Ok(Self {
            states,
            initial,
            transitions,
        })
    }

    /// Same transition matrix at every step.
    pub fn homogeneous(
        states: StateSpace,
        initial: Vec<f64>,
        transition: Matrix,
        horizon: usize,
    ) -> Result<Self, SimulateError> {
        Self::new(states, initial, vec![transition; horizon])
    }

    pub fn transitions(&self) -> &[Matrix] {
        &self.transitions
    }
}

impl DiscreteModel for DiscreteMarkovModel {
    fn states(&self) -> &StateSpace {
        &self.states
    }

    fn initial_distribution(&self) -> &[f64] {
        &self.initial
    }

    fn horizon(&self) -> usize {
        self.transitions.len()
    }

    fn step_distribution(&self, step: usize, history: &[usize], out: &mut [f64]) {
        let current = *history.last().expect("history starts with the initial state");
        out.copy_from_slice(self.transitions[step - 1].row(current));
    }
}

/// Discrete-time semi-Markov model with duration-dependent hazards.
///
/// `hazards[i][j][d]` is the probability of moving `i -> j` at the next step
/// after `d` completed steps in `i`. The last listed value extends to longer
/// durations; an empty list means the transition is impossible.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiMarkovModel {
    states: StateSpace,
    initial: Vec<f64>,
    horizon: usize,
    hazards: Vec<Vec<Vec<f64>>>,
}

impl SemiMarkovModel {
    pub fn new(
        states: StateSpace,
        initial: Vec<f64>,
        horizon: usize,
        hazards: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self, SimulateError> {
        let l = states.len();
        if initial.len() != l {
            return Err(SimulateError::DimensionMismatch {
                expected: l,
                actual: initial.len(),
            });
        }
        check_distribution("initial distribution", &initial)?;
        if horizon == 0 {
            return Err(SimulateError::InvalidHorizon);
        }
        if hazards.len() != l || hazards.iter().any(|row| row.len() != l) {
            return Err(SimulateError::DimensionMismatch {
                expected: l,
                actual: hazards.len(),
            });
        }
        for (i, row) in hazards.iter().enumerate() {
            for (j, h) in row.iter().enumerate() {
                for &value in h {
                    if !(0.0..=1.0).contains(&value) || (i == j && value != 0.0) {
                        return Err(SimulateError::InvalidHazard { from: i, to: j, value });
                    }
                }
            }
            let longest = row.iter().map(Vec::len).max().unwrap_or(0);
            for d in 0..longest {
                let sum: f64 = (0..l).map(|j| hazard(&row[j], d)).sum();
                if sum > 1.0 + 1e-12 {
                    return Err(SimulateError::HazardOverflow {
                        state: i,
                        duration: d,
                        sum,
                    });
                }
            }
        }
        Ok(Self {
            states,
            initial,
            horizon,
            hazards,
        })
    }

    pub fn hazard(&self, from: usize, to: usize, duration: usize) -> f64 {
        hazard(&self.hazards[from][to], duration)
    }
}

fn hazard(values: &[f64], duration: usize) -> f64 {
    match values.len() {
        0 => 0.0,
        n => values[duration.min(n - 1)],
    }
}

impl DiscreteModel for SemiMarkovModel {
    fn states(&self) -> &StateSpace {
        &self.states
    }

    fn initial_distribution(&self) -> &[f64] {
        &self.initial
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn step_distribution(&self, _step: usize, history: &[usize], out: &mut [f64]) {
        let current = *history.last().expect("history starts with the initial state");
        let sojourn = history.iter().rev().take_while(|&&z| z == current).count();
        let duration = sojourn - 1;
        let mut leave = 0.0;
        for (j, o) in out.iter_mut().enumerate() {
            *o = if j == current {
                0.0
            } else {
                self.hazard(current, j, duration)
            };
            leave += *o;
        }
        out[current] = (1.0 - leave).max(0.0);
    }
}

/// Jumps of a discrete trajectory given as its states at `0..=horizon`.
pub(crate) fn jumps_of(history: &[usize]) -> Vec<Jump> {
    history
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] != w[1])
        .map(|(k, w)| Jump::new((k + 1) as f64, w[0], w[1]))
        .collect()
}

/// One individual's uncensored path, drawn from stream `id`.
pub fn simulate_individual<M: DiscreteModel + ?Sized>(model: &M, seed: u64, id: u64) -> SamplePath {
    let mut rng = individual_rng(seed, id);
    let l = model.states().len();
    let mut history = Vec::with_capacity(model.horizon() + 1);
    history.push(draw_index(&mut rng, model.initial_distribution()));
    let mut probs = vec![0.0; l];
    for step in 1..=model.horizon() {
        model.step_distribution(step, &history, &mut probs);
        history.push(draw_index(&mut rng, &probs));
    }
    SamplePath::uncensored(id, history[0], jumps_of(&history)).expect("discrete trajectories are valid paths")
}

/// `n` independent uncensored paths with ids `0..n`.
pub fn simulate_discrete<M: DiscreteModel + ?Sized>(model: &M, n: usize, seed: u64) -> Vec<SamplePath> {
    (0..n as u64).map(|id| simulate_individual(model, seed, id)).collect()
}

pub fn simulate_markov(model: &DiscreteMarkovModel, n: usize, seed: u64) -> Vec<SamplePath> {
    simulate_discrete(model, n, seed)
}

pub fn simulate_semi_markov(model: &SemiMarkovModel, n: usize, seed: u64) -> Vec<SamplePath> {
    simulate_discrete(model, n, seed)
}
