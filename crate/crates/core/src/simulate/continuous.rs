use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use super::{check_distribution, draw_index, individual_rng, SimulateError};
use crate::matrix::Matrix;
use crate::model::{Jump, SamplePath, StateSpace};

/// Time-homogeneous continuous-time Markov chain observed on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousMarkovModel {
    states: StateSpace,
    initial: Vec<f64>,
    intensities: Matrix,
    horizon: f64,
}

impl ContinuousMarkovModel {
    /// Off-diagonal entries of `intensities` are the jump intensities; the
    /// diagonal is ignored.
    pub fn new(
        states: StateSpace,
        initial: Vec<f64>,
        intensities: Matrix,
        horizon: f64,
    ) -> Result<Self, SimulateError> {
        let l = states.len();
        if initial.len() != l {
            return Err(SimulateError::DimensionMismatch {
                expected: l,
                actual: initial.len(),
            });
        }
        check_distribution("initial distribution", &initial)?;
        if intensities.rows() != l || intensities.cols() != l {
            return Err(SimulateError::DimensionMismatch {
                expected: l,
                actual: intensities.rows().max(intensities.cols()),
            });
        }
        for i in 0..l {
            for j in 0..l {
                let value = intensities[(i, j)];
                if i != j && !(value.is_finite() && value >= 0.0) {
                    return Err(SimulateError::InvalidIntensity { from: i, to: j, value });
                }
            }
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(SimulateError::InvalidHorizon);
        }
        Ok(Self {
            states,
            initial,
            intensities,
            horizon,
        })
    }

    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn intensity(&self, from: usize, to: usize) -> f64 {
        if from == to {
            0.0
        } else {
            self.intensities[(from, to)]
        }
    }
}

pub fn simulate_continuous_individual(model: &ContinuousMarkovModel, seed: u64, id: u64) -> SamplePath {
    let mut rng = individual_rng(seed, id);
    let l = model.states.len();
    let initial = draw_index(&mut rng, &model.initial);
    let mut state = initial;
    let mut t = 0.0;
    let mut jumps = Vec::new();
    let mut weights = vec![0.0; l];
    loop {
        let mut total = 0.0;
        for (j, w) in weights.iter_mut().enumerate() {
            *w = model.intensity(state, j);
            total += *w;
        }
        if total <= 0.0 {
            break;
        }
        // 1 - U lies in (0, 1], so the logarithm is finite
        let u: f64 = rng.random();
        let hold = -libm::log(1.0 - u) / total;
        let next_t = t + hold;
        if next_t > model.horizon || next_t <= t {
            break;
        }
        for w in weights.iter_mut() {
            *w /= total;
        }
        let next = draw_index(&mut rng, &weights);
        jumps.push(Jump::new(next_t, state, next));
        state = next;
        t = next_t;
    }
    SamplePath::uncensored(id, initial, jumps).expect("simulated jump times are increasing")
}

pub fn simulate_continuous(model: &ContinuousMarkovModel, n: usize, seed: u64) -> Vec<SamplePath> {
    (0..n as u64)
        .map(|id| simulate_continuous_individual(model, seed, id))
        .collect()
}
