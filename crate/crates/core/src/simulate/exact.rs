use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use super::discrete::jumps_of;
use super::{individual_rng, CensorLaw, DiscreteModel, LandmarkRule, SimulateError, SAMPLE_DOMAIN};
use crate::matrix::Matrix;
use crate::model::{Landmark, SamplePath, StateSpace};

/// Largest number of trajectories (`l^T`) the enumeration accepts.
pub const MAX_ENUMERATION: u64 = 1_000_000;

/// Every trajectory of a discrete-time model up to its horizon with its exact
/// probability, together with an independent censoring law.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactLaw {
    states: StateSpace,
    horizon: usize,
    s: f64,
    paths: Vec<(SamplePath, f64)>,
    censor: CensorLaw,
}

/// Enumerates all trajectories of `model` on `0..=horizon` with positive
/// probability.
pub fn exact_law<M: DiscreteModel + ?Sized>(
    model: &M,
    censor: CensorLaw,
    s: f64,
    horizon: usize,
) -> Result<ExactLaw, SimulateError> {
    censor.check_after(s)?;
    if horizon == 0 || horizon > model.horizon() {
        return Err(SimulateError::InvalidHorizon);
    }
    let l = model.states().len();
    let size = (l as u128).checked_pow(horizon as u32).unwrap_or(u128::MAX);
    if size > MAX_ENUMERATION as u128 {
        return Err(SimulateError::EnumerationTooLarge {
            states: l,
            horizon,
            size,
            limit: MAX_ENUMERATION,
        });
    }

    let mut paths = Vec::new();
    let mut history = Vec::with_capacity(horizon + 1);
    for (start, &p) in model.initial_distribution().iter().enumerate() {
        if p > 0.0 {
            history.push(start);
            enumerate(model, horizon, &mut history, p, &mut paths);
            history.pop();
        }
    }
    Ok(ExactLaw {
        states: model.states().clone(),
        horizon,
        s,
        paths,
        censor,
    })
}

fn enumerate<M: DiscreteModel + ?Sized>(
    model: &M,
    horizon: usize,
    history: &mut Vec<usize>,
    prob: f64,
    out: &mut Vec<(SamplePath, f64)>,
) {
    let step = history.len();
    if step > horizon {
        let id = out.len() as u64;
        let path = SamplePath::uncensored(id, history[0], jumps_of(history)).expect("valid discrete trajectory");
        out.push((path, prob));
        return;
    }
    let mut probs = vec![0.0; model.states().len()];
    model.step_distribution(step, history, &mut probs);
    for (next, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            history.push(next);
            enumerate(model, horizon, history, prob * p, out);
            history.pop();
        }
    }
}

impl ExactLaw {
    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn censor(&self) -> &CensorLaw {
        &self.censor
    }

    /// Uncensored trajectories with their probabilities.
    pub fn paths(&self) -> &[(SamplePath, f64)] {
        &self.paths
    }

    pub fn total_probability(&self) -> f64 {
        self.paths.iter().map(|p| p.1).sum()
    }

    pub fn with_landmarks(mut self, rule: LandmarkRule) -> Self {
        for (path, _) in &mut self.paths {
            let z = rule.landmark(path, self.s, &self.states);
            *path = path.clone().with_landmark(z);
        }
        self
    }

    pub fn with_censoring(mut self, censor: CensorLaw) -> Result<Self, SimulateError> {
        censor.check_after(self.s)?;
        self.censor = censor;
        Ok(self)
    }

    pub fn landmarks(&self) -> BTreeSet<Landmark> {
        self.paths.iter().map(|(p, _)| p.landmark().clone()).collect()
    }

    pub fn class_probability(&self, z: &Landmark) -> f64 {
        self.paths.iter().filter(|(p, _)| p.landmark() == z).map(|p| p.1).sum()
    }

    /// E[f(Z) | ξ = z] under the uncensored law, `None` for a null class.
    pub fn expectation(&self, z: &Landmark, mut f: impl FnMut(&SamplePath) -> f64) -> Option<f64> {
        let mut mass = 0.0;
        let mut total = 0.0;
        for (path, p) in self.paths.iter().filter(|(path, _)| path.landmark() == z) {
            mass += p;
            total += p * f(path);
        }
        (mass > 0.0).then(|| total / mass)
    }

    /// P(Z(t) = j | ξ = z) for every state `j`.
    pub fn occupation(&self, z: &Landmark, t: f64) -> Option<Vec<f64>> {
        (0..self.states.len())
            .map(|j| self.expectation(z, |p| f64::from(u8::from(p.state_at(t) == j))))
            .collect()
    }

    /// P(Z(t1) = i, Z(t2) = j | ξ = z).
    pub fn joint_occupation(&self, z: &Landmark, t1: f64, t2: f64) -> Option<Matrix> {
        let l = self.states.len();
        let mut out = Matrix::zeros(l, l);
        let mut mass = 0.0;
        for (path, p) in self.paths.iter().filter(|(path, _)| path.landmark() == z) {
            mass += p;
            out[(path.state_at(t1), path.state_at(t2))] += p;
        }
        (mass > 0.0).then(|| out.scale(1.0 / mass))
    }

    /// Every (trajectory, censoring time) pair with positive joint
    /// probability; ids are reassigned consecutively.
    pub fn joint_paths(&self) -> Vec<(SamplePath, f64)> {
        let mut out = Vec::new();
        for (path, p) in &self.paths {
            for &(r, q) in self.censor.atoms() {
                if q > 0.0 {
                    let id = out.len() as u64;
                    let censored = path
                        .clone()
                        .with_censoring(r)
                        .expect("censor times are valid")
                        .with_id(id);
                    out.push((censored, p * q));
                }
            }
        }
        out
    }

    /// `n` uncensored trajectories drawn from the law.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<SamplePath> {
        let mut cumulative = Vec::with_capacity(self.paths.len());
        let mut acc = 0.0;
        for (_, p) in &self.paths {
            acc += p;
            cumulative.push(acc);
        }
        (0..n as u64)
            .map(|id| {
                let u: f64 = individual_rng(seed ^ SAMPLE_DOMAIN, id).random::<f64>() * acc;
                let k = cumulative.partition_point(|&c| c <= u).min(self.paths.len() - 1);
                self.paths[k].0.clone().with_id(id)
            })
            .collect()
    }
}
