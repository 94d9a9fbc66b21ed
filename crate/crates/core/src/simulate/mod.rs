//! Synthetic cohorts and the exhaustive-enumeration law of small
//! discrete-time models.
//!
//! Every individual draws from its own ChaCha8 stream: the generator is
//! seeded with the run seed and the stream number is the individual id, so
//! a cohort does not depend on generation order or thread count.

mod censor;
mod continuous;
mod discrete;
mod exact;
mod landmark;

pub use censor::{apply_censoring, censor_individual, CensorLaw};
pub use continuous::{simulate_continuous, simulate_continuous_individual, ContinuousMarkovModel};
pub use discrete::{
    simulate_discrete, simulate_individual, simulate_markov, simulate_semi_markov, DiscreteMarkovModel, DiscreteModel,
    SemiMarkovModel,
};
pub use exact::{exact_law, ExactLaw, MAX_ENUMERATION};
pub use landmark::{assign_landmarks, landmark_as_if_markov, LandmarkRule};

use alloc::string::String;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::ModelError;

/// Name of the generator and seeding scheme, recorded in output metadata.
pub const RNG_ALGORITHM: &str = "chacha8/seed_from_u64/stream=id";

// Censoring draws use a separate key so they are independent of the path draws.
const CENSOR_DOMAIN: u64 = 0xC3A5_C85C_97CB_3127;
const SAMPLE_DOMAIN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulateError {
    #[error("{context}: probabilities must lie in [0, 1] and sum to 1 (sum = {sum})")]
    InvalidDistribution { context: String, sum: f64 },
    #[error("transition matrix for step {step}, row {row}: {reason}")]
    InvalidTransitionMatrix { step: usize, row: usize, reason: String },
    #[error("hazards out of state {state} at duration {duration} sum to {sum} > 1")]
    HazardOverflow { state: usize, duration: usize, sum: f64 },
    #[error("invalid hazard {value} for {from} -> {to}")]
    InvalidHazard { from: usize, to: usize, value: f64 },
    #[error("invalid intensity {value} for {from} -> {to}")]
    InvalidIntensity { from: usize, to: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("horizon must be positive")]
    InvalidHorizon,
    #[error("censoring law puts mass {mass} at time {time} <= s = {s}")]
    CensoringBeforeLandmark { time: f64, mass: f64, s: f64 },
    #[error("invalid censoring atom at time {time}")]
    InvalidCensorTime { time: f64 },
    #[error("enumeration of {states}^{horizon} = {size} paths exceeds the limit of {limit}")]
    EnumerationTooLarge {
        states: usize,
        horizon: usize,
        size: u128,
        limit: u64,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub(crate) fn individual_rng(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Index drawn from a discrete distribution given as weights summing to
/// (approximately) one.
pub(crate) fn draw_index(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = k;
        if u < acc {
            return k;
        }
    }
    // rounding left u above the accumulated mass
    last
}

pub(crate) fn check_distribution(context: &str, probs: &[f64]) -> Result<(), SimulateError> {
    let sum: f64 = probs.iter().sum();
    let bad = probs.iter().any(|p| !(0.0..=1.0).contains(p));
    if bad || (sum - 1.0).abs() > 1e-12 {
        return Err(SimulateError::InvalidDistribution {
            context: context.into(),
            sum,
        });
    }
    Ok(())
}
