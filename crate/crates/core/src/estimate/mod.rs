//! Landmark Nelson–Aalen and Aalen–Johansen estimators in one and two time
//! dimensions, with population counterparts computed from an exact law.

mod aalen_johansen;
mod cohort;
mod decomposition;
mod empirical;
mod fit;
mod rates;
mod truth;

pub use aalen_johansen::{
    aalen_johansen_1d, aalen_johansen_2d, bivariate_forcing, initial_distribution, BivariateProbabilities,
};
pub use cohort::Cohort;
pub use decomposition::{decomposition_residual_2d, DecompositionReport};
pub use empirical::{
    counting_estimator, counting_estimator_2d, occupation_estimator, occupation_estimator_2d, EstimationWindow,
};
pub use fit::{bivariate_grid_shape, fit_all, fit_landmark, FitConfig, LandmarkFit};
pub use rates::{
    nelson_aalen_1d, nelson_aalen_2d, pair_index, EpsilonEvent, NelsonAalen1D, NelsonAalen2D, RateMeasure1D,
    RateMeasure2D,
};
pub use truth::{sup_distance_1d, sup_distance_2d, true_rates_from_law};

use alloc::string::String;
use thiserror::Error;

use crate::model::ModelError;
use crate::volterra::VolterraError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimateError {
    #[error("cohort has no individuals")]
    EmptyCohort,
    #[error("individual id {0} appears more than once")]
    DuplicateId(u64),
    #[error("individual {id} has invalid weight {weight}")]
    InvalidWeight { id: u64, weight: f64 },
    #[error("weights sum to {sum}, expected 1")]
    InvalidWeights { sum: f64 },
    #[error("invalid estimation window: need s < tau, got s = {s}, tau = {tau}")]
    InvalidWindow { s: f64, tau: f64 },
    #[error("landmark class {landmark:?} has nobody at risk at tau = {tau} (need some censoring time R >= tau)")]
    AtRisk { landmark: String, tau: f64 },
    #[error("individual {id} is censored at {censor} <= s = {s}")]
    CensoredBeforeLandmark { id: u64, censor: f64, s: f64 },
    #[error("epsilon must be positive and finite, got {epsilon}")]
    InvalidEpsilon { epsilon: f64 },
    #[error("counting processes need distinct from/to states")]
    DiagonalIndex,
    #[error("initial distribution must be nonnegative and sum to 1 (or be all zero), got sum {sum}")]
    InitialDistribution { sum: f64 },
    #[error("bivariate probabilities need the state at s to be fixed within the landmark class")]
    NonDegenerateInitial,
    #[error("censoring law gives P(R >= {tau}) = 0")]
    ZeroCensoringSurvival { tau: f64 },
    #[error("rate measure has {actual} states, expected {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Volterra(#[from] VolterraError),
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<(), EstimateError> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(EstimateError::InvalidEpsilon { epsilon })
    }
}
