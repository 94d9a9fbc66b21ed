//! Cash flows on multistate paths and their plug-in valuation.

mod cashflow;
mod pipeline;
mod value;

pub use cashflow::{
    second_moment_representation, CashFlow1D, CashFlow2D, ContinuousPiece, DiscountFunction, MixedTerm,
    PaymentFunction, SojournPair, TransitionPair,
};
pub use pipeline::{plug_in_pipeline, value_landmark, LandmarkValue, ValuationConfig, ValuationReport};
pub use value::{expected_value_1d, expected_value_2d, expected_value_2d_parts, pathwise_value, SojournTiming};

use thiserror::Error;

use crate::estimate::EstimateError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ActuarialError {
    #[error("payment value {value} is not finite")]
    NonFinite { value: f64 },
    #[error("invalid time {time}")]
    InvalidTime { time: f64 },
    #[error("discount factor at {time} must be positive and finite, got {value}")]
    InvalidDiscount { time: f64, value: f64 },
    #[error("state {index} out of range for {size} states")]
    StateOutOfRange { index: usize, size: usize },
    #[error("transition payments need distinct states, got {state} -> {state}")]
    DiagonalTransition { state: usize },
    #[error("path {id} is censored before the cash-flow horizon")]
    CensoredPath { id: u64 },
    #[error("expected {expected} states, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("bivariate probabilities and rates live on different grids")]
    GridMismatch,
    #[error("second moments need the bivariate estimates")]
    MissingBivariate,
    #[error("continuous payments must be discretized before building second moments")]
    ContinuousPieces,
    #[error("cash-flow horizon {horizon} exceeds the estimation endpoint {tau}")]
    HorizonBeyondTau { horizon: f64, tau: f64 },
    #[error(transparent)]
    Estimate(#[from] EstimateError),
}
