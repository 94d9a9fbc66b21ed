//! Event-history primitives: state spaces, sample paths, step functions and
//! the counting/indicator processes derived from a path.

mod path;
mod process;
mod state;
mod step;

pub use path::{Jump, Landmark, SamplePath};
pub use process::{
    bivariate_product, counting_process, diagonal_counting, indicator_process, verify_indicator_identity, IndexPair,
};
pub use state::StateSpace;
pub use step::{StepFunction1D, StepSurface2D};

use alloc::string::String;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("state space must contain at least one state")]
    EmptyStateSpace,
    #[error("duplicate state label `{0}`")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state index {index} out of range for {size} states")]
    StateOutOfRange { index: usize, size: usize },
    #[error("path {id}: jump {position} at time {time} is not strictly after the previous event")]
    NonIncreasingJump { id: u64, position: usize, time: f64 },
    #[error("path {id}: jump {position} at time {time} must happen at a finite positive time")]
    InvalidJumpTime { id: u64, position: usize, time: f64 },
    #[error("path {id}: jump {position} leaves state {from} and enters the same state")]
    SelfTransition { id: u64, position: usize, from: usize },
    #[error("path {id}: jump {position} leaves state {from} but the path is in state {current}")]
    BrokenChain {
        id: u64,
        position: usize,
        from: usize,
        current: usize,
    },
    #[error("path {id}: censoring time {time} is not a valid time")]
    InvalidCensoring { id: u64, time: f64 },
    #[error("counting process N_{i}{i} is a diagonal component; use diagonal_counting")]
    DiagonalCounting { i: usize },
    #[error("horizon {horizon} must exceed the evaluation time {s}")]
    InvalidHorizon { s: f64, horizon: f64 },
    #[error("grid must be strictly increasing, finite and above the origin {origin}")]
    InvalidGrid { origin: f64 },
    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
}
