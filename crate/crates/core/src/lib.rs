//! Landmark estimation of conditional transition rates and transition
//! probabilities for non-Markov multistate processes observed under right
//! censoring, in one and two time dimensions, and plug-in valuation of
//! insurance cash flows built on top of them.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod actuarial;
pub mod estimate;
pub mod matrix;
pub mod model;
pub mod simulate;
pub mod volterra;

pub use matrix::Matrix;
