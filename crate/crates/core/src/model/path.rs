use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::{ModelError, StateSpace};

/// Value of the landmark variable for one individual. Landmarks are opaque
/// discrete labels; only equality matters to the estimators.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Landmark(String);

impl Landmark {
    pub const UNIVERSAL: &'static str = "all";

    pub fn new(label: impl Into<String>) -> Self {
        Self(label.into())
    }

    /// The trivial landmark shared by every individual.
    pub fn universal() -> Self {
        Self(Self::UNIVERSAL.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Landmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub time: f64,
    pub from: usize,
    pub to: usize,
}

impl Jump {
    pub fn new(time: f64, from: usize, to: usize) -> Self {
        Self { time, from, to }
    }
}

/// One individual's piecewise constant trajectory starting at time 0,
/// together with its censoring time and landmark value.
///
/// Jumps after the censoring time are kept; they are simply not observed.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    id: u64,
    initial_state: usize,
    jumps: Vec<Jump>,
    censor_time: f64,
    landmark: Landmark,
}

impl SamplePath {
    pub fn new(
        id: u64,
        initial_state: usize,
        jumps: Vec<Jump>,
        censor_time: f64,
        landmark: Landmark,
    ) -> Result<Self, ModelError> {
        let mut current = initial_state;
        let mut last = 0.0;
        for (position, jump) in jumps.iter().enumerate() {
            if !jump.time.is_finite() || jump.time <= 0.0 {
                return Err(ModelError::InvalidJumpTime {
                    id,
                    position,
                    time: jump.time,
                });
            }
            if position > 0 && jump.time <= last {
                return Err(ModelError::NonIncreasingJump {
                    id,
                    position,
                    time: jump.time,
                });
            }
            if jump.from == jump.to {
                return Err(ModelError::SelfTransition {
                    id,
                    position,
                    from: jump.from,
                });
            }
            if jump.from != current {
                return Err(ModelError::BrokenChain {
                    id,
                    position,
                    from: jump.from,
                    current,
                });
            }
            current = jump.to;
            last = jump.time;
        }
        if censor_time.is_nan() || censor_time < 0.0 {
            return Err(ModelError::InvalidCensoring { id, time: censor_time });
        }
        Ok(Self {
            id,
            initial_state,
            jumps,
            censor_time,
            landmark,
        })
    }

    /// Uncensored path with the universal landmark.
    pub fn uncensored(id: u64, initial_state: usize, jumps: Vec<Jump>) -> Result<Self, ModelError> {
        Self::new(id, initial_state, jumps, f64::INFINITY, Landmark::universal())
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn censor_time(&self) -> f64 {
        self.censor_time
    }

    pub fn landmark(&self) -> &Landmark {
        &self.landmark
    }

    pub fn with_censoring(mut self, censor_time: f64) -> Result<Self, ModelError> {
        if censor_time.is_nan() || censor_time < 0.0 {
            return Err(ModelError::InvalidCensoring {
                id: self.id,
                time: censor_time,
            });
        }
        self.censor_time = censor_time;
        Ok(self)
    }

    pub fn with_landmark(mut self, landmark: Landmark) -> Self {
        self.landmark = landmark;
        self
    }

    pub fn with_id(mut self, id: u64) -> Self {
        self.id = id;
        self
    }

    /// Largest state index mentioned by the path.
    pub fn max_state(&self) -> usize {
        self.jumps.iter().map(|j| j.to).fold(self.initial_state, usize::max)
    }

    pub fn check_states(&self, states: &StateSpace) -> Result<(), ModelError> {
        states.check(self.max_state())
    }

    /// Z(t), right-continuous.
    pub fn state_at(&self, t: f64) -> usize {
        let n = self.jumps.partition_point(|j| j.time <= t);
        if n == 0 {
            self.initial_state
        } else {
            self.jumps[n - 1].to
        }
    }

    /// Z(t-), the left limit.
    pub fn state_before(&self, t: f64) -> usize {
        let n = self.jumps.partition_point(|j| j.time < t);
        if n == 0 {
            self.initial_state
        } else {
            self.jumps[n - 1].to
        }
    }

    pub fn is_observed(&self, jump: &Jump) -> bool {
        jump.time <= self.censor_time
    }

    /// Jumps at or before the censoring time.
    pub fn observed_jumps(&self) -> &[Jump] {
        let n = self.jumps.partition_point(|j| j.time <= self.censor_time);
        &self.jumps[..n]
    }

    /// Jumps with time in (a, b].
    pub fn jumps_in(&self, a: f64, b: f64) -> &[Jump] {
        let lo = self.jumps.partition_point(|j| j.time <= a);
        let hi = self.jumps.partition_point(|j| j.time <= b);
        &self.jumps[lo..hi.max(lo)]
    }

    /// N_ij(t) for i != j, counted from time 0.
    pub fn count(&self, i: usize, j: usize, t: f64) -> u32 {
        self.jumps_in(f64::NEG_INFINITY, t)
            .iter()
            .filter(|jump| jump.from == i && jump.to == j)
            .count() as u32
    }
}
