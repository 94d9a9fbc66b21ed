use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::EstimateError;
use crate::model::{Landmark, SamplePath, StateSpace};
use crate::simulate::ExactLaw;

/// Observed sample of censored paths.
///
/// Paths are kept sorted by id so every aggregation runs in a fixed order.
/// A cohort is either uniform (each path weighs `1/n`) or carries explicit
/// weights summing to one, which is how an exact law is fed through the same
/// estimator code.
#[derive(Debug, Clone, PartialEq)]
pub struct Cohort {
    states: StateSpace,
    paths: Vec<SamplePath>,
    weights: Option<Vec<f64>>,
}

impl Cohort {
    pub fn new(paths: Vec<SamplePath>, states: StateSpace) -> Result<Self, EstimateError> {
        let (paths, _) = Self::prepare(paths.into_iter().map(|p| (p, 1.0)).collect(), &states)?;
        Ok(Self {
            states,
            paths,
            weights: None,
        })
    }

    pub fn weighted(pairs: Vec<(SamplePath, f64)>, states: StateSpace) -> Result<Self, EstimateError> {
        for (path, w) in &pairs {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(EstimateError::InvalidWeight {
                    id: path.id(),
                    weight: *w,
                });
            }
        }
        let sum: f64 = pairs.iter().map(|p| p.1).sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(EstimateError::InvalidWeights { sum });
        }
        let (paths, weights) = Self::prepare(pairs, &states)?;
        Ok(Self {
            states,
            paths,
            weights: Some(weights),
        })
    }

    /// All (trajectory, censoring time) pairs of the law with their joint
    /// probabilities as weights.
    pub fn from_law(law: &ExactLaw) -> Result<Self, EstimateError> {
        Self::weighted(law.joint_paths(), law.states().clone())
    }

    fn prepare(
        mut pairs: Vec<(SamplePath, f64)>,
        states: &StateSpace,
    ) -> Result<(Vec<SamplePath>, Vec<f64>), EstimateError> {
        if pairs.is_empty() {
            return Err(EstimateError::EmptyCohort);
        }
        for (path, _) in &pairs {
            path.check_states(states)?;
        }
        pairs.sort_by_key(|p| p.0.id());
        if let Some(w) = pairs.windows(2).find(|w| w[0].0.id() == w[1].0.id()) {
            return Err(EstimateError::DuplicateId(w[0].0.id()));
        }
        Ok(pairs.into_iter().unzip())
    }

    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn paths(&self) -> &[SamplePath] {
        &self.paths
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// Weight of path `m` before the overall scale: 1 for uniform cohorts.
    /// Sums of units over a uniform cohort are exact integers.
    pub(crate) fn unit(&self, m: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[m])
    }

    /// Factor turning unit sums into averages.
    pub(crate) fn scale(&self) -> f64 {
        if self.weights.is_some() {
            1.0
        } else {
            1.0 / self.paths.len() as f64
        }
    }

    pub fn weight(&self, m: usize) -> f64 {
        self.unit(m) * self.scale()
    }

    /// Landmark classes with their member counts.
    pub fn landmarks(&self) -> BTreeMap<Landmark, usize> {
        let mut out = BTreeMap::new();
        for p in &self.paths {
            *out.entry(p.landmark().clone()).or_insert(0) += 1;
        }
        out
    }

    pub fn members(&self, z: &Landmark) -> Vec<usize> {
        (0..self.paths.len())
            .filter(|&m| self.paths[m].landmark() == z)
            .collect()
    }

    /// `1/(2n)` for uniform cohorts, half the smallest positive weight
    /// otherwise: strictly below every positive empirical occupation.
    pub fn default_epsilon(&self) -> f64 {
        match &self.weights {
            None => 0.5 / self.paths.len() as f64,
            Some(w) => 0.5 * w.iter().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Jump;
    use alloc::vec;

    fn path(id: u64) -> SamplePath {
        SamplePath::uncensored(id, 0, vec![Jump::new(1.0, 0, 1)]).unwrap()
    }

    #[test]
    fn sorted_and_unique() {
        let states = StateSpace::numbered(2).unwrap();
        let c = Cohort::new(vec![path(3), path(1), path(2)], states.clone()).unwrap();
        let ids: Vec<u64> = c.paths().iter().map(SamplePath::id).collect();
        assert_eq!(ids, vec![1, 2, 3]);
        assert_eq!(
            Cohort::new(vec![path(1), path(1)], states.clone()),
            Err(EstimateError::DuplicateId(1))
        );
        assert_eq!(Cohort::new(vec![], states), Err(EstimateError::EmptyCohort));
    }

    #[test]
    fn states_checked() {
        let states = StateSpace::numbered(1).unwrap();
        assert!(matches!(
            Cohort::new(vec![path(0)], states),
            Err(EstimateError::Model(_))
        ));
    }

    #[test]
    fn weights_must_sum_to_one() {
        let states = StateSpace::numbered(2).unwrap();
        assert!(matches!(
            Cohort::weighted(vec![(path(0), 0.5), (path(1), 0.4)], states.clone()),
            Err(EstimateError::InvalidWeights { .. })
        ));
        let c = Cohort::weighted(vec![(path(0), 0.75), (path(1), 0.25)], states).unwrap();
        assert_eq!(c.default_epsilon(), 0.125);
        assert_eq!(c.weight(1), 0.25);
    }
}
