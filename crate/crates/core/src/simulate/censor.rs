use alloc::vec::Vec;
use rand_chacha::ChaCha8Rng;

use super::{check_distribution, draw_index, individual_rng, SimulateError, CENSOR_DOMAIN};
use crate::model::SamplePath;

/// Discrete censoring distribution; `f64::INFINITY` stands for "never censored".
#[derive(Debug, Clone, PartialEq)]
pub struct CensorLaw {
    atoms: Vec<(f64, f64)>,
}

impl CensorLaw {
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self, SimulateError> {
        for &(time, _) in &atoms {
            if time.is_nan() || time <= 0.0 {
                return Err(SimulateError::InvalidCensorTime { time });
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(SimulateError::InvalidCensorTime { time: atoms[0].0 });
        }
        let probs: Vec<f64> = atoms.iter().map(|a| a.1).collect();
        check_distribution("censoring law", &probs)?;
        Ok(Self { atoms })
    }

    /// Point mass at +∞.
    pub fn never() -> Self {
        Self {
            atoms: alloc::vec![(f64::INFINITY, 1.0)],
        }
    }

    /// Equal mass on each of `times`.
    pub fn uniform(times: &[f64]) -> Result<Self, SimulateError> {
        let p = 1.0 / times.len() as f64;
        Self::new(times.iter().map(|&t| (t, p)).collect())
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Rejects laws with positive mass at or before `s`.
    pub fn check_after(&self, s: f64) -> Result<(), SimulateError> {
        match self.atoms.iter().find(|&&(t, p)| p > 0.0 && t <= s) {
            Some(&(time, mass)) => Err(SimulateError::CensoringBeforeLandmark { time, mass, s }),
            None => Ok(()),
        }
    }

    /// P(R >= t).
    pub fn survival(&self, t: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 >= t).map(|a| a.1).sum()
    }

    pub(crate) fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        let probs: Vec<f64> = self.atoms.iter().map(|a| a.1).collect();
        self.atoms[draw_index(rng, &probs)].0
    }
}

/// Censoring time for individual `id`, from a stream independent of the
/// path streams.
pub fn censor_individual(law: &CensorLaw, seed: u64, id: u64) -> f64 {
    law.draw(&mut individual_rng(seed ^ CENSOR_DOMAIN, id))
}

/// Gives every path an independent censoring time drawn from `law`.
/// Jumps after the censoring time stay on the path but are unobserved.
pub fn apply_censoring(
    paths: Vec<SamplePath>,
    law: &CensorLaw,
    s: f64,
    seed: u64,
) -> Result<Vec<SamplePath>, SimulateError> {
    law.check_after(s)?;
    paths
        .into_iter()
        .map(|p| {
            let r = censor_individual(law, seed, p.id());
            p.with_censoring(r).map_err(SimulateError::from)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::model::StateSpace;
    use crate::simulate::{simulate_markov, DiscreteMarkovModel};
    use alloc::vec;

    fn cohort(n: usize) -> Vec<SamplePath> {
        let states = StateSpace::numbered(2).unwrap();
        let p = Matrix::from_rows(&[vec![0.7, 0.3], vec![0.4, 0.6]]);
        let model = DiscreteMarkovModel::homogeneous(states, vec![1.0, 0.0], p, 4).unwrap();
        simulate_markov(&model, n, 21)
    }

    #[test]
    fn never_is_identity() {
        let paths = cohort(100);
        assert_eq!(
            apply_censoring(paths.clone(), &CensorLaw::never(), 0.0, 1).unwrap(),
            paths
        );
    }

    #[test]
    fn early_censoring_hides_post_s_jumps() {
        let law = CensorLaw::new(vec![(0.5, 1.0)]).unwrap();
        let censored = apply_censoring(cohort(200), &law, 0.0, 1).unwrap();
        assert!(censored.iter().all(|p| p.observed_jumps().is_empty()));
    }

    #[test]
    fn mass_before_s_rejected() {
        let law = CensorLaw::new(vec![(1.0, 0.5), (f64::INFINITY, 0.5)]).unwrap();
        assert!(matches!(
            apply_censoring(cohort(3), &law, 1.0, 1),
            Err(SimulateError::CensoringBeforeLandmark { .. })
        ));
    }

    #[test]
    fn uniform_frequencies() {
        let times = [1.0, 2.0, 3.0, 4.0, f64::INFINITY];
        let law = CensorLaw::uniform(&times).unwrap();
        let n = 10_000;
        let censored = apply_censoring(cohort(n), &law, 0.0, 77).unwrap();
        for t in times {
            let frac = censored.iter().filter(|p| p.censor_time() == t).count() as f64 / n as f64;
            // 4 binomial standard errors
            assert!((frac - 0.2).abs() < 0.016, "{t}: {frac}");
        }
    }

    #[test]
    fn censoring_is_independent_of_the_path() {
        let law = CensorLaw::uniform(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let n = 10_000;
        let censored = apply_censoring(cohort(n), &law, 0.0, 3).unwrap();
        let xs: Vec<f64> = censored.iter().map(|p| p.censor_time()).collect();
        let ys: Vec<f64> = censored.iter().map(|p| p.jumps().len() as f64).collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (mx, my) = (mean(&xs), mean(&ys));
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let vx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let vy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
        let rho = cov / libm::sqrt(vx * vy);
        assert!(rho.abs() < 3.0 / libm::sqrt(n as f64), "{rho}");
    }
}
