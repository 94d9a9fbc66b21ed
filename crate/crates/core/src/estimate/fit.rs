use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::empirical::{class_grid, counting_counts, occupation_counts, occupation_counts_2d};
use super::rates::{rates_from_counts_1d, rates_from_paths_2d};
use super::{
    aalen_johansen_1d, aalen_johansen_2d, check_epsilon, BivariateProbabilities, Cohort, EpsilonEvent, EstimateError,
    EstimationWindow, RateMeasure1D, RateMeasure2D,
};
use crate::model::{Landmark, StepFunction1D};
use crate::volterra::Grid2D;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub window: EstimationWindow,
    /// `None` uses [`Cohort::default_epsilon`].
    pub epsilon: Option<f64>,
    pub bivariate: bool,
}

impl FitConfig {
    pub fn new(window: EstimationWindow) -> Self {
        Self {
            window,
            epsilon: None,
            bivariate: true,
        }
    }
}

/// Everything estimated for one landmark class.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkFit {
    pub landmark: Landmark,
    pub members: usize,
    pub epsilon: f64,
    pub initial: Vec<f64>,
    pub rates: RateMeasure1D,
    pub probabilities: Vec<StepFunction1D>,
    pub rates2d: Option<RateMeasure2D>,
    pub probabilities2d: Option<BivariateProbabilities>,
    pub events: Vec<EpsilonEvent>,
    pub warnings: Vec<String>,
}

/// Estimates rates and occupation probabilities of class `z`.
pub fn fit_landmark(cohort: &Cohort, z: &Landmark, config: &FitConfig) -> Result<LandmarkFit, EstimateError> {
    let epsilon = config.epsilon.unwrap_or_else(|| cohort.default_epsilon());
    check_epsilon(epsilon)?;
    let window = config.window;
    let s = window.s;
    let tau = window.tau_max();
    let members = cohort.members(z);
    let mut warnings = Vec::new();
    for &m in &members {
        let p = &cohort.paths()[m];
        if p.censor_time() <= s {
            return Err(EstimateError::CensoredBeforeLandmark {
                id: p.id(),
                censor: p.censor_time(),
                s,
            });
        }
    }
    if members.is_empty() {
        warnings.push(format!("landmark class {z} is empty; estimators are identically zero"));
    } else if !members
        .iter()
        .any(|&m| cohort.unit(m) > 0.0 && cohort.paths()[m].censor_time() >= tau)
    {
        return Err(EstimateError::AtRisk {
            landmark: z.as_str().to_string(),
            tau,
        });
    }

    let l = cohort.states().len();
    let mut events = Vec::new();
    let grid = class_grid(cohort, &members, s, tau, &[]);
    let occupation = occupation_counts(cohort, &members, s, &grid);
    let counts = counting_counts(cohort, &members, s, &grid);
    let rates = rates_from_counts_1d(
        z.clone(),
        s,
        &grid,
        &occupation,
        &counts,
        cohort.scale(),
        epsilon,
        &mut events,
    );
    let total: f64 = occupation.iter().map(|o| o[0]).sum();
    let initial: Vec<f64> = occupation
        .iter()
        .map(|o| if total > 0.0 { o[0] / total } else { 0.0 })
        .collect();
    let probabilities = aalen_johansen_1d(&rates, &initial)?;

    let (rates2d, probabilities2d) = if config.bivariate {
        let grid1 = class_grid(cohort, &members, s, window.tau1, &[]);
        let grid2 = class_grid(cohort, &members, s, window.tau2, &[]);
        let occupation2 = occupation_counts_2d(cohort, &members, s, &grid1, &grid2);
        let grid2d = Grid2D::new(s, grid1, grid2)?;
        let r2 = rates_from_paths_2d(cohort, &members, z.clone(), grid2d, &occupation2, epsilon, &mut events);
        let p2 = aalen_johansen_2d(&r2, &rates, &initial)?;
        (Some(r2), Some(p2))
    } else {
        (None, None)
    };
    if !events.is_empty() {
        warnings.push(format!(
            "epsilon = {epsilon} was active at {} rate increments",
            events.len()
        ));
    }
    debug_assert_eq!(rates.states(), l);

    Ok(LandmarkFit {
        landmark: z.clone(),
        members: members.len(),
        epsilon,
        initial,
        rates,
        probabilities,
        rates2d,
        probabilities2d,
        events,
        warnings,
    })
}

/// Shape `(n1, n2)` of the bivariate grid a fit of class `z` would use.
pub fn bivariate_grid_shape(cohort: &Cohort, z: &Landmark, window: &EstimationWindow) -> (usize, usize) {
    let members = cohort.members(z);
    (
        class_grid(cohort, &members, window.s, window.tau1, &[]).len(),
        class_grid(cohort, &members, window.s, window.tau2, &[]).len(),
    )
}

/// [`fit_landmark`] for every landmark class present in the cohort, in
/// landmark order.
pub fn fit_all(cohort: &Cohort, config: &FitConfig) -> Result<Vec<LandmarkFit>, EstimateError> {
    cohort
        .landmarks()
        .keys()
        .map(|z| fit_landmark(cohort, z, config))
        .collect()
}
