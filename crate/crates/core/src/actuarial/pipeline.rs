use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{
    expected_value_1d, expected_value_2d, second_moment_representation, ActuarialError, CashFlow1D, DiscountFunction,
    SojournTiming,
};
use crate::estimate::{fit_landmark, Cohort, FitConfig};
use crate::model::Landmark;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValuationConfig {
    pub fit: FitConfig,
    pub timing: SojournTiming,
    pub second_moment: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkValue {
    pub landmark: Landmark,
    pub members: usize,
    pub value: f64,
    pub second_moment: Option<f64>,
    pub epsilon_events: usize,
    pub warnings: Vec<String>,
}

impl LandmarkValue {
    pub fn variance(&self) -> Option<f64> {
        self.second_moment.map(|m| m - self.value * self.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValuationReport {
    pub values: Vec<LandmarkValue>,
}

impl ValuationReport {
    pub fn get(&self, z: &Landmark) -> Option<&LandmarkValue> {
        self.values.iter().find(|v| &v.landmark == z)
    }
}

fn check_horizon(cf: &CashFlow1D, config: &ValuationConfig) -> Result<(), ActuarialError> {
    let window = config.fit.window;
    let limit = if config.second_moment {
        window.tau1.min(window.tau2)
    } else {
        window.tau_max()
    };
    if cf.horizon() > limit {
        return Err(ActuarialError::HorizonBeyondTau {
            horizon: cf.horizon(),
            tau: limit,
        });
    }
    Ok(())
}

/// The plug-in value of `cf` for the single landmark class `z`.
pub fn value_landmark(
    cohort: &Cohort,
    z: &Landmark,
    cf: &CashFlow1D,
    discount: &DiscountFunction,
    config: &ValuationConfig,
) -> Result<LandmarkValue, ActuarialError> {
    check_horizon(cf, config)?;
    let fit_config = FitConfig {
        bivariate: config.second_moment,
        ..config.fit
    };
    let fit = fit_landmark(cohort, z, &fit_config)?;
    let mut warnings = fit.warnings.clone();
    let (value, second_moment) = if config.second_moment {
        let grid = fit.rates2d.as_ref().expect("bivariate fit requested").grid();
        let mut cuts: Vec<f64> = grid.t1().iter().chain(grid.t2()).copied().collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let flow = if cf.has_continuous() {
            warnings.push(format!(
                "continuous payments discretized onto {} grid points",
                cuts.len()
            ));
            cf.discretized(&cuts)
        } else {
            cf.clone()
        };
        let v = expected_value_1d(&flow, &fit.probabilities, &fit.rates, discount, config.timing)?;
        let rep = second_moment_representation(&flow)?;
        (v, Some(expected_value_2d(&rep, &fit, discount, config.timing)?))
    } else {
        (
            expected_value_1d(cf, &fit.probabilities, &fit.rates, discount, config.timing)?,
            None,
        )
    };
    Ok(LandmarkValue {
        landmark: z.clone(),
        members: fit.members,
        value,
        second_moment,
        epsilon_events: fit.events.len(),
        warnings,
    })
}

/// Estimates rates per landmark class, solves for the occupation
/// probabilities and evaluates the plug-in value (and optionally the second
/// moment) of `cf`.
pub fn plug_in_pipeline(
    cohort: &Cohort,
    cf: &CashFlow1D,
    discount: &DiscountFunction,
    config: &ValuationConfig,
) -> Result<ValuationReport, ActuarialError> {
    check_horizon(cf, config)?;
    let values = cohort
        .landmarks()
        .keys()
        .map(|z| value_landmark(cohort, z, cf, discount, config))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ValuationReport { values })
}
