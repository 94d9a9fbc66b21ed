#![allow(dead_code)]

use msland_core::model::StateSpace;
use msland_core::simulate::{exact_law, CensorLaw, ExactLaw, LandmarkRule, SemiMarkovModel};

pub fn illness_death_states() -> StateSpace {
    StateSpace::new(&["healthy", "ill", "dead"]).unwrap()
}

/// Illness-death model with recovery whose hazards out of "ill" depend on
/// the time already spent there, so the process is not Markov.
pub fn illness_death(horizon: usize) -> SemiMarkovModel {
    let hazards = vec![
        vec![vec![], vec![0.15], vec![0.05]],
        vec![vec![0.3, 0.1], vec![], vec![0.1, 0.25]],
        vec![vec![], vec![], vec![]],
    ];
    SemiMarkovModel::new(illness_death_states(), vec![1.0, 0.0, 0.0], horizon, hazards).unwrap()
}

/// Mass 0.075 at each of 2, 3, 4, 5 and the rest at infinity.
pub fn thirty_percent_censoring() -> CensorLaw {
    CensorLaw::new(vec![
        (2.0, 0.075),
        (3.0, 0.075),
        (4.0, 0.075),
        (5.0, 0.075),
        (f64::INFINITY, 0.7),
    ])
    .unwrap()
}

pub fn illness_death_law(censor: CensorLaw) -> ExactLaw {
    exact_law(&illness_death(5), censor, 1.0, 5)
        .unwrap()
        .with_landmarks(LandmarkRule::AsIfMarkov)
}
