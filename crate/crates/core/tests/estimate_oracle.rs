mod common;

use common::{illness_death_law, thirty_percent_censoring};
use msland_core::estimate::{
    aalen_johansen_2d, fit_landmark, sup_distance_1d, sup_distance_2d, true_rates_from_law, Cohort, EstimationWindow,
    FitConfig, LandmarkFit,
};
use msland_core::model::{Landmark, StateSpace};
use msland_core::simulate::{exact_law, CensorLaw, DiscreteMarkovModel, ExactLaw};
use msland_core::Matrix;

fn window() -> EstimationWindow {
    EstimationWindow::single(1.0, 5.0).unwrap()
}

fn fit(law: &ExactLaw, z: &Landmark) -> LandmarkFit {
    let cohort = Cohort::from_law(law).unwrap();
    fit_landmark(&cohort, z, &FitConfig::new(window())).unwrap()
}

#[test]
fn weighted_cohort_reproduces_population_rates() {
    let law = illness_death_law(thirty_percent_censoring());
    for z in law.landmarks() {
        let f = fit(&law, &z);
        let (r1, r2) = true_rates_from_law(&law, &z, &window(), f.epsilon).unwrap();
        assert!(sup_distance_1d(&f.rates, &r1).unwrap() < 1e-12, "{z}");
        assert!(
            sup_distance_2d(f.rates2d.as_ref().unwrap(), &r2).unwrap() < 1e-12,
            "{z}"
        );
        assert!(f.events.is_empty());
    }
}

#[test]
fn censoring_does_not_change_population_rates() {
    let censored = illness_death_law(thirty_percent_censoring());
    let full = illness_death_law(CensorLaw::never());
    for z in censored.landmarks() {
        let (c1, c2) = true_rates_from_law(&censored, &z, &window(), 1e-15).unwrap();
        let (u1, u2) = true_rates_from_law(&full, &z, &window(), 1e-15).unwrap();
        assert!(sup_distance_1d(&c1, &u1).unwrap() < 1e-12);
        assert!(sup_distance_2d(&c2, &u2).unwrap() < 1e-12);
    }
}

#[test]
fn probabilities_match_enumeration() {
    let law = illness_death_law(thirty_percent_censoring());
    for z in law.landmarks() {
        let f = fit(&law, &z);
        let p2 = f.probabilities2d.as_ref().unwrap();
        for t1 in 1..=5 {
            let t1 = t1 as f64;
            let exact = law.occupation(&z, t1).unwrap();
            for (j, pj) in exact.iter().enumerate() {
                assert!((f.probabilities[j].eval(t1) - pj).abs() < 1e-10);
            }
            for t2 in 1..=5 {
                let t2 = t2 as f64;
                let joint = law.joint_occupation(&z, t1, t2).unwrap();
                for i1 in 0..3 {
                    for i2 in 0..3 {
                        assert!(
                            (p2.eval(t1, t2, i1, i2) - joint[(i1, i2)]).abs() < 1e-10,
                            "{z} {t1} {t2}"
                        );
                    }
                }
            }
            for (i, &p) in exact.iter().enumerate() {
                for j in 0..3 {
                    let expected = if i == j { p } else { 0.0 };
                    assert!((p2.eval(t1, t1, i, j) - expected).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn two_state_joint_survival() {
    let states = StateSpace::new(&["alive", "dead"]).unwrap();
    let p = Matrix::from_rows(&[vec![0.5, 0.5], vec![0.0, 1.0]]);
    let model = DiscreteMarkovModel::homogeneous(states, vec![1.0, 0.0], p, 2).unwrap();
    let law = exact_law(&model, CensorLaw::never(), 0.0, 2).unwrap();
    let z = Landmark::universal();
    let w = EstimationWindow::single(0.0, 2.0).unwrap();
    let (r1, r2) = true_rates_from_law(&law, &z, &w, 1e-12).unwrap();
    let p2 = aalen_johansen_2d(&r2, &r1, &[1.0, 0.0]).unwrap();
    for t1 in 0..=2 {
        for t2 in 0..=2 {
            let expected = 0.5f64.powi(t1.max(t2));
            assert_eq!(p2.eval(t1 as f64, t2 as f64, 0, 0), expected);
        }
    }
}
