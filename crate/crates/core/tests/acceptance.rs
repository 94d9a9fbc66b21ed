//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::time::{Duration, Instant};

use common::{illness_death, illness_death_law, illness_death_states, thirty_percent_censoring};
use msland_core::actuarial::{
    expected_value_1d, expected_value_2d, plug_in_pipeline, second_moment_representation, CashFlow1D, DiscountFunction,
    PaymentFunction, SojournTiming, ValuationConfig,
};
use msland_core::estimate::{
    counting_estimator, decomposition_residual_2d, fit_all, fit_landmark, nelson_aalen_1d, occupation_estimator,
    sup_distance_1d, sup_distance_2d, true_rates_from_law, Cohort, EstimationWindow, FitConfig, LandmarkFit,
};
use msland_core::model::{verify_indicator_identity, Landmark, SamplePath, StateSpace, StepSurface2D};
use msland_core::simulate::{
    apply_censoring, assign_landmarks, exact_law, simulate_continuous, simulate_markov, simulate_semi_markov,
    CensorLaw, ContinuousMarkovModel, DiscreteMarkovModel, ExactLaw, LandmarkRule,
};
use msland_core::volterra::{
    duhamel_residual, integral_bound_check, solve_volterra_2d, variation_2d, volterra_closed_form, volterra_residual,
    Grid2D, MatrixMeasure2D, Rect, VectorSurface,
};
use msland_core::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- fixtures

fn two_state_model() -> DiscreteMarkovModel {
    let states = StateSpace::new(&["alive", "dead"]).unwrap();
    let p = Matrix::from_rows(&[vec![0.5, 0.5], vec![0.0, 1.0]]);
    DiscreteMarkovModel::homogeneous(states, vec![1.0, 0.0], p, 2).unwrap()
}

fn inhomogeneous_markov() -> DiscreteMarkovModel {
    let states = StateSpace::new(&["active", "disabled", "dead"]).unwrap();
    let step = |x: f64| {
        Matrix::from_rows(&[
            vec![0.8 - x, 0.15 + x / 2.0, 0.05 + x / 2.0],
            vec![0.2, 0.6 - x, 0.2 + x],
            vec![0.0, 0.0, 1.0],
        ])
    };
    DiscreteMarkovModel::new(
        states,
        vec![1.0, 0.0, 0.0],
        (0..4).map(|k| step(0.05 * k as f64)).collect(),
    )
    .unwrap()
}

fn continuous_model() -> ContinuousMarkovModel {
    let q = Matrix::from_rows(&[vec![-0.3, 0.2, 0.1], vec![0.4, -0.7, 0.3], vec![0.0, 0.0, 0.0]]);
    ContinuousMarkovModel::new(illness_death_states(), vec![1.0, 0.0, 0.0], q, 5.0).unwrap()
}

/// Oracle cases: (name, censored law, uncensored law, window).
fn oracle_cases() -> Vec<(&'static str, ExactLaw, ExactLaw, EstimationWindow)> {
    let late = CensorLaw::new(vec![(3.0, 0.1), (4.0, 0.1), (4.5, 0.1), (f64::INFINITY, 0.7)]).unwrap();
    let visited = LandmarkRule::StateAndVisited { from: 0, to: 1 };
    let semi = illness_death(5);
    let two = two_state_model();
    let inhom = inhomogeneous_markov();
    let law = |m: &dyn msland_core::simulate::DiscreteModel, c: CensorLaw, s: f64, t: usize, r: LandmarkRule| {
        exact_law(m, c, s, t).unwrap().with_landmarks(r)
    };
    vec![
        (
            "illness-death as-if-Markov",
            illness_death_law(thirty_percent_censoring()),
            illness_death_law(CensorLaw::never()),
            EstimationWindow::single(1.0, 5.0).unwrap(),
        ),
        (
            "illness-death state+visited",
            law(&semi, late.clone(), 2.0, 5, visited),
            law(&semi, CensorLaw::never(), 2.0, 5, visited),
            EstimationWindow::new(2.0, 5.0, 4.0).unwrap(),
        ),
        (
            "two-state",
            law(
                &two,
                CensorLaw::new(vec![(1.5, 0.3), (f64::INFINITY, 0.7)]).unwrap(),
                0.0,
                2,
                LandmarkRule::Universal,
            ),
            law(&two, CensorLaw::never(), 0.0, 2, LandmarkRule::Universal),
            EstimationWindow::single(0.0, 2.0).unwrap(),
        ),
        (
            "inhomogeneous Markov",
            law(&inhom, late, 0.0, 4, LandmarkRule::Universal),
            law(&inhom, CensorLaw::never(), 0.0, 4, LandmarkRule::Universal),
            EstimationWindow::single(0.0, 4.0).unwrap(),
        ),
    ]
}

fn oracle_fit(law: &ExactLaw, z: &Landmark, window: EstimationWindow) -> LandmarkFit {
    let cohort = Cohort::from_law(law).unwrap();
    fit_landmark(&cohort, z, &FitConfig::new(window)).unwrap()
}

// ---------------------------------------------------------------- criteria

fn pathwise_identities() -> Outcome {
    let n = 10_000;
    let s = 1.0;
    let states = illness_death_states();
    let discrete_censor = CensorLaw::new(vec![(2.0, 0.1), (3.5, 0.1), (5.0, 0.1), (f64::INFINITY, 0.7)]).unwrap();
    let continuous_censor = CensorLaw::new(vec![(1.3, 0.1), (2.7, 0.1), (4.1, 0.1), (f64::INFINITY, 0.7)]).unwrap();
    let markov = DiscreteMarkovModel::homogeneous(
        states.clone(),
        vec![1.0, 0.0, 0.0],
        Matrix::from_rows(&[vec![0.75, 0.15, 0.1], vec![0.3, 0.5, 0.2], vec![0.0, 0.0, 1.0]]),
        5,
    )
    .unwrap();
    let raw: Vec<(&str, Vec<SamplePath>, &CensorLaw)> = vec![
        ("markov", simulate_markov(&markov, n, 11), &discrete_censor),
        (
            "semi-markov",
            simulate_semi_markov(&illness_death(5), n, 12),
            &discrete_censor,
        ),
        (
            "continuous",
            simulate_continuous(&continuous_model(), n, 13),
            &continuous_censor,
        ),
    ];
    let mut eq3: f64 = 0.0;
    let mut eq11: f64 = 0.0;
    let mut checked = 0;
    for (name, paths, law) in raw {
        for censored in [false, true] {
            let paths = if censored {
                apply_censoring(paths.clone(), law, s, 99).unwrap()
            } else {
                paths.clone()
            };
            for p in &paths {
                eq3 = eq3.max(verify_indicator_identity(p, s, 5.0).map_err(|e| e.to_string())?);
            }
            let marked = assign_landmarks(paths, LandmarkRule::AsIfMarkov, s, &states);
            let batch = if name == "continuous" { 200 } else { n };
            for chunk in marked.chunks(batch) {
                let cohort = Cohort::new(chunk.to_vec(), states.clone()).map_err(|e| e.to_string())?;
                let w = EstimationWindow::single(s, 5.0).unwrap();
                for z in cohort.landmarks().keys() {
                    for i1 in 0..3 {
                        for i2 in 0..3 {
                            let rep = decomposition_residual_2d(&cohort, z, (i1, i2), &w).map_err(|e| e.to_string())?;
                            eq11 = eq11.max(rep.residual);
                        }
                    }
                }
            }
            checked += n;
        }
    }
    ensure(
        eq3 == 0.0 && eq11 == 0.0,
        format!("{checked} paths; max indicator residual {eq3:e}, max decomposition residual {eq11:e}"),
    )
}

fn oracle_rates() -> Outcome {
    let mut est: f64 = 0.0;
    let mut invariance: f64 = 0.0;
    let mut classes = 0;
    for (_, censored, full, window) in oracle_cases() {
        for z in censored.landmarks() {
            let fit = oracle_fit(&censored, &z, window);
            let (r1, r2) = true_rates_from_law(&censored, &z, &window, fit.epsilon).map_err(|e| e.to_string())?;
            est = est
                .max(sup_distance_1d(&fit.rates, &r1).unwrap())
                .max(sup_distance_2d(fit.rates2d.as_ref().unwrap(), &r2).unwrap());
            let (c1, c2) = true_rates_from_law(&censored, &z, &window, f64::MIN_POSITIVE).unwrap();
            let (u1, u2) = true_rates_from_law(&full, &z, &window, f64::MIN_POSITIVE).unwrap();
            invariance = invariance
                .max(sup_distance_1d(&c1, &u1).unwrap())
                .max(sup_distance_2d(&c2, &u2).unwrap());
            classes += 1;
        }
    }
    ensure(
        est <= 1e-12 && invariance <= 1e-12,
        format!("{classes} classes; estimator vs truth {est:.2e}, censored vs uncensored {invariance:.2e}"),
    )
}

fn oracle_probabilities() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut diagonal: f64 = 0.0;
    for (_, law, _, window) in oracle_cases() {
        let times: Vec<f64> = (0..=law.horizon())
            .map(|k| k as f64)
            .filter(|&t| t >= window.s && t <= window.tau_max())
            .collect();
        for z in law.landmarks() {
            let fit = oracle_fit(&law, &z, window);
            let p2 = fit.probabilities2d.as_ref().unwrap();
            let l = fit.probabilities.len();
            for &t1 in &times {
                let exact = law.occupation(&z, t1).unwrap();
                for (f, p) in fit.probabilities.iter().zip(&exact) {
                    worst = worst.max((f.eval(t1) - p).abs());
                }
                if t1 > window.tau1 {
                    continue;
                }
                for &t2 in times.iter().filter(|&&t| t <= window.tau2) {
                    let joint = law.joint_occupation(&z, t1, t2).unwrap();
                    for i1 in 0..l {
                        for i2 in 0..l {
                            worst = worst.max((p2.eval(t1, t2, i1, i2) - joint[(i1, i2)]).abs());
                        }
                    }
                }
                if t1 <= window.tau2 {
                    for i in 0..l {
                        for j in 0..l {
                            let expected = if i == j { fit.probabilities[i].eval(t1) } else { 0.0 };
                            diagonal = diagonal.max((p2.eval(t1, t1, i, j) - expected).abs());
                        }
                    }
                }
            }
        }
    }
    ensure(
        worst <= 1e-10 && diagonal <= 1e-10,
        format!("max error vs enumeration {worst:.2e}, diagonal identity {diagonal:.2e}"),
    )
}

fn random_measure(rng: &mut ChaCha8Rng, grid: &Grid2D, dim: usize, size: f64) -> MatrixMeasure2D {
    let mut m = MatrixMeasure2D::zero(grid.clone(), dim);
    for a in 1..=grid.n1() {
        for b in 1..=grid.n2() {
            if rng.random::<f64>() < 0.7 {
                let rows: Vec<Vec<f64>> = (0..dim)
                    .map(|_| (0..dim).map(|_| size * (2.0 * rng.random::<f64>() - 1.0)).collect())
                    .collect();
                m.set(a, b, Matrix::from_rows(&rows)).unwrap();
            }
        }
    }
    m
}

fn random_grid(rng: &mut ChaCha8Rng) -> Grid2D {
    let axis = |rng: &mut ChaCha8Rng| {
        let n = rng.random_range(1..=4);
        let mut t = 0.0;
        (0..n)
            .map(|_| {
                t += 0.1 + rng.random::<f64>();
                t
            })
            .collect::<Vec<f64>>()
    };
    let t1 = axis(rng);
    let t2 = axis(rng);
    Grid2D::new(0.0, t1, t2).unwrap()
}

fn solver_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut plug, mut closed, mut duhamel): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..100 {
        let grid = random_grid(&mut rng);
        let dim = 4;
        let lambda = random_measure(&mut rng, &grid, dim, 0.3);
        let phi = VectorSurface::from_fn(grid.clone(), dim, |_, _, v| {
            for x in v.iter_mut() {
                *x = rng.random::<f64>();
            }
        });
        let y = solve_volterra_2d(&phi, &lambda).unwrap();
        plug = plug.max(volterra_residual(&y, &phi, &lambda).unwrap());
        closed = closed.max(y.max_abs_diff(&volterra_closed_form(&phi, &lambda).unwrap()).unwrap());

        let b = random_measure(&mut rng, &grid, dim, 0.3);
        let (n1, n2) = (grid.n1(), grid.n2());
        let a0 = rng.random_range(0..n1);
        let a1 = rng.random_range(a0 + 1..=n1);
        let b0 = rng.random_range(0..n2);
        let b1 = rng.random_range(b0 + 1..=n2);
        let rect = Rect::new(grid.time1(a0), grid.time1(a1), grid.time2(b0), grid.time2(b1));
        duhamel = duhamel.max(duhamel_residual(&lambda, &b, &rect).unwrap());
    }
    ensure(
        plug <= 1e-12 && closed <= 1e-10 && duhamel <= 1e-10,
        format!("100 random systems; plug-back {plug:.2e}, closed form {closed:.2e}, Duhamel {duhamel:.2e}"),
    )
}

fn scaling_error(
    seed: u64,
    n: usize,
    truth: &[(
        Landmark,
        (
            msland_core::estimate::RateMeasure1D,
            msland_core::estimate::RateMeasure2D,
        ),
    )],
) -> Result<(f64, f64), String> {
    let states = illness_death_states();
    let paths = simulate_semi_markov(&illness_death(5), n, seed);
    let paths = apply_censoring(paths, &thirty_percent_censoring(), 1.0, seed).map_err(|e| e.to_string())?;
    let cohort = Cohort::new(assign_landmarks(paths, LandmarkRule::AsIfMarkov, 1.0, &states), states)
        .map_err(|e| e.to_string())?;
    let config = FitConfig {
        epsilon: Some(0.5 / n as f64),
        ..FitConfig::new(EstimationWindow::single(1.0, 5.0).unwrap())
    };
    let (mut e1, mut e2): (f64, f64) = (0.0, 0.0);
    for (z, (r1, r2)) in truth {
        let fit = fit_landmark(&cohort, z, &config).map_err(|e| e.to_string())?;
        e1 = e1.max(sup_distance_1d(&fit.rates, r1).unwrap());
        e2 = e2.max(sup_distance_2d(fit.rates2d.as_ref().unwrap(), r2).unwrap());
    }
    Ok((e1, e2))
}

fn consistency_scaling() -> Outcome {
    let law = illness_death_law(CensorLaw::never());
    let window = EstimationWindow::single(1.0, 5.0).unwrap();
    let truth: Vec<_> = law
        .landmarks()
        .into_iter()
        .map(|z| {
            let r = true_rates_from_law(&law, &z, &window, f64::MIN_POSITIVE).unwrap();
            (z, r)
        })
        .collect();
    let mut wins = 0;
    let mut detail = Vec::new();
    for seed in 0..10u64 {
        let small = scaling_error(1000 + seed, 200, &truth)?;
        let large = scaling_error(2000 + seed, 20_000, &truth)?;
        if large.0 < small.0 && large.1 < small.1 {
            wins += 1;
        }
        detail.push(format!("{:.3}/{:.3}->{:.4}/{:.4}", small.0, small.1, large.0, large.1));
    }
    ensure(
        wins >= 9,
        format!(
            "{wins}/10 seeds improve in both 1D and 2D sup error (1D/2D: {})",
            detail.join(" ")
        ),
    )
}

fn valuation() -> Outcome {
    let two = two_state_model();
    let law = exact_law(&two, CensorLaw::never(), 0.0, 2).unwrap();
    let z = Landmark::universal();
    let window = EstimationWindow::single(0.0, 2.0).unwrap();
    let fit = oracle_fit(&law, &z, window);
    let k = DiscountFunction::constant();
    let t = SojournTiming::AtPayment;
    let death = CashFlow1D::transition_benefit(2, 0, 1, 1.0, 2.0).unwrap();
    let annuity = CashFlow1D::annuity(2, 0, &[1.0, 2.0], 2.0).unwrap();
    let v_death = expected_value_1d(&death, &fit.probabilities, &fit.rates, &k, t).unwrap();
    let v_ann = expected_value_1d(&annuity, &fit.probabilities, &fit.rates, &k, t).unwrap();
    let m_ann = expected_value_2d(&second_moment_representation(&annuity).unwrap(), &fit, &k, t).unwrap();

    let states = StateSpace::new(&["alive", "dead"]).unwrap();
    let cohort = Cohort::new(simulate_markov(&two, 10_000, 31), states).unwrap();
    let config = ValuationConfig {
        fit: FitConfig::new(window),
        timing: t,
        second_moment: false,
    };
    let mc = plug_in_pipeline(&cohort, &death, &k, &config).unwrap().values[0].value;

    // variance and scaling on a richer contract over the illness-death oracle
    let oracle = illness_death_law(thirty_percent_censoring());
    let mut cf = CashFlow1D::new(3, 5.0).unwrap();
    for s in 2..=5 {
        cf.add_sojourn_atom(0, s as f64, -0.4).unwrap();
        cf.add_sojourn_atom(1, s as f64, 1.0).unwrap();
    }
    cf.set_transition(0, 2, PaymentFunction::constant(2.0).unwrap())
        .unwrap();
    cf.set_transition(1, 0, PaymentFunction::new(0.5, vec![(3.0, 0.8)]).unwrap())
        .unwrap();
    let disc = DiscountFunction::yearly(0.03, 5).unwrap();
    let lambda = 1.75;
    let (mut min_var, mut scale_err): (f64, f64) = (f64::INFINITY, 0.0);
    for zz in oracle.landmarks() {
        let f = oracle_fit(&oracle, &zz, EstimationWindow::single(1.0, 5.0).unwrap());
        let v = |c: &CashFlow1D| expected_value_1d(c, &f.probabilities, &f.rates, &disc, t).unwrap();
        let m = |c: &CashFlow1D| expected_value_2d(&second_moment_representation(c).unwrap(), &f, &disc, t).unwrap();
        let scaled = cf.scale(lambda);
        min_var = min_var.min(m(&cf) - v(&cf).powi(2));
        scale_err = scale_err
            .max((v(&scaled) - lambda * v(&cf)).abs())
            .max((m(&scaled) - lambda * lambda * m(&cf)).abs());
    }
    ensure(
        (v_death - 0.75).abs() <= 1e-10
            && (v_ann - 0.75).abs() <= 1e-10
            && (m_ann - 1.25).abs() <= 1e-10
            && (mc - 0.75).abs() < 0.02
            && min_var >= -1e-10
            && scale_err <= 1e-10,
        format!(
            "death benefit {v_death:.12}, annuity E[Y^2] {m_ann:.12}, n=1e4 estimate {mc:.4}, min variance {min_var:.3e}, scaling error {scale_err:.1e}"
        ),
    )
}

fn epsilon_robustness() -> Outcome {
    let n = 2_000;
    let states = illness_death_states();
    let paths = simulate_semi_markov(&illness_death(5), n, 77);
    let paths = apply_censoring(paths, &thirty_percent_censoring(), 1.0, 77).unwrap();
    let cohort = Cohort::new(
        assign_landmarks(paths, LandmarkRule::AsIfMarkov, 1.0, &states),
        states.clone(),
    )
    .unwrap();
    let window = EstimationWindow::single(1.0, 5.0).unwrap();
    let base = 0.5 / n as f64;
    let fits: Vec<Vec<LandmarkFit>> = [base, base / 2.0, base * 1e-6, 1e-12]
        .iter()
        .map(|&e| {
            let config = FitConfig {
                epsilon: Some(e),
                ..FitConfig::new(window)
            };
            fit_all(&cohort, &config).unwrap()
        })
        .collect();
    let invariant = fits.iter().all(|f| {
        f.iter().zip(&fits[0]).all(|(a, b)| {
            a.rates == b.rates
                && a.rates2d == b.rates2d
                && a.probabilities == b.probabilities
                && a.probabilities2d == b.probabilities2d
        })
    }) && fits[0].iter().all(|f| f.events.is_empty());

    // Occupation from one cohort, counts from a larger one with extra
    // transitions out of "ill" after the first cohort has left it.
    let small: Vec<SamplePath> = cohort.paths().iter().take(50).cloned().collect();
    let a = Cohort::new(small, states.clone()).unwrap();
    let z = Landmark::universal();
    let w = EstimationWindow::single(0.0, 5.0).unwrap();
    let mut monotone = true;
    let mut hits = 0;
    for (j, k) in [(0, 1), (1, 0), (1, 2), (0, 2)] {
        let occ = occupation_estimator(&a, &z, j, &w).unwrap();
        let cnt = counting_estimator(
            &Cohort::new(
                cohort
                    .paths()
                    .iter()
                    .cloned()
                    .map(|p| p.with_landmark(z.clone()))
                    .collect(),
                states.clone(),
            )
            .unwrap(),
            &z,
            j,
            k,
            &w,
        )
        .unwrap();
        let mut prev: Option<Vec<f64>> = None;
        for e in [1e-1, 1e-2, 1e-3, 1e-5, 1e-8] {
            let na = nelson_aalen_1d(&occ, &cnt, e).unwrap();
            hits += na.events.len();
            let cum: Vec<f64> = cnt.grid().iter().map(|&t| na.cumulative(t)).collect();
            if let Some(p) = &prev {
                monotone &= cum.iter().zip(p).all(|(x, y)| x >= y);
            }
            prev = Some(cum);
        }
    }
    ensure(
        invariant && monotone && hits > 0,
        format!("bitwise invariant for eps <= 1/(2n): {invariant}; cumulative nondecreasing as eps decreases: {monotone} ({hits} eps activations)"),
    )
}

fn brute_variation(f: &StepSurface2D) -> f64 {
    let (n1, n2) = f.shape();
    let subsets = |n: usize| -> Vec<Vec<usize>> {
        (0u32..(1 << n.saturating_sub(1)))
            .map(|mask| {
                let mut pts = vec![0];
                pts.extend((1..n).filter(|k| mask & (1 << (k - 1)) != 0));
                pts.push(n);
                pts
            })
            .collect()
    };
    let (p1, p2) = (subsets(n1), subsets(n2));
    let mut vitali: f64 = 0.0;
    for x in &p1 {
        for y in &p2 {
            let mut sum = 0.0;
            for a in x.windows(2) {
                for b in y.windows(2) {
                    sum += f.rect_increment(a[0], a[1], b[0], b[1]).abs();
                }
            }
            vitali = vitali.max(sum);
        }
    }
    let section = |vals: &dyn Fn(usize) -> f64, parts: &[Vec<usize>], n: usize| {
        let sup = (0..=n).map(|k| vals(k).abs()).fold(0.0, f64::max);
        let var = parts
            .iter()
            .map(|p| p.windows(2).map(|w| (vals(w[1]) - vals(w[0])).abs()).sum::<f64>())
            .fold(0.0, f64::max);
        sup + var
    };
    let row = section(&|b| f.node(0, b), &p2, n2);
    let col = section(&|a| f.node(a, 0), &p1, n1);
    vitali + row + col - f.sup_norm()
}

fn integral_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let grid = vec![1.0, 2.0, 3.0, 4.0];
    let mut violations = 0;
    for _ in 0..1000 {
        let f =
            StepSurface2D::from_fn(0.0, grid.clone(), grid.clone(), |_, _| 2.0 * rng.random::<f64>() - 1.0).unwrap();
        let g =
            StepSurface2D::from_fn(0.0, grid.clone(), grid.clone(), |_, _| 2.0 * rng.random::<f64>() - 1.0).unwrap();
        let (lhs, rhs) = integral_bound_check(&f, &g).unwrap();
        if lhs > rhs {
            violations += 1;
        }
    }
    let small = vec![1.0, 2.0, 3.0];
    let mut mismatches = 0;
    for _ in 0..200 {
        let f = StepSurface2D::from_fn(0.0, small.clone(), small.clone(), |_, _| {
            rng.random_range(-5..=5) as f64
        })
        .unwrap();
        if variation_2d(&f) != brute_variation(&f) {
            mismatches += 1;
        }
    }
    ensure(
        violations == 0 && mismatches == 0,
        format!("bound violated in {violations}/1000 random pairs; variation vs partition oracle mismatches {mismatches}/200"),
    )
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("pathwise identities", Duration::from_secs(30), pathwise_identities),
        ("oracle equivalence (rates)", Duration::from_secs(60), oracle_rates),
        (
            "oracle equivalence (probabilities)",
            Duration::from_secs(60),
            oracle_probabilities,
        ),
        ("solver self-consistency", Duration::from_secs(60), solver_consistency),
        ("consistency scaling", Duration::from_secs(300), consistency_scaling),
        ("valuation", Duration::from_secs(120), valuation),
        ("epsilon robustness", Duration::from_secs(120), epsilon_robustness),
        ("integral bound", Duration::from_secs(60), integral_bound),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over the {}s budget", limit.as_secs())),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {}: {name} [{:.2}s] {detail}",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
