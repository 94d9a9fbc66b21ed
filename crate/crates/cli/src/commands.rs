use std::path::{Path, PathBuf};

use msland_core::actuarial::{value_landmark, CashFlow1D, LandmarkValue, ValuationConfig};
use msland_core::estimate::{
    bivariate_forcing, bivariate_grid_shape, decomposition_residual_2d, fit_landmark, sup_distance_1d, sup_distance_2d,
    true_rates_from_law, Cohort, EpsilonEvent, EstimationWindow, FitConfig, LandmarkFit,
};
use msland_core::model::{verify_indicator_identity, Landmark, StateSpace};
use msland_core::simulate::{apply_censoring, assign_landmarks, exact_law, CensorLaw, LandmarkRule, RNG_ALGORITHM};
use msland_core::volterra::{duhamel_residual, volterra_residual, MatrixMeasure2D, Rect};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::artifact::{
    class_meta, probabilities1d_table, rates1d_table, rates2d_table, write_atomic, SurfaceArtifact, Table,
};
use crate::cashflow_file::{read_cashflow, CashFlowFile};
use crate::cohort_file::{format_cohort, read_cohort};
use crate::config::{Inputs, LandmarkChoice, RunConfig};
use crate::error::CliError;
use crate::model_file::{read_model, ModelFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Simulate a censored cohort from a model file.
    Simulate,
    /// Estimate rates and occupation probabilities per landmark class.
    Estimate,
    /// Plug-in expected value (and second moment) of a cash flow.
    Value,
    /// Run the invariant and oracle checks.
    Validate,
}

/// What a successful run produced.
#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub command: &'static str,
    pub config_hash: String,
    pub artifacts: Vec<PathBuf>,
    pub summary: Value,
}

pub fn run(command: Command, config: &RunConfig) -> Result<Outcome, CliError> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?;
    let present = |p: &Option<PathBuf>| p.is_some();
    let inputs = match command {
        Command::Simulate => Inputs {
            model: true,
            ..Inputs::default()
        },
        Command::Estimate => Inputs {
            cohort: true,
            ..Inputs::default()
        },
        Command::Value => Inputs {
            cohort: true,
            cashflow: true,
            ..Inputs::default()
        },
        Command::Validate => Inputs {
            model: present(&config.model),
            cohort: present(&config.cohort),
            cashflow: present(&config.cashflow) && present(&config.cohort),
        },
    };
    let hash = config.fingerprint(inputs)?;
    pool.install(|| match command {
        Command::Simulate => simulate(config, hash),
        Command::Estimate => estimate(config, hash),
        Command::Value => value(config, hash),
        Command::Validate => validate(config, hash),
    })
}

fn required<'a>(p: &'a Option<PathBuf>, what: &'static str) -> Result<&'a Path, CliError> {
    p.as_deref().ok_or(CliError::MissingInput(what))
}

fn write_table(path: PathBuf, table: &Table, out: &mut Vec<PathBuf>) -> Result<(), CliError> {
    write_atomic(&path, table.format().as_bytes())?;
    out.push(path);
    Ok(())
}

fn write_json(path: PathBuf, value: &Value, out: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    out.push(path);
    Ok(())
}

fn simulate(config: &RunConfig, hash: String) -> Result<Outcome, CliError> {
    let model_path = required(&config.model, "`model` (simulation model file)")?;
    let model = read_model(model_path)?;
    let states = model.states().clone();
    let paths = model.simulate(config.n, config.seed);
    let paths = apply_censoring(paths, &model.censoring, config.s, config.seed)?;
    let paths = match config.landmark_choice(&states)? {
        LandmarkChoice::Rule(rule) => assign_landmarks(paths, rule, config.s, &states),
        LandmarkChoice::Column => paths,
    };
    let header = vec![
        format!("msland {} simulated cohort", env!("CARGO_PKG_VERSION")),
        format!("config_hash = {hash}"),
        format!("rng = {RNG_ALGORITHM}, seed = {}, n = {}", config.seed, config.n),
    ];
    let text = format_cohort(&states, &paths, &header)?;
    let target = config.output_dir.join("cohort.csv");
    write_atomic(&target, text.as_bytes())?;
    let censored = paths.iter().filter(|p| p.censor_time().is_finite()).count();
    Ok(Outcome {
        command: "simulate",
        config_hash: hash,
        artifacts: vec![target],
        summary: json!({ "individuals": paths.len(), "censored": censored }),
    })
}

/// Cohort with landmarks assigned according to the configuration.
fn load_cohort(config: &RunConfig) -> Result<Cohort, CliError> {
    let path = required(&config.cohort, "`cohort` (event-history file)")?;
    let file = read_cohort(path)?;
    file.check_landmark_time(config.s, path)?;
    let paths = match config.landmark_choice(&file.states)? {
        LandmarkChoice::Rule(rule) => assign_landmarks(file.paths, rule, config.s, &file.states),
        LandmarkChoice::Column => file.paths,
    };
    Ok(Cohort::new(paths, file.states)?)
}

/// `tau` from the config, else the cash-flow horizon, else the last
/// observed event.
fn resolve_tau(config: &RunConfig, cashflow: Option<&CashFlow1D>, cohort: Option<&Cohort>) -> Result<f64, CliError> {
    if let Some(t) = config.tau {
        return Ok(t);
    }
    if let Some(cf) = cashflow {
        return Ok(cf.horizon());
    }
    let last = cohort
        .into_iter()
        .flat_map(|c| c.paths())
        .flat_map(|p| p.observed_jumps().iter().map(|j| j.time))
        .fold(f64::NEG_INFINITY, f64::max);
    if last > config.s {
        Ok(last)
    } else {
        Err(CliError::Config(format!(
            "no event after s = {}; set tau explicitly",
            config.s
        )))
    }
}

fn fit_config(config: &RunConfig, window: EstimationWindow, bivariate: bool) -> FitConfig {
    FitConfig {
        epsilon: config.epsilon_value(),
        bivariate,
        ..FitConfig::new(window)
    }
}

fn guard_grid(config: &RunConfig, cohort: &Cohort, window: &EstimationWindow) -> Result<(), CliError> {
    for z in cohort.landmarks().keys() {
        let (n1, n2) = bivariate_grid_shape(cohort, z, window);
        let cells = n1.saturating_mul(n2);
        if cells > config.max_cells_2d {
            return Err(CliError::GridTooLarge {
                landmark: z.to_string(),
                cells,
                limit: config.max_cells_2d,
            });
        }
    }
    Ok(())
}

fn slug(k: usize, z: &Landmark) -> String {
    let clean: String = z
        .as_str()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect();
    format!("{k:02}_{clean}")
}

fn event_json(e: &EpsilonEvent) -> Value {
    json!({
        "time1": e.time1,
        "time2": e.time2,
        "entry": e.entry,
        "occupation": e.occupation,
        "increment": e.increment,
    })
}

fn estimate(config: &RunConfig, hash: String) -> Result<Outcome, CliError> {
    let cohort = load_cohort(config)?;
    let window = config.window(resolve_tau(config, None, Some(&cohort))?)?;
    if config.bivariate {
        guard_grid(config, &cohort, &window)?;
    }
    let settings = fit_config(config, window, config.bivariate);
    let classes: Vec<Landmark> = cohort.landmarks().into_keys().collect();
    let fits = classes
        .par_iter()
        .map(|z| fit_landmark(&cohort, z, &settings))
        .collect::<Result<Vec<LandmarkFit>, _>>()?;

    let states = cohort.states();
    let mut artifacts = Vec::new();
    let mut classes_json = Vec::new();
    for (k, fit) in fits.iter().enumerate() {
        let dir = config.output_dir.join(slug(k, &fit.landmark));
        let meta = class_meta(&fit.landmark, states, &hash);
        write_table(
            dir.join("rates1d.csv"),
            &rates1d_table(&fit.rates, meta.clone()),
            &mut artifacts,
        )?;
        write_table(
            dir.join("probabilities1d.csv"),
            &probabilities1d_table(&fit.probabilities, states, meta.clone()),
            &mut artifacts,
        )?;
        if let (Some(r2), Some(p2)) = (&fit.rates2d, &fit.probabilities2d) {
            write_table(
                dir.join("rates2d.csv"),
                &rates2d_table(r2, meta.clone()),
                &mut artifacts,
            )?;
            for i1 in 0..states.len() {
                for i2 in 0..states.len() {
                    let surface = SurfaceArtifact::from_probabilities(&fit.landmark, p2, (i1, i2));
                    let name = format!("p2_{}_{}.csv", states.labels()[i1], states.labels()[i2]);
                    write_table(
                        dir.join("surfaces").join(name),
                        &surface.to_table(meta.clone()),
                        &mut artifacts,
                    )?;
                }
            }
        }
        for w in &fit.warnings {
            eprintln!("warning: {w}");
        }
        classes_json.push(json!({
            "landmark": fit.landmark.as_str(),
            "directory": dir,
            "members": fit.members,
            "epsilon": fit.epsilon,
            "initial": fit.initial,
            "epsilon_events": fit.events.iter().map(event_json).collect::<Vec<_>>(),
            "warnings": fit.warnings,
        }));
    }
    let summary = json!({
        "config_hash": hash,
        "s": window.s,
        "tau1": window.tau1,
        "tau2": window.tau2,
        "classes": classes_json,
    });
    write_json(config.output_dir.join("estimate.json"), &summary, &mut artifacts)?;
    Ok(Outcome {
        command: "estimate",
        config_hash: hash,
        artifacts,
        summary,
    })
}

fn value_json(v: &LandmarkValue) -> Value {
    json!({
        "landmark": v.landmark.as_str(),
        "members": v.members,
        "value": v.value,
        "second_moment": v.second_moment,
        "variance": v.variance(),
        "epsilon_events": v.epsilon_events,
        "warnings": v.warnings,
    })
}

fn value(config: &RunConfig, hash: String) -> Result<Outcome, CliError> {
    let cohort = load_cohort(config)?;
    let CashFlowFile { cashflow, discount } = read_cashflow(
        required(&config.cashflow, "`cashflow` (payment stream file)")?,
        cohort.states(),
    )?;
    let window = config.window(resolve_tau(config, Some(&cashflow), Some(&cohort))?)?;
    if config.second_moment {
        guard_grid(config, &cohort, &window)?;
    }
    let settings = ValuationConfig {
        fit: fit_config(config, window, config.second_moment),
        timing: config.timing.into(),
        second_moment: config.second_moment,
    };
    let classes: Vec<Landmark> = cohort.landmarks().into_keys().collect();
    let values = classes
        .par_iter()
        .map(|z| value_landmark(&cohort, z, &cashflow, &discount, &settings))
        .collect::<Result<Vec<_>, _>>()?;
    for w in values.iter().flat_map(|v| &v.warnings) {
        eprintln!("warning: {w}");
    }
    let summary = json!({
        "config_hash": hash,
        "s": window.s,
        "horizon": cashflow.horizon(),
        "timing": config.timing,
        "values": values.iter().map(value_json).collect::<Vec<_>>(),
    });
    let mut artifacts = Vec::new();
    write_json(config.output_dir.join("valuation.json"), &summary, &mut artifacts)?;
    Ok(Outcome {
        command: "value",
        config_hash: hash,
        artifacts,
        summary,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }
}

/// Largest cell-block the Duhamel check expands; the Peano series grows
/// quickly with the number of cells.
const DUHAMEL_CELLS: usize = 4;

fn solver_checks(z: &Landmark, fit: &LandmarkFit, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let (Some(r2), Some(p2)) = (&fit.rates2d, &fit.probabilities2d) else {
        return Ok(());
    };
    let grid = r2.grid();
    let phi = bivariate_forcing(grid, &fit.probabilities, &fit.initial);
    let plug = volterra_residual(p2.vectors(), &phi, r2.measure())?;
    checks.push(Check::new(format!("volterra plug-back [{z}]"), plug, 1e-12));

    let mut half = MatrixMeasure2D::zero(grid.clone(), r2.measure().dim());
    for (a, b, m) in r2.measure().atoms() {
        half.set(a, b, m.scale(0.5))?;
    }
    let (k1, k2) = (grid.n1().min(DUHAMEL_CELLS), grid.n2().min(DUHAMEL_CELLS));
    let rect = Rect::new(grid.origin(), grid.time1(k1), grid.origin(), grid.time2(k2));
    let duhamel = duhamel_residual(r2.measure(), &half, &rect)?;
    checks.push(Check::new(format!("duhamel [{z}]"), duhamel, 1e-10));
    Ok(())
}

fn cohort_checks(config: &RunConfig, cohort: &Cohort, tau: f64, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let s = config.s;
    let identity = cohort
        .paths()
        .par_iter()
        .map(|p| verify_indicator_identity(p, s, tau))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
    checks.push(Check::new("indicator identity", identity, 0.0));

    let window = config.window(tau)?;
    let l = cohort.states().len();
    let classes: Vec<Landmark> = cohort.landmarks().into_keys().collect();
    let mut decomposition: f64 = 0.0;
    for z in &classes {
        let worst = (0..l * l)
            .into_par_iter()
            .map(|k| decomposition_residual_2d(cohort, z, (k % l, k / l), &window).map(|r| r.residual))
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
        decomposition = decomposition.max(worst);
    }
    checks.push(Check::new("censored decomposition", decomposition, 1e-12));

    if config.bivariate {
        guard_grid(config, cohort, &window)?;
    }
    let settings = fit_config(config, window, config.bivariate);
    let fits = classes
        .par_iter()
        .map(|z| fit_landmark(cohort, z, &settings))
        .collect::<Result<Vec<_>, _>>()?;
    let mut conservation: f64 = 0.0;
    for fit in &fits {
        if fit.members == 0 {
            continue;
        }
        let nodes = fit.probabilities[0].nodes().len();
        for k in 0..nodes {
            let total: f64 = fit.probabilities.iter().map(|f| f.nodes()[k]).sum();
            conservation = conservation.max((total - 1.0).abs());
        }
        solver_checks(&fit.landmark, fit, checks)?;
    }
    checks.push(Check::new("probability conservation", conservation, 1e-12));
    Ok(())
}

fn oracle_checks(config: &RunConfig, model: &ModelFile, tau: f64, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let Some(dynamics) = model.discrete() else {
        return Ok(());
    };
    let states: &StateSpace = model.states();
    let rule = match config.landmark_choice(states)? {
        LandmarkChoice::Rule(r) => r,
        LandmarkChoice::Column => LandmarkRule::Universal,
    };
    let horizon = dynamics.horizon();
    let law = |censor: CensorLaw| -> Result<_, CliError> {
        Ok(exact_law(dynamics, censor, config.s, horizon)?.with_landmarks(rule))
    };
    let censored = law(model.censoring.clone())?;
    let full = law(CensorLaw::never())?;
    let window = config.window(tau)?;
    let cohort = Cohort::from_law(&censored)?;
    let settings = fit_config(config, window, config.bivariate);

    let (mut rates, mut invariance, mut probs): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let times: Vec<f64> = (0..=horizon)
        .map(|k| k as f64)
        .filter(|&t| t >= window.s && t <= window.tau_max())
        .collect();
    for z in censored.landmarks() {
        let fit = fit_landmark(&cohort, &z, &settings)?;
        let (r1, r2) = true_rates_from_law(&censored, &z, &window, fit.epsilon)?;
        rates = rates.max(sup_distance_1d(&fit.rates, &r1)?);
        let (c1, c2) = true_rates_from_law(&censored, &z, &window, f64::MIN_POSITIVE)?;
        let (u1, u2) = true_rates_from_law(&full, &z, &window, f64::MIN_POSITIVE)?;
        invariance = invariance
            .max(sup_distance_1d(&c1, &u1)?)
            .max(sup_distance_2d(&c2, &u2)?);
        for &t in &times {
            let exact = censored.occupation(&z, t).unwrap_or_default();
            for (f, p) in fit.probabilities.iter().zip(exact) {
                probs = probs.max((f.eval(t) - p).abs());
            }
        }
        if let (Some(fit2), Some(p2)) = (&fit.rates2d, &fit.probabilities2d) {
            rates = rates.max(sup_distance_2d(fit2, &r2)?);
            for &t1 in times.iter().filter(|&&t| t <= window.tau1) {
                for &t2 in times.iter().filter(|&&t| t <= window.tau2) {
                    let Some(joint) = censored.joint_occupation(&z, t1, t2) else {
                        continue;
                    };
                    for i1 in 0..states.len() {
                        for i2 in 0..states.len() {
                            probs = probs.max((p2.eval(t1, t2, i1, i2) - joint[(i1, i2)]).abs());
                        }
                    }
                }
            }
        }
        solver_checks(&z, &fit, checks)?;
    }
    checks.push(Check::new("oracle rates", rates, 1e-12));
    checks.push(Check::new("oracle censoring invariance", invariance, 1e-12));
    checks.push(Check::new("oracle probabilities", probs, 1e-10));
    Ok(())
}

fn validate(config: &RunConfig, hash: String) -> Result<Outcome, CliError> {
    if config.cohort.is_none() && config.model.is_none() {
        return Err(CliError::MissingInput("`cohort` or `model` to validate against"));
    }
    let model = config.model.as_deref().map(read_model).transpose()?;
    let cohort = config.cohort.as_ref().map(|_| load_cohort(config)).transpose()?;
    let cashflow = match (&config.cashflow, &cohort) {
        (Some(p), Some(c)) => Some(read_cashflow(p, c.states())?.cashflow),
        _ => None,
    };
    let mut checks = Vec::new();
    if let Some(cohort) = &cohort {
        let tau = resolve_tau(config, cashflow.as_ref(), Some(cohort))?;
        cohort_checks(config, cohort, tau, &mut checks)?;
    }
    if let Some(model) = &model {
        let tau = config.tau.unwrap_or(model.horizon());
        oracle_checks(config, model, tau, &mut checks)?;
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    let summary = json!({
        "config_hash": hash,
        "passed": failed == 0,
        "checks": checks,
    });
    let mut artifacts = Vec::new();
    write_json(config.output_dir.join("validation.json"), &summary, &mut artifacts)?;
    for c in &checks {
        eprintln!(
            "{} {} = {:.3e} (tolerance {:.0e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance
        );
    }
    if failed > 0 {
        return Err(CliError::ValidationFailed {
            failed,
            total: checks.len(),
        });
    }
    Ok(Outcome {
        command: "validate",
        config_hash: hash,
        artifacts,
        summary,
    })
}
