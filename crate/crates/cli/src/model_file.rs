//! Simulation models described in TOML.
//!
//! ```toml
//! kind = "semi-markov"            # or "markov", "continuous"
//! states = ["healthy", "ill", "dead"]
//! initial = [1.0, 0.0, 0.0]
//! horizon = 5
//!
//! [[hazard]]                      # semi-markov: by completed duration
//! from = "ill"
//! to = "dead"
//! values = [0.1, 0.25]
//!
//! [censoring]
//! atoms = [[2.0, 0.075], [inf, 0.925]]
//! ```
//!
//! A Markov chain gives `matrix` (time-homogeneous) or `steps` (one matrix
//! per step); a continuous-time chain gives `intensities`.

use std::path::Path;

use msland_core::model::{SamplePath, StateSpace};
use msland_core::simulate::{
    simulate_continuous, simulate_discrete, CensorLaw, ContinuousMarkovModel, DiscreteMarkovModel, DiscreteModel,
    SemiMarkovModel,
};
use msland_core::Matrix;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Kind {
    Markov,
    SemiMarkov,
    Continuous,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HazardEntry {
    from: String,
    to: String,
    values: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CensoringEntry {
    atoms: Vec<(f64, f64)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    kind: Kind,
    states: Vec<String>,
    initial: Vec<f64>,
    horizon: f64,
    matrix: Option<Vec<Vec<f64>>>,
    steps: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default)]
    hazard: Vec<HazardEntry>,
    intensities: Option<Vec<Vec<f64>>>,
    censoring: Option<CensoringEntry>,
}

#[derive(Debug, Clone)]
pub enum Dynamics {
    Markov(DiscreteMarkovModel),
    SemiMarkov(SemiMarkovModel),
    Continuous(ContinuousMarkovModel),
}

#[derive(Debug, Clone)]
pub struct ModelFile {
    pub dynamics: Dynamics,
    pub censoring: CensorLaw,
}

impl ModelFile {
    pub fn states(&self) -> &StateSpace {
        match &self.dynamics {
            Dynamics::Markov(m) => m.states(),
            Dynamics::SemiMarkov(m) => m.states(),
            Dynamics::Continuous(m) => m.states(),
        }
    }

    pub fn horizon(&self) -> f64 {
        match &self.dynamics {
            Dynamics::Markov(m) => m.horizon() as f64,
            Dynamics::SemiMarkov(m) => m.horizon() as f64,
            Dynamics::Continuous(m) => m.horizon(),
        }
    }

    /// Discrete-time dynamics, for which the law can be enumerated.
    pub fn discrete(&self) -> Option<&dyn DiscreteModel> {
        match &self.dynamics {
            Dynamics::Markov(m) => Some(m),
            Dynamics::SemiMarkov(m) => Some(m),
            Dynamics::Continuous(_) => None,
        }
    }

    pub fn simulate(&self, n: usize, seed: u64) -> Vec<SamplePath> {
        match &self.dynamics {
            Dynamics::Continuous(m) => simulate_continuous(m, n, seed),
            _ => simulate_discrete(self.discrete().expect("discrete dynamics"), n, seed),
        }
    }
}

fn matrix(rows: &[Vec<f64>], l: usize, what: &str) -> Result<Matrix, String> {
    if rows.len() != l || rows.iter().any(|r| r.len() != l) {
        return Err(format!("{what} must be {l} x {l}"));
    }
    Ok(Matrix::from_rows(rows))
}

fn build(doc: ModelDoc) -> Result<ModelFile, String> {
    let states = StateSpace::new(&doc.states).map_err(|e| e.to_string())?;
    let l = states.len();
    let censoring = match doc.censoring {
        Some(c) => CensorLaw::new(c.atoms).map_err(|e| e.to_string())?,
        None => CensorLaw::never(),
    };
    let steps = || -> Result<usize, String> {
        if doc.horizon.fract() != 0.0 || doc.horizon < 1.0 {
            return Err(format!(
                "discrete-time horizon {} must be a positive integer",
                doc.horizon
            ));
        }
        Ok(doc.horizon as usize)
    };
    let unused = |present: bool, key: &str| {
        if present {
            Err(format!("`{key}` does not apply to {:?} models", doc.kind))
        } else {
            Ok(())
        }
    };
    let dynamics = match doc.kind {
        Kind::Markov => {
            unused(!doc.hazard.is_empty(), "hazard")?;
            unused(doc.intensities.is_some(), "intensities")?;
            let horizon = steps()?;
            let model = match (&doc.matrix, &doc.steps) {
                (Some(m), None) => {
                    DiscreteMarkovModel::homogeneous(states, doc.initial, matrix(m, l, "matrix")?, horizon)
                }
                (None, Some(list)) => {
                    if list.len() != horizon {
                        return Err(format!("`steps` lists {} matrices for horizon {horizon}", list.len()));
                    }
                    let ms = list
                        .iter()
                        .map(|m| matrix(m, l, "each step matrix"))
                        .collect::<Result<_, _>>()?;
                    DiscreteMarkovModel::new(states, doc.initial, ms)
                }
                _ => return Err("a markov model needs exactly one of `matrix` or `steps`".into()),
            };
            Dynamics::Markov(model.map_err(|e| e.to_string())?)
        }
        Kind::SemiMarkov => {
            unused(doc.matrix.is_some() || doc.steps.is_some(), "matrix/steps")?;
            unused(doc.intensities.is_some(), "intensities")?;
            let mut hazards = vec![vec![Vec::new(); l]; l];
            for h in doc.hazard {
                let from = states.index_of(&h.from).map_err(|e| e.to_string())?;
                let to = states.index_of(&h.to).map_err(|e| e.to_string())?;
                hazards[from][to] = h.values;
            }
            let horizon = steps()?;
            Dynamics::SemiMarkov(
                SemiMarkovModel::new(states, doc.initial, horizon, hazards).map_err(|e| e.to_string())?,
            )
        }
        Kind::Continuous => {
            unused(doc.matrix.is_some() || doc.steps.is_some(), "matrix/steps")?;
            unused(!doc.hazard.is_empty(), "hazard")?;
            let q = doc
                .intensities
                .as_deref()
                .ok_or("a continuous model needs `intensities`")?;
            let q = matrix(q, l, "intensities")?;
            Dynamics::Continuous(
                ContinuousMarkovModel::new(states, doc.initial, q, doc.horizon).map_err(|e| e.to_string())?,
            )
        }
    };
    Ok(ModelFile { dynamics, censoring })
}

pub fn parse_model(text: &str, origin: &Path) -> Result<ModelFile, CliError> {
    let format = |message: String| CliError::Format {
        path: origin.to_path_buf(),
        message,
    };
    let doc: ModelDoc = toml::from_str(text).map_err(|e| format(e.to_string()))?;
    build(doc).map_err(format)
}

pub fn read_model(path: &Path) -> Result<ModelFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_model(&text, path)
}
