//! Run configuration: a flat TOML document, environment overrides and
//! command-line flags, applied in that order over the defaults.

use std::path::{Path, PathBuf};

use msland_core::actuarial::SojournTiming;
use msland_core::estimate::EstimationWindow;
use msland_core::model::StateSpace;
use msland_core::simulate::LandmarkRule;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const ENV_OUTPUT_DIR: &str = "MSLAND_OUTPUT_DIR";
pub const ENV_THREADS: &str = "MSLAND_THREADS";

/// `"auto"` resolves to `1/(2n)` for the cohort at hand.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Epsilon {
    #[default]
    Auto,
    Value(f64),
}

impl Serialize for Epsilon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Epsilon::Auto => s.serialize_str("auto"),
            Epsilon::Value(e) => s.serialize_f64(*e),
        }
    }
}

impl<'de> Deserialize<'de> for Epsilon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(e) => Ok(Epsilon::Value(e)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl std::str::FromStr for Epsilon {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            Ok(Epsilon::Auto)
        } else {
            s.parse()
                .map(Epsilon::Value)
                .map_err(|_| format!("`{s}` is neither \"auto\" nor a number"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Timing {
    #[default]
    AtPayment,
    BeforePayment,
}

impl From<Timing> for SojournTiming {
    fn from(t: Timing) -> Self {
        match t {
            Timing::AtPayment => SojournTiming::AtPayment,
            Timing::BeforePayment => SojournTiming::BeforePayment,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Landmark time.
    pub s: f64,
    /// End of the estimation window. Defaults to the cash-flow horizon, or
    /// else the model horizon, or else the last observed event.
    pub tau: Option<f64>,
    /// Second-axis end of the bivariate window; defaults to `tau`.
    pub tau2: Option<f64>,
    pub epsilon: Epsilon,
    /// `as-if-markov`, `universal`, `column` (the landmark column of the
    /// cohort file) or `visited:<from>><to>`.
    pub landmark: String,
    pub seed: u64,
    /// Cohort size for `simulate`.
    pub n: usize,
    pub model: Option<PathBuf>,
    pub cohort: Option<PathBuf>,
    pub cashflow: Option<PathBuf>,
    pub output_dir: PathBuf,
    /// Worker threads; `None` lets rayon decide.
    pub threads: Option<usize>,
    pub timing: Timing,
    /// `value` also reports `E[Y^2]`, which needs the bivariate fit.
    pub second_moment: bool,
    /// Whether `estimate` and `validate` fit the bivariate rates.
    pub bivariate: bool,
    /// Refuse bivariate fits whose grid has more cells than this.
    pub max_cells_2d: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            s: 0.0,
            tau: None,
            tau2: None,
            epsilon: Epsilon::Auto,
            landmark: "as-if-markov".into(),
            seed: 0,
            n: 1000,
            model: None,
            cohort: None,
            cashflow: None,
            output_dir: PathBuf::from("msland-out"),
            threads: None,
            timing: Timing::AtPayment,
            second_moment: true,
            bivariate: true,
            max_cells_2d: 1_000_000,
        }
    }
}

/// Which input files a command reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Inputs {
    pub model: bool,
    pub cohort: bool,
    pub cashflow: bool,
}

/// Landmark rule with state labels resolved, or the cohort file's own column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LandmarkChoice {
    Rule(LandmarkRule),
    Column,
}

impl RunConfig {
    /// Reads a TOML config; relative input paths are taken relative to the
    /// file's directory.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config: RunConfig = toml::from_str(&text).map_err(|e| CliError::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut config.model, &mut config.cohort, &mut config.cashflow]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if config.output_dir.is_relative() && text.lines().any(|l| l.trim_start().starts_with("output_dir")) {
            config.output_dir = base.join(&config.output_dir);
        }
        Ok(config)
    }

    /// Applies `MSLAND_OUTPUT_DIR` and `MSLAND_THREADS` through `lookup`.
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<(), CliError> {
        if let Some(dir) = lookup(ENV_OUTPUT_DIR).filter(|d| !d.is_empty()) {
            self.output_dir = PathBuf::from(dir);
        }
        if let Some(t) = lookup(ENV_THREADS).filter(|t| !t.is_empty()) {
            let threads = t
                .parse()
                .map_err(|_| CliError::Config(format!("{ENV_THREADS}=`{t}` is not a thread count")))?;
            self.threads = Some(threads);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !self.s.is_finite() || self.s < 0.0 {
            return bad(format!("s = {} must be finite and nonnegative", self.s));
        }
        for (name, t) in [("tau", self.tau), ("tau2", self.tau2)] {
            if let Some(t) = t {
                if !(t.is_finite() && t > self.s) {
                    return bad(format!("{name} = {t} must be finite and exceed s = {}", self.s));
                }
            }
        }
        if let Epsilon::Value(e) = self.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return bad(format!("epsilon = {e} must be positive"));
            }
        }
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        if self.max_cells_2d == 0 {
            return bad("max_cells_2d must be positive".into());
        }
        Ok(())
    }

    pub fn landmark_choice(&self, states: &StateSpace) -> Result<LandmarkChoice, CliError> {
        let rule = match self.landmark.as_str() {
            "as-if-markov" => LandmarkRule::AsIfMarkov,
            "universal" => LandmarkRule::Universal,
            "column" => return Ok(LandmarkChoice::Column),
            other => {
                let pair = other.strip_prefix("visited:").ok_or_else(|| {
                    CliError::Config(format!(
                        "landmark `{other}`: expected as-if-markov, universal, column or visited:<from>><to>"
                    ))
                })?;
                let (from, to) = pair
                    .split_once('>')
                    .ok_or_else(|| CliError::Config(format!("landmark `{other}`: expected visited:<from>><to>")))?;
                LandmarkRule::StateAndVisited {
                    from: states.index_of(from.trim())?,
                    to: states.index_of(to.trim())?,
                }
            }
        };
        Ok(LandmarkChoice::Rule(rule))
    }

    pub fn window(&self, tau: f64) -> Result<EstimationWindow, CliError> {
        let tau1 = self.tau.unwrap_or(tau);
        let tau2 = self.tau2.unwrap_or(tau1);
        Ok(EstimationWindow::new(self.s, tau1, tau2)?)
    }

    pub fn epsilon_value(&self) -> Option<f64> {
        match self.epsilon {
            Epsilon::Auto => None,
            Epsilon::Value(e) => Some(e),
        }
    }

    /// SHA-256 over the settings that affect results, with each input file
    /// the command reads replaced by the hash of its contents. Output
    /// location and thread count are left out: they do not change any number.
    pub fn fingerprint(&self, inputs: Inputs) -> Result<String, CliError> {
        let digest = |p: &Option<PathBuf>, used: bool| -> Result<Option<String>, CliError> {
            p.as_ref()
                .filter(|_| used)
                .map(|p| {
                    let bytes = std::fs::read(p).map_err(|e| CliError::io(p, e))?;
                    Ok(hex::encode(Sha256::digest(&bytes)))
                })
                .transpose()
        };
        let canonical = serde_json::json!({
            "s": self.s,
            "tau": self.tau,
            "tau2": self.tau2,
            "epsilon": self.epsilon,
            "landmark": self.landmark,
            "seed": self.seed,
            "n": self.n,
            "model": digest(&self.model, inputs.model)?,
            "cohort": digest(&self.cohort, inputs.cohort)?,
            "cashflow": digest(&self.cashflow, inputs.cashflow)?,
            "timing": self.timing,
            "second_moment": self.second_moment,
            "bivariate": self.bivariate,
            "max_cells_2d": self.max_cells_2d,
        });
        Ok(hex::encode(Sha256::digest(canonical.to_string().as_bytes())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_parsing() {
        let c: RunConfig = toml::from_str("").unwrap();
        assert_eq!(c, RunConfig::default());
        let c: RunConfig = toml::from_str("s = 1.0\ntau = 5.0\nepsilon = 0.001\ntiming = \"before-payment\"").unwrap();
        assert_eq!(c.epsilon, Epsilon::Value(0.001));
        assert_eq!(c.timing, Timing::BeforePayment);
        let c: RunConfig = toml::from_str("epsilon = \"auto\"").unwrap();
        assert_eq!(c.epsilon, Epsilon::Auto);
        assert!(toml::from_str::<RunConfig>("epsilon = \"tiny\"").is_err());
        assert!(toml::from_str::<RunConfig>("unknown_key = 1").is_err());
    }

    #[test]
    fn env_overrides() {
        let mut c = RunConfig::default();
        c.apply_env(|k| match k {
            ENV_OUTPUT_DIR => Some("/tmp/x".into()),
            ENV_THREADS => Some("3".into()),
            _ => None,
        })
        .unwrap();
        assert_eq!((c.output_dir, c.threads), (PathBuf::from("/tmp/x"), Some(3)));
        let mut c = RunConfig::default();
        assert!(c.apply_env(|k| (k == ENV_THREADS).then(|| "many".into())).is_err());
    }

    #[test]
    fn validation() {
        let ok = RunConfig {
            s: 1.0,
            tau: Some(5.0),
            ..RunConfig::default()
        };
        ok.validate().unwrap();
        for bad in [
            RunConfig {
                tau: Some(0.5),
                ..ok.clone()
            },
            RunConfig {
                epsilon: Epsilon::Value(0.0),
                ..ok.clone()
            },
            RunConfig { n: 0, ..ok.clone() },
            RunConfig {
                s: f64::NAN,
                ..ok.clone()
            },
        ] {
            assert!(matches!(bad.validate(), Err(CliError::Config(_))));
        }
    }

    #[test]
    fn landmark_rules() {
        let states = StateSpace::new(&["h", "i", "d"]).unwrap();
        let with = |l: &str| RunConfig {
            landmark: l.into(),
            ..RunConfig::default()
        };
        assert_eq!(
            with("visited:h>i").landmark_choice(&states).unwrap(),
            LandmarkChoice::Rule(LandmarkRule::StateAndVisited { from: 0, to: 1 })
        );
        assert_eq!(with("column").landmark_choice(&states).unwrap(), LandmarkChoice::Column);
        assert!(with("visited:h").landmark_choice(&states).is_err());
        assert!(with("markov").landmark_choice(&states).is_err());
    }

    #[test]
    fn fingerprint_ignores_output_location() {
        let a = RunConfig::default();
        let b = RunConfig {
            output_dir: "elsewhere".into(),
            threads: Some(2),
            ..a.clone()
        };
        assert_eq!(
            a.fingerprint(Inputs::default()).unwrap(),
            b.fingerprint(Inputs::default()).unwrap()
        );
        let c = RunConfig { seed: 1, ..a.clone() };
        assert_ne!(
            a.fingerprint(Inputs::default()).unwrap(),
            c.fingerprint(Inputs::default()).unwrap()
        );
    }
}
