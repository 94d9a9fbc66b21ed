use std::path::PathBuf;

use clap::{Args, Parser};

use crate::commands::{run, Command};
use crate::config::{Epsilon, RunConfig, Timing};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "msland",
    version,
    about = "Landmark estimation of multistate rates and cash-flow valuation"
)]
pub struct Cli {
    /// TOML run configuration; flags below override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

/// One flag per configuration key.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    #[arg(long = "s", global = true)]
    pub s: Option<f64>,
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    #[arg(long, global = true)]
    pub tau2: Option<f64>,
    /// A positive number or `auto`.
    #[arg(long, global = true)]
    pub epsilon: Option<Epsilon>,
    /// as-if-markov, universal, column or visited:<from>><to>.
    #[arg(long, global = true)]
    pub landmark: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    #[arg(long, global = true)]
    pub cohort: Option<PathBuf>,
    #[arg(long, global = true)]
    pub cashflow: Option<PathBuf>,
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub timing: Option<Timing>,
    #[arg(long, global = true)]
    pub second_moment: Option<bool>,
    #[arg(long, global = true)]
    pub bivariate: Option<bool>,
    #[arg(long, global = true)]
    pub max_cells_2d: Option<usize>,
}

impl Overrides {
    pub fn apply(self, c: &mut RunConfig) {
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    c.$field = v;
                }
            )*};
        }
        set!(
            s,
            epsilon,
            landmark,
            seed,
            n,
            output_dir,
            timing,
            second_moment,
            bivariate,
            max_cells_2d
        );
        macro_rules! set_some {
            ($($field:ident),*) => {$(
                if self.$field.is_some() {
                    c.$field = self.$field;
                }
            )*};
        }
        set_some!(tau, tau2, model, cohort, cashflow, threads);
    }
}

/// Defaults, then the config file, then the environment, then flags.
pub fn resolve_config(
    file: Option<&std::path::Path>,
    overrides: Overrides,
    env: impl Fn(&str) -> Option<String>,
) -> Result<RunConfig, CliError> {
    let mut config = match file {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    config.apply_env(env)?;
    overrides.apply(&mut config);
    Ok(config)
}

/// Runs the parsed command line and returns the process exit code. The
/// outcome goes to stdout as JSON, failures to stderr as a JSON report.
pub fn execute(cli: Cli, env: impl Fn(&str) -> Option<String>) -> i32 {
    let result = resolve_config(cli.config.as_deref(), cli.overrides, env).and_then(|c| run(cli.command, &c));
    match result {
        Ok(outcome) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&outcome).expect("outcome serializes")
            );
            0
        }
        Err(e) => {
            let report = e.report();
            eprintln!("{}", serde_json::to_string(&report).expect("report serializes"));
            report.exit_code
        }
    }
}
