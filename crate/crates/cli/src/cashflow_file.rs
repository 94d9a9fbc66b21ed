//! Payment streams described in TOML, with state labels resolved against the
//! cohort's state space.
//!
//! ```toml
//! horizon = 5.0
//!
//! [discount]
//! rate = 0.03                     # force of interest on yearly steps; or points = [[t, kappa], ...]
//!
//! [[sojourn]]                     # lump sums while in a state
//! state = "ill"
//! times = [2, 3, 4, 5]
//! amount = 1.0
//!
//! [[rate]]                        # continuous payment rate while in a state
//! state = "ill"
//! from = 1.0
//! to = 5.0
//! rate = 0.5
//!
//! [[transition]]                  # lump sum on a jump; steps change the amount
//! from = "healthy"
//! to = "dead"
//! amount = 2.0
//! steps = [[3.0, 1.0]]
//! ```

use std::path::Path;

use msland_core::actuarial::{CashFlow1D, DiscountFunction, PaymentFunction};
use msland_core::model::StateSpace;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscountEntry {
    rate: Option<f64>,
    points: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SojournEntry {
    state: String,
    times: Vec<f64>,
    amount: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RateEntry {
    state: String,
    from: f64,
    to: f64,
    rate: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionEntry {
    from: String,
    to: String,
    amount: f64,
    #[serde(default)]
    steps: Vec<(f64, f64)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CashFlowDoc {
    horizon: f64,
    #[serde(default)]
    discount: DiscountEntry,
    #[serde(default)]
    sojourn: Vec<SojournEntry>,
    #[serde(default)]
    rate: Vec<RateEntry>,
    #[serde(default)]
    transition: Vec<TransitionEntry>,
}

#[derive(Debug, Clone)]
pub struct CashFlowFile {
    pub cashflow: CashFlow1D,
    pub discount: DiscountFunction,
}

fn build(doc: CashFlowDoc, states: &StateSpace) -> Result<CashFlowFile, String> {
    let e = |x: &dyn std::fmt::Display| x.to_string();
    let index = |label: &str| states.index_of(label).map_err(|x| e(&x));
    let mut cf = CashFlow1D::new(states.len(), doc.horizon).map_err(|x| e(&x))?;
    for s in &doc.sojourn {
        let i = index(&s.state)?;
        for &t in &s.times {
            cf.add_sojourn_atom(i, t, s.amount).map_err(|x| e(&x))?;
        }
    }
    for r in &doc.rate {
        cf.add_sojourn_rate(index(&r.state)?, r.from, r.to, r.rate)
            .map_err(|x| e(&x))?;
    }
    for t in doc.transition {
        let payment = PaymentFunction::new(t.amount, t.steps).map_err(|x| e(&x))?;
        cf.set_transition(index(&t.from)?, index(&t.to)?, payment)
            .map_err(|x| e(&x))?;
    }
    let discount = match (doc.discount.rate, doc.discount.points) {
        (None, None) => DiscountFunction::constant(),
        (Some(rate), None) => {
            DiscountFunction::yearly(rate, doc.horizon.ceil().max(1.0) as usize).map_err(|x| e(&x))?
        }
        (None, Some(points)) => DiscountFunction::new(points).map_err(|x| e(&x))?,
        (Some(_), Some(_)) => return Err("discount takes either `rate` or `points`, not both".into()),
    };
    Ok(CashFlowFile { cashflow: cf, discount })
}

pub fn parse_cashflow(text: &str, states: &StateSpace, origin: &Path) -> Result<CashFlowFile, CliError> {
    let format = |message: String| CliError::Format {
        path: origin.to_path_buf(),
        message,
    };
    let doc: CashFlowDoc = toml::from_str(text).map_err(|x| format(x.to_string()))?;
    build(doc, states).map_err(format)
}

pub fn read_cashflow(path: &Path, states: &StateSpace) -> Result<CashFlowFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_cashflow(&text, states, path)
}
