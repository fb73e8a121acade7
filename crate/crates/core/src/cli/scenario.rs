//! Scenario files: a single JSON object.
//!
//! ```json
//! {
//!   "states": ["rain", "dry"],
//!   "prior": [0.25, 0.75],
//!   "signals": ["cloudy", "clear"],
//!   "likelihood": [[0.8, 0.2], [0.2, 0.8]],
//!   "realized_signal": "cloudy",
//!   "rule": { "type": "exponential", "alpha": 2.0, "beta": 0.5 }
//! }
//! ```
//!
//! `rule.type` is one of `bayes`, `exponential` (with `alpha`, `beta`) or
//! `variational` (with `lambda`, `mu`). `likelihood` has one row per state
//! and one column per signal.

use std::path::Path;

use serde::Deserialize;

use super::CliError;
use crate::error::BeliefError;
use crate::params::{ExponentParams, PreferenceParams};
use crate::space::{Distribution, Experiment, StateSpace, OUTPUT_SUM_TOL};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    states: Vec<String>,
    prior: Vec<f64>,
    signals: Vec<String>,
    likelihood: Vec<Vec<f64>>,
    realized_signal: String,
    rule: RawRule,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RawRule {
    Bayes,
    Exponential { alpha: f64, beta: f64 },
    Variational { lambda: f64, mu: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rule {
    Bayes,
    Exponential(ExponentParams),
    Variational(PreferenceParams),
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub space: StateSpace,
    pub prior: Distribution,
    pub experiment: Experiment,
    pub realized_signal: String,
    pub rule: Rule,
    /// Renormalization notices for the error stream.
    pub warnings: Vec<String>,
}

pub fn parse_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Domain(format!("cannot read scenario {}: {e}", path.display())))?;
    parse_scenario_str(&text)
        .map_err(|e| CliError::Domain(format!("scenario {}: {e}", path.display())))
}

pub fn parse_scenario_str(text: &str) -> Result<Scenario, String> {
    let raw: RawScenario = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let space = StateSpace::new(raw.states).map_err(field("states"))?;
    let (prior, prior_adj) =
        Distribution::from_input(space.clone(), &raw.prior, "prior").map_err(field("prior"))?;
    let (experiment, lik_adj) = Experiment::from_input(space.clone(), raw.signals, &raw.likelihood)
        .map_err(|e| match e {
            BeliefError::BadLabel(l) => format!("field `signals`: duplicate or empty label `{l}`"),
            other => format!("field `likelihood`: {other}"),
        })?;
    if experiment.signal_index(&raw.realized_signal).is_err() {
        return Err(format!(
            "field `realized_signal`: `{}` is not one of the signals",
            raw.realized_signal
        ));
    }
    let rule = match raw.rule {
        RawRule::Bayes => Rule::Bayes,
        RawRule::Exponential { alpha, beta } => {
            Rule::Exponential(ExponentParams::new(alpha, beta).map_err(field("rule"))?)
        }
        RawRule::Variational { lambda, mu } => {
            Rule::Variational(PreferenceParams::new(lambda, mu).map_err(field("rule"))?)
        }
    };

    let mut warnings = Vec::new();
    for (name, adj) in [("prior", prior_adj), ("likelihood", lik_adj)] {
        if adj > OUTPUT_SUM_TOL {
            warnings.push(format!(
                "warning: `{name}` renormalized (largest adjustment {adj:e})"
            ));
        }
    }
    Ok(Scenario {
        space,
        prior,
        experiment,
        realized_signal: raw.realized_signal,
        rule,
        warnings,
    })
}

fn field(name: &'static str) -> impl Fn(BeliefError) -> String {
    move |e| format!("field `{name}`: {e}")
}
