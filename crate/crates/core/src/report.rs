//! JSON result files.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::equilibria::EquilibriumResult;
use crate::error::{Error, Result};

/// Rounds to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportEntry {
    pub strategy: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDiagnostics {
    pub iterations: usize,
    pub columns_generated: usize,
    pub cuts_added: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub equilibrium: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    pub defender_utility: f64,
    pub attacker_utility: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// 1-based.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attacked_target: Option<usize>,
    pub marginal: Vec<f64>,
    pub mixed: Vec<SupportEntry>,
    pub attacker: Vec<f64>,
    pub diagnostics: ResultDiagnostics,
}

impl ResultFile {
    /// Numbers are stored at 12 significant digits so the file round-trips
    /// exactly. `wall_time` is omitted for reproducible output.
    pub fn from_result(result: &EquilibriumResult, instance: Option<&str>, wall_time: Option<Duration>) -> Self {
        let round_all = |v: &[f64]| v.iter().map(|&x| round12(x)).collect();
        ResultFile {
            equilibrium: result.kind.name().to_string(),
            instance: instance.map(str::to_string),
            defender_utility: round12(result.defender_utility),
            attacker_utility: round12(result.attacker_utility),
            value: result.value.map(round12),
            attacked_target: result.attacked_target.map(|k| k + 1),
            marginal: round_all(result.marginal.as_slice()),
            mixed: result
                .mixed
                .support()
                .iter()
                .map(|(e, p)| SupportEntry { strategy: e.bit_string(), probability: round12(*p) })
                .collect(),
            attacker: round_all(result.attacker.as_slice()),
            diagnostics: ResultDiagnostics {
                iterations: result.diagnostics.rounds,
                columns_generated: result.diagnostics.columns_generated,
                cuts_added: result.diagnostics.cuts_added,
                wall_time_ms: wall_time.map(|d| round12(d.as_secs_f64() * 1e3)),
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("result files serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Parse { path: e.path().to_string(), message: e.into_inner().to_string() })
    }
}
