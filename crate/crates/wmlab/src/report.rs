//! Machine-readable records: one JSON object per operation or experiment.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// Per-operation record (norms, averages, checks).
#[derive(Clone, Debug, Serialize)]
pub struct OpRecord {
    pub op: String,
    pub params: BTreeMap<String, Value>,
    pub value: Value,
    pub edge_terms: u64,
    pub mode: String,
}

/// One named experiment run. Every threshold used for pass/fail is echoed
/// in `params`; identical invocations reproduce `metrics` bit-identically
/// in exact mode.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub params: BTreeMap<String, Value>,
    pub metrics: BTreeMap<String, Value>,
    pub pass: bool,
    pub runtime_ms: u64,
    pub mode: String,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl OpRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }
}
