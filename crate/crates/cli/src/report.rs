//! Machine-readable reports.

use serde::Serialize;
use serde_json::Value;
use symphonic_core::cases::CaseResult;

pub const TOOL: &str = "symphonic";

#[derive(Debug, Clone, Serialize)]
pub struct CommandEcho {
    pub name: String,
    /// Options that affect the results; output paths are left out.
    pub args: serde_json::Map<String, Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub total_ms: f64,
}

/// Everything after `timing` is excluded from reproducibility comparisons;
/// it is serialized last.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: CommandEcho,
    pub seed: Option<u64>,
    pub results: Value,
    pub cases: Vec<CaseResult>,
    pub pass: bool,
    pub timing: Timing,
}

impl Report {
    pub fn new(command: CommandEcho, seed: Option<u64>, results: Value, cases: Vec<CaseResult>, pass: bool, elapsed: std::time::Duration) -> Report {
        Report {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            results,
            cases,
            pass,
            timing: Timing { total_ms: elapsed.as_secs_f64() * 1e3 },
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports contain only serializable data");
        text.push('\n');
        text
    }
}
