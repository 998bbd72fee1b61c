use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::run::Outcome;

pub const TOOL: &str = "qusp";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

/// Field order here is the order in the emitted JSON.
#[derive(Serialize)]
pub struct Report {
    pub tool: Tool,
    pub input_digest: String,
    pub scenario: Value,
    pub verdict: &'static str,
    pub results: Value,
    pub certificates: Value,
    /// Wall-clock milliseconds. Only present on request, since it breaks
    /// byte-identical reruns.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

impl Report {
    pub fn new(input: &[u8], scenario: Value, outcome: Outcome, timing_ms: Option<u128>) -> Self {
        Report {
            tool: Tool { name: TOOL, version: VERSION },
            input_digest: digest(input),
            scenario,
            verdict: if outcome.pass { "pass" } else { "counterexample" },
            results: outcome.results,
            certificates: outcome.certificates,
            timing_ms,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_sha256_hex() {
        assert_eq!(
            digest(b""),
            "sha256:e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
