use anyhow::{bail, Context, Result};
use qusp_core::rational::{self, Rational};
use qusp_core::ratcover::{DEFAULT_DEPTH, DEFAULT_GRID};
use qusp_core::FiniteQuasiUniformity;
use serde::{Deserialize, Serialize};

/// A batch job read from a JSON file, tagged by `"scenario"`.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "scenario", rename_all = "snake_case")]
pub enum Scenario {
    FiniteCompare(FiniteCompare),
    SingularScan(SingularScan),
    KelleyDemo(KelleyDemo),
    DenseWitness(DenseWitness),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteCompare {
    pub q1: FiniteQuasiUniformity,
    pub q2: FiniteQuasiUniformity,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularScan {
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KelleyDemo {
    pub seed: u64,
    pub n: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DenseWitness {
    #[serde(with = "rational::serde_str")]
    pub eps: Rational,
    #[serde(default = "default_depth")]
    pub depth: usize,
    /// Background scales for boundedness, non-entourage witnesses and the
    /// refined base.
    #[serde(with = "rational::serde_vec")]
    pub scales: Vec<Rational>,
    /// Number of star steps in the cover normal sequence.
    #[serde(default = "default_star_steps")]
    pub star_steps: usize,
    #[serde(default = "default_grid")]
    pub grid: usize,
    /// Without probes only the deterministic certificates are produced.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<Probes>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Probes {
    pub seed: u64,
    pub count: usize,
}

fn default_depth() -> usize {
    DEFAULT_DEPTH
}

fn default_star_steps() -> usize {
    3
}

fn default_grid() -> usize {
    DEFAULT_GRID
}

fn fields<T: serde::de::DeserializeOwned>(doc: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(doc).map_err(|e| {
        let path = e.path().to_string();
        anyhow::anyhow!("invalid scenario at `{path}`: {}", e.into_inner())
    })
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::FiniteCompare(_) => "finite_compare",
            Scenario::SingularScan(_) => "singular_scan",
            Scenario::KelleyDemo(_) => "kelley_demo",
            Scenario::DenseWitness(_) => "dense_witness",
        }
    }

    /// Errors carry the JSON path of the offending field.
    pub fn parse(bytes: &[u8]) -> Result<Scenario> {
        let mut doc: serde_json::Value = serde_json::from_slice(bytes).context("scenario is not valid JSON")?;
        let body = doc.as_object_mut().context("scenario must be a JSON object")?;
        let kind = match body.remove("scenario") {
            Some(serde_json::Value::String(k)) => k,
            Some(_) => bail!("invalid scenario at `scenario`: expected a string"),
            None => bail!("scenario is missing the `scenario` field"),
        };
        let doc = serde_json::Value::Object(std::mem::take(body));
        Ok(match kind.as_str() {
            "finite_compare" => Scenario::FiniteCompare(fields(doc)?),
            "singular_scan" => Scenario::SingularScan(fields(doc)?),
            "kelley_demo" => Scenario::KelleyDemo(fields(doc)?),
            "dense_witness" | "dense" => Scenario::DenseWitness(fields(doc)?),
            other => bail!(
                "invalid scenario at `scenario`: unknown kind {other:?}, expected one of \
                 finite_compare, singular_scan, kelley_demo, dense_witness"
            ),
        })
    }

    pub fn load(path: &std::path::Path) -> Result<(Scenario, Vec<u8>)> {
        let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        let scenario = Scenario::parse(&bytes)?;
        Ok((scenario, bytes))
    }
}
