use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};
use std::path::Path;

use infoflow_core::oracles::VerificationReport;
use infoflow_core::{FrequencyGrid, MeasureResult, MirMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::model_doc::ModelDocument;
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    #[default]
    NatsPerSample,
    BitsPerSample,
}

impl Units {
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            Units::NatsPerSample => nats,
            Units::BitsPerSample => nats / LN_2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDocument {
    pub n_points: usize,
    /// Normalised angular frequency in radians per sample.
    pub omega: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_rate_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hz: Option<Vec<f64>>,
}

impl GridDocument {
    pub fn new(grid: &FrequencyGrid, sample_rate_hz: Option<f64>) -> Self {
        Self {
            n_points: grid.len(),
            omega: grid.points().to_vec(),
            sample_rate_hz,
            hz: sample_rate_hz.map(|fs| grid.points().iter().map(|w| w * fs / (2.0 * PI)).collect()),
        }
    }
}

/// `values[f][i][j]`, `n_points x K x K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureDocument {
    pub values: Vec<Vec<Vec<ComplexValue>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub magnitude_sq: Option<Vec<Vec<Vec<f64>>>>,
}

impl MeasureDocument {
    pub fn new(result: &MeasureResult, with_magnitude_sq: bool) -> Self {
        let k = result.channels();
        let values = result
            .values
            .iter()
            .map(|m| (0..k).map(|i| (0..k).map(|j| ComplexValue { re: m[(i, j)].re, im: m[(i, j)].im }).collect()).collect())
            .collect();
        let magnitude_sq = with_magnitude_sq.then(|| {
            result
                .values
                .iter()
                .map(|m| (0..k).map(|i| (0..k).map(|j| m[(i, j)].norm_sqr()).collect()).collect())
                .collect()
        });
        Self { values, magnitude_sq }
    }
}

/// `values[i][j]` is the rate between target `i` and source `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MirDocument {
    pub units: Units,
    pub values: Vec<Vec<f64>>,
}

impl MirDocument {
    pub fn new(mir: &MirMatrix, units: Units) -> Self {
        let v = &mir.values;
        Self {
            units,
            values: (0..v.nrows()).map(|i| (0..v.ncols()).map(|j| units.from_nats(v[(i, j)])).collect()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub spectral_radius: f64,
    /// Grid points whose squared coherence was clipped below 1 before the logarithm.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub clip_counts: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: u32,
    pub command: String,
    pub model: ModelDocument,
    pub grid: GridDocument,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub measures: BTreeMap<String, MeasureDocument>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub mir: BTreeMap<String, MirDocument>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckDocument {
    pub name: String,
    pub max_deviation: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyDocument {
    pub schema_version: u32,
    pub command: String,
    pub seed: u64,
    pub models: usize,
    pub grid_points: usize,
    pub passed: bool,
    pub checks: Vec<CheckDocument>,
}

impl VerifyDocument {
    pub fn new(report: &VerificationReport) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: "verify".into(),
            seed: report.config.seed,
            models: report.config.models,
            grid_points: report.config.grid_points,
            passed: report.passed(),
            checks: report
                .checks
                .iter()
                .map(|c| CheckDocument {
                    name: c.name.clone(),
                    max_deviation: c.max_deviation,
                    bound: c.bound,
                    passed: c.passed,
                })
                .collect(),
        }
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("document serializes");
    s.push('\n');
    s
}

pub fn save<T: Serialize>(doc: &T, path: &Path) -> Result<()> {
    crate::write_file(path, to_json(doc).as_bytes())
}

pub fn load_result(path: &Path) -> Result<ResultDocument> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        origin: path.display().to_string(),
        location: format!("{}:{}", e.line(), e.column()),
        message: e.to_string(),
    })
}
