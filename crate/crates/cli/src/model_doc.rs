use std::path::Path;

use infoflow_core::var_model::SIGMA_SYMMETRY_TOLERANCE;
use infoflow_core::VarModel;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_rate_hz: Option<f64>,
}

/// On-disk VAR model. `coeffs[l][i][j]` is entry (i, j) of `A(l + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub schema_version: u32,
    #[serde(rename = "K")]
    pub k: usize,
    pub p: usize,
    pub coeffs: Vec<Vec<Vec<f64>>>,
    pub sigma: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<ModelMetadata>,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().cloned().collect()).collect()
}

fn square(rows: &[Vec<f64>], k: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != k || rows.iter().any(|r| r.len() != k) {
        let shape: Vec<String> = rows.iter().map(|r| r.len().to_string()).collect();
        return Err(CliError::Config(format!(
            "{what} must be {k}x{k}, got {} rows of lengths [{}]",
            rows.len(),
            shape.join(", ")
        )));
    }
    Ok(DMatrix::from_fn(k, k, |i, j| rows[i][j]))
}

impl ModelDocument {
    pub fn from_model(model: &VarModel, metadata: Option<ModelMetadata>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            k: model.channels(),
            p: model.order(),
            coeffs: model.coeffs().iter().map(rows).collect(),
            sigma: rows(model.sigma()),
            metadata,
        }
    }

    /// Checks shapes against `K` and `p`, and symmetry of `sigma`, then builds the model.
    pub fn to_model(&self) -> Result<VarModel> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.coeffs.len() != self.p {
            return Err(CliError::Config(format!("p = {} but coeffs has {} lags", self.p, self.coeffs.len())));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(l, a)| square(a, self.k, &format!("coeffs[{l}]")))
            .collect::<Result<Vec<_>>>()?;
        let sigma = square(&self.sigma, self.k, "sigma")?;
        let asym = (&sigma - sigma.transpose()).amax();
        if asym > SIGMA_SYMMETRY_TOLERANCE {
            return Err(CliError::Config(format!(
                "sigma is not symmetric (max |sigma - sigma^T| = {asym:.3e})"
            )));
        }
        Ok(VarModel::new(coeffs, sigma)?)
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Parse {
            origin: origin.to_string(),
            location: format!("{}:{}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Canonical form: pretty-printed, fields in declaration order, trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model document serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::write_file(path, self.to_json().as_bytes())
    }
}
