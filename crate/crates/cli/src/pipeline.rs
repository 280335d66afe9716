use std::collections::BTreeMap;
use std::str::FromStr;

use infoflow_core::infotheory::{mir_from_measure, MirKind};
use infoflow_core::measures::measure;
use infoflow_core::oracles::VerifyConfig;
use infoflow_core::{
    coherence, estimate, evaluate_spectra, idtf, ipdc, partialize, select_order, verify, FrequencyGrid,
    MeasureKind, OrderCriterion, TimeSeriesData, VarModel,
};

use crate::error::{CliError, Result};
use crate::model_doc::{ModelDocument, ModelMetadata};
use crate::result_doc::{Diagnostics, GridDocument, MeasureDocument, MirDocument, ResultDocument, Units, VerifyDocument};
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderChoice {
    Fixed(usize),
    Select { max_order: usize, criterion: OrderCriterion },
}

pub fn parse_measures(names: &[String]) -> Result<Vec<MeasureKind>> {
    let mut kinds = Vec::new();
    for n in names {
        let k = MeasureKind::from_str(n).map_err(|e| match e {
            infoflow_core::Error::Domain(m) => CliError::Config(m),
            other => other.into(),
        })?;
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }
    if kinds.is_empty() {
        return Err(CliError::Config("no measures requested".into()));
    }
    Ok(kinds)
}

pub fn parse_mir_kinds(names: &[String]) -> Result<Vec<MirKind>> {
    let mut kinds = Vec::new();
    for n in names {
        let k = match n.trim().to_ascii_lowercase().as_str() {
            "ipdc" => MirKind::InformationPdc,
            "idtf" => MirKind::InformationDtf,
            "coh" => MirKind::Coherence,
            other => return Err(CliError::Config(format!("unknown MIR kind '{other}' (expected ipdc, idtf or coh)"))),
        };
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }
    if kinds.is_empty() {
        return Err(CliError::Config("no MIR kinds requested".into()));
    }
    Ok(kinds)
}

/// Fits a model and returns it with the order used.
pub fn fit(data: &TimeSeriesData, order: OrderChoice) -> Result<(VarModel, usize)> {
    let p = match order {
        OrderChoice::Fixed(p) => p,
        OrderChoice::Select { max_order, criterion } => select_order(data, max_order, criterion)?,
    };
    Ok((estimate(data, p)?, p))
}

pub fn fitted_document(model: &VarModel, sample_rate_hz: Option<f64>) -> ModelDocument {
    ModelDocument::from_model(model, Some(ModelMetadata { name: Some("fitted".into()), sample_rate_hz }))
}

fn grid(n_points: usize) -> Result<FrequencyGrid> {
    if n_points < 2 {
        return Err(CliError::Config(format!("--nfreq must be at least 2, got {n_points}")));
    }
    Ok(FrequencyGrid::uniform(n_points)?)
}

#[derive(Debug, Clone)]
pub struct MeasureRequest {
    pub kinds: Vec<MeasureKind>,
    pub n_points: usize,
    pub sample_rate_hz: Option<f64>,
    pub magnitude_sq: bool,
}

/// Refuses unstable models or a non positive definite `Σ_w`.
pub fn run_measure(doc: &ModelDocument, req: &MeasureRequest) -> Result<ResultDocument> {
    let model = doc.to_model()?;
    let report = model.ensure_usable()?;
    let grid = grid(req.n_points)?;
    let spectra = evaluate_spectra(&model, &grid)?;
    let partial = partialize(&spectra)?;
    let mut measures = BTreeMap::new();
    for &kind in &req.kinds {
        let r = measure(&spectra, &partial, kind)?;
        measures.insert(kind.name().to_string(), MeasureDocument::new(&r, req.magnitude_sq));
    }
    Ok(ResultDocument {
        schema_version: SCHEMA_VERSION,
        command: "measure".into(),
        model: doc.clone(),
        grid: GridDocument::new(&grid, req.sample_rate_hz),
        measures,
        mir: BTreeMap::new(),
        diagnostics: Diagnostics { spectral_radius: report.spectral_radius, clip_counts: BTreeMap::new() },
    })
}

#[derive(Debug, Clone)]
pub struct MirRequest {
    pub kinds: Vec<MirKind>,
    pub n_points: usize,
    pub sample_rate_hz: Option<f64>,
    pub units: Units,
}

pub fn run_mir(doc: &ModelDocument, req: &MirRequest) -> Result<ResultDocument> {
    let model = doc.to_model()?;
    let report = model.ensure_usable()?;
    let grid = grid(req.n_points)?;
    let spectra = evaluate_spectra(&model, &grid)?;
    let mut mir = BTreeMap::new();
    let mut clip_counts = BTreeMap::new();
    for &kind in &req.kinds {
        let source = match kind {
            MirKind::InformationPdc => ipdc(&spectra),
            MirKind::InformationDtf => idtf(&spectra, &partialize(&spectra)?)?,
            MirKind::Coherence => coherence(&spectra)?,
        };
        let m = mir_from_measure(&source, kind)?;
        clip_counts.insert(kind.name().to_string(), m.clipped);
        mir.insert(kind.name().to_string(), MirDocument::new(&m, req.units));
    }
    Ok(ResultDocument {
        schema_version: SCHEMA_VERSION,
        command: "mir".into(),
        model: doc.clone(),
        grid: GridDocument::new(&grid, req.sample_rate_hz),
        measures: BTreeMap::new(),
        mir,
        diagnostics: Diagnostics { spectral_radius: report.spectral_radius, clip_counts },
    })
}

/// Runs the oracle suite. A failed check is returned as a document, not an error.
pub fn run_verify(config: &VerifyConfig) -> Result<VerifyDocument> {
    if config.models == 0 {
        return Err(CliError::Config("--models must be at least 1".into()));
    }
    grid(config.grid_points)?;
    Ok(VerifyDocument::new(&verify(config)?))
}
