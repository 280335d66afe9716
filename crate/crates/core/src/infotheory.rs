//! Mutual information rates from squared coherences.
//!
//! For jointly Gaussian stationary processes the mutual information rate is
//!
//! ```text
//! MIR(x, y) = −(1/4π) ∫_{−π}^{π} log(1 − |C_xy(ω)|²) dω      [nats / sample]
//! ```
//!
//! Integrands here are even in `ω`, so the integral is taken as twice the
//! composite trapezoid rule over the `[0, π]` grid. Squared coherences within
//! [`CLIP_EPSILON`] of 1 are clipped and counted instead of producing an
//! infinite rate.
//!
//! Applied to `|ιPDC_ij|²` this gives `MIR(w_i, η_j)` (innovation `i` against
//! the partialized process `j`); applied to `|ιDTF_ij|²` it gives
//! `MIR(x_i, ζ_j)` (observation `i` against the partialized innovation `j`).

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::measures::{coherence, idtf, ipdc, MeasureResult};
use crate::spectral::{evaluate_spectra, partialize, FrequencyGrid};
use crate::var_model::VarModel;

/// Squared coherences in `[1 − CLIP_EPSILON, 1]` are clipped to `1 − CLIP_EPSILON`.
pub const CLIP_EPSILON: f64 = 1e-12;

/// Tolerance on the coherence bound before a value is rejected as invalid.
pub const BOUND_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MirKind {
    /// Pairs `(w_i, η_j)` from information PDC.
    InformationPdc,
    /// Pairs `(x_i, ζ_j)` from information DTF.
    InformationDtf,
    /// Pairs `(x_i, x_j)` from ordinary coherence.
    Coherence,
}

impl MirKind {
    pub fn name(self) -> &'static str {
        match self {
            MirKind::InformationPdc => "ipdc",
            MirKind::InformationDtf => "idtf",
            MirKind::Coherence => "coh",
        }
    }
}

/// Result of integrating one squared-coherence profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirValue {
    pub nats: f64,
    /// Number of grid points that were clipped below 1.
    pub clipped: usize,
}

#[derive(Debug, Clone)]
pub struct MirMatrix {
    pub kind: MirKind,
    /// `values[(i, j)]` in nats per sample. For [`MirKind::Coherence`] the
    /// diagonal (self information, unbounded) is left at 0.
    pub values: DMatrix<f64>,
    pub grid: FrequencyGrid,
    pub clipped: usize,
}

/// Per-frequency information density `−(1/2π) log(1 − |C(ω)|²)` on `[0, π]`;
/// its trapezoid integral over the grid is the rate.
#[derive(Debug, Clone)]
pub struct InfoDensity {
    pub grid: FrequencyGrid,
    /// `values[f][(i, j)]`
    pub values: Vec<DMatrix<f64>>,
    pub clipped: usize,
}

/// Composite trapezoid rule over the grid points.
pub fn trapezoid(values: &[f64], grid: &FrequencyGrid) -> f64 {
    grid.points()
        .windows(2)
        .zip(values.windows(2))
        .map(|(w, v)| 0.5 * (w[1] - w[0]) * (v[0] + v[1]))
        .sum()
}

fn check_profile(coh_sq: &[f64], grid: &FrequencyGrid) -> Result<()> {
    if coh_sq.len() != grid.len() {
        return Err(Error::Structural(format!(
            "profile has {} points but grid has {}",
            coh_sq.len(),
            grid.len()
        )));
    }
    if !grid.covers_half_band() {
        return Err(Error::Domain("integration grid must span [0, π] with at least two points".into()));
    }
    Ok(())
}

/// `−log(1 − s)` with bound checking and clipping; returns `(value, clipped)`.
fn neg_log_complement(s: f64) -> Result<(f64, bool)> {
    if !s.is_finite() || s > 1.0 + BOUND_TOLERANCE || s < -BOUND_TOLERANCE {
        return Err(Error::Domain(format!("squared coherence {s} outside [0, 1]")));
    }
    let s = s.max(0.0);
    if s >= 1.0 - CLIP_EPSILON {
        Ok((-(CLIP_EPSILON).ln(), true))
    } else {
        Ok((-(-s).ln_1p(), false))
    }
}

pub fn info_density_profile(coh_sq: &[f64]) -> Result<(Vec<f64>, usize)> {
    let mut clipped = 0;
    let values = coh_sq
        .iter()
        .map(|&s| {
            let (v, c) = neg_log_complement(s)?;
            clipped += c as usize;
            Ok(v / (2.0 * PI))
        })
        .collect::<Result<_>>()?;
    Ok((values, clipped))
}

/// Gelfand–Yaglom rate of a squared-coherence profile sampled on `grid`.
pub fn mir_from_coherence(coh_sq: &[f64], grid: &FrequencyGrid) -> Result<MirValue> {
    check_profile(coh_sq, grid)?;
    let (density, clipped) = info_density_profile(coh_sq)?;
    Ok(MirValue { nats: trapezoid(&density, grid).max(0.0), clipped })
}

fn mir_matrix(result: &MeasureResult, kind: MirKind) -> Result<MirMatrix> {
    let k = result.channels();
    let mut values = DMatrix::zeros(k, k);
    let mut clipped = 0;
    for i in 0..k {
        for j in 0..k {
            if kind == MirKind::Coherence && i == j {
                continue;
            }
            let v = mir_from_coherence(&result.magnitude_sq(i, j), &result.grid)?;
            values[(i, j)] = v.nats;
            clipped += v.clipped;
        }
    }
    Ok(MirMatrix { kind, values, grid: result.grid.clone(), clipped })
}

/// `MIR(w_i, η_j)` for every pair.
pub fn mir_ipdc(model: &VarModel, grid: &FrequencyGrid) -> Result<MirMatrix> {
    let spectra = evaluate_spectra(model, grid)?;
    mir_matrix(&ipdc(&spectra), MirKind::InformationPdc)
}

/// `MIR(x_i, ζ_j)` for every pair.
pub fn mir_idtf(model: &VarModel, grid: &FrequencyGrid) -> Result<MirMatrix> {
    let spectra = evaluate_spectra(model, grid)?;
    let partial = partialize(&spectra)?;
    mir_matrix(&idtf(&spectra, &partial)?, MirKind::InformationDtf)
}

/// `MIR(x_i, x_j)` for every off-diagonal pair.
pub fn mir_coherence(model: &VarModel, grid: &FrequencyGrid) -> Result<MirMatrix> {
    let spectra = evaluate_spectra(model, grid)?;
    mir_matrix(&coherence(&spectra)?, MirKind::Coherence)
}

pub fn mir_from_measure(result: &MeasureResult, kind: MirKind) -> Result<MirMatrix> {
    mir_matrix(result, kind)
}

pub fn info_density(result: &MeasureResult) -> Result<InfoDensity> {
    let k = result.channels();
    let n = result.grid.len();
    let mut values = vec![DMatrix::zeros(k, k); n];
    let mut clipped = 0;
    for i in 0..k {
        for j in 0..k {
            let (d, c) = info_density_profile(&result.magnitude_sq(i, j))?;
            clipped += c;
            for (f, v) in d.into_iter().enumerate() {
                values[f][(i, j)] = v;
            }
        }
    }
    Ok(InfoDensity { grid: result.grid.clone(), values, clipped })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeProfile {
    /// `f(ω) = −log(1 − s(ω))`
    pub values: Vec<f64>,
    pub clipped: usize,
}

/// Pointwise map from a squared measure to the log-ratio form
/// `f(ω) = −log(1 − s(ω))`, so that `s = 1 − e^{−f}`. For two channels this is
/// the frequency-domain causality measure shared by the information PDC and DTF.
pub fn geweke_hosoya_bridge(measure_sq: &[f64]) -> Result<BridgeProfile> {
    let mut clipped = 0;
    let values = measure_sq
        .iter()
        .map(|&s| {
            let (v, c) = neg_log_complement(s)?;
            clipped += c as usize;
            Ok(v)
        })
        .collect::<Result<_>>()?;
    Ok(BridgeProfile { values, clipped })
}

/// Inverse of [`geweke_hosoya_bridge`]: `1 − e^{−f}`.
pub fn bridge_inverse(f: &[f64]) -> Vec<f64> {
    f.iter().map(|v| -(-v).exp_m1()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryCheck {
    pub passed: bool,
    pub max_deviation: f64,
}

/// Checks that the rate integrand built from `ιπ_ij` equals the one built from
/// its conjugate at every frequency, i.e. `MIR(w_i, η_j) = MIR(η_j, w_i)`.
pub fn mir_symmetry_check(model: &VarModel, grid: &FrequencyGrid, i: usize, j: usize) -> Result<SymmetryCheck> {
    let spectra = evaluate_spectra(model, grid)?;
    let values = ipdc(&spectra).series(i, j);
    let forward: Vec<f64> = values.iter().map(|z| z.norm_sqr()).collect();
    let backward: Vec<f64> = values.iter().map(|z| z.conj().norm_sqr()).collect();
    let (a, _) = info_density_profile(&forward)?;
    let (b, _) = info_density_profile(&backward)?;
    let max_deviation = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(SymmetryCheck { passed: max_deviation <= 1e-15, max_deviation })
}
