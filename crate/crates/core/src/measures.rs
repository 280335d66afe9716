//! Connectivity measures on a [`SpectralSet`].
//!
//! Every result stores the complex value for target `i` and source `j` at
//! `values[f][(i, j)]`. The PDC family normalises the columns of `Ā`, the DTF
//! family the rows of `H̄`; the information forms weight by the full
//! innovation covariance and are scale invariant.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::spectral::{
    evaluate_spectra, inverse_weighted_column_norm, partialize, FrequencyGrid, PartializationSet,
    SpectralSet,
};
use crate::var_model::VarModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MeasureKind {
    Coherence,
    Pdc,
    GeneralizedPdc,
    InformationPdc,
    Dtf,
    DirectedCoherence,
    InformationDtf,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 7] = [
        MeasureKind::Coherence,
        MeasureKind::Pdc,
        MeasureKind::GeneralizedPdc,
        MeasureKind::InformationPdc,
        MeasureKind::Dtf,
        MeasureKind::DirectedCoherence,
        MeasureKind::InformationDtf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Coherence => "coh",
            MeasureKind::Pdc => "pdc",
            MeasureKind::GeneralizedPdc => "gpdc",
            MeasureKind::InformationPdc => "ipdc",
            MeasureKind::Dtf => "dtf",
            MeasureKind::DirectedCoherence => "dc",
            MeasureKind::InformationDtf => "idtf",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Domain(format!("unknown measure '{s}' (expected one of coh, pdc, gpdc, ipdc, dtf, dc, idtf)")))
    }
}

#[derive(Debug, Clone)]
pub struct MeasureResult {
    pub kind: MeasureKind,
    pub grid: FrequencyGrid,
    pub values: Vec<CMatrix>,
}

impl MeasureResult {
    pub fn channels(&self) -> usize {
        self.values.first().map_or(0, |m| m.nrows())
    }

    /// Values for target `i` and source `j` across the grid.
    pub fn series(&self, i: usize, j: usize) -> Vec<Complex64> {
        self.values.iter().map(|m| m[(i, j)]).collect()
    }

    pub fn magnitude_sq(&self, i: usize, j: usize) -> Vec<f64> {
        self.values.iter().map(|m| m[(i, j)].norm_sqr()).collect()
    }

    /// Largest `|value|` over the grid for the pair `(i, j)`.
    pub fn max_abs(&self, i: usize, j: usize) -> f64 {
        self.values.iter().map(|m| m[(i, j)].norm()).fold(0.0, f64::max)
    }
}

fn build(spectra: &SpectralSet, kind: MeasureKind, f: impl Fn(usize, usize, usize) -> Complex64) -> MeasureResult {
    let k = spectra.channels();
    let values = (0..spectra.grid.len())
        .map(|fi| CMatrix::from_fn(k, k, |i, j| f(fi, i, j)))
        .collect();
    MeasureResult { kind, grid: spectra.grid.clone(), values }
}

fn check_autospectra(spectra: &SpectralSet) -> Result<()> {
    for (f, &omega) in spectra.grid.points().iter().enumerate() {
        for i in 0..spectra.channels() {
            if !(spectra.autospectrum(f, i) > 0.0) {
                return Err(Error::ZeroAutospectrum { channel: i, omega });
            }
        }
    }
    Ok(())
}

/// Ordinary coherence `S_ij / sqrt(S_ii S_jj)`.
pub fn coherence(spectra: &SpectralSet) -> Result<MeasureResult> {
    check_autospectra(spectra)?;
    Ok(build(spectra, MeasureKind::Coherence, |f, i, j| {
        if i == j {
            return Complex64::new(1.0, 0.0);
        }
        let s = &spectra.s[f];
        s[(i, j)] / (s[(i, i)].re * s[(j, j)].re).sqrt()
    }))
}

/// Information PDC: `Ā_ij σ_ii^{-1/2} / sqrt(ā_j^H Σ_w^{-1} ā_j)`.
pub fn ipdc(spectra: &SpectralSet) -> MeasureResult {
    let sigma = spectra.sigma();
    let sigma_inv = spectra.sigma_inv();
    let k = spectra.channels();
    let norms: Vec<Vec<f64>> = spectra
        .a_bar
        .iter()
        .map(|a| (0..k).map(|j| inverse_weighted_column_norm(a, sigma_inv, j).sqrt()).collect())
        .collect();
    build(spectra, MeasureKind::InformationPdc, |f, i, j| {
        spectra.a_bar[f][(i, j)] / (sigma[(i, i)].sqrt() * norms[f][j])
    })
}

/// Information PDC written through the partial spectrum,
/// `Ā_ij σ_ii^{-1/2} sqrt(S_{η_j η_j})`. Agrees with [`ipdc`].
pub fn ipdc_via_partial_spectra(spectra: &SpectralSet, partial: &PartializationSet) -> MeasureResult {
    let sigma = spectra.sigma();
    build(spectra, MeasureKind::InformationPdc, |f, i, j| {
        spectra.a_bar[f][(i, j)] * (partial.partial_spectra[f][j] / sigma[(i, i)]).sqrt()
    })
}

/// Classical PDC (`kind = Pdc`) or generalised PDC (`kind = GeneralizedPdc`).
pub fn pdc_family(spectra: &SpectralSet, kind: MeasureKind) -> Result<MeasureResult> {
    let k = spectra.channels();
    let sigma = spectra.sigma();
    let weights: Vec<f64> = match kind {
        MeasureKind::Pdc => vec![1.0; k],
        MeasureKind::GeneralizedPdc => (0..k).map(|i| 1.0 / sigma[(i, i)]).collect(),
        other => return Err(Error::Domain(format!("{other} is not a PDC-family measure"))),
    };
    let norms: Vec<Vec<f64>> = spectra
        .a_bar
        .iter()
        .map(|a| {
            (0..k)
                .map(|j| (0..k).map(|r| weights[r] * a[(r, j)].norm_sqr()).sum::<f64>().sqrt())
                .collect()
        })
        .collect();
    Ok(build(spectra, kind, |f, i, j| spectra.a_bar[f][(i, j)] * weights[i].sqrt() / norms[f][j]))
}

/// Information DTF: `H̄_ij ρ_jj^{1/2} / sqrt(h̄_i^H Σ_w h̄_i)`, where `h̄_i` is row
/// `i` of `H̄`, so the denominator is the target autospectrum `S_{x_i x_i}`.
pub fn idtf(spectra: &SpectralSet, partial: &PartializationSet) -> Result<MeasureResult> {
    let k = spectra.channels();
    let sigma = spectra.sigma();
    let mut denoms = Vec::with_capacity(spectra.grid.len());
    for (h, &omega) in spectra.h_bar.iter().zip(spectra.grid.points()) {
        let row: Vec<f64> = (0..k)
            .map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..k {
                    for c in 0..k {
                        acc += h[(i, r)].conj() * sigma[(r, c)] * h[(i, c)];
                    }
                }
                acc.re
            })
            .collect();
        if let Some(i) = row.iter().position(|v| !(*v > 0.0)) {
            return Err(Error::ZeroAutospectrum { channel: i, omega });
        }
        denoms.push(row.into_iter().map(f64::sqrt).collect::<Vec<_>>());
    }
    let rho_sqrt: Vec<f64> = partial.rho.iter().map(|r| r.sqrt()).collect();
    Ok(build(spectra, MeasureKind::InformationDtf, |f, i, j| {
        spectra.h_bar[f][(i, j)] * rho_sqrt[j] / denoms[f][i]
    }))
}

/// Classical DTF (`kind = Dtf`) or directed coherence (`kind = DirectedCoherence`).
pub fn dtf_family(spectra: &SpectralSet, kind: MeasureKind) -> Result<MeasureResult> {
    let k = spectra.channels();
    let sigma = spectra.sigma();
    let weights: Vec<f64> = match kind {
        MeasureKind::Dtf => vec![1.0; k],
        MeasureKind::DirectedCoherence => (0..k).map(|j| sigma[(j, j)]).collect(),
        other => return Err(Error::Domain(format!("{other} is not a DTF-family measure"))),
    };
    let mut norms = Vec::with_capacity(spectra.grid.len());
    for (h, &omega) in spectra.h_bar.iter().zip(spectra.grid.points()) {
        let row: Vec<f64> = (0..k)
            .map(|i| (0..k).map(|c| weights[c] * h[(i, c)].norm_sqr()).sum::<f64>().sqrt())
            .collect();
        if let Some(i) = row.iter().position(|v| !(*v > 0.0)) {
            return Err(Error::ZeroAutospectrum { channel: i, omega });
        }
        norms.push(row);
    }
    Ok(build(spectra, kind, |f, i, j| spectra.h_bar[f][(i, j)] * weights[j].sqrt() / norms[f][i]))
}

/// Computes a single measure from precomputed spectra.
pub fn measure(spectra: &SpectralSet, partial: &PartializationSet, kind: MeasureKind) -> Result<MeasureResult> {
    match kind {
        MeasureKind::Coherence => coherence(spectra),
        MeasureKind::Pdc | MeasureKind::GeneralizedPdc => pdc_family(spectra, kind),
        MeasureKind::InformationPdc => Ok(ipdc(spectra)),
        MeasureKind::Dtf | MeasureKind::DirectedCoherence => dtf_family(spectra, kind),
        MeasureKind::InformationDtf => idtf(spectra, partial),
    }
}

/// All seven measures from one spectral evaluation.
pub fn all_measures(model: &VarModel, grid: &FrequencyGrid) -> Result<BTreeMap<MeasureKind, MeasureResult>> {
    let spectra = evaluate_spectra(model, grid)?;
    let partial = partialize(&spectra)?;
    MeasureKind::ALL
        .into_iter()
        .map(|kind| measure(&spectra, &partial, kind).map(|r| (kind, r)))
        .collect()
}
