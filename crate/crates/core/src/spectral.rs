//! Frequency-domain objects of a VAR model on a grid over `[0, π]`.
//!
//! For each frequency `ω`:
//!
//! * `Ā(ω) = I − Σ_l A(l) e^{−iωl}`
//! * `H̄(ω) = Ā(ω)^{-1}`, the moving-average transfer matrix
//! * `S(ω) = H̄ Σ_w H̄^H`, the spectral density matrix
//! * `S^{-1}(ω) = Ā^H Σ_w^{-1} Ā`
//!
//! Spectra of real processes are even in `ω`, so the grid only spans `[0, π]`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    condition_number, hermitian_part, others, select, select_real, spd_inverse, to_complex, CMatrix,
    CONDITION_LIMIT,
};
use crate::var_model::VarModel;

pub const DEFAULT_GRID_POINTS: usize = 512;

/// Strictly increasing frequencies (radians per sample) inside `[0, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

impl FrequencyGrid {
    /// `n` evenly spaced points from 0 to π inclusive. A single point grid is `[0]`.
    pub fn uniform(n: usize) -> Result<Self> {
        match n {
            0 => Err(Error::Domain("frequency grid needs at least one point".into())),
            1 => Ok(Self { points: vec![0.0] }),
            _ => {
                let step = PI / (n - 1) as f64;
                let mut points: Vec<f64> = (0..n).map(|k| k as f64 * step).collect();
                points[n - 1] = PI;
                Ok(Self { points })
            }
        }
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("frequency grid needs at least one point".into()));
        }
        if points.iter().any(|w| !(0.0..=PI).contains(w)) {
            return Err(Error::Domain("grid points must lie in [0, π]".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("grid points must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True when the grid spans the full half band, as needed for integration.
    pub fn covers_half_band(&self) -> bool {
        self.points.len() >= 2 && self.points[0] == 0.0 && *self.points.last().unwrap() == PI
    }
}

/// `Ā(ω) = I − Σ_l A(l) e^{−iωl}` for a single frequency.
pub fn a_bar(model: &VarModel, omega: f64) -> CMatrix {
    let k = model.channels();
    let mut m = CMatrix::identity(k, k);
    for (l, a) in model.coeffs().iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -omega * (l + 1) as f64);
        m -= to_complex(a) * phase;
    }
    m
}

#[derive(Debug, Clone)]
pub struct SpectralSet {
    pub grid: FrequencyGrid,
    pub a_bar: Vec<CMatrix>,
    pub h_bar: Vec<CMatrix>,
    pub s: Vec<CMatrix>,
    pub s_inv: Vec<CMatrix>,
    sigma: DMatrix<f64>,
    sigma_inv: DMatrix<f64>,
}

impl SpectralSet {
    pub fn channels(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn sigma_inv(&self) -> &DMatrix<f64> {
        &self.sigma_inv
    }

    /// Real autospectrum `S_{x_i x_i}(ω_f)`.
    pub fn autospectrum(&self, f: usize, i: usize) -> f64 {
        self.s[f][(i, i)].re
    }
}

pub fn evaluate_spectra(model: &VarModel, grid: &FrequencyGrid) -> Result<SpectralSet> {
    model.ensure_usable()?;
    let sigma = model.sigma().clone();
    let sigma_inv = spd_inverse(&sigma).ok_or(Error::SigmaNotPositiveDefinite)?;
    let sigma_c = to_complex(&sigma);
    let sigma_inv_c = to_complex(&sigma_inv);

    let per_freq: Vec<(CMatrix, CMatrix, CMatrix, CMatrix)> = grid
        .points()
        .par_iter()
        .map(|&omega| {
            let a = a_bar(model, omega);
            let condition = condition_number(&a);
            if !(condition <= CONDITION_LIMIT) {
                return Err(Error::SingularTransfer { omega, condition });
            }
            let h = a
                .clone()
                .lu()
                .try_inverse()
                .ok_or(Error::SingularTransfer { omega, condition })?;
            let s = hermitian_part(&(&h * &sigma_c * h.adjoint()));
            let s_inv = hermitian_part(&(a.adjoint() * &sigma_inv_c * &a));
            Ok((a, h, s, s_inv))
        })
        .collect::<Result<_>>()?;

    let n = per_freq.len();
    let (mut a_bar_v, mut h_bar_v, mut s_v, mut s_inv_v) =
        (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for (a, h, s, si) in per_freq {
        a_bar_v.push(a);
        h_bar_v.push(h);
        s_v.push(s);
        s_inv_v.push(si);
    }
    Ok(SpectralSet {
        grid: grid.clone(),
        a_bar: a_bar_v,
        h_bar: h_bar_v,
        s: s_v,
        s_inv: s_inv_v,
        sigma,
        sigma_inv,
    })
}

/// Innovation covariance pieces used to form `ρ_jj` for one channel.
#[derive(Debug, Clone)]
pub struct InnovationPartition {
    /// Covariances of `w_j` with the remaining innovations, in ascending channel order.
    pub cross: DVector<f64>,
    /// Covariance matrix of the remaining innovations.
    pub rest: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct PartializationSet {
    /// `partial_spectra[f][k]`: spectrum of the partialized process `η_k` at grid point `f`.
    pub partial_spectra: Vec<Vec<f64>>,
    /// `wiener_filters[f][k]`: row vector `s_{x_k x^k} S^{-1}_{x^k x^k}`, ordered by the
    /// remaining channels ascending.
    pub wiener_filters: Vec<Vec<DVector<Complex64>>>,
    /// Variance of the partialized innovation `ζ_j`.
    pub rho: Vec<f64>,
    pub sigma_partitions: Vec<InnovationPartition>,
}

pub fn partialize(spectra: &SpectralSet) -> Result<PartializationSet> {
    let k = spectra.channels();
    let sigma = spectra.sigma();

    let mut rho = Vec::with_capacity(k);
    let mut sigma_partitions = Vec::with_capacity(k);
    for j in 0..k {
        let rest_idx = others(k, j);
        let cross = DVector::from_iterator(rest_idx.len(), rest_idx.iter().map(|&l| sigma[(j, l)]));
        let rest = select_real(sigma, &rest_idx, &rest_idx);
        let r = if rest_idx.is_empty() {
            sigma[(j, j)]
        } else {
            let rest_inv = spd_inverse(&rest).ok_or(Error::SigmaNotPositiveDefinite)?;
            sigma[(j, j)] - (cross.transpose() * rest_inv * &cross)[(0, 0)]
        };
        rho.push(r);
        sigma_partitions.push(InnovationPartition { cross, rest });
    }

    let per_freq: Vec<(Vec<f64>, Vec<DVector<Complex64>>)> = spectra
        .s
        .par_iter()
        .zip(spectra.grid.points().par_iter())
        .map(|(s, &omega)| {
            let mut partial = Vec::with_capacity(k);
            let mut filters = Vec::with_capacity(k);
            for ch in 0..k {
                let rest_idx = others(k, ch);
                if rest_idx.is_empty() {
                    partial.push(s[(ch, ch)].re);
                    filters.push(DVector::zeros(0));
                    continue;
                }
                let row = select(s, &[ch], &rest_idx);
                let col = select(s, &rest_idx, &[ch]);
                let block = select(s, &rest_idx, &rest_idx);
                if condition_number(&block) > CONDITION_LIMIT {
                    return Err(Error::SingularBlock { channel: ch, omega });
                }
                let block_inv = block
                    .lu()
                    .try_inverse()
                    .ok_or(Error::SingularBlock { channel: ch, omega })?;
                let g = &row * block_inv;
                let value = s[(ch, ch)] - (&g * col)[(0, 0)];
                partial.push(value.re);
                filters.push(DVector::from_iterator(g.len(), g.iter().cloned()));
            }
            Ok((partial, filters))
        })
        .collect::<Result<_>>()?;

    let (partial_spectra, wiener_filters) = per_freq.into_iter().unzip();
    Ok(PartializationSet { partial_spectra, wiener_filters, rho, sigma_partitions })
}

/// Partial spectrum of channel `j` as `1 / (ā_j^H Σ_w^{-1} ā_j)`, one value per grid point.
///
/// This is computed from `Ā` alone and is independent of the block elimination
/// in [`partialize`]; the two must agree.
pub fn partial_spectrum_via_lemma(spectra: &SpectralSet, j: usize) -> Vec<f64> {
    spectra
        .a_bar
        .iter()
        .map(|a| 1.0 / inverse_weighted_column_norm(a, spectra.sigma_inv(), j))
        .collect()
}

/// `ā_j^H W ā_j` for a real symmetric weight `W`.
pub(crate) fn inverse_weighted_column_norm(a: &CMatrix, weight: &DMatrix<f64>, j: usize) -> f64 {
    let k = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..k {
        for c in 0..k {
            acc += a[(r, j)].conj() * weight[(r, c)] * a[(c, j)];
        }
    }
    acc.re
}
