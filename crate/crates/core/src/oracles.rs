//! Independent computations used to check the connectivity measures.
//!
//! The functions here never call the measure formulas. Instead they build the
//! coherence between the underlying processes from cross spectra:
//!
//! * [`theorem1_rhs`] forms `C_{w_i η_j}` from `S_{w_i η_j} = Σ_l Ā_il S_{x_l η_j}`,
//!   keeping every term of the sum, and the partial spectrum from the same
//!   block elimination. It must equal information PDC.
//! * [`theorem2_rhs`] forms `C_{x_i ζ_j}` from the explicit regression vector of
//!   `ζ_j` on the other innovations. It must equal information DTF.
//!
//! Fixtures reproduce the two worked examples: a two channel chain
//! `x1 → x2` with gain `α` and its three channel extension `x1 → x2 → x3`
//! with gains `α`, `β`, both with unit innovation covariance.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff, others, select, select_real, CMatrix};
use crate::measures::{idtf, ipdc};
use crate::spectral::{
    evaluate_spectra, partial_spectrum_via_lemma, partialize, FrequencyGrid, SpectralSet,
};
use crate::var_model::VarModel;

/// Bound applied to every identity checked by [`verify`].
pub const IDENTITY_BOUND: f64 = 1e-10;

/// Per-frequency pieces of the partialized process `η_j`.
struct PartialCross {
    /// `S_{x_l η_j}` for every `l`, i.e. the bracketed terms of the full expansion.
    x_eta: Vec<Complex64>,
    /// `S_{η_j η_j}`
    eta_eta: f64,
}

fn partial_cross(s: &CMatrix, j: usize, omega: f64) -> Result<PartialCross> {
    let k = s.nrows();
    let rest = others(k, j);
    if rest.is_empty() {
        return Ok(PartialCross { x_eta: vec![s[(j, j)]], eta_eta: s[(j, j)].re });
    }
    let block = select(s, &rest, &rest);
    let col = select(s, &rest, &[j]);
    // v = S^{-1}_{x^j x^j} s_{x^j x_j}
    let v = block
        .lu()
        .solve(&col)
        .ok_or(Error::SingularBlock { channel: j, omega })?;
    let x_eta: Vec<Complex64> = (0..k)
        .map(|l| {
            let row = select(s, &[l], &rest);
            s[(l, j)] - (row * &v)[(0, 0)]
        })
        .collect();
    let eta_eta = x_eta[j].re;
    Ok(PartialCross { x_eta, eta_eta })
}

fn check_pair(k: usize, i: usize, j: usize) -> Result<()> {
    if i >= k || j >= k {
        return Err(Error::Structural(format!("channel pair ({i}, {j}) out of range for K = {k}")));
    }
    Ok(())
}

/// Coherence `C_{w_i η_j}(ω)` between innovation `i` and the partialized process `j`.
pub fn theorem1_rhs(model: &VarModel, grid: &FrequencyGrid, i: usize, j: usize) -> Result<Vec<Complex64>> {
    let spectra = evaluate_spectra(model, grid)?;
    theorem1_rhs_from(&spectra, i, j)
}

pub fn theorem1_rhs_from(spectra: &SpectralSet, i: usize, j: usize) -> Result<Vec<Complex64>> {
    check_pair(spectra.channels(), i, j)?;
    let sigma_ii = spectra.sigma()[(i, i)];
    spectra
        .s
        .iter()
        .zip(&spectra.a_bar)
        .zip(spectra.grid.points())
        .map(|((s, a), &omega)| {
            let pc = partial_cross(s, j, omega)?;
            let s_w_eta: Complex64 = (0..s.nrows()).map(|l| a[(i, l)] * pc.x_eta[l]).sum();
            Ok(s_w_eta / (sigma_ii * pc.eta_eta).sqrt())
        })
        .collect()
}

/// Largest normalised residual `|S_{x_l η_j}| / sqrt(S_ll S_jj)` over `l ≠ j`
/// and the grid. The partialized process is orthogonal to every other channel,
/// so this should vanish.
pub fn orthogonality_residual(spectra: &SpectralSet, j: usize) -> Result<f64> {
    let k = spectra.channels();
    let mut worst: f64 = 0.0;
    for (s, &omega) in spectra.s.iter().zip(spectra.grid.points()) {
        let pc = partial_cross(s, j, omega)?;
        for l in others(k, j) {
            let scale = (s[(l, l)].re * s[(j, j)].re).sqrt();
            worst = worst.max(pc.x_eta[l].norm() / scale);
        }
    }
    Ok(worst)
}

/// Max deviation between `Ā_ij(ω)` and `S_{w_i η_j}(ω) / S_{η_j η_j}(ω)`.
pub fn transfer_function_identity(model: &VarModel, grid: &FrequencyGrid, i: usize, j: usize) -> Result<f64> {
    let spectra = evaluate_spectra(model, grid)?;
    transfer_function_identity_from(&spectra, i, j)
}

pub fn transfer_function_identity_from(spectra: &SpectralSet, i: usize, j: usize) -> Result<f64> {
    check_pair(spectra.channels(), i, j)?;
    let mut worst: f64 = 0.0;
    for ((s, a), &omega) in spectra.s.iter().zip(&spectra.a_bar).zip(spectra.grid.points()) {
        let pc = partial_cross(s, j, omega)?;
        let s_w_eta: Complex64 = (0..s.nrows()).map(|l| a[(i, l)] * pc.x_eta[l]).sum();
        worst = worst.max((a[(i, j)] - s_w_eta / pc.eta_eta).norm());
    }
    Ok(worst)
}

/// Coefficients `c` with `ζ_j = c^T w`: `c_j = 1`, the rest are minus the
/// regression of `w_j` on the other same-time innovations.
fn zeta_weights(sigma: &DMatrix<f64>, j: usize) -> Result<DVector<f64>> {
    let k = sigma.nrows();
    let rest = others(k, j);
    let mut c = DVector::zeros(k);
    c[j] = 1.0;
    if rest.is_empty() {
        return Ok(c);
    }
    let block = select_real(sigma, &rest, &rest);
    let cross = select_real(sigma, &rest, &[j]);
    let beta = block.lu().solve(&cross).ok_or(Error::SigmaNotPositiveDefinite)?;
    for (m, &l) in rest.iter().enumerate() {
        c[l] = -beta[(m, 0)];
    }
    Ok(c)
}

/// Coherence `C_{x_i ζ_j}(ω)` between observation `i` and the partialized innovation `j`.
pub fn theorem2_rhs(model: &VarModel, grid: &FrequencyGrid, i: usize, j: usize) -> Result<Vec<Complex64>> {
    let spectra = evaluate_spectra(model, grid)?;
    theorem2_rhs_from(&spectra, i, j)
}

pub fn theorem2_rhs_from(spectra: &SpectralSet, i: usize, j: usize) -> Result<Vec<Complex64>> {
    check_pair(spectra.channels(), i, j)?;
    let sigma = spectra.sigma();
    let c = zeta_weights(sigma, j)?;
    // E[w_l ζ_j] for every l
    let w_zeta = sigma * &c;
    let zeta_var = c.dot(&w_zeta);
    Ok(spectra
        .s
        .iter()
        .zip(&spectra.h_bar)
        .map(|(s, h)| {
            let s_x_zeta: Complex64 = (0..s.nrows()).map(|l| h[(i, l)] * w_zeta[l]).sum();
            s_x_zeta / (s[(i, i)].re * zeta_var).sqrt()
        })
        .collect())
}

/// Worked-example models with closed-form connectivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fixture {
    /// `x1(n) = w1(n)`, `x2(n) = α x1(n−1) + w2(n)`, `Σ_w = I`.
    TwoVarAlpha { alpha: f64 },
    /// The two-variable chain extended with `x3(n) = β x2(n−1) + w3(n)`.
    ThreeVarAlphaBeta { alpha: f64, beta: f64 },
}

/// Closed-form values of a fixture on a grid, keyed by zero-based `(target, source)`.
#[derive(Debug, Clone)]
pub struct ExpectedTables {
    pub ipdc: BTreeMap<(usize, usize), Vec<Complex64>>,
    pub idtf: BTreeMap<(usize, usize), Vec<Complex64>>,
    /// `autospectra[f][i]`
    pub autospectra: Vec<Vec<f64>>,
    /// Full spectral matrix, two-variable fixture only.
    pub spectrum: Option<Vec<CMatrix>>,
    /// `partial_spectra[f][k]`, two-variable fixture only.
    pub partial_spectra: Option<Vec<Vec<f64>>>,
    pub rho: Vec<f64>,
}

impl Fixture {
    pub const NAMES: [&'static str; 2] = ["two_var_alpha", "three_var_alpha_beta"];

    pub fn from_name(name: &str, params: &[f64]) -> Result<Self> {
        if params.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("fixture parameters must be finite".into()));
        }
        match (name, params) {
            ("two_var_alpha", [alpha]) => Ok(Fixture::TwoVarAlpha { alpha: *alpha }),
            ("three_var_alpha_beta", [alpha, beta]) => Ok(Fixture::ThreeVarAlphaBeta { alpha: *alpha, beta: *beta }),
            ("two_var_alpha" | "three_var_alpha_beta", _) => Err(Error::Domain(format!(
                "fixture '{name}' got {} parameters",
                params.len()
            ))),
            _ => Err(Error::UnknownFixture(name.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Fixture::TwoVarAlpha { .. } => Self::NAMES[0],
            Fixture::ThreeVarAlphaBeta { .. } => Self::NAMES[1],
        }
    }

    pub fn model(&self) -> VarModel {
        let (k, entries) = match *self {
            Fixture::TwoVarAlpha { alpha } => (2, vec![((1, 0), alpha)]),
            Fixture::ThreeVarAlphaBeta { alpha, beta } => (3, vec![((1, 0), alpha), ((2, 1), beta)]),
        };
        let mut a = DMatrix::zeros(k, k);
        for ((i, j), v) in entries {
            a[(i, j)] = v;
        }
        VarModel::new(vec![a], DMatrix::identity(k, k)).expect("fixture shapes are consistent")
    }

    pub fn expected(&self, grid: &FrequencyGrid) -> ExpectedTables {
        let pts = grid.points();
        let zero = vec![Complex64::new(0.0, 0.0); pts.len()];
        let table = |f: &dyn Fn(f64) -> Complex64| pts.iter().map(|&w| f(w)).collect::<Vec<_>>();
        match *self {
            Fixture::TwoVarAlpha { alpha } => {
                let a2 = alpha * alpha;
                let mut ipdc = BTreeMap::new();
                ipdc.insert((1, 0), table(&|w| -Complex64::from_polar(alpha, -w) / (1.0 + a2).sqrt()));
                ipdc.insert((0, 1), zero.clone());
                let mut idtf = BTreeMap::new();
                idtf.insert((1, 0), table(&|w| Complex64::from_polar(alpha, -w) / (1.0 + a2).sqrt()));
                idtf.insert((0, 1), zero);
                let spectrum = pts
                    .iter()
                    .map(|&w| {
                        CMatrix::from_row_slice(
                            2,
                            2,
                            &[
                                Complex64::new(1.0, 0.0),
                                Complex64::from_polar(alpha, w),
                                Complex64::from_polar(alpha, -w),
                                Complex64::new(1.0 + a2, 0.0),
                            ],
                        )
                    })
                    .collect();
                ExpectedTables {
                    ipdc,
                    idtf,
                    autospectra: vec![vec![1.0, 1.0 + a2]; pts.len()],
                    spectrum: Some(spectrum),
                    partial_spectra: Some(vec![vec![1.0 / (1.0 + a2), 1.0]; pts.len()]),
                    rho: vec![1.0, 1.0],
                }
            }
            Fixture::ThreeVarAlphaBeta { alpha, beta } => {
                let (a2, b2) = (alpha * alpha, beta * beta);
                let s33 = 1.0 + b2 + a2 * b2;
                let mut ipdc = BTreeMap::new();
                ipdc.insert((1, 0), table(&|w| -Complex64::from_polar(alpha, -w) / (1.0 + a2).sqrt()));
                ipdc.insert((2, 1), table(&|w| -Complex64::from_polar(beta, -w) / (1.0 + b2).sqrt()));
                ipdc.insert((2, 0), zero.clone());
                let mut idtf = BTreeMap::new();
                idtf.insert((1, 0), table(&|w| Complex64::from_polar(alpha, -w) / (1.0 + a2).sqrt()));
                idtf.insert((2, 1), table(&|w| Complex64::from_polar(beta, -w) / s33.sqrt()));
                idtf.insert((2, 0), table(&|w| Complex64::from_polar(alpha * beta, -2.0 * w) / s33.sqrt()));
                for (k, l) in [(0, 1), (0, 2), (1, 2)] {
                    ipdc.insert((k, l), zero.clone());
                    idtf.insert((k, l), zero.clone());
                }
                ExpectedTables {
                    ipdc,
                    idtf,
                    autospectra: vec![vec![1.0, 1.0 + a2, s33]; pts.len()],
                    spectrum: None,
                    partial_spectra: None,
                    rho: vec![1.0, 1.0, 1.0],
                }
            }
        }
    }
}

/// Maximum spectral radius accepted by [`random_stable_model`].
pub const RANDOM_MODEL_MAX_RADIUS: f64 = 0.9;

/// Random stable VAR(`order`) with `K = channels`.
///
/// Lag coefficients are Gaussian, scaled down with `K·p`, and redrawn until the
/// companion spectral radius is below [`RANDOM_MODEL_MAX_RADIUS`]. The innovation
/// covariance is `G G^T + 0.1 I` with standard normal `G`, so it is generally
/// far from diagonal.
pub fn random_stable_model<R: Rng + ?Sized>(rng: &mut R, channels: usize, order: usize) -> VarModel {
    let scale = 0.6 / ((channels * order.max(1)) as f64).sqrt();
    let g = DMatrix::<f64>::from_fn(channels, channels, |_, _| rng.sample(StandardNormal));
    let sigma = &g * g.transpose() + DMatrix::identity(channels, channels) * 0.1;
    let sigma = (&sigma + sigma.transpose()) * 0.5;
    loop {
        let coeffs = (0..order)
            .map(|_| DMatrix::from_fn(channels, channels, |_, _| scale * rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let model = VarModel::new(coeffs, sigma.clone()).expect("shapes are consistent");
        if model.spectral_radius() < RANDOM_MODEL_MAX_RADIUS {
            return model;
        }
    }
}

/// `count` random models cycling `K` through 2..=5 and order through 1..=3.
pub fn random_population(seed: u64, count: usize) -> Vec<VarModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|n| random_stable_model(&mut rng, 2 + n % 4, 1 + n % 3))
        .collect()
}

fn max_series_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest `|theorem1_rhs − ipdc|` over all pairs and frequencies.
pub fn theorem1_deviation(spectra: &SpectralSet) -> Result<f64> {
    let measure = ipdc(spectra);
    let k = spectra.channels();
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            worst = worst.max(max_series_diff(&theorem1_rhs_from(spectra, i, j)?, &measure.series(i, j)));
        }
    }
    Ok(worst)
}

/// Largest `|theorem2_rhs − idtf|` over all pairs and frequencies.
pub fn theorem2_deviation(spectra: &SpectralSet) -> Result<f64> {
    let partial = partialize(spectra)?;
    let measure = idtf(spectra, &partial)?;
    let k = spectra.channels();
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            worst = worst.max(max_series_diff(&theorem2_rhs_from(spectra, i, j)?, &measure.series(i, j)));
        }
    }
    Ok(worst)
}

/// Largest relative gap between the block-elimination partial spectrum and
/// `1 / (ā_j^H Σ^{-1} ā_j)` over channels and frequencies.
pub fn lemma_deviation(spectra: &SpectralSet) -> Result<f64> {
    let partial = partialize(spectra)?;
    let mut worst: f64 = 0.0;
    for j in 0..spectra.channels() {
        let lemma = partial_spectrum_via_lemma(spectra, j);
        for (f, v) in lemma.iter().enumerate() {
            let block = partial.partial_spectra[f][j];
            worst = worst.max((v - block).abs() / v.abs().max(block.abs()));
        }
    }
    Ok(worst)
}

/// `max |Ā H̄ − I|` and `max |S^{-1} S − I|` over the grid.
pub fn inverse_residuals(spectra: &SpectralSet) -> (f64, f64) {
    let k = spectra.channels();
    let id = CMatrix::identity(k, k);
    let mut ah: f64 = 0.0;
    let mut ss: f64 = 0.0;
    for f in 0..spectra.grid.len() {
        ah = ah.max(max_abs_diff(&(&spectra.a_bar[f] * &spectra.h_bar[f]), &id));
        ss = ss.max(max_abs_diff(&(&spectra.s_inv[f] * &spectra.s[f]), &id));
    }
    (ah, ss)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub max_deviation: f64,
    pub bound: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: &str, max_deviation: f64, bound: f64) -> Self {
        Self { name: name.to_string(), max_deviation, bound, passed: max_deviation < bound }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub models: usize,
    pub grid_points: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 7, models: 50, grid_points: 128 }
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub config: VerifyConfig,
    pub checks: Vec<CheckOutcome>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs every identity on a seeded random population plus the worked-example
/// fixtures and reports the worst deviation of each.
pub fn verify(config: &VerifyConfig) -> Result<VerificationReport> {
    let grid = FrequencyGrid::uniform(config.grid_points)?;
    let mut t1: f64 = 0.0;
    let mut t2: f64 = 0.0;
    let mut lemma: f64 = 0.0;
    let mut orth: f64 = 0.0;
    let mut transfer: f64 = 0.0;
    let mut ah: f64 = 0.0;
    let mut ss: f64 = 0.0;
    for model in random_population(config.seed, config.models) {
        let spectra = evaluate_spectra(&model, &grid)?;
        t1 = t1.max(theorem1_deviation(&spectra)?);
        t2 = t2.max(theorem2_deviation(&spectra)?);
        lemma = lemma.max(lemma_deviation(&spectra)?);
        let k = model.channels();
        for j in 0..k {
            orth = orth.max(orthogonality_residual(&spectra, j)?);
            for i in 0..k {
                transfer = transfer.max(transfer_function_identity_from(&spectra, i, j)?);
            }
        }
        let (a, s) = inverse_residuals(&spectra);
        ah = ah.max(a);
        ss = ss.max(s);
    }

    let mut fixture_dev: f64 = 0.0;
    for fixture in [Fixture::TwoVarAlpha { alpha: 0.5 }, Fixture::ThreeVarAlphaBeta { alpha: 0.5, beta: 1.0 }] {
        fixture_dev = fixture_dev.max(fixture_deviation(&fixture, &grid)?);
    }

    let checks = vec![
        CheckOutcome::new("theorem1_ipdc", t1, IDENTITY_BOUND),
        CheckOutcome::new("theorem2_idtf", t2, IDENTITY_BOUND),
        CheckOutcome::new("lemma_partial_spectrum", lemma, IDENTITY_BOUND),
        CheckOutcome::new("orthogonality", orth, IDENTITY_BOUND),
        CheckOutcome::new("transfer_function", transfer, IDENTITY_BOUND),
        CheckOutcome::new("a_bar_times_h_bar", ah, IDENTITY_BOUND),
        CheckOutcome::new("s_inv_times_s", ss, IDENTITY_BOUND),
        CheckOutcome::new("fixtures", fixture_dev, 1e-12),
    ];
    Ok(VerificationReport { config: config.clone(), checks })
}

/// Largest gap between pipeline values and a fixture's closed-form tables.
pub fn fixture_deviation(fixture: &Fixture, grid: &FrequencyGrid) -> Result<f64> {
    let model = fixture.model();
    let spectra = evaluate_spectra(&model, grid)?;
    let partial = partialize(&spectra)?;
    let ip = ipdc(&spectra);
    let id = idtf(&spectra, &partial)?;
    let expected = fixture.expected(grid);
    let mut worst: f64 = 0.0;
    for (&(i, j), table) in &expected.ipdc {
        worst = worst.max(max_series_diff(&ip.series(i, j), table));
        worst = worst.max(max_series_diff(&theorem1_rhs_from(&spectra, i, j)?, table));
    }
    for (&(i, j), table) in &expected.idtf {
        worst = worst.max(max_series_diff(&id.series(i, j), table));
        worst = worst.max(max_series_diff(&theorem2_rhs_from(&spectra, i, j)?, table));
    }
    for (f, row) in expected.autospectra.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            worst = worst.max((spectra.autospectrum(f, i) - v).abs());
        }
    }
    if let Some(s) = &expected.spectrum {
        for (f, m) in s.iter().enumerate() {
            worst = worst.max(max_abs_diff(&spectra.s[f], m));
        }
    }
    if let Some(ps) = &expected.partial_spectra {
        for (f, row) in ps.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                worst = worst.max((partial.partial_spectra[f][k] - v).abs());
            }
        }
    }
    for (r, e) in partial.rho.iter().zip(&expected.rho) {
        worst = worst.max((r - e).abs());
    }
    Ok(worst)
}
