//! Finite-order vector autoregressive models.
//!
//! A `VarModel` holds the lag matrices `A(1..p)` and the innovation covariance
//! `Σ_w` of
//!
//! ```text
//! x(n) = Σ_{l=1..p} A(l) x(n-l) + w(n),   E[w(n) w(n)^T] = Σ_w
//! ```
//!
//! Construction only checks shapes. Stability and positive definiteness are
//! reported by [`VarModel::validate`] and enforced by the operations that need
//! them (simulation, spectral evaluation).

use nalgebra::{DMatrix, Schur};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::is_symmetric;

/// Margin below 1 the companion spectral radius must clear to count as stable.
pub const STABILITY_TOLERANCE: f64 = 1e-8;

/// Symmetry tolerance applied to `Σ_w` in validation.
pub const SIGMA_SYMMETRY_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_BURN_IN: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct VarModel {
    coeffs: Vec<DMatrix<f64>>,
    sigma: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub stable: bool,
    pub spectral_radius: f64,
    pub sigma_ok: bool,
}

impl VarModel {
    /// Builds a model from lag matrices `A(1), …, A(p)` and `Σ_w`.
    ///
    /// Every lag matrix must be K x K with K taken from `sigma`, and all
    /// entries must be finite.
    pub fn new(coeffs: Vec<DMatrix<f64>>, sigma: DMatrix<f64>) -> Result<Self> {
        let k = sigma.nrows();
        if k == 0 {
            return Err(Error::Structural("channel count must be at least 1".into()));
        }
        if sigma.ncols() != k {
            return Err(Error::Structural(format!(
                "sigma must be square, got {}x{}",
                sigma.nrows(),
                sigma.ncols()
            )));
        }
        for (l, a) in coeffs.iter().enumerate() {
            if a.nrows() != k || a.ncols() != k {
                return Err(Error::Structural(format!(
                    "A({}) is {}x{} but K = {}",
                    l + 1,
                    a.nrows(),
                    a.ncols(),
                    k
                )));
            }
        }
        let finite = coeffs.iter().flat_map(|a| a.iter()).chain(sigma.iter()).all(|v| v.is_finite());
        if !finite {
            return Err(Error::Structural("model contains non-finite entries".into()));
        }
        Ok(Self { coeffs, sigma })
    }

    /// Zero-order model: white noise with covariance `sigma`.
    pub fn white_noise(sigma: DMatrix<f64>) -> Result<Self> {
        Self::new(Vec::new(), sigma)
    }

    pub fn channels(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Lag matrices; index `l - 1` holds `A(l)`.
    pub fn coeffs(&self) -> &[DMatrix<f64>] {
        &self.coeffs
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    /// `a_ij(l)` with zero-based channel indices and one-based lag.
    pub fn coeff(&self, lag: usize, i: usize, j: usize) -> f64 {
        self.coeffs[lag - 1][(i, j)]
    }

    /// Block companion matrix of size Kp x Kp.
    pub fn companion(&self) -> DMatrix<f64> {
        let k = self.channels();
        let p = self.order();
        let mut c = DMatrix::zeros(k * p, k * p);
        for (l, a) in self.coeffs.iter().enumerate() {
            c.view_mut((0, l * k), (k, k)).copy_from(a);
        }
        for b in 1..p {
            for d in 0..k {
                c[(b * k + d, (b - 1) * k + d)] = 1.0;
            }
        }
        c
    }

    pub fn spectral_radius(&self) -> f64 {
        if self.order() == 0 {
            return 0.0;
        }
        spectral_radius_of(&self.companion())
    }

    pub fn validate(&self) -> ValidationReport {
        let spectral_radius = self.spectral_radius();
        let sigma_ok = is_symmetric(&self.sigma, SIGMA_SYMMETRY_TOLERANCE)
            && self.sigma.clone().cholesky().is_some();
        ValidationReport {
            stable: spectral_radius < 1.0 - STABILITY_TOLERANCE,
            spectral_radius,
            sigma_ok,
        }
    }

    /// Fails unless the model is stable with a positive definite `Σ_w`.
    pub fn ensure_usable(&self) -> Result<ValidationReport> {
        let report = self.validate();
        if !report.stable {
            return Err(Error::Unstable { radius: report.spectral_radius });
        }
        if !report.sigma_ok {
            return Err(Error::SigmaNotPositiveDefinite);
        }
        Ok(report)
    }

    /// Model of the channel-rescaled process `x'_k = gains_k · x_k`.
    pub fn rescale(&self, gains: &[f64]) -> Result<Self> {
        let k = self.channels();
        if gains.len() != k {
            return Err(Error::Structural(format!("expected {} gains, got {}", k, gains.len())));
        }
        if let Some(g) = gains.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(Error::Domain(format!("gains must be positive and finite, got {g}")));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| DMatrix::from_fn(k, k, |i, j| gains[i] * a[(i, j)] / gains[j]))
            .collect();
        let sigma = DMatrix::from_fn(k, k, |i, j| gains[i] * self.sigma[(i, j)] * gains[j]);
        Self::new(coeffs, sigma)
    }

    /// Draws `n_samples` observations after discarding `burn_in` transient samples.
    ///
    /// Returns `(observations, innovations)`; row `n` of the innovations is the
    /// `w(n)` that entered observation row `n`. The recursion starts from zero
    /// initial conditions and is fully determined by `seed`.
    pub fn simulate(
        &self,
        n_samples: usize,
        burn_in: usize,
        seed: u64,
    ) -> Result<(TimeSeriesData, TimeSeriesData)> {
        if n_samples == 0 {
            return Err(Error::Domain("n_samples must be at least 1".into()));
        }
        self.ensure_usable()?;
        let k = self.channels();
        let p = self.order();
        let chol = self
            .sigma
            .clone()
            .cholesky()
            .ok_or(Error::SigmaNotPositiveDefinite)?
            .l();

        let total = n_samples + burn_in;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = DMatrix::<f64>::zeros(total, k);
        let mut w = DMatrix::<f64>::zeros(total, k);
        let mut z = vec![0.0; k];
        for n in 0..total {
            for v in z.iter_mut() {
                *v = StandardNormal.sample(&mut rng);
            }
            for i in 0..k {
                let mut wi = 0.0;
                for (d, zd) in z.iter().enumerate().take(i + 1) {
                    wi += chol[(i, d)] * zd;
                }
                w[(n, i)] = wi;
            }
            for i in 0..k {
                let mut acc = w[(n, i)];
                for l in 1..=p.min(n) {
                    let a = &self.coeffs[l - 1];
                    for j in 0..k {
                        acc += a[(i, j)] * x[(n - l, j)];
                    }
                }
                x[(n, i)] = acc;
            }
        }
        let x = x.rows(burn_in, n_samples).into_owned();
        let w = w.rows(burn_in, n_samples).into_owned();
        Ok((TimeSeriesData::new(x, None)?, TimeSeriesData::new(w, None)?))
    }
}

/// Largest eigenvalue modulus of a real square matrix.
///
/// The unshifted Schur iteration stalls on nilpotent matrices (every Francis
/// shift is zero), which is exactly the structure of pure feed-forward models,
/// so a few real shifts are tried before falling back to Gelfand's formula.
fn spectral_radius_of(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let max_iter = 1000 + 100 * n;
    for shift in [0.0, 0.5, -0.5, 0.75] {
        let shifted = m + DMatrix::identity(n, n) * shift;
        if let Some(schur) = Schur::try_new(shifted, f64::EPSILON, max_iter) {
            return schur
                .complex_eigenvalues()
                .iter()
                .map(|z| (z - shift).norm())
                .fold(0.0, f64::max);
        }
    }
    gelfand_radius(m)
}

/// `||M^(2^k)||^(1/2^k)` for k = 12, renormalised at each squaring.
fn gelfand_radius(m: &DMatrix<f64>) -> f64 {
    let mut power = m.clone();
    let mut log_scale = 0.0;
    let mut exponent = 1.0;
    for _ in 0..12 {
        let norm = power.norm();
        if norm == 0.0 {
            return 0.0;
        }
        power /= norm;
        log_scale += norm.ln() / exponent;
        power = &power * &power;
        exponent *= 2.0;
    }
    (log_scale + power.norm().ln() / exponent).exp()
}

/// Multichannel sample block, one row per sample and one column per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesData {
    values: DMatrix<f64>,
    sample_rate_hz: Option<f64>,
}

impl TimeSeriesData {
    pub fn new(values: DMatrix<f64>, sample_rate_hz: Option<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::Structural("time series needs at least one sample and one channel".into()));
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            // column-major storage
            let (row, col) = (idx % values.nrows(), idx / values.nrows());
            return Err(Error::Domain(format!("non-finite value at sample {row}, channel {col}")));
        }
        if let Some(fs) = sample_rate_hz {
            if !(fs.is_finite() && fs > 0.0) {
                return Err(Error::Domain(format!("sample rate must be positive, got {fs}")));
            }
        }
        Ok(Self { values, sample_rate_hz })
    }

    pub fn n_samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn channels(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn sample_rate_hz(&self) -> Option<f64> {
        self.sample_rate_hz
    }

    pub fn with_sample_rate(mut self, fs: Option<f64>) -> Result<Self> {
        self.sample_rate_hz = fs;
        Self::new(self.values, self.sample_rate_hz)
    }

    /// Sample covariance with denominator `n` (means removed).
    pub fn covariance(&self) -> DMatrix<f64> {
        let centered = self.centered();
        centered.transpose() * &centered / self.n_samples() as f64
    }

    fn centered(&self) -> DMatrix<f64> {
        let mut c = self.values.clone();
        for mut col in c.column_iter_mut() {
            let mean = col.mean();
            col.add_scalar_mut(-mean);
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderCriterion {
    Aic,
    Bic,
}

/// Least-squares fit of a VAR(`order`) after per-channel mean removal.
///
/// `Σ_w` is the residual covariance with denominator equal to the number of
/// regression rows, `n - order`.
pub fn estimate(data: &TimeSeriesData, order: usize) -> Result<VarModel> {
    let k = data.channels();
    let n = data.n_samples();
    if n <= k * order + 1 {
        return Err(Error::Estimation(format!(
            "need more than K*order + 1 = {} samples, got {}",
            k * order + 1,
            n
        )));
    }
    fit_from(&data.centered(), order, order)
}

/// Order in `1..=max_order` minimising the chosen information criterion.
///
/// All candidate orders are fitted on the same effective sample (the rows
/// from `max_order` on) so their criteria are comparable.
pub fn select_order(data: &TimeSeriesData, max_order: usize, criterion: OrderCriterion) -> Result<usize> {
    if max_order == 0 {
        return Err(Error::Domain("max_order must be at least 1".into()));
    }
    let k = data.channels();
    let n = data.n_samples();
    if n <= k * max_order + max_order + 1 {
        return Err(Error::Estimation(format!(
            "{n} samples are too few to compare orders up to {max_order} with {k} channels"
        )));
    }
    let centered = data.centered();
    let n_used = (n - max_order) as f64;
    let mut best = (f64::INFINITY, 1);
    for p in 1..=max_order {
        let model = fit_from(&centered, p, max_order)?;
        let det = model.sigma().determinant();
        if det <= 0.0 {
            return Err(Error::Estimation(format!("residual covariance is singular at order {p}")));
        }
        let params = (p * k * k) as f64;
        let penalty = match criterion {
            OrderCriterion::Aic => 2.0 * params / n_used,
            OrderCriterion::Bic => n_used.ln() * params / n_used,
        };
        let score = det.ln() + penalty;
        if score < best.0 {
            best = (score, p);
        }
    }
    Ok(best.1)
}

/// Regresses rows `start..n` of `x` on their `order` lags.
fn fit_from(x: &DMatrix<f64>, order: usize, start: usize) -> Result<VarModel> {
    let k = x.ncols();
    let n_used = x.nrows() - start;
    let y = x.rows(start, n_used).into_owned();
    if order == 0 {
        let sigma = y.transpose() * &y / n_used as f64;
        return VarModel::new(Vec::new(), sigma);
    }

    // Regressor row t = [x(t-1), x(t-2), …, x(t-order)]
    let z = DMatrix::from_fn(n_used, k * order, |r, c| {
        let lag = c / k + 1;
        x[(start + r - lag, c % k)]
    });

    let qr = z.clone().qr();
    let r = qr.r();
    for c in 0..k * order {
        let col_norm = z.column(c).norm();
        if col_norm == 0.0 || r[(c, c)].abs() <= 1e-10 * col_norm {
            return Err(Error::Estimation(format!(
                "regressor matrix is rank deficient: channel {} at lag {} is collinear with earlier regressors",
                c % k,
                c / k + 1
            )));
        }
    }
    let qty = qr.q().transpose() * &y;
    let b = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Estimation("triangular solve failed".into()))?;

    // b is (K·order) x K with b[(lag-block + j), i] = a_ij(lag)
    let coeffs = (0..order)
        .map(|l| DMatrix::from_fn(k, k, |i, j| b[(l * k + j, i)]))
        .collect();
    let resid = &y - &z * &b;
    let mut sigma = resid.transpose() * &resid / n_used as f64;
    sigma = (&sigma + sigma.transpose()) * 0.5;
    VarModel::new(coeffs, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_var(alpha: f64) -> VarModel {
        VarModel::new(
            vec![DMatrix::from_row_slice(2, 2, &[0.0, 0.0, alpha, 0.0])],
            DMatrix::identity(2, 2),
        )
        .unwrap()
    }

    #[test]
    fn nilpotent_model_is_stable_with_zero_radius() {
        let r = two_var(0.5).validate();
        assert!(r.stable);
        assert!(r.sigma_ok);
        assert!(r.spectral_radius.abs() < 1e-12, "{}", r.spectral_radius);
    }

    #[test]
    fn nilpotent_chain_radius_terminates() {
        let m = VarModel::new(
            vec![DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 1.0, 0.0])],
            DMatrix::identity(3, 3),
        )
        .unwrap();
        let r = m.validate();
        assert!(r.stable);
        assert!(r.spectral_radius < 1e-6, "{}", r.spectral_radius);
    }

    #[test]
    fn triangular_radius_and_gelfand_bound() {
        let m = DMatrix::from_row_slice(2, 2, &[0.5, 0.3, 0.0, -0.2]);
        assert!((spectral_radius_of(&m) - 0.5).abs() < 1e-12);
        let g = gelfand_radius(&m);
        assert!(g >= 0.5 && g < 0.51, "{g}");
        assert_eq!(gelfand_radius(&DMatrix::zeros(3, 3)), 0.0);
    }

    #[test]
    fn diagonal_coefficients_give_radius() {
        let m = VarModel::new(
            vec![DMatrix::from_row_slice(2, 2, &[1.1, 0.0, 0.0, 0.5])],
            DMatrix::identity(2, 2),
        )
        .unwrap();
        let r = m.validate();
        assert!(!r.stable);
        assert!((r.spectral_radius - 1.1).abs() < 1e-12);
    }

    #[test]
    fn indefinite_sigma_flagged() {
        let m = VarModel::white_noise(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).unwrap();
        assert!(!m.validate().sigma_ok);
        assert_eq!(m.simulate(10, 0, 1).unwrap_err(), Error::SigmaNotPositiveDefinite);
    }

    #[test]
    fn dimension_mismatch_is_structural() {
        let err = VarModel::new(vec![DMatrix::zeros(3, 3)], DMatrix::identity(2, 2)).unwrap_err();
        assert!(matches!(err, Error::Structural(_)));
        let err = VarModel::new(vec![], DMatrix::zeros(2, 3)).unwrap_err();
        assert!(matches!(err, Error::Structural(_)));
    }

    #[test]
    fn companion_of_var2() {
        let a1 = DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.0, 0.3]);
        let a2 = DMatrix::from_row_slice(2, 2, &[-0.2, 0.0, 0.1, 0.0]);
        let m = VarModel::new(vec![a1.clone(), a2.clone()], DMatrix::identity(2, 2)).unwrap();
        let c = m.companion();
        assert_eq!(c.view((0, 0), (2, 2)), a1);
        assert_eq!(c.view((0, 2), (2, 2)), a2);
        assert_eq!(c.view((2, 0), (2, 2)), DMatrix::<f64>::identity(2, 2));
        assert_eq!(c.view((2, 2), (2, 2)), DMatrix::<f64>::zeros(2, 2));
    }

    #[test]
    fn unstable_model_refuses_simulation() {
        let m = VarModel::new(vec![DMatrix::from_row_slice(1, 1, &[1.1])], DMatrix::identity(1, 1)).unwrap();
        match m.simulate(10, 0, 0) {
            Err(e @ Error::Unstable { .. }) => assert!(e.to_string().contains("1.1")),
            other => panic!("expected instability, got {other:?}"),
        }
    }

    #[test]
    fn white_noise_single_sample_is_innovation() {
        let m = VarModel::white_noise(DMatrix::identity(3, 3)).unwrap();
        let (x, w) = m.simulate(1, 0, 42).unwrap();
        assert_eq!(x, w);
        assert_eq!(x.n_samples(), 1);
    }

    #[test]
    fn simulation_is_deterministic() {
        let m = two_var(0.5);
        let a = m.simulate(500, 100, 9).unwrap();
        let b = m.simulate(500, 100, 9).unwrap();
        assert_eq!(a, b);
        let c = m.simulate(500, 100, 10).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn innovations_align_with_samples() {
        let m = two_var(0.5);
        let (x, w) = m.simulate(200, 50, 3).unwrap();
        for n in 1..200 {
            let pred1 = w.values()[(n, 0)];
            let pred2 = 0.5 * x.values()[(n - 1, 0)] + w.values()[(n, 1)];
            assert!((x.values()[(n, 0)] - pred1).abs() < 1e-14);
            assert!((x.values()[(n, 1)] - pred2).abs() < 1e-14);
        }
    }

    #[test]
    fn stationary_variance_of_driven_channel() {
        // var(x2) = α² var(x1) + 1 = 1 + α²
        let (x, _) = two_var(0.5).simulate(100_000, DEFAULT_BURN_IN, 2024).unwrap();
        let cov = x.covariance();
        assert!((cov[(1, 1)] - 1.25).abs() < 0.02, "{}", cov[(1, 1)]);
    }

    #[test]
    fn rescale_identity_and_example() {
        let m = two_var(0.5);
        assert_eq!(m.rescale(&[1.0, 1.0]).unwrap(), m);
        let r = m.rescale(&[2.0, 1.0]).unwrap();
        assert!((r.coeff(1, 1, 0) - 0.25).abs() < 1e-15);
        assert_eq!(r.sigma(), &DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 1.0]));
        assert!(matches!(m.rescale(&[1.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(m.rescale(&[1.0, -2.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn estimate_recovers_fixture() {
        let (x, _) = two_var(0.5).simulate(20_000, DEFAULT_BURN_IN, 11).unwrap();
        let fit = estimate(&x, 1).unwrap();
        let a21 = fit.coeff(1, 1, 0);
        let a12 = fit.coeff(1, 0, 1);
        assert!((0.47..=0.53).contains(&a21), "{a21}");
        assert!(a12.abs() <= 0.03, "{a12}");
    }

    #[test]
    fn estimate_on_white_noise_is_null() {
        let m = VarModel::white_noise(DMatrix::identity(3, 3)).unwrap();
        let (x, _) = m.simulate(20_000, 0, 5).unwrap();
        let fit = estimate(&x, 1).unwrap();
        assert!(fit.coeffs()[0].iter().all(|a| a.abs() < 0.05));
    }

    #[test]
    fn bic_selects_true_order() {
        let (x, _) = two_var(0.5).simulate(20_000, DEFAULT_BURN_IN, 17).unwrap();
        assert_eq!(select_order(&x, 6, OrderCriterion::Bic).unwrap(), 1);
    }

    #[test]
    fn rank_deficient_regressors_rejected() {
        // second channel duplicates the first
        let (x, _) = VarModel::white_noise(DMatrix::identity(1, 1)).unwrap().simulate(100, 0, 1).unwrap();
        let dup = DMatrix::from_fn(100, 2, |r, _| x.values()[(r, 0)]);
        let data = TimeSeriesData::new(dup, None).unwrap();
        let err = estimate(&data, 1).unwrap_err();
        assert!(err.to_string().contains("channel 1 at lag 1"), "{err}");
    }

    #[test]
    fn too_few_samples_rejected() {
        let data = TimeSeriesData::new(DMatrix::from_element(5, 2, 1.0), None).unwrap();
        assert!(matches!(estimate(&data, 2), Err(Error::Estimation(_))));
    }

    #[test]
    fn residual_covariance_is_psd() {
        let (x, _) = two_var(0.3).simulate(2_000, 100, 8).unwrap();
        let fit = estimate(&x, 3).unwrap();
        assert!(is_symmetric(fit.sigma(), 0.0));
        assert!(fit.sigma().symmetric_eigenvalues().iter().all(|&e| e >= 0.0));
    }

    #[test]
    fn non_finite_data_rejected_with_coordinates() {
        let mut v = DMatrix::from_element(4, 3, 0.0);
        v[(2, 1)] = f64::NAN;
        let err = TimeSeriesData::new(v, None).unwrap_err();
        assert!(err.to_string().contains("sample 2, channel 1"), "{err}");
    }
}
