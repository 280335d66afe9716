//! Frequency-domain connectivity for vector autoregressive models.
//!
//! The crate evaluates the spectral objects of a VAR model on a grid over
//! `[0, π]`, computes the PDC and DTF families (classical, generalised and
//! information forms) together with ordinary coherence, and turns squared
//! coherences into mutual information rates.
//!
//! ```
//! use infoflow_core::{all_measures, mir_ipdc, FrequencyGrid, MeasureKind, Fixture};
//!
//! let model = Fixture::TwoVarAlpha { alpha: 0.5 }.model();
//! let grid = FrequencyGrid::uniform(64).unwrap();
//! let measures = all_measures(&model, &grid).unwrap();
//! let ipdc = &measures[&MeasureKind::InformationPdc];
//! assert!((ipdc.magnitude_sq(1, 0)[10] - 0.2).abs() < 1e-12);
//!
//! let mir = mir_ipdc(&model, &grid).unwrap();
//! assert!((mir.values[(1, 0)] - 0.5 * 1.25f64.ln()).abs() < 1e-12);
//! ```
//!
//! Channel indices are zero based throughout; `(i, j)` means target `i`,
//! source `j`.

pub mod error;
pub mod infotheory;
pub mod linalg;
pub mod measures;
pub mod oracles;
pub mod spectral;
pub mod var_model;

pub use error::{Error, ErrorClass, Result};
pub use infotheory::{
    geweke_hosoya_bridge, info_density, mir_coherence, mir_from_coherence, mir_idtf, mir_ipdc,
    mir_symmetry_check, InfoDensity, MirKind, MirMatrix, MirValue,
};
pub use linalg::CMatrix;
pub use measures::{all_measures, coherence, dtf_family, idtf, ipdc, pdc_family, MeasureKind, MeasureResult};
pub use oracles::{theorem1_rhs, theorem2_rhs, transfer_function_identity, verify, Fixture, VerifyConfig};
pub use spectral::{
    evaluate_spectra, partial_spectrum_via_lemma, partialize, FrequencyGrid, PartializationSet, SpectralSet,
    DEFAULT_GRID_POINTS,
};
pub use var_model::{estimate, select_order, OrderCriterion, TimeSeriesData, ValidationReport, VarModel};
