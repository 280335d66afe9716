//! Front end for `infoflow`: JSON model and result documents, CSV time-series
//! ingestion, and the `simulate` / `fit` / `measure` / `mir` / `verify` pipeline.

use std::path::Path;

pub mod error;
pub mod model_doc;
pub mod pipeline;
pub mod result_doc;
pub mod timeseries;

pub use error::{CliError, Result};
pub use model_doc::{ModelDocument, ModelMetadata};
pub use result_doc::{ResultDocument, Units, VerifyDocument};
pub use timeseries::{load_timeseries, save_timeseries, Layout};

pub const SCHEMA_VERSION: u32 = 1;

/// Directory used for outputs when `--out` is not given.
pub const OUT_DIR_ENV: &str = "INFOFLOW_OUT_DIR";

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent.display(), e))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::io(path.display(), e))
}
