//! Optional TOML run configuration. Every key mirrors a command-line flag;
//! flags win over the file, the file wins over built-in defaults.
//!
//! ```toml
//! seed = 7
//! threads = 4
//!
//! [qc]
//! start = "2010-01-01T00:00:00Z"
//! end = "2016-01-01T00:00:00Z"
//! timestamp_column = "timestamp"
//! discharge_column = "qobs"
//!
//! [rewire]
//! kind = "dense"
//! sigma = "auto"
//! prune = 0.0
//!
//! [resist]
//! mode = "symmetric"
//!
//! [train]
//! alpha = 24
//! beta = 12
//! epochs = 20
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub qc: QcSection,
    #[serde(default)]
    pub rewire: RewireSection,
    #[serde(default)]
    pub resist: ResistSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub synth: SynthSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QcSection {
    pub start: Option<String>,
    pub end: Option<String>,
    pub timestamp_column: Option<String>,
    pub discharge_column: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewireSection {
    pub kind: Option<String>,
    pub sigma: Option<String>,
    pub prune: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResistSection {
    pub mode: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub alpha: Option<usize>,
    pub beta: Option<usize>,
    pub layers: Option<usize>,
    pub latent: Option<usize>,
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub lr: Option<f64>,
    pub weight_decay: Option<f64>,
    pub lr_halving_epochs: Option<Vec<usize>>,
    pub clip_norm: Option<f64>,
    pub optimizer: Option<String>,
    pub train_fraction: Option<f64>,
    pub stride: Option<usize>,
    pub timestamp_column: Option<String>,
    pub discharge_column: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    pub size: Option<usize>,
    pub hours: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}
