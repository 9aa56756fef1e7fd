use std::path::{Path, PathBuf};

use peerassign::preference::MergeStage;
use serde::Deserialize;

/// Optional TOML configuration for `evaluate`. Command-line flags win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub scores: Option<PathBuf>,
    pub responses: Option<PathBuf>,
    pub preferences: Option<PathBuf>,
    pub min_cycle: Option<usize>,
    pub stage: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub tasks: Option<Vec<u32>>,
    pub out_dir: Option<PathBuf>,
    pub round: Option<usize>,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, peerassign::Error> {
        let text = peerassign::io::read_file(path)?;
        toml::from_str(&text).map_err(|e| peerassign::Error::Json { path: path.display().to_string(), message: e.to_string() })
    }

    pub fn stage(&self) -> Result<Option<MergeStage>, String> {
        self.stage.as_deref().map(str::parse).transpose()
    }
}
