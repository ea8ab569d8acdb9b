use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::{DateTime, Utc};
use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Record of one invocation with every effective parameter.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub config_path: Option<PathBuf>,
    pub inputs: BTreeMap<String, PathBuf>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub threads: usize,
    pub parameters: Value,
    pub outputs: Vec<String>,
    pub started_at: DateTime<Utc>,
    pub wall_clock_s: f64,
}

pub struct ManifestBuilder {
    manifest: RunManifest,
    clock: Instant,
}

impl ManifestBuilder {
    pub fn new(
        command: &str,
        config_path: Option<&Path>,
        output_dir: &Path,
        seed: u64,
        threads: usize,
        started: (DateTime<Utc>, Instant),
    ) -> Self {
        Self {
            manifest: RunManifest {
                command: command.to_string(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                config_path: config_path.map(Path::to_path_buf),
                inputs: BTreeMap::new(),
                output_dir: output_dir.to_path_buf(),
                seed,
                threads,
                parameters: Value::Null,
                outputs: Vec::new(),
                started_at: started.0,
                wall_clock_s: 0.0,
            },
            clock: started.1,
        }
    }

    pub fn input(&mut self, name: &str, path: &Path) -> &mut Self {
        self.manifest.inputs.insert(name.to_string(), path.to_path_buf());
        self
    }

    pub fn parameters(&mut self, params: impl Serialize) -> &mut Self {
        self.manifest.parameters = serde_json::to_value(params).expect("parameters serialize");
        self
    }

    pub fn output(&mut self, name: &str) -> &mut Self {
        self.manifest.outputs.push(name.to_string());
        self
    }

    pub fn finish(mut self) -> Result<RunManifest> {
        self.manifest.wall_clock_s = self.clock.elapsed().as_secs_f64();
        let path = self.manifest.output_dir.join(MANIFEST_FILE);
        rivergraph::format::write_json(&path, &self.manifest)?;
        Ok(self.manifest)
    }
}
