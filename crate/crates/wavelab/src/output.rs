//! Writes run artifacts and the `manifest.toml` that fingerprints them.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::runner::{Artifact, RunError, RunResult};

pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub name: String,
    pub experiment: String,
    pub seed: u64,
    pub config_sha256: String,
    pub curves: Vec<String>,
    pub artifacts: Vec<ArtifactEntry>,
    /// The configuration text exactly as given.
    pub config: String,
}

#[derive(Debug, Serialize)]
pub struct ArtifactEntry {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("manifest encoding: {0}")]
    Manifest(#[from] toml::ser::Error),
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Renders every file of a run. Nothing touches the disk here.
pub fn render(config_source: &str, config: &ExperimentConfig, result: &RunResult) -> Result<Vec<Artifact>, OutputError> {
    let mut files = result.artifacts(&config.experiment)?;
    let manifest = Manifest {
        tool: "wavelab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        name: config.name.clone(),
        experiment: config.experiment.name().into(),
        seed: config.seed,
        config_sha256: sha256_hex(config_source.as_bytes()),
        curves: result.curves.iter().map(|c| c.spec.name.clone()).collect(),
        artifacts: files
            .iter()
            .map(|a| ArtifactEntry { file: a.file_name.clone(), sha256: sha256_hex(&a.bytes) })
            .collect(),
        config: config_source.to_owned(),
    };
    files.push(Artifact { file_name: MANIFEST_FILE.into(), bytes: toml::to_string(&manifest)?.into_bytes() });
    Ok(files)
}

/// Renders the run, then creates `dir` and writes all files into it.
pub fn write_run(
    dir: &Path,
    config_source: &str,
    config: &ExperimentConfig,
    result: &RunResult,
) -> Result<Vec<Artifact>, OutputError> {
    let files = render(config_source, config, result)?;
    let io = |path: &Path, source| OutputError::Io { path: path.display().to_string(), source };
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    for f in &files {
        let path = dir.join(&f.file_name);
        fs::write(&path, &f.bytes).map_err(|e| io(&path, e))?;
    }
    Ok(files)
}
