//! Runs the scaling experiments from TOML configs and writes CSV tables,
//! optional SVG plots and a `manifest.toml` that reproduces the run.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod plot;

use std::path::PathBuf;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{HarnessError, Result};

use experiments::Outputs;

pub const MANIFEST: &str = "manifest.toml";

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    /// Written files relative to `output_dir`, manifest last.
    pub files: Vec<String>,
}

/// Runs one experiment into `config.output_dir`. The manifest holds the
/// resolved config and no timestamps, so a rerun rewrites identical bytes.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let dir = &config.output_dir;
    let unwritable = |source| HarnessError::OutputDir { path: dir.clone(), source };
    std::fs::create_dir_all(dir).map_err(unwritable)?;
    let manifest = dir.join(MANIFEST);
    std::fs::write(&manifest, config.to_toml_string(None)).map_err(unwritable)?;

    log::info!("running {} into {}", config.kind(), dir.display());
    let mut out = Outputs::new(dir, config.plots);
    experiments::dispatch(config, &mut out)?;

    let mut provenance = toml::Table::new();
    provenance.insert("generator".into(), env!("CARGO_PKG_NAME").into());
    provenance.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    provenance.insert("outputs".into(), toml::Value::Array(out.files.iter().map(|f| f.clone().into()).collect()));
    for (k, v) in std::mem::take(&mut out.metadata) {
        provenance.insert(k, v);
    }
    std::fs::write(&manifest, config.to_toml_string(Some(provenance)))
        .map_err(|source| HarnessError::Io { path: manifest.clone(), source })?;
    let mut files = out.files;
    files.push(MANIFEST.to_string());
    Ok(RunSummary { output_dir: dir.clone(), files })
}
