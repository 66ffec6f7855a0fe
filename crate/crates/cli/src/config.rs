//! Run configuration files.

use std::path::{Path, PathBuf};

use cylq_core::classical_dynamics::TrigPotential;
use cylq_core::symbols::Observable;
use serde::Deserialize;

use crate::error::CliError;
use crate::experiments::{Params, ScheduleSpec};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: u64,
    #[serde(default)]
    pub observable: Option<PathBuf>,
    #[serde(default)]
    pub potential: Option<PathBuf>,
    #[serde(default)]
    pub hbar_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub window: Option<WindowConfig>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub margin: usize,
    pub min_n: usize,
    pub max_n: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: PathBuf,
    pub summary: PathBuf,
}

/// A parsed configuration with referenced files loaded and paths resolved
/// against the configuration's directory.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub experiment: String,
    pub params: Params,
    pub csv: PathBuf,
    pub summary: PathBuf,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(path, e.to_string()))
}

pub fn load_observable(path: &Path) -> Result<Observable, CliError> {
    Observable::from_json_str(&read(path)?).map_err(|e| CliError::input(path, e.to_string()))
}

pub fn load_potential(path: &Path) -> Result<TrigPotential, CliError> {
    TrigPotential::from_json_str(&read(path)?).map_err(|e| CliError::input(path, e.to_string()))
}

pub fn load(path: &Path) -> Result<LoadedConfig, CliError> {
    let text = read(path)?;
    let cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| {
        CliError::input(path, format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    if let Some(g) = &cfg.hbar_grid {
        if g.is_empty() {
            return Err(CliError::input(path, "field `hbar_grid`: must be nonempty"));
        }
        if let Some(h) = g.iter().find(|h| !(h.is_finite() && **h > 0.0)) {
            return Err(CliError::input(path, format!("field `hbar_grid`: {h} is not a positive finite number")));
        }
    }
    if let Some(w) = &cfg.window {
        if w.min_n == 0 || w.min_n > w.max_n {
            return Err(CliError::input(path, "field `window`: need 1 <= min_n <= max_n"));
        }
    }
    if let Some(t) = cfg.tolerance {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::input(path, "field `tolerance`: must be a nonnegative finite number"));
        }
    }
    let observable = cfg.observable.as_ref().map(|p| load_observable(&resolve(base, p))).transpose()?;
    let potential = cfg.potential.as_ref().map(|p| load_potential(&resolve(base, p))).transpose()?;
    Ok(LoadedConfig {
        experiment: cfg.experiment,
        params: Params {
            seed: cfg.seed,
            observable,
            potential,
            hbar_grid: cfg.hbar_grid,
            schedule: cfg.window.map(|w| ScheduleSpec { margin: w.margin, min_n: w.min_n, max_n: w.max_n }),
            tolerance: cfg.tolerance,
        },
        csv: resolve(base, &cfg.output.csv),
        summary: resolve(base, &cfg.output.summary),
    })
}
