//! Scenario files and command-line parameters.
//!
//! A scenario is a TOML file with the same keys as the long flags
//! (underscores instead of dashes), plus an optional `task` and an optional
//! `[inline_model]` table in the model-file format:
//!
//! ```toml
//! task = "compare"
//! uniform = 3
//! g = 1e-3
//! q = 0.05
//! stimulus = [0, 0.5, 0.5]
//! csv = "series.csv"
//! ```
//!
//! Flags given on the command line win over the file. Relative paths in a
//! scenario are resolved against the scenario's directory.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use critnet::ModelFile;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::report::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Analyze,
    Evolve,
    Compare,
    Pack,
    PaperExample,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Analyze => "analyze",
            Task::Evolve => "evolve",
            Task::Compare => "compare",
            Task::Pack => "pack",
            Task::PaperExample => "paper-example",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Exact,
    Meanfield,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Start {
    Critical,
    Ground,
}

/// Neurons are numbered from 1 on the command line and in reports.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,

    /// Model file (JSON).
    #[arg(long, help_heading = "Model")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inline_model: Option<ModelFile>,
    /// Uniform model on N neurons (thresholds 1, couplings g/2).
    #[arg(long, value_name = "N", help_heading = "Model")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniform: Option<usize>,
    /// Coupling strength of the uniform model and of `pack`.
    #[arg(long, help_heading = "Model")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    /// Input-layer coupling, overriding the model file.
    #[arg(long, help_heading = "Model")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Input-mode energy (default 0).
    #[arg(long, help_heading = "Model")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_gap: Option<f64>,
    /// Use exact rational arithmetic.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", help_heading = "Model")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
    /// Write the loaded model back out as JSON.
    #[arg(long, value_name = "PATH", help_heading = "Model")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub write_model: Option<PathBuf>,

    /// Solve this gapless set only (comma separated).
    #[arg(long, value_delimiter = ',', help_heading = "Analyze")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gapless: Option<Vec<usize>>,
    /// Largest excited set tried by the split search.
    #[arg(long, help_heading = "Analyze")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_excited: Option<usize>,
    /// Round critical levels to integers.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", help_heading = "Analyze")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integer: Option<bool>,
    /// Largest pattern level per gapless neuron.
    #[arg(long, value_name = "D", help_heading = "Analyze")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<u32>,
    /// Gap budget for pattern counting and packing.
    #[arg(long, help_heading = "Analyze")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    /// Temperature for the thermalization estimate.
    #[arg(long, help_heading = "Analyze")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,

    /// Stimulus occupations, one per neuron (comma separated).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, help_heading = "Dynamics")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stimulus: Option<Vec<f64>>,
    #[arg(long, value_enum, help_heading = "Dynamics")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<Start>,
    /// Excited neurons of the critical initial state (comma separated).
    #[arg(long, value_delimiter = ',', help_heading = "Dynamics")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excited: Option<Vec<usize>>,
    #[arg(long, value_enum, help_heading = "Dynamics")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<Engine>,
    /// Occupation cap per simulated mode of the exact engine.
    #[arg(long, help_heading = "Dynamics")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<u32>,
    /// Number of samples.
    #[arg(long, help_heading = "Dynamics")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Final time (default one Rabi half period, π/q).
    #[arg(long, help_heading = "Dynamics")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,

    /// Number of classical modes.
    #[arg(long, help_heading = "Pack")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    /// Smallest squared distance between packed patterns.
    #[arg(long, help_heading = "Pack")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Bound on the excursion g|α|².
    #[arg(long, help_heading = "Pack")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Number of sample patterns reported.
    #[arg(long, help_heading = "Pack")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Couplings for the sweep table (comma separated).
    #[arg(long, value_delimiter = ',', help_heading = "Pack")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<f64>>,

    /// Write the JSON report here instead of standard output.
    #[arg(long, value_name = "PATH", help_heading = "Output")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    /// Write the CSV table here.
    #[arg(long, value_name = "PATH", help_heading = "Output")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

impl Params {
    /// `self` with every field set in `top` replaced.
    pub fn overlay(self, top: Params) -> Result<Params, CliError> {
        let mut base = serde_json::to_value(self).map_err(CliError::internal)?;
        let top = serde_json::to_value(top).map_err(CliError::internal)?;
        if let (Value::Object(base), Value::Object(top)) = (&mut base, top) {
            base.extend(top);
        }
        serde_json::from_value(base).map_err(CliError::internal)
    }

    fn rebase(&mut self, dir: &Path) {
        for path in [&mut self.model, &mut self.write_model, &mut self.json, &mut self.csv].into_iter().flatten() {
            if path.is_relative() {
                *path = dir.join(&*path);
            }
        }
    }
}

pub fn load_scenario(path: &Path) -> Result<Params, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation("config", format!("cannot read {}: {e}", path.display())))?;
    let mut params: Params = toml::from_str(&text)
        .map_err(|e| CliError::validation("config", format!("{}: {}", path.display(), e.message())))?;
    if let Some(dir) = path.parent() {
        params.rebase(dir);
    }
    Ok(params)
}

/// Merges a scenario file under the flags and settles the task.
pub fn resolve(task: Option<Task>, config: Option<&Path>, flags: Params) -> Result<(Task, Params), CliError> {
    let params = match config {
        Some(path) => load_scenario(path)?.overlay(flags)?,
        None => flags,
    };
    let task = match (task, params.task) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::validation(
                "task",
                format!("command is {} but the scenario asks for {}", a.name(), b.name()),
            ))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(CliError::validation("task", "the scenario does not name a task")),
    };
    Ok((task, params))
}
