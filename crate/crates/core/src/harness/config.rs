use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::bounds::Constraint;
use crate::error::{Error, Result};
use crate::hamiltonians::SpectrumSequence;

use super::registry::BOUNDS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyCap {
    pub spectrum: SpectrumSequence,
    #[serde(rename = "E")]
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorSampling {
    /// Largest coherent amplitude `|z|`.
    pub max_amplitude: f64,
    /// Largest number of atoms per measure.
    pub atoms: usize,
}

impl Default for OscillatorSampling {
    fn default() -> Self {
        Self {
            max_amplitude: 1.0,
            atoms: 3,
        }
    }
}

fn default_components() -> usize {
    3
}

/// A seeded sampling campaign: for each listed bound, `trials` random pairs
/// cycling through `dims` and `epsilon_grid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub epsilon_grid: Vec<f64>,
    pub energy: EnergyCap,
    pub rank: usize,
    #[serde(default)]
    pub oscillator: OscillatorSampling,
    /// Number of classical labels of sampled q-c states.
    #[serde(default = "default_components")]
    pub qc_components: usize,
    pub bounds: Vec<String>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| !(2..=256).contains(&d)) {
            return bad(format!("dims must be a nonempty list in [2, 256], got {:?}", self.dims));
        }
        if self.epsilon_grid.is_empty() || self.epsilon_grid.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
            return bad(format!("epsilon_grid must be a nonempty list in (0, 1], got {:?}", self.epsilon_grid));
        }
        if self.epsilon_grid.windows(2).any(|w| w[1] <= w[0]) {
            return bad("epsilon_grid must be strictly ascending".into());
        }
        if !(self.energy.energy >= 0.0 && self.energy.energy.is_finite()) {
            return bad(format!("E = {} must be finite and nonnegative", self.energy.energy));
        }
        if self.rank == 0 {
            return bad("rank must be at least 1".into());
        }
        if self.qc_components == 0 {
            return bad("qc_components must be at least 1".into());
        }
        let osc = &self.oscillator;
        if !(osc.max_amplitude > 0.0 && osc.max_amplitude <= 1.5) || osc.atoms == 0 {
            return bad("oscillator sampling needs 0 < max_amplitude <= 1.5 and atoms >= 1".into());
        }
        if self.bounds.is_empty() {
            return bad("no bounds listed".into());
        }
        if let Some(b) = self.bounds.iter().find(|b| !BOUNDS.contains(&b.as_str())) {
            return bad(format!("unknown bound {b:?}; known: {}", BOUNDS.join(", ")));
        }
        Ok(self)
    }

    pub fn energy_constraint(&self) -> Constraint {
        Constraint::Energy {
            spec: self.energy.spectrum.clone(),
            energy: self.energy.energy,
        }
    }

    /// Dimension and target distance of trial `t`.
    pub fn trial_point(&self, t: usize) -> (usize, f64) {
        let nd = self.dims.len();
        (self.dims[t % nd], self.epsilon_grid[(t / nd) % self.epsilon_grid.len()])
    }
}
