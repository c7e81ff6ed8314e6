//! Run configuration: a TOML file whose values command-line flags override.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sigconform::datasets::{AisColumns, AisParams};
use sigconform::{Cutoffs, NormalizationMode, Pipeline, Transform};

use crate::CliError;

pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_EPSILON: f64 = 0.05;
pub const DEFAULT_ANOMALY_RATE: f64 = 0.001;
pub const DEFAULT_BOOTSTRAP: usize = 200;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub order: Option<usize>,
    pub orders: Option<Vec<usize>>,
    pub transforms: Option<Vec<String>>,
    pub normalization: Option<String>,
    pub spectral_cutoff: Option<f64>,
    pub null_tolerance: Option<f64>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub workers: Option<usize>,
    pub bootstrap: Option<usize>,
    pub anomaly_rate: Option<f64>,
    pub data: Option<PathBuf>,
    pub ucr: UcrConfig,
    pub ais: AisConfig,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UcrConfig {
    pub datasets: Option<Vec<String>>,
    /// Dataset name to normal class label.
    pub normal_class: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AisConfig {
    pub columns: AisColumns,
    pub params: AisParams,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn cutoffs(&self) -> Result<Cutoffs, CliError> {
        let d = Cutoffs::default();
        let c = Cutoffs {
            spectral_cutoff: self.spectral_cutoff.unwrap_or(d.spectral_cutoff),
            null_tolerance: self.null_tolerance.unwrap_or(d.null_tolerance),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn epsilon(&self) -> Result<f64, CliError> {
        let e = self.epsilon.unwrap_or(DEFAULT_EPSILON);
        if !(e > 0.0 && e <= 1.0) {
            return Err(CliError::Config(format!("epsilon must lie in (0, 1], got {e}")));
        }
        Ok(e)
    }

    pub fn transforms(&self) -> Result<Vec<Transform>, CliError> {
        Ok(self
            .transforms
            .iter()
            .flatten()
            .map(|t| Transform::parse(t))
            .collect::<Result<_, _>>()?)
    }

    pub fn normalization(&self) -> Result<NormalizationMode, CliError> {
        match &self.normalization {
            Some(n) => Ok(NormalizationMode::parse(n)?),
            None => Ok(NormalizationMode::None),
        }
    }

    /// Pipeline for streams of dimension `input_dim`.
    pub fn pipeline(&self, input_dim: usize) -> Result<Pipeline, CliError> {
        Ok(Pipeline::new(
            input_dim,
            self.order.unwrap_or(DEFAULT_ORDER),
            &self.transforms()?,
            self.normalization()?,
        )?)
    }

    pub fn seeds(&self) -> Vec<u64> {
        self.seeds.clone().unwrap_or_else(|| (0..10).collect())
    }
}

/// `"1..5"`, `"0-9"` or `"1,3,4"`.
pub fn parse_list(s: &str) -> Result<Vec<u64>, String> {
    let one = |x: &str| x.trim().parse::<u64>().map_err(|_| format!("bad number {x:?} in {s:?}"));
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        match part.split_once("..").or_else(|| part.split_once('-')) {
            Some((a, b)) => {
                let (a, b) = (one(a)?, one(b)?);
                if a > b {
                    return Err(format!("empty range {part:?}"));
                }
                out.extend(a..=b);
            }
            None => out.push(one(part)?),
        }
    }
    if out.is_empty() {
        return Err(format!("empty list {s:?}"));
    }
    Ok(out)
}
