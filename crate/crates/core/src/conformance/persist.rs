//! JSON model file. Finite floats are written in shortest round-trip form
//! and parsed back exactly, so a loaded model scores bit-identically.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Calibration, ConformanceModel, Cutoffs};
use crate::error::{Error, Result};
use crate::pipeline::Pipeline;

pub const MODEL_FORMAT: &str = "sigconform-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    feature_dim: usize,
    corpus_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pipeline_meta: Option<Pipeline>,
    cutoffs: Cutoffs,
    mean: Vec<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
    corpus_features: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    calibration: Option<Calibration>,
}

impl ConformanceModel {
    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            feature_dim: self.feature_dim,
            corpus_size: self.corpus_features.len(),
            pipeline_meta: self.pipeline.clone(),
            cutoffs: self.cutoffs,
            mean: self.mean.clone(),
            eigenvalues: self.eigenvalues.clone(),
            eigenvectors: self.eigenvectors.clone(),
            corpus_features: self.corpus_features.clone(),
            calibration: self.calibration.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: ModelFile = serde_json::from_str(text)?;
        if f.format != MODEL_FORMAT || f.version != MODEL_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported model file {} v{}",
                f.format, f.version
            )));
        }
        if f.mean.len() != f.feature_dim || f.corpus_features.len() != f.corpus_size {
            return Err(Error::InvalidParameter(
                "model file header disagrees with its contents".into(),
            ));
        }
        f.cutoffs.validate()?;
        let model = Self::from_parts(
            f.mean,
            f.eigenvalues,
            f.eigenvectors,
            f.corpus_features,
            f.cutoffs,
            None,
            f.calibration,
        )?;
        match f.pipeline_meta {
            Some(p) => model.with_pipeline(p),
            None => Ok(model),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = self.to_json()?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_json(&text)
    }
}
