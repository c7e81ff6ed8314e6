use serde::{Deserialize, Serialize};

use super::Stream;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationMode {
    /// Each stream is scaled by its own per-dimension extremes.
    PerStream,
    /// All streams are scaled by extremes taken over a reference corpus.
    Corpus,
    #[default]
    None,
}

impl NormalizationMode {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim() {
            "per-stream" => Ok(Self::PerStream),
            "corpus" => Ok(Self::Corpus),
            "none" => Ok(Self::None),
            other => Err(Error::InvalidParameter(format!(
                "unknown normalization mode {other:?}"
            ))),
        }
    }
}

/// Per-dimension min-max bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub mode: NormalizationMode,
}

impl NormalizationParams {
    pub fn new(min: Vec<f64>, max: Vec<f64>, mode: NormalizationMode) -> Result<Self> {
        if min.len() != max.len() {
            return Err(Error::DimensionMismatch {
                expected: min.len(),
                found: max.len(),
            });
        }
        if min.iter().zip(&max).any(|(lo, hi)| !(lo <= hi)) {
            return Err(Error::InvalidParameter(
                "normalization bounds need min <= max in every dimension".into(),
            ));
        }
        Ok(Self { min, max, mode })
    }

    /// Extremes of a single stream.
    pub fn of_stream(s: &Stream) -> Self {
        Self::of_streams(std::iter::once(s), NormalizationMode::PerStream)
            .expect("a stream is never empty")
    }

    /// Extremes over every point of every stream.
    pub fn of_streams<'a>(
        streams: impl IntoIterator<Item = &'a Stream>,
        mode: NormalizationMode,
    ) -> Result<Self> {
        let mut min: Vec<f64> = Vec::new();
        let mut max: Vec<f64> = Vec::new();
        for s in streams {
            if min.is_empty() {
                min = vec![f64::INFINITY; s.dim()];
                max = vec![f64::NEG_INFINITY; s.dim()];
            } else if s.dim() != min.len() {
                return Err(Error::DimensionMismatch {
                    expected: min.len(),
                    found: s.dim(),
                });
            }
            for p in s.points() {
                for (j, &x) in p.iter().enumerate() {
                    min[j] = min[j].min(x);
                    max[j] = max[j].max(x);
                }
            }
        }
        if min.is_empty() {
            return Err(Error::InsufficientData(
                "normalization needs at least one stream".into(),
            ));
        }
        Ok(Self { min, max, mode })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }
}

/// Maps coordinate `j` to `(x_j - min_j) / (max_j - min_j)`, or to 0 when
/// the dimension is constant (`max_j == min_j`).
///
/// In per-stream mode the bounds are recomputed from `s` and `params` only
/// supplies the mode; in corpus mode the given bounds are used as-is; mode
/// `none` returns the stream unchanged.
pub fn min_max_normalize(s: &Stream, params: &NormalizationParams) -> Result<Stream> {
    let own;
    let bounds = match params.mode {
        NormalizationMode::None => return Ok(s.clone()),
        NormalizationMode::PerStream => {
            own = NormalizationParams::of_stream(s);
            &own
        }
        NormalizationMode::Corpus => params,
    };
    if bounds.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: bounds.dim(),
            found: s.dim(),
        });
    }
    let d = s.dim();
    let coords = s
        .coords()
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let j = k % d;
            let span = bounds.max[j] - bounds.min[j];
            if span > 0.0 {
                (x - bounds.min[j]) / span
            } else {
                0.0
            }
        })
        .collect();
    Ok(s.derive(d, coords))
}
