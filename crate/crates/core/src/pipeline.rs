//! Stream-to-feature pipeline: normalization, transforms, truncated
//! signature.
//!
//! Steps, in order:
//! 1. per-stream min-max normalization (if that mode is selected);
//! 2. `time` / `time-diff` augmentation (consumes timestamps);
//! 3. corpus min-max normalization (if selected), with bounds fitted on the
//!    corpus after step 2;
//! 4. `lead-lag`;
//! 5. `invisibility`;
//! 6. signature of order `order`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signature::{sig_dim, signature};
use crate::streams::{
    min_max_normalize, NormalizationMode, NormalizationParams, Stream, Transform,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pipeline {
    /// Dimension of raw input streams.
    pub input_dim: usize,
    pub order: usize,
    /// Stored in application order.
    pub transforms: Vec<Transform>,
    pub normalization: NormalizationMode,
    /// Corpus bounds; present once fitted in corpus mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization_params: Option<NormalizationParams>,
}

impl Pipeline {
    pub fn new(
        input_dim: usize,
        order: usize,
        transforms: &[Transform],
        normalization: NormalizationMode,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter(
                "signature order must be >= 1".into(),
            ));
        }
        if input_dim == 0 {
            return Err(Error::InvalidParameter("input dimension must be >= 1".into()));
        }
        let p = Self {
            input_dim,
            order,
            transforms: Transform::canonical_order(transforms),
            normalization,
            normalization_params: None,
        };
        sig_dim(p.stream_dim(), order)?;
        Ok(p)
    }

    /// Dimension of the stream whose signature is taken.
    pub fn stream_dim(&self) -> usize {
        self.transforms
            .iter()
            .fold(self.input_dim, |d, t| t.output_dim(d))
    }

    pub fn feature_dim(&self) -> usize {
        sig_dim(self.stream_dim(), self.order).expect("validated at construction")
    }

    fn is_time(t: &Transform) -> bool {
        matches!(t, Transform::Time | Transform::TimeDiff)
    }

    /// Steps 1 and 2.
    fn augment(&self, s: &Stream) -> Result<Stream> {
        if s.dim() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                found: s.dim(),
            });
        }
        let mut cur = if self.normalization == NormalizationMode::PerStream {
            min_max_normalize(s, &NormalizationParams::of_stream(s))?
        } else {
            s.clone()
        };
        for t in self.transforms.iter().filter(|t| Self::is_time(t)) {
            cur = t.apply(&cur)?;
        }
        Ok(cur)
    }

    /// Fits corpus normalization bounds (no-op for other modes).
    pub fn fit(&mut self, corpus: &[Stream]) -> Result<()> {
        if self.normalization != NormalizationMode::Corpus {
            return Ok(());
        }
        let augmented = corpus
            .iter()
            .map(|s| self.augment(s))
            .collect::<Result<Vec<_>>>()?;
        self.normalization_params = Some(NormalizationParams::of_streams(
            &augmented,
            NormalizationMode::Corpus,
        )?);
        Ok(())
    }

    /// The transformed stream whose signature becomes the feature vector.
    pub fn transform(&self, s: &Stream) -> Result<Stream> {
        let mut cur = self.augment(s)?;
        if self.normalization == NormalizationMode::Corpus {
            let params = self.normalization_params.as_ref().ok_or_else(|| {
                Error::InvalidParameter("corpus normalization used before fitting".into())
            })?;
            cur = min_max_normalize(&cur, params)?;
        }
        for t in self.transforms.iter().filter(|t| !Self::is_time(t)) {
            cur = t.apply(&cur)?;
        }
        Ok(cur)
    }

    pub fn features(&self, s: &Stream) -> Result<Vec<f64>> {
        Ok(signature(&self.transform(s)?, self.order)?.into_coeffs())
    }

    /// Feature vectors for many streams, in input order.
    pub fn features_batch(&self, streams: &[Stream]) -> Result<Vec<Vec<f64>>> {
        streams.par_iter().map(|s| self.features(s)).collect()
    }
}
