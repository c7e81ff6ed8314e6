//! Streams of data and the stream-to-stream maps applied before taking
//! signatures.

mod io;
mod normalize;
mod trajectory;
mod transform;

pub use io::{read_streams, write_streams, StreamRecord};
pub use normalize::{min_max_normalize, NormalizationMode, NormalizationParams};
pub use trajectory::{compress, disintegrate, DisintegrateMode, Distance};
pub use transform::{
    invisibility, lead_lag, time_augment, time_diff_augment, TimeParameterization, Transform,
};

use crate::error::{Error, Result};

/// An ordered sequence of `n >= 1` points in `R^d`, with optional strictly
/// increasing timestamps.
///
/// Points are stored row-major in one flat buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Stream {
    id: String,
    label: Option<String>,
    dim: usize,
    coords: Vec<f64>,
    timestamps: Option<Vec<f64>>,
}

impl Stream {
    /// Builds a stream from a flat row-major coordinate buffer.
    pub fn new(id: impl Into<String>, dim: usize, coords: Vec<f64>) -> Result<Self> {
        let id = id.into();
        if dim == 0 {
            return Err(Error::invalid_stream(&id, "dimension must be positive"));
        }
        if coords.is_empty() {
            return Err(Error::EmptyStream);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::invalid_stream(
                &id,
                format!("{} coordinates is not a multiple of d = {dim}", coords.len()),
            ));
        }
        Ok(Self {
            id,
            label: None,
            dim,
            coords,
            timestamps: None,
        })
    }

    /// Builds a stream from a list of points; every point must have the same
    /// length.
    pub fn from_points<P: AsRef<[f64]>>(id: impl Into<String>, points: &[P]) -> Result<Self> {
        let id = id.into();
        let first = points.first().ok_or(Error::EmptyStream)?;
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(dim * points.len());
        for (i, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::invalid_stream(
                    &id,
                    format!("point {i} has {} coordinates, expected {dim}", p.len()),
                ));
            }
            coords.extend_from_slice(p);
        }
        Self::new(id, dim, coords)
    }

    /// Attaches timestamps, checking length and strict monotonicity.
    pub fn with_timestamps(mut self, timestamps: Vec<f64>) -> Result<Self> {
        if timestamps.len() != self.len() {
            return Err(Error::invalid_stream(
                &self.id,
                format!(
                    "{} timestamps for {} points",
                    timestamps.len(),
                    self.len()
                ),
            ));
        }
        if timestamps.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid_stream(&self.id, "non-finite timestamp"));
        }
        if timestamps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid_stream(
                &self.id,
                "timestamps must be strictly increasing",
            ));
        }
        self.timestamps = Some(timestamps);
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false: a stream holds at least one point.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn timestamps(&self) -> Option<&[f64]> {
        self.timestamps.as_deref()
    }

    pub fn to_points(&self) -> Vec<Vec<f64>> {
        self.points().map(<[f64]>::to_vec).collect()
    }

    /// Copy of this stream with new coordinates of a possibly different
    /// dimension. Timestamps are kept only when the point count is unchanged.
    pub(crate) fn derive(&self, dim: usize, coords: Vec<f64>) -> Self {
        let keep_ts = coords.len() / dim == self.len();
        Self {
            id: self.id.clone(),
            label: self.label.clone(),
            dim,
            coords,
            timestamps: if keep_ts {
                self.timestamps.clone()
            } else {
                None
            },
        }
    }

    /// Sub-stream of points `start..=end`, keeping matching timestamps.
    pub(crate) fn slice(&self, start: usize, end: usize) -> Self {
        Self {
            id: self.id.clone(),
            label: self.label.clone(),
            dim: self.dim,
            coords: self.coords[start * self.dim..(end + 1) * self.dim].to_vec(),
            timestamps: self
                .timestamps
                .as_ref()
                .map(|ts| ts[start..=end].to_vec()),
        }
    }

    /// Stream made of the points at `indices` (in the given order).
    pub(crate) fn select(&self, indices: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        Self {
            id: self.id.clone(),
            label: self.label.clone(),
            dim: self.dim,
            coords,
            timestamps: self
                .timestamps
                .as_ref()
                .map(|ts| indices.iter().map(|&i| ts[i]).collect()),
        }
    }
}
