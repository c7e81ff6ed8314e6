use serde::{Deserialize, Serialize};

use super::Stream;
use crate::datasets::haversine;
use crate::error::{Error, Result};

/// Point-to-point distance used by trajectory preprocessing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distance {
    /// Great-circle metres between `(lat°, lon°)` points.
    Haversine,
    Euclidean,
}

impl Distance {
    fn check(self, s: &Stream) -> Result<()> {
        if self == Distance::Haversine && s.dim() != 2 {
            return Err(Error::InvalidParameter(format!(
                "haversine distance needs (lat, lon) points, stream {:?} has d = {}",
                s.id(),
                s.dim()
            )));
        }
        Ok(())
    }

    /// Distance between two points of equal length. Haversine inputs are
    /// assumed valid; use [`haversine`] for checked evaluation.
    pub fn between(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Distance::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Distance::Haversine => haversine::unchecked(a[0], a[1], b[0], b[1]),
        }
    }
}

/// Keeps the first point, then every point whose distance to the last kept
/// point strictly exceeds `threshold`.
pub fn compress(s: &Stream, threshold: f64, distance: Distance) -> Result<Stream> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "compression threshold must be >= 0, got {threshold}"
        )));
    }
    distance.check(s)?;
    let mut kept = vec![0];
    for i in 1..s.len() {
        let last = *kept.last().unwrap();
        if distance.between(s.point(last), s.point(i)) > threshold {
            kept.push(i);
        }
    }
    Ok(s.select(&kept))
}

/// What "length of a sub-stream" means for [`disintegrate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisintegrateMode {
    /// Cumulative point-to-point path length.
    #[default]
    PathLength,
    /// Straight-line distance from the sub-stream's first point.
    Displacement,
}

/// Cuts a trajectory into consecutive sub-streams whose length first reaches
/// `segment_len`, cutting at existing sample points. Consecutive sub-streams
/// share their cut point. A trailing remainder shorter than `segment_len` is
/// dropped, as is any sub-stream containing a step `>= max_gap`.
pub fn disintegrate(
    s: &Stream,
    segment_len: f64,
    max_gap: f64,
    distance: Distance,
    mode: DisintegrateMode,
) -> Result<Vec<Stream>> {
    if !(segment_len > 0.0) || !(max_gap > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "segment length and gap must be positive, got {segment_len} and {max_gap}"
        )));
    }
    distance.check(s)?;
    let mut out = Vec::new();
    let mut start = 0;
    let mut acc = 0.0;
    let mut widest: f64 = 0.0;
    for i in 1..s.len() {
        let step = distance.between(s.point(i - 1), s.point(i));
        widest = widest.max(step);
        acc = match mode {
            DisintegrateMode::PathLength => acc + step,
            DisintegrateMode::Displacement => distance.between(s.point(start), s.point(i)),
        };
        if acc >= segment_len {
            if widest < max_gap {
                let k = out.len();
                out.push(s.slice(start, i).with_id(format!("{}#{k}", s.id())));
            }
            start = i;
            acc = 0.0;
            widest = 0.0;
        }
    }
    Ok(out)
}
