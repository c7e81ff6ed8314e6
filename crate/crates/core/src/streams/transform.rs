use serde::{Deserialize, Serialize};

use super::Stream;
use crate::error::{Error, Result};

/// How [`time_augment`] chooses the time coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeParameterization {
    /// `t_i = i / (n - 1)` on `[0, 1]`.
    Uniform,
    /// The stream's own timestamps.
    FromTimestamps,
}

/// A named stream transformation usable in a feature pipeline.
///
/// When several are requested they are applied in the order of this enum's
/// declaration (see [`Transform::canonical_order`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transform {
    /// Prepend a uniform time coordinate.
    Time,
    /// Prepend successive timestamp differences.
    TimeDiff,
    LeadLag,
    Invisibility,
}

impl Transform {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim() {
            "time" => Ok(Transform::Time),
            "time-diff" => Ok(Transform::TimeDiff),
            "lead-lag" => Ok(Transform::LeadLag),
            "invisibility" => Ok(Transform::Invisibility),
            other => Err(Error::InvalidParameter(format!(
                "unknown transform {other:?} (expected time, time-diff, lead-lag or invisibility)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Transform::Time => "time",
            Transform::TimeDiff => "time-diff",
            Transform::LeadLag => "lead-lag",
            Transform::Invisibility => "invisibility",
        }
    }

    /// Sorts and deduplicates a transform list into application order.
    pub fn canonical_order(list: &[Transform]) -> Vec<Transform> {
        let mut v = list.to_vec();
        v.sort();
        v.dedup();
        v
    }

    pub fn apply(self, s: &Stream) -> Result<Stream> {
        match self {
            Transform::Time => time_augment(s, TimeParameterization::Uniform),
            Transform::TimeDiff => time_diff_augment(s),
            Transform::LeadLag => Ok(lead_lag(s)),
            Transform::Invisibility => Ok(invisibility(s)),
        }
    }

    /// Output dimension for an input of dimension `d`.
    pub fn output_dim(self, d: usize) -> usize {
        match self {
            Transform::Time | Transform::TimeDiff | Transform::Invisibility => d + 1,
            Transform::LeadLag => 2 * d,
        }
    }
}

/// Prepends a time coordinate: point `i` becomes `(t_i, x_i)`.
pub fn time_augment(s: &Stream, param: TimeParameterization) -> Result<Stream> {
    let n = s.len();
    let times: Vec<f64> = match param {
        TimeParameterization::Uniform if n == 1 => vec![0.0],
        TimeParameterization::Uniform => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
        TimeParameterization::FromTimestamps => s
            .timestamps()
            .ok_or_else(|| Error::MissingTimestamps(s.id().to_string()))?
            .to_vec(),
    };
    Ok(prepend(s, &times))
}

/// Prepends successive timestamp differences: `(0, x_0), (t_1 - t_0, x_1), ...`.
pub fn time_diff_augment(s: &Stream) -> Result<Stream> {
    let ts = s
        .timestamps()
        .ok_or_else(|| Error::MissingTimestamps(s.id().to_string()))?;
    let diffs: Vec<f64> = std::iter::once(0.0)
        .chain(ts.windows(2).map(|w| w[1] - w[0]))
        .collect();
    Ok(prepend(s, &diffs))
}

fn prepend(s: &Stream, first: &[f64]) -> Stream {
    let d = s.dim();
    let mut coords = Vec::with_capacity(s.len() * (d + 1));
    for (t, p) in first.iter().zip(s.points()) {
        coords.push(*t);
        coords.extend_from_slice(p);
    }
    s.derive(d + 1, coords)
}

/// Lead-lag transform: `2m - 1` points in `R^{2d}` for an input of `m`
/// points. Position `2i` is `(x_i, x_i)` and position `2i + 1` is
/// `(x_i, x_{i+1})`, so the second half of each point moves first.
pub fn lead_lag(s: &Stream) -> Stream {
    let d = s.dim();
    let m = s.len();
    let mut coords = Vec::with_capacity((2 * m - 1) * 2 * d);
    for i in 0..m {
        let x = s.point(i);
        coords.extend_from_slice(x);
        coords.extend_from_slice(x);
        if i + 1 < m {
            coords.extend_from_slice(x);
            coords.extend_from_slice(s.point(i + 1));
        }
    }
    s.derive(2 * d, coords)
}

/// Invisibility transform: `(x_0, 0)` followed by `(x_i, 1)` for every input
/// point, giving `m + 1` points in `R^{d+1}`.
pub fn invisibility(s: &Stream) -> Stream {
    let d = s.dim();
    let m = s.len();
    let mut coords = Vec::with_capacity((m + 1) * (d + 1));
    coords.extend_from_slice(s.point(0));
    coords.push(0.0);
    for p in s.points() {
        coords.extend_from_slice(p);
        coords.push(1.0);
    }
    s.derive(d + 1, coords)
}
