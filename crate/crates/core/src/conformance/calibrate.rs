use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_rows, ConformanceModel, Cutoffs, Score};
use crate::error::{Error, Result};
use crate::extended;

/// Result of split-half calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub epsilon: f64,
    pub seed: u64,
    /// Median held-out conformance: the scale below which half of fresh
    /// corpus draws already conform.
    #[serde(with = "extended::scalar")]
    pub median_r: f64,
    /// Held-out `(1 - epsilon)` quantile; scores strictly above it are
    /// anomalous.
    #[serde(with = "extended::scalar")]
    pub threshold: f64,
    /// Held-out scores at or above the threshold, ascending.
    #[serde(with = "extended::vec")]
    pub tail_scores: Vec<f64>,
    /// Size of the fitted half and the held-out half.
    pub fit_size: usize,
    pub holdout_size: usize,
}

/// Median of a sample (mean of the two middle values for even sizes;
/// `+inf` if either is infinite). Input need not be sorted.
pub fn empirical_median(values: &[f64]) -> Option<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(v[n / 2]),
        _ => {
            let (a, b) = (v[n / 2 - 1], v[n / 2]);
            Some(if a.is_infinite() || b.is_infinite() {
                a.max(b)
            } else {
                0.5 * (a + b)
            })
        }
    }
}

/// Empirical `q`-quantile with "higher" interpolation: the sorted value at
/// index `ceil(q * (n - 1))`, so the result is always an attained value.
pub fn higher_quantile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let rounded = pos.round();
    // (1 - ε)(n - 1) is often an integer up to rounding error
    let idx = if (pos - rounded).abs() < 1e-9 {
        rounded
    } else {
        pos.ceil()
    };
    Some(sorted[idx as usize])
}

/// Split-half calibration: shuffles the rows with `seed`, fits on the first
/// half (which receives the extra row when the count is odd), scores the
/// second half against it and reads off the median and `(1 - epsilon)`
/// quantile of those scores.
pub fn calibrate(
    corpus_features: &[Vec<f64>],
    epsilon: f64,
    seed: u64,
    cutoffs: Cutoffs,
) -> Result<Calibration> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    let m = corpus_features.len();
    if m < 4 {
        return Err(Error::InsufficientData(format!(
            "calibration needs at least 4 rows, got {m}"
        )));
    }
    check_rows(corpus_features, "corpus features")?;
    let mut idx: Vec<usize> = (0..m).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let fit_size = m.div_ceil(2);
    let (fit_idx, hold_idx) = idx.split_at(fit_size);
    let fit_rows: Vec<Vec<f64>> = fit_idx.iter().map(|&i| corpus_features[i].clone()).collect();
    let hold_rows: Vec<Vec<f64>> = hold_idx.iter().map(|&i| corpus_features[i].clone()).collect();

    let model = ConformanceModel::fit(fit_rows, cutoffs)?;
    let mut scores: Vec<f64> = model
        .conformance_batch(&hold_rows)?
        .into_iter()
        .map(|s| s.value)
        .collect();
    scores.sort_by(f64::total_cmp);
    let median_r = empirical_median(&scores).expect("non-empty holdout");
    let threshold = higher_quantile(&scores, 1.0 - epsilon).expect("non-empty holdout");
    let tail_scores = scores.iter().copied().filter(|&s| s >= threshold).collect();
    Ok(Calibration {
        epsilon,
        seed,
        median_r,
        threshold,
        tail_scores,
        fit_size,
        holdout_size: hold_rows.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub score: Score,
    pub is_anomaly: bool,
}

/// Flags `x` when its conformance strictly exceeds the calibrated
/// threshold. Infinite scores are always anomalous.
pub fn detect(
    model: &ConformanceModel,
    calibration: &Calibration,
    x: &[f64],
) -> Result<Detection> {
    let score = model.conformance(x)?;
    let is_anomaly = score.value > calibration.threshold || score.value.is_infinite();
    Ok(Detection { score, is_anomaly })
}
