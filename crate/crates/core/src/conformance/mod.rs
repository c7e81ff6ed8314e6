//! Variance norm and conformance scoring against a corpus of feature
//! vectors.
//!
//! For a corpus with empirical mean `m` and centered covariance `C`
//! (population normalization), the variance norm of `x` is the dual norm of
//! the covariance form,
//!
//! ```text
//! ||x|| = sup { φ(x) : Var(φ) <= 1 } = sqrt(x^T C^+ x)   if x ∈ range(C)
//!       = +inf                                          otherwise
//! ```
//!
//! and the conformance of `x` is `min_y ||x - y||` over corpus members `y`.
//! Rank is decided spectrally: eigenvalues below `spectral_cutoff * λ_max`
//! span null directions, and a vector is out of span when any null-direction
//! coordinate exceeds `null_tolerance * max(1, ||x||_2)`.

mod calibrate;
mod moment;
mod persist;

pub use calibrate::{calibrate, detect, empirical_median, higher_quantile, Calibration, Detection};
pub use moment::{covariance_via_shuffle, expected_signature, second_moment_via_shuffle};

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::Pipeline;

pub const DEFAULT_SPECTRAL_CUTOFF: f64 = 1e-10;
pub const DEFAULT_NULL_TOLERANCE: f64 = 1e-8;

/// Rank-decision tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoffs {
    /// Relative eigenvalue threshold τ.
    pub spectral_cutoff: f64,
    /// Relative out-of-span tolerance η.
    pub null_tolerance: f64,
}

impl Default for Cutoffs {
    fn default() -> Self {
        Self {
            spectral_cutoff: DEFAULT_SPECTRAL_CUTOFF,
            null_tolerance: DEFAULT_NULL_TOLERANCE,
        }
    }
}

impl Cutoffs {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("spectral_cutoff", self.spectral_cutoff),
            ("null_tolerance", self.null_tolerance),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Conformance of one vector to a corpus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    /// Finite, or `+inf` when every difference to the corpus leaves the span.
    pub value: f64,
    /// Corpus row attaining the minimum (lowest index on ties); `None` when
    /// the score is infinite.
    pub nearest_index: Option<usize>,
    pub out_of_span: bool,
}

impl Score {
    fn infinite() -> Self {
        Self {
            value: f64::INFINITY,
            nearest_index: None,
            out_of_span: true,
        }
    }
}

/// A fitted corpus model. Immutable after construction.
#[derive(Debug, Clone)]
pub struct ConformanceModel {
    feature_dim: usize,
    mean: Vec<f64>,
    /// Nonincreasing, nonnegative.
    eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` pairs with `eigenvalues[k]`; orthonormal.
    eigenvectors: Vec<Vec<f64>>,
    corpus_features: Vec<Vec<f64>>,
    cutoffs: Cutoffs,
    pipeline: Option<Pipeline>,
    calibration: Option<Calibration>,
    // derived state, rebuilt on load
    retained: usize,
    inv_eigenvalues: Vec<f64>,
    /// Corpus rows in eigen-coordinates, row-major `m x p`.
    projected_corpus: Vec<f64>,
}

pub(crate) fn check_rows(rows: &[Vec<f64>], what: &str) -> Result<usize> {
    let p = rows.first().map(Vec::len).unwrap_or(0);
    if p == 0 {
        return Err(Error::InsufficientData(format!("{what} has no columns")));
    }
    for r in rows {
        if r.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: r.len(),
            });
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(what.to_string()));
        }
    }
    Ok(p)
}

impl ConformanceModel {
    /// Fits mean and centered covariance (`1/m` normalization) of the rows.
    pub fn fit(corpus_features: Vec<Vec<f64>>, cutoffs: Cutoffs) -> Result<Self> {
        cutoffs.validate()?;
        let m = corpus_features.len();
        if m < 2 {
            return Err(Error::InsufficientData(format!(
                "corpus needs at least 2 rows, got {m}"
            )));
        }
        let p = check_rows(&corpus_features, "corpus features")?;

        let mut mean = vec![0.0; p];
        for r in &corpus_features {
            for (acc, x) in mean.iter_mut().zip(r) {
                *acc += x;
            }
        }
        mean.iter_mut().for_each(|x| *x /= m as f64);

        let centered = DMatrix::from_fn(m, p, |i, j| corpus_features[i][j] - mean[j]);
        let mut cov = centered.tr_mul(&centered) / m as f64;
        // exact symmetry for the eigensolver
        for i in 0..p {
            for j in 0..i {
                let v = 0.5 * (cov[(i, j)] + cov[(j, i)]);
                cov[(i, j)] = v;
                cov[(j, i)] = v;
            }
        }
        let eig = SymmetricEigen::new(cov);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k].max(0.0)).collect();
        let eigenvectors: Vec<Vec<f64>> = order
            .iter()
            .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
            .collect();

        Self::from_parts(
            mean,
            eigenvalues,
            eigenvectors,
            corpus_features,
            cutoffs,
            None,
            None,
        )
    }

    pub(crate) fn from_parts(
        mean: Vec<f64>,
        eigenvalues: Vec<f64>,
        eigenvectors: Vec<Vec<f64>>,
        corpus_features: Vec<Vec<f64>>,
        cutoffs: Cutoffs,
        pipeline: Option<Pipeline>,
        calibration: Option<Calibration>,
    ) -> Result<Self> {
        let p = mean.len();
        if eigenvalues.len() != p
            || eigenvectors.len() != p
            || eigenvectors.iter().any(|v| v.len() != p)
        {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: eigenvalues.len(),
            });
        }
        if corpus_features.len() < 2 {
            return Err(Error::InsufficientData("model needs >= 2 corpus rows".into()));
        }
        check_rows(&corpus_features, "corpus features")?;
        if corpus_features[0].len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: corpus_features[0].len(),
            });
        }
        if eigenvalues.windows(2).any(|w| w[1] > w[0]) || eigenvalues.iter().any(|l| !(*l >= 0.0))
        {
            return Err(Error::InvalidParameter(
                "eigenvalues must be nonnegative and nonincreasing".into(),
            ));
        }
        let lambda_max = eigenvalues.first().copied().unwrap_or(0.0);
        let floor = cutoffs.spectral_cutoff * lambda_max;
        let retained = eigenvalues
            .iter()
            .take_while(|&&l| l > 0.0 && l >= floor)
            .count();
        let inv_eigenvalues = eigenvalues[..retained].iter().map(|l| 1.0 / l).collect();
        let mut projected_corpus = Vec::with_capacity(corpus_features.len() * p);
        for row in &corpus_features {
            project_into(&eigenvectors, row, &mut projected_corpus);
        }
        Ok(Self {
            feature_dim: p,
            mean,
            eigenvalues,
            eigenvectors,
            corpus_features,
            cutoffs,
            pipeline,
            calibration,
            retained,
            inv_eigenvalues,
            projected_corpus,
        })
    }

    pub fn with_pipeline(mut self, pipeline: Pipeline) -> Result<Self> {
        if pipeline.feature_dim() != self.feature_dim {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim,
                found: pipeline.feature_dim(),
            });
        }
        self.pipeline = Some(pipeline);
        Ok(self)
    }

    pub fn with_calibration(mut self, calibration: Calibration) -> Self {
        self.calibration = Some(calibration);
        self
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[Vec<f64>] {
        &self.eigenvectors
    }

    pub fn corpus_features(&self) -> &[Vec<f64>] {
        &self.corpus_features
    }

    pub fn corpus_len(&self) -> usize {
        self.corpus_features.len()
    }

    pub fn cutoffs(&self) -> Cutoffs {
        self.cutoffs
    }

    /// Number of eigen-directions treated as in-span.
    pub fn rank(&self) -> usize {
        self.retained
    }

    pub fn pipeline(&self) -> Option<&Pipeline> {
        self.pipeline.as_ref()
    }

    pub fn calibration(&self) -> Option<&Calibration> {
        self.calibration.as_ref()
    }

    /// `C = Σ λ_k v_k v_k^T`, as a dense row-major matrix.
    pub fn reconstructed_covariance(&self) -> Vec<Vec<f64>> {
        let p = self.feature_dim;
        let mut c = vec![vec![0.0; p]; p];
        for (l, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for i in 0..p {
                for j in 0..p {
                    c[i][j] += l * v[i] * v[j];
                }
            }
        }
        c
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.feature_dim {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim,
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("query vector".into()));
        }
        Ok(())
    }

    /// Norm from eigen-coordinates `c` of a vector with Euclidean norm `len`.
    fn norm_from_coords(&self, coords: impl Iterator<Item = f64>, len: f64) -> f64 {
        let tol = self.cutoffs.null_tolerance * len.max(1.0);
        let mut sum = 0.0;
        for (k, c) in coords.enumerate() {
            if k < self.retained {
                sum += c * c * self.inv_eigenvalues[k];
            } else if c.abs() > tol {
                return f64::INFINITY;
            }
        }
        sum.sqrt()
    }

    /// Variance norm of `x` (no re-centering applied to `x`).
    pub fn variance_norm(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let mut coords = Vec::with_capacity(self.feature_dim);
        project_into(&self.eigenvectors, x, &mut coords);
        let len = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(self.norm_from_coords(coords.into_iter(), len))
    }

    /// Minimum variance-norm distance from `x` to the corpus rows.
    pub fn conformance(&self, x: &[f64]) -> Result<Score> {
        self.check_dim(x)?;
        let p = self.feature_dim;
        let mut px = Vec::with_capacity(p);
        project_into(&self.eigenvectors, x, &mut px);
        let mut best = Score::infinite();
        for (idx, py) in self.projected_corpus.chunks_exact(p).enumerate() {
            let len = px
                .iter()
                .zip(py)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let v = self.norm_from_coords(px.iter().zip(py).map(|(a, b)| a - b), len);
            if v < best.value {
                best = Score {
                    value: v,
                    nearest_index: Some(idx),
                    out_of_span: false,
                };
            }
        }
        Ok(best)
    }

    /// Scores many vectors in parallel; output follows input order.
    pub fn conformance_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<Score>> {
        xs.par_iter().map(|x| self.conformance(x)).collect()
    }
}

fn project_into(eigenvectors: &[Vec<f64>], x: &[f64], out: &mut Vec<f64>) {
    out.extend(
        eigenvectors
            .iter()
            .map(|v| v.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()),
    );
}
