use serde::{Deserialize, Serialize};

use super::word::{level_offset, sig_dim, Word};
use crate::error::{Error, Result};
use crate::streams::Stream;

/// Coefficients of a truncated tensor-algebra element, indexed by words in
/// graded-lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureVector {
    dim: usize,
    order: usize,
    coeffs: Vec<f64>,
}

impl SignatureVector {
    /// The unit `(1, 0, ..., 0)`: signature of a constant stream.
    pub fn unit(dim: usize, order: usize) -> Result<Self> {
        let mut coeffs = vec![0.0; sig_dim(dim, order)?];
        coeffs[0] = 1.0;
        Ok(Self { dim, order, coeffs })
    }

    pub fn from_coeffs(dim: usize, order: usize, coeffs: Vec<f64>) -> Result<Self> {
        let expected = sig_dim(dim, order)?;
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: coeffs.len(),
            });
        }
        Ok(Self { dim, order, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Coefficients of the length-`k` words.
    pub fn level(&self, k: usize) -> &[f64] {
        let start = level_offset(self.dim, k);
        &self.coeffs[start..start + self.dim.pow(k as u32)]
    }

    fn level_mut(&mut self, k: usize) -> &mut [f64] {
        let start = level_offset(self.dim, k);
        &mut self.coeffs[start..start + self.dim.pow(k as u32)]
    }

    /// Coefficient of `w`, or `None` when `w` is longer than the order.
    pub fn coeff(&self, w: &Word) -> Option<f64> {
        (w.len() <= self.order).then(|| self.coeffs[w.index(self.dim)])
    }

    /// Inner product with a functional given in the same basis.
    pub fn pair(&self, f: &[f64]) -> f64 {
        self.coeffs.iter().zip(f).map(|(a, b)| a * b).sum()
    }

    /// Truncates to a lower order.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let n = level_offset(self.dim, order + 1);
        Self {
            dim: self.dim,
            order,
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    /// In-place right multiplication by the exponential of one linear
    /// segment, `self <- self ⊗ exp(delta)`, by Horner's scheme per level.
    fn mul_segment_exp(&mut self, delta: &[f64], scratch: &mut [Vec<f64>; 2]) {
        for k in (1..=self.order).rev() {
            // acc runs through levels 1..k: acc_j = (acc_{j-1} + S_{j-1}) ⊗ Δ / (k - j + 1)
            let [acc, next] = scratch;
            acc.clear();
            acc.push(self.coeffs[0]);
            for j in 1..=k {
                let c = 1.0 / (k - j + 1) as f64;
                next.clear();
                let prev = self.level(j - 1);
                for (i, a) in acc.iter().enumerate() {
                    let base = if j == 1 { *a } else { a + prev[i] };
                    for &x in delta {
                        next.push(base * x * c);
                    }
                }
                std::mem::swap(acc, next);
            }
            for (s, a) in self.level_mut(k).iter_mut().zip(acc.iter()) {
                *s += a;
            }
        }
    }
}

/// Signature of a single linear segment with the given increment: the
/// coefficient of word `(i_1, ..., i_k)` is `Δ_{i_1} ... Δ_{i_k} / k!`.
pub fn segment_signature(increment: &[f64], order: usize) -> Result<SignatureVector> {
    let mut out = SignatureVector::unit(increment.len(), order)?;
    let d = increment.len();
    for k in 1..=order {
        let (lower, upper) = out.coeffs.split_at_mut(level_offset(d, k));
        let prev = &lower[level_offset(d, k - 1)..];
        let cur = &mut upper[..d.pow(k as u32)];
        for (i, p) in prev.iter().enumerate() {
            for (l, x) in increment.iter().enumerate() {
                cur[i * d + l] = p * x / k as f64;
            }
        }
    }
    Ok(out)
}

/// Truncated tensor product: the coefficient of `w` is the sum over all
/// splits `w = u·v` of `a[u] * b[v]`.
pub fn chen_product(a: &SignatureVector, b: &SignatureVector) -> Result<SignatureVector> {
    if a.dim != b.dim || a.order != b.order {
        return Err(Error::SignatureMismatch {
            d1: a.dim,
            n1: a.order,
            d2: b.dim,
            n2: b.order,
        });
    }
    let d = a.dim;
    let mut out = SignatureVector {
        dim: d,
        order: a.order,
        coeffs: vec![0.0; a.coeffs.len()],
    };
    for k in 0..=a.order {
        let cur = out.level_mut(k);
        for j in 0..=k {
            let left = a.level(j);
            let right = b.level(k - j);
            let stride = right.len();
            for (i, x) in left.iter().enumerate() {
                if *x == 0.0 {
                    continue;
                }
                for (l, y) in right.iter().enumerate() {
                    cur[i * stride + l] += x * y;
                }
            }
        }
    }
    Ok(out)
}

/// Order-`order` signature of the piecewise-linear interpolation of `s`.
pub fn signature(s: &Stream, order: usize) -> Result<SignatureVector> {
    let d = s.dim();
    let mut sig = SignatureVector::unit(d, order)?;
    let mut scratch = [Vec::new(), Vec::new()];
    let mut delta = vec![0.0; d];
    for i in 1..s.len() {
        let (a, b) = (s.point(i - 1), s.point(i));
        for ((dst, x), y) in delta.iter_mut().zip(a).zip(b) {
            *dst = y - x;
        }
        if delta.iter().all(|x| *x == 0.0) {
            continue;
        }
        sig.mul_segment_exp(&delta, &mut scratch);
    }
    Ok(sig)
}
