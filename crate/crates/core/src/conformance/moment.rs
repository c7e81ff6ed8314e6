use crate::error::{Error, Result};
use crate::signature::{sig_dim, signature, ShuffleTable, SignatureVector};
use crate::streams::Stream;

/// Coordinatewise mean of the order-`order` signatures of `streams`.
pub fn expected_signature(streams: &[Stream], order: usize) -> Result<SignatureVector> {
    let first = streams
        .first()
        .ok_or_else(|| Error::InsufficientData("expected signature of an empty corpus".into()))?;
    let d = first.dim();
    let mut acc = vec![0.0; sig_dim(d, order)?];
    for s in streams {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: s.dim(),
            });
        }
        for (a, x) in acc.iter_mut().zip(signature(s, order)?.coeffs()) {
            *a += x;
        }
    }
    let m = streams.len() as f64;
    acc.iter_mut().for_each(|a| *a /= m);
    SignatureVector::from_coeffs(d, order, acc)
}

/// Uncentered second moment of order-`order` signatures computed from the
/// expected signature of order `2 * order`:
/// `A[i][j] = <e_i ⧢ e_j, E[Sig^{2N}]>`.
pub fn second_moment_via_shuffle(
    expected_sig_2n: &SignatureVector,
    dim: usize,
    order: usize,
) -> Result<Vec<Vec<f64>>> {
    let table = ShuffleTable::new(dim, order)?;
    second_moment_with_table(expected_sig_2n, &table)
}

pub(crate) fn second_moment_with_table(
    expected_sig_2n: &SignatureVector,
    table: &ShuffleTable,
) -> Result<Vec<Vec<f64>>> {
    let (dim, order) = (table.dim(), table.order());
    if expected_sig_2n.dim() != dim || expected_sig_2n.order() != 2 * order {
        return Err(Error::SignatureMismatch {
            d1: expected_sig_2n.dim(),
            n1: expected_sig_2n.order(),
            d2: dim,
            n2: 2 * order,
        });
    }
    let n = sig_dim(dim, order)?;
    let e = expected_sig_2n.coeffs();
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    table
                        .get(i, j)
                        .iter()
                        .map(|&(w, mult)| mult as f64 * e[w])
                        .sum()
                })
                .collect()
        })
        .collect())
}

/// Centered covariance of order-`order` signatures via the shuffle route:
/// `A - m m^T` with `m` the order-`order` truncation of the expected
/// signature.
pub fn covariance_via_shuffle(
    expected_sig_2n: &SignatureVector,
    dim: usize,
    order: usize,
) -> Result<Vec<Vec<f64>>> {
    let mut a = second_moment_via_shuffle(expected_sig_2n, dim, order)?;
    let mean = expected_sig_2n.truncate(order);
    let m = mean.coeffs();
    for (i, row) in a.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v -= m[i] * m[j];
        }
    }
    Ok(a)
}
