use std::collections::BTreeMap;

use super::word::{level_offset, sig_dim, Word};
use crate::error::{Error, Result};

/// All order-preserving interleavings of `u` and `v`, with multiplicity.
///
/// Uses `(u·a) ⧢ (v·b) = (u ⧢ v·b)·a + (u·a ⧢ v)·b` with the empty word as
/// unit.
pub fn shuffle_words(u: &Word, v: &Word) -> BTreeMap<Word, u64> {
    let mut out = BTreeMap::new();
    if u.is_empty() || v.is_empty() {
        out.insert(u.concat(v), 1);
        return out;
    }
    let (ua, a) = split_last(u);
    let (vb, b) = split_last(v);
    for (x, y, letter) in [(&ua, v, a), (u, &vb, b)] {
        for (mut w, m) in shuffle_words(x, y) {
            w.push(letter);
            *out.entry(w).or_insert(0) += m;
        }
    }
    out
}

fn split_last(w: &Word) -> (Word, usize) {
    let (last, init) = w.letters().split_last().expect("non-empty word");
    (Word::from_letters_unchecked(init.to_vec()), *last)
}

/// Memoized shuffle products of every pair of basis words up to a given
/// order, expressed over the basis of twice that order.
///
/// Built once, then read-only.
#[derive(Debug, Clone)]
pub struct ShuffleTable {
    dim: usize,
    order: usize,
    /// Row-major over `(i, j)` pairs of order-`order` basis indices; each
    /// entry lists `(index in the order-2N basis, multiplicity)`.
    entries: Vec<Vec<(usize, u64)>>,
}

impl ShuffleTable {
    pub fn new(dim: usize, order: usize) -> Result<Self> {
        let n = sig_dim(dim, order)?;
        sig_dim(dim, 2 * order)?;
        let n2 = n.checked_mul(n).ok_or(Error::DimensionOverflow { d: dim, order })?;
        let mut entries: Vec<Vec<(usize, u64)>> = Vec::with_capacity(n2);
        // Basis index i > 0 has parent (i without its last letter) < i, so
        // the recursion only looks at already-filled cells.
        let parent = |i: usize| -> (usize, usize, usize) {
            let w = Word::from_index(i, dim);
            let (init, last) = split_last(&w);
            (init.index(dim), last, w.len())
        };
        let info: Vec<Option<(usize, usize, usize)>> =
            (0..n).map(|i| (i > 0).then(|| parent(i))).collect();
        for i in 0..n {
            for j in 0..n {
                let cell = match (info[i], info[j]) {
                    (None, _) => vec![(j, 1)],
                    (_, None) => vec![(i, 1)],
                    (Some((pi, a, li)), Some((pj, b, lj))) => {
                        let k = li + lj;
                        let mut acc: BTreeMap<usize, u64> = BTreeMap::new();
                        for (src, letter) in [(pi * n + j, a), (i * n + pj, b)] {
                            for &(w, m) in &entries[src] {
                                *acc.entry(append(w, letter, k - 1, dim)).or_insert(0) += m;
                            }
                        }
                        acc.into_iter().collect()
                    }
                };
                entries.push(cell);
            }
        }
        Ok(Self {
            dim,
            order,
            entries,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Shuffle of basis words `i` and `j` as `(index, multiplicity)` pairs
    /// over the order-`2N` basis.
    pub fn get(&self, i: usize, j: usize) -> &[(usize, u64)] {
        let n = level_offset(self.dim, self.order + 1);
        &self.entries[i * n + j]
    }

    /// Bilinear extension to coefficient vectors: returns `f ⧢ g` over the
    /// order-`2N` basis.
    pub fn apply(&self, f: &[f64], g: &[f64]) -> Result<Vec<f64>> {
        let n = level_offset(self.dim, self.order + 1);
        for v in [f, g] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        let mut out = vec![0.0; level_offset(self.dim, 2 * self.order + 1)];
        for (i, fi) in f.iter().enumerate().filter(|(_, x)| **x != 0.0) {
            for (j, gj) in g.iter().enumerate().filter(|(_, x)| **x != 0.0) {
                for &(w, m) in self.get(i, j) {
                    out[w] += fi * gj * m as f64;
                }
            }
        }
        Ok(out)
    }
}

/// Graded index of `w·letter`, where `w` (graded index `w_index`) has
/// length `len`.
fn append(w_index: usize, letter: usize, len: usize, d: usize) -> usize {
    let within = w_index - level_offset(d, len);
    level_offset(d, len + 1) + within * d + (letter - 1)
}

/// `f ⧢ g` for coefficient vectors over words of length `<= order`; the
/// result lives over words of length `<= 2 * order`.
pub fn shuffle_apply(f: &[f64], g: &[f64], dim: usize, order: usize) -> Result<Vec<f64>> {
    ShuffleTable::new(dim, order)?.apply(f, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(letters: &[usize]) -> Word {
        Word::new(letters.to_vec(), 3).unwrap()
    }

    fn binomial(n: u64, k: u64) -> u64 {
        (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
    }

    #[test]
    fn single_letters() {
        let s = shuffle_words(&w(&[1]), &w(&[2]));
        assert_eq!(s, BTreeMap::from([(w(&[1, 2]), 1), (w(&[2, 1]), 1)]));
        let s = shuffle_words(&w(&[1]), &w(&[1]));
        assert_eq!(s, BTreeMap::from([(w(&[1, 1]), 2)]));
    }

    #[test]
    fn empty_is_unit() {
        let u = w(&[3, 1, 2]);
        assert_eq!(shuffle_words(&u, &Word::empty()), BTreeMap::from([(u.clone(), 1)]));
        assert_eq!(shuffle_words(&Word::empty(), &u), BTreeMap::from([(u, 1)]));
    }

    #[test]
    fn two_by_one() {
        // (12) ⧢ (3) = 123 + 132 + 312
        let s = shuffle_words(&w(&[1, 2]), &w(&[3]));
        assert_eq!(
            s,
            BTreeMap::from([(w(&[1, 2, 3]), 1), (w(&[1, 3, 2]), 1), (w(&[3, 1, 2]), 1)])
        );
    }

    #[test]
    fn multiplicity_is_binomial() {
        for i in 0..sig_dim(2, 4).unwrap() {
            for j in 0..sig_dim(2, 4).unwrap() {
                let (u, v) = (Word::from_index(i, 2), Word::from_index(j, 2));
                let total: u64 = shuffle_words(&u, &v).values().sum();
                assert_eq!(total, binomial((u.len() + v.len()) as u64, u.len() as u64));
            }
        }
    }

    #[test]
    fn table_matches_direct_expansion() {
        let (d, order) = (3, 2);
        let table = ShuffleTable::new(d, order).unwrap();
        let n = sig_dim(d, order).unwrap();
        for i in 0..n {
            for j in 0..n {
                let direct: Vec<(usize, u64)> =
                    shuffle_words(&Word::from_index(i, d), &Word::from_index(j, d))
                        .into_iter()
                        .map(|(w, m)| (w.index(d), m))
                        .collect::<BTreeMap<_, _>>()
                        .into_iter()
                        .collect();
                assert_eq!(table.get(i, j), direct.as_slice(), "pair ({i}, {j})");
            }
        }
    }

    #[test]
    fn apply_examples() {
        let (d, order) = (2, 1);
        let mut unit = vec![0.0; 3];
        unit[0] = 1.0;
        let out = shuffle_apply(&unit, &unit, d, order).unwrap();
        assert_eq!(out, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

        let e1 = vec![0.0, 1.0, 0.0];
        let e2 = vec![0.0, 0.0, 1.0];
        let out = shuffle_apply(&e1, &e2, d, order).unwrap();
        // basis: (), 1, 2, 11, 12, 21, 22
        assert_eq!(out, vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn apply_rejects_wrong_length() {
        assert!(shuffle_apply(&[1.0], &[1.0, 0.0, 0.0], 2, 1).is_err());
    }
}
