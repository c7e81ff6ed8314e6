use std::fmt;

use crate::error::{Error, Result};

/// Number of coordinates of an order-`order` signature over `d` letters:
/// `1 + d + d^2 + ... + d^order`. Overflow is an error.
pub fn sig_dim(d: usize, order: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::InvalidParameter("alphabet size must be >= 1".into()));
    }
    let overflow = || Error::DimensionOverflow { d, order };
    let mut total: usize = 1;
    let mut power: usize = 1;
    for _ in 0..order {
        power = power.checked_mul(d).ok_or_else(overflow)?;
        total = total.checked_add(power).ok_or_else(overflow)?;
    }
    Ok(total)
}

/// Offset of the first length-`k` word in graded-lexicographic order.
/// Caller guarantees no overflow (`k` within a validated order).
pub(crate) fn level_offset(d: usize, k: usize) -> usize {
    (0..k).map(|j| d.pow(j as u32)).sum()
}

/// A finite sequence of letters from `{1, ..., d}`; the basis index of one
/// signature coordinate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Letters are 1-based and must lie in `1..=d`.
    pub fn new(letters: Vec<usize>, d: usize) -> Result<Self> {
        if let Some(&letter) = letters.iter().find(|&&l| l == 0 || l > d) {
            return Err(Error::InvalidLetter { letter, dim: d });
        }
        Ok(Word(letters))
    }

    pub(crate) fn from_letters_unchecked(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub(crate) fn push(&mut self, letter: usize) {
        self.0.push(letter);
    }

    /// Position among words of the same length (lexicographic).
    pub fn level_index(&self, d: usize) -> usize {
        self.0.iter().fold(0, |acc, &l| acc * d + (l - 1))
    }

    /// Position in the graded-lexicographic basis: shorter words first,
    /// lexicographic within a length.
    pub fn index(&self, d: usize) -> usize {
        level_offset(d, self.len()) + self.level_index(d)
    }

    /// Inverse of [`Word::index`].
    pub fn from_index(mut index: usize, d: usize) -> Word {
        let mut k = 0;
        let mut size = 1;
        while index >= size {
            index -= size;
            size *= d;
            k += 1;
        }
        let mut letters = vec![0; k];
        for slot in letters.iter_mut().rev() {
            *slot = index % d + 1;
            index /= d;
        }
        Word(letters)
    }

    /// All words of length `0..=order` in basis order.
    pub fn basis(d: usize, order: usize) -> Result<Vec<Word>> {
        let n = sig_dim(d, order)?;
        Ok((0..n).map(|i| Word::from_index(i, d)).collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "()");
        }
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}
