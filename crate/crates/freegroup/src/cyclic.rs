//! Cyclic words: conjugacy classes of nontrivial elements.
//!
//! A cyclic word (w) is stored as its cyclically reduced core rotated to the
//! lexicographically least position (Booth's algorithm), so equality of
//! values is equality of conjugacy classes. Occurrence counts wrap around
//! the circle: an occurrence of v at position i reads v clockwise from i,
//! possibly winding several times.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};
use crate::word::Word;

/// Splits w as c * core * c^-1 with core cyclically reduced; returns
/// (core, c). The conjugator c is the peeled prefix, and core is empty only
/// for the trivial element.
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    let letters = w.letters();
    let mut lo = 0;
    let mut hi = letters.len();
    while hi - lo >= 2 && letters[lo] == letters[hi - 1].inverse() {
        lo += 1;
        hi -= 1;
    }
    let core = Word::from_reduced(letters[lo..hi].to_vec());
    let conj = Word::from_reduced(letters[..lo].to_vec());
    (core, conj)
}

/// A nontrivial cyclic word in canonical (least-rotation) form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CyclicWord {
    word: Word,
}

impl CyclicWord {
    /// Canonical cyclic word of the conjugacy class of `w`. Fails on the
    /// trivial element.
    pub fn from_word(w: &Word) -> Result<CyclicWord> {
        let (core, _) = cyclic_reduce(w);
        if core.is_empty() {
            return Err(Error::TrivialWord);
        }
        let start = booth_least_rotation(core.letters());
        let mut rotated: Vec<Letter> = Vec::with_capacity(core.len());
        rotated.extend_from_slice(&core.letters()[start..]);
        rotated.extend_from_slice(&core.letters()[..start]);
        Ok(CyclicWord {
            word: Word::from_reduced(rotated),
        })
    }

    /// Parses a word and takes its cyclic class.
    pub fn parse(ab: &Alphabet, s: &str) -> Result<CyclicWord> {
        CyclicWord::from_word(&Word::parse(ab, s)?)
    }

    /// Cyclically reduced length ||w||.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    /// Never true; kept for API symmetry with `Word`.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The canonical representative word.
    pub fn canonical(&self) -> &Word {
        &self.word
    }

    /// The inverse conjugacy class.
    pub fn inverse(&self) -> CyclicWord {
        CyclicWord::from_word(&self.word.inverse()).expect("inverse of nontrivial is nontrivial")
    }

    /// Wrap-around occurrences n_w(v): the number of positions i in
    /// 0..||w|| such that reading |v| letters clockwise from i spells v.
    /// Implemented on the periodic power z^p with the smallest p such that
    /// |z^(p-1)| >= 2|v|. For empty v every position counts.
    pub fn count(&self, v: &Word) -> u64 {
        let n = self.len();
        if v.is_empty() {
            return n as u64;
        }
        let p = 1 + (2 * v.len()).div_ceil(n);
        let mut rep: Vec<Letter> = Vec::with_capacity(p * n);
        for _ in 0..p {
            rep.extend_from_slice(self.word.letters());
        }
        let mut count = 0;
        for i in 0..n {
            if rep[i..i + v.len()] == *v.letters() {
                count += 1;
            }
        }
        count
    }

    /// Exact frequency f_w(v) = n_w(v) / ||w||.
    pub fn frequency(&self, v: &Word) -> BigRational {
        BigRational::new(BigInt::from(self.count(v)), BigInt::from(self.len() as u64))
    }

    /// Counts of all length-m windows in one pass; keys are the reduced
    /// words read at each position, values sum to ||w||. Requires m >= 1.
    pub fn subword_counts(&self, m: usize) -> HashMap<Word, u64> {
        assert!(m >= 1, "window length must be positive");
        let n = self.len();
        let reps = (n - 1 + m).div_ceil(n);
        let mut rep: Vec<Letter> = Vec::with_capacity(reps * n);
        for _ in 0..reps {
            rep.extend_from_slice(self.word.letters());
        }
        let mut counts: HashMap<Word, u64> = HashMap::new();
        for i in 0..n {
            let window = Word::from_reduced(rep[i..i + m].to_vec());
            *counts.entry(window).or_insert(0) += 1;
        }
        counts
    }

    /// Letter at cyclic position i (i < ||w||).
    pub fn letter(&self, i: usize) -> Letter {
        self.word.letters()[i]
    }

    /// Textual form of the canonical representative.
    pub fn display(&self, ab: &Alphabet) -> String {
        self.word.display(ab)
    }
}

/// Booth's least-rotation algorithm; returns the start index of the
/// lexicographically least rotation.
fn booth_least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    let at = |i: usize| s[i % n];
    let mut f: Vec<isize> = vec![-1; 2 * n];
    let mut k: usize = 0;
    for j in 1..2 * n {
        let sj = at(j);
        let mut i = f[j - k - 1];
        while i != -1 && sj != at(k + i as usize + 1) {
            if sj < at(k + i as usize + 1) {
                k = j - i as usize - 1;
            }
            i = f[i as usize];
        }
        if i == -1 {
            if sj == at(k) {
                f[j - k] = 0;
            } else {
                if sj < at(k) {
                    k = j;
                }
                f[j - k] = -1;
            }
        } else {
            f[j - k] = i + 1;
        }
    }
    k
}
