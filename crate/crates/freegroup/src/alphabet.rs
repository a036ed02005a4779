//! Signed alphabets for free groups.
//!
//! The basis of F_k is a_1, ..., a_k; the signed alphabet also contains the
//! formal inverses. Letters are encoded as integers in `0..2k` with the
//! pairing (2i, 2i+1) for (a_{i+1}, a_{i+1}^-1), so inversion is `code ^ 1`
//! and the canonical letter order a_1 < a_1^-1 < a_2 < ... is the code order.

use crate::error::{Error, Result};

/// One signed letter, identified by its integer code.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Letter(u16);

impl Letter {
    /// The positive generator with 0-based index `i`.
    pub fn generator(i: usize) -> Letter {
        Letter((i as u16) << 1)
    }

    /// Builds a letter directly from its code.
    pub fn from_code(code: usize) -> Letter {
        Letter(code as u16)
    }

    /// Integer code in `0..2k`.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    /// The formal inverse.
    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    /// 0-based index of the underlying generator.
    pub fn index(self) -> usize {
        (self.0 >> 1) as usize
    }

    /// True for a_i^-1 letters.
    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    /// The positive letter of this letter's generator pair.
    pub fn positive(self) -> Letter {
        Letter(self.0 & !1)
    }
}

const MAX_RANK: usize = 16384;

/// The signed alphabet of F_k.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct Alphabet {
    k: u16,
}

impl Alphabet {
    /// Alphabet of rank k (k >= 1; the interesting range is k >= 2, and the
    /// gap and genericity constants are only defined there).
    pub fn new(k: usize) -> Result<Alphabet> {
        if k == 0 || k > MAX_RANK {
            return Err(Error::Invalid(format!("rank must be in 1..={MAX_RANK}, got {k}")));
        }
        Ok(Alphabet { k: k as u16 })
    }

    /// The rank k.
    pub fn k(&self) -> usize {
        self.k as usize
    }

    /// Number of signed letters, 2k.
    pub fn size(&self) -> usize {
        2 * self.k as usize
    }

    /// Whether `l` belongs to this alphabet.
    pub fn contains(&self, l: Letter) -> bool {
        l.code() < self.size()
    }

    /// All signed letters in canonical order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.size()).map(Letter::from_code)
    }

    /// The positive generators a_1, ..., a_k.
    pub fn generators(&self) -> impl Iterator<Item = Letter> {
        (0..self.k()).map(Letter::generator)
    }

    /// Whether the compact one-character spelling (a, A, b, B, ...) applies.
    pub fn compact(&self) -> bool {
        self.k() <= 26
    }

    /// Text form of one letter: compact character for k <= 26, otherwise
    /// `a<i>` / `A<i>` with a 1-based index.
    pub fn letter_to_string(&self, l: Letter) -> String {
        debug_assert!(self.contains(l));
        if self.compact() {
            let c = (b'a' + l.index() as u8) as char;
            if l.is_inverse() {
                c.to_ascii_uppercase().to_string()
            } else {
                c.to_string()
            }
        } else {
            let head = if l.is_inverse() { 'A' } else { 'a' };
            format!("{head}{}", l.index() + 1)
        }
    }

    /// Parses one letter in either spelling.
    pub fn parse_letter(&self, s: &str) -> Result<Letter> {
        let mut letters = crate::word::parse_letters(self, s)?;
        if letters.len() != 1 {
            return Err(Error::Parse(format!("expected a single letter, got {s:?}")));
        }
        Ok(letters.pop().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letter_pairing() {
        let a = Letter::generator(0);
        assert_eq!(a.code(), 0);
        assert_eq!(a.inverse().code(), 1);
        assert_eq!(a.inverse().inverse(), a);
        assert!(!a.is_inverse());
        assert!(a.inverse().is_inverse());
        assert_eq!(Letter::generator(3).index(), 3);
        assert_eq!(Letter::from_code(7).positive().code(), 6);
    }

    #[test]
    fn canonical_letter_order_is_code_order() {
        let ab = Alphabet::new(3).unwrap();
        let codes: Vec<usize> = ab.letters().map(Letter::code).collect();
        assert_eq!(codes, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn letter_spellings() {
        let ab = Alphabet::new(2).unwrap();
        assert_eq!(ab.letter_to_string(Letter::generator(0)), "a");
        assert_eq!(ab.letter_to_string(Letter::generator(1).inverse()), "B");
        let big = Alphabet::new(30).unwrap();
        assert_eq!(big.letter_to_string(Letter::generator(27)), "a28");
        assert_eq!(big.letter_to_string(Letter::generator(27).inverse()), "A28");
    }

    #[test]
    fn rank_bounds() {
        assert!(Alphabet::new(0).is_err());
        assert!(Alphabet::new(1).is_ok());
        assert!(Alphabet::new(MAX_RANK + 1).is_err());
    }
}
