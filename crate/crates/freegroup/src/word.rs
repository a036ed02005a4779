//! Freely reduced words.
//!
//! `Word` maintains the invariant that no letter is adjacent to its inverse,
//! so every value represents the normal form of a group element. Reduction
//! happens on construction and on every concatenation.

use std::cmp::Ordering;

use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};

/// A freely reduced word over a signed alphabet.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    /// The empty word.
    pub fn empty() -> Word {
        Word { letters: Vec::new() }
    }

    /// A single-letter word.
    pub fn single(l: Letter) -> Word {
        Word { letters: vec![l] }
    }

    /// Builds a word by free reduction of the given letter sequence.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        let mut w = Word::empty();
        for l in letters {
            w.push(l);
        }
        w
    }

    /// Wraps a sequence that is already freely reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Word {
        debug_assert!(is_reduced(&letters));
        Word { letters }
    }

    /// The letter sequence.
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Word length |w|.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// Whether this is the identity element.
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// First letter, if any.
    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    /// Last letter, if any.
    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    /// Appends one letter, cancelling against the current last letter.
    pub fn push(&mut self, l: Letter) {
        if self.letters.last() == Some(&l.inverse()) {
            self.letters.pop();
        } else {
            self.letters.push(l);
        }
    }

    /// Appends a reduced word, cancelling at the junction.
    pub fn push_word(&mut self, rhs: &Word) {
        // Letters of rhs cannot cancel against each other, so the plain
        // reducing push is linear overall.
        self.letters.reserve(rhs.len());
        for &l in &rhs.letters {
            self.push(l);
        }
    }

    /// The reduced product self * rhs.
    pub fn concat(&self, rhs: &Word) -> Word {
        let mut out = self.clone();
        out.push_word(rhs);
        out
    }

    /// The inverse word.
    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// The reduced n-th power (n >= 0).
    pub fn repeat(&self, n: usize) -> Word {
        let mut out = Word::empty();
        for _ in 0..n {
            out.push_word(self);
        }
        out
    }

    /// Occurrences of `v` as a factor of `w` (no wrap-around): the number of
    /// positions i with w = w' v w'' and |w'| = i. Both words are reduced, so
    /// this is plain substring counting; in particular the count is 0
    /// whenever |v| > |w|. For empty `v` every position counts, |w| + 1.
    pub fn count_factor(&self, v: &Word) -> u64 {
        if v.is_empty() {
            return self.len() as u64 + 1;
        }
        if v.len() > self.len() {
            return 0;
        }
        let mut count = 0;
        for i in 0..=self.len() - v.len() {
            if self.letters[i..i + v.len()] == v.letters[..] {
                count += 1;
            }
        }
        count
    }

    /// Total order by length first, then lexicographically by letter codes.
    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }

    /// Parses the textual form (see `parse_letters`); the bare string `e`
    /// denotes the empty word.
    pub fn parse(ab: &Alphabet, s: &str) -> Result<Word> {
        if s.trim() == "e" {
            return Ok(Word::empty());
        }
        Ok(Word::from_letters(parse_letters(ab, s)?))
    }

    /// Textual form, `e` for the empty word.
    pub fn display(&self, ab: &Alphabet) -> String {
        if self.is_empty() {
            return "e".to_string();
        }
        let mut out = String::new();
        for &l in &self.letters {
            out.push_str(&ab.letter_to_string(l));
        }
        out
    }
}

pub(crate) fn is_reduced(letters: &[Letter]) -> bool {
    letters.windows(2).all(|p| p[0] != p[1].inverse())
}

/// Parses a raw letter sequence (without free reduction). Accepts the compact
/// spelling `a`, `A`, `b`, ... for k <= 26 and the indexed spelling `a12` /
/// `A12` for any rank; whitespace is ignored. Note the letter named `e`
/// (fifth generator) is still written `e` inside longer words; only the full
/// input string `e` means the empty word, so a bare fifth generator must be
/// spelled `a5`.
pub(crate) fn parse_letters(ab: &Alphabet, s: &str) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        if !c.is_ascii_alphabetic() {
            return Err(Error::Parse(format!("unexpected character {c:?} in word {s:?}")));
        }
        let upper = c.is_ascii_uppercase();
        let base = c.to_ascii_lowercase();
        // Indexed spelling: 'a' or 'A' immediately followed by digits.
        if base == 'a' && chars.peek().is_some_and(|d| d.is_ascii_digit()) {
            let mut digits = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_digit() {
                    digits.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            let idx: usize = digits
                .parse()
                .map_err(|_| Error::Parse(format!("bad letter index {digits:?}")))?;
            if idx == 0 || idx > ab.k() {
                return Err(Error::Parse(format!(
                    "letter a{idx} out of range for rank {}",
                    ab.k()
                )));
            }
            let mut l = Letter::generator(idx - 1);
            if upper {
                l = l.inverse();
            }
            out.push(l);
            continue;
        }
        if !ab.compact() {
            return Err(Error::Parse(format!(
                "rank {} words need the indexed spelling a<i>/A<i>, got {c:?}",
                ab.k()
            )));
        }
        let idx = (base as u8 - b'a') as usize;
        if idx >= ab.k() {
            return Err(Error::Parse(format!(
                "letter {c:?} out of range for rank {}",
                ab.k()
            )));
        }
        let mut l = Letter::generator(idx);
        if upper {
            l = l.inverse();
        }
        out.push(l);
    }
    Ok(out)
}

/// Iterator over all freely reduced words of a fixed length, in the odometer
/// order induced by the canonical letter order. There are 2k(2k-1)^(len-1)
/// of them for len >= 1.
pub fn reduced_words(ab: &Alphabet, len: usize) -> ReducedWords {
    ReducedWords {
        ab: *ab,
        len,
        current: Vec::new(),
        done: false,
    }
}

/// See [`reduced_words`].
pub struct ReducedWords {
    ab: Alphabet,
    len: usize,
    current: Vec<Letter>,
    done: bool,
}

impl ReducedWords {
    fn smallest_allowed(&self, prev: Option<Letter>, from_code: usize) -> Option<Letter> {
        let forbidden = prev.map(|p| p.inverse());
        (from_code..self.ab.size())
            .map(Letter::from_code)
            .find(|&l| Some(l) != forbidden)
    }
}

impl Iterator for ReducedWords {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        if self.current.is_empty() {
            // First item: the length-0 word or a...a filled minimally.
            for i in 0..self.len {
                let prev = if i == 0 { None } else { Some(self.current[i - 1]) };
                self.current.push(self.smallest_allowed(prev, 0)?);
            }
            if self.len == 0 {
                self.done = true;
                return Some(Word::empty());
            }
            return Some(Word::from_reduced(self.current.clone()));
        }
        // Advance the odometer from the rightmost position.
        let mut pos = self.len;
        loop {
            if pos == 0 {
                self.done = true;
                return None;
            }
            pos -= 1;
            let prev = if pos == 0 { None } else { Some(self.current[pos - 1]) };
            if let Some(next) = self.smallest_allowed(prev, self.current[pos].code() + 1) {
                self.current[pos] = next;
                for i in pos + 1..self.len {
                    let prev = Some(self.current[i - 1]);
                    self.current[i] = self.smallest_allowed(prev, 0).unwrap();
                }
                return Some(Word::from_reduced(self.current.clone()));
            }
        }
    }
}

/// Number of freely reduced words of the given length, 2k(2k-1)^(len-1).
pub fn reduced_word_count(ab: &Alphabet, len: usize) -> u128 {
    if len == 0 {
        return 1;
    }
    let mut n = 2 * ab.k() as u128;
    for _ in 1..len {
        n *= (2 * ab.k() - 1) as u128;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    #[test]
    fn free_reduction_examples() {
        let ab = ab2();
        // a b a^-1 a b^-1 a^-1 reduces to the empty word.
        let w = Word::parse(&ab, "abAaBA").unwrap();
        assert!(w.is_empty());
        assert_eq!(w.display(&ab), "e");
        // a b b^-1 a reduces to a a.
        let w = Word::parse(&ab, "abBa").unwrap();
        assert_eq!(w.display(&ab), "aa");
    }

    #[test]
    fn concat_cancels_at_junction() {
        let ab = ab2();
        let u = Word::parse(&ab, "abA").unwrap();
        let v = Word::parse(&ab, "aBa").unwrap();
        assert_eq!(u.concat(&v).display(&ab), "aa");
        let winv = u.concat(&u.inverse());
        assert!(winv.is_empty());
    }

    #[test]
    fn inverse_reverses_and_flips() {
        let ab = ab2();
        let w = Word::parse(&ab, "abAB").unwrap();
        assert_eq!(w.inverse().display(&ab), "baBA");
        assert_eq!(w.inverse().inverse(), w);
    }

    #[test]
    fn parse_rejects_garbage() {
        let ab = ab2();
        assert!(Word::parse(&ab, "ab7").is_err());
        assert!(Word::parse(&ab, "ac").is_err());
        assert!(Word::parse(&ab, "a-b").is_err());
        assert!(Word::parse(&ab, "b2").is_err());
    }

    #[test]
    fn indexed_spelling_round_trip() {
        let ab = Alphabet::new(30).unwrap();
        let w = Word::parse(&ab, "a1A29a30").unwrap();
        assert_eq!(w.display(&ab), "a1A29a30");
        let small = ab2();
        assert_eq!(Word::parse(&small, "a1A2").unwrap().display(&small), "aB");
    }

    #[test]
    fn count_factor_examples() {
        let ab = ab2();
        let w = Word::parse(&ab, "ababa").unwrap();
        let v = Word::parse(&ab, "aba").unwrap();
        assert_eq!(w.count_factor(&v), 2);
        assert_eq!(w.count_factor(&Word::parse(&ab, "ab").unwrap()), 2);
        assert_eq!(w.count_factor(&Word::parse(&ab, "ba").unwrap()), 2);
        // Longer than w: zero occurrences.
        assert_eq!(v.count_factor(&w), 0);
        assert_eq!(w.count_factor(&Word::empty()), 6);
    }

    #[test]
    fn shortlex_orders_by_length_then_code() {
        let ab = ab2();
        let a = Word::parse(&ab, "a").unwrap();
        let b = Word::parse(&ab, "b").unwrap();
        let ainv = Word::parse(&ab, "A").unwrap();
        let ab_w = Word::parse(&ab, "ab").unwrap();
        assert_eq!(a.shortlex_cmp(&ainv), Ordering::Less);
        assert_eq!(ainv.shortlex_cmp(&b), Ordering::Less);
        assert_eq!(b.shortlex_cmp(&ab_w), Ordering::Less);
    }

    #[test]
    fn reduced_word_enumeration_counts() {
        let ab = ab2();
        for len in 0..5 {
            let words: Vec<Word> = reduced_words(&ab, len).collect();
            assert_eq!(words.len() as u128, reduced_word_count(&ab, len));
            for w in &words {
                assert_eq!(w.len(), len);
                assert!(is_reduced(w.letters()));
            }
            // Enumeration is strictly increasing in the odometer order.
            for pair in words.windows(2) {
                assert!(pair[0].letters() < pair[1].letters());
            }
        }
        assert_eq!(reduced_word_count(&ab, 3), 36);
    }
}
