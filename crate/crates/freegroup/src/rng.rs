//! Seeded, bit-reproducible randomness.
//!
//! All sampling in this crate draws from `WalkRng`, a thin wrapper around the
//! ChaCha8 stream cipher RNG. ChaCha output is specified byte for byte, and
//! integer draws below a bound use explicit rejection sampling here, so a
//! seed fully determines every sample sequence across platforms and versions.
//! Parallel trials use per-trial substreams of the same seed.

use num_rational::BigRational;
use num_traits::Signed;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{Alphabet, Letter};
use crate::cyclic::CyclicWord;
use crate::error::{Error, Result};
use crate::word::{reduced_word_count, reduced_words, Word};

/// Deterministic source of uniform draws.
#[derive(Clone, Debug)]
pub struct WalkRng {
    rng: ChaCha8Rng,
}

impl WalkRng {
    /// RNG for the main stream of `seed`.
    pub fn from_seed(seed: u64) -> WalkRng {
        WalkRng {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// RNG for an independent substream, used for parallel trials: trial i
    /// of a run with seed s draws from `substream(s, i)`.
    pub fn substream(seed: u64, stream: u64) -> WalkRng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        WalkRng { rng }
    }

    /// Next raw 64-bit value.
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw from 0..n (n > 0), unbiased by rejection.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        if n == 1 {
            return 0;
        }
        let threshold = n.wrapping_neg() % n;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % n;
            }
        }
    }

    /// Uniform draw from 0..n for wide bounds (n > 0).
    pub fn below_u128(&mut self, n: u128) -> u128 {
        assert!(n > 0, "below_u128(0)");
        if n <= u64::MAX as u128 {
            return self.below(n as u64) as u128;
        }
        let threshold = n.wrapping_neg() % n;
        loop {
            let r = ((self.next_u64() as u128) << 64) | self.next_u64() as u128;
            if r >= threshold {
                return r % n;
            }
        }
    }

    /// Uniform f64 in [0, 1).
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Samples one letter uniformly among those different from `forbidden`.
fn letter_avoiding(ab: &Alphabet, forbidden: Option<Letter>, rng: &mut WalkRng) -> Letter {
    match forbidden {
        None => Letter::from_code(rng.below(ab.size() as u64) as usize),
        Some(f) => {
            let r = rng.below(ab.size() as u64 - 1) as usize;
            let code = if r >= f.code() { r + 1 } else { r };
            Letter::from_code(code)
        }
    }
}

/// One step of the non-backtracking simple random walk of length n: the
/// first letter is uniform over the 2k letters, every later letter is
/// uniform over the 2k-1 letters that do not cancel the previous one. The
/// result is reduced by construction and its law is uniform over reduced
/// words of length n.
pub fn nbsrw_sample(ab: &Alphabet, n: usize, rng: &mut WalkRng) -> Word {
    let mut letters: Vec<Letter> = Vec::with_capacity(n);
    for i in 0..n {
        let forbidden = if i == 0 { None } else { Some(letters[i - 1].inverse()) };
        letters.push(letter_avoiding(ab, forbidden, rng));
    }
    Word::from_reduced(letters)
}

/// Default retry budget for rejection sampling.
pub const DEFAULT_MAX_TRIES: usize = 1000;

/// Samples a length-n cyclically reduced word uniformly (rejection on the
/// first letter not cancelling the last), then conditions on m-genericity:
/// every reduced word u with |u| = m must have  |f_w(u) - mu(u)| < eps,
/// where mu(u) = 1/(2k(2k-1)^(m-1)) is the uniform boundary measure of the
/// cylinder of u. Retries up to `max_tries` before giving up.
pub fn sample_generic_cyclic(
    ab: &Alphabet,
    n: usize,
    m: usize,
    eps: &BigRational,
    max_tries: usize,
    rng: &mut WalkRng,
) -> Result<CyclicWord> {
    if n == 0 {
        return Err(Error::Invalid("generic sample length must be positive".into()));
    }
    if m == 0 {
        return Err(Error::Invalid("genericity window m must be positive".into()));
    }
    if !eps.is_positive() {
        return Err(Error::Invalid("genericity tolerance must be positive".into()));
    }
    let target = BigRational::new(1.into(), (reduced_word_count(ab, m) as i128).into());
    for _ in 0..max_tries {
        let w = nbsrw_sample(ab, n, rng);
        if n >= 2 && w.first() == w.last().map(|l| l.inverse()) {
            continue;
        }
        let cw = CyclicWord::from_word(&w).expect("nontrivial by construction");
        let counts = cw.subword_counts(m);
        let total = BigRational::from_integer((n as i64).into());
        let generic = reduced_words(ab, m).all(|u| {
            let c = counts.get(&u).copied().unwrap_or(0);
            let f = BigRational::from_integer((c as i64).into()) / &total;
            (f - &target).abs() < *eps
        });
        if generic {
            return Ok(cw);
        }
    }
    Err(Error::SamplingFailed {
        tries: max_tries,
        reason: format!("no {m}-generic cyclically reduced word of length {n} found"),
    })
}
