//! Generic stretching factors of endomorphisms of F_k.
//!
//! Two routes to the same number. The Monte Carlo route samples
//! non-backtracking walks and averages |phi(w_n)|_G / n for any declared
//! semi-norm. The exact route exploits the fact that, for injective phi,
//! bounded cancellation makes the increment |phi(w x)| - |phi(w)| depend
//! only on a bounded suffix of w: increments are tabulated over all suffix
//! states of window length S, the table is accepted once it is invariant
//! under extending every state one letter to the left (checked
//! exhaustively, which computes the level-(S+1) table that is then reused
//! when the check fails), and the stationary law of the suffix chain is
//! exactly uniform, so lambda is the plain average of the table. The
//! resulting denominator 2k(2k-1)^S realizes the rationality law
//! 2k lambda in Z[1/(2k-1)].
//!
//! Also here: power sequences lambda(phi^n), flux through metric balls,
//! the growth entropy nu of a random walk over a set of automorphisms,
//! Hausdorff dimension of the pushed boundary measure, and exact
//! distortion-spectrum bounds over short cyclic words.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::alphabet::{Alphabet, Letter};
use crate::automorphism::Automorphism;
use crate::automorphism::Endomorphism;
use crate::cyclic::CyclicWord;
use crate::error::{Error, Result};
use crate::rational::rational_to_f64;
use crate::rng::{nbsrw_sample, WalkRng};
use crate::word::{reduced_word_count, reduced_words, Word};

/// A declared-subadditive nonnegative function on reduced words.
pub trait SemiNorm: Sync {
    fn name(&self) -> &str;
    fn eval(&self, w: &Word) -> f64;
}

/// The word-length semi-norm |w|.
pub struct WordLength;

impl SemiNorm for WordLength {
    fn name(&self) -> &str {
        "word-length"
    }

    fn eval(&self, w: &Word) -> f64 {
        w.len() as f64
    }
}

/// Spot-checks the semi-norm laws on random pairs: subadditivity
/// |uv| <= |u| + |v| and |1| = 0.
pub fn seminorm_spot_check<N: SemiNorm + ?Sized>(
    norm: &N,
    ab: &Alphabet,
    pairs: usize,
    rng: &mut WalkRng,
) -> Result<()> {
    let id = norm.eval(&Word::empty());
    if id != 0.0 {
        return Err(Error::Invalid(format!(
            "semi-norm {} maps the identity to {id}, expected 0",
            norm.name()
        )));
    }
    for _ in 0..pairs {
        let u = nbsrw_sample(ab, 1 + rng.below(30) as usize, rng);
        let v = nbsrw_sample(ab, 1 + rng.below(30) as usize, rng);
        let (nu, nv, nuv) = (norm.eval(&u), norm.eval(&v), norm.eval(&u.concat(&v)));
        if nuv > nu + nv + 1e-9 {
            return Err(Error::Invalid(format!(
                "semi-norm {} is not subadditive: |uv| = {nuv} > {nu} + {nv}",
                norm.name()
            )));
        }
        if nu < 0.0 || nv < 0.0 {
            return Err(Error::Invalid(format!("semi-norm {} is negative", norm.name())));
        }
    }
    Ok(())
}

/// Monte Carlo summary of |phi(w_n)|_G / n over independent trials.
#[derive(Clone, Debug)]
pub struct StretchEstimate {
    pub mean: f64,
    pub values: Vec<f64>,
    pub n: usize,
    pub trials: usize,
    pub std_error: Option<f64>,
    pub seed: u64,
}

pub(crate) fn summarize_trials(values: Vec<f64>, n: usize, seed: u64) -> StretchEstimate {
    let trials = values.len();
    let mean = values.iter().sum::<f64>() / trials as f64;
    let std_error = (trials > 1).then(|| {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    });
    StretchEstimate { mean, values, n, trials, std_error, seed }
}

/// Estimates lambda by sampling `trials` non-backtracking walks of length n
/// (per-trial substreams of `seed`) and averaging |phi(w)|_G / n.
pub fn estimate_lambda<N: SemiNorm + ?Sized>(
    phi: &Endomorphism,
    seminorm: &N,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<StretchEstimate> {
    if n == 0 || trials == 0 {
        return Err(Error::Invalid("estimation needs n >= 1 and trials >= 1".into()));
    }
    let ab = *phi.alphabet();
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = WalkRng::substream(seed, t as u64);
            let w = nbsrw_sample(&ab, n, &mut rng);
            seminorm.eval(&phi.apply(&w)) / n as f64
        })
        .collect();
    Ok(summarize_trials(values, n, seed))
}

/// Exact lambda with the accepted window and a checksum of the stable
/// increment table (FNV-1a over entries in enumeration order).
#[derive(Clone, Debug)]
pub struct ExactLambda {
    pub value: BigRational,
    pub window: usize,
    pub checksum: u64,
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv_step(h: &mut u64, byte: u8) {
    *h ^= byte as u64;
    *h = h.wrapping_mul(FNV_PRIME);
}

/// Table entry values the window engine can average and fingerprint.
pub(crate) trait Increment: Clone + PartialEq {
    fn add_to(&self, acc: &mut BigRational);
    fn feed_checksum(&self, h: &mut u64);
}

impl Increment for i64 {
    fn add_to(&self, acc: &mut BigRational) {
        *acc += BigRational::from_integer(BigInt::from(*self));
    }

    fn feed_checksum(&self, h: &mut u64) {
        for b in self.to_le_bytes() {
            fnv_step(h, b);
        }
    }
}

impl Increment for BigRational {
    fn add_to(&self, acc: &mut BigRational) {
        *acc += self;
    }

    fn feed_checksum(&self, h: &mut u64) {
        for b in format!("{}/{}", self.numer(), self.denom()).bytes() {
            fnv_step(h, b);
        }
    }
}

/// Position of a reduced word in the canonical enumeration of its length.
fn word_rank(ab: &Alphabet, w: &Word) -> usize {
    let m = ab.size() - 1;
    let letters = w.letters();
    let mut rank = letters[0].code();
    for i in 1..letters.len() {
        let skip = letters[i - 1].inverse().code();
        let idx = letters[i].code() - usize::from(letters[i].code() > skip);
        rank = rank * m + idx;
    }
    rank
}

/// The non-backtracking continuations of a state, in letter order.
fn allowed_next(ab: &Alphabet, last: Letter) -> Vec<Letter> {
    ab.letters().filter(|&x| x != last.inverse()).collect()
}

pub(crate) const DEFAULT_WINDOW_BUDGET: u64 = 20_000_000;
const WINDOW_CAP: usize = 64;

/// Core window engine: `state_deltas(s, xs)` returns the increment of the
/// semi-norm when the walk in state s takes each continuation in xs. Grows
/// the window until the table is invariant under one-letter left extension
/// of every state, then returns the exact table average.
pub(crate) fn window_lambda<V, F>(ab: &Alphabet, state_deltas: F, budget: u64) -> Result<ExactLambda>
where
    V: Increment,
    F: Fn(&Word, &[Letter]) -> Vec<V>,
{
    let m = ab.size() - 1;
    let entries_at = |level: usize| reduced_word_count(ab, level) * m as u128;
    let fill = |level: usize| -> Vec<V> {
        let mut out = Vec::with_capacity(entries_at(level) as usize);
        for s in reduced_words(ab, level) {
            let xs = allowed_next(ab, s.last().expect("states are nonempty"));
            out.extend(state_deltas(&s, &xs));
        }
        out
    };

    let mut evals = entries_at(1);
    let mut cur = fill(1);
    let mut level = 1usize;
    let mut last_violations = 0usize;
    loop {
        let next_entries = entries_at(level + 1);
        if level >= WINDOW_CAP || evals + next_entries > budget as u128 {
            return Err(Error::Unstable { window: level, violations: last_violations });
        }
        let mut next = Vec::with_capacity(next_entries as usize);
        let mut violations = 0usize;
        for t in reduced_words(ab, level + 1) {
            let suffix = Word::from_reduced(t.letters()[1..].to_vec());
            let base = word_rank(ab, &suffix) * m;
            let xs = allowed_next(ab, t.last().expect("states are nonempty"));
            let vs = state_deltas(&t, &xs);
            for (i, v) in vs.iter().enumerate() {
                if *v != cur[base + i] {
                    violations += 1;
                }
            }
            next.extend(vs);
        }
        evals += next_entries;
        if violations == 0 {
            let mut sum = BigRational::zero();
            let mut checksum = FNV_OFFSET;
            for v in &cur {
                v.add_to(&mut sum);
                v.feed_checksum(&mut checksum);
            }
            let denom = BigInt::from(2 * ab.k())
                * BigInt::from(ab.size() - 1).pow(level as u32);
            let value = sum / BigRational::from_integer(denom);
            return Ok(ExactLambda { value, window: level, checksum });
        }
        last_violations = violations;
        cur = next;
        level += 1;
    }
}

/// Exact generic stretching factor of phi for the word-length semi-norm.
pub fn exact_lambda(phi: &Endomorphism) -> Result<ExactLambda> {
    exact_lambda_with(phi, DEFAULT_WINDOW_BUDGET)
}

/// Exact lambda with an explicit evaluation budget for the window engine.
pub fn exact_lambda_with(phi: &Endomorphism, budget: u64) -> Result<ExactLambda> {
    let ab = *phi.alphabet();
    window_lambda(
        &ab,
        |s: &Word, xs: &[Letter]| -> Vec<i64> {
            let base = phi.apply(s);
            let blen = base.len() as i64;
            xs.iter()
                .map(|&x| base.concat(phi.image(x)).len() as i64 - blen)
                .collect()
        },
        budget,
    )
}

/// One row of a power sequence: lambda(phi^n) and its n-th root.
#[derive(Clone, Debug)]
pub struct PowerLambda {
    pub n: usize,
    pub lambda: ExactLambda,
    pub root: f64,
}

/// Exact lambda of phi, phi^2, ..., phi^N with n-th roots for growth
/// diagnosis. Windows grow with the power; instability propagates.
pub fn lambda_power_sequence(phi: &Automorphism, max_power: usize) -> Result<Vec<PowerLambda>> {
    if max_power == 0 {
        return Err(Error::Invalid("power sequence needs N >= 1".into()));
    }
    let mut out = Vec::with_capacity(max_power);
    let mut power = phi.clone();
    for n in 1..=max_power {
        if n > 1 {
            power = phi.compose(&power);
        }
        let lambda = exact_lambda(power.endomorphism())?;
        let root = rational_to_f64(&lambda.value).powf(1.0 / n as f64);
        out.push(PowerLambda { n, lambda, root });
    }
    Ok(out)
}

/// Number of reduced words of length at most n, identity included.
pub fn ball_size(ab: &Alphabet, n: usize) -> u128 {
    (1..=n).map(|m| reduced_word_count(ab, m)).sum::<u128>() + 1
}

const FLUX_EXACT_BOUND: u128 = 30_000_000;

/// Exact flux: how many g with |g| <= n satisfy |phi(g)| > n, with the
/// ball size as the second component. Enumerates the whole ball.
pub fn flux_exact(phi: &Automorphism, n: usize) -> Result<(u128, u128)> {
    let ab = *phi.alphabet();
    let ball = ball_size(&ab, n);
    if ball > FLUX_EXACT_BOUND {
        return Err(Error::TooLarge(format!(
            "ball of radius {n} has {ball} elements; use the sampled flux estimate"
        )));
    }
    let mut count: u128 = 0;
    for m in 1..=n {
        for w in reduced_words(&ab, m) {
            if phi.apply(&w).len() > n {
                count += 1;
            }
        }
    }
    Ok((count, ball))
}

/// A scalar Monte Carlo summary.
#[derive(Clone, Debug)]
pub struct ScalarEstimate {
    pub value: f64,
    pub std_error: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

/// Estimates flux_phi(n) / #B(n) by sampling uniformly from the ball:
/// a length is drawn proportionally to sphere sizes, then a uniform
/// reduced word of that length.
pub fn flux_estimate(
    phi: &Automorphism,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<ScalarEstimate> {
    if samples == 0 {
        return Err(Error::Invalid("flux estimation needs samples >= 1".into()));
    }
    let ab = *phi.alphabet();
    let ball = ball_size(&ab, n);
    let mut cumulative = Vec::with_capacity(n + 1);
    let mut acc: u128 = 0;
    for m in 0..=n {
        acc += if m == 0 { 1 } else { reduced_word_count(&ab, m) };
        cumulative.push(acc);
    }
    let hits: u64 = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = WalkRng::substream(seed, i as u64);
            let r = rng.below_u128(ball);
            let m = cumulative.partition_point(|&c| c <= r);
            let w = nbsrw_sample(&ab, m, &mut rng);
            u64::from(phi.apply(&w).len() > n)
        })
        .sum();
    let p = hits as f64 / samples as f64;
    let std_error = (samples > 1).then(|| (p * (1.0 - p) / samples as f64).sqrt());
    Ok(ScalarEstimate { value: p, std_error, samples, seed })
}

const NU_IMAGE_BUDGET: usize = 5_000_000;

/// The sup norm on endomorphisms: maximal generator-image length, at
/// least 1 so its logarithm is defined.
pub fn sup_image_norm(phi: &Endomorphism) -> f64 {
    phi.norm().max(1) as f64
}

/// Estimates the growth entropy nu of the subgroup generated by `gens`:
/// non-backtracking random words over the generators and their formal
/// inverses are composed on images, and log norm(phi_n) / n is averaged
/// over trials.
pub fn estimate_nu<N>(
    gens: &[Automorphism],
    norm: N,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<ScalarEstimate>
where
    N: Fn(&Endomorphism) -> f64 + Sync,
{
    if gens.is_empty() || n == 0 || trials == 0 {
        return Err(Error::Invalid(
            "nu estimation needs generators, n >= 1, and trials >= 1".into(),
        ));
    }
    let mut symbols: Vec<Endomorphism> = Vec::with_capacity(2 * gens.len());
    for g in gens {
        symbols.push(g.endomorphism().clone());
        symbols.push(g.inverse().endomorphism().clone());
    }
    let s = symbols.len() as u64;
    let values = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let mut rng = WalkRng::substream(seed, t as u64);
            let mut prev = rng.below(s);
            let mut phi = symbols[prev as usize].clone();
            for step in 1..n {
                let r = rng.below(s - 1);
                let avoid = prev ^ 1;
                let sym = r + u64::from(r >= avoid);
                phi = phi.compose(&symbols[sym as usize]);
                prev = sym;
                let total: usize = phi.generator_images().map(Word::len).sum();
                if total > NU_IMAGE_BUDGET {
                    return Err(Error::Budget(format!(
                        "composed images reached {total} letters at step {step}; \
                         reduce n for expanding generator sets"
                    )));
                }
            }
            Ok(norm(&phi).ln() / n as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let est = summarize_trials(values, n, seed);
    Ok(ScalarEstimate {
        value: est.mean,
        std_error: est.std_error,
        samples: trials,
        seed,
    })
}

/// Hausdorff dimension of the boundary measure pushed by the automorphism:
/// ln(2k-1) / lambda.
pub fn hausdorff_dimension(lambda: &BigRational, k: usize) -> Result<f64> {
    if *lambda <= BigRational::zero() {
        return Err(Error::Invalid("Hausdorff dimension needs lambda > 0".into()));
    }
    if k < 1 {
        return Err(Error::Invalid("rank must be at least 1".into()));
    }
    Ok(((2 * k - 1) as f64).ln() / rational_to_f64(lambda))
}

/// Exact min/max of ||phi(w)|| / ||w|| over cyclic words of length at most L.
#[derive(Clone, Debug)]
pub struct SpectrumBounds {
    pub min: BigRational,
    pub max: BigRational,
    pub straddles_one: bool,
}

const SPECTRUM_ENUM_BOUND: u128 = 2_000_000;

/// Enumerates every cyclic word with ||w|| <= L (one representative per
/// rotation class) and bounds the distortion spectrum on them.
pub fn distortion_spectrum_bounds(phi: &Automorphism, max_len: usize) -> Result<SpectrumBounds> {
    if max_len == 0 {
        return Err(Error::Invalid("spectrum bounds need L >= 1".into()));
    }
    let ab = *phi.alphabet();
    let total: u128 = (1..=max_len).map(|m| reduced_word_count(&ab, m)).sum();
    if total > SPECTRUM_ENUM_BOUND {
        return Err(Error::TooLarge(format!(
            "enumerating {total} words up to length {max_len} is over the exact bound; \
             lower L"
        )));
    }
    let mut min: Option<BigRational> = None;
    let mut max: Option<BigRational> = None;
    for m in 1..=max_len {
        for w in reduced_words(&ab, m) {
            if m >= 2 && w.first() == w.last().map(Letter::inverse) {
                continue;
            }
            let cw = CyclicWord::from_word(&w).expect("enumerated words are nontrivial");
            if cw.canonical() != &w {
                continue;
            }
            let ratio = BigRational::new(
                BigInt::from(phi.apply_cyclic(&cw).len()),
                BigInt::from(m),
            );
            if min.as_ref().is_none_or(|b| ratio < *b) {
                min = Some(ratio.clone());
            }
            if max.as_ref().is_none_or(|b| ratio > *b) {
                max = Some(ratio);
            }
        }
    }
    let min = min.expect("length-1 words always enumerated");
    let max = max.expect("length-1 words always enumerated");
    let one = BigRational::from_integer(BigInt::from(1));
    let straddles_one = min < one && max > one;
    Ok(SpectrumBounds { min, max, straddles_one })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::Automorphism;
    use crate::rational::{rat, ratio};

    fn ab2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn endo(s: &str) -> Endomorphism {
        Endomorphism::parse(ab2(), s).unwrap()
    }

    fn auto(s: &str) -> Automorphism {
        Automorphism::from_endomorphism(endo(s)).unwrap()
    }

    #[test]
    fn ranks_match_enumeration_order() {
        let ab = ab2();
        for len in 1..=4 {
            for (i, w) in reduced_words(&ab, len).enumerate() {
                assert_eq!(word_rank(&ab, &w), i);
            }
        }
    }

    #[test]
    fn exact_identity_is_one() {
        let out = exact_lambda(&Endomorphism::identity(ab2())).unwrap();
        assert_eq!(out.value, rat(1));
        assert_eq!(out.window, 1);
    }

    #[test]
    fn exact_nielsen_is_seven_sixths() {
        let out = exact_lambda(&endo("a->ab;b->b")).unwrap();
        assert_eq!(out.value, ratio(7, 6));
        assert_eq!(out.window, 1);
        let again = exact_lambda(&endo("a->ab;b->b")).unwrap();
        assert_eq!(again.checksum, out.checksum);
    }

    #[test]
    fn exact_isometries_are_one() {
        for s in ["a->b;b->a", "a->A;b->b", "a->B;b->a"] {
            let out = exact_lambda(&endo(s)).unwrap();
            assert_eq!(out.value, rat(1), "{s}");
        }
    }

    #[test]
    fn exact_conjugation_is_one_with_larger_window() {
        let out = exact_lambda(&endo("a->abaBA;b->abbBA")).unwrap();
        assert_eq!(out.value, rat(1));
        assert!(out.window > 1);
    }

    #[test]
    fn rationality_denominator_law() {
        for s in ["a->ab;b->b", "a->ab;b->a", "a->aab;b->b", "a->bab;b->BABab"] {
            let out = exact_lambda(&endo(s)).unwrap();
            let scale = BigRational::from_integer(
                BigInt::from(4) * BigInt::from(3).pow(out.window as u32),
            );
            assert!((out.value * scale).is_integer(), "{s}");
        }
    }

    #[test]
    fn non_injective_reports_unstable() {
        let err = exact_lambda_with(&endo("a->a;b->a"), 50_000).unwrap_err();
        match err {
            Error::Unstable { window, violations } => {
                assert!(window >= 1);
                assert!(violations > 0);
            }
            other => panic!("expected instability, got {other}"),
        }
    }

    fn brute_level_average(phi: &Endomorphism, level: usize) -> BigRational {
        let ab = *phi.alphabet();
        let mut sum = BigInt::from(0);
        let mut entries = BigInt::from(0);
        for s in reduced_words(&ab, level) {
            let base = phi.apply(&s);
            for x in allowed_next(&ab, s.last().unwrap()) {
                let ext = base.concat(phi.image(x));
                sum += BigInt::from(ext.len() as i64 - base.len() as i64);
                entries += 1;
            }
        }
        BigRational::new(sum, entries)
    }

    #[test]
    fn stable_window_average_is_sound_one_level_up() {
        for s in ["a->ab;b->b", "a->ab;b->a", "a->aab;b->b"] {
            let phi = endo(s);
            let out = exact_lambda(&phi).unwrap();
            assert_eq!(brute_level_average(&phi, out.window), out.value, "{s}");
            assert_eq!(brute_level_average(&phi, out.window + 1), out.value, "{s}");
        }
    }

    #[test]
    fn mc_identity_is_exactly_one() {
        let est = estimate_lambda(&Endomorphism::identity(ab2()), &WordLength, 500, 4, 3).unwrap();
        assert_eq!(est.mean, 1.0);
        assert!(est.values.iter().all(|&v| v == 1.0));
        assert_eq!(est.std_error, Some(0.0));
    }

    #[test]
    fn mc_is_reproducible_and_near_exact() {
        let phi = endo("a->ab;b->b");
        let a = estimate_lambda(&phi, &WordLength, 20_000, 6, 42).unwrap();
        let b = estimate_lambda(&phi, &WordLength, 20_000, 6, 42).unwrap();
        assert_eq!(a.values, b.values);
        assert!((a.mean - 7.0 / 6.0).abs() < 0.02, "mean {}", a.mean);
        assert!(a.std_error.unwrap() > 0.0);
    }

    #[test]
    fn power_sequence_of_relabeling_is_flat() {
        let phi = auto("a->b;b->a");
        let seq = lambda_power_sequence(&phi, 4).unwrap();
        for row in &seq {
            assert_eq!(row.lambda.value, rat(1));
            assert_eq!(row.root, 1.0);
        }
    }

    #[test]
    fn flux_examples() {
        let (f, ball) = flux_exact(&Automorphism::identity(ab2()), 6).unwrap();
        assert_eq!(f, 0);
        assert_eq!(ball, ball_size(&ab2(), 6));
        // Conjugation by a: b and b^-1 leave the 1-ball.
        let (f, ball) = flux_exact(&auto("a->a;b->abA"), 1).unwrap();
        assert_eq!((f, ball), (2, 5));
    }

    #[test]
    fn flux_ratio_grows_for_nielsen() {
        let phi = auto("a->ab;b->b");
        let first = {
            let (f, ball) = flux_exact(&phi, 2).unwrap();
            f as f64 / ball as f64
        };
        let last = {
            let (f, ball) = flux_exact(&phi, 8).unwrap();
            f as f64 / ball as f64
        };
        assert!(last > first, "flux ratio should grow: {first} vs {last}");
        assert!(last > 0.4, "flux ratio at n = 8 is {last}");
    }

    #[test]
    fn flux_estimate_tracks_exact() {
        let phi = auto("a->ab;b->b");
        let (f, ball) = flux_exact(&phi, 6).unwrap();
        let exact = f as f64 / ball as f64;
        let est = flux_estimate(&phi, 6, 4000, 9).unwrap();
        assert!((est.value - exact).abs() < 4.0 * est.std_error.unwrap() + 0.01);
    }

    #[test]
    fn nu_of_inner_generators_vanishes() {
        let gens = [auto("a->a;b->abA"), auto("a->baB;b->b")];
        let est = estimate_nu(&gens, sup_image_norm, 400, 4, 11).unwrap();
        assert!(est.value >= 0.0);
        assert!(est.value < 0.05, "inner nu estimate {}", est.value);
    }

    #[test]
    fn nu_of_identity_is_zero() {
        let gens = [Automorphism::identity(ab2())];
        let est = estimate_nu(&gens, sup_image_norm, 50, 2, 1).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn nu_positive_for_independent_nielsen_pair() {
        let ab = Alphabet::new(3).unwrap();
        let gens = [
            Automorphism::parse(ab, "a->ab").unwrap(),
            Automorphism::parse(ab, "b->ba").unwrap(),
        ];
        let est = estimate_nu(&gens, sup_image_norm, 20, 3, 7).unwrap();
        assert!(est.value > 0.05, "expected positive drift, got {}", est.value);
    }

    #[test]
    fn nu_rejects_empty_generator_set() {
        assert!(estimate_nu(&[], sup_image_norm, 10, 1, 0).is_err());
    }

    #[test]
    fn hausdorff_examples() {
        let ln3 = 3f64.ln();
        assert!((hausdorff_dimension(&rat(1), 2).unwrap() - ln3).abs() < 1e-12);
        assert!(
            (hausdorff_dimension(&ratio(7, 6), 2).unwrap() - 6.0 / 7.0 * ln3).abs() < 1e-12
        );
        assert!((hausdorff_dimension(&rat(2), 2).unwrap() - ln3 / 2.0).abs() < 1e-12);
        assert!(hausdorff_dimension(&rat(0), 2).is_err());
    }

    #[test]
    fn spectrum_bounds_examples() {
        let id = Automorphism::identity(ab2());
        let out = distortion_spectrum_bounds(&id, 5).unwrap();
        assert_eq!(out.min, rat(1));
        assert_eq!(out.max, rat(1));
        assert!(!out.straddles_one);

        let phi = auto("a->ab;b->b");
        let out = distortion_spectrum_bounds(&phi, 6).unwrap();
        assert!(out.min < rat(1));
        assert!(out.max > rat(1));
        assert!(out.straddles_one);
    }

    #[test]
    fn seminorm_checks() {
        let ab = ab2();
        let mut rng = WalkRng::from_seed(5);
        seminorm_spot_check(&WordLength, &ab, 50, &mut rng).unwrap();
        struct Bad;
        impl SemiNorm for Bad {
            fn name(&self) -> &str {
                "squared-length"
            }
            fn eval(&self, w: &Word) -> f64 {
                (w.len() * w.len()) as f64
            }
        }
        assert!(seminorm_spot_check(&Bad, &ab, 50, &mut rng).is_err());
    }
}
