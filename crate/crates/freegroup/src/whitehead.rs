//! Weighted Whitehead graphs, the length-change formula, strict minimality,
//! greedy length minimization, and the generic-word simplicity classifier.
//!
//! The Whitehead graph of a cyclic word w has the 2k signed letters as
//! vertices; every cyclic occurrence of the two-letter subword xy adds one
//! to the weight of the unordered pair {x, y^-1}. Reducedness of w makes
//! loops impossible, while pairs such as {a, a^-1} (from occurrences of aa)
//! are ordinary edges. For a second-kind move with characteristic pair
//! (S, a), the cyclic length changes by exactly cut(S) - deg(a), where
//! cut(S) sums the weights of edges crossing the partition (S, complement)
//! and deg(a) is the number of occurrences of a or a^-1 in w.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::alphabet::{Alphabet, Letter};
use crate::automorphism::{enumerate_whitehead_moves, Automorphism, WhiteheadMove};
use crate::cyclic::CyclicWord;
use crate::error::{Error, Result};
use crate::rng::{sample_generic_cyclic, WalkRng, DEFAULT_MAX_TRIES};

/// The weighted Whitehead graph of a cyclic word.
#[derive(Clone, Debug)]
pub struct WhiteheadGraph {
    ab: Alphabet,
    weights: Vec<u64>,       // symmetric (2k)x(2k) matrix over letter codes
    letter_counts: Vec<u64>, // occurrences of each signed letter in w
    total: u64,
}

impl WhiteheadGraph {
    /// Edge weight of the unordered pair {x, y}; zero when x = y.
    pub fn weight(&self, x: Letter, y: Letter) -> u64 {
        self.weights[x.code() * self.ab.size() + y.code()]
    }

    /// Sum of all edge weights; equals the cyclic length of the word.
    pub fn total_weight(&self) -> u64 {
        self.total
    }

    /// Occurrences of x plus occurrences of x^-1; the degree of vertex x.
    pub fn vertex_weight(&self, x: Letter) -> u64 {
        self.letter_counts[x.code()] + self.letter_counts[x.inverse().code()]
    }

    /// Total weight of edges with exactly one endpoint in the move's set S.
    pub fn cut(&self, mv: &WhiteheadMove) -> u64 {
        let mut sum = 0;
        for x in self.ab.letters() {
            if !mv.contains(x) {
                continue;
            }
            for y in self.ab.letters() {
                if !mv.contains(y) {
                    sum += self.weight(x, y);
                }
            }
        }
        sum
    }

    /// Edges with positive weight, each unordered pair once, in letter order.
    pub fn edges(&self) -> Vec<(Letter, Letter, u64)> {
        let mut out = Vec::new();
        for x in self.ab.letters() {
            for y in self.ab.letters() {
                if x.code() < y.code() {
                    let w = self.weight(x, y);
                    if w > 0 {
                        out.push((x, y, w));
                    }
                }
            }
        }
        out
    }

    /// JSON adjacency form used by the CLI.
    pub fn to_json(&self) -> serde_json::Value {
        let vertices: Vec<String> = self
            .ab
            .letters()
            .map(|l| self.ab.letter_to_string(l))
            .collect();
        let edges: Vec<serde_json::Value> = self
            .edges()
            .into_iter()
            .map(|(x, y, w)| {
                serde_json::json!({
                    "u": self.ab.letter_to_string(x),
                    "v": self.ab.letter_to_string(y),
                    "weight": w,
                })
            })
            .collect();
        serde_json::json!({
            "vertices": vertices,
            "edges": edges,
            "total_weight": self.total,
        })
    }
}

/// Builds the weighted Whitehead graph of w over the given alphabet.
pub fn whitehead_graph(ab: Alphabet, w: &CyclicWord) -> Result<WhiteheadGraph> {
    let letters = w.canonical().letters();
    if letters.iter().any(|&l| !ab.contains(l)) {
        return Err(Error::Invalid("word uses a letter outside the alphabet".into()));
    }
    let size = ab.size();
    let mut g = WhiteheadGraph {
        ab,
        weights: vec![0; size * size],
        letter_counts: vec![0; size],
        total: w.len() as u64,
    };
    let n = letters.len();
    for i in 0..n {
        let x = letters[i];
        let y = letters[(i + 1) % n];
        g.letter_counts[x.code()] += 1;
        let (u, v) = (x, y.inverse());
        g.weights[u.code() * size + v.code()] += 1;
        g.weights[v.code() * size + u.code()] += 1;
    }
    Ok(g)
}

/// Exact change of cyclic length under the move: ||tau(w)|| - ||w||.
pub fn length_change(mv: &WhiteheadMove, w: &CyclicWord) -> Result<i64> {
    let g = whitehead_graph(*mv.alphabet(), w)?;
    Ok(length_change_from_graph(&g, mv))
}

/// Length change read off a prebuilt graph: cut(S) - deg(multiplier).
pub fn length_change_from_graph(g: &WhiteheadGraph, mv: &WhiteheadMove) -> i64 {
    g.cut(mv) as i64 - g.vertex_weight(mv.multiplier()) as i64
}

/// Whether every non-inner second-kind move strictly increases ||w||.
pub fn is_strictly_minimal(ab: Alphabet, w: &CyclicWord) -> Result<bool> {
    let g = whitehead_graph(ab, w)?;
    Ok(enumerate_whitehead_moves(ab)?
        .iter()
        .filter(|mv| mv.is_non_inner())
        .all(|mv| length_change_from_graph(&g, mv) > 0))
}

/// Greedy strict descent: repeatedly applies the move with the most
/// negative length change (ties broken by enumeration order) until no move
/// shortens the word. The result has minimal cyclic length in the
/// Aut(F_k)-orbit; the applied moves are returned in order.
pub fn whitehead_minimize(
    ab: Alphabet,
    w: &CyclicWord,
) -> Result<(CyclicWord, Vec<WhiteheadMove>)> {
    let moves = enumerate_whitehead_moves(ab)?;
    let mut current = w.clone();
    let mut transcript = Vec::new();
    loop {
        let g = whitehead_graph(ab, &current)?;
        let mut best: Option<(i64, &WhiteheadMove)> = None;
        for mv in moves.iter().filter(|mv| mv.is_non_inner()) {
            let delta = length_change_from_graph(&g, mv);
            if delta < 0 && best.is_none_or(|(b, _)| delta < b) {
                best = Some((delta, mv));
            }
        }
        let Some((_, mv)) = best else {
            return Ok((current, transcript));
        };
        current = mv
            .endomorphism()
            .apply_cyclic(&current)
            .expect("automorphism image of a nontrivial class is nontrivial");
        transcript.push(*mv);
    }
}

/// Genericity threshold: subword frequencies within this distance of their
/// ideal values force strict minimality. Requires k >= 2.
pub fn genericity_epsilon0(k: usize) -> Result<BigRational> {
    if k < 2 {
        return Err(Error::Invalid("genericity thresholds need rank k >= 2".into()));
    }
    let (k, two_k) = (k as i64, 2 * k as i64);
    Ok(BigRational::new(
        BigInt::from(two_k - 3),
        BigInt::from(k * (two_k - 1) * (2 * two_k - 3)),
    ))
}

/// Decision threshold d0 between the simple ratio 1 and the gap bound:
/// 1 + (2k-3)/(4k^2-2k). Requires k >= 2.
pub fn simple_threshold_d0(k: usize) -> Result<BigRational> {
    if k < 2 {
        return Err(Error::Invalid("the simplicity threshold needs rank k >= 2".into()));
    }
    let k = k as i64;
    Ok(BigRational::one()
        + BigRational::new(BigInt::from(2 * k - 3), BigInt::from(4 * k * k - 2 * k)))
}

/// Every non-simple automorphism stretches generic words by at least
/// 1 + (2k-3)/(2k^2-k). Requires k >= 2.
pub fn stretch_gap_bound(k: usize) -> Result<BigRational> {
    if k < 2 {
        return Err(Error::Invalid("the stretch gap bound needs rank k >= 2".into()));
    }
    let k = k as i64;
    Ok(BigRational::one()
        + BigRational::new(BigInt::from(2 * k - 3), BigInt::from(2 * k * k - k)))
}

/// Verdict of the generic-word classifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapClass {
    /// Ratio at most d0: the automorphism is simple (lambda = 1).
    Simple,
    /// Ratio above d0: lambda sits above the gap bound.
    Gap,
}

/// Classifier outcome with the observed stretch ratio.
#[derive(Clone, Debug)]
pub struct Classification {
    pub class: GapClass,
    pub ratio: BigRational,
    pub word_len: usize,
}

/// Classifies phi as simple or gapped from one generic word: samples a
/// cyclic word of length n whose length-2 subword frequencies are within
/// eps of ideal, and compares ||phi(w)|| / ||w|| against d0. Requires
/// eps below `genericity_epsilon0`.
pub fn classify_by_generic_word(
    phi: &Automorphism,
    n: usize,
    eps: &BigRational,
    rng: &mut WalkRng,
) -> Result<Classification> {
    let ab = *phi.alphabet();
    let eps0 = genericity_epsilon0(ab.k())?;
    if *eps >= eps0 {
        return Err(Error::Invalid(format!(
            "classification needs eps < {}, got {}",
            eps0, eps
        )));
    }
    let w = sample_generic_cyclic(&ab, n, 2, eps, DEFAULT_MAX_TRIES, rng)?;
    let image = phi.apply_cyclic(&w);
    let ratio = BigRational::new(BigInt::from(image.len()), BigInt::from(w.len()));
    let class = if ratio <= simple_threshold_d0(ab.k())? {
        GapClass::Simple
    } else {
        GapClass::Gap
    };
    Ok(Classification { class, ratio, word_len: w.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::Endomorphism;
    use crate::rational::ratio;
    use crate::word::Word;

    fn ab2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn cyc(s: &str) -> CyclicWord {
        CyclicWord::parse(&ab2(), s).unwrap()
    }

    fn letter(ab: &Alphabet, s: &str) -> Letter {
        ab.parse_letter(s).unwrap()
    }

    #[test]
    fn graph_of_ab() {
        let ab = ab2();
        let g = whitehead_graph(ab, &cyc("ab")).unwrap();
        assert_eq!(g.total_weight(), 2);
        assert_eq!(g.weight(letter(&ab, "A"), letter(&ab, "b")), 1);
        assert_eq!(g.weight(letter(&ab, "B"), letter(&ab, "a")), 1);
        assert_eq!(g.edges().len(), 2);
    }

    #[test]
    fn graph_of_commutator() {
        let ab = ab2();
        let g = whitehead_graph(ab, &cyc("abAB")).unwrap();
        assert_eq!(g.total_weight(), 4);
        for (u, v) in [("A", "b"), ("B", "A"), ("a", "B"), ("b", "a")] {
            assert_eq!(g.weight(letter(&ab, u), letter(&ab, v)), 1, "{u}-{v}");
        }
    }

    #[test]
    fn graph_of_square_has_inverse_pair_edge() {
        let ab = ab2();
        let g = whitehead_graph(ab, &cyc("aa")).unwrap();
        assert_eq!(g.weight(letter(&ab, "A"), letter(&ab, "a")), 2);
        assert_eq!(g.total_weight(), 2);
        assert_eq!(g.vertex_weight(letter(&ab, "a")), 2);
        assert_eq!(g.vertex_weight(letter(&ab, "A")), 2);
    }

    #[test]
    fn graph_invariant_under_rotation_and_inverse() {
        let ab = ab2();
        let w = cyc("aabAB");
        let g = whitehead_graph(ab, &w).unwrap();
        let gi = whitehead_graph(ab, &w.inverse()).unwrap();
        assert_eq!(g.weights, gi.weights);
        assert_eq!(g.total, gi.total);
    }

    #[test]
    fn edge_weight_sum_is_cyclic_length() {
        let ab = ab2();
        for s in ["ab", "abAB", "aa", "aabbab", "aBaBaB"] {
            let w = cyc(s);
            let g = whitehead_graph(ab, &w).unwrap();
            let sum: u64 = g.edges().iter().map(|&(_, _, w)| w).sum();
            assert_eq!(sum, w.len() as u64, "{s}");
        }
    }

    #[test]
    fn length_change_examples() {
        let ab = ab2();
        let a = letter(&ab, "a");
        let b = letter(&ab, "b");
        let mv = WhiteheadMove::new(ab, a, &[a, b]).unwrap();
        assert_eq!(length_change(&mv, &cyc("ab")).unwrap(), 1);
        assert_eq!(length_change(&mv, &cyc("abAB")).unwrap(), 0);
    }

    #[test]
    fn length_change_examples_rank_three() {
        // Rank >= 3 separates the {x, y^-1} edge convention from {x^-1, y};
        // at rank 2 both give identical graphs on these test words.
        let ab = Alphabet::new(3).unwrap();
        let a = letter(&ab, "a");
        let cap_b = letter(&ab, "B");
        let mv = WhiteheadMove::new(ab, a, &[a, cap_b]).unwrap();
        for (s, expected) in [("abc", -1), ("aabcbAAcc", 0)] {
            let w = CyclicWord::parse(&ab, s).unwrap();
            assert_eq!(length_change(&mv, &w).unwrap(), expected, "{s}");
            let direct = mv.endomorphism().apply_cyclic(&w).unwrap().len() as i64 - w.len() as i64;
            assert_eq!(direct, expected, "{s}");
        }
    }

    #[test]
    fn formula_matches_direct_application_rank_three() {
        let ab = Alphabet::new(3).unwrap();
        let moves = enumerate_whitehead_moves(ab).unwrap();
        let mut rng = WalkRng::from_seed(43);
        for trial in 0..200 {
            let len = 2 + rng.below(20) as usize;
            let w = loop {
                let cand = Word::from_letters(
                    (0..len).map(|_| Letter::from_code(rng.below(6) as usize)),
                );
                if let Ok(c) = CyclicWord::from_word(&cand) {
                    break c;
                }
            };
            let mv = &moves[rng.below(moves.len() as u64) as usize];
            let direct = mv.endomorphism().apply_cyclic(&w).unwrap().len() as i64 - w.len() as i64;
            assert_eq!(
                length_change(mv, &w).unwrap(),
                direct,
                "trial {trial}: {} on {}",
                mv.display(),
                w.display(&ab)
            );
        }
    }

    #[test]
    fn inner_moves_do_not_change_length() {
        let ab = ab2();
        for mv in enumerate_whitehead_moves(ab).unwrap() {
            if mv.is_non_inner() {
                continue;
            }
            for s in ["ab", "abAB", "aabab", "aa"] {
                assert_eq!(length_change(&mv, &cyc(s)).unwrap(), 0, "{} on {s}", mv.display());
            }
        }
    }

    #[test]
    fn formula_matches_direct_application() {
        let ab = ab2();
        let moves = enumerate_whitehead_moves(ab).unwrap();
        let mut rng = WalkRng::from_seed(41);
        for trial in 0..200 {
            let len = 2 + rng.below(20) as usize;
            let w = loop {
                let cand = Word::from_letters(
                    (0..len).map(|_| Letter::from_code(rng.below(4) as usize)),
                );
                if let Ok(c) = CyclicWord::from_word(&cand) {
                    break c;
                }
            };
            let mv = &moves[rng.below(moves.len() as u64) as usize];
            let image = mv.endomorphism().apply_cyclic(&w).unwrap();
            let direct = image.len() as i64 - w.len() as i64;
            assert_eq!(
                length_change(mv, &w).unwrap(),
                direct,
                "trial {trial}: {} on {}",
                mv.display(),
                w.display(&ab)
            );
        }
    }

    #[test]
    fn strict_minimality_examples() {
        let ab = ab2();
        assert!(!is_strictly_minimal(ab, &cyc("abAB")).unwrap());
        assert!(!is_strictly_minimal(ab, &cyc("a")).unwrap());
        let mut rng = WalkRng::from_seed(7);
        let eps = genericity_epsilon0(2).unwrap() / ratio(2, 1);
        let w = sample_generic_cyclic(&ab, 3000, 2, &eps, DEFAULT_MAX_TRIES, &mut rng).unwrap();
        assert!(is_strictly_minimal(ab, &w).unwrap());
    }

    #[test]
    fn minimize_fixes_descent_free_words() {
        let ab = ab2();
        for s in ["abAB", "a", "aa"] {
            let w = cyc(s);
            let (min, moves) = whitehead_minimize(ab, &w).unwrap();
            assert_eq!(min.canonical(), w.canonical(), "{s}");
            assert!(moves.is_empty(), "{s}");
        }
    }

    #[test]
    fn primitive_word_minimizes_to_a_letter() {
        let ab = ab2();
        // (ab) is the image of (a) under a -> ab, so its orbit reaches
        // length 1; the witness move is (S = {a, B}, a).
        let (min, moves) = whitehead_minimize(ab, &cyc("ab")).unwrap();
        assert_eq!(min.len(), 1);
        assert_eq!(moves.len(), 1);
    }

    #[test]
    fn minimize_recovers_orbit_minimal_length() {
        let ab = ab2();
        // Hyperbolic-type map so that all test classes grow under iteration.
        let phi = Automorphism::from_endomorphism(
            Endomorphism::parse(ab, "a->ab;b->a").unwrap(),
        )
        .unwrap();
        // (a) is primitive, (aa) a proper power of a letter, and (aabb) is
        // descent-free, so peak reduction pins the orbit minima at 1, 2, 4.
        // (The commutator would not do here: its class is fixed by every
        // automorphism of F_2.)
        for (s, min_len) in [("a", 1), ("aa", 2), ("aabb", 4)] {
            let u = cyc(s);
            let mut image = u.clone();
            for _ in 0..4 {
                image = phi.apply_cyclic(&image);
            }
            assert!(image.len() > u.len());
            let (min, moves) = whitehead_minimize(ab, &image).unwrap();
            assert_eq!(min.len(), min_len, "{s}");
            assert!(!moves.is_empty(), "{s}");
            let replay = moves.iter().fold(image.clone(), |w, mv| {
                mv.endomorphism().apply_cyclic(&w).unwrap()
            });
            assert_eq!(replay.canonical(), min.canonical(), "{s}");
        }
    }

    #[test]
    fn constants_at_small_ranks() {
        assert_eq!(genericity_epsilon0(2).unwrap(), ratio(1, 30));
        assert_eq!(simple_threshold_d0(2).unwrap(), ratio(13, 12));
        assert_eq!(stretch_gap_bound(2).unwrap(), ratio(7, 6));
        assert_eq!(stretch_gap_bound(3).unwrap(), ratio(6, 5));
        assert!(genericity_epsilon0(1).is_err());
        assert!(simple_threshold_d0(1).is_err());
        assert!(stretch_gap_bound(1).is_err());
    }

    #[test]
    fn classifier_separates_simple_from_gapped() {
        let ab = ab2();
        let eps = genericity_epsilon0(2).unwrap() / ratio(2, 1);
        let nielsen = Automorphism::from_endomorphism(
            Endomorphism::parse(ab, "a->ab;b->b").unwrap(),
        )
        .unwrap();
        let mut rng = WalkRng::from_seed(11);
        let out = classify_by_generic_word(&nielsen, 4000, &eps, &mut rng).unwrap();
        assert_eq!(out.class, GapClass::Gap);
        assert!(out.ratio > simple_threshold_d0(2).unwrap());

        let swap = Automorphism::from_endomorphism(
            Endomorphism::parse(ab, "a->b;b->a").unwrap(),
        )
        .unwrap();
        let out = classify_by_generic_word(&swap, 4000, &eps, &mut rng).unwrap();
        assert_eq!(out.class, GapClass::Simple);
        assert_eq!(out.ratio, ratio(1, 1));

        let inner = Automorphism::from_endomorphism(
            Endomorphism::parse(ab, "a->abaBA;b->abbBA").unwrap(),
        )
        .unwrap();
        let out = classify_by_generic_word(&inner, 4000, &eps, &mut rng).unwrap();
        assert_eq!(out.class, GapClass::Simple);

        assert!(classify_by_generic_word(&nielsen, 100, &ratio(1, 2), &mut rng).is_err());
    }
}
