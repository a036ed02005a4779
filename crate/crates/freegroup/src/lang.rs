//! Normal automata over signed alphabets and their edge Markov chains.
//!
//! A normal automaton is nonempty, has at least one edge and at least one
//! accept state, and is strongly connected. Random words from its language
//! are produced by the associated Markov chain whose states are the
//! labeled edges: from an edge e the walk moves to a uniformly random edge
//! leaving the head of e (or per an optional positive weight table). The
//! stationary distribution mu0 is computed exactly over the rationals and
//! verified symbolically. A sampled label word is completed to the
//! language by appending a precomputed shortest path to an accept state,
//! which changes any stretch statistic by at most a constant.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Letter};
use crate::automorphism::Endomorphism;
use crate::error::{Error, Result};
use crate::rng::WalkRng;
use crate::stretch::{summarize_trials, SemiNorm, StretchEstimate};
use crate::word::Word;

/// On-disk automaton description; labels are letters like `"a"`, `"B"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutomatonSpec {
    pub states: Vec<String>,
    pub start: Vec<String>,
    pub accept: Vec<String>,
    pub edges: Vec<AutomatonEdgeSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutomatonEdgeSpec {
    pub from: String,
    pub label: String,
    pub to: String,
}

/// One labeled edge, by state indices.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct NdfaEdge {
    pub from: usize,
    pub label: Letter,
    pub to: usize,
}

/// A nondeterministic automaton over the signed alphabet of F_k.
/// Multi-edges are allowed and the transition relation may be partial.
#[derive(Clone, Debug)]
pub struct Ndfa {
    ab: Alphabet,
    states: Vec<String>,
    start: Vec<usize>,
    accept: Vec<usize>,
    edges: Vec<NdfaEdge>,
}

impl Ndfa {
    pub fn new(
        ab: Alphabet,
        states: Vec<String>,
        start: Vec<usize>,
        accept: Vec<usize>,
        edges: Vec<NdfaEdge>,
    ) -> Result<Ndfa> {
        if states.is_empty() {
            return Err(Error::Invalid("automaton needs at least one state".into()));
        }
        if start.is_empty() {
            return Err(Error::Invalid("automaton needs at least one start state".into()));
        }
        for &q in start.iter().chain(&accept) {
            if q >= states.len() {
                return Err(Error::Invalid(format!("state index {q} out of range")));
            }
        }
        for e in &edges {
            if e.from >= states.len() || e.to >= states.len() {
                return Err(Error::Invalid("edge endpoint out of range".into()));
            }
            if !ab.contains(e.label) {
                return Err(Error::Invalid(format!(
                    "edge label code {} outside the rank-{} alphabet",
                    e.label.code(),
                    ab.k()
                )));
            }
        }
        Ok(Ndfa { ab, states, start, accept, edges })
    }

    pub fn from_spec(ab: Alphabet, spec: &AutomatonSpec) -> Result<Ndfa> {
        let mut index = HashMap::new();
        for (i, name) in spec.states.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::Invalid("state names must be nonempty".into()));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate state {name:?}")));
            }
        }
        let resolve = |name: &String| -> Result<usize> {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::Invalid(format!("unknown state {name:?}")))
        };
        let start = spec.start.iter().map(resolve).collect::<Result<Vec<_>>>()?;
        let accept = spec.accept.iter().map(resolve).collect::<Result<Vec<_>>>()?;
        let edges = spec
            .edges
            .iter()
            .map(|e| {
                Ok(NdfaEdge {
                    from: resolve(&e.from)?,
                    label: ab.parse_letter(&e.label)?,
                    to: resolve(&e.to)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ndfa::new(ab, spec.states.clone(), start, accept, edges)
    }

    pub fn to_spec(&self) -> AutomatonSpec {
        AutomatonSpec {
            states: self.states.clone(),
            start: self.start.iter().map(|&q| self.states[q].clone()).collect(),
            accept: self.accept.iter().map(|&q| self.states[q].clone()).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| AutomatonEdgeSpec {
                    from: self.states[e.from].clone(),
                    label: self.ab.letter_to_string(e.label),
                    to: self.states[e.to].clone(),
                })
                .collect(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.ab
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn start_states(&self) -> &[usize] {
        &self.start
    }

    pub fn accept_states(&self) -> &[usize] {
        &self.accept
    }

    pub fn edges(&self) -> &[NdfaEdge] {
        &self.edges
    }

    fn reachable(&self, from: usize, reversed: bool) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        seen[from] = true;
        let mut stack = vec![from];
        while let Some(q) = stack.pop() {
            for e in &self.edges {
                let (src, dst) = if reversed { (e.to, e.from) } else { (e.from, e.to) };
                if src == q && !seen[dst] {
                    seen[dst] = true;
                    stack.push(dst);
                }
            }
        }
        seen
    }

    /// States reachable from the start set by reading the label sequence.
    pub fn read(&self, labels: &[Letter]) -> Vec<usize> {
        let mut cur: Vec<bool> = vec![false; self.states.len()];
        for &q in &self.start {
            cur[q] = true;
        }
        for &l in labels {
            let mut next = vec![false; self.states.len()];
            for e in &self.edges {
                if e.label == l && cur[e.from] {
                    next[e.to] = true;
                }
            }
            cur = next;
        }
        (0..self.states.len()).filter(|&q| cur[q]).collect()
    }

    /// Whether the label sequence is in the language.
    pub fn accepts(&self, labels: &[Letter]) -> bool {
        let reached = self.read(labels);
        self.accept.iter().any(|q| reached.contains(q))
    }
}

/// Names every normality condition the automaton violates; empty means normal.
pub fn normality_violations(m: &Ndfa) -> Vec<String> {
    let mut violations = Vec::new();
    if m.accept.is_empty() {
        violations.push("no accept states".to_string());
    }
    if m.edges.is_empty() {
        violations.push("no edges".to_string());
    }
    if !m.edges.is_empty() {
        let fwd = m.reachable(0, false);
        let bwd = m.reachable(0, true);
        if !(0..m.state_count()).all(|q| fwd[q] && bwd[q]) {
            violations.push("not strongly connected".to_string());
        }
    }
    violations
}

/// Verifies normality: accept states exist, at least one edge, strongly
/// connected. Every violated condition is named.
pub fn check_normal(m: &Ndfa) -> Result<()> {
    let violations = normality_violations(m);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(format!("automaton is not normal: {}", violations.join("; "))))
    }
}

/// The Markov chain on labeled edges: from e, move to an edge leaving the
/// head of e, uniformly or per a positive weight table. Carries the exact
/// stationary distribution.
#[derive(Clone, Debug)]
pub struct EdgeChain {
    ndfa: Ndfa,
    out: Vec<Vec<usize>>,
    prob: Vec<Vec<BigRational>>,
    mu0: Vec<BigRational>,
}

/// Builds the uniform-transition edge chain of a normal automaton.
pub fn build_edge_chain(m: &Ndfa) -> Result<EdgeChain> {
    build_chain(m, None)
}

/// Builds an edge chain with explicit transition weights: `weights` maps
/// consecutive edge pairs (e, f) to positive weights, rows are normalized.
/// Every consecutive pair must be weighted.
pub fn build_weighted_edge_chain(
    m: &Ndfa,
    weights: &[(usize, usize, BigRational)],
) -> Result<EdgeChain> {
    build_chain(m, Some(weights))
}

fn build_chain(m: &Ndfa, weights: Option<&[(usize, usize, BigRational)]>) -> Result<EdgeChain> {
    check_normal(m)?;
    let ne = m.edges.len();
    let mut by_origin: Vec<Vec<usize>> = vec![Vec::new(); m.state_count()];
    for (f, e) in m.edges.iter().enumerate() {
        by_origin[e.from].push(f);
    }
    let out: Vec<Vec<usize>> = m.edges.iter().map(|e| by_origin[e.to].clone()).collect();

    let mut table = HashMap::new();
    if let Some(weights) = weights {
        for &(e, f, ref w) in weights {
            if e >= ne || f >= ne {
                return Err(Error::Invalid("weight pair indexes a missing edge".into()));
            }
            if m.edges[e].to != m.edges[f].from {
                return Err(Error::Invalid(format!(
                    "weight pair ({e}, {f}) is not a consecutive edge pair"
                )));
            }
            if !w.is_positive() {
                return Err(Error::Invalid(format!("weight for pair ({e}, {f}) must be > 0")));
            }
            if table.insert((e, f), w.clone()).is_some() {
                return Err(Error::Invalid(format!("duplicate weight for pair ({e}, {f})")));
            }
        }
    }
    let mut prob = Vec::with_capacity(ne);
    for (e, successors) in out.iter().enumerate() {
        let row: Vec<BigRational> = if weights.is_some() {
            let raw: Vec<BigRational> = successors
                .iter()
                .map(|&f| {
                    table.get(&(e, f)).cloned().ok_or_else(|| {
                        Error::Invalid(format!("missing weight for consecutive pair ({e}, {f})"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let total: BigRational = raw.iter().cloned().sum();
            raw.into_iter().map(|w| w / &total).collect()
        } else {
            let deg = BigRational::from_integer(BigInt::from(successors.len()));
            successors.iter().map(|_| BigRational::one() / &deg).collect()
        };
        prob.push(row);
    }

    let mu0 = stationary_distribution(ne, &out, &prob)?;
    let chain = EdgeChain { ndfa: m.clone(), out, prob, mu0 };
    chain.verify_stationary()?;
    Ok(chain)
}

/// Solves mu P = mu, sum mu = 1 by exact Gaussian elimination on
/// (P^T - I) with the first row replaced by the normalization.
fn stationary_distribution(
    ne: usize,
    out: &[Vec<usize>],
    prob: &[Vec<BigRational>],
) -> Result<Vec<BigRational>> {
    let mut a = vec![vec![BigRational::zero(); ne + 1]; ne];
    for j in 0..ne {
        a[0][j] = BigRational::one();
    }
    a[0][ne] = BigRational::one();
    for (e, successors) in out.iter().enumerate() {
        for (i, &f) in successors.iter().enumerate() {
            if f == 0 {
                continue;
            }
            a[f][e] = prob[e][i].clone();
        }
    }
    for f in 1..ne {
        a[f][f] -= BigRational::one();
    }

    for col in 0..ne {
        let pivot = (col..ne)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Internal("singular stationary system".into()))?;
        a.swap(col, pivot);
        let inv = a[col][col].clone();
        for j in col..=ne {
            a[col][j] = &a[col][j] / &inv;
        }
        for r in 0..ne {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in col..=ne {
                a[r][j] = &a[r][j] - &factor * &a[col][j];
            }
        }
    }
    Ok((0..ne).map(|i| a[i][ne].clone()).collect())
}

impl EdgeChain {
    pub fn automaton(&self) -> &Ndfa {
        &self.ndfa
    }

    pub fn edge_count(&self) -> usize {
        self.ndfa.edges.len()
    }

    /// The exact stationary distribution over edges.
    pub fn stationary(&self) -> &[BigRational] {
        &self.mu0
    }

    /// p_{e,f}; zero when f does not leave the head of e.
    pub fn transition_probability(&self, e: usize, f: usize) -> BigRational {
        self.out[e]
            .iter()
            .position(|&g| g == f)
            .map(|i| self.prob[e][i].clone())
            .unwrap_or_else(BigRational::zero)
    }

    /// Symbolic checks: mu0 P = mu0, sum mu0 = 1, mu0 > 0 everywhere.
    pub fn verify_stationary(&self) -> Result<()> {
        let ne = self.edge_count();
        let total: BigRational = self.mu0.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::Internal("stationary distribution does not sum to 1".into()));
        }
        if !self.mu0.iter().all(|p| p.is_positive()) {
            return Err(Error::Internal("stationary distribution is not positive".into()));
        }
        for f in 0..ne {
            let mut acc = BigRational::zero();
            for e in 0..ne {
                if let Some(i) = self.out[e].iter().position(|&g| g == f) {
                    acc += &self.mu0[e] * &self.prob[e][i];
                }
            }
            if acc != self.mu0[f] {
                return Err(Error::Internal("mu0 P = mu0 fails".into()));
            }
        }
        Ok(())
    }

    /// Uniform distribution over the edges leaving the start states.
    pub fn start_uniform_mu(&self) -> Vec<BigRational> {
        let leaving: Vec<usize> = (0..self.edge_count())
            .filter(|&e| self.ndfa.start.contains(&self.ndfa.edges[e].from))
            .collect();
        let share = BigRational::new(BigInt::one(), BigInt::from(leaving.len()));
        let mut mu = vec![BigRational::zero(); self.edge_count()];
        for e in leaving {
            mu[e] = share.clone();
        }
        mu
    }
}

fn check_distribution(chain: &EdgeChain, mu: &[BigRational]) -> Result<()> {
    if mu.len() != chain.edge_count() {
        return Err(Error::Invalid(format!(
            "initial distribution has {} entries for {} edges",
            mu.len(),
            chain.edge_count()
        )));
    }
    if mu.iter().any(|p| p.is_negative()) {
        return Err(Error::Invalid("initial distribution has negative entries".into()));
    }
    let total: BigRational = mu.iter().cloned().sum();
    if !total.is_one() {
        return Err(Error::Invalid("initial distribution does not sum to 1".into()));
    }
    Ok(())
}

/// Draws an index from exact rational weights by rescaling to a common
/// denominator and sampling a uniform integer below it.
fn sample_rational_index(weights: &[BigRational], rng: &mut WalkRng) -> Result<usize> {
    let mut denom = BigInt::one();
    for w in weights {
        denom = num_integer::lcm(denom, w.denom().clone());
    }
    let scaled: Vec<BigInt> = weights.iter().map(|w| (w * &denom).to_integer()).collect();
    let total: BigInt = scaled.iter().sum();
    let total: u128 = total
        .to_u128()
        .ok_or_else(|| Error::TooLarge("initial distribution denominators too large".into()))?;
    let mut r = rng.below_u128(total) as i128;
    for (i, s) in scaled.iter().enumerate() {
        r -= s.to_i128().expect("summands bounded by the checked total");
        if r < 0 {
            return Ok(i);
        }
    }
    Err(Error::Internal("rational sampling fell off the table".into()))
}

/// Runs the chain for n steps from an initial edge drawn from mu and
/// returns the label sequence (not freely reduced) with the final state.
/// For n = 0 the word is empty and the state is the origin of the drawn
/// initial edge.
pub fn sample_word(
    chain: &EdgeChain,
    mu: &[BigRational],
    n: usize,
    rng: &mut WalkRng,
) -> Result<(Vec<Letter>, usize)> {
    check_distribution(chain, mu)?;
    let edges = chain.ndfa.edges();
    let first = sample_rational_index(mu, rng)?;
    if n == 0 {
        return Ok((Vec::new(), edges[first].from));
    }
    let mut labels = Vec::with_capacity(n);
    let mut cur = first;
    labels.push(edges[cur].label);
    for _ in 1..n {
        let successors = &chain.out[cur];
        let uniform = chain.prob[cur].iter().all(|p| p == &chain.prob[cur][0]);
        let next = if uniform {
            successors[rng.below(successors.len() as u64) as usize]
        } else {
            successors[sample_rational_index(&chain.prob[cur], rng)?]
        };
        cur = next;
        labels.push(edges[cur].label);
    }
    Ok((labels, edges[cur].to))
}

/// Shortest completions u_q from each state to an accept state, ties
/// broken by BFS visit order.
#[derive(Clone, Debug)]
pub struct CompletionTable {
    completions: Vec<Vec<Letter>>,
}

impl CompletionTable {
    /// Multi-source BFS from the accept states along reversed edges.
    pub fn build(m: &Ndfa) -> Result<CompletionTable> {
        if m.accept_states().is_empty() {
            return Err(Error::Invalid("completion needs at least one accept state".into()));
        }
        let n = m.state_count();
        let mut next_edge: Vec<Option<usize>> = vec![None; n];
        let mut done = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        for &q in m.accept_states() {
            if !done[q] {
                done[q] = true;
                queue.push_back(q);
            }
        }
        while let Some(q) = queue.pop_front() {
            for (i, e) in m.edges().iter().enumerate() {
                if e.to == q && !done[e.from] {
                    done[e.from] = true;
                    next_edge[e.from] = Some(i);
                    queue.push_back(e.from);
                }
            }
        }
        if !done.iter().all(|&d| d) {
            return Err(Error::Invalid(
                "some states cannot reach an accept state; automaton is not normal".into(),
            ));
        }
        let completions = (0..n)
            .map(|mut q| {
                let mut u = Vec::new();
                while let Some(e) = next_edge[q] {
                    u.push(m.edges()[e].label);
                    q = m.edges()[e].to;
                }
                u
            })
            .collect::<Vec<_>>();
        for u in &completions {
            if u.len() >= m.state_count() {
                return Err(Error::Internal("completion longer than the state count".into()));
            }
        }
        Ok(CompletionTable { completions })
    }

    /// The completion word for one state; empty iff the state accepts.
    pub fn completion(&self, q: usize) -> &[Letter] {
        &self.completions[q]
    }

    pub fn max_len(&self) -> usize {
        self.completions.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Appends the completion of the final state, after checking that the
/// sampled labels are actually readable from a start state to it.
pub fn complete_to_language(
    m: &Ndfa,
    table: &CompletionTable,
    labels: &[Letter],
    final_state: usize,
) -> Result<Vec<Letter>> {
    if final_state >= m.state_count() {
        return Err(Error::Invalid(format!("final state {final_state} out of range")));
    }
    if !m.read(labels).contains(&final_state) {
        return Err(Error::Contract(format!(
            "the walk did not start at a start state: {:?} is not reachable reading the labels",
            m.state_name(final_state)
        )));
    }
    let mut out = labels.to_vec();
    out.extend_from_slice(table.completion(final_state));
    Ok(out)
}

/// Pushes an unreduced label sequence through a letter map into F_k.
pub fn apply_letter_map(phi: &Endomorphism, labels: &[Letter]) -> Word {
    let mut out = Word::empty();
    for &l in labels {
        out.push_word(phi.image(l));
    }
    out
}

/// Monte Carlo estimate of the stretch lambda(M, phi, |.|_G): chain words
/// of length n, pushed through the letter map, measured by the semi-norm.
pub fn estimate_language_lambda<N: SemiNorm + ?Sized>(
    chain: &EdgeChain,
    phi: &Endomorphism,
    seminorm: &N,
    mu: &[BigRational],
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<StretchEstimate> {
    if n == 0 || trials == 0 {
        return Err(Error::Invalid("estimation needs n >= 1 and trials >= 1".into()));
    }
    check_distribution(chain, mu)?;
    let values = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let mut rng = WalkRng::substream(seed, t as u64);
            let (labels, _) = sample_word(chain, mu, n, &mut rng)?;
            Ok(seminorm.eval(&apply_letter_map(phi, &labels)) / n as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(summarize_trials(values, n, seed))
}

/// The automaton of all freely reduced words: states are the signed
/// letters, an edge labeled y runs from x to y whenever y != x^-1; all
/// states start and accept.
pub fn nbsrw_automaton(ab: Alphabet) -> Ndfa {
    let states: Vec<String> = ab.letters().map(|l| ab.letter_to_string(l)).collect();
    let all: Vec<usize> = (0..ab.size()).collect();
    let mut edges = Vec::new();
    for x in ab.letters() {
        for y in ab.letters() {
            if y != x.inverse() {
                edges.push(NdfaEdge { from: x.code(), label: y, to: y.code() });
            }
        }
    }
    Ndfa::new(ab, states, all.clone(), all, edges).expect("construction is valid")
}
