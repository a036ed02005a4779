//! Free simplicial actions of F_k presented by finite metric graphs.
//!
//! A connected graph with positive rational edge lengths and a basepoint
//! presents the action of its fundamental group on the universal cover. A
//! BFS spanning tree from the basepoint yields the geometric basis: one
//! element s_e per positive non-tree edge e, spelled tree-path in, edge,
//! tree-path back. Lengths of group elements under the action then reduce
//! to finite tables: the edge lengths l(e(x)), the junction costs
//! r_{xy} = d_T(t(e(x)), o(e(y))) between consecutive basis letters, and
//! the two tree tails to and from the basepoint. Both the translation
//! length of a cyclic word and the basepoint displacement of a word are
//! exact rational sums over those tables, and both are cross-checkable
//! against an explicit lift of the word to an edge path.
//!
//! The stretching factor of the action relative to an identification of
//! F_k with the deck group is computed by the same suffix-window engine as
//! the word-length case, with exact rational increments.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Letter};
use crate::automorphism::{is_automorphism, Automorphism, Endomorphism};
use crate::cyclic::CyclicWord;
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, rational_to_f64};
use crate::stretch::{
    estimate_lambda, window_lambda, ExactLambda, SemiNorm, StretchEstimate,
    DEFAULT_WINDOW_BUDGET,
};
use crate::word::Word;

/// On-disk graph description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    pub basepoint: String,
}

/// One edge of a [`GraphSpec`]; `length` is a rational like `"3/2"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: String,
    pub from: String,
    pub to: String,
    pub length: String,
}

/// A validated connected metric graph with a basepoint. Each listed edge
/// stands for the pair {e, e-bar}; even directed codes 2i are the listed
/// orientation of edge i, odd codes the reverse.
#[derive(Clone, Debug)]
pub struct MetricGraph {
    vertices: Vec<String>,
    basepoint: usize,
    ids: Vec<String>,
    from: Vec<usize>,
    to: Vec<usize>,
    lengths: Vec<BigRational>,
}

impl MetricGraph {
    pub fn from_spec(spec: &GraphSpec) -> Result<MetricGraph> {
        if spec.vertices.is_empty() {
            return Err(Error::Invalid("graph needs at least one vertex".into()));
        }
        let mut index = std::collections::HashMap::new();
        for (i, name) in spec.vertices.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::Invalid("vertex names must be nonempty".into()));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate vertex {name:?}")));
            }
        }
        let mut ids = Vec::new();
        let mut seen_ids = std::collections::HashSet::new();
        let mut from = Vec::new();
        let mut to = Vec::new();
        let mut lengths = Vec::new();
        for e in &spec.edges {
            if !seen_ids.insert(e.id.clone()) {
                return Err(Error::Invalid(format!("duplicate edge id {:?}", e.id)));
            }
            let f = *index
                .get(&e.from)
                .ok_or_else(|| Error::Invalid(format!("edge {:?}: unknown vertex {:?}", e.id, e.from)))?;
            let t = *index
                .get(&e.to)
                .ok_or_else(|| Error::Invalid(format!("edge {:?}: unknown vertex {:?}", e.id, e.to)))?;
            let len = parse_rational(&e.length)?;
            if len <= BigRational::zero() {
                return Err(Error::Invalid(format!(
                    "edge {:?} has non-positive length {}",
                    e.id, e.length
                )));
            }
            ids.push(e.id.clone());
            from.push(f);
            to.push(t);
            lengths.push(len);
        }
        let basepoint = *index
            .get(&spec.basepoint)
            .ok_or_else(|| Error::Invalid(format!("unknown basepoint {:?}", spec.basepoint)))?;
        let g = MetricGraph { vertices: spec.vertices.clone(), basepoint, ids, from, to, lengths };
        let mut seen = vec![false; g.vertices.len()];
        let mut queue = VecDeque::from([basepoint]);
        seen[basepoint] = true;
        while let Some(v) = queue.pop_front() {
            for e in 0..g.edge_count() {
                for w in [g.from[e], g.to[e]] {
                    if (g.from[e] == v || g.to[e] == v) && !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::Invalid("graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            vertices: self.vertices.clone(),
            edges: (0..self.edge_count())
                .map(|e| EdgeSpec {
                    id: self.ids[e].clone(),
                    from: self.vertices[self.from[e]].clone(),
                    to: self.vertices[self.to[e]].clone(),
                    length: format_rational(&self.lengths[e]),
                })
                .collect(),
            basepoint: self.vertices[self.basepoint].clone(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.ids.len()
    }

    /// First Betti number E - V + 1; the rank of the acting free group.
    pub fn betti(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    pub fn basepoint_name(&self) -> &str {
        &self.vertices[self.basepoint]
    }

    /// One vertex, all loops of length 1: the Cayley-graph shape.
    pub fn is_unit_rose(&self) -> bool {
        self.vertex_count() == 1 && self.lengths.iter().all(|l| l.is_one())
    }

    /// Deletes valence-1 vertices until none remain. The basepoint is
    /// relocated inward when its branch is pruned; norms against the core
    /// are the ones the minimal action defines.
    fn pruned(&self) -> MetricGraph {
        let mut g = self.clone();
        loop {
            let mut valence = vec![0usize; g.vertex_count()];
            for e in 0..g.edge_count() {
                valence[g.from[e]] += 1;
                valence[g.to[e]] += 1;
            }
            let Some(v) = (0..g.vertex_count()).find(|&v| valence[v] == 1) else {
                return g;
            };
            let e = (0..g.edge_count())
                .find(|&e| g.from[e] == v || g.to[e] == v)
                .expect("valence-1 vertex has an incident edge");
            if g.basepoint == v {
                g.basepoint = if g.from[e] == v { g.to[e] } else { g.from[e] };
            }
            g.ids.remove(e);
            g.from.remove(e);
            g.to.remove(e);
            g.lengths.remove(e);
            let drop = v;
            g.vertices.remove(drop);
            let shift = |w: usize| if w > drop { w - 1 } else { w };
            g.basepoint = shift(g.basepoint);
            for w in g.from.iter_mut().chain(g.to.iter_mut()) {
                *w = shift(*w);
            }
        }
    }
}

/// A free action on the universal cover of a core metric graph, with the
/// geometric basis and all length tables precomputed.
#[derive(Clone, Debug)]
pub struct TreeAction {
    graph: MetricGraph,
    ab: Alphabet,
    tree_edge: Vec<bool>,
    basis_edges: Vec<usize>,
    dist: Vec<Vec<BigRational>>,
    ell: Vec<BigRational>,
    origin: Vec<usize>,
    terminus: Vec<usize>,
    junction: Vec<Vec<BigRational>>,
    tail_from_p: Vec<BigRational>,
    tail_to_p: Vec<BigRational>,
}

/// Builds the action: prunes to the core, picks the BFS spanning tree from
/// the basepoint in edge insertion order, takes positive non-tree edges as
/// the geometric basis, and fills the junction and tail tables.
pub fn build_action(graph: &MetricGraph) -> Result<TreeAction> {
    let g = graph.pruned();
    let k = g.betti();
    if k < 2 {
        return Err(Error::Invalid(format!(
            "action needs first Betti number >= 2, got {k}"
        )));
    }
    let ab = Alphabet::new(k)?;

    let mut tree_edge = vec![false; g.edge_count()];
    let mut seen = vec![false; g.vertex_count()];
    seen[g.basepoint] = true;
    let mut queue = VecDeque::from([g.basepoint]);
    while let Some(v) = queue.pop_front() {
        for e in 0..g.edge_count() {
            let other = if g.from[e] == v {
                g.to[e]
            } else if g.to[e] == v {
                g.from[e]
            } else {
                continue;
            };
            if !seen[other] {
                seen[other] = true;
                tree_edge[e] = true;
                queue.push_back(other);
            }
        }
    }
    let basis_edges: Vec<usize> = (0..g.edge_count()).filter(|&e| !tree_edge[e]).collect();
    if basis_edges.len() != k {
        return Err(Error::Internal(format!(
            "spanning tree left {} basis edges, expected {k}",
            basis_edges.len()
        )));
    }

    let dist = tree_distances(&g, &tree_edge);
    let mut ell = Vec::with_capacity(2 * k);
    let mut origin = Vec::with_capacity(2 * k);
    let mut terminus = Vec::with_capacity(2 * k);
    for &e in &basis_edges {
        ell.push(g.lengths[e].clone());
        ell.push(g.lengths[e].clone());
        origin.push(g.from[e]);
        origin.push(g.to[e]);
        terminus.push(g.to[e]);
        terminus.push(g.from[e]);
    }
    let junction = (0..2 * k)
        .map(|x| (0..2 * k).map(|y| dist[terminus[x]][origin[y]].clone()).collect())
        .collect();
    let tail_from_p = (0..2 * k).map(|x| dist[g.basepoint][origin[x]].clone()).collect();
    let tail_to_p = (0..2 * k).map(|x| dist[terminus[x]][g.basepoint].clone()).collect();

    Ok(TreeAction {
        graph: g,
        ab,
        tree_edge,
        basis_edges,
        dist,
        ell,
        origin,
        terminus,
        junction,
        tail_from_p,
        tail_to_p,
    })
}

fn tree_distances(g: &MetricGraph, tree_edge: &[bool]) -> Vec<Vec<BigRational>> {
    let n = g.vertex_count();
    let mut dist = vec![vec![BigRational::zero(); n]; n];
    for src in 0..n {
        let mut seen = vec![false; n];
        seen[src] = true;
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            for e in 0..g.edge_count() {
                if !tree_edge[e] {
                    continue;
                }
                let other = if g.from[e] == v {
                    g.to[e]
                } else if g.to[e] == v {
                    g.from[e]
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    dist[src][other] = dist[src][v].clone() + &g.lengths[e];
                    queue.push_back(other);
                }
            }
        }
    }
    dist
}

impl TreeAction {
    pub fn rank(&self) -> usize {
        self.ab.k()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.ab
    }

    /// The pruned core graph the action lives on.
    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    /// Ids of the non-tree edges carrying the basis, in basis order.
    pub fn basis_edge_ids(&self) -> Vec<&str> {
        self.basis_edges.iter().map(|&e| self.graph.ids[e].as_str()).collect()
    }

    fn check_letter(&self, l: Letter) -> Result<()> {
        if !self.ab.contains(l) {
            return Err(Error::Invalid(format!(
                "letter code {} is outside the rank-{} basis",
                l.code(),
                self.ab.k()
            )));
        }
        Ok(())
    }

    /// l(e(x)), the length of the basis edge itself.
    pub fn edge_length(&self, x: Letter) -> Result<&BigRational> {
        self.check_letter(x)?;
        Ok(&self.ell[x.code()])
    }

    /// r_{xy} = d_T(t(e(x)), o(e(y))), the tree cost of the junction at a
    /// reduced pair xy.
    pub fn junction_cost(&self, x: Letter, y: Letter) -> Result<&BigRational> {
        self.check_letter(x)?;
        self.check_letter(y)?;
        Ok(&self.junction[x.code()][y.code()])
    }

    /// d_T(p, o(e(x))), the lead-in tail of the basis element of x.
    pub fn tail_from_basepoint(&self, x: Letter) -> Result<&BigRational> {
        self.check_letter(x)?;
        Ok(&self.tail_from_p[x.code()])
    }

    /// d_T(t(e(x)), p), the lead-out tail.
    pub fn tail_to_basepoint(&self, x: Letter) -> Result<&BigRational> {
        self.check_letter(x)?;
        Ok(&self.tail_to_p[x.code()])
    }

    /// Largest tree distance between vertices of the core.
    pub fn tree_diameter(&self) -> BigRational {
        let mut best = BigRational::zero();
        for row in &self.dist {
            for d in row {
                if *d > best {
                    best = d.clone();
                }
            }
        }
        best
    }

    /// Exact translation length of the conjugacy class of a cyclic basis
    /// word: the edge lengths plus one junction cost per cyclic position.
    pub fn translation_length(&self, w: &CyclicWord) -> Result<BigRational> {
        let n = w.len();
        let mut total = BigRational::zero();
        for i in 0..n {
            let x = w.letter(i);
            let y = w.letter((i + 1) % n);
            self.check_letter(x)?;
            total += &self.ell[x.code()] + &self.junction[x.code()][y.code()];
        }
        Ok(total)
    }

    /// Exact displacement of the basepoint, d_X(p, u p): edge lengths,
    /// junction costs, and the two basepoint tails.
    pub fn point_norm(&self, u: &Word) -> Result<BigRational> {
        let letters = u.letters();
        let Some((&first, &last)) = letters.first().zip(letters.last()) else {
            return Ok(BigRational::zero());
        };
        self.check_letter(first)?;
        let mut total =
            self.tail_from_p[first.code()].clone() + &self.tail_to_p[last.code()];
        for pair in letters.windows(2) {
            total += &self.junction[pair[0].code()][pair[1].code()];
        }
        for &x in letters {
            self.check_letter(x)?;
            total += &self.ell[x.code()];
        }
        Ok(total)
    }

    fn vertex_of(&self, directed: usize, head: bool) -> usize {
        let e = directed / 2;
        let fwd = directed % 2 == 0;
        if fwd == head {
            self.graph.to[e]
        } else {
            self.graph.from[e]
        }
    }

    /// Directed tree path between two vertices (edge codes; even codes are
    /// the listed orientation).
    fn tree_path(&self, u: usize, v: usize) -> Vec<usize> {
        if u == v {
            return Vec::new();
        }
        let n = self.graph.vertex_count();
        let mut back: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[u] = true;
        let mut queue = VecDeque::from([u]);
        'bfs: while let Some(w) = queue.pop_front() {
            for e in 0..self.graph.edge_count() {
                if !self.tree_edge[e] {
                    continue;
                }
                for d in [2 * e, 2 * e + 1] {
                    if self.vertex_of(d, false) == w && !seen[self.vertex_of(d, true)] {
                        let o = self.vertex_of(d, true);
                        seen[o] = true;
                        back[o] = Some(d);
                        if o == v {
                            break 'bfs;
                        }
                        queue.push_back(o);
                    }
                }
            }
        }
        let mut path = Vec::new();
        let mut at = v;
        while at != u {
            let d = back[at].expect("core graph is connected");
            path.push(d);
            at = self.vertex_of(d, false);
        }
        path.reverse();
        path
    }

    /// The reduced edge path from the basepoint traced by a basis word:
    /// tree approach, basis edge, and so on, with backtracks cancelled.
    /// The result is the geodesic from p to u.p in the universal cover.
    pub fn path_of_word(&self, u: &Word) -> Result<Vec<usize>> {
        let mut path: Vec<usize> = Vec::new();
        let push = |d: usize, path: &mut Vec<usize>| {
            if path.last() == Some(&(d ^ 1)) {
                path.pop();
            } else {
                path.push(d);
            }
        };
        let mut at = self.graph.basepoint;
        for &x in u.letters() {
            self.check_letter(x)?;
            for d in self.tree_path(at, self.origin[x.code()]) {
                push(d, &mut path);
            }
            let e = self.basis_edges[x.index()];
            push(2 * e + usize::from(x.is_inverse()), &mut path);
            at = self.terminus[x.code()];
        }
        for d in self.tree_path(at, self.graph.basepoint) {
            push(d, &mut path);
        }
        Ok(path)
    }

    /// Reads the basis word back off an edge path: non-tree edge
    /// traversals spell the letters, tree edges are silent.
    pub fn word_of_path(&self, path: &[usize]) -> Result<Word> {
        let mut letters = Vec::new();
        for &d in path {
            let e = d / 2;
            if e >= self.graph.edge_count() {
                return Err(Error::Invalid(format!("directed edge code {d} out of range")));
            }
            if self.tree_edge[e] {
                continue;
            }
            let i = self
                .basis_edges
                .iter()
                .position(|&b| b == e)
                .expect("non-tree edges are basis edges");
            let mut l = Letter::generator(i);
            if d % 2 == 1 {
                l = l.inverse();
            }
            letters.push(l);
        }
        Ok(Word::from_letters(letters))
    }

    pub fn path_length(&self, path: &[usize]) -> BigRational {
        path.iter().map(|&d| self.graph.lengths[d / 2].clone()).sum()
    }

    /// Oracle for point_norm: length of the lifted geodesic.
    pub fn point_norm_lifted(&self, u: &Word) -> Result<BigRational> {
        Ok(self.path_length(&self.path_of_word(u)?))
    }

    /// Oracle for translation_length: |w^2|_p - |w|_p, exact in a tree.
    pub fn translation_length_lifted(&self, w: &CyclicWord) -> Result<BigRational> {
        let u = w.canonical();
        let square = u.concat(u);
        Ok(self.point_norm_lifted(&square)? - self.point_norm_lifted(u)?)
    }
}

/// The point norm as a Monte Carlo semi-norm over basis words.
pub struct TreePointNorm<'a> {
    action: &'a TreeAction,
}

impl<'a> TreePointNorm<'a> {
    pub fn new(action: &'a TreeAction) -> TreePointNorm<'a> {
        TreePointNorm { action }
    }
}

impl SemiNorm for TreePointNorm<'_> {
    fn name(&self) -> &str {
        "tree-point-norm"
    }

    fn eval(&self, w: &Word) -> f64 {
        rational_to_f64(&self.action.point_norm(w).expect("word over the basis alphabet"))
    }
}

/// An identification of F_k with the deck group: each standard generator
/// is sent to a word in the geometric basis letters b1, ..., bk.
#[derive(Clone, Debug)]
pub struct Identification {
    endo: Endomorphism,
}

/// Parses one basis word like `b1b2B1` (uppercase = inverse); the whole
/// string `e` is the empty word.
pub fn parse_basis_word(k: usize, s: &str) -> Result<Word> {
    let s = s.trim();
    if s == "e" {
        return Ok(Word::empty());
    }
    let mut letters = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        if c != 'b' && c != 'B' {
            return Err(Error::Parse(format!(
                "basis words use b<i> / B<i>, found {c:?} in {s:?}"
            )));
        }
        let mut digits = String::new();
        while let Some(&d) = chars.peek() {
            if d.is_ascii_digit() {
                digits.push(d);
                chars.next();
            } else {
                break;
            }
        }
        let i: usize = digits
            .parse()
            .map_err(|_| Error::Parse(format!("basis letter {c:?} needs an index in {s:?}")))?;
        if i == 0 || i > k {
            return Err(Error::Parse(format!(
                "basis index {i} out of range 1..={k} in {s:?}"
            )));
        }
        let mut l = Letter::generator(i - 1);
        if c == 'B' {
            l = l.inverse();
        }
        letters.push(l);
    }
    Ok(Word::from_letters(letters))
}

/// Formats a word over the basis letters.
pub fn display_basis_word(w: &Word) -> String {
    if w.is_empty() {
        return "e".into();
    }
    w.letters()
        .iter()
        .map(|l| {
            let c = if l.is_inverse() { 'B' } else { 'b' };
            format!("{c}{}", l.index() + 1)
        })
        .collect()
}

impl Identification {
    pub fn new(ab: Alphabet, images: Vec<Word>) -> Result<Identification> {
        Ok(Identification { endo: Endomorphism::new(ab, images)? })
    }

    /// The letter-for-letter identification a_i -> b_i.
    pub fn identity(ab: Alphabet) -> Identification {
        Identification { endo: Endomorphism::identity(ab) }
    }

    /// Parses rules like `a->b1;b->b2B1`; omitted generators map to their
    /// own basis letter.
    pub fn parse(ab: Alphabet, s: &str) -> Result<Identification> {
        let mut images: Vec<Option<Word>> = vec![None; ab.k()];
        for rule in s.split(';') {
            let rule = rule.trim();
            if rule.is_empty() {
                continue;
            }
            let (lhs, rhs) = rule
                .split_once("->")
                .ok_or_else(|| Error::Parse(format!("rule {rule:?} is not of the form x->w")))?;
            let lhs = ab.parse_letter(lhs.trim())?;
            if lhs.is_inverse() {
                return Err(Error::Parse(
                    "identification left sides must be positive generators".into(),
                ));
            }
            if images[lhs.index()].is_some() {
                return Err(Error::Parse(format!(
                    "duplicate rule for {:?}",
                    ab.letter_to_string(lhs)
                )));
            }
            images[lhs.index()] = Some(parse_basis_word(ab.k(), rhs)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, img)| img.unwrap_or_else(|| Word::single(Letter::generator(i))))
            .collect();
        Identification::new(ab, images)
    }

    pub fn display(&self) -> String {
        let ab = self.endo.alphabet();
        ab.generators()
            .map(|g| {
                format!(
                    "{}->{}",
                    ab.letter_to_string(g),
                    display_basis_word(self.endo.image(g))
                )
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn endomorphism(&self) -> &Endomorphism {
        &self.endo
    }

    pub fn image(&self, l: Letter) -> &Word {
        self.endo.image(l)
    }

    /// Rewrites a word over the standard generators as a basis word.
    pub fn apply(&self, w: &Word) -> Word {
        self.endo.apply(w)
    }
}

fn check_rank(action: &TreeAction, alpha: &Identification) -> Result<()> {
    if alpha.endomorphism().alphabet().k() != action.rank() {
        return Err(Error::Invalid(format!(
            "identification has rank {}, action has rank {}",
            alpha.endomorphism().alphabet().k(),
            action.rank()
        )));
    }
    Ok(())
}

/// Exact stretching factor of the action under the identification alpha,
/// via the suffix-window engine with rational increments of the point norm.
pub fn action_lambda_exact(action: &TreeAction, alpha: &Identification) -> Result<ExactLambda> {
    check_rank(action, alpha)?;
    let ab = *alpha.endomorphism().alphabet();
    window_lambda(
        &ab,
        |s: &Word, xs: &[Letter]| -> Vec<BigRational> {
            let u = alpha.apply(s);
            let base = action.point_norm(&u).expect("image is a basis word");
            xs.iter()
                .map(|&x| {
                    let ux = u.concat(alpha.image(x));
                    action.point_norm(&ux).expect("image is a basis word") - &base
                })
                .collect()
        },
        DEFAULT_WINDOW_BUDGET,
    )
}

/// Monte Carlo stretching factor of the action: NBSRW words pushed through
/// alpha and measured with the point norm.
pub fn action_lambda_mc(
    action: &TreeAction,
    alpha: &Identification,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<StretchEstimate> {
    check_rank(action, alpha)?;
    estimate_lambda(alpha.endomorphism(), &TreePointNorm::new(action), n, trials, seed)
}

/// 1 + 1/(k(2k-1)), the jump below which only the Cayley case lives.
pub fn tree_gap_bound(k: usize) -> Result<BigRational> {
    if k < 2 {
        return Err(Error::Invalid("the tree gap bound needs rank k >= 2".into()));
    }
    let den = BigInt::from(k) * BigInt::from(2 * k - 1);
    Ok(BigRational::one() + BigRational::new(BigInt::one(), den))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ActionClass {
    CayleyLike,
    Gapped,
}

/// Outcome of the dichotomy test for a marked action.
#[derive(Clone, Debug)]
pub struct GapReport {
    pub class: ActionClass,
    pub lambda: ExactLambda,
    pub gap_bound: BigRational,
    pub unit_rose: bool,
    pub identification_simple: bool,
}

/// Classifies the marked action: Cayley-like exactly when the core is a
/// rose of unit loops and the identification composes to a simple
/// automorphism (then lambda = 1); every other action has lambda at least
/// the gap bound. Both branches are verified on the exact lambda.
pub fn gap_test(action: &TreeAction, alpha: &Identification) -> Result<GapReport> {
    check_rank(action, alpha)?;
    if !is_automorphism(alpha.endomorphism()) {
        return Err(Error::Invalid(
            "identification must be an automorphism of the free group".into(),
        ));
    }
    let aut = Automorphism::from_endomorphism(alpha.endomorphism().clone())?;
    let identification_simple = aut.is_simple().is_some();
    let unit_rose = action.graph().is_unit_rose();
    let lambda = action_lambda_exact(action, alpha)?;
    let gap_bound = tree_gap_bound(action.rank())?;
    let class = if unit_rose && identification_simple {
        ActionClass::CayleyLike
    } else {
        ActionClass::Gapped
    };
    let consistent = match class {
        ActionClass::CayleyLike => lambda.value.is_one(),
        ActionClass::Gapped => lambda.value >= gap_bound,
    };
    if !consistent {
        return Err(Error::Internal(format!(
            "gap dichotomy violated: class {class:?}, lambda {}",
            format_rational(&lambda.value)
        )));
    }
    Ok(GapReport { class, lambda, gap_bound, unit_rose, identification_simple })
}
