//! Computational tools for free groups F_k and their automorphisms:
//! freely and cyclically reduced words with exact occurrence statistics,
//! Whitehead automorphisms and graphs, generic stretching factors computed
//! both exactly (suffix-window method) and by seeded Monte Carlo, free
//! actions on finite metric graphs, and edge Markov chains over normal
//! automata for sampling regular languages.
//!
//! Exact quantities are rationals (`num_rational::BigRational`); Monte Carlo
//! summaries are floats carrying their seed and standard error. Every random
//! routine takes an explicit seed and is bit-reproducible.

pub mod alphabet;
pub mod automorphism;
pub mod cyclic;
pub mod error;
pub mod lang;
pub mod rational;
pub mod rng;
pub mod stretch;
pub mod tree;
pub mod whitehead;
pub mod word;

pub use alphabet::{Alphabet, Letter};
pub use automorphism::{Automorphism, Endomorphism, WhiteheadMove};
pub use cyclic::{cyclic_reduce, CyclicWord};
pub use error::{Error, Result};
pub use rng::WalkRng;
pub use stretch::{estimate_lambda, exact_lambda, ExactLambda, SemiNorm, StretchEstimate, WordLength};
pub use word::Word;
