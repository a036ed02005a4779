//! fg: stretching factors of free-group endomorphisms, Whitehead machinery,
//! free actions on metric graphs, and language-restricted walks.
//!
//! Every command prints an envelope `{"config": ..., "result": ...}`; exact
//! rationals are serialized as strings `"p/q"`. Exit codes: 0 on success,
//! 2 on malformed input, 3 on computational failure (window instability,
//! exhausted budgets, internal checks).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use freegroup::lang::{
    build_edge_chain, check_normal, complete_to_language, estimate_language_lambda,
    nbsrw_automaton, normality_violations, sample_word, AutomatonSpec, CompletionTable, EdgeChain,
    Ndfa,
};
use freegroup::rational::{parse_rational, rational_to_f64};
use freegroup::stretch::{
    distortion_spectrum_bounds, estimate_nu, exact_lambda_with, flux_estimate, flux_exact,
    hausdorff_dimension, lambda_power_sequence, sup_image_norm,
};
use freegroup::tree::{
    action_lambda_exact, action_lambda_mc, build_action, gap_test, tree_gap_bound, ActionClass,
    GraphSpec, Identification, MetricGraph, TreeAction,
};
use freegroup::whitehead::{
    classify_by_generic_word, genericity_epsilon0, is_strictly_minimal, length_change_from_graph,
    simple_threshold_d0, stretch_gap_bound, whitehead_graph, whitehead_minimize, GapClass,
};
use freegroup::{
    automorphism::enumerate_whitehead_moves, estimate_lambda, exact_lambda, Alphabet,
    Automorphism, CyclicWord, Endomorphism, Error, ExactLambda, Letter, Result, StretchEstimate,
    WalkRng, WhiteheadMove, WordLength,
};

#[derive(Parser)]
#[command(name = "fg", version, about = "Stretching factors for free-group automorphisms")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for Monte Carlo trials (0 uses every core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Subcommand)]
enum Cmd {
    /// Stretching factors and derived quantities.
    #[command(subcommand)]
    Stretch(StretchCmd),
    /// Whitehead graphs, minimization, and the simple-or-gap dichotomy.
    #[command(subcommand)]
    Whitehead(WhiteheadCmd),
    /// Free actions on universal covers of metric graphs.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Normal automata and language-restricted walks.
    #[command(subcommand)]
    Lang(LangCmd),
}

/// Rules and an optional rank; the smallest rank that parses wins when
/// --k is omitted.
#[derive(Args)]
struct PhiArg {
    /// Images like "a->ab;b->b".
    #[arg(long)]
    phi: String,
    /// Rank of the free group.
    #[arg(long)]
    k: Option<usize>,
}

impl PhiArg {
    fn endo(&self) -> Result<Endomorphism> {
        parse_endo(self.k, &self.phi)
    }

    fn aut(&self) -> Result<Automorphism> {
        parse_aut(self.k, &self.phi)
    }
}

#[derive(Subcommand)]
enum StretchCmd {
    /// Exact lambda by the suffix-window method.
    Exact {
        #[command(flatten)]
        phi: PhiArg,
        /// Evaluation budget for the window search.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Monte Carlo lambda along non-backtracking random walks.
    Mc {
        #[command(flatten)]
        phi: PhiArg,
        /// Walk length.
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        /// Independent trials.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Exact lambda of phi, phi^2, ..., phi^N with n-th roots.
    Power {
        #[command(flatten)]
        phi: PhiArg,
        /// Largest power N.
        #[arg(long, default_value_t = 5)]
        max_power: usize,
    },
    /// Ball elements moved closer to the identity, exact or sampled.
    Flux {
        #[command(flatten)]
        phi: PhiArg,
        /// Ball radius.
        #[arg(long, default_value_t = 6)]
        n: usize,
        /// Sample instead of enumerating the ball.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Growth entropy of the subgroup generated by the given automorphisms.
    Nu {
        /// Generator images, repeatable.
        #[arg(long = "gen", required = true)]
        gens: Vec<String>,
        /// Rank of the free group.
        #[arg(long)]
        k: Option<usize>,
        /// Length of the words in the generators.
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Hausdorff dimension ln(2k-1)/lambda of the visible boundary.
    Hd {
        /// Exact lambda as "p/q" (needs --k).
        #[arg(long)]
        lambda: Option<String>,
        /// Images to compute lambda from instead.
        #[arg(long)]
        phi: Option<String>,
        /// Rank of the free group.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Range of ||phi(w)|| / ||w|| over short cyclic words.
    Spectrum {
        #[command(flatten)]
        phi: PhiArg,
        /// Largest cyclic length enumerated.
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
}

#[derive(Subcommand)]
enum WhiteheadCmd {
    /// Weighted Whitehead graph of a cyclic word.
    Graph {
        /// Cyclic word like "abAB".
        #[arg(long)]
        w: String,
        /// Rank of the free group.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Greedy descent to a minimal-length orbit representative.
    Minimize {
        /// Cyclic word like "abAB".
        #[arg(long)]
        w: String,
        /// Rank of the free group.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Strict minimality report with the tightest non-inner move.
    Minimal {
        /// Cyclic word like "abAB".
        #[arg(long)]
        w: String,
        /// Rank of the free group.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Simple-or-gap classification from one generic word.
    Classify {
        #[command(flatten)]
        phi: PhiArg,
        /// Length of the sampled generic word.
        #[arg(long, default_value_t = 2000)]
        n: usize,
        /// Genericity tolerance as "p/q"; defaults to half of epsilon_0.
        #[arg(long)]
        eps: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// The rank-dependent thresholds and gap bounds.
    Constants {
        /// Rank of the free group.
        #[arg(long)]
        k: usize,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Mode {
    Exact,
    Mc,
}

#[derive(Subcommand)]
enum TreeCmd {
    /// Stretching factor of a marked action, exact or Monte Carlo.
    Lambda {
        /// Metric graph JSON file.
        #[arg(long)]
        graph: PathBuf,
        /// Identification like "a->b1b2;b->b2" (identity when omitted).
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Walk length (mc mode).
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        /// Independent trials (mc mode).
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Cayley-like or gapped dichotomy for a marked action.
    Gap {
        /// Metric graph JSON file.
        #[arg(long)]
        graph: PathBuf,
        /// Identification like "a->b1b2;b->b2" (identity when omitted).
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Core graph, geometric basis, and edge tables.
    Info {
        /// Metric graph JSON file.
        #[arg(long)]
        graph: PathBuf,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Mu {
    /// Exact stationary distribution of the edge chain.
    Stationary,
    /// Uniform over edges leaving start states.
    Start,
}

#[derive(Subcommand)]
enum LangCmd {
    /// Normality report for an automaton.
    Check {
        /// Automaton JSON file.
        #[arg(long)]
        automaton: PathBuf,
        /// Rank of the free group.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Stretching factor of phi along words sampled from the language.
    Lambda {
        /// Automaton JSON file.
        #[arg(long)]
        automaton: PathBuf,
        /// Rank of the free group.
        #[arg(long)]
        k: Option<usize>,
        /// Images like "a->ab;b->b" (identity when omitted).
        #[arg(long)]
        phi: Option<String>,
        /// Walk length.
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Mu::Stationary)]
        mu: Mu,
    },
    /// One sampled label word, optionally completed into the language.
    Sample {
        /// Automaton JSON file.
        #[arg(long)]
        automaton: PathBuf,
        /// Rank of the free group.
        #[arg(long)]
        k: Option<usize>,
        /// Walk length.
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Mu::Stationary)]
        mu: Mu,
        /// Append the shortest completion to an accept state.
        #[arg(long)]
        complete: bool,
    },
    /// The non-backtracking walk automaton on 2k letter states.
    Nbsrw {
        /// Rank of the free group.
        #[arg(long)]
        k: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
        if let Err(e) = pool {
            eprintln!("error: cannot configure {} threads: {e}", cli.threads);
            return ExitCode::from(2);
        }
    }
    match run(&cli.command) {
        Ok(envelope) => match emit(cli.format, &envelope) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot write output: {e}");
                ExitCode::from(3)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}

fn run(cmd: &Cmd) -> Result<Value> {
    match cmd {
        Cmd::Stretch(c) => run_stretch(c),
        Cmd::Whitehead(c) => run_whitehead(c),
        Cmd::Tree(c) => run_tree(c),
        Cmd::Lang(c) => run_lang(c),
    }
}

fn run_stretch(cmd: &StretchCmd) -> Result<Value> {
    match cmd {
        StretchCmd::Exact { phi, budget } => {
            let endo = phi.endo()?;
            let ex = match budget {
                Some(b) => exact_lambda_with(&endo, *b)?,
                None => exact_lambda(&endo)?,
            };
            let simple = Automorphism::from_endomorphism(endo.clone())
                .ok()
                .map(|a| a.is_simple().is_some());
            let config = json!({
                "command": "stretch exact",
                "k": endo.alphabet().k(),
                "phi": endo.display(),
                "budget": budget,
            });
            let mut result = exact_lambda_json(&ex, endo.alphabet().k())?;
            result["simple"] = json!(simple);
            Ok(envelope(config, result))
        }
        StretchCmd::Mc { phi, n, trials, seed } => {
            let endo = phi.endo()?;
            let est = estimate_lambda(&endo, &WordLength, *n, *trials, *seed)?;
            let config = json!({
                "command": "stretch mc",
                "k": endo.alphabet().k(),
                "phi": endo.display(),
                "seminorm": "word length",
            });
            Ok(envelope(config, estimate_json(&est)))
        }
        StretchCmd::Power { phi, max_power } => {
            let aut = phi.aut()?;
            let k = aut.alphabet().k();
            let rows: Vec<Value> = lambda_power_sequence(&aut, *max_power)?
                .iter()
                .map(|p| {
                    json!({
                        "n": p.n,
                        "lambda": rat(&p.lambda.value),
                        "lambda_float": rational_to_f64(&p.lambda.value),
                        "window": p.lambda.window,
                        "root": p.root,
                    })
                })
                .collect();
            let config = json!({
                "command": "stretch power",
                "k": k,
                "phi": aut.display(),
                "max_power": max_power,
            });
            Ok(envelope(config, json!({ "powers": rows })))
        }
        StretchCmd::Flux { phi, n, samples, seed } => {
            let aut = phi.aut()?;
            let config = json!({
                "command": "stretch flux",
                "k": aut.alphabet().k(),
                "phi": aut.display(),
                "n": n,
            });
            let result = match samples {
                None => {
                    let (count, ball) = flux_exact(&aut, *n)?;
                    json!({
                        "mode": "exact",
                        "count": count.to_string(),
                        "ball": ball.to_string(),
                        "ratio": count as f64 / ball as f64,
                    })
                }
                Some(s) => {
                    let est = flux_estimate(&aut, *n, *s, *seed)?;
                    json!({
                        "mode": "mc",
                        "ratio": est.value,
                        "std_error": est.std_error,
                        "samples": est.samples,
                        "seed": est.seed,
                    })
                }
            };
            Ok(envelope(config, result))
        }
        StretchCmd::Nu { gens, k, n, trials, seed } => {
            let gens = parse_generators(*k, gens)?;
            let est = estimate_nu(&gens, sup_image_norm, *n, *trials, *seed)?;
            let shown: Vec<String> = gens.iter().map(|g| g.display()).collect();
            let config = json!({
                "command": "stretch nu",
                "k": gens[0].alphabet().k(),
                "generators": shown,
                "norm": "sup image norm",
                "n": n,
            });
            Ok(envelope(
                config,
                json!({
                    "nu": est.value,
                    "std_error": est.std_error,
                    "trials": est.samples,
                    "seed": est.seed,
                }),
            ))
        }
        StretchCmd::Hd { lambda, phi, k } => {
            let (value, rank, from) = match (lambda, phi) {
                (Some(s), None) => {
                    let rank =
                        k.ok_or_else(|| Error::Invalid("--lambda also needs --k".into()))?;
                    (parse_rational(s)?, rank, Value::Null)
                }
                (None, Some(rules)) => {
                    let endo = parse_endo(*k, rules)?;
                    let ex = exact_lambda(&endo)?;
                    (ex.value, endo.alphabet().k(), json!(endo.display()))
                }
                _ => {
                    return Err(Error::Invalid(
                        "pass exactly one of --lambda (with --k) or --phi".into(),
                    ))
                }
            };
            let dim = hausdorff_dimension(&value, rank)?;
            let config = json!({ "command": "stretch hd", "k": rank, "phi": from });
            Ok(envelope(config, json!({ "lambda": rat(&value), "dimension": dim })))
        }
        StretchCmd::Spectrum { phi, max_len } => {
            let aut = phi.aut()?;
            let b = distortion_spectrum_bounds(&aut, *max_len)?;
            let config = json!({
                "command": "stretch spectrum",
                "k": aut.alphabet().k(),
                "phi": aut.display(),
                "max_len": max_len,
            });
            Ok(envelope(
                config,
                json!({
                    "min": rat(&b.min),
                    "min_float": rational_to_f64(&b.min),
                    "max": rat(&b.max),
                    "max_float": rational_to_f64(&b.max),
                    "straddles_one": b.straddles_one,
                }),
            ))
        }
    }
}

fn run_whitehead(cmd: &WhiteheadCmd) -> Result<Value> {
    match cmd {
        WhiteheadCmd::Graph { w, k } => {
            let (ab, word) = parse_cyclic(*k, w)?;
            let g = whitehead_graph(ab, &word)?;
            let config = json!({
                "command": "whitehead graph",
                "k": ab.k(),
                "w": word.display(&ab),
            });
            Ok(envelope(config, g.to_json()))
        }
        WhiteheadCmd::Minimize { w, k } => {
            let (ab, word) = parse_cyclic(*k, w)?;
            let (minimal, moves) = whitehead_minimize(ab, &word)?;
            let moves: Vec<String> = moves.iter().map(move_string).collect();
            let config = json!({
                "command": "whitehead minimize",
                "k": ab.k(),
                "w": word.display(&ab),
            });
            Ok(envelope(
                config,
                json!({
                    "input_len": word.len(),
                    "minimal": minimal.display(&ab),
                    "minimal_len": minimal.len(),
                    "moves": moves,
                    "strictly_minimal": is_strictly_minimal(ab, &minimal)?,
                }),
            ))
        }
        WhiteheadCmd::Minimal { w, k } => {
            let (ab, word) = parse_cyclic(*k, w)?;
            let g = whitehead_graph(ab, &word)?;
            let mut tightest: Option<(i64, String)> = None;
            for mv in enumerate_whitehead_moves(ab)? {
                if !mv.is_non_inner() {
                    continue;
                }
                let delta = length_change_from_graph(&g, &mv);
                if tightest.as_ref().is_none_or(|(best, _)| delta < *best) {
                    tightest = Some((delta, move_string(&mv)));
                }
            }
            let config = json!({
                "command": "whitehead minimal",
                "k": ab.k(),
                "w": word.display(&ab),
            });
            let result = match tightest {
                Some((delta, mv)) => json!({
                    "strictly_minimal": delta > 0,
                    "min_change": delta,
                    "tightest_move": mv,
                }),
                None => json!({ "strictly_minimal": true }),
            };
            Ok(envelope(config, result))
        }
        WhiteheadCmd::Classify { phi, n, eps, seed } => {
            let aut = phi.aut()?;
            let k = aut.alphabet().k();
            let eps0 = genericity_epsilon0(k)?;
            let eps = match eps {
                Some(s) => parse_rational(s)?,
                None => eps0 / BigRational::from_integer(2.into()),
            };
            let mut rng = WalkRng::from_seed(*seed);
            let c = classify_by_generic_word(&aut, *n, &eps, &mut rng)?;
            let config = json!({
                "command": "whitehead classify",
                "k": k,
                "phi": aut.display(),
                "n": n,
                "eps": rat(&eps),
                "seed": seed,
            });
            Ok(envelope(
                config,
                json!({
                    "class": match c.class {
                        GapClass::Simple => "simple",
                        GapClass::Gap => "gap",
                    },
                    "ratio": rat(&c.ratio),
                    "ratio_float": rational_to_f64(&c.ratio),
                    "word_len": c.word_len,
                    "d0": rat(&simple_threshold_d0(k)?),
                    "gap_bound": rat(&stretch_gap_bound(k)?),
                }),
            ))
        }
        WhiteheadCmd::Constants { k } => {
            let config = json!({ "command": "whitehead constants", "k": k });
            Ok(envelope(
                config,
                json!({
                    "epsilon0": rat(&genericity_epsilon0(*k)?),
                    "d0": rat(&simple_threshold_d0(*k)?),
                    "gap_bound": rat(&stretch_gap_bound(*k)?),
                    "tree_gap_bound": rat(&tree_gap_bound(*k)?),
                }),
            ))
        }
    }
}

fn run_tree(cmd: &TreeCmd) -> Result<Value> {
    match cmd {
        TreeCmd::Lambda { graph, alpha, mode, n, trials, seed } => {
            let action = load_action(graph)?;
            let alpha = parse_alpha(&action, alpha.as_deref())?;
            let config = json!({
                "command": "tree lambda",
                "graph": graph.display().to_string(),
                "k": action.rank(),
                "alpha": alpha.display(),
            });
            let result = match mode {
                Mode::Exact => {
                    let ex = action_lambda_exact(&action, &alpha)?;
                    let mut r = exact_lambda_json(&ex, action.rank())?;
                    r["mode"] = json!("exact");
                    r
                }
                Mode::Mc => {
                    let est = action_lambda_mc(&action, &alpha, *n, *trials, *seed)?;
                    let mut r = estimate_json(&est);
                    r["mode"] = json!("mc");
                    r
                }
            };
            Ok(envelope(config, result))
        }
        TreeCmd::Gap { graph, alpha } => {
            let action = load_action(graph)?;
            let alpha = parse_alpha(&action, alpha.as_deref())?;
            let report = gap_test(&action, &alpha)?;
            let config = json!({
                "command": "tree gap",
                "graph": graph.display().to_string(),
                "k": action.rank(),
                "alpha": alpha.display(),
            });
            Ok(envelope(
                config,
                json!({
                    "class": match report.class {
                        ActionClass::CayleyLike => "cayley-like",
                        ActionClass::Gapped => "gapped",
                    },
                    "lambda": rat(&report.lambda.value),
                    "lambda_float": rational_to_f64(&report.lambda.value),
                    "window": report.lambda.window,
                    "gap_bound": rat(&report.gap_bound),
                    "unit_rose": report.unit_rose,
                    "identification_simple": report.identification_simple,
                }),
            ))
        }
        TreeCmd::Info { graph } => {
            let full = load_graph(graph)?;
            let action = build_action(&full)?;
            let core = action.graph();
            let basis: Vec<Value> = action
                .basis_edge_ids()
                .iter()
                .enumerate()
                .map(|(i, id)| {
                    let x = Letter::generator(i);
                    Ok(json!({
                        "generator": format!("b{}", i + 1),
                        "edge": id,
                        "length": rat(action.edge_length(x)?),
                    }))
                })
                .collect::<Result<_>>()?;
            let config =
                json!({ "command": "tree info", "graph": graph.display().to_string() });
            Ok(envelope(
                config,
                json!({
                    "vertices": full.vertex_count(),
                    "edges": full.edge_count(),
                    "core_vertices": core.vertex_count(),
                    "core_edges": core.edge_count(),
                    "rank": action.rank(),
                    "basepoint": core.basepoint_name(),
                    "unit_rose": core.is_unit_rose(),
                    "basis": basis,
                    "tree_diameter": rat(&action.tree_diameter()),
                }),
            ))
        }
    }
}

fn run_lang(cmd: &LangCmd) -> Result<Value> {
    match cmd {
        LangCmd::Check { automaton, k } => {
            let ndfa = load_ndfa(*k, automaton)?;
            let violations = normality_violations(&ndfa);
            let config = json!({
                "command": "lang check",
                "automaton": automaton.display().to_string(),
                "k": ndfa.alphabet().k(),
            });
            Ok(envelope(
                config,
                json!({
                    "normal": violations.is_empty(),
                    "violations": violations,
                    "states": ndfa.state_count(),
                    "edges": ndfa.edges().len(),
                }),
            ))
        }
        LangCmd::Lambda { automaton, k, phi, n, trials, seed, mu } => {
            let ndfa = load_ndfa(*k, automaton)?;
            check_normal(&ndfa)?;
            let ab = *ndfa.alphabet();
            let endo = match phi {
                Some(rules) => Endomorphism::parse(ab, rules)?,
                None => Endomorphism::identity(ab),
            };
            let chain = build_edge_chain(&ndfa)?;
            let dist = chain_mu(&chain, *mu);
            let est = estimate_language_lambda(&chain, &endo, &WordLength, &dist, *n, *trials, *seed)?;
            let config = json!({
                "command": "lang lambda",
                "automaton": automaton.display().to_string(),
                "k": ab.k(),
                "phi": endo.display(),
                "mu": mu_name(*mu),
                "seminorm": "word length",
            });
            Ok(envelope(config, estimate_json(&est)))
        }
        LangCmd::Sample { automaton, k, n, seed, mu, complete } => {
            let ndfa = load_ndfa(*k, automaton)?;
            check_normal(&ndfa)?;
            let ab = *ndfa.alphabet();
            let chain = build_edge_chain(&ndfa)?;
            let dist = chain_mu(&chain, *mu);
            let mut rng = WalkRng::from_seed(*seed);
            let (labels, final_state) = sample_word(&chain, &dist, *n, &mut rng)?;
            let mut result = json!({
                "labels": letters_string(&ab, &labels),
                "length": labels.len(),
                "final_state": ndfa.state_name(final_state),
            });
            if *complete {
                let table = CompletionTable::build(&ndfa)?;
                let completed = complete_to_language(&ndfa, &table, &labels, final_state)?;
                result["completion"] = json!(letters_string(&ab, &completed[labels.len()..]));
                result["completed"] = json!(letters_string(&ab, &completed));
                result["accepted"] = json!(ndfa.accepts(&completed));
            }
            let config = json!({
                "command": "lang sample",
                "automaton": automaton.display().to_string(),
                "k": ab.k(),
                "n": n,
                "seed": seed,
                "mu": mu_name(*mu),
            });
            Ok(envelope(config, result))
        }
        LangCmd::Nbsrw { k } => {
            let ab = Alphabet::new(*k)?;
            let ndfa = nbsrw_automaton(ab);
            let spec = serde_json::to_value(ndfa.to_spec())
                .map_err(|e| Error::Internal(format!("spec serialization failed: {e}")))?;
            let config = json!({ "command": "lang nbsrw", "k": k });
            Ok(envelope(config, spec))
        }
    }
}

const MAX_INFER_RANK: usize = 26;

/// Runs the parser at the given rank, or at the smallest workable rank.
fn infer<T>(k: Option<usize>, what: &str, mut try_k: impl FnMut(usize) -> Result<T>) -> Result<T> {
    match k {
        Some(k) => try_k(k),
        None => {
            let mut last = String::new();
            for k in 1..=MAX_INFER_RANK {
                match try_k(k) {
                    Ok(v) => return Ok(v),
                    Err(e) => last = e.to_string(),
                }
            }
            Err(Error::Invalid(format!(
                "no rank k <= {MAX_INFER_RANK} fits the {what} (last error: {last}); pass --k"
            )))
        }
    }
}

fn parse_endo(k: Option<usize>, rules: &str) -> Result<Endomorphism> {
    infer(k, "rules", |k| Endomorphism::parse(Alphabet::new(k)?, rules))
}

fn parse_aut(k: Option<usize>, rules: &str) -> Result<Automorphism> {
    infer(k, "rules", |k| Automorphism::parse(Alphabet::new(k)?, rules))
}

fn parse_generators(k: Option<usize>, gens: &[String]) -> Result<Vec<Automorphism>> {
    infer(k, "generators", |k| {
        let ab = Alphabet::new(k)?;
        gens.iter().map(|s| Automorphism::parse(ab, s)).collect()
    })
}

fn parse_cyclic(k: Option<usize>, s: &str) -> Result<(Alphabet, CyclicWord)> {
    infer(k, "word", |k| {
        let ab = Alphabet::new(k)?;
        Ok((ab, CyclicWord::parse(&ab, s)?))
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Invalid(format!("malformed {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<MetricGraph> {
    let spec: GraphSpec = read_json(path)?;
    MetricGraph::from_spec(&spec)
}

fn load_action(path: &Path) -> Result<TreeAction> {
    build_action(&load_graph(path)?)
}

fn parse_alpha(action: &TreeAction, alpha: Option<&str>) -> Result<Identification> {
    match alpha {
        Some(rules) => Identification::parse(*action.alphabet(), rules),
        None => Ok(Identification::identity(*action.alphabet())),
    }
}

fn load_ndfa(k: Option<usize>, path: &Path) -> Result<Ndfa> {
    let spec: AutomatonSpec = read_json(path)?;
    infer(k, "automaton labels", |k| Ndfa::from_spec(Alphabet::new(k)?, &spec))
}

fn chain_mu(chain: &EdgeChain, mu: Mu) -> Vec<BigRational> {
    match mu {
        Mu::Stationary => chain.stationary().to_vec(),
        Mu::Start => chain.start_uniform_mu(),
    }
}

fn mu_name(mu: Mu) -> &'static str {
    match mu {
        Mu::Stationary => "stationary",
        Mu::Start => "start-uniform",
    }
}

/// Exact rationals always serialize as "p/q", including whole numbers.
fn rat(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn move_string(mv: &WhiteheadMove) -> String {
    let ab = mv.alphabet();
    let set: Vec<String> =
        mv.set_letters().into_iter().map(|l| ab.letter_to_string(l)).collect();
    format!("({{{}}}, {})", set.join(""), ab.letter_to_string(mv.multiplier()))
}

fn letters_string(ab: &Alphabet, labels: &[Letter]) -> String {
    labels.iter().map(|&l| ab.letter_to_string(l)).collect()
}

/// 2k lambda (2k-1)^window, an integer for every exact lambda.
fn scaled_integer(ex: &ExactLambda, k: usize) -> Result<String> {
    let mut v = &ex.value * BigRational::from_integer((2 * k as i64).into());
    let base = BigRational::from_integer((2 * k as i64 - 1).into());
    for _ in 0..ex.window {
        v *= &base;
    }
    if !v.is_integer() {
        return Err(Error::Internal(format!(
            "2k lambda (2k-1)^S is not an integer: {}",
            rat(&v)
        )));
    }
    Ok(v.numer().to_string())
}

fn exact_lambda_json(ex: &ExactLambda, k: usize) -> Result<Value> {
    Ok(json!({
        "lambda": rat(&ex.value),
        "lambda_float": rational_to_f64(&ex.value),
        "window": ex.window,
        "checksum": format!("{:016x}", ex.checksum),
        "scaled_integer": scaled_integer(ex, k)?,
    }))
}

fn estimate_json(est: &StretchEstimate) -> Value {
    json!({
        "mean": est.mean,
        "std_error": est.std_error,
        "n": est.n,
        "trials": est.trials,
        "seed": est.seed,
        "values": est.values,
    })
}

fn envelope(config: Value, result: Value) -> Value {
    json!({ "config": config, "result": result })
}

fn emit(format: Format, envelope: &Value) -> io::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => {
            writeln!(out, "{}", serde_json::to_string_pretty(envelope).expect("serializable"))?;
        }
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", envelope, &mut rows);
            writeln!(out, "key,value")?;
            for (key, value) in rows {
                writeln!(out, "{key},{}", csv_field(&value))?;
            }
        }
        Format::Human => {
            let mut rows = Vec::new();
            flatten("", envelope, &mut rows);
            for (key, value) in rows {
                writeln!(out, "{key} = {value}")?;
            }
        }
    }
    Ok(())
}

/// Dotted-path scalar rows, arrays indexed numerically.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |key: &str| {
        if prefix.is_empty() {
            key.to_string()
        } else {
            format!("{prefix}.{key}")
        }
    };
    match v {
        Value::Object(map) => {
            for (key, child) in map {
                flatten(&join(key), child, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), child, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::Number(x) => out.push((prefix.to_string(), x.to_string())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
