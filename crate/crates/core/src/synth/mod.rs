//! Bounded-size synthesis of lasso-precise automata from LTL.
//!
//! A query asks for a `k`-state automaton with `m` colors whose language is
//! contained in the formula and agrees with it on all lassos of length `n`.
//! The question is encoded as a 2-QBF ([`encode`]), which can be written as
//! QDIMACS for an external solver or decided internally by expanding the
//! universal variables ([`solve_by_expansion`]). [`BruteForce`] enumerates
//! candidate automata directly and serves as an independent oracle.

pub mod brute;
pub mod circuit;
pub mod encode;
pub mod expand;
pub mod external;
pub mod lazy;
pub mod qdimacs;

pub use brute::BruteForce;
pub use encode::{encode, QbfProblem, VarRole};
pub use expand::{
    expansion_size, model_satisfies, solve_by_expansion, solve_by_expansion_refined, Verdict,
};
pub use external::solve_external;
pub use lazy::LazySynthesis;
pub use qdimacs::emit_qdimacs;

use crate::automaton::{Color, ParityAutomaton};
use crate::error::{Error, Result};
use crate::lasso::check_lasso_precise;
use crate::ltl::{ltl_oracle, ApLetterMap, LtlFormula};

/// Default cap on universal assignments expanded by the internal solver.
pub const DEFAULT_EXPANSION_LIMIT: u64 = 5_000_000;

/// Shape of the automaton being synthesized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Target {
    #[default]
    Deterministic,
    /// Experimental: run variables are universal, so every run must behave.
    Nondeterministic,
}

/// A bounded synthesis question for `formula` over the letters of `map`.
#[derive(Clone, Debug)]
pub struct SynthesisQuery {
    pub formula: LtlFormula,
    pub map: ApLetterMap,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub target: Target,
}

/// How a query is decided.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Universal expansion followed by SAT.
    Expansion { limit: u64 },
    /// An external QBF solver command reading QDIMACS.
    External { command: String },
    /// Enumeration of candidate automata.
    BruteForce { ceiling: u64 },
}

impl Default for Backend {
    fn default() -> Self {
        Backend::Expansion {
            limit: DEFAULT_EXPANSION_LIMIT,
        }
    }
}

/// Reads the automaton out of a model of the encoding.
pub fn decode(p: &QbfProblem, model: &[bool]) -> Result<ParityAutomaton> {
    let q = &p.query;
    let sigma = q.map.alphabet().len();
    let at = |v: u32| model.get(v as usize).copied().unwrap_or(false);
    let mut delta = vec![vec![Vec::new(); sigma]; q.k];
    let mut colors = Vec::with_capacity(q.k);
    for (s, row) in delta.iter_mut().enumerate() {
        for (a, succ) in row.iter_mut().enumerate() {
            succ.extend((0..q.k).filter(|&t| at(p.delta_var(s, a, t))));
            if q.target == Target::Deterministic && succ.len() > 1 {
                return Err(Error::Decode(format!(
                    "state {s} has several successors on letter {a}"
                )));
            }
        }
        let cs: Vec<usize> = (0..q.m).filter(|&c| at(p.color_var(s, c))).collect();
        match cs.as_slice() {
            [c] => colors.push(*c as Color),
            _ => return Err(Error::Decode(format!("state {s} has {} colors", cs.len()))),
        }
    }
    let names = (0..q.k).map(|s| format!("s{s}")).collect();
    ParityAutomaton::new(q.map.alphabet().clone(), names, vec![0], delta, colors)
}

/// Decides whether a lasso-precise automaton of the requested size exists and
/// returns one. Every witness is re-checked against the formula at inclusion
/// bound `n·k`. The encoding only checks inclusion on runs of size exactly `k`,
/// so the internal backend blocks candidates that fail the re-check and keeps
/// searching; an external certificate that fails it is reported as an error.
pub fn synthesize(query: &SynthesisQuery, backend: &Backend) -> Result<Option<ParityAutomaton>> {
    let oracle = ltl_oracle(query.formula.clone(), query.map.clone())?;
    let bound = query.n * query.k;
    let p = match backend {
        Backend::BruteForce { ceiling } => {
            let mut bf = BruteForce::new(query.n, query.k, query.m, query.target);
            bf.ceiling = *ceiling;
            return bf.run(&oracle);
        }
        _ => encode(query)?,
    };
    let verdict = match backend {
        Backend::External { command } => solve_external(&p, command)?,
        _ => {
            let limit = match backend {
                Backend::Expansion { limit } => *limit,
                _ => unreachable!(),
            };
            let mut failure = None;
            let v = solve_by_expansion_refined(&p, limit, &mut |model| match decode(&p, model)
                .and_then(|a| check_lasso_precise(&a, &oracle, query.n, bound))
            {
                Ok(report) => report.is_precise(),
                Err(e) => {
                    failure = Some(e);
                    true
                }
            })?;
            if let Some(e) = failure {
                return Err(e);
            }
            v
        }
    };
    let model = match verdict {
        Verdict::Unsat => return Ok(None),
        Verdict::Sat(Some(model)) => model,
        Verdict::Sat(None) => {
            return Err(Error::Decode(
                "the solver reported SAT without a model".into(),
            ));
        }
    };
    let a = decode(&p, &model)?;
    let report = check_lasso_precise(&a, &oracle, query.n, bound)?;
    if !report.is_precise() {
        return Err(Error::Solver(
            "the certificate is not lasso-precise at inclusion bound n·k".into(),
        ));
    }
    Ok(Some(a))
}

/// Smallest `k ≤ k_max` with a lasso-precise automaton, and that automaton.
pub fn synthesize_minimal(
    formula: &LtlFormula,
    map: &ApLetterMap,
    n: usize,
    m: usize,
    k_max: usize,
    target: Target,
    backend: &Backend,
) -> Result<Option<(usize, ParityAutomaton)>> {
    for k in 1..=k_max {
        let query = SynthesisQuery {
            formula: formula.clone(),
            map: map.clone(),
            n,
            k,
            m,
            target,
        };
        if let Some(a) = synthesize(&query, backend)? {
            return Ok(Some((k, a)));
        }
    }
    Ok(None)
}
