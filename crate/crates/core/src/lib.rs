//! Lasso-precise approximations of ω-regular languages.
//!
//! An automaton `A'` is an `n`-lasso-precise underapproximation of a
//! property `φ` when `L(A') ⊆ φ` and both agree on every ultimately-periodic
//! word `u·v^ω` with `|u·v| = n`. The crate provides:
//!
//! * [`automaton`]: parity automata, exact lasso acceptance, emptiness,
//!   complementation of deterministic automata and safety products;
//! * [`ltl`]: an LTL parser and an exact evaluator on lassos;
//! * [`lasso`]: base enumeration and the exhaustive precision checker;
//! * [`constructions`]: the safety, Büchi-to-safety and color-reduction
//!   constructions;
//! * [`families`]: lower-bound witness families;
//! * [`synth`]: bounded-size synthesis through a 2-QBF encoding;
//! * [`hoa`]: a subset of the HOA v1 interchange format.

pub mod automaton;
pub mod constructions;
pub mod error;
pub mod families;
mod graph;
pub mod hoa;
pub mod lasso;
pub mod ltl;
pub mod par;
pub mod synth;
pub mod word;

pub use automaton::{
    AutomatonBuilder, Color, Emptiness, Inclusion, ParityAutomaton, RunLasso, StateId,
};
pub use error::{Error, Result};

pub use lasso::{MembershipOracle, PrecisionReport};
pub use ltl::{ApLetterMap, LtlFormula};
pub use word::{Alphabet, Lasso, Letter};
