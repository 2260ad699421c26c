//! Fixture families: the lower-bound witnesses and the introductory formulas.

use std::fmt;

use crate::automaton::{AutomatonBuilder, ParityAutomaton};
use crate::error::{Error, Result};
use crate::lasso::{FnOracle, MembershipOracle};
use crate::ltl::{parse_ltl, ApLetterMap, LtlFormula};
use crate::word::{Alphabet, Lasso};

/// `{σ^ω | σ ∈ Σ^n}` as a membership oracle.
pub fn phi_n_oracle(alphabet: Alphabet, n: usize) -> Result<impl MembershipOracle> {
    if n == 0 {
        return Err(Error::Input("phi_n needs n >= 1".into()));
    }
    Ok(FnOracle::new(alphabet, move |w: &Lasso| {
        is_n_periodic(w, n)
    }))
}

/// Does the word of `w` satisfy `w[i] = w[i+n]` everywhere?
///
/// Positions past `|u|+|v|` repeat earlier ones, so checking the base suffices.
pub fn is_n_periodic(w: &Lasso, n: usize) -> bool {
    (0..w.len()).all(|i| w.letter_at(i) == w.letter_at(i + n))
}

/// Deterministic Büchi automaton over `{0,1}` for "infinitely many 1s".
pub fn gf_one() -> ParityAutomaton {
    let mut b = AutomatonBuilder::new(Alphabet::numeric(2));
    let zero = b.add_state("z", 1);
    let one = b.add_state("o", 2);
    b.set_initial(zero);
    for q in [zero, one] {
        b.add_transition(q, 0, zero).add_transition(q, 1, one);
    }
    b.build().expect("fixture is well formed")
}

/// Nondeterministic automaton with `2k+1` states over `{0,1,2}` for
/// `Ω = {0,1}^i · 1 · {0,1}^(k−1) · 2 · 1^ω` with `i < k`.
pub fn omega_k(k: usize) -> Result<ParityAutomaton> {
    if k == 0 {
        return Err(Error::Input("omega_k needs k >= 1".into()));
    }
    let mut b = AutomatonBuilder::new(Alphabet::numeric(3));
    // (b, i) with i in 1..=k lives at index b*k + i - 1; q_a comes last
    let mut ids = Vec::with_capacity(2 * k);
    for bit in 0..2 {
        for i in 1..=k {
            ids.push(b.add_state(format!("({bit},{i})"), 1));
        }
    }
    let at = |bit: usize, i: usize| ids[bit * k + i - 1];
    let qa = b.add_state("qa", 0);
    b.set_initial(at(0, 1));
    b.add_transition(qa, 1, qa);
    for i in 1..=k {
        if i < k {
            b.add_transition(at(0, i), 0, at(0, i + 1));
            b.add_transition(at(0, i), 1, at(0, i + 1));
            b.add_transition(at(0, i), 1, at(1, 1));
            b.add_transition(at(1, i), 0, at(1, i + 1));
            b.add_transition(at(1, i), 1, at(1, i + 1));
        } else {
            b.add_transition(at(0, i), 1, at(1, 1));
            b.add_transition(at(1, i), 2, qa);
        }
    }
    b.build()
}

/// Direct membership test for `Ω` with parameter `k`.
pub fn in_omega(w: &Lasso, k: usize) -> bool {
    let twos: Vec<usize> = (0..w.len()).filter(|&i| w.letter_at(i) == 2).collect();
    if w.period().contains(&2) || twos.len() != 1 {
        return false;
    }
    let p = twos[0];
    // 2 at position p = i + k with i < k, and 1^ω afterwards
    p >= k
        && p < 2 * k
        && w.letter_at(p - k) == 1
        && (p + 1..p + 1 + w.len()).all(|j| w.letter_at(j) == 1)
}

/// The two formulas from the introduction with their AP maps.
pub fn intro_formulas() -> Vec<(LtlFormula, ApLetterMap)> {
    let fixture = |text: &str, aps: &[&str]| {
        let aps: Vec<String> = aps.iter().map(|s| s.to_string()).collect();
        let f = parse_ltl(text, &aps).expect("fixture formula parses");
        (f, ApLetterMap::new(aps).expect("fixture APs are valid"))
    };
    vec![
        fixture("(G F p -> G F q) & (G F r -> G F s)", &["p", "q", "r", "s"]),
        fixture("(F G p) & (G F q)", &["p", "q"]),
    ]
}

/// Hand-built deterministic parity automaton for `(F G p) ∧ (G F q)` with
/// colors `{1,2,3}`: `¬p` gets 3, `p∧q` gets 2, `p∧¬q` gets 1.
pub fn fg_p_and_gf_q() -> ParityAutomaton {
    let map = ApLetterMap::new(vec!["p".into(), "q".into()]).expect("two APs");
    let mut b = AutomatonBuilder::new(map.alphabet().clone());
    let init = b.add_state("init", 1);
    let not_p = b.add_state("!p", 3);
    let p_q = b.add_state("p&q", 2);
    let p_not_q = b.add_state("p&!q", 1);
    b.set_initial(init);
    for q in [init, not_p, p_q, p_not_q] {
        for letter in 0..4 {
            let target = match (map.holds(letter, 0), map.holds(letter, 1)) {
                (false, _) => not_p,
                (true, true) => p_q,
                (true, false) => p_not_q,
            };
            b.add_transition(q, letter, target);
        }
    }
    b.build().expect("fixture is well formed")
}

/// Deterministic automaton over `{0,..,colors-1}` whose state after reading
/// letter `i` has color `i`: accepts iff the largest letter seen infinitely
/// often is even.
pub fn max_letter_parity(colors: usize) -> Result<ParityAutomaton> {
    if colors == 0 {
        return Err(Error::Input("need at least one color".into()));
    }
    let mut b = AutomatonBuilder::new(Alphabet::numeric(colors));
    let init = b.add_state("init", 0);
    let states: Vec<_> = (0..colors)
        .map(|i| b.add_state(format!("c{i}"), i as u32))
        .collect();
    b.set_initial(init);
    for q in std::iter::once(init).chain(states.iter().copied()) {
        for (letter, &t) in states.iter().enumerate() {
            b.add_transition(q, letter, t);
        }
    }
    b.build()
}

/// A named, parameterized fixture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    PhiN { alphabet_size: usize, n: usize },
    GfOne,
    OmegaK { k: usize },
    FgGf,
    Intro { index: usize },
}

/// What a family instance materializes to.
pub enum Fixture {
    Automaton(ParityAutomaton),
    Formula(LtlFormula, ApLetterMap),
}

impl FamilySpec {
    /// Parses `phi-n`, `gf-one`, `omega-k`, `fg-gf` or `intro` with an optional parameter.
    pub fn from_name(
        name: &str,
        param: Option<usize>,
        alphabet_size: Option<usize>,
    ) -> Result<Self> {
        let spec = match name {
            "phi-n" | "phi_n" => FamilySpec::PhiN {
                alphabet_size: alphabet_size.unwrap_or(2),
                n: param.unwrap_or(2),
            },
            "gf-one" | "gf_one" => FamilySpec::GfOne,
            "omega-k" | "omega_k" => FamilySpec::OmegaK {
                k: param.unwrap_or(1),
            },
            "fg-gf" | "fg_gf" => FamilySpec::FgGf,
            "intro" => FamilySpec::Intro {
                index: param.unwrap_or(0),
            },
            other => return Err(Error::Input(format!("unknown family {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FamilySpec::PhiN { alphabet_size, n } if alphabet_size == 0 || n == 0 => Err(
                Error::Input("phi-n needs a non-empty alphabet and n >= 1".into()),
            ),
            FamilySpec::OmegaK { k: 0 } => Err(Error::Input("omega-k needs k >= 1".into())),
            FamilySpec::Intro { index } if index > 1 => {
                Err(Error::Input("intro has formulas 0 and 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// One-line description for headers and listings.
    pub fn note(&self) -> &'static str {
        match self {
            FamilySpec::PhiN { .. } => "sigma^omega for sigma of length n; every n-lasso-precise automaton needs |Sigma|^n states",
            FamilySpec::GfOne => "infinitely many 1s; n-lasso-precise safety automata need n states",
            FamilySpec::OmegaK { .. } => "2k+1 state NPA whose deterministic lasso-precise approximations need 2^k states",
            FamilySpec::FgGf => "3-color DPA for (F G p) & (G F q)",
            FamilySpec::Intro { .. } => "introductory LTL formula",
        }
    }

    /// Builds the fixture. `phi-n` is materialized as its exact safety automaton.
    pub fn build(&self) -> Result<Fixture> {
        self.validate()?;
        Ok(match *self {
            FamilySpec::PhiN { alphabet_size, n } => {
                let oracle = phi_n_oracle(Alphabet::numeric(alphabet_size), n)?;
                Fixture::Automaton(crate::constructions::build_safety_lasso_precise(
                    &oracle, n,
                )?)
            }
            FamilySpec::GfOne => Fixture::Automaton(gf_one()),
            FamilySpec::OmegaK { k } => Fixture::Automaton(omega_k(k)?),
            FamilySpec::FgGf => Fixture::Automaton(fg_p_and_gf_q()),
            FamilySpec::Intro { index } => {
                let (f, map) = intro_formulas().swap_remove(index);
                Fixture::Formula(f, map)
            }
        })
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::PhiN { alphabet_size, n } => {
                write!(f, "phi-n(|Sigma|={alphabet_size}, n={n})")
            }
            FamilySpec::GfOne => write!(f, "gf-one"),
            FamilySpec::OmegaK { k } => write!(f, "omega-k(k={k})"),
            FamilySpec::FgGf => write!(f, "fg-gf"),
            FamilySpec::Intro { index } => write!(f, "intro({index})"),
        }
    }
}
