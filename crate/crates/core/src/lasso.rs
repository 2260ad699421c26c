//! Lasso enumeration and the exhaustive lasso-precision checker.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::automaton::ParityAutomaton;
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::word::{Alphabet, Lasso, Letter};

/// "Is `stem · period^ω` a model?"
pub trait MembershipOracle: Sync {
    fn alphabet(&self) -> &Alphabet;
    fn contains(&self, w: &Lasso) -> bool;
}

impl MembershipOracle for ParityAutomaton {
    fn alphabet(&self) -> &Alphabet {
        ParityAutomaton::alphabet(self)
    }

    fn contains(&self, w: &Lasso) -> bool {
        self.accepts_unchecked(w)
    }
}

impl<T: MembershipOracle + ?Sized> MembershipOracle for &T {
    fn alphabet(&self) -> &Alphabet {
        (**self).alphabet()
    }

    fn contains(&self, w: &Lasso) -> bool {
        (**self).contains(w)
    }
}

/// Oracle given by a closure.
pub struct FnOracle<F> {
    alphabet: Alphabet,
    f: F,
}

impl<F: Fn(&Lasso) -> bool + Sync> FnOracle<F> {
    pub fn new(alphabet: Alphabet, f: F) -> Self {
        FnOracle { alphabet, f }
    }
}

impl<F: Fn(&Lasso) -> bool + Sync> MembershipOracle for FnOracle<F> {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn contains(&self, w: &Lasso) -> bool {
        (self.f)(w)
    }
}

/// Same infinite word, represented by a lasso of length `target`.
pub fn unroll(w: &Lasso, target: usize) -> Result<Lasso> {
    w.unroll(target)
}

/// Base word number `index` of length `n` (first letter most significant).
pub fn base_by_index(alphabet_size: usize, n: usize, mut index: u64) -> Vec<Letter> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = (index % alphabet_size as u64) as Letter;
        index /= alphabet_size as u64;
    }
    out
}

/// `|Σ|^n`, or `None` on overflow.
pub fn base_count(alphabet_size: usize, n: usize) -> Option<u64> {
    (alphabet_size as u64).checked_pow(n as u32)
}

/// Every lasso of length exactly `n`: all base words in lexicographic order,
/// each with every split point. Syntactically distinct lassos for the same
/// word are all produced.
pub fn enumerate_bases(alphabet: &Alphabet, n: usize) -> Result<impl Iterator<Item = Lasso>> {
    if n == 0 {
        return Err(Error::Input("lasso length must be at least 1".into()));
    }
    let size = alphabet.len();
    let count =
        base_count(size, n).ok_or_else(|| Error::Input("too many bases to enumerate".into()))?;
    Ok((0..count).flat_map(move |i| {
        let base = base_by_index(size, n, i);
        (0..n).map(move |split| Lasso::from_base(&base, split).expect("split < n"))
    }))
}

/// Every lasso with length between 1 and `n`.
pub fn enumerate_bases_up_to(alphabet: &Alphabet, n: usize) -> Result<Vec<Lasso>> {
    let mut out = Vec::new();
    for len in 1..=n {
        out.extend(enumerate_bases(alphabet, len)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub lasso: Lasso,
    pub in_phi: bool,
    pub in_automaton: bool,
}

/// Outcome of [`check_lasso_precise`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionReport {
    pub bound: usize,
    /// Automaton and property agree on every lasso of length `bound`.
    pub agree: bool,
    pub mismatches: Vec<Mismatch>,
    pub inclusion_bound: usize,
    /// Accepted lassos of length at most `inclusion_bound` that the property
    /// rejects (one representative per word).
    pub inclusion_violations: Vec<Lasso>,
    /// Exact `L(A) ⊆ L(reference)` when that check was applicable.
    pub exact_inclusion: Option<bool>,
}

impl PrecisionReport {
    /// Agreement with no inclusion evidence against it.
    pub fn is_precise(&self) -> bool {
        self.agree && self.inclusion_violations.is_empty() && self.exact_inclusion != Some(false)
    }

    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "bound: {}", self.bound);
        let _ = writeln!(out, "agree: {}", self.agree);
        let _ = writeln!(out, "mismatches: {}", self.mismatches.len());
        for m in &self.mismatches {
            let _ = writeln!(
                out,
                "  mismatch {} in_phi={} in_automaton={}",
                m.lasso.display(alphabet),
                m.in_phi,
                m.in_automaton
            );
        }
        let _ = writeln!(out, "inclusion_bound: {}", self.inclusion_bound);
        let _ = writeln!(
            out,
            "inclusion_violations: {}",
            self.inclusion_violations.len()
        );
        for w in &self.inclusion_violations {
            let _ = writeln!(out, "  violation {}", w.display(alphabet));
        }
        if let Some(exact) = self.exact_inclusion {
            let _ = writeln!(out, "exact_inclusion: {exact}");
        }
        let _ = writeln!(out, "precise: {}", self.is_precise());
        out
    }

    /// Structured form: one record per mismatch with the base word, split
    /// index and both membership bits.
    pub fn to_json(&self, alphabet: &Alphabet) -> serde_json::Value {
        let record = |w: &Lasso| {
            serde_json::json!({
                "base": alphabet.format_word(&w.base()),
                "split": w.split(),
            })
        };
        serde_json::json!({
            "bound": self.bound,
            "agree": self.agree,
            "precise": self.is_precise(),
            "mismatches": self.mismatches.iter().map(|m| {
                let mut r = record(&m.lasso);
                r["in_phi"] = m.in_phi.into();
                r["in_automaton"] = m.in_automaton.into();
                r
            }).collect::<Vec<_>>(),
            "inclusion_bound": self.inclusion_bound,
            "inclusion_violations": self.inclusion_violations.iter().map(record).collect::<Vec<_>>(),
            "exact_inclusion": self.exact_inclusion,
        })
    }
}

/// `max(n, |A|)`: long enough to expose any accepting cycle of `A`.
pub fn default_inclusion_bound(a: &ParityAutomaton, n: usize) -> usize {
    n.max(a.num_states())
}

/// Checks `L_n(A) = L_n(φ)` exactly and `L(A) ⊆ φ` on lassos up to `inclusion_bound`.
pub fn check_lasso_precise(
    a: &ParityAutomaton,
    phi: &dyn MembershipOracle,
    n: usize,
    inclusion_bound: usize,
) -> Result<PrecisionReport> {
    check_lasso_precise_with(Exec::default(), a, phi, n, inclusion_bound)
}

pub fn check_lasso_precise_with(
    exec: Exec,
    a: &ParityAutomaton,
    phi: &dyn MembershipOracle,
    n: usize,
    inclusion_bound: usize,
) -> Result<PrecisionReport> {
    if n == 0 {
        return Err(Error::Input("precision bound must be at least 1".into()));
    }
    if inclusion_bound < n {
        return Err(Error::Input(format!(
            "inclusion bound {inclusion_bound} is smaller than the precision bound {n}"
        )));
    }
    if a.alphabet() != phi.alphabet() {
        return Err(Error::Input(
            "automaton and property use different alphabets".into(),
        ));
    }
    let size = a.alphabet().len();
    let too_many = || Error::ResourceLimit("lasso enumeration exceeds 2^64 bases".into());

    let count = base_count(size, n).ok_or_else(too_many)?;
    let mut mismatches = par::map_reduce(
        exec,
        0..count,
        Vec::new(),
        |i| {
            let base = base_by_index(size, n, i);
            (0..n)
                .filter_map(|split| {
                    let w = Lasso::from_base(&base, split).expect("split < n");
                    let in_a = a.accepts_unchecked(&w);
                    let in_phi = phi.contains(&w);
                    (in_a != in_phi).then_some(Mismatch {
                        lasso: w,
                        in_phi,
                        in_automaton: in_a,
                    })
                })
                .collect::<Vec<_>>()
        },
        concat,
    );
    mismatches.sort_by(|x, y| x.lasso.cmp(&y.lasso));

    let mut violations = Vec::new();
    for len in 1..=inclusion_bound {
        let count = base_count(size, len).ok_or_else(too_many)?;
        let mut found = par::map_reduce(
            exec,
            0..count,
            Vec::new(),
            |i| {
                let base = base_by_index(size, len, i);
                (0..len)
                    .filter_map(|split| {
                        let w = Lasso::from_base(&base, split).expect("split < len");
                        // one representative per infinite word
                        if w.canonical() != w {
                            return None;
                        }
                        (a.accepts_unchecked(&w) && !phi.contains(&w)).then_some(w)
                    })
                    .collect::<Vec<_>>()
            },
            concat,
        );
        found.sort();
        violations.extend(found);
    }

    Ok(PrecisionReport {
        bound: n,
        agree: mismatches.is_empty(),
        mismatches,
        inclusion_bound,
        inclusion_violations: violations,
        exact_inclusion: None,
    })
}

/// Precision against a reference automaton; adds the exact inclusion check
/// when `a` is a safety automaton and `reference` is deterministic.
pub fn check_against_automaton(
    a: &ParityAutomaton,
    reference: &ParityAutomaton,
    n: usize,
    inclusion_bound: usize,
) -> Result<PrecisionReport> {
    let mut report = check_lasso_precise(a, reference, n, inclusion_bound)?;
    if a.is_safety() && reference.is_deterministic() {
        report.exact_inclusion = Some(ParityAutomaton::check_inclusion_exact(a, reference)?.holds);
    }
    Ok(report)
}

fn concat<T>(mut a: Vec<T>, mut b: Vec<T>) -> Vec<T> {
    a.append(&mut b);
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::AutomatonBuilder;
    use crate::ltl::{ltl_oracle, parse_ltl, ApLetterMap};

    #[test]
    fn enumeration_counts() {
        let bin = Alphabet::numeric(2);
        let one: Vec<Lasso> = enumerate_bases(&bin, 1).unwrap().collect();
        assert_eq!(
            one,
            vec![
                Lasso::new(vec![], vec![0]).unwrap(),
                Lasso::new(vec![], vec![1]).unwrap()
            ]
        );
        assert_eq!(enumerate_bases(&bin, 2).unwrap().count(), 8);
        assert_eq!(
            enumerate_bases(&Alphabet::numeric(3), 3).unwrap().count(),
            81
        );
        assert!(enumerate_bases(&bin, 0).is_err());
    }

    #[test]
    fn enumeration_order_is_canonical() {
        let bin = Alphabet::numeric(2);
        let all: Vec<Lasso> = enumerate_bases(&bin, 2).unwrap().collect();
        assert_eq!(all[0], Lasso::from_base(&[0, 0], 0).unwrap());
        assert_eq!(all[1], Lasso::from_base(&[0, 0], 1).unwrap());
        assert_eq!(all[2], Lasso::from_base(&[0, 1], 0).unwrap());
        assert_eq!(all[7], Lasso::from_base(&[1, 1], 1).unwrap());
    }

    fn gp() -> (ApLetterMap, crate::ltl::LtlOracle) {
        let m = ApLetterMap::new(vec!["p".into()]).unwrap();
        let f = parse_ltl("G p", m.aps()).unwrap();
        (m.clone(), ltl_oracle(f, m).unwrap())
    }

    #[test]
    fn rejecting_automaton_mismatches_gp() {
        let (m, o) = gp();
        let mut b = AutomatonBuilder::new(m.alphabet().clone());
        let s = b.add_state("s", 1);
        b.set_initial(s);
        let a = b.build().unwrap();
        let r = check_lasso_precise(&a, &o, 1, 1).unwrap();
        assert!(!r.agree);
        assert_eq!(r.mismatches.len(), 1);
        let mm = &r.mismatches[0];
        assert_eq!(mm.lasso, Lasso::parse(m.alphabet(), "", "{p}").unwrap());
        assert!(mm.in_phi && !mm.in_automaton);
    }

    #[test]
    fn exact_gp_automaton_is_precise() {
        let (m, o) = gp();
        let mut b = AutomatonBuilder::new(m.alphabet().clone());
        let s = b.add_state("s", 0);
        b.set_initial(s);
        b.add_transition(s, 1, s);
        let a = b.build().unwrap();
        for n in 1..=5 {
            let r = check_lasso_precise(&a, &o, n, n + 1).unwrap();
            assert!(r.is_precise(), "n={n}");
        }
        assert!(check_lasso_precise(&a, &o, 3, 2).is_err());
    }

    #[test]
    fn report_serializations() {
        let (m, o) = gp();
        let mut b = AutomatonBuilder::new(m.alphabet().clone());
        let s = b.add_state("s", 0);
        b.set_initial(s);
        b.add_transition(s, 0, s).add_transition(s, 1, s);
        let a = b.build().unwrap();
        let r = check_lasso_precise(&a, &o, 1, 1).unwrap();
        assert_eq!(r.inclusion_violations.len(), 1);
        let text = r.to_text(m.alphabet());
        assert!(text.contains("precise: false"));
        let json = r.to_json(m.alphabet());
        assert_eq!(json["mismatches"][0]["in_phi"], false);
        assert_eq!(json["mismatches"][0]["in_automaton"], true);
        assert_eq!(json["mismatches"][0]["split"], 0);
        assert_eq!(json["mismatches"][0]["base"], "{}");
    }

    #[test]
    fn sequential_and_parallel_reports_match() {
        let (m, o) = gp();
        let mut b = AutomatonBuilder::new(m.alphabet().clone());
        let s = b.add_state("s", 0);
        b.set_initial(s);
        b.add_transition(s, 0, s).add_transition(s, 1, s);
        let a = b.build().unwrap();
        let x = check_lasso_precise_with(Exec::Sequential, &a, &o, 4, 5).unwrap();
        let y = check_lasso_precise_with(Exec::Parallel, &a, &o, 4, 5).unwrap();
        assert_eq!(x, y);
    }
}
