//! Lasso-precise underapproximations with simpler acceptance conditions.
//!
//! Every construction explores only the states reachable from the initial
//! states and asserts its worst-case size bound afterwards.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use crate::automaton::{AutomatonBuilder, Color, ParityAutomaton, StateId};
use crate::error::{Error, Result};
use crate::lasso::MembershipOracle;
use crate::word::{Alphabet, Lasso, Letter};

fn explore<K, N, C, S>(
    alphabet: &Alphabet,
    initial: Vec<K>,
    name: N,
    color: C,
    mut succ: S,
) -> Result<ParityAutomaton>
where
    K: Hash + Eq + Clone,
    N: Fn(&K) -> String,
    C: Fn(&K) -> Color,
    S: FnMut(&K, Letter) -> Vec<K>,
{
    let mut b = AutomatonBuilder::new(alphabet.clone());
    let mut ids: HashMap<K, StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |b: &mut AutomatonBuilder, queue: &mut VecDeque<K>, k: K| -> StateId {
        if let Some(&id) = ids.get(&k) {
            return id;
        }
        let id = b.add_state(name(&k), color(&k));
        ids.insert(k.clone(), id);
        queue.push_back(k);
        id
    };
    for k in initial {
        let id = intern(&mut b, &mut queue, k);
        b.set_initial(id);
    }
    let mut next_id = 0;
    while let Some(k) = queue.pop_front() {
        let from = next_id;
        next_id += 1;
        for letter in 0..alphabet.len() {
            for t in succ(&k, letter) {
                let to = intern(&mut b, &mut queue, t);
                b.add_transition(from, letter, to);
            }
        }
    }
    b.build()
}

fn saturating_pow(base: u128, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base))
}

/// `(|Σ|+1)^n + |Σ|^n·(n+1)^n`.
pub fn safety_state_bound(alphabet_size: usize, n: usize) -> u128 {
    let s = alphabet_size as u128;
    saturating_pow(s + 1, n)
        .saturating_add(saturating_pow(s, n).saturating_mul(saturating_pow(n as u128 + 1, n)))
}

fn accepting_set(a: &ParityAutomaton) -> Vec<bool> {
    if a.is_safety() {
        vec![true; a.num_states()]
    } else {
        (0..a.num_states()).map(|q| a.color(q) == 2).collect()
    }
}

/// `n·|Q\F|² + |F|`.
pub fn buechi_safety_bound(a: &ParityAutomaton, n: usize) -> u128 {
    let f = accepting_set(a).iter().filter(|&&x| x).count() as u128;
    let rest = a.num_states() as u128 - f;
    (n as u128) * rest * rest + f
}

/// `(n·|Q|+1)·|Q|·(m−m′+2)` with `m = max color + 1`.
pub fn color_reduction_bound(a: &ParityAutomaton, n: usize, m_prime: usize) -> u128 {
    let q = a.num_states() as u128;
    let m = a.max_color() as u128 + 1;
    (n as u128 * q + 1) * q * (m.saturating_sub(m_prime as u128) + 2)
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum SafetyState {
    Reading(Vec<Letter>),
    Tracking(Vec<Letter>, Vec<Option<usize>>),
}

/// Deterministic safety automaton accepting exactly the words of `phi`
/// that are induced by a lasso of length `n`.
///
/// The automaton first stores the length-`n` prefix, then keeps one pointer
/// per candidate loop start that survives while the input keeps repeating it.
pub fn build_safety_lasso_precise(phi: &dyn MembershipOracle, n: usize) -> Result<ParityAutomaton> {
    if n == 0 {
        return Err(Error::Input("bound n must be at least 1".into()));
    }
    let alphabet = phi.alphabet().clone();
    let mut memo: HashMap<(Vec<Letter>, usize), bool> = HashMap::new();
    let name = |k: &SafetyState| match k {
        SafetyState::Reading(w) => {
            format!("{}{}", alphabet.format_word(w), "#".repeat(n - w.len()))
        }
        SafetyState::Tracking(w, t) => {
            let ptrs: Vec<String> = t
                .iter()
                .map(|p| p.map_or("-".to_string(), |p| (p + 1).to_string()))
                .collect();
            format!("{}|{}", alphabet.format_word(w), ptrs.join(","))
        }
    };
    let a = explore(
        &alphabet,
        vec![SafetyState::Reading(Vec::new())],
        name,
        |_| 0,
        |k, letter| match k {
            SafetyState::Reading(w) => {
                let mut w = w.clone();
                w.push(letter);
                if w.len() < n {
                    return vec![SafetyState::Reading(w)];
                }
                let ptrs = (0..n)
                    .map(|i| {
                        let ok = *memo.entry((w.clone(), i)).or_insert_with(|| {
                            phi.contains(&Lasso::from_base(&w, i).expect("split < n"))
                        });
                        ok.then_some(i)
                    })
                    .collect();
                vec![SafetyState::Tracking(w, ptrs)]
            }
            SafetyState::Tracking(w, t) => {
                if t.iter().all(Option::is_none) {
                    return Vec::new();
                }
                let next = t
                    .iter()
                    .enumerate()
                    .map(|(i, p)| match *p {
                        Some(p) if w[p] == letter => Some(if p + 1 < n { p + 1 } else { i }),
                        _ => None,
                    })
                    .collect();
                vec![SafetyState::Tracking(w.clone(), next)]
            }
        },
    )?;
    assert!(
        (a.num_states() as u128) <= safety_state_bound(alphabet.len(), n),
        "safety construction exceeded its state bound"
    );
    Ok(a)
}

/// Safety automaton `A′ ⊆ A` with `L_n(A′) = L_n(A)` for a Büchi automaton.
///
/// A counter tracks the number of consecutive non-accepting states; the
/// automaton rejects when an increment would exceed `n·|Q\F|`. Safety inputs
/// are treated as Büchi automata with `F = Q`.
pub fn buechi_to_safety(a: &ParityAutomaton, n: usize) -> Result<ParityAutomaton> {
    if !a.is_buchi() && !a.is_safety() {
        return Err(Error::Contract(
            "buechi_to_safety needs a Büchi automaton (colors within {1,2})".into(),
        ));
    }
    if n == 0 {
        return Err(Error::Input("bound n must be at least 1".into()));
    }
    let f = accepting_set(a);
    let limit = n * f.iter().filter(|&&x| !x).count();
    let start = a
        .initial()
        .iter()
        .map(|&q| (q, if f[q] { 0 } else { 1 }))
        .collect();
    let out = explore(
        a.alphabet(),
        start,
        |&(q, c)| format!("({},{c})", a.state_name(q)),
        |_| 0,
        |&(q, c), letter| {
            a.successors(q, letter)
                .iter()
                .filter_map(|&t| {
                    if f[t] {
                        Some((t, 0))
                    } else {
                        (c < limit).then_some((t, c + 1))
                    }
                })
                .collect()
        },
    )?;
    assert!(
        (out.num_states() as u128) <= buechi_safety_bound(a, n),
        "Büchi-to-safety construction exceeded its state bound"
    );
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum TrackState {
    Skip(StateId, usize),
    Track(StateId, usize, i64),
}

fn k_state(k: &TrackState) -> StateId {
    match *k {
        TrackState::Skip(q, _) | TrackState::Track(q, _, _) => q,
    }
}

/// Deterministic parity automaton with at most `m_prime` colors, contained
/// in `L(A)` and agreeing with it on all lassos of length `n`.
///
/// After skipping `n·|Q|` steps the automaton remembers the highest color
/// `h ≥ m_prime` seen so far and requires it to reappear within `n·|Q|`
/// steps. When no such color was seen the remaining colors decide.
pub fn reduce_parity_colors(
    a: &ParityAutomaton,
    n: usize,
    m_prime: usize,
) -> Result<ParityAutomaton> {
    if !a.is_deterministic() {
        return Err(Error::Contract(
            "color reduction needs a deterministic automaton".into(),
        ));
    }
    if n == 0 {
        return Err(Error::Input("bound n must be at least 1".into()));
    }
    let m = a.max_color() as usize + 1;
    if m_prime == 0 || m_prime >= m {
        return Err(Error::Contract(format!(
            "target color count must satisfy 0 < m' < m = {m}, got m' = {m_prime}"
        )));
    }
    let big = n * a.num_states();
    let mp = m_prime as i64;
    let mu = |q: StateId| a.color(q) as i64;

    // Low colors that survive, and representatives of each parity for the
    // tracked high colors.
    let mut low: Vec<Color> = a
        .colors()
        .iter()
        .copied()
        .filter(|&c| (c as usize) < m_prime)
        .collect();
    low.sort_unstable();
    low.dedup();
    let pick = |parity: Color| -> Color {
        low.iter()
            .copied()
            .find(|c| c % 2 == parity)
            .unwrap_or_else(|| match low.last() {
                Some(&top) if (top + 1) % 2 == parity => top + 1,
                Some(&top) => top + 2,
                None => parity,
            })
    };
    let (even, odd) = (pick(0), pick(1));
    let single = m_prime == 1;

    let out = explore(
        a.alphabet(),
        a.initial()
            .iter()
            .map(|&q| TrackState::Skip(q, 0))
            .collect(),
        |k| match *k {
            TrackState::Skip(q, c) => format!("({},{c})", a.state_name(q)),
            TrackState::Track(q, c, h) => format!("({},{c},{h})", a.state_name(q)),
        },
        |k| match *k {
            _ if single => 0,
            TrackState::Skip(..) => even,
            TrackState::Track(_, _, h) if h >= mp => {
                if h % 2 == 0 {
                    even
                } else {
                    odd
                }
            }
            TrackState::Track(q, c, _) if c == big => a.color(q),
            TrackState::Track(..) => even,
        },
        |k, letter| {
            let succ = a.successors(k_state(k), letter).iter().copied();
            match *k {
                TrackState::Skip(_, c) if c + 1 < big => {
                    succ.map(|t| TrackState::Skip(t, c + 1)).collect()
                }
                TrackState::Skip(..) => succ
                    .map(|t| TrackState::Track(t, 0, if mu(t) >= mp { mu(t) } else { -1 }))
                    .collect(),
                // saturated without a high color: only low colors may follow
                TrackState::Track(_, c, _) if c == big => succ
                    .filter(|&t| mu(t) < mp)
                    .map(|t| TrackState::Track(t, big, -1))
                    .collect(),
                TrackState::Track(_, c, h) => succ
                    .filter_map(|t| {
                        let col = mu(t);
                        if col > h && col >= mp {
                            Some(TrackState::Track(t, 0, col))
                        } else if col == h && !(single && h % 2 == 1) {
                            Some(TrackState::Track(t, 0, h))
                        } else if c + 1 == big && h >= mp {
                            None
                        } else {
                            Some(TrackState::Track(t, c + 1, h))
                        }
                    })
                    .collect(),
            }
        },
    )?;
    assert!(
        (out.num_states() as u128) <= color_reduction_bound(a, n, m_prime),
        "color reduction exceeded its state bound"
    );
    Ok(out)
}

/// Removes one color: `reduce_parity_colors` with one color fewer than `A` uses.
pub fn drop_one_color(a: &ParityAutomaton, n: usize) -> Result<ParityAutomaton> {
    let count = a.color_count();
    if count < 2 {
        return Err(Error::Contract(
            "dropping a color needs at least two colors".into(),
        ));
    }
    reduce_parity_colors(a, n, count - 1)
}

/// Inner underapproximation used by [`overapproximate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnderMode {
    Safety,
    Colors(usize),
}

/// Underapproximation of a deterministic automaton in the given mode.
pub fn underapproximate(a: &ParityAutomaton, n: usize, mode: UnderMode) -> Result<ParityAutomaton> {
    match mode {
        UnderMode::Safety if a.is_buchi() || a.is_safety() => buechi_to_safety(a, n),
        UnderMode::Safety => reduce_parity_colors(a, n, 1),
        UnderMode::Colors(0) => Err(Error::Contract(
            "target color count must be positive".into(),
        )),
        UnderMode::Colors(k) if (a.max_color() as usize) < k => Ok(a.clone()),
        UnderMode::Colors(k) => reduce_parity_colors(a, n, k),
    }
}

/// `A″ ⊇ A` with `L_n(A″) = L_n(A)`: the complement of an underapproximation
/// of the complement.
pub fn overapproximate(a: &ParityAutomaton, n: usize, mode: UnderMode) -> Result<ParityAutomaton> {
    if !a.is_deterministic() {
        return Err(Error::Contract(
            "overapproximation needs a deterministic automaton".into(),
        ));
    }
    let complement = a.complete_with_sink().complement_dpa()?;
    let under = underapproximate(&complement, n, mode)?;
    under.complete_with_sink().complement_dpa()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lasso::{check_lasso_precise, enumerate_bases, enumerate_bases_up_to, FnOracle};

    fn gf1() -> ParityAutomaton {
        let mut b = AutomatonBuilder::new(Alphabet::numeric(2));
        let z = b.add_state("z", 1);
        let o = b.add_state("o", 2);
        b.set_initial(z);
        b.add_transition(z, 0, z).add_transition(z, 1, o);
        b.add_transition(o, 0, z).add_transition(o, 1, o);
        b.build().unwrap()
    }

    fn lasso(stem: &str, period: &str) -> Lasso {
        Lasso::parse(&Alphabet::numeric(2), stem, period).unwrap()
    }

    #[test]
    fn buechi_to_safety_examples() {
        let s = buechi_to_safety(&gf1(), 4).unwrap();
        assert!(s.num_states() <= 5);
        assert!(s.is_safety() && s.is_deterministic());
        assert!(s.accepts_lasso(&lasso("", "0001")).unwrap());
        assert!(!s.accepts_lasso(&lasso("", "0")).unwrap());

        let s2 = buechi_to_safety(&gf1(), 2).unwrap();
        assert!(!s2.accepts_lasso(&lasso("", "0001")).unwrap());
        assert!(s2.accepts_lasso(&lasso("", "01")).unwrap());
    }

    #[test]
    fn buechi_to_safety_all_accepting_is_identity() {
        let a = gf1().with_colors(vec![2, 2]).unwrap();
        let s = buechi_to_safety(&a, 3).unwrap();
        assert_eq!(s.num_states(), 2);
        for w in enumerate_bases_up_to(a.alphabet(), 4).unwrap() {
            assert!(s.accepts_lasso(&w).unwrap());
        }
    }

    #[test]
    fn buechi_to_safety_rejects_parity_input() {
        let a = gf1().with_colors(vec![0, 3]).unwrap();
        assert!(matches!(buechi_to_safety(&a, 2), Err(Error::Contract(_))));
    }

    #[test]
    fn safety_construction_for_periodic_family() {
        let alph = Alphabet::numeric(2);
        let phi = FnOracle::new(alph.clone(), |w: &Lasso| {
            let len = w.len();
            (0..len).all(|i| w.letter_at(i) == w.letter_at(i + 2))
        });
        let s = build_safety_lasso_precise(&phi, 2).unwrap();
        assert!(s.is_safety() && s.is_deterministic());
        assert!(s.accepts_lasso(&lasso("", "01")).unwrap());
        assert!(s.accepts_lasso(&lasso("0", "10")).unwrap());
        assert!(!s.accepts_lasso(&lasso("0", "1")).unwrap());
        assert!(s.num_states() >= 4);
        assert!(check_lasso_precise(&s, &phi, 2, 4).unwrap().is_precise());
    }

    #[test]
    fn safety_construction_rejects_after_failed_start() {
        let alph = Alphabet::numeric(2);
        let phi = FnOracle::new(alph, |w: &Lasso| w.letters().all(|l| l == 1));
        let s = build_safety_lasso_precise(&phi, 1).unwrap();
        let q = s.step(s.initial()[0], 0).unwrap();
        assert_eq!(s.state_name(q), "0|-");
        assert!(s.successors(q, 0).is_empty() && s.successors(q, 1).is_empty());
        assert!(s.num_states() <= 4);
    }

    fn fg_gf() -> ParityAutomaton {
        // letters are masks over (p, q); colors: !p -> 3, p&q -> 2, p&!q -> 1
        let mut b = AutomatonBuilder::new(Alphabet::new(["{}", "{p}", "{q}", "{p,q}"]).unwrap());
        let init = b.add_state("init", 1);
        let np = b.add_state("np", 3);
        let pq = b.add_state("pq", 2);
        let pnq = b.add_state("pnq", 1);
        b.set_initial(init);
        for q in [init, np, pq, pnq] {
            b.add_transition(q, 0, np).add_transition(q, 2, np);
            b.add_transition(q, 1, pnq).add_transition(q, 3, pq);
        }
        b.build().unwrap()
    }

    #[test]
    fn color_reduction_is_precise() {
        let a = fg_gf();
        for m_prime in [1, 2] {
            let r = reduce_parity_colors(&a, 2, m_prime).unwrap();
            assert!(r.is_deterministic());
            assert!(r.color_count() <= m_prime);
            let report = check_lasso_precise(&r, &a, 2, 4).unwrap();
            assert!(report.is_precise(), "m' = {m_prime}: {report:?}");
        }
        assert!(reduce_parity_colors(&a, 2, 2).unwrap().is_buchi());
        assert!(reduce_parity_colors(&a, 2, 1).unwrap().is_safety());
    }

    #[test]
    fn color_reduction_contracts() {
        let a = fg_gf();
        assert!(matches!(
            reduce_parity_colors(&a, 2, 0),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            reduce_parity_colors(&a, 2, 4),
            Err(Error::Contract(_))
        ));
        let single = gf1().with_colors(vec![0, 0]).unwrap();
        assert!(drop_one_color(&single, 2).is_err());
    }

    #[test]
    fn drop_matches_buechi_to_safety() {
        let a = gf1();
        let d = drop_one_color(&a, 2).unwrap();
        let s = buechi_to_safety(&a, 2).unwrap();
        for w in enumerate_bases(a.alphabet(), 2).unwrap() {
            assert_eq!(
                d.accepts_lasso(&w).unwrap(),
                s.accepts_lasso(&w).unwrap(),
                "{w:?}"
            );
        }
    }

    #[test]
    fn overapproximation_sandwich() {
        let a = gf1();
        let over = overapproximate(&a, 2, UnderMode::Safety).unwrap();
        let under = buechi_to_safety(&a, 2).unwrap();
        for w in enumerate_bases_up_to(a.alphabet(), 4).unwrap() {
            let (u, x, o) = (
                under.accepts_lasso(&w).unwrap(),
                a.accepts_lasso(&w).unwrap(),
                over.accepts_lasso(&w).unwrap(),
            );
            assert!(!u || x, "{w:?}");
            assert!(!x || o, "{w:?}");
            if w.len() == 2 {
                assert_eq!(x, o);
            }
        }
    }
}
