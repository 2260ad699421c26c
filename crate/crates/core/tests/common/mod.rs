//! Strategies and a seeded runner shared by the property and acceptance targets.
#![allow(dead_code)]

use omega_approx::ltl::{ApLetterMap, LtlFormula};
use omega_approx::{Alphabet, Lasso, ParityAutomaton};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// Runs `test` on `cases` values drawn from `strategy` with a fixed seed.
/// Returns the first failing input, rendered with `Debug`.
pub fn check<S, F>(seed: u64, cases: u32, strategy: S, test: F) -> Result<(), String>
where
    S: Strategy,
    S::Value: std::fmt::Debug,
    F: Fn(&S::Value) -> Result<(), String>,
{
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::from_seed(RngAlgorithm::ChaCha, &bytes),
    );
    for _ in 0..cases {
        let value = strategy
            .new_tree(&mut runner)
            .map_err(|e| format!("strategy failed: {e}"))?
            .current();
        test(&value).map_err(|e| format!("{e} on {value:?}"))?;
    }
    Ok(())
}

pub fn lasso(sigma: usize, max_stem: usize, max_period: usize) -> impl Strategy<Value = Lasso> {
    (
        prop::collection::vec(0..sigma, 0..=max_stem),
        prop::collection::vec(0..sigma, 1..=max_period),
    )
        .prop_map(|(s, p)| Lasso::new(s, p).unwrap())
}

/// A random automaton with up to `max_states` states over `sigma` letters.
/// `deterministic` makes it complete and deterministic.
pub fn automaton(
    sigma: usize,
    max_states: usize,
    max_color: u32,
    deterministic: bool,
) -> impl Strategy<Value = ParityAutomaton> {
    (1..=max_states).prop_flat_map(move |k| {
        let row = if deterministic {
            prop::collection::vec(prop::collection::vec(0..k, 1..=1), sigma).boxed()
        } else {
            prop::collection::vec(prop::collection::vec(0..k, 0..=2), sigma).boxed()
        };
        (
            prop::collection::vec(row, k),
            prop::collection::vec(0..=max_color, k),
        )
            .prop_map(move |(delta, colors)| {
                let names = (0..k).map(|q| format!("q{q}")).collect();
                ParityAutomaton::new(Alphabet::numeric(sigma), names, vec![0], delta, colors)
                    .unwrap()
            })
    })
}

pub fn two_props() -> ApLetterMap {
    ApLetterMap::new(vec!["p".into(), "q".into()]).unwrap()
}

/// LTL over `p` and `q` with every operator.
pub fn formula() -> impl Strategy<Value = LtlFormula> {
    let leaf = prop_oneof![
        Just(LtlFormula::True),
        Just(LtlFormula::False),
        Just(LtlFormula::atom("p")),
        Just(LtlFormula::atom("q")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(LtlFormula::not),
            inner.clone().prop_map(LtlFormula::next),
            inner.clone().prop_map(LtlFormula::finally),
            inner.clone().prop_map(LtlFormula::globally),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LtlFormula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LtlFormula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LtlFormula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LtlFormula::until(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| LtlFormula::release(a, b)),
        ]
    })
}

/// The same word as `w`: the stem grows by `shift` letters, then the
/// period is repeated `reps` times.
pub fn re_represent(w: &Lasso, shift: usize, reps: usize) -> Lasso {
    let u = w.unroll(w.len() + shift).unwrap();
    let period = u.period().repeat(reps);
    Lasso::new(u.stem().to_vec(), period).unwrap()
}

pub fn acceptance_is_representation_invariant(seed: u64, cases: u32) -> Result<(), String> {
    let s = (
        automaton(2, 4, 3, false),
        lasso(2, 4, 4),
        0..5usize,
        1..4usize,
    );
    check(seed, cases, s, |(a, w, shift, reps)| {
        let x = re_represent(w, *shift, *reps);
        let (l, r) = (a.accepts_lasso(w).unwrap(), a.accepts_lasso(&x).unwrap());
        if l == r {
            Ok(())
        } else {
            Err(format!("{w:?} gives {l}, {x:?} gives {r}"))
        }
    })
}

pub fn ltl_is_representation_invariant(seed: u64, cases: u32) -> Result<(), String> {
    let map = two_props();
    let s = (formula(), lasso(4, 4, 4), 0..5usize, 1..4usize);
    check(seed, cases, s, |(f, w, shift, reps)| {
        let x = re_represent(w, *shift, *reps);
        let (l, r) = (
            f.eval_on_lasso(w, &map).unwrap(),
            f.eval_on_lasso(&x, &map).unwrap(),
        );
        if l == r {
            Ok(())
        } else {
            Err(format!("{w:?} gives {l}, {x:?} gives {r}"))
        }
    })
}

pub fn complement_is_an_involution(seed: u64, cases: u32) -> Result<(), String> {
    let s = (automaton(2, 5, 4, true), lasso(2, 5, 5));
    check(seed, cases, s, |(a, w)| {
        let c = a.complement_dpa().unwrap();
        let cc = c.complement_dpa().unwrap();
        let (x, y, z) = (
            a.accepts_lasso(w).unwrap(),
            c.accepts_lasso(w).unwrap(),
            cc.accepts_lasso(w).unwrap(),
        );
        if x != y && x == z {
            Ok(())
        } else {
            Err(format!("A={x} co-A={y} co-co-A={z}"))
        }
    })
}

/// An accepted lasso of length `n` re-represented at length `n' ≥ n` is
/// again accepted, so `L_n ⊆ L_n'` as sets of words.
pub fn n_models_are_monotone(seed: u64, cases: u32) -> Result<(), String> {
    let s = (automaton(2, 4, 3, false), lasso(2, 3, 3), 0..4usize);
    check(seed, cases, s, |(a, w, extra)| {
        if !a.accepts_lasso(w).unwrap() {
            return Ok(());
        }
        let longer = w.unroll(w.len() + extra).unwrap();
        if longer.len() == w.len() + extra
            && longer.same_word(w)
            && a.accepts_lasso(&longer).unwrap()
        {
            Ok(())
        } else {
            Err(format!("{longer:?} lost"))
        }
    })
}

pub fn ltl_dualities(seed: u64, cases: u32) -> Result<(), String> {
    use LtlFormula as F;
    let map = two_props();
    let s = (formula(), formula(), lasso(4, 3, 3));
    check(seed, cases, s, |(a, b, w)| {
        let ev = |f: &F| f.eval_on_lasso(w, &map).unwrap();
        let pairs = [
            (
                F::not(F::and(a.clone(), b.clone())),
                F::or(F::not(a.clone()), F::not(b.clone())),
            ),
            (
                F::not(F::until(a.clone(), b.clone())),
                F::release(F::not(a.clone()), F::not(b.clone())),
            ),
            (F::finally(a.clone()), F::until(F::True, a.clone())),
            (
                F::globally(a.clone()),
                F::not(F::finally(F::not(a.clone()))),
            ),
            (F::not(F::next(a.clone())), F::next(F::not(a.clone()))),
        ];
        match pairs.iter().position(|(l, r)| ev(l) != ev(r)) {
            None => Ok(()),
            Some(i) => Err(format!("identity {i} fails")),
        }
    })
}
