use omega_approx::error::Error;
use omega_approx::lasso::check_lasso_precise;
use omega_approx::ltl::{ltl_oracle, parse_ltl_auto};
use omega_approx::synth::{
    decode, encode, model_satisfies, solve_by_expansion_refined, synthesize, synthesize_minimal,
    Backend, LazySynthesis, QbfProblem, SynthesisQuery, Target, VarRole, Verdict,
};

const CORPUS: [&str; 5] = ["G p", "F p", "G F p", "F G p", "p U X p"];

fn query(text: &str, n: usize, k: usize, m: usize) -> SynthesisQuery {
    let (formula, map) = parse_ltl_auto(text).unwrap();
    SynthesisQuery {
        formula,
        map,
        n,
        k,
        m,
        target: Target::Deterministic,
    }
}

fn disagreements(corpus: &[&str], n_max: usize) -> Vec<String> {
    let mut disagreements = Vec::new();
    for &text in corpus {
        for n in 1..=n_max {
            for k in 1..=2 {
                for m in 1..=2 {
                    let q = query(text, n, k, m);
                    let qbf = synthesize(&q, &Backend::default()).unwrap().is_some();
                    let brute = synthesize(&q, &Backend::BruteForce { ceiling: u64::MAX })
                        .unwrap()
                        .is_some();
                    if qbf != brute {
                        disagreements
                            .push(format!("{text} n={n} k={k} m={m}: qbf={qbf} brute={brute}"));
                    }
                }
            }
        }
    }
    disagreements
}

#[test]
fn expansion_agrees_with_enumeration() {
    let d = disagreements(&CORPUS, 3);
    assert!(d.is_empty(), "{d:#?}");
}

#[test]
fn expansion_agrees_with_enumeration_on_two_propositions() {
    let d = disagreements(&["p U q", "G (p -> X q)", "G F p & G F q"], 2);
    assert!(d.is_empty(), "{d:#?}");
}

fn precise_model(q: &SynthesisQuery) -> Option<(QbfProblem, Vec<bool>)> {
    let oracle = ltl_oracle(q.formula.clone(), q.map.clone()).unwrap();
    let p = encode(q).unwrap();
    let verdict = solve_by_expansion_refined(&p, u64::MAX, &mut |m| {
        let a = decode(&p, m).unwrap();
        check_lasso_precise(&a, &oracle, q.n, q.n * q.k)
            .unwrap()
            .is_precise()
    })
    .unwrap();
    match verdict {
        Verdict::Sat(Some(model)) => Some((p, model)),
        _ => None,
    }
}

#[test]
fn globally_p_decodes_to_a_self_loop() {
    let q = query("G p", 1, 1, 1);
    let (p, model) = precise_model(&q).unwrap();
    let a = decode(&p, &model).unwrap();
    let on_p = q.map.letter_of_mask(1).unwrap();
    let off_p = q.map.letter_of_mask(0).unwrap();
    assert_eq!(a.num_states(), 1);
    assert_eq!(a.successors(0, on_p), &[0]);
    assert!(a.successors(0, off_p).is_empty());
    assert!(a.is_safety());
}

#[test]
fn all_false_model_decodes_to_an_empty_automaton() {
    let q = query("G p", 1, 2, 1);
    let p = encode(&q).unwrap();
    let mut model = vec![false; p.num_vars()];
    for s in 0..2 {
        model[p.color_var(s, 0) as usize] = true;
    }
    let a = decode(&p, &model).unwrap();
    assert!((0..2).all(|s| (0..2).all(|l| a.successors(s, l).is_empty())));
    let mut two_colors = model.clone();
    let q2 = query("G p", 1, 1, 2);
    let p2 = encode(&q2).unwrap();
    two_colors.resize(p2.num_vars(), false);
    two_colors[p2.color_var(0, 0) as usize] = true;
    two_colors[p2.color_var(0, 1) as usize] = true;
    assert!(matches!(decode(&p2, &two_colors), Err(Error::Decode(_))));
}

#[test]
fn precise_mutants_satisfy_the_matrix() {
    for text in CORPUS {
        for n in 1..=2 {
            for k in 1..=2 {
                let q = query(text, n, k, 2);
                let oracle = ltl_oracle(q.formula.clone(), q.map.clone()).unwrap();
                let Some((p, model)) = precise_model(&q) else {
                    continue;
                };
                assert!(model_satisfies(&p, &model, u64::MAX).unwrap());
                for v in p.existentials() {
                    if !matches!(p.roles[v as usize], VarRole::Delta { .. }) {
                        continue;
                    }
                    let mut m = model.clone();
                    m[v as usize] = !m[v as usize];
                    let Ok(a) = decode(&p, &m) else { continue };
                    let precise = check_lasso_precise(&a, &oracle, n, n * k)
                        .unwrap()
                        .is_precise();
                    assert!(
                        !precise || model_satisfies(&p, &m, u64::MAX).unwrap(),
                        "{text} n={n} k={k} flip {v}"
                    );
                }
            }
        }
    }
}

#[test]
fn satisfiability_is_monotone_in_the_state_budget() {
    for text in CORPUS {
        for n in 1..=3 {
            for m in 1..=2 {
                let small = synthesize(&query(text, n, 1, m), &Backend::default()).unwrap();
                let large = synthesize(&query(text, n, 2, m), &Backend::default()).unwrap();
                assert!(small.is_none() || large.is_some(), "{text} n={n} m={m}");
            }
        }
    }
}

#[test]
fn verbatim_encoding_misses_longer_run_lassos() {
    // accepting runs of size exactly k do not witness every accepted word
    let q = query("p U q", 2, 2, 2);
    let oracle = ltl_oracle(q.formula.clone(), q.map.clone()).unwrap();
    let p = encode(&q).unwrap();
    let mut unsound = 0;
    let verdict = solve_by_expansion_refined(&p, u64::MAX, &mut |m| {
        let a = decode(&p, m).unwrap();
        if !check_lasso_precise(&a, &oracle, 2, 4).unwrap().is_precise() {
            unsound += 1;
        }
        unsound == 0 || unsound > 100
    })
    .unwrap();
    assert!(
        unsound > 0,
        "expected a certificate that fails re-verification"
    );
    let refined = synthesize(&q, &Backend::default()).unwrap();
    let brute = synthesize(&q, &Backend::BruteForce { ceiling: u64::MAX }).unwrap();
    assert_eq!(refined.is_some(), brute.is_some());
    drop(verdict);
}

#[test]
fn minimal_synthesis() {
    let (f, map) = parse_ltl_auto("G p").unwrap();
    let (k, a) = synthesize_minimal(
        &f,
        &map,
        1,
        1,
        3,
        Target::Deterministic,
        &Backend::default(),
    )
    .unwrap()
    .unwrap();
    assert_eq!((k, a.num_states()), (1, 1));

    let (f, map) = parse_ltl_auto("(F G p) & (G F q)").unwrap();
    let (k, a) = synthesize_minimal(
        &f,
        &map,
        2,
        1,
        3,
        Target::Deterministic,
        &Backend::default(),
    )
    .unwrap()
    .expect("a safety underapproximation with at most 3 states");
    assert!(k <= 3 && a.is_safety());
    let oracle = ltl_oracle(f, map).unwrap();
    assert!(check_lasso_precise(&a, &oracle, 2, 2 * k)
        .unwrap()
        .is_precise());
}

#[test]
fn lazy_and_expansion_agree() {
    for text in CORPUS {
        for n in 1..=2 {
            for k in 1..=2 {
                for m in 1..=2 {
                    let q = query(text, n, k, m);
                    let oracle = ltl_oracle(q.formula.clone(), q.map.clone()).unwrap();
                    let lazy = LazySynthesis::new(n, k, m).run(&oracle).unwrap().is_some();
                    let qbf = synthesize(&q, &Backend::default()).unwrap().is_some();
                    assert_eq!(lazy, qbf, "{text} n={n} k={k} m={m}");
                }
            }
        }
    }
}
