use omega_approx::constructions::{
    buechi_safety_bound, build_safety_lasso_precise, color_reduction_bound, overapproximate,
    safety_state_bound, underapproximate, UnderMode,
};
use omega_approx::families::{phi_n_oracle, FamilySpec, Fixture};
use omega_approx::lasso::{check_lasso_precise_with, FnOracle, MembershipOracle, PrecisionReport};
use omega_approx::ltl::{ltl_oracle, parse_ltl_auto, ApLetterMap, LtlFormula};
use omega_approx::par::Exec;
use omega_approx::synth::{
    emit_qdimacs, encode, synthesize, Backend, BruteForce, LazySynthesis, SynthesisQuery, Target,
};
use omega_approx::{Alphabet, Lasso, ParityAutomaton};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::io::{formula_for, formula_text, read_automaton, write_atomic, write_automaton};
use crate::{
    ApproximateArgs, BackendArg, CheckArgs, Cli, CliError, Command, ComplementArgs, Direction,
    FamilyArgs, InfoArgs, SynthesizeArgs, SOLVER_ENV,
};

pub fn run(cli: Cli) -> Result<u8, CliError> {
    if cli.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    if cli.jobs > 1 {
        // a second call fails harmlessly when the pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global();
    }
    let exec = Exec::from_jobs(cli.jobs);
    match cli.command {
        Command::Approximate(a) => approximate(a),
        Command::Check(a) => check(a, exec),
        Command::Synthesize(a) => synthesize_cmd(a, exec),
        Command::Family(a) => family(a),
        Command::Info(a) => info(a),
        Command::Complement(a) => complement(a),
    }
}

fn positive(name: &str, v: usize) -> Result<usize, CliError> {
    if v == 0 {
        Err(CliError::Usage(format!("--{name} must be at least 1")))
    } else {
        Ok(v)
    }
}

fn parse_target(text: &str) -> Result<UnderMode, CliError> {
    match text.split_once(':') {
        None if text == "safety" => Ok(UnderMode::Safety),
        Some(("parity", m)) => match m.parse::<usize>() {
            Ok(m) if m > 0 => Ok(UnderMode::Colors(m)),
            _ => Err(CliError::Usage(format!(
                "bad color count in target {text:?}"
            ))),
        },
        _ => Err(CliError::Usage(format!(
            "target must be `safety` or `parity:<m>`, got {text:?}"
        ))),
    }
}

fn write_dot(path: &Option<std::path::PathBuf>, a: &ParityAutomaton) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, &a.to_dot()),
        None => Ok(()),
    }
}

fn meta(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn restricted_map(map: ApLetterMap, alphabet: &Option<String>) -> Result<ApLetterMap, CliError> {
    match alphabet {
        None => Ok(map),
        Some(list) => {
            let letters: Vec<String> = list
                .split(';')
                .map(|l| l.trim().to_string())
                .filter(|l| !l.is_empty())
                .collect();
            if letters.is_empty() {
                return Err(CliError::Usage("--alphabet lists no letters".into()));
            }
            Ok(map.restrict(&letters)?)
        }
    }
}

fn approximate(args: ApproximateArgs) -> Result<u8, CliError> {
    let n = positive("bound", args.bound)?;
    let mode = parse_target(&args.target)?;
    let text = formula_text(&args.formula.ltl, &args.formula.ltl_file)?;
    let (result, bound, source) = match (text, &args.input) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give either an LTL formula or --in, not both".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Usage(
                "approximate needs --ltl, --ltl-file or --in".into(),
            ))
        }
        (Some(text), None) => {
            if mode != UnderMode::Safety {
                return Err(CliError::Usage(
                    "LTL input only supports --target safety".into(),
                ));
            }
            let (f, map) = parse_ltl_auto(&text)?;
            let map = restricted_map(map, &args.alphabet)?;
            let sigma = map.alphabet().len();
            let a = match args.direction {
                Direction::Under => build_safety_lasso_precise(&ltl_oracle(f, map)?, n)?,
                Direction::Over => {
                    let neg = build_safety_lasso_precise(&ltl_oracle(LtlFormula::not(f), map)?, n)?;
                    neg.complete_with_sink().complement_dpa()?
                }
            };
            (a, Some(safety_state_bound(sigma, n)), text)
        }
        (None, Some(path)) => {
            if args.alphabet.is_some() {
                return Err(CliError::Usage(
                    "--alphabet only applies to LTL input".into(),
                ));
            }
            let a = read_automaton(path)?;
            if !a.is_deterministic() && mode != UnderMode::Safety {
                return Err(CliError::Core(omega_approx::Error::Contract(
                    "color reduction needs a deterministic automaton".into(),
                )));
            }
            let out = match args.direction {
                Direction::Under => underapproximate(&a, n, mode)?,
                Direction::Over => overapproximate(&a, n, mode)?,
            };
            let bound = match (args.direction, mode) {
                (Direction::Under, UnderMode::Safety) if a.is_buchi() || a.is_safety() => {
                    Some(buechi_safety_bound(&a, n))
                }
                (Direction::Under, UnderMode::Safety) => Some(color_reduction_bound(&a, n, 1)),
                (Direction::Under, UnderMode::Colors(m)) => Some(color_reduction_bound(&a, n, m)),
                (Direction::Over, _) => None,
            };
            (out, bound, path.display().to_string())
        }
    };
    let info = meta(&[
        ("source", source),
        ("bound", n.to_string()),
        ("direction", format!("{:?}", args.direction).to_lowercase()),
        ("target", args.target.clone()),
    ]);
    write_automaton(&args.out, &result, "approximation", &info)?;
    write_dot(&args.dot, &result)?;
    match bound {
        Some(b) => println!("states: {} (bound {b})", result.num_states()),
        None => println!("states: {}", result.num_states()),
    }
    println!("colors: {}", result.color_count());
    println!("kind: {}", kind(&result));
    Ok(0)
}

fn kind(a: &ParityAutomaton) -> &'static str {
    if a.is_safety() {
        "safety"
    } else if a.is_buchi() {
        "buchi"
    } else {
        "parity"
    }
}

/// Adds random lassos longer than the inclusion bound to the inclusion check.
fn random_inclusion(
    report: &mut PrecisionReport,
    a: &ParityAutomaton,
    phi: &dyn MembershipOracle,
    count: usize,
    seed: u64,
) -> Result<(), CliError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let sigma = a.alphabet().len();
    let lo = report.inclusion_bound + 1;
    for _ in 0..count {
        let len = rng.gen_range(lo..=2 * lo);
        let split = rng.gen_range(0..len);
        let base: Vec<usize> = (0..len).map(|_| rng.gen_range(0..sigma)).collect();
        let w = Lasso::from_base(&base, split)?;
        if a.accepts_lasso(&w)? && !phi.contains(&w) {
            report.inclusion_violations.push(w);
        }
    }
    Ok(())
}

fn check(args: CheckArgs, exec: Exec) -> Result<u8, CliError> {
    let n = positive("bound", args.bound)?;
    let a = read_automaton(&args.input)?;
    let inclusion_bound = args.inclusion_bound.unwrap_or(n);
    if inclusion_bound < n {
        return Err(CliError::Usage(
            "--inclusion-bound must be at least --bound".into(),
        ));
    }
    let text = formula_text(&args.formula.ltl, &args.formula.ltl_file)?;
    let oracle: Box<dyn MembershipOracle> = match (text, &args.reference) {
        (Some(text), None) => {
            let (f, map) = formula_for(&text, &a)?;
            Box::new(ltl_oracle(f, map)?)
        }
        (None, Some(path)) => {
            let r = read_automaton(path)?;
            if r.alphabet() != a.alphabet() {
                return Err(CliError::Usage(
                    "the two automata use different alphabets".into(),
                ));
            }
            Box::new(r)
        }
        _ => {
            return Err(CliError::Usage(
                "check needs exactly one of --ltl, --ltl-file and --ref".into(),
            ))
        }
    };
    // an overapproximation of φ is an underapproximation of ¬φ once complemented
    let (a, oracle): (ParityAutomaton, Box<dyn MembershipOracle>) = match args.direction {
        Direction::Under => (a, oracle),
        Direction::Over => {
            let c = a.complete_with_sink().complement_dpa()?;
            let alphabet = a.alphabet().clone();
            let negated = FnOracle::new(alphabet, move |w: &Lasso| !oracle.contains(w));
            (c, Box::new(negated))
        }
    };
    let mut report = check_lasso_precise_with(exec, &a, oracle.as_ref(), n, inclusion_bound)?;
    if let (Some(path), Direction::Under) = (&args.reference, args.direction) {
        let r = read_automaton(path)?;
        if a.is_safety() && r.is_deterministic() {
            report.exact_inclusion = Some(ParityAutomaton::check_inclusion_exact(&a, &r)?.holds);
        }
    }
    random_inclusion(&mut report, &a, oracle.as_ref(), args.random, args.seed)?;
    print!("{}", report.to_text(a.alphabet()));
    if let Some(path) = &args.report {
        let json =
            serde_json::to_string_pretty(&report.to_json(a.alphabet())).expect("report serializes");
        write_atomic(path, &(json + "\n"))?;
    }
    Ok(if report.is_precise() { 0 } else { 1 })
}

fn synthesize_cmd(args: SynthesizeArgs, exec: Exec) -> Result<u8, CliError> {
    let n = positive("bound", args.bound)?;
    let m = positive("colors", args.colors)?;
    let text = formula_text(&args.formula.ltl, &args.formula.ltl_file)?
        .ok_or_else(|| CliError::Usage("synthesize needs --ltl or --ltl-file".into()))?;
    let (formula, map) = parse_ltl_auto(&text)?;
    let target = if args.nondeterministic {
        Target::Nondeterministic
    } else {
        Target::Deterministic
    };
    let (lo, hi) = if args.minimal {
        let k = args
            .max_states
            .or(args.states)
            .ok_or_else(|| CliError::Usage("--minimal needs --max-states".into()))?;
        (1, positive("max-states", k)?)
    } else if args.max_states.is_some() {
        return Err(CliError::Usage("--max-states needs --minimal".into()));
    } else {
        let k = args
            .states
            .ok_or_else(|| CliError::Usage("give --states or --minimal --max-states".into()))?;
        (positive("states", k)?, k)
    };
    // a configured solver command makes the external backend the default
    let choice = args.backend.unwrap_or(if args.solver.is_some() {
        BackendArg::External
    } else {
        BackendArg::Expansion
    });
    let backend = match choice {
        BackendArg::Expansion => Chosen::Core(Backend::Expansion { limit: args.limit }),
        BackendArg::External => Chosen::Core(Backend::External {
            command: args.solver.clone().ok_or_else(|| {
                CliError::Usage(format!(
                    "the external backend needs --solver or {SOLVER_ENV}"
                ))
            })?,
        }),
        BackendArg::Brute => Chosen::Brute,
        BackendArg::Lazy => Chosen::Lazy,
    };
    if matches!(backend, Chosen::Lazy) && target == Target::Nondeterministic {
        return Err(CliError::Usage(
            "the lazy backend only searches deterministic automata".into(),
        ));
    }
    let oracle = ltl_oracle(formula.clone(), map.clone())?;
    if let Some(path) = &args.emit_qbf {
        let q = SynthesisQuery {
            formula: formula.clone(),
            map: map.clone(),
            n,
            k: hi,
            m,
            target,
        };
        write_atomic(path, &emit_qdimacs(&encode(&q)?))?;
    }
    let mut found = None;
    for k in lo..=hi {
        let q = SynthesisQuery {
            formula: formula.clone(),
            map: map.clone(),
            n,
            k,
            m,
            target,
        };
        let a = match &backend {
            Chosen::Core(b) => synthesize(&q, b)?,
            Chosen::Brute => {
                let mut search = BruteForce::new(n, k, m, target);
                search.ceiling = u64::MAX;
                search.exec = exec;
                search.run(&oracle)?
            }
            Chosen::Lazy => LazySynthesis::new(n, k, m).run(&oracle)?,
        };
        if let Some(a) = a {
            found = Some((k, a));
            break;
        }
    }
    let Some((k, a)) = found else {
        println!("verdict: UNSAT");
        if let Some(path) = &args.result {
            let json = serde_json::json!({ "verdict": "unsat", "formula": text, "n": n, "m": m, "max_states": hi });
            write_atomic(path, &(json.to_string() + "\n"))?;
        }
        return Ok(1);
    };
    let report = check_lasso_precise_with(exec, &a, &oracle, n, n * k)?;
    if !report.is_precise() {
        return Err(CliError::Core(omega_approx::Error::Solver(
            "the synthesized automaton failed re-verification".into(),
        )));
    }
    println!("verdict: SAT");
    println!("states: {k}");
    if let Some(path) = &args.out {
        let info = meta(&[
            ("formula", text.clone()),
            ("bound", n.to_string()),
            ("inclusion-bound", (n * k).to_string()),
        ]);
        write_automaton(path, &a, "synthesized", &info)?;
    }
    write_dot(&args.dot, &a)?;
    if let Some(path) = &args.result {
        let json = serde_json::json!({
            "verdict": "sat",
            "formula": text,
            "n": n,
            "m": m,
            "k": k,
            "automaton": args.out.as_ref().map(|p| p.display().to_string()),
        });
        write_atomic(path, &(json.to_string() + "\n"))?;
    }
    Ok(0)
}

enum Chosen {
    Core(Backend),
    Brute,
    Lazy,
}

fn family(args: FamilyArgs) -> Result<u8, CliError> {
    // `--sigma` is a single-digit size or the letters themselves
    let letters: Option<Vec<String>> = args
        .sigma
        .as_ref()
        .filter(|s| s.chars().count() > 1 || s.parse::<usize>().is_err())
        .map(|s| s.chars().map(String::from).collect());
    let sigma = match (&args.sigma, &letters) {
        (_, Some(l)) => Some(l.len()),
        (Some(s), None) => s.parse().ok(),
        (None, None) => None,
    };
    let param = match args.name.as_str() {
        "omega-k" | "omega_k" | "omega" => args.k,
        "intro" => args.index,
        _ => args.n.or(args.k),
    };
    let name = if args.name == "omega" {
        "omega-k"
    } else {
        args.name.as_str()
    };
    let spec =
        FamilySpec::from_name(name, param, sigma).map_err(|e| CliError::Usage(e.to_string()))?;
    let fixture = match (&spec, letters) {
        (FamilySpec::PhiN { n, .. }, Some(letters)) => {
            let oracle = phi_n_oracle(Alphabet::new(letters)?, *n)?;
            Fixture::Automaton(build_safety_lasso_precise(&oracle, *n)?)
        }
        _ => spec.build()?,
    };
    match fixture {
        Fixture::Automaton(a) => {
            let info = meta(&[
                ("family", spec.to_string()),
                ("note", spec.note().to_string()),
            ]);
            write_automaton(&args.out, &a, &spec.to_string(), &info)?;
            println!("states: {}", a.num_states());
        }
        Fixture::Formula(f, map) => {
            write_atomic(&args.out, &format!("{f}\n"))?;
            println!("propositions: {}", map.aps().join(" "));
        }
    }
    Ok(0)
}

fn info(args: InfoArgs) -> Result<u8, CliError> {
    let a = read_automaton(&args.input)?;
    let empty = a.is_empty();
    let witness = empty.witness().map(|w| w.display(a.alphabet()).to_string());
    let facts = serde_json::json!({
        "states": a.num_states(),
        "transitions": a.num_transitions(),
        "letters": a.alphabet().len(),
        "colors": a.color_count(),
        "max_color": a.max_color(),
        "kind": kind(&a),
        "deterministic": a.is_deterministic(),
        "complete": a.is_complete(),
        "empty": empty.is_empty(),
        "witness": witness,
    });
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&facts).expect("facts serialize")
        );
    } else if let Some(obj) = facts.as_object() {
        for (k, v) in obj {
            match v {
                serde_json::Value::String(s) => println!("{k}: {s}"),
                serde_json::Value::Null => {}
                other => println!("{k}: {other}"),
            }
        }
    }
    Ok(0)
}

fn complement(args: ComplementArgs) -> Result<u8, CliError> {
    let a = read_automaton(&args.input)?;
    let c = a.complete_with_sink().complement_dpa()?;
    let info = meta(&[("source", args.input.display().to_string())]);
    write_automaton(&args.out, &c, "complement", &info)?;
    write_dot(&args.dot, &c)?;
    println!("states: {}", c.num_states());
    Ok(0)
}
