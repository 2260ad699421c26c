//! Internal decision procedure: expand the universal block, then SAT.
//!
//! Only the assignments that can falsify the matrix are visited. Letters
//! range over real letters, the word loop lies inside the prefix a part
//! reads, run states are one-hot and start in state 0. Every other
//! assignment makes the part's premise false.

use varisat::{ExtendFormula, Lit, Solver};

use crate::error::{Error, Result};

use super::circuit::{Circuit, NodeId};
use super::encode::QbfProblem;
use super::qdimacs::{Cnf, Tseitin};

/// Outcome of a 2-QBF decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Satisfiable. The model assigns every problem variable when known.
    Sat(Option<Vec<bool>>),
    Unsat,
}

/// Number of universal assignments the expansion visits.
pub fn expansion_size(p: &QbfProblem) -> Option<u128> {
    let q = &p.query;
    let sigma = q.map.alphabet().len() as u128;
    let (n, k) = (q.n as u32, q.k as u128);
    let r = p.run_len() as u128;
    let sub = sigma
        .checked_pow(q.k as u32)?
        .checked_mul(k)?
        .checked_mul(k.checked_pow(q.k as u32 - 1)?)?;
    let eq = sigma
        .checked_pow(n)?
        .checked_mul(n as u128)?
        .checked_mul(r)?
        .checked_mul(k.checked_pow(p.run_len() as u32 - 1)?)?;
    sub.checked_add(eq)
}

/// Mixed-radix counter over `digits` with the given radices.
fn next(digits: &mut [usize], radix: &[usize]) -> bool {
    for (d, &r) in digits.iter_mut().zip(radix) {
        *d += 1;
        if *d < r {
            return true;
        }
        *d = 0;
    }
    false
}

struct Part {
    root: NodeId,
    cone: Vec<NodeId>,
    word: usize,
    loops: usize,
    run_loops: usize,
    rows: usize,
    tied: bool,
}

/// Decides the problem. Fails with a resource error when more than `limit`
/// universal assignments would have to be expanded.
pub fn solve_by_expansion(p: &QbfProblem, limit: u64) -> Result<Verdict> {
    solve_by_expansion_refined(p, limit, &mut |_| true)
}

/// Like [`solve_by_expansion`], but a model rejected by `accept` is blocked
/// on its automaton variables and the SAT search resumes. Returns the first
/// accepted model, or UNSAT once every candidate is blocked.
pub fn solve_by_expansion_refined(
    p: &QbfProblem,
    limit: u64,
    accept: &mut dyn FnMut(&[bool]) -> bool,
) -> Result<Verdict> {
    let Some(cnf) = expand(p, limit, None)? else {
        return Ok(Verdict::Unsat);
    };
    let mut solver = Solver::new();
    // make sure every variable exists in the solver
    let top = cnf.num_vars.max(1) as isize;
    solver.add_clause(&[Lit::from_dimacs(top), Lit::from_dimacs(-top)]);
    for c in &cnf.clauses {
        let lits: Vec<Lit> = c.iter().map(|&l| Lit::from_dimacs(l as isize)).collect();
        solver.add_clause(&lits);
    }
    let existentials = p.existentials();
    loop {
        let sat = solver.solve().map_err(|e| Error::Solver(e.to_string()))?;
        if !sat {
            return Ok(Verdict::Unsat);
        }
        let model = solver
            .model()
            .ok_or_else(|| Error::Solver("solver returned no model".into()))?;
        let mut assignment = vec![false; p.num_vars()];
        for lit in model {
            let i = lit.var().index();
            if i < assignment.len() {
                assignment[i] = lit.is_positive();
            }
        }
        if accept(&assignment) {
            return Ok(Verdict::Sat(Some(assignment)));
        }
        let block: Vec<Lit> = existentials
            .iter()
            .map(|&v| {
                let l = Lit::from_dimacs(v as isize + 1);
                if assignment[v as usize] {
                    !l
                } else {
                    l
                }
            })
            .collect();
        solver.add_clause(&block);
    }
}

/// Whether a full assignment of the automaton variables satisfies the
/// matrix for every universal assignment.
pub fn model_satisfies(p: &QbfProblem, model: &[bool], limit: u64) -> Result<bool> {
    if model.len() < p.num_vars() {
        return Err(Error::Input(
            "model does not cover every problem variable".into(),
        ));
    }
    let (_, root) = residual(p, limit, Some(model))?;
    Ok(root == Circuit::TRUE)
}

/// Instantiates the universal block and clausifies the result. `None` means
/// some instance simplified to false.
fn expand(p: &QbfProblem, limit: u64, fixed: Option<&[bool]>) -> Result<Option<Cnf>> {
    let (circuit, root) = residual(p, limit, fixed)?;
    if root == Circuit::FALSE {
        return Ok(None);
    }
    let mut ts = Tseitin::new(p.num_vars() as u32);
    ts.assert(&circuit, root);
    Ok(Some(ts.cnf))
}

/// Conjunction of all instances of the matrix over the existential variables
/// not fixed by `fixed`.
fn residual(p: &QbfProblem, limit: u64, fixed: Option<&[bool]>) -> Result<(Circuit, NodeId)> {
    let size = expansion_size(p);
    match size {
        Some(s) if s <= limit as u128 => {}
        _ => {
            return Err(Error::ResourceLimit(format!(
                "expansion needs {} universal assignments, limit is {limit}",
                size.map_or("more than 2^128".to_string(), |s| s.to_string())
            )))
        }
    }
    let q = &p.query;
    let (n, k, sigma) = (q.n, q.k, q.map.alphabet().len());
    let aps = q.map.aps().len();
    let run_len = p.run_len();
    let parts = [
        Part {
            root: p.parts.sub,
            cone: p.circuit.cone(p.parts.sub),
            word: k,
            loops: k,
            run_loops: 1,
            rows: k,
            tied: true,
        },
        Part {
            root: p.parts.eq_n,
            cone: p.circuit.cone(p.parts.eq_n),
            word: n,
            loops: n,
            run_loops: run_len,
            rows: run_len,
            tied: false,
        },
    ];

    let mut residual = Circuit::new();
    let mut scratch = Vec::new();
    let mut roots = Vec::new();
    let mut value: Vec<Option<bool>> = vec![None; p.num_vars()];
    if let Some(model) = fixed {
        for v in p.existentials() {
            value[v as usize] = Some(model[v as usize]);
        }
    }
    for part in &parts {
        // digits: letters, word loop, run loop, run rows 1.. (row 0 is state 0)
        let mut radix = vec![sigma; part.word];
        radix.push(part.loops);
        radix.push(part.run_loops);
        radix.extend(std::iter::repeat_n(k, part.rows - 1));
        let mut digits = vec![0; radix.len()];
        loop {
            for v in p.universals() {
                value[v as usize] = Some(false);
            }
            for j in 0..part.word {
                for ap in 0..aps {
                    value[p.letter_var(ap, j) as usize] = Some(q.map.holds(digits[j], ap));
                }
            }
            let li = digits[part.word];
            value[p.word_loop_var(li) as usize] = Some(true);
            let ri = if part.tied { li } else { digits[part.word + 1] };
            value[p.run_loop_var(ri) as usize] = Some(true);
            value[p.run_state_var(0, 0) as usize] = Some(true);
            for j in 1..part.rows {
                value[p.run_state_var(j, digits[part.word + 1 + j]) as usize] = Some(true);
            }
            let subst = |v: u32| value[v as usize].map(residual_const);
            let r = p.circuit.substitute_into(
                part.root,
                &part.cone,
                &subst,
                &mut residual,
                &mut scratch,
            );
            if r == Circuit::FALSE {
                return Ok((residual, Circuit::FALSE));
            }
            if r != Circuit::TRUE {
                roots.push(r);
            }
            if !next(&mut digits, &radix) {
                break;
            }
        }
    }

    // The automaton constraints only mention existential variables.
    let exist = |v: u32| value[v as usize].map(residual_const);
    let dpa_cone = p.circuit.cone(p.parts.dpa);
    let dpa =
        p.circuit
            .substitute_into(p.parts.dpa, &dpa_cone, &exist, &mut residual, &mut scratch);
    roots.push(dpa);
    roots.sort_unstable();
    roots.dedup();
    let all = residual.and(roots);
    Ok((residual, all))
}

fn residual_const(b: bool) -> NodeId {
    if b {
        Circuit::TRUE
    } else {
        Circuit::FALSE
    }
}
