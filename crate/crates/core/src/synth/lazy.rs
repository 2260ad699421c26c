//! Sample-driven synthesis for queries too large to expand.
//!
//! The SAT problem talks about the automaton variables only. Each sampled
//! lasso contributes "the run on this lasso accepts" or its negation, with
//! the run spelled out as a function of `δ`. A candidate is checked with
//! [`check_lasso_precise`]; the lassos it gets wrong become new samples.
//! UNSAT therefore means that no deterministic automaton of the size exists
//! that is correct on the samples, and hence none that passes the check.

#![allow(clippy::needless_range_loop)]

use std::collections::HashSet;

use varisat::{ExtendFormula, Lit, Solver};

use crate::automaton::{Color, ParityAutomaton};
use crate::error::{Error, Result};
use crate::lasso::{check_lasso_precise, enumerate_bases, MembershipOracle};
use crate::word::Lasso;

use super::circuit::{Circuit, NodeId};
use super::qdimacs::Tseitin;

/// Sample-driven search for a deterministic automaton.
#[derive(Clone, Debug)]
pub struct LazySynthesis {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    /// Inclusion bound handed to the precision check.
    pub inclusion_bound: usize,
    /// Refinement rounds before giving up with a resource error.
    pub max_rounds: usize,
}

impl LazySynthesis {
    pub fn new(n: usize, k: usize, m: usize) -> Self {
        LazySynthesis {
            n,
            k,
            m,
            inclusion_bound: n * k,
            max_rounds: 10_000,
        }
    }

    /// Searches for a deterministic automaton that passes the precision check.
    pub fn run(&self, phi: &dyn MembershipOracle) -> Result<Option<ParityAutomaton>> {
        let LazySynthesis { n, k, m, .. } = *self;
        if n == 0 || k == 0 || m == 0 {
            return Err(Error::Input("n, k and m must all be at least 1".into()));
        }
        let alphabet = phi.alphabet().clone();
        let sigma = alphabet.len();
        let mut enc = Encoder {
            c: Circuit::new(),
            k,
            m,
            sigma,
            delta: Vec::new(),
            color: Vec::new(),
        };
        let num_vars = (k * sigma * k + k * m) as u32;
        enc.delta = (0..(k * sigma * k) as u32).map(|v| enc.c.var(v)).collect();
        enc.color = (0..(k * m) as u32)
            .map(|v| enc.c.var(num_vars - (k * m) as u32 + v))
            .collect();

        let mut shape = Vec::new();
        for q in 0..k {
            for a in 0..sigma {
                let succ: Vec<NodeId> = (0..k).map(|t| enc.d(q, a, t)).collect();
                shape.push(enc.c.at_most_one(&succ));
            }
            let cs: Vec<NodeId> = enc.color[q * m..(q + 1) * m].to_vec();
            shape.push(enc.c.exactly_one(&cs));
        }
        let shape = enc.c.and(shape);

        let mut ts = Tseitin::new(num_vars);
        let mut solver = Solver::new();
        let mut sent = 0;
        let mut flush = |ts: &mut Tseitin, solver: &mut Solver| {
            for c in &ts.cnf.clauses[sent..] {
                let lits: Vec<Lit> = c.iter().map(|&l| Lit::from_dimacs(l as isize)).collect();
                solver.add_clause(&lits);
            }
            sent = ts.cnf.clauses.len();
        };
        ts.assert(&enc.c, shape);

        // seed with every lasso of base length n
        let mut seen: HashSet<Lasso> = HashSet::new();
        let mut seeds = Vec::new();
        for w in enumerate_bases(&alphabet, n)? {
            let want = phi.contains(&w);
            seeds.push((w, want));
        }
        let mut pending = seeds;
        for _ in 0..self.max_rounds {
            let mut parts = Vec::new();
            for (w, want) in pending.drain(..) {
                if seen.insert(w.clone()) {
                    let acc = enc.accepts(&w);
                    parts.push(if want { acc } else { enc.c.not(acc) });
                }
            }
            let round = enc.c.and(parts);
            ts.assert(&enc.c, round);
            flush(&mut ts, &mut solver);
            let sat = solver.solve().map_err(|e| Error::Solver(e.to_string()))?;
            if !sat {
                return Ok(None);
            }
            let model = solver
                .model()
                .ok_or_else(|| Error::Solver("solver returned no model".into()))?;
            let mut value = vec![false; num_vars as usize];
            for lit in model {
                let i = lit.var().index();
                if i < value.len() {
                    value[i] = lit.is_positive();
                }
            }
            let a = enc.decode(&value, &alphabet)?;
            let report = check_lasso_precise(&a, phi, n, self.inclusion_bound)?;
            if report.is_precise() {
                return Ok(Some(a));
            }
            for mm in report.mismatches {
                pending.push((mm.lasso, mm.in_phi));
            }
            for w in report.inclusion_violations {
                pending.push((w, false));
            }
            if pending.iter().all(|(w, _)| seen.contains(w)) {
                return Err(Error::Solver("refinement made no progress".into()));
            }
        }
        Err(Error::ResourceLimit(format!(
            "no answer after {} refinement rounds",
            self.max_rounds
        )))
    }
}

struct Encoder {
    c: Circuit,
    k: usize,
    m: usize,
    sigma: usize,
    delta: Vec<NodeId>,
    color: Vec<NodeId>,
}

impl Encoder {
    fn d(&self, q: usize, a: usize, t: usize) -> NodeId {
        self.delta[(q * self.sigma + a) * self.k + t]
    }

    /// The deterministic run on `w` is alive throughout and the largest
    /// color on its cycle is even. After `|u| + |v|·(k-1)` letters the run is
    /// periodic, and the next `|v|·k` positions cover its cycle.
    fn accepts(&mut self, w: &Lasso) -> NodeId {
        let (u, v, k, m) = (w.stem().len(), w.period().len(), self.k, self.m);
        let start = u + v * (k - 1);
        let end = start + v * k;
        let mut cur: Vec<NodeId> = (0..k).map(|q| self.c.constant(q == 0)).collect();
        let mut appears = vec![Vec::new(); m];
        for i in 0..end {
            if i >= start {
                for (c, ap) in appears.iter_mut().enumerate() {
                    for q in 0..k {
                        let x = self.c.and2(cur[q], self.color[q * m + c]);
                        ap.push(x);
                    }
                }
            }
            let a = w.letter_at(i);
            let next: Vec<NodeId> = (0..k)
                .map(|t| {
                    let ins: Vec<NodeId> = (0..k)
                        .map(|q| {
                            let d = self.d(q, a, t);
                            self.c.and2(cur[q], d)
                        })
                        .collect();
                    self.c.or(ins)
                })
                .collect();
            cur = next;
        }
        let alive = self.c.or(cur.iter().copied());
        let appears: Vec<NodeId> = appears.into_iter().map(|xs| self.c.or(xs)).collect();
        let winners: Vec<NodeId> = (0..m)
            .step_by(2)
            .map(|c| {
                let mut parts = vec![appears[c]];
                for &hi in &appears[c + 1..] {
                    parts.push(self.c.not(hi));
                }
                self.c.and(parts)
            })
            .collect();
        let even = self.c.or(winners);
        self.c.and2(alive, even)
    }

    fn decode(&self, value: &[bool], alphabet: &crate::word::Alphabet) -> Result<ParityAutomaton> {
        let (k, m, sigma) = (self.k, self.m, self.sigma);
        let base = k * sigma * k;
        let mut delta = vec![vec![Vec::new(); sigma]; k];
        for (q, row) in delta.iter_mut().enumerate() {
            for (a, succ) in row.iter_mut().enumerate() {
                succ.extend((0..k).filter(|&t| value[(q * sigma + a) * k + t]));
            }
        }
        let mut colors = Vec::with_capacity(k);
        for q in 0..k {
            let cs: Vec<usize> = (0..m).filter(|&c| value[base + q * m + c]).collect();
            match cs.as_slice() {
                [c] => colors.push(*c as Color),
                _ => return Err(Error::Decode(format!("state {q} has {} colors", cs.len()))),
            }
        }
        let names = (0..k).map(|q| format!("s{q}")).collect();
        ParityAutomaton::new(alphabet.clone(), names, vec![0], delta, colors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::gf_one;
    use crate::lasso::FnOracle;
    use crate::word::Alphabet;

    #[test]
    fn gf_one_needs_n_states() {
        let a = gf_one();
        let phi = FnOracle::new(Alphabet::numeric(2), move |w: &Lasso| {
            a.accepts_lasso(w).unwrap()
        });
        for n in 2..=3 {
            let lazy = |k| LazySynthesis::new(n, k, 1).run(&phi).unwrap();
            assert!(lazy(n - 1).is_none(), "n={n}");
            let s = lazy(n).expect("n states suffice");
            assert!(check_lasso_precise(&s, &phi, n, n * n)
                .unwrap()
                .is_precise());
        }
    }
}
