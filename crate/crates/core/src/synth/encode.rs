//! The 2-QBF encoding of bounded-size lasso-precise synthesis.
//!
//! ```text
//! ∃ δ, μ. ∀ a, l, s, r.  DPA ∧ (LOOP → SUB ∧ EQ_n)
//! SUB  = loop_k ∧ match_k ∧ accrun_k → sat_k        accepting size-k runs satisfy φ
//! EQ_n = loop_n ∧ sat_n → total_nk ∧ (match_nk → accrun_nk)
//! ```
//!
//! `a` are letter bits for positions `< max(k,n)`, `l` marks the word loop,
//! `s` are one-hot run states for positions `< n·k` and `r` marks the run
//! loop. `total_nk` demands that the run on a word of `L_n(φ)` never gets
//! stuck, which a partial automaton could otherwise exploit.

#![allow(clippy::needless_range_loop)]

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::ltl::{ApLetterMap, LtlFormula};

use super::circuit::{Circuit, NodeId};
use super::{SynthesisQuery, Target};

/// What a problem variable stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarRole {
    /// `δ_{s,α,s′}`
    Delta {
        from: usize,
        letter: usize,
        to: usize,
    },
    /// `μ_{s,c}`
    Color { state: usize, color: usize },
    /// `a_j` for one proposition
    Letter { ap: usize, pos: usize },
    /// `l_j`
    WordLoop { pos: usize },
    /// `s_j` selecting one state
    RunState { pos: usize, state: usize },
    /// `r_j`
    RunLoop { pos: usize },
}

impl VarRole {
    pub fn is_existential(&self) -> bool {
        matches!(self, VarRole::Delta { .. } | VarRole::Color { .. })
    }
}

/// Every named subformula of the matrix.
#[derive(Clone, Copy, Debug)]
pub struct Parts {
    pub dpa: NodeId,
    pub loop_wf: NodeId,
    pub sub: NodeId,
    pub eq_n: NodeId,
    pub match_k: NodeId,
    pub accrun_k: NodeId,
    pub sat_k: NodeId,
    pub sat_n: NodeId,
    pub match_nk: NodeId,
    pub accrun_nk: NodeId,
    pub total_nk: NodeId,
}

/// An encoded query: circuit, variable roles and the matrix.
#[derive(Clone, Debug)]
pub struct QbfProblem {
    pub query: SynthesisQuery,
    pub circuit: Circuit,
    pub roles: Vec<VarRole>,
    pub parts: Parts,
    pub matrix: NodeId,
    delta: Vec<u32>,
    color: Vec<u32>,
    letter: Vec<u32>,
    word_loop: Vec<u32>,
    run_state: Vec<u32>,
    run_loop: Vec<u32>,
}

impl QbfProblem {
    pub fn num_vars(&self) -> usize {
        self.roles.len()
    }

    pub fn existentials(&self) -> Vec<u32> {
        self.delta.iter().chain(&self.color).copied().collect()
    }

    pub fn universals(&self) -> Vec<u32> {
        self.letter
            .iter()
            .chain(&self.word_loop)
            .chain(&self.run_state)
            .chain(&self.run_loop)
            .copied()
            .collect()
    }

    pub fn delta_var(&self, from: usize, letter: usize, to: usize) -> u32 {
        let (k, sigma) = (self.query.k, self.query.map.alphabet().len());
        self.delta[(from * sigma + letter) * k + to]
    }

    pub fn color_var(&self, state: usize, color: usize) -> u32 {
        self.color[state * self.query.m + color]
    }

    pub fn letter_var(&self, ap: usize, pos: usize) -> u32 {
        self.letter[pos * self.query.map.aps().len() + ap]
    }

    pub fn word_loop_var(&self, pos: usize) -> u32 {
        self.word_loop[pos]
    }

    pub fn run_state_var(&self, pos: usize, state: usize) -> u32 {
        self.run_state[pos * self.query.k + state]
    }

    pub fn run_loop_var(&self, pos: usize) -> u32 {
        self.run_loop[pos]
    }

    /// Number of word positions `max(k, n)`.
    pub fn word_len(&self) -> usize {
        self.query.k.max(self.query.n)
    }

    /// Number of run positions `n·k`.
    pub fn run_len(&self) -> usize {
        self.query.n * self.query.k
    }
}

struct Builder<'a> {
    c: Circuit,
    roles: Vec<VarRole>,
    map: &'a ApLetterMap,
}

impl Builder<'_> {
    fn fresh(&mut self, role: VarRole) -> u32 {
        self.roles.push(role);
        (self.roles.len() - 1) as u32
    }

    fn v(&mut self, var: u32) -> NodeId {
        self.c.var(var)
    }
}

/// Encodes a query. Fails on a zero budget or an atom missing from the map.
pub fn encode(query: &SynthesisQuery) -> Result<QbfProblem> {
    let SynthesisQuery {
        n, k, m, target, ..
    } = *query;
    if n == 0 || k == 0 || m == 0 {
        return Err(Error::Input("n, k and m must all be at least 1".into()));
    }
    let map = &query.map;
    for atom in query.formula.atoms() {
        if map.ap_index(&atom).is_none() {
            return Err(Error::Input(format!(
                "proposition {atom:?} is not in the alphabet"
            )));
        }
    }
    let sigma = map.alphabet().len();
    let aps = map.aps().len();
    let word_len = k.max(n);
    let run_len = n * k;
    let mut b = Builder {
        c: Circuit::new(),
        roles: Vec::new(),
        map,
    };

    let mut delta = Vec::with_capacity(k * sigma * k);
    for from in 0..k {
        for letter in 0..sigma {
            for to in 0..k {
                delta.push(b.fresh(VarRole::Delta { from, letter, to }));
            }
        }
    }
    let mut color = Vec::with_capacity(k * m);
    for state in 0..k {
        for c in 0..m {
            color.push(b.fresh(VarRole::Color { state, color: c }));
        }
    }
    let mut letter = Vec::new();
    for pos in 0..word_len {
        for ap in 0..aps {
            letter.push(b.fresh(VarRole::Letter { ap, pos }));
        }
    }
    let word_loop: Vec<u32> = (0..word_len)
        .map(|pos| b.fresh(VarRole::WordLoop { pos }))
        .collect();
    let mut run_state = Vec::new();
    for pos in 0..run_len {
        for state in 0..k {
            run_state.push(b.fresh(VarRole::RunState { pos, state }));
        }
    }
    let run_loop: Vec<u32> = (0..run_len)
        .map(|pos| b.fresh(VarRole::RunLoop { pos }))
        .collect();

    let d = |from: usize, a: usize, to: usize| delta[(from * sigma + a) * k + to];

    // DPA: functional transitions (deterministic target) and one color per state.
    let mut dpa = Vec::new();
    for s in 0..k {
        if target == Target::Deterministic {
            for a in 0..sigma {
                let succ: Vec<NodeId> = (0..k).map(|t| b.v(d(s, a, t))).collect();
                dpa.push(b.c.at_most_one(&succ));
            }
        }
        let cs: Vec<NodeId> = (0..m).map(|c| b.v(color[s * m + c])).collect();
        dpa.push(b.c.exactly_one(&cs));
    }
    let dpa = b.c.and(dpa);

    // letter_is[j][α]
    let letter_is: Vec<Vec<NodeId>> = (0..word_len)
        .map(|j| {
            (0..sigma)
                .map(|a| {
                    let mask = map.mask(a);
                    let lits: Vec<NodeId> = (0..aps)
                        .map(|ap| {
                            let x = b.v(letter[j * aps + ap]);
                            if mask >> ap & 1 == 1 {
                                x
                            } else {
                                b.c.not(x)
                            }
                        })
                        .collect();
                    b.c.and(lits)
                })
                .collect()
        })
        .collect();

    let l: Vec<NodeId> = word_loop.iter().map(|&x| b.v(x)).collect();
    let r: Vec<NodeId> = run_loop.iter().map(|&x| b.v(x)).collect();
    let s: Vec<Vec<NodeId>> = (0..run_len)
        .map(|j| (0..k).map(|q| b.v(run_state[j * k + q])).collect())
        .collect();

    // LOOP: one word loop, one run loop, every position carries a letter.
    let loop_wf = {
        let mut parts = vec![b.c.exactly_one(&l), b.c.exactly_one(&r)];
        if !map.is_full() {
            for row in &letter_is {
                parts.push(b.c.or(row.iter().copied()));
            }
        }
        b.c.and(parts)
    };

    // trans(q, j, q'): the letter at word position j leads from q to q'.
    // With `wrap`, run positions j ≥ n read the n-word through its loop: pos_i(j).
    let mut trans_cache: HashMap<(usize, usize, usize), NodeId> = HashMap::new();
    let word_pos = |i: usize, j: usize| i + (j - i) % (n - i);
    let mut trans = |b: &mut Builder, q: usize, j: usize, t: usize, wrap: bool| -> NodeId {
        let mut plain = |b: &mut Builder, j: usize| -> NodeId {
            if let Some(&x) = trans_cache.get(&(q, j, t)) {
                return x;
            }
            let alts: Vec<NodeId> = (0..sigma)
                .map(|a| {
                    let dv = b.v(d(q, a, t));
                    b.c.and2(letter_is[j][a], dv)
                })
                .collect();
            let x = b.c.or(alts);
            trans_cache.insert((q, j, t), x);
            x
        };
        if !wrap || j < n {
            return plain(b, j);
        }
        let alts: Vec<NodeId> = (0..n)
            .map(|i| {
                let x = plain(b, word_pos(i, j));
                b.c.and2(l[i], x)
            })
            .collect();
        b.c.or(alts)
    };

    let step = |b: &mut Builder,
                from: &[NodeId],
                to: &[NodeId],
                tr: &mut dyn FnMut(&mut Builder, usize, usize) -> NodeId| {
        let mut parts = Vec::new();
        for q in 0..k {
            for t in 0..k {
                let both = b.c.and2(from[q], to[t]);
                let x = tr(b, q, t);
                parts.push(b.c.implies(both, x));
            }
        }
        b.c.and(parts)
    };

    let accrun = |b: &mut Builder, len: usize| -> NodeId {
        let mut in_loop = Vec::with_capacity(len);
        for j in 0..len {
            let x = b.c.or(r[..=j].iter().copied());
            in_loop.push(x);
        }
        let appears: Vec<NodeId> = (0..m)
            .map(|c| {
                let at: Vec<NodeId> = (0..len)
                    .map(|j| {
                        let has: Vec<NodeId> = (0..k)
                            .map(|q| {
                                let mu = b.v(color[q * m + c]);
                                b.c.and2(s[j][q], mu)
                            })
                            .collect();
                        let has = b.c.or(has);
                        b.c.and2(in_loop[j], has)
                    })
                    .collect();
                b.c.or(at)
            })
            .collect();
        let winners: Vec<NodeId> = (0..m)
            .step_by(2)
            .map(|c| {
                let mut parts = vec![appears[c]];
                for &hi in &appears[c + 1..] {
                    parts.push(b.c.not(hi));
                }
                b.c.and(parts)
            })
            .collect();
        b.c.or(winners)
    };

    let run_prefix_wf = |b: &mut Builder, upto: usize| -> Vec<NodeId> {
        let mut parts = vec![s[0][0]];
        for row in s.iter().take(upto + 1) {
            parts.push(b.c.exactly_one(row));
        }
        parts
    };

    // SUB: accepting runs of size exactly k, word loop = run loop.
    let loop_k = {
        let alts: Vec<NodeId> = (0..k).map(|i| b.c.and2(l[i], r[i])).collect();
        b.c.or(alts)
    };
    let match_k = {
        let mut parts = run_prefix_wf(&mut b, k - 1);
        for j in 0..k - 1 {
            let x = step(&mut b, &s[j], &s[j + 1], &mut |b, q, t| {
                trans(b, q, j, t, false)
            });
            parts.push(x);
        }
        for i in 0..k {
            let wrap = step(&mut b, &s[k - 1], &s[i], &mut |b, q, t| {
                trans(b, q, k - 1, t, false)
            });
            parts.push(b.c.implies(r[i], wrap));
        }
        b.c.and(parts)
    };
    let accrun_k = accrun(&mut b, k);
    let sat_k = ltl_at_zero(&mut b, &query.formula, k, &letter, &l)?;
    let sub = {
        let prem = b.c.and([loop_k, match_k, accrun_k]);
        b.c.implies(prem, sat_k)
    };

    // EQ_n: words of L_n(φ) have an accepting run of size n·k.
    let loop_n = b.c.or(l[..n].iter().copied());
    let sat_n = ltl_at_zero(&mut b, &query.formula, n, &letter, &l)?;
    let mut steps = Vec::with_capacity(run_len);
    for j in 0..run_len.saturating_sub(1) {
        let x = step(&mut b, &s[j], &s[j + 1], &mut |b, q, t| {
            trans(b, q, j, t, true)
        });
        steps.push(x);
    }
    let match_nk = {
        let mut parts = run_prefix_wf(&mut b, run_len - 1);
        parts.extend_from_slice(&steps);
        for (rr, &r_node) in r.iter().enumerate() {
            // the run loop must close at the same word position
            let consistent: Vec<NodeId> = (0..n)
                .filter(|&i| rr >= i && (run_len - rr) % (n - i) == 0)
                .map(|i| l[i])
                .collect();
            let consistent = b.c.or(consistent);
            let wrap = step(&mut b, &s[run_len - 1], &s[rr], &mut |b, q, t| {
                trans(b, q, run_len - 1, t, true)
            });
            let closes = b.c.and2(consistent, wrap);
            parts.push(b.c.implies(r_node, closes));
        }
        b.c.and(parts)
    };
    let accrun_nk = accrun(&mut b, run_len);
    let total_nk = {
        let mut parts = Vec::with_capacity(run_len);
        for j in 0..run_len {
            let mut prefix = run_prefix_wf(&mut b, j);
            prefix.extend_from_slice(&steps[..j]);
            let prefix = b.c.and(prefix);
            let mut moves = Vec::new();
            for q in 0..k {
                for t in 0..k {
                    let x = trans(&mut b, q, j, t, true);
                    moves.push(b.c.and2(s[j][q], x));
                }
            }
            let moves = b.c.or(moves);
            parts.push(b.c.implies(prefix, moves));
        }
        b.c.and(parts)
    };
    let eq_n = {
        let prem = b.c.and2(loop_n, sat_n);
        let run_ok = b.c.implies(match_nk, accrun_nk);
        let concl = b.c.and2(total_nk, run_ok);
        b.c.implies(prem, concl)
    };

    let matrix = {
        let body = b.c.and2(sub, eq_n);
        let guarded = b.c.implies(loop_wf, body);
        b.c.and2(dpa, guarded)
    };

    Ok(QbfProblem {
        query: query.clone(),
        circuit: b.c,
        roles: b.roles,
        parts: Parts {
            dpa,
            loop_wf,
            sub,
            eq_n,
            match_k,
            accrun_k,
            sat_k,
            sat_n,
            match_nk,
            accrun_nk,
            total_nk,
        },
        matrix,
        delta,
        color,
        letter,
        word_loop,
        run_state,
        run_loop,
    })
}

/// Bounded semantics of `f` at position 0 of the word `a_0 … a_{len-1}` whose
/// last position is followed by the position marked in `l`. Until and release
/// are unrolled `len` times from their fixpoint start values.
fn ltl_at_zero(
    b: &mut Builder,
    f: &LtlFormula,
    len: usize,
    letter: &[u32],
    l: &[NodeId],
) -> Result<NodeId> {
    let aps = b.map.aps().len();
    let mut vals: HashMap<&LtlFormula, Vec<NodeId>> = HashMap::new();
    let next = |b: &mut Builder, xs: &[NodeId]| -> Vec<NodeId> {
        let wrap: Vec<NodeId> = (0..len).map(|i| b.c.and2(l[i], xs[i])).collect();
        let wrap = b.c.or(wrap);
        (0..len)
            .map(|i| if i + 1 < len { xs[i + 1] } else { wrap })
            .collect()
    };
    for g in f.subformulas() {
        let v: Vec<NodeId> = match g {
            LtlFormula::True => vec![Circuit::TRUE; len],
            LtlFormula::False => vec![Circuit::FALSE; len],
            LtlFormula::Atom(name) => {
                let ap = b.map.ap_index(name).ok_or_else(|| {
                    Error::Input(format!("proposition {name:?} is not in the alphabet"))
                })?;
                (0..len).map(|j| b.v(letter[j * aps + ap])).collect()
            }
            LtlFormula::Not(x) => vals[&**x].clone().into_iter().map(|y| b.c.not(y)).collect(),
            LtlFormula::And(x, y) => (0..len)
                .map(|j| b.c.and2(vals[&**x][j], vals[&**y][j]))
                .collect(),
            LtlFormula::Or(x, y) => (0..len)
                .map(|j| b.c.or2(vals[&**x][j], vals[&**y][j]))
                .collect(),
            LtlFormula::Implies(x, y) => (0..len)
                .map(|j| b.c.implies(vals[&**x][j], vals[&**y][j]))
                .collect(),
            LtlFormula::Next(x) => {
                let xs = vals[&**x].clone();
                next(b, &xs)
            }
            LtlFormula::Until(..)
            | LtlFormula::Release(..)
            | LtlFormula::Finally(_)
            | LtlFormula::Globally(_) => {
                let (hold, goal, least) = match g {
                    LtlFormula::Until(x, y) => (vals[&**x].clone(), vals[&**y].clone(), true),
                    LtlFormula::Finally(y) => (vec![Circuit::TRUE; len], vals[&**y].clone(), true),
                    LtlFormula::Release(x, y) => (vals[&**x].clone(), vals[&**y].clone(), false),
                    LtlFormula::Globally(y) => {
                        (vec![Circuit::FALSE; len], vals[&**y].clone(), false)
                    }
                    _ => unreachable!(),
                };
                // least: goal ∨ (hold ∧ X·) from false; greatest: goal ∧ (hold ∨ X·) from true
                let mut cur = vec![b.c.constant(!least); len];
                for _ in 0..len {
                    let nx = next(b, &cur);
                    cur = (0..len)
                        .map(|j| {
                            if least {
                                let t = b.c.and2(hold[j], nx[j]);
                                b.c.or2(goal[j], t)
                            } else {
                                let t = b.c.or2(hold[j], nx[j]);
                                b.c.and2(goal[j], t)
                            }
                        })
                        .collect();
                }
                cur
            }
        };
        vals.insert(g, v);
    }
    Ok(vals[f][0])
}
