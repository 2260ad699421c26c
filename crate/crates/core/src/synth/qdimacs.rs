//! Tseitin clausification and QDIMACS output.

use std::fmt::Write as _;

use super::circuit::{Circuit, Node, NodeId};
use super::encode::{QbfProblem, VarRole};

/// Clauses over DIMACS literals. Circuit variable `v` becomes DIMACS
/// variable `v + 1`; gate outputs get fresh variables after `first_aux`.
#[derive(Clone, Debug, Default)]
pub struct Cnf {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
}

/// Incremental Tseitin transformation of one circuit, which may keep
/// growing between calls.
pub struct Tseitin {
    lit: Vec<i32>,
    pub cnf: Cnf,
}

impl Tseitin {
    /// `first_aux` is the number of input variables reserved before gates.
    pub fn new(first_aux: u32) -> Self {
        Tseitin {
            lit: Vec::new(),
            cnf: Cnf {
                num_vars: first_aux,
                clauses: Vec::new(),
            },
        }
    }

    fn fresh(&mut self) -> i32 {
        self.cnf.num_vars += 1;
        self.cnf.num_vars as i32
    }

    /// Literal equivalent to `root`, defining every gate in its cone.
    pub fn literal(&mut self, circuit: &Circuit, root: NodeId) -> i32 {
        self.lit.resize(circuit.len(), 0);
        for id in circuit.cone(root) {
            let slot = id.0 as usize;
            if self.lit[slot] != 0 {
                continue;
            }
            let l = match circuit.node(id) {
                Node::False | Node::True => {
                    let x = self.fresh();
                    self.cnf.clauses.push(vec![x]);
                    if matches!(circuit.node(id), Node::True) {
                        x
                    } else {
                        -x
                    }
                }
                Node::Var(v) => *v as i32 + 1,
                Node::Not(x) => -self.lit[x.0 as usize],
                Node::And(xs) | Node::Or(xs) => {
                    let is_and = matches!(circuit.node(id), Node::And(_));
                    let ins: Vec<i32> = xs.iter().map(|x| self.lit[x.0 as usize]).collect();
                    let g = self.fresh();
                    // And: g → x_i, (∧x_i) → g. Or is the dual.
                    let s = if is_and { 1 } else { -1 };
                    let mut long = vec![s * g];
                    for &x in &ins {
                        self.cnf.clauses.push(vec![-s * g, s * x]);
                        long.push(-s * x);
                    }
                    self.cnf.clauses.push(long);
                    g
                }
            };
            self.lit[slot] = l;
        }
        self.lit[root.0 as usize]
    }

    /// Adds `root` as a unit clause.
    pub fn assert(&mut self, circuit: &Circuit, root: NodeId) {
        let l = self.literal(circuit, root);
        self.cnf.clauses.push(vec![l]);
    }
}

fn role_comment(role: &VarRole) -> String {
    match role {
        VarRole::Delta { from, letter, to } => format!("delta {from} {letter} {to}"),
        VarRole::Color { state, color } => format!("color {state} {color}"),
        VarRole::Letter { ap, pos } => format!("letter {ap} {pos}"),
        VarRole::WordLoop { pos } => format!("wordloop {pos}"),
        VarRole::RunState { pos, state } => format!("runstate {pos} {state}"),
        VarRole::RunLoop { pos } => format!("runloop {pos}"),
    }
}

/// Writes the problem as QDIMACS with prefix `e a e`: automaton variables,
/// the universal word and run variables, then the Tseitin variables.
pub fn emit_qdimacs(p: &QbfProblem) -> String {
    let mut ts = Tseitin::new(p.num_vars() as u32);
    ts.assert(&p.circuit, p.matrix);
    let cnf = ts.cnf;
    let q = &p.query;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "c lasso-precise synthesis n={} k={} m={} target={:?}",
        q.n, q.k, q.m, q.target
    );
    let _ = writeln!(out, "c formula {}", q.formula);
    for (v, role) in p.roles.iter().enumerate() {
        let _ = writeln!(out, "c var {} {}", v + 1, role_comment(role));
    }
    let _ = writeln!(out, "p cnf {} {}", cnf.num_vars, cnf.clauses.len());
    let line = |tag: &str, vars: &mut dyn Iterator<Item = u32>| {
        let mut s = tag.to_string();
        for v in vars {
            let _ = write!(s, " {v}");
        }
        s.push_str(" 0\n");
        s
    };
    out.push_str(&line("e", &mut p.existentials().into_iter().map(|v| v + 1)));
    out.push_str(&line("a", &mut p.universals().into_iter().map(|v| v + 1)));
    let aux = p.num_vars() as u32 + 1..=cnf.num_vars;
    out.push_str(&line("e", &mut aux.into_iter()));
    for c in &cnf.clauses {
        for l in c {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    out
}
