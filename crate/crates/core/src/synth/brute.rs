//! Exhaustive search over small automata, used as an independent oracle.

use crate::automaton::{AutomatonBuilder, Color, ParityAutomaton};
use crate::error::{Error, Result};
use crate::lasso::{check_lasso_precise, enumerate_bases, enumerate_bases_up_to, MembershipOracle};
use crate::par::{self, Exec};
use crate::word::{Alphabet, Lasso};

use super::Target;

/// Candidates examined before giving up with a resource-limit error.
pub const DEFAULT_CEILING: u64 = 200_000_000;

/// Compact automaton with bitmask successor sets, for `k ≤ 64`.
#[derive(Clone, Debug)]
struct Compact {
    k: usize,
    sigma: usize,
    delta: Vec<u64>,
    colors: Vec<Color>,
    initial: u64,
}

fn bits(mut x: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if x == 0 {
            return None;
        }
        let i = x.trailing_zeros() as usize;
        x &= x - 1;
        Some(i)
    })
}

impl Compact {
    fn successors(&self, set: u128, w: &Lasso) -> u128 {
        let mut out = 0u128;
        for node in bits(set) {
            let (p, q) = (node / self.k, node % self.k);
            let targets = self.delta[q * self.sigma + w.letter_at(p)] as u128;
            out |= targets << (w.next_pos(p) * self.k);
        }
        out
    }

    /// Lasso acceptance on the position × state product, as bitsets.
    fn accepts(&self, w: &Lasso) -> bool {
        let nodes = w.len() * self.k;
        debug_assert!(nodes <= 128);
        let mut reach = self.initial as u128;
        let mut frontier = reach;
        while frontier != 0 {
            frontier = self.successors(frontier, w) & !reach;
            reach |= frontier;
        }
        let mut color_mask: Vec<(Color, u128)> = Vec::new();
        for node in bits(reach) {
            let c = self.colors[node % self.k];
            match color_mask.iter_mut().find(|(x, _)| *x == c) {
                Some((_, m)) => *m |= 1 << node,
                None => color_mask.push((c, 1 << node)),
            }
        }
        color_mask.sort_unstable_by_key(|&(c, _)| std::cmp::Reverse(c));
        for (i, &(c, top)) in color_mask.iter().enumerate() {
            if c % 2 == 1 {
                continue;
            }
            let allowed: u128 = color_mask[i..].iter().fold(0, |acc, (_, m)| acc | m);
            for x in bits(top) {
                let mut seen = self.successors(1 << x, w) & allowed;
                let mut frontier = seen;
                while frontier != 0 && seen >> x & 1 == 0 {
                    frontier = self.successors(frontier, w) & allowed & !seen;
                    seen |= frontier;
                }
                if seen >> x & 1 == 1 {
                    return true;
                }
            }
        }
        false
    }

    fn to_automaton(&self, alphabet: &Alphabet) -> ParityAutomaton {
        let mut b = AutomatonBuilder::new(alphabet.clone());
        for q in 0..self.k {
            b.add_state(format!("s{q}"), self.colors[q]);
        }
        for q in bits(self.initial as u128) {
            b.set_initial(q);
        }
        for q in 0..self.k {
            for a in 0..self.sigma {
                for t in bits(self.delta[q * self.sigma + a] as u128) {
                    b.add_transition(q, a, t);
                }
            }
        }
        b.build().expect("candidate is well formed")
    }
}

/// The lassos a candidate must accept and must reject.
struct Obligations {
    accept: Vec<Lasso>,
    reject: Vec<Lasso>,
}

fn obligations(
    oracle: &dyn MembershipOracle,
    n: usize,
    inclusion_bound: usize,
) -> Result<Obligations> {
    let mut accept = Vec::new();
    let mut reject = Vec::new();
    for w in enumerate_bases(oracle.alphabet(), n)? {
        if oracle.contains(&w) {
            accept.push(w);
        } else {
            reject.push(w);
        }
    }
    for w in enumerate_bases_up_to(oracle.alphabet(), inclusion_bound)? {
        if w == w.canonical() && w.len() != n && !oracle.contains(&w) {
            reject.push(w);
        }
    }
    reject.sort_by_key(Lasso::len);
    Ok(Obligations { accept, reject })
}

/// Colorings `c_0 ≤ c_1 ≤ …` that are already normalized.
fn sorted_colorings(k: usize, m: usize) -> Vec<Vec<Color>> {
    let mut out = Vec::new();
    let mut cur = vec![0; k];
    fn rec(i: usize, lo: Color, m: Color, cur: &mut Vec<Color>, out: &mut Vec<Vec<Color>>) {
        if i == cur.len() {
            if crate::automaton::normalize_colors(cur) == *cur {
                out.push(cur.clone());
            }
            return;
        }
        for c in lo..m {
            cur[i] = c;
            rec(i + 1, c, m, cur, out);
        }
    }
    rec(0, 0, m as Color, &mut cur, &mut out);
    out
}

/// All colorings in `{0..m}^k`.
fn all_colorings(k: usize, m: usize) -> Vec<Vec<Color>> {
    let total = m.pow(k as u32);
    (0..total)
        .map(|mut i| {
            (0..k)
                .map(|_| {
                    let c = (i % m) as Color;
                    i /= m;
                    c
                })
                .collect()
        })
        .collect()
}

/// Is the deterministic table in breadth-first canonical numbering, with
/// unreachable states left empty?
fn is_canonical(table: &[Option<usize>], k: usize, sigma: usize) -> bool {
    let mut next = 1;
    let mut q = 0;
    while q < next {
        for a in 0..sigma {
            if let Some(t) = table[q * sigma + a] {
                if t > next {
                    return false;
                }
                if t == next {
                    next += 1;
                }
            }
        }
        q += 1;
    }
    (next..k).all(|q| (0..sigma).all(|a| table[q * sigma + a].is_none()))
}

/// Size of the candidate space before symmetry pruning.
pub fn search_space(k: usize, sigma: usize, m: usize, target: Target) -> Option<u64> {
    let cells = (k * sigma) as u32;
    match target {
        Target::Deterministic => (k as u64 + 1)
            .checked_pow(cells)?
            .checked_mul((m as u64).checked_pow(k as u32)?),
        Target::Nondeterministic => 1u64
            .checked_shl(cells * k as u32)
            .filter(|_| cells as usize * k < 64)?
            .checked_mul((1u64 << k) - 1)?
            .checked_mul(sorted_colorings(k, m).len() as u64),
    }
}

/// Parameters of an exhaustive search.
#[derive(Clone, Copy, Debug)]
pub struct BruteForce {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub target: Target,
    pub inclusion_bound: usize,
    pub ceiling: u64,
    pub exec: Exec,
}

impl BruteForce {
    pub fn new(n: usize, k: usize, m: usize, target: Target) -> Self {
        BruteForce {
            n,
            k,
            m,
            target,
            inclusion_bound: n * k,
            ceiling: DEFAULT_CEILING,
            exec: Exec::default(),
        }
    }

    /// Searches for a `k`-state automaton with at most `m` colors that passes
    /// the precision check at `n` and inclusion on lassos up to the bound.
    /// Nondeterministic searches only try colorings sorted by state, which
    /// is complete up to renaming states.
    pub fn run(&self, oracle: &dyn MembershipOracle) -> Result<Option<ParityAutomaton>> {
        let BruteForce {
            n, k, m, target, ..
        } = *self;
        if n == 0 || k == 0 || m == 0 {
            return Err(Error::Input("n, k and m must all be at least 1".into()));
        }
        if k > 64 || self.inclusion_bound.max(n) * k > 128 {
            return Err(Error::ResourceLimit(format!(
                "brute force supports at most 128 product nodes (k = {k}, bound = {})",
                self.inclusion_bound.max(n)
            )));
        }
        let sigma = oracle.alphabet().len();
        let space = search_space(k, sigma, m, target).unwrap_or(u64::MAX);
        if space > self.ceiling {
            return Err(Error::ResourceLimit(format!(
                "search space of {space} candidates exceeds the ceiling of {}",
                self.ceiling
            )));
        }
        let obl = obligations(oracle, n, self.inclusion_bound.max(n))?;
        let passes = |c: &Compact| {
            obl.accept.iter().all(|w| c.accepts(w)) && !obl.reject.iter().any(|w| c.accepts(w))
        };
        let found = match target {
            Target::Deterministic => self.search_deterministic(sigma, &passes),
            Target::Nondeterministic => self.search_nondeterministic(sigma, &passes),
        };
        let Some(c) = found else { return Ok(None) };
        let a = c.to_automaton(oracle.alphabet());
        let report = check_lasso_precise(&a, oracle, n, self.inclusion_bound.max(n))?;
        if !report.is_precise() {
            return Err(Error::Solver(
                "brute-force witness failed re-verification".into(),
            ));
        }
        Ok(Some(a))
    }

    fn search_deterministic(
        &self,
        sigma: usize,
        passes: &(dyn Fn(&Compact) -> bool + Sync),
    ) -> Option<Compact> {
        let k = self.k;
        let cells = k * sigma;
        let tables = (k as u64 + 1).pow(cells as u32);
        let colorings = all_colorings(k, self.m);
        par::find_first(self.exec, 0..tables, |idx| {
            let mut i = idx;
            let table: Vec<Option<usize>> = (0..cells)
                .map(|_| {
                    let d = (i % (k as u64 + 1)) as usize;
                    i /= k as u64 + 1;
                    d.checked_sub(1)
                })
                .collect();
            if !is_canonical(&table, k, sigma) {
                return None;
            }
            let reachable = {
                let mut r = 1;
                for t in table.iter().flatten() {
                    r = r.max(t + 1);
                }
                r
            };
            let delta: Vec<u64> = table.iter().map(|t| t.map_or(0, |t| 1u64 << t)).collect();
            colorings
                .iter()
                // colors of unreachable states are irrelevant: pin them to 0
                .filter(|cs| cs[reachable..].iter().all(|&c| c == 0))
                .map(|cs| Compact {
                    k,
                    sigma,
                    delta: delta.clone(),
                    colors: cs.clone(),
                    initial: 1,
                })
                .find(|c| passes(c))
        })
    }

    fn search_nondeterministic(
        &self,
        sigma: usize,
        passes: &(dyn Fn(&Compact) -> bool + Sync),
    ) -> Option<Compact> {
        let k = self.k;
        let cells = k * sigma;
        let tables = 1u64 << (cells * k);
        let colorings = sorted_colorings(k, self.m);
        let mask = (1u64 << k) - 1;
        par::find_first(self.exec, 0..tables, |idx| {
            let delta: Vec<u64> = (0..cells).map(|c| idx >> (c * k) & mask).collect();
            for initial in 1..=mask {
                for cs in &colorings {
                    let c = Compact {
                        k,
                        sigma,
                        delta: delta.clone(),
                        colors: cs.clone(),
                        initial,
                    };
                    if passes(&c) {
                        return Some(c);
                    }
                }
            }
            None
        })
    }
}
