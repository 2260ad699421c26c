//! State-based parity automata with the max-even acceptance condition.
//!
//! Büchi automata (colors in `{1,2}`) and safety automata (all colors `0`)
//! are color profiles of the same type. Transition functions may be partial;
//! a missing successor rejects.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph;
use crate::word::{Alphabet, Lasso, Letter};

pub type StateId = usize;
pub type Color = u32;

/// Compacts a coloring: distinct colors are re-indexed in order, adjacent
/// colors of equal parity are merged, and the lowest color becomes 0 or 1
/// according to its parity. Acceptance of every run is unchanged.
pub fn normalize_colors(colors: &[Color]) -> Vec<Color> {
    let mut distinct: Vec<Color> = colors.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let mut map = HashMap::with_capacity(distinct.len());
    let mut current: Option<(Color, Color)> = None; // (original, mapped)
    for &c in &distinct {
        let mapped = match current {
            None => c % 2,
            Some((prev, m)) if prev % 2 == c % 2 => m,
            Some((_, m)) => m + 1,
        };
        map.insert(c, mapped);
        current = Some((c, mapped));
    }
    colors.iter().map(|c| map[c]).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityAutomaton {
    alphabet: Alphabet,
    names: Vec<String>,
    initial: Vec<StateId>,
    /// `delta[state][letter]`, sorted and deduplicated.
    delta: Vec<Vec<Vec<StateId>>>,
    colors: Vec<Color>,
}

/// An ultimately-periodic run `states[..loop_start] · (states[loop_start..])^ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunLasso {
    pub states: Vec<StateId>,
    pub loop_start: usize,
}

impl RunLasso {
    pub fn size(&self) -> usize {
        self.states.len()
    }

    /// Shortest representation of the same infinite run.
    pub fn minimize(&self) -> RunLasso {
        let period = &self.states[self.loop_start..];
        let p = period.len();
        let root = (1..=p)
            .find(|&d| p.is_multiple_of(d) && (0..p).all(|i| period[i] == period[i % d]))
            .unwrap_or(p);
        let mut stem = self.states[..self.loop_start].to_vec();
        let mut cycle = period[..root].to_vec();
        while let Some(&last) = stem.last() {
            if last == cycle[root - 1] {
                stem.pop();
                cycle.rotate_right(1);
            } else {
                break;
            }
        }
        let loop_start = stem.len();
        stem.extend(cycle);
        RunLasso {
            states: stem,
            loop_start,
        }
    }
}

/// Outcome of an emptiness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    /// An accepting run and the word it reads.
    NonEmpty {
        run: RunLasso,
        word: Lasso,
    },
}

impl Emptiness {
    pub fn is_empty(&self) -> bool {
        matches!(self, Emptiness::Empty)
    }

    pub fn witness(&self) -> Option<&Lasso> {
        match self {
            Emptiness::Empty => None,
            Emptiness::NonEmpty { word, .. } => Some(word),
        }
    }
}

/// Result of an exact inclusion check `L(S) ⊆ L(D)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inclusion {
    pub holds: bool,
    pub counterexample: Option<Lasso>,
}

/// Incremental construction of a [`ParityAutomaton`].
#[derive(Clone, Debug)]
pub struct AutomatonBuilder {
    alphabet: Alphabet,
    names: Vec<String>,
    initial: Vec<StateId>,
    delta: Vec<Vec<Vec<StateId>>>,
    colors: Vec<Color>,
}

impl AutomatonBuilder {
    pub fn new(alphabet: Alphabet) -> Self {
        AutomatonBuilder {
            alphabet,
            names: Vec::new(),
            initial: Vec::new(),
            delta: Vec::new(),
            colors: Vec::new(),
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>, color: Color) -> StateId {
        self.names.push(name.into());
        self.colors.push(color);
        self.delta.push(vec![Vec::new(); self.alphabet.len()]);
        self.names.len() - 1
    }

    pub fn set_initial(&mut self, state: StateId) -> &mut Self {
        if !self.initial.contains(&state) {
            self.initial.push(state);
        }
        self
    }

    pub fn add_transition(&mut self, from: StateId, letter: Letter, to: StateId) -> &mut Self {
        self.delta[from][letter].push(to);
        self
    }

    pub fn set_color(&mut self, state: StateId, color: Color) {
        self.colors[state] = color;
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn build(self) -> Result<ParityAutomaton> {
        ParityAutomaton::new(
            self.alphabet,
            self.names,
            self.initial,
            self.delta,
            self.colors,
        )
    }
}

impl ParityAutomaton {
    /// Validates the components and normalizes the coloring.
    pub fn new(
        alphabet: Alphabet,
        names: Vec<String>,
        mut initial: Vec<StateId>,
        mut delta: Vec<Vec<Vec<StateId>>>,
        colors: Vec<Color>,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Input("automaton needs at least one state".into()));
        }
        if colors.len() != n || delta.len() != n {
            return Err(Error::Input(
                "coloring and transition table must cover every state".into(),
            ));
        }
        if initial.is_empty() {
            return Err(Error::Input("automaton needs an initial state".into()));
        }
        initial.sort_unstable();
        initial.dedup();
        if let Some(&q) = initial.iter().find(|&&q| q >= n) {
            return Err(Error::Input(format!("initial state {q} is not declared")));
        }
        for (q, row) in delta.iter_mut().enumerate() {
            if row.len() != alphabet.len() {
                return Err(Error::Input(format!(
                    "state {q} has a malformed transition row"
                )));
            }
            for targets in row.iter_mut() {
                targets.sort_unstable();
                targets.dedup();
                if let Some(&t) = targets.iter().find(|&&t| t >= n) {
                    return Err(Error::Input(format!(
                        "transition target {t} is not declared"
                    )));
                }
            }
        }
        let mut seen = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if seen.insert(name.as_str(), i).is_some() {
                return Err(Error::Input(format!("duplicate state name {name:?}")));
            }
        }
        Ok(ParityAutomaton {
            alphabet,
            names,
            initial,
            delta,
            colors: normalize_colors(&colors),
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.names[q]
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn successors(&self, q: StateId, letter: Letter) -> &[StateId] {
        &self.delta[q][letter]
    }

    pub fn color(&self, q: StateId) -> Color {
        self.colors[q]
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().flatten().map(Vec::len).sum()
    }

    /// Number of distinct colors in the image of the coloring.
    pub fn color_count(&self) -> usize {
        let mut c = self.colors.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    }

    pub fn max_color(&self) -> Color {
        self.colors.iter().copied().max().unwrap_or(0)
    }

    pub fn is_deterministic(&self) -> bool {
        self.initial.len() == 1 && self.delta.iter().flatten().all(|t| t.len() <= 1)
    }

    pub fn is_complete(&self) -> bool {
        self.delta.iter().flatten().all(|t| !t.is_empty())
    }

    pub fn is_buchi(&self) -> bool {
        self.colors.iter().all(|&c| c == 1 || c == 2)
    }

    pub fn is_safety(&self) -> bool {
        self.colors.iter().all(|&c| c == 0)
    }

    /// The successor in a deterministic automaton.
    pub fn step(&self, q: StateId, letter: Letter) -> Option<StateId> {
        self.delta[q][letter].first().copied()
    }

    fn check_word(&self, w: &Lasso) -> Result<()> {
        match w.letters().find(|&l| !self.alphabet.contains(l)) {
            Some(l) => Err(Error::Input(format!(
                "letter index {l} is not in the alphabet"
            ))),
            None => Ok(()),
        }
    }

    /// Does the automaton accept `stem · period^ω`?
    ///
    /// Searches the product of base positions and states for a reachable
    /// cycle whose highest color is even.
    pub fn accepts_lasso(&self, w: &Lasso) -> Result<bool> {
        self.check_word(w)?;
        Ok(self.accepts_unchecked(w))
    }

    pub(crate) fn accepts_unchecked(&self, w: &Lasso) -> bool {
        let n = w.len();
        let q = self.num_states();
        let base = w.base();
        let node = |pos: usize, s: StateId| pos * q + s;
        let mut adj = vec![Vec::new(); n * q];
        let mut colors = vec![0; n * q];
        for pos in 0..n {
            let next = w.next_pos(pos);
            for s in 0..q {
                colors[node(pos, s)] = self.colors[s];
                adj[node(pos, s)] = self.delta[s][base[pos]]
                    .iter()
                    .map(|&t| node(next, t))
                    .collect();
            }
        }
        let sources: Vec<usize> = self.initial.iter().map(|&s| node(0, s)).collect();
        graph::max_even_cycle(&adj, &colors, &sources).is_some()
    }

    fn state_graph(&self) -> Vec<Vec<usize>> {
        self.delta
            .iter()
            .map(|row| {
                let mut succ: Vec<usize> = row.iter().flatten().copied().collect();
                succ.sort_unstable();
                succ.dedup();
                succ
            })
            .collect()
    }

    fn letter_between(&self, from: StateId, to: StateId) -> Letter {
        (0..self.alphabet.len())
            .find(|&a| self.delta[from][a].contains(&to))
            .expect("edge exists in the state graph")
    }

    /// Emptiness with a witness of base length at most `|A|`.
    pub fn is_empty(&self) -> Emptiness {
        let adj = self.state_graph();
        let Some(accepting) = graph::max_even_cycle(&adj, &self.colors, &self.initial) else {
            return Emptiness::Empty;
        };
        let bound = self.colors[accepting];
        let low: Vec<bool> = self.colors.iter().map(|&c| c <= bound).collect();
        // shortest cycle through `accepting` inside the low subgraph
        let back = graph::shortest_path(
            &adj,
            &adj[accepting]
                .iter()
                .copied()
                .filter(|&s| low[s])
                .collect::<Vec<_>>(),
            &low,
            |v| v == accepting,
        )
        .expect("accepting node lies on a cycle");
        let mut cycle = vec![accepting];
        cycle.extend_from_slice(&back[..back.len() - 1]);
        // shortest path from an initial state into the cycle
        let all = vec![true; self.num_states()];
        let stem_path = graph::shortest_path(&adj, &self.initial, &all, |v| cycle.contains(&v))
            .expect("accepting cycle is reachable");
        let entry = *stem_path.last().unwrap();
        let rot = cycle.iter().position(|&s| s == entry).unwrap();
        cycle.rotate_left(rot);

        let mut states = stem_path[..stem_path.len() - 1].to_vec();
        let loop_start = states.len();
        states.extend_from_slice(&cycle);
        let run = RunLasso { states, loop_start };
        let len = run.states.len();
        let letters: Vec<Letter> = (0..len)
            .map(|i| {
                let to = if i + 1 < len {
                    run.states[i + 1]
                } else {
                    run.states[loop_start]
                };
                self.letter_between(run.states[i], to)
            })
            .collect();
        let word = Lasso::from_base(&letters, loop_start).expect("cycle is non-empty");
        Emptiness::NonEmpty { run, word }
    }

    /// Adds a rejecting sink so every state has a successor on every letter.
    pub fn complete_with_sink(&self) -> ParityAutomaton {
        if self.is_complete() {
            return self.clone();
        }
        let mut out = self.clone();
        let mut name = String::from("sink");
        while out.names.contains(&name) {
            name.push('\'');
        }
        let sink = out.names.len();
        out.names.push(name);
        // odd and above everything that could share a cycle with it: only itself
        out.colors.push(1);
        out.delta.push(vec![vec![sink]; self.alphabet.len()]);
        for row in out.delta.iter_mut() {
            for t in row.iter_mut() {
                if t.is_empty() {
                    t.push(sink);
                }
            }
        }
        out.colors = normalize_colors(&out.colors);
        out
    }

    /// Complement of a complete deterministic automaton: every color + 1.
    pub fn complement_dpa(&self) -> Result<ParityAutomaton> {
        if !self.is_deterministic() {
            return Err(Error::Contract(
                "complementation needs a deterministic automaton".into(),
            ));
        }
        if !self.is_complete() {
            return Err(Error::Contract(
                "complementation needs a complete automaton; apply complete_with_sink first".into(),
            ));
        }
        let mut out = self.clone();
        out.colors = normalize_colors(&self.colors.iter().map(|c| c + 1).collect::<Vec<_>>());
        Ok(out)
    }

    /// `L(safety) ∩ L(other)`, explored from the initial pairs.
    pub fn product_safety(
        safety: &ParityAutomaton,
        other: &ParityAutomaton,
    ) -> Result<ParityAutomaton> {
        if !safety.is_safety() {
            return Err(Error::Contract(
                "left operand of product_safety must be a safety automaton".into(),
            ));
        }
        if safety.alphabet != other.alphabet {
            return Err(Error::Contract(
                "product operands use different alphabets".into(),
            ));
        }
        let mut b = AutomatonBuilder::new(other.alphabet.clone());
        let mut ids: HashMap<(StateId, StateId), StateId> = HashMap::new();
        let mut work = Vec::new();
        let mut intern = |b: &mut AutomatonBuilder,
                          work: &mut Vec<(StateId, StateId)>,
                          p: (StateId, StateId)| {
            *ids.entry(p).or_insert_with(|| {
                work.push(p);
                b.add_state(
                    format!("({},{})", safety.names[p.0], other.names[p.1]),
                    other.colors[p.1],
                )
            })
        };
        for &s in &safety.initial {
            for &a in &other.initial {
                let id = intern(&mut b, &mut work, (s, a));
                b.set_initial(id);
            }
        }
        while let Some((s, a)) = work.pop() {
            let from = intern(&mut b, &mut work, (s, a));
            for letter in 0..other.alphabet.len() {
                for &s2 in &safety.delta[s][letter] {
                    for &a2 in &other.delta[a][letter] {
                        let to = intern(&mut b, &mut work, (s2, a2));
                        b.add_transition(from, letter, to);
                    }
                }
            }
        }
        b.build()
    }

    /// Exact `L(safety) ⊆ L(reference)` for a deterministic reference.
    pub fn check_inclusion_exact(
        safety: &ParityAutomaton,
        reference: &ParityAutomaton,
    ) -> Result<Inclusion> {
        if !safety.is_safety() {
            return Err(Error::Contract(
                "inclusion check needs a safety automaton on the left".into(),
            ));
        }
        if !reference.is_deterministic() {
            return Err(Error::Contract(
                "inclusion check needs a deterministic reference".into(),
            ));
        }
        let complement = reference.complete_with_sink().complement_dpa()?;
        let product = ParityAutomaton::product_safety(safety, &complement)?;
        Ok(match product.is_empty() {
            Emptiness::Empty => Inclusion {
                holds: true,
                counterexample: None,
            },
            Emptiness::NonEmpty { word, .. } => Inclusion {
                holds: false,
                counterexample: Some(word),
            },
        })
    }

    /// Keeps only states reachable from the initial states.
    pub fn trim(&self) -> ParityAutomaton {
        let reach = graph::reachable(&self.state_graph(), &self.initial);
        let keep: Vec<StateId> = (0..self.num_states()).filter(|&q| reach[q]).collect();
        let mut remap = vec![usize::MAX; self.num_states()];
        for (i, &q) in keep.iter().enumerate() {
            remap[q] = i;
        }
        ParityAutomaton {
            alphabet: self.alphabet.clone(),
            names: keep.iter().map(|&q| self.names[q].clone()).collect(),
            initial: self.initial.iter().map(|&q| remap[q]).collect(),
            delta: keep
                .iter()
                .map(|&q| {
                    self.delta[q]
                        .iter()
                        .map(|t| t.iter().map(|&s| remap[s]).collect())
                        .collect()
                })
                .collect(),
            colors: normalize_colors(&keep.iter().map(|&q| self.colors[q]).collect::<Vec<_>>()),
        }
    }

    /// Copy with one transition removed.
    pub fn without_transition(
        &self,
        from: StateId,
        letter: Letter,
        to: StateId,
    ) -> ParityAutomaton {
        let mut out = self.clone();
        out.delta[from][letter].retain(|&t| t != to);
        out
    }

    /// Copy with the given coloring (normalized).
    pub fn with_colors(&self, colors: Vec<Color>) -> Result<ParityAutomaton> {
        ParityAutomaton::new(
            self.alphabet.clone(),
            self.names.clone(),
            self.initial.clone(),
            self.delta.clone(),
            colors,
        )
    }

    /// Plain graph description in DOT syntax.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph automaton {\n  rankdir=LR;\n");
        for q in 0..self.num_states() {
            out.push_str(&format!(
                "  s{q} [label=\"{} / {}\"{}];\n",
                self.names[q].replace('"', "\\\""),
                self.colors[q],
                if self.initial.contains(&q) {
                    ", shape=doublecircle"
                } else {
                    ""
                }
            ));
        }
        for q in 0..self.num_states() {
            for a in 0..self.alphabet.len() {
                for &t in &self.delta[q][a] {
                    out.push_str(&format!(
                        "  s{q} -> s{t} [label=\"{}\"];\n",
                        self.alphabet.name(a).replace('"', "\\\"")
                    ));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin() -> Alphabet {
        Alphabet::numeric(2)
    }

    /// Deterministic Büchi automaton for "infinitely many 1s".
    fn gf1() -> ParityAutomaton {
        let mut b = AutomatonBuilder::new(bin());
        let z = b.add_state("z", 1);
        let o = b.add_state("o", 2);
        b.set_initial(z);
        for s in [z, o] {
            b.add_transition(s, 0, z).add_transition(s, 1, o);
        }
        b.build().unwrap()
    }

    fn lasso(stem: &str, period: &str) -> Lasso {
        Lasso::parse(&bin(), stem, period).unwrap()
    }

    #[test]
    fn normalization_merges_same_parity() {
        assert_eq!(normalize_colors(&[1, 2]), vec![1, 2]);
        assert_eq!(normalize_colors(&[2, 2]), vec![0, 0]);
        assert_eq!(normalize_colors(&[1, 3, 4, 7]), vec![1, 1, 2, 3]);
        assert_eq!(normalize_colors(&[0, 2, 5]), vec![0, 0, 1]);
    }

    #[test]
    fn acceptance_examples() {
        let a = gf1();
        assert!(a.accepts_lasso(&lasso("", "1")).unwrap());
        assert!(!a.accepts_lasso(&lasso("1", "0")).unwrap());
        assert!(a.accepts_lasso(&lasso("000", "01")).unwrap());
        assert!(a
            .accepts_lasso(&Lasso::new(vec![], vec![5]).unwrap())
            .is_err());
    }

    #[test]
    fn emptiness_examples() {
        match gf1().is_empty() {
            Emptiness::NonEmpty { word, run } => {
                assert!(word.same_word(&lasso("", "1")));
                assert!(word.len() <= 2);
                assert_eq!(run.states.len(), word.len());
            }
            Emptiness::Empty => panic!("gf1 is not empty"),
        }
        let mut b = AutomatonBuilder::new(bin());
        let s = b.add_state("s", 0);
        b.set_initial(s);
        assert!(b.build().unwrap().is_empty().is_empty());
    }

    #[test]
    fn complement_of_universal_is_empty() {
        let mut b = AutomatonBuilder::new(bin());
        let s = b.add_state("s", 0);
        b.set_initial(s);
        b.add_transition(s, 0, s).add_transition(s, 1, s);
        let a = b.build().unwrap();
        let c = a.complement_dpa().unwrap();
        assert_eq!(c.colors(), &[1]);
        assert!(c.is_empty().is_empty());
    }

    #[test]
    fn complement_rejects_nondeterminism() {
        let mut b = AutomatonBuilder::new(bin());
        let s = b.add_state("s", 0);
        let t = b.add_state("t", 0);
        b.set_initial(s);
        for l in 0..2 {
            b.add_transition(s, l, s)
                .add_transition(s, l, t)
                .add_transition(t, l, t);
        }
        let a = b.build().unwrap();
        assert!(matches!(a.complement_dpa(), Err(Error::Contract(_))));
        assert!(matches!(
            gf1().without_transition(0, 0, 0).complement_dpa(),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn sink_completion_is_rejecting() {
        let a = gf1().without_transition(1, 0, 0);
        let c = a.complete_with_sink();
        assert!(c.is_complete());
        assert_eq!(c.num_states(), 3);
        assert!(!c.accepts_lasso(&lasso("10", "1")).unwrap());
        assert!(c.accepts_lasso(&lasso("", "1")).unwrap());
    }

    #[test]
    fn product_with_empty_safety_is_empty() {
        let mut b = AutomatonBuilder::new(bin());
        let s = b.add_state("s", 0);
        b.set_initial(s);
        let safety = b.build().unwrap();
        let p = ParityAutomaton::product_safety(&safety, &gf1()).unwrap();
        assert!(p.is_empty().is_empty());
        assert!(ParityAutomaton::product_safety(&gf1(), &safety).is_err());
        let inc = ParityAutomaton::check_inclusion_exact(&safety, &gf1()).unwrap();
        assert!(inc.holds);
    }

    #[test]
    fn inclusion_fails_for_universal_safety() {
        let mut b = AutomatonBuilder::new(bin());
        let s = b.add_state("s", 0);
        b.set_initial(s);
        b.add_transition(s, 0, s).add_transition(s, 1, s);
        let universal = b.build().unwrap();
        let inc = ParityAutomaton::check_inclusion_exact(&universal, &gf1()).unwrap();
        assert!(!inc.holds);
        let w = inc.counterexample.unwrap();
        assert!(!gf1().accepts_lasso(&w).unwrap());
    }

    #[test]
    fn run_minimization() {
        let r = RunLasso {
            states: vec![0, 1, 2, 1, 2],
            loop_start: 1,
        };
        assert_eq!(
            r.minimize(),
            RunLasso {
                states: vec![0, 1, 2],
                loop_start: 1
            }
        );
        let r = RunLasso {
            states: vec![3, 3, 3],
            loop_start: 2,
        };
        assert_eq!(r.minimize().states, vec![3]);
    }

    #[test]
    fn trim_drops_unreachable() {
        let mut b = AutomatonBuilder::new(bin());
        let s = b.add_state("s", 0);
        b.add_state("dead", 3);
        b.set_initial(s);
        b.add_transition(s, 0, s);
        let a = b.build().unwrap().trim();
        assert_eq!(a.num_states(), 1);
        assert!(a.is_safety());
    }
}
