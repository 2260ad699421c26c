//! Reader and writer for a subset of the HOA v1 format.
//!
//! Supported: `HOA:`, `States:`, `Start:`, `AP:`, the `Alphabet:` extension
//! for alphabets that are not `2^AP`, `acc-name:` (`parity max even`,
//! `Buchi`, `all`), `Acceptance:`, `Alias:` (single level), state-based
//! acceptance marks, explicit and implicit edge labels. Transition-based
//! acceptance, alternation and alias chains are rejected.
//!
//! With the `Alphabet:` extension an edge label is a disjunction of letter
//! indices, e.g. `[0 | 2]`.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::automaton::{AutomatonBuilder, Color, ParityAutomaton};
use crate::error::{Error, Result};
use crate::ltl::ApLetterMap;
use crate::word::Alphabet;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Header(String),
    Ident(String),
    Str(String),
    Int(u64),
    Sym(char),
    BodyStart,
    BodyEnd,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    let bump = |c: char, line: &mut usize, col: &mut usize| {
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c.is_whitespace() {
            bump(c, &mut line, &mut col);
            i += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let mut depth = 0;
            loop {
                if i + 1 >= chars.len() {
                    return Err(Error::parse(l0, c0, "unterminated comment"));
                }
                if chars[i] == '/' && chars[i + 1] == '*' {
                    depth += 1;
                    bump(chars[i], &mut line, &mut col);
                    bump(chars[i + 1], &mut line, &mut col);
                    i += 2;
                } else if chars[i] == '*' && chars[i + 1] == '/' {
                    depth -= 1;
                    bump(chars[i], &mut line, &mut col);
                    bump(chars[i + 1], &mut line, &mut col);
                    i += 2;
                    if depth == 0 {
                        break;
                    }
                } else {
                    bump(chars[i], &mut line, &mut col);
                    i += 1;
                }
            }
            continue;
        }
        let push = |out: &mut Vec<Spanned>, tok| {
            out.push(Spanned {
                tok,
                line: l0,
                col: c0,
            })
        };
        if c == '"' {
            let mut s = String::new();
            i += 1;
            col += 1;
            loop {
                let Some(&d) = chars.get(i) else {
                    return Err(Error::parse(l0, c0, "unterminated string"));
                };
                bump(d, &mut line, &mut col);
                i += 1;
                match d {
                    '"' => break,
                    '\\' => {
                        if let Some(&e) = chars.get(i) {
                            s.push(e);
                            bump(e, &mut line, &mut col);
                            i += 1;
                        }
                    }
                    _ => s.push(d),
                }
            }
            push(&mut out, Tok::Str(s));
            continue;
        }
        if c == '-' && chars[i..].starts_with(&['-', '-', 'B', 'O', 'D', 'Y', '-', '-']) {
            push(&mut out, Tok::BodyStart);
            i += 8;
            col += 8;
            continue;
        }
        if c == '-' && chars[i..].starts_with(&['-', '-', 'E', 'N', 'D', '-', '-']) {
            push(&mut out, Tok::BodyEnd);
            i += 7;
            col += 7;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            let v = s
                .parse()
                .map_err(|_| Error::parse(l0, c0, "integer out of range"))?;
            col += j - i;
            i = j;
            push(&mut out, Tok::Int(v));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' || c == '@' {
            let mut j = i + 1;
            while j < chars.len()
                && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '-')
            {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            col += j - i;
            i = j;
            if chars.get(i) == Some(&':') && c != '@' {
                i += 1;
                col += 1;
                push(&mut out, Tok::Header(s));
            } else {
                push(&mut out, Tok::Ident(s));
            }
            continue;
        }
        if "[]{}()!&|".contains(c) {
            push(&mut out, Tok::Sym(c));
            i += 1;
            col += 1;
            continue;
        }
        return Err(Error::parse(l0, c0, format!("unexpected character {c:?}")));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Label {
    True,
    False,
    Var(usize),
    Not(Box<Label>),
    And(Vec<Label>),
    Or(Vec<Label>),
}

impl Label {
    fn eval(&self, value: &dyn Fn(usize) -> bool) -> bool {
        match self {
            Label::True => true,
            Label::False => false,
            Label::Var(i) => value(*i),
            Label::Not(l) => !l.eval(value),
            Label::And(ls) => ls.iter().all(|l| l.eval(value)),
            Label::Or(ls) => ls.iter().any(|l| l.eval(value)),
        }
    }
}

struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos).or(self.toks.last()) {
            Some(s) => (s.line, s.col),
            None => (1, 1),
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (l, c) = self.here();
        Err(Error::parse(l, c, msg))
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn int(&mut self) -> Result<u64> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(v)
            }
            _ => self.err("expected an integer"),
        }
    }

    fn sym(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn at_value(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Ident(_) | Tok::Str(_) | Tok::Int(_) | Tok::Sym(_))
        )
    }

    fn label(&mut self, aliases: &HashMap<String, Label>, in_alias: bool) -> Result<Label> {
        let mut terms = vec![self.label_and(aliases, in_alias)?];
        while self.peek() == Some(&Tok::Sym('|')) {
            self.pos += 1;
            terms.push(self.label_and(aliases, in_alias)?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Label::Or(terms)
        })
    }

    fn label_and(&mut self, aliases: &HashMap<String, Label>, in_alias: bool) -> Result<Label> {
        let mut terms = vec![self.label_atom(aliases, in_alias)?];
        while self.peek() == Some(&Tok::Sym('&')) {
            self.pos += 1;
            terms.push(self.label_atom(aliases, in_alias)?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Label::And(terms)
        })
    }

    fn label_atom(&mut self, aliases: &HashMap<String, Label>, in_alias: bool) -> Result<Label> {
        match self.peek().cloned() {
            Some(Tok::Sym('!')) => {
                self.pos += 1;
                Ok(Label::Not(Box::new(self.label_atom(aliases, in_alias)?)))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let l = self.label(aliases, in_alias)?;
                self.sym(')')?;
                Ok(l)
            }
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(Label::Var(v as usize))
            }
            Some(Tok::Ident(s)) if s == "t" => {
                self.pos += 1;
                Ok(Label::True)
            }
            Some(Tok::Ident(s)) if s == "f" => {
                self.pos += 1;
                Ok(Label::False)
            }
            Some(Tok::Ident(s)) if s.starts_with('@') => {
                if in_alias {
                    return self.err(format!(
                        "alias chains are not supported (alias {s} used inside an alias)"
                    ));
                }
                self.pos += 1;
                aliases
                    .get(&s)
                    .cloned()
                    .ok_or(())
                    .or_else(|_| self.err(format!("undefined alias {s}")))
            }
            _ => self.err("expected a label expression"),
        }
    }
}

enum AccKind {
    Parity(u64),
    Buchi,
    All,
}

fn parity_condition(sets: u64) -> String {
    fn rec(c: u64) -> String {
        if c == 0 {
            return "Inf(0)".into();
        }
        let inner = rec(c - 1);
        let inner = if c - 1 == 0 {
            inner
        } else {
            format!("({inner})")
        };
        if c.is_multiple_of(2) {
            format!("Inf({c}) | {inner}")
        } else {
            format!("Fin({c}) & {inner}")
        }
    }
    if sets == 0 {
        return "f".into();
    }
    rec(sets - 1)
}

fn squash(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Parses an automaton in the supported HOA subset.
pub fn parse_hoa(text: &str) -> Result<ParityAutomaton> {
    let mut cur = Cursor {
        toks: lex(text)?,
        pos: 0,
    };
    let mut states: Option<usize> = None;
    let mut start: Vec<usize> = Vec::new();
    let mut aps: Option<Vec<String>> = None;
    let mut explicit: Option<Vec<String>> = None;
    let mut acc_name: Option<Vec<String>> = None;
    let mut acceptance: Option<(u64, String)> = None;
    let mut aliases: HashMap<String, Label> = HashMap::new();
    let mut seen_hoa = false;

    loop {
        let (l, c) = cur.here();
        match cur.next() {
            Some(Tok::BodyStart) => break,
            Some(Tok::Header(h)) => match h.as_str() {
                "HOA" => {
                    match cur.next() {
                        Some(Tok::Ident(v)) if v == "v1" => {}
                        _ => return Err(Error::parse(l, c, "only HOA v1 is supported")),
                    }
                    seen_hoa = true;
                }
                "States" => states = Some(cur.int()? as usize),
                "Start" => {
                    start.push(cur.int()? as usize);
                    if cur.peek() == Some(&Tok::Sym('&')) {
                        return cur
                            .err("alternating initial states (Start with '&') are not supported");
                    }
                }
                "AP" | "Alphabet" => {
                    let count = cur.int()? as usize;
                    let mut names = Vec::new();
                    for _ in 0..count {
                        match cur.next() {
                            Some(Tok::Str(s)) => names.push(s),
                            _ => {
                                return Err(Error::parse(
                                    l,
                                    c,
                                    format!("{h}: expected {count} quoted names"),
                                ))
                            }
                        }
                    }
                    if h == "AP" {
                        aps = Some(names);
                    } else {
                        explicit = Some(names);
                    }
                }
                "acc-name" => {
                    let mut parts = Vec::new();
                    while let Some(Tok::Ident(_) | Tok::Int(_)) = cur.peek() {
                        parts.push(match cur.next() {
                            Some(Tok::Ident(s)) => s,
                            Some(Tok::Int(v)) => v.to_string(),
                            _ => unreachable!(),
                        });
                    }
                    acc_name = Some(parts);
                }
                "Acceptance" => {
                    let sets = cur.int()?;
                    let mut cond = String::new();
                    while cur.at_value() {
                        match cur.next() {
                            Some(Tok::Ident(s)) => cond.push_str(&s),
                            Some(Tok::Int(v)) => cond.push_str(&v.to_string()),
                            Some(Tok::Sym(ch)) => cond.push(ch),
                            Some(Tok::Str(s)) => cond.push_str(&s),
                            _ => unreachable!(),
                        }
                    }
                    acceptance = Some((sets, cond));
                }
                "Alias" => {
                    let name = match cur.next() {
                        Some(Tok::Ident(s)) if s.starts_with('@') => s,
                        _ => return Err(Error::parse(l, c, "Alias: expected @name")),
                    };
                    let label = cur.label(&aliases, true)?;
                    aliases.insert(name, label);
                }
                other => {
                    if other
                        .chars()
                        .next()
                        .is_some_and(|ch| ch.is_ascii_uppercase())
                    {
                        return Err(Error::parse(
                            l,
                            c,
                            format!("unsupported header item {other}:"),
                        ));
                    }
                    while cur.at_value() {
                        cur.next();
                    }
                }
            },
            Some(_) => return Err(Error::parse(l, c, "expected a header item")),
            None => return Err(Error::parse(l, c, "missing --BODY--")),
        }
    }
    if !seen_hoa {
        return Err(Error::parse(1, 1, "missing HOA: v1 header"));
    }

    let acc = match (&acc_name, &acceptance) {
        (Some(name), _) => {
            let name: Vec<&str> = name.iter().map(String::as_str).collect();
            match name.as_slice() {
                ["parity", "max", "even", k] => AccKind::Parity(
                    k.parse()
                        .map_err(|_| Error::parse(1, 1, "bad parity size"))?,
                ),
                ["Buchi"] => AccKind::Buchi,
                ["all"] => AccKind::All,
                _ => {
                    return Err(Error::parse(
                        1,
                        1,
                        format!("unsupported acc-name: {}", name.join(" ")),
                    ))
                }
            }
        }
        (None, Some((0, cond))) if squash(cond) == "t" => AccKind::All,
        (None, Some((1, cond))) if squash(cond) == "Inf(0)" => AccKind::Buchi,
        (None, Some((k, cond))) if squash(cond) == squash(&parity_condition(*k)) => {
            AccKind::Parity(*k)
        }
        _ => {
            return Err(Error::parse(
                1,
                1,
                "unsupported or missing acceptance condition",
            ))
        }
    };
    if let (Some((sets, _)), AccKind::Parity(k)) = (&acceptance, &acc) {
        if sets != k {
            return Err(Error::parse(
                1,
                1,
                format!("acc-name declares {k} sets but Acceptance: has {sets}"),
            ));
        }
    }

    let (alphabet, ap_count) = match (&aps, &explicit) {
        (_, Some(names)) => (Alphabet::new(names.clone())?, None),
        (Some(names), None) => {
            let map = ApLetterMap::new(names.clone())?;
            (map.alphabet().clone(), Some(names.len()))
        }
        (None, None) => return Err(Error::parse(1, 1, "missing AP: or Alphabet: header")),
    };
    let letter_matches = |label: &Label, letter: usize| -> bool {
        match ap_count {
            Some(_) => label.eval(&|ap| letter >> ap & 1 == 1),
            None => label.eval(&|i| i == letter),
        }
    };

    let mut names: Vec<Option<String>> = Vec::new();
    let mut colors: Vec<Option<Color>> = Vec::new();
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let color_of = |sets: &[u64], cur: &Cursor| -> Result<Color> {
        Ok(match acc {
            AccKind::All => 0,
            AccKind::Buchi => {
                if sets.contains(&0) {
                    2
                } else {
                    1
                }
            }
            AccKind::Parity(k) => match sets {
                [] => 1,
                [c] if *c < k => *c as Color + 2,
                _ => return cur.err("a state must carry at most one declared parity set"),
            },
        })
    };

    loop {
        match cur.next() {
            Some(Tok::BodyEnd) => break,
            Some(Tok::Header(h)) if h == "State" => {
                let state_label = if cur.peek() == Some(&Tok::Sym('[')) {
                    cur.pos += 1;
                    let l = cur.label(&aliases, false)?;
                    cur.sym(']')?;
                    Some(l)
                } else {
                    None
                };
                let q = cur.int()? as usize;
                if q >= names.len() {
                    names.resize(q + 1, None);
                    colors.resize(q + 1, None);
                }
                if let Some(Tok::Str(s)) = cur.peek().cloned() {
                    cur.pos += 1;
                    names[q] = Some(s);
                }
                let mut sets = Vec::new();
                if cur.peek() == Some(&Tok::Sym('{')) {
                    cur.pos += 1;
                    while let Some(Tok::Int(v)) = cur.peek() {
                        sets.push(*v);
                        cur.pos += 1;
                    }
                    cur.sym('}')?;
                }
                colors[q] = Some(color_of(&sets, &cur)?);
                let mut implicit = 0usize;
                loop {
                    let label = match cur.peek() {
                        Some(Tok::Sym('[')) => {
                            if state_label.is_some() {
                                return cur.err("edge labels are not allowed on a labeled state");
                            }
                            cur.pos += 1;
                            let l = cur.label(&aliases, false)?;
                            cur.sym(']')?;
                            Some(l)
                        }
                        Some(Tok::Int(_)) => None,
                        _ => break,
                    };
                    let target = cur.int()? as usize;
                    if cur.peek() == Some(&Tok::Sym('&')) {
                        return cur.err("universal branching is not supported");
                    }
                    if cur.peek() == Some(&Tok::Sym('{')) {
                        return cur.err(
                            "transition-based acceptance is not supported; use state-based marks",
                        );
                    }
                    match label.or_else(|| state_label.clone()) {
                        Some(l) => {
                            for a in 0..alphabet.len() {
                                if letter_matches(&l, a) {
                                    edges.push((q, a, target));
                                }
                            }
                        }
                        None => {
                            if ap_count.is_some_and(|k| k > 26) {
                                return cur.err("implicit labels with more than 26 propositions are not supported");
                            }
                            if implicit >= alphabet.len() {
                                return cur.err("more implicit edges than letters");
                            }
                            edges.push((q, implicit, target));
                            implicit += 1;
                        }
                    }
                }
            }
            _ => return cur.err("expected State: or --END--"),
        }
    }

    let n = states.unwrap_or(names.len()).max(names.len());
    if let Some(&(_, _, t)) = edges.iter().find(|e| e.2 >= n) {
        return Err(Error::parse(
            1,
            1,
            format!("edge target {t} exceeds the declared state count {n}"),
        ));
    }
    if start.is_empty() {
        return Err(Error::parse(1, 1, "missing Start: header"));
    }
    names.resize(n, None);
    colors.resize(n, None);
    let mut used: HashMap<String, usize> = HashMap::new();
    let mut b = AutomatonBuilder::new(alphabet);
    for q in 0..n {
        let mut name = names[q].clone().unwrap_or_else(|| q.to_string());
        if used.contains_key(&name) {
            name = format!("{name}#{q}");
        }
        used.insert(name.clone(), q);
        let default = match acc {
            AccKind::All => 0,
            _ => 1,
        };
        b.add_state(name, colors[q].unwrap_or(default));
    }
    for &s in &start {
        if s >= n {
            return Err(Error::parse(
                1,
                1,
                format!("start state {s} exceeds the declared state count"),
            ));
        }
        b.set_initial(s);
    }
    for (q, a, t) in edges {
        b.add_transition(q, a, t);
    }
    b.build()
}

/// Serializes an automaton. `meta` entries become header comments.
pub fn write_hoa(a: &ParityAutomaton, name: Option<&str>, meta: &[(String, String)]) -> String {
    let mut out = String::from("HOA: v1\n");
    for (k, v) in meta {
        let _ = writeln!(out, "/* {k}: {} */", v.replace("*/", "* /"));
    }
    if let Some(name) = name {
        let _ = writeln!(out, "name: \"{}\"", escape(name));
    }
    let _ = writeln!(out, "States: {}", a.num_states());
    for &q in a.initial() {
        let _ = writeln!(out, "Start: {q}");
    }
    let aps = ap_names(a.alphabet());
    match &aps {
        Some(aps) => {
            let _ = write!(out, "AP: {}", aps.len());
            for ap in aps {
                let _ = write!(out, " \"{}\"", escape(ap));
            }
            out.push('\n');
        }
        None => {
            let _ = write!(out, "Alphabet: {}", a.alphabet().len());
            for l in a.alphabet().letters() {
                let _ = write!(out, " \"{}\"", escape(l));
            }
            out.push('\n');
        }
    }
    let mark = |q: usize| -> Option<u32> {
        if a.is_safety() {
            None
        } else if a.is_buchi() {
            (a.color(q) == 2).then_some(0)
        } else {
            Some(a.color(q))
        }
    };
    if a.is_safety() {
        out.push_str("acc-name: all\nAcceptance: 0 t\n");
    } else if a.is_buchi() {
        out.push_str("acc-name: Buchi\nAcceptance: 1 Inf(0)\n");
    } else {
        let k = a.max_color() as u64 + 1;
        let _ = writeln!(
            out,
            "acc-name: parity max even {k}\nAcceptance: {k} {}",
            parity_condition(k)
        );
    }
    out.push_str("properties: state-acc");
    if a.is_deterministic() {
        out.push_str(" deterministic");
    }
    out.push_str("\n--BODY--\n");
    for q in 0..a.num_states() {
        let _ = write!(out, "State: {q} \"{}\"", escape(a.state_name(q)));
        if let Some(m) = mark(q) {
            let _ = write!(out, " {{{m}}}");
        }
        out.push('\n');
        let mut by_target: Vec<(usize, Vec<usize>)> = Vec::new();
        for l in 0..a.alphabet().len() {
            for &t in a.successors(q, l) {
                match by_target.iter_mut().find(|(x, _)| *x == t) {
                    Some((_, ls)) => ls.push(l),
                    None => by_target.push((t, vec![l])),
                }
            }
        }
        for (t, letters) in by_target {
            let label = if letters.len() == a.alphabet().len() {
                "t".to_string()
            } else {
                match &aps {
                    Some(aps) => letters
                        .iter()
                        .map(|&l| cube(l, aps.len()))
                        .collect::<Vec<_>>()
                        .join(" | "),
                    None => letters
                        .iter()
                        .map(|l| l.to_string())
                        .collect::<Vec<_>>()
                        .join(" | "),
                }
            };
            let _ = writeln!(out, "[{label}] {t}");
        }
    }
    out.push_str("--END--\n");
    out
}

fn cube(letter: usize, aps: usize) -> String {
    if aps == 0 {
        return "t".into();
    }
    let lits: Vec<String> = (0..aps)
        .map(|j| {
            if letter >> j & 1 == 1 {
                j.to_string()
            } else {
                format!("!{j}")
            }
        })
        .collect();
    let s = lits.join("&");
    if aps > 1 {
        format!("({s})")
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Recovers the AP list when the alphabet is exactly `2^AP` in canonical order.
pub fn ap_names(alphabet: &Alphabet) -> Option<Vec<String>> {
    let n = alphabet.len();
    if !n.is_power_of_two() {
        return None;
    }
    let k = n.trailing_zeros() as usize;
    let mut aps = Vec::with_capacity(k);
    for j in 0..k {
        let name = alphabet.name(1 << j);
        let inner = name.strip_prefix('{')?.strip_suffix('}')?;
        if inner.is_empty() || inner.contains(',') {
            return None;
        }
        aps.push(inner.to_string());
    }
    let map = ApLetterMap::new(aps.clone()).ok()?;
    (map.alphabet() == alphabet).then_some(aps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lasso::enumerate_bases_up_to;

    const GF1: &str = r#"HOA: v1
States: 2
Start: 0
AP: 1 "p"
acc-name: Buchi
Acceptance: 1 Inf(0)
--BODY--
State: 0
[!0] 0
[0] 1
State: 1 {0}
[!0] 0
[0] 1
--END--
"#;

    #[test]
    fn reads_buchi() {
        let a = parse_hoa(GF1).unwrap();
        assert_eq!(a.num_states(), 2);
        assert!(a.is_buchi());
        assert!(a.is_deterministic());
        assert_eq!(
            a.alphabet().letters(),
            &["{}".to_string(), "{p}".to_string()]
        );
    }

    #[test]
    fn round_trip_preserves_lassos() {
        let a = parse_hoa(GF1).unwrap();
        let text = write_hoa(&a, Some("gf"), &[("bound".into(), "3".into())]);
        let b = parse_hoa(&text).unwrap();
        for w in enumerate_bases_up_to(a.alphabet(), 4).unwrap() {
            assert_eq!(a.accepts_lasso(&w).unwrap(), b.accepts_lasso(&w).unwrap());
        }
        assert_eq!(a.state_names(), b.state_names());
    }

    #[test]
    fn implicit_labels_and_parity() {
        let text = r#"HOA: v1
States: 1
Start: 0
AP: 1 "p"
acc-name: parity max even 3
Acceptance: 3 Inf(2) | (Fin(1) & Inf(0))
--BODY--
State: 0 {1}
0 0
--END--"#;
        let a = parse_hoa(text).unwrap();
        assert_eq!(a.successors(0, 0), &[0]);
        assert_eq!(a.successors(0, 1), &[0]);
        assert_eq!(a.color(0), 1);
    }

    #[test]
    fn explicit_alphabet_round_trip() {
        let text = r#"HOA: v1
States: 2
Start: 0
Alphabet: 3 "0" "1" "2"
acc-name: all
Acceptance: 0 t
--BODY--
State: 0 "a"
[0 | 2] 0
[1] 1
State: 1 "b"
--END--"#;
        let a = parse_hoa(text).unwrap();
        assert_eq!(a.successors(0, 2), &[0]);
        assert!(a.successors(1, 0).is_empty());
        let b = parse_hoa(&write_hoa(&a, None, &[])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_unsupported_features() {
        let trans_acc = GF1.replace("[0] 1\nState: 1 {0}", "[0] 1 {0}\nState: 1 {0}");
        let err = parse_hoa(&trans_acc).unwrap_err().to_string();
        assert!(err.contains("transition-based"), "{err}");

        let chain = GF1.replace("--BODY--", "Alias: @a 0\nAlias: @b @a\n--BODY--");
        let err = parse_hoa(&chain).unwrap_err().to_string();
        assert!(err.contains("alias chains"), "{err}");

        let rabin = GF1.replace(
            "acc-name: Buchi\nAcceptance: 1 Inf(0)",
            "acc-name: Rabin 1\nAcceptance: 2 Fin(0) & Inf(1)",
        );
        assert!(parse_hoa(&rabin).is_err());

        let many: Vec<String> = (0..27).map(|i| format!("\"a{i}\"")).collect();
        let wide = format!("HOA: v1\nStates: 1\nStart: 0\nAP: 27 {}\nacc-name: all\nAcceptance: 0 t\n--BODY--\nState: 0\n0\n--END--", many.join(" "));
        assert!(parse_hoa(&wide).is_err());
    }

    #[test]
    fn aliases_resolve() {
        let text = GF1
            .replace("--BODY--", "Alias: @p 0\n--BODY--")
            .replace("[0] 1", "[@p] 1");
        let a = parse_hoa(&text).unwrap();
        assert_eq!(a.successors(0, 1), &[1]);
    }

    #[test]
    fn parity_condition_strings() {
        assert_eq!(parity_condition(1), "Inf(0)");
        assert_eq!(parity_condition(3), "Inf(2) | (Fin(1) & Inf(0))");
    }
}
