//! Linear temporal logic: syntax, parsing and exact evaluation on lassos.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::lasso::MembershipOracle;
use crate::word::{Alphabet, Lasso, Letter};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LtlFormula {
    True,
    False,
    Atom(String),
    Not(Box<LtlFormula>),
    And(Box<LtlFormula>, Box<LtlFormula>),
    Or(Box<LtlFormula>, Box<LtlFormula>),
    Implies(Box<LtlFormula>, Box<LtlFormula>),
    Next(Box<LtlFormula>),
    Until(Box<LtlFormula>, Box<LtlFormula>),
    Release(Box<LtlFormula>, Box<LtlFormula>),
    Finally(Box<LtlFormula>),
    Globally(Box<LtlFormula>),
}

use LtlFormula as F;

impl LtlFormula {
    pub fn atom(name: &str) -> Self {
        F::Atom(name.to_string())
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Self) -> Self {
        F::Not(Box::new(f))
    }
    pub fn and(a: Self, b: Self) -> Self {
        F::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Self, b: Self) -> Self {
        F::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Self, b: Self) -> Self {
        F::Implies(Box::new(a), Box::new(b))
    }
    pub fn next(f: Self) -> Self {
        F::Next(Box::new(f))
    }
    pub fn until(a: Self, b: Self) -> Self {
        F::Until(Box::new(a), Box::new(b))
    }
    pub fn release(a: Self, b: Self) -> Self {
        F::Release(Box::new(a), Box::new(b))
    }
    pub fn finally(f: Self) -> Self {
        F::Finally(Box::new(f))
    }
    pub fn globally(f: Self) -> Self {
        F::Globally(Box::new(f))
    }

    pub fn children(&self) -> Vec<&LtlFormula> {
        match self {
            F::True | F::False | F::Atom(_) => vec![],
            F::Not(a) | F::Next(a) | F::Finally(a) | F::Globally(a) => vec![a],
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) | F::Until(a, b) | F::Release(a, b) => {
                vec![a, b]
            }
        }
    }

    /// Number of syntax-tree nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Atom names in order of first occurrence.
    pub fn atoms(&self) -> Vec<String> {
        fn walk(f: &LtlFormula, out: &mut Vec<String>) {
            if let F::Atom(a) = f {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
            for c in f.children() {
                walk(c, out);
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Subformulas in post-order, deduplicated; the formula itself is last.
    pub fn subformulas(&self) -> Vec<&LtlFormula> {
        fn walk<'a>(f: &'a LtlFormula, out: &mut Vec<&'a LtlFormula>) {
            for c in f.children() {
                walk(c, out);
            }
            if !out.contains(&f) {
                out.push(f);
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Exact truth value on `stem · period^ω`.
    ///
    /// Every subformula is evaluated at every base position; the last
    /// position's successor is the loop start. Until and release are solved
    /// by sweeping the base backwards twice.
    pub fn eval_on_lasso(&self, w: &Lasso, map: &ApLetterMap) -> Result<bool> {
        if let Some(l) = w.letters().find(|&l| l >= map.alphabet.len()) {
            return Err(Error::Input(format!(
                "letter index {l} is not in the alphabet"
            )));
        }
        for a in self.atoms() {
            if map.ap_index(&a).is_none() {
                return Err(Error::Input(format!(
                    "atom {a:?} is not a declared proposition"
                )));
            }
        }
        Ok(self.eval_unchecked(w, map))
    }

    pub(crate) fn eval_unchecked(&self, w: &Lasso, map: &ApLetterMap) -> bool {
        let subs = self.subformulas();
        let index: HashMap<&LtlFormula, usize> =
            subs.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let n = w.len();
        let base = w.base();
        let next = |i: usize| w.next_pos(i);
        let mut values: Vec<Vec<bool>> = Vec::with_capacity(subs.len());
        for f in &subs {
            let get = |g: &LtlFormula, values: &Vec<Vec<bool>>, i: usize| values[index[g]][i];
            let row: Vec<bool> = match f {
                F::True => vec![true; n],
                F::False => vec![false; n],
                F::Atom(a) => {
                    let ap = map.ap_index(a).expect("atoms checked");
                    base.iter().map(|&l| map.holds(l, ap)).collect()
                }
                F::Not(a) => (0..n).map(|i| !get(a, &values, i)).collect(),
                F::And(a, b) => (0..n)
                    .map(|i| get(a, &values, i) && get(b, &values, i))
                    .collect(),
                F::Or(a, b) => (0..n)
                    .map(|i| get(a, &values, i) || get(b, &values, i))
                    .collect(),
                F::Implies(a, b) => (0..n)
                    .map(|i| !get(a, &values, i) || get(b, &values, i))
                    .collect(),
                F::Next(a) => (0..n).map(|i| get(a, &values, next(i))).collect(),
                F::Until(_, b) | F::Release(_, b) | F::Finally(b) | F::Globally(b) => {
                    let least = matches!(f, F::Until(..) | F::Finally(_));
                    let guard: Vec<bool> = match f {
                        F::Until(a, _) | F::Release(a, _) => {
                            (0..n).map(|i| get(a, &values, i)).collect()
                        }
                        F::Finally(_) => vec![true; n],
                        _ => vec![false; n],
                    };
                    let goal: Vec<bool> = (0..n).map(|i| get(b, &values, i)).collect();
                    let mut row = vec![!least; n];
                    for _ in 0..2 {
                        for i in (0..n).rev() {
                            let later = row[next(i)];
                            row[i] = if least {
                                goal[i] || (guard[i] && later)
                            } else {
                                goal[i] && (guard[i] || later)
                            };
                        }
                    }
                    row
                }
            };
            values.push(row);
        }
        values.last().map(|r| r[0]).unwrap_or(true)
    }
}

fn prec(f: &LtlFormula) -> u8 {
    match f {
        F::Implies(..) => 1,
        F::Or(..) => 2,
        F::And(..) => 3,
        F::Until(..) | F::Release(..) => 4,
        F::Not(_) | F::Next(_) | F::Finally(_) | F::Globally(_) => 5,
        F::True | F::False | F::Atom(_) => 6,
    }
}

impl fmt::Display for LtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // operands are wrapped whenever they bind no tighter than the parent
        let wrap = |f: &mut fmt::Formatter<'_>, child: &LtlFormula, min: u8| {
            if prec(child) >= min {
                write!(f, "{child}")
            } else {
                write!(f, "({child})")
            }
        };
        match self {
            F::True => write!(f, "1"),
            F::False => write!(f, "0"),
            F::Atom(a) => write!(f, "{a}"),
            F::Not(a) | F::Next(a) | F::Finally(a) | F::Globally(a) => {
                let op = match self {
                    F::Not(_) => "!",
                    F::Next(_) => "X ",
                    F::Finally(_) => "F ",
                    _ => "G ",
                };
                write!(f, "{op}")?;
                wrap(f, a, 5)
            }
            F::And(a, b) | F::Or(a, b) => {
                let (op, p) = if matches!(self, F::And(..)) {
                    (" & ", 3)
                } else {
                    (" | ", 2)
                };
                wrap(f, a, p)?;
                write!(f, "{op}")?;
                wrap(f, b, p + 1)
            }
            F::Implies(a, b) => {
                wrap(f, a, 2)?;
                write!(f, " -> ")?;
                wrap(f, b, 1)
            }
            F::Until(a, b) | F::Release(a, b) => {
                wrap(f, a, 5)?;
                write!(
                    f,
                    " {} ",
                    if matches!(self, F::Until(..)) {
                        "U"
                    } else {
                        "R"
                    }
                )?;
                wrap(f, b, 4)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Const(bool),
    Not,
    And,
    Or,
    Implies,
    Next,
    Finally,
    Globally,
    Until,
    Release,
    LParen,
    RParen,
}

fn lex(text: &str, aps: &[String]) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let (tok, len) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '!' | '~' => (Tok::Not, 1),
            '&' => (Tok::And, if two == "&&" { 2 } else { 1 }),
            '|' => (Tok::Or, if two == "||" { 2 } else { 1 }),
            '-' | '=' if chars.get(i + 1) == Some(&'>') => (Tok::Implies, 2),
            '1' => (Tok::Const(true), 1),
            '0' => (Tok::Const(false), 1),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                let tok = match word.as_str() {
                    "X" => Some(Tok::Next),
                    "F" => Some(Tok::Finally),
                    "G" => Some(Tok::Globally),
                    "U" => Some(Tok::Until),
                    "R" => Some(Tok::Release),
                    "true" => Some(Tok::Const(true)),
                    "false" => Some(Tok::Const(false)),
                    _ => None,
                };
                match tok {
                    Some(t) => (t, j - i),
                    None if aps.contains(&word) => (Tok::Ident(word), j - i),
                    // run-together prefix operators, e.g. `GFp`
                    None if matches!(chars[i], 'X' | 'F' | 'G') => {
                        let t = match chars[i] {
                            'X' => Tok::Next,
                            'F' => Tok::Finally,
                            _ => Tok::Globally,
                        };
                        (t, 1)
                    }
                    None => (Tok::Ident(word), j - i),
                }
            }
            other => {
                return Err(Error::parse(
                    1,
                    col,
                    format!("unexpected character {other:?}"),
                ))
            }
        };
        out.push((tok, col));
        i += len;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
    aps: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, c)| *c)
            .unwrap_or(self.end_col)
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        let what = if self.pos >= self.toks.len() {
            format!("{msg} at end of input")
        } else {
            msg.to_string()
        };
        Err(Error::parse(1, self.col(), what))
    }

    fn implication(&mut self) -> Result<LtlFormula> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Implies) {
            self.pos += 1;
            let rhs = self.implication()?;
            return Ok(F::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<LtlFormula> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            lhs = F::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<LtlFormula> {
        let mut lhs = self.binary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            lhs = F::and(lhs, self.binary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<LtlFormula> {
        let wrap: fn(LtlFormula) -> LtlFormula = match self.peek() {
            Some(Tok::Not) => F::not,
            Some(Tok::Next) => F::next,
            Some(Tok::Finally) => F::finally,
            Some(Tok::Globally) => F::globally,
            _ => return self.primary(),
        };
        self.pos += 1;
        Ok(wrap(self.unary()?))
    }

    /// `U` and `R` take unary operands and associate to the right.
    fn binary(&mut self) -> Result<LtlFormula> {
        let lhs = self.unary()?;
        match self.peek() {
            Some(Tok::Until) => {
                self.pos += 1;
                Ok(F::until(lhs, self.binary()?))
            }
            Some(Tok::Release) => {
                self.pos += 1;
                Ok(F::release(lhs, self.binary()?))
            }
            _ => Ok(lhs),
        }
    }

    fn primary(&mut self) -> Result<LtlFormula> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.implication()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(f)
            }
            Some(Tok::Const(b)) => {
                self.pos += 1;
                Ok(if b { F::True } else { F::False })
            }
            Some(Tok::Ident(name)) => {
                if !self.aps.contains(&name) {
                    return self.err(&format!("undeclared atom {name:?}"));
                }
                self.pos += 1;
                Ok(F::Atom(name))
            }
            Some(_) => self.err("expected an operand"),
            None => self.err("expected an operand"),
        }
    }
}

/// Parses `text`; every atom must appear in `aps`.
pub fn parse_ltl(text: &str, aps: &[String]) -> Result<LtlFormula> {
    let toks = lex(text, aps)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_col: text.chars().count() + 1,
        aps,
    };
    let f = p.implication()?;
    if p.pos < p.toks.len() {
        return p.err("unexpected token");
    }
    Ok(f)
}

/// Parses a formula and declares its atoms in lexicographic order.
pub fn parse_ltl_auto(text: &str) -> Result<(LtlFormula, ApLetterMap)> {
    // first pass: collect identifiers that are not operators
    let mut names: Vec<String> = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_ascii_alphabetic() || chars[i] == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let mut word: String = chars[i..j].iter().collect();
            if !matches!(
                word.as_str(),
                "X" | "F" | "G" | "U" | "R" | "true" | "false"
            ) {
                while word.len() > 1 && word.starts_with(['X', 'F', 'G']) {
                    word.remove(0);
                }
                if !names.contains(&word) {
                    names.push(word);
                }
            }
            i = j;
        } else {
            i += 1;
        }
    }
    if names.is_empty() {
        names.push("p".into());
    }
    let map = ApLetterMap::lexicographic(names)?;
    let f = parse_ltl(text, map.aps())?;
    Ok((f, map))
}

/// Bijection between letters and sets of atomic propositions.
///
/// Letter `i` of the full alphabet is the AP set whose bit `j` is AP `j`.
/// A restricted map keeps a subset of those letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApLetterMap {
    aps: Vec<String>,
    masks: Vec<u32>,
    alphabet: Alphabet,
}

impl ApLetterMap {
    pub fn new(aps: Vec<String>) -> Result<Self> {
        if aps.len() > 16 {
            return Err(Error::Input(
                "at most 16 atomic propositions are supported".into(),
            ));
        }
        for (i, a) in aps.iter().enumerate() {
            if aps[..i].contains(a) {
                return Err(Error::Input(format!("duplicate proposition {a:?}")));
            }
        }
        let masks: Vec<u32> = (0..1u32 << aps.len()).collect();
        let alphabet = Alphabet::new(masks.iter().map(|&m| mask_name(&aps, m)))?;
        Ok(ApLetterMap {
            aps,
            masks,
            alphabet,
        })
    }

    pub fn lexicographic(mut aps: Vec<String>) -> Result<Self> {
        aps.sort();
        aps.dedup();
        ApLetterMap::new(aps)
    }

    /// Keeps only the named letters (in the given order).
    pub fn restrict(&self, letters: &[String]) -> Result<Self> {
        let mut masks = Vec::new();
        for l in letters {
            let idx = self
                .alphabet
                .index_of(l)
                .or_else(|| self.alphabet.index_of(&l.replace(' ', "")))
                .ok_or_else(|| Error::Input(format!("unknown letter {l:?}")))?;
            masks.push(self.masks[idx]);
        }
        let alphabet = Alphabet::new(masks.iter().map(|&m| mask_name(&self.aps, m)))?;
        Ok(ApLetterMap {
            aps: self.aps.clone(),
            masks,
            alphabet,
        })
    }

    pub fn aps(&self) -> &[String] {
        &self.aps
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn ap_index(&self, name: &str) -> Option<usize> {
        self.aps.iter().position(|a| a == name)
    }

    pub fn mask(&self, letter: Letter) -> u32 {
        self.masks[letter]
    }

    pub fn letter_of_mask(&self, mask: u32) -> Option<Letter> {
        self.masks.iter().position(|&m| m == mask)
    }

    pub fn holds(&self, letter: Letter, ap: usize) -> bool {
        self.masks[letter] >> ap & 1 == 1
    }

    /// Is this the full `2^AP` alphabet in canonical order?
    pub fn is_full(&self) -> bool {
        self.masks.len() == 1 << self.aps.len()
            && self.masks.iter().enumerate().all(|(i, &m)| m as usize == i)
    }
}

fn mask_name(aps: &[String], mask: u32) -> String {
    let inner: Vec<&str> = aps
        .iter()
        .enumerate()
        .filter(|(j, _)| mask >> j & 1 == 1)
        .map(|(_, a)| a.as_str())
        .collect();
    format!("{{{}}}", inner.join(","))
}

/// Membership oracle backed by [`LtlFormula::eval_on_lasso`], memoized on
/// the canonical form of each lasso.
pub struct LtlOracle {
    formula: LtlFormula,
    map: ApLetterMap,
    cache: Mutex<HashMap<Lasso, bool>>,
}

impl LtlOracle {
    pub fn new(formula: LtlFormula, map: ApLetterMap) -> Result<Self> {
        for a in formula.atoms() {
            if map.ap_index(&a).is_none() {
                return Err(Error::Input(format!(
                    "atom {a:?} is not a declared proposition"
                )));
            }
        }
        Ok(LtlOracle {
            formula,
            map,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn formula(&self) -> &LtlFormula {
        &self.formula
    }

    pub fn map(&self) -> &ApLetterMap {
        &self.map
    }
}

impl MembershipOracle for LtlOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.map.alphabet
    }

    fn contains(&self, w: &Lasso) -> bool {
        let key = w.canonical();
        if let Some(&v) = self.cache.lock().expect("oracle cache poisoned").get(&key) {
            return v;
        }
        let v = self.formula.eval_unchecked(&key, &self.map);
        self.cache
            .lock()
            .expect("oracle cache poisoned")
            .insert(key, v);
        v
    }
}

/// Wraps a formula as a membership oracle.
pub fn ltl_oracle(formula: LtlFormula, map: ApLetterMap) -> Result<LtlOracle> {
    LtlOracle::new(formula, map)
}
