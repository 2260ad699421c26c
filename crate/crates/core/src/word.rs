//! Alphabets and lasso-shaped words.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a letter inside its [`Alphabet`].
pub type Letter = usize;

/// A finite, ordered set of opaque letter names.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Alphabet {
    letters: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, Letter>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.letters == other.letters
    }
}

impl Eq for Alphabet {}

impl Alphabet {
    pub fn new<I, S>(letters: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let letters: Vec<String> = letters.into_iter().map(Into::into).collect();
        if letters.is_empty() {
            return Err(Error::Input("alphabet must not be empty".into()));
        }
        let mut index = HashMap::with_capacity(letters.len());
        for (i, l) in letters.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate letter {l:?} in alphabet")));
            }
        }
        Ok(Alphabet { letters, index })
    }

    /// The alphabet `{"0", "1", ..., "size-1"}`.
    pub fn numeric(size: usize) -> Self {
        Alphabet::new((0..size).map(|i| i.to_string())).expect("numeric alphabet is valid")
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn name(&self, letter: Letter) -> &str {
        &self.letters[letter]
    }

    pub fn index_of(&self, name: &str) -> Option<Letter> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter < self.letters.len()
    }

    /// Parses a finite word.
    ///
    /// Three spellings are accepted: brace groups (`{p}{}{p,q}`) when the
    /// alphabet names are brace groups, whitespace-separated names, or one
    /// character per letter when every name is a single character.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Letter>> {
        let text = text.trim();
        if text.is_empty() || text == "ε" || text == "eps" {
            return Ok(Vec::new());
        }
        let tokens: Vec<String> = if text.starts_with('{') {
            let mut out = Vec::new();
            let mut rest = text;
            while !rest.is_empty() {
                rest = rest.trim_start();
                if rest.is_empty() {
                    break;
                }
                if !rest.starts_with('{') {
                    return Err(Error::Input(format!("expected '{{' in word {text:?}")));
                }
                let end = rest
                    .find('}')
                    .ok_or_else(|| Error::Input(format!("unterminated '{{' in word {text:?}")))?;
                let inner: Vec<&str> = rest[1..end]
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .collect();
                out.push(format!("{{{}}}", inner.join(",")));
                rest = &rest[end + 1..];
            }
            out
        } else if text.contains(char::is_whitespace) {
            text.split_whitespace().map(str::to_string).collect()
        } else if self.letters.iter().all(|l| l.chars().count() == 1) {
            text.chars().map(|c| c.to_string()).collect()
        } else {
            vec![text.to_string()]
        };
        tokens
            .iter()
            .map(|t| {
                self.index_of(t)
                    .or_else(|| self.index_of(&normalize_brace(t)))
                    .ok_or_else(|| Error::Input(format!("unknown letter {t:?}")))
            })
            .collect()
    }

    pub fn format_word(&self, word: &[Letter]) -> String {
        let compact = self
            .letters
            .iter()
            .all(|l| l.chars().count() == 1 || l.starts_with('{'));
        let parts: Vec<&str> = word.iter().map(|&l| self.name(l)).collect();
        if compact {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }
}

fn normalize_brace(token: &str) -> String {
    token.replace(' ', "")
}

/// The ultimately-periodic word `stem · period^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lasso {
    stem: Vec<Letter>,
    period: Vec<Letter>,
}

impl Lasso {
    pub fn new(stem: Vec<Letter>, period: Vec<Letter>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Input("lasso loop must be non-empty".into()));
        }
        Ok(Lasso { stem, period })
    }

    /// Lasso with base `base` and loop starting at `split`.
    pub fn from_base(base: &[Letter], split: usize) -> Result<Self> {
        if split >= base.len() {
            return Err(Error::Input(format!(
                "loop start {split} outside base of length {}",
                base.len()
            )));
        }
        Lasso::new(base[..split].to_vec(), base[split..].to_vec())
    }

    pub fn parse(alphabet: &Alphabet, stem: &str, period: &str) -> Result<Self> {
        Lasso::new(alphabet.parse_word(stem)?, alphabet.parse_word(period)?)
    }

    pub fn stem(&self) -> &[Letter] {
        &self.stem
    }

    pub fn period(&self) -> &[Letter] {
        &self.period
    }

    /// `|stem| + |period|`.
    pub fn len(&self) -> usize {
        self.stem.len() + self.period.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index where the loop starts inside the base.
    pub fn split(&self) -> usize {
        self.stem.len()
    }

    pub fn base(&self) -> Vec<Letter> {
        let mut b = self.stem.clone();
        b.extend_from_slice(&self.period);
        b
    }

    /// Letter at `pos` of the infinite word.
    pub fn letter_at(&self, pos: usize) -> Letter {
        if pos < self.stem.len() {
            self.stem[pos]
        } else {
            self.period[(pos - self.stem.len()) % self.period.len()]
        }
    }

    /// First `len` letters of the infinite word.
    pub fn prefix(&self, len: usize) -> Vec<Letter> {
        (0..len).map(|i| self.letter_at(i)).collect()
    }

    /// Position reached after reading the letter at base position `pos`.
    pub fn next_pos(&self, pos: usize) -> usize {
        if pos + 1 < self.len() {
            pos + 1
        } else {
            self.stem.len()
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.stem.iter().chain(self.period.iter()).copied()
    }

    /// Re-represents the same infinite word as a lasso of length `target`.
    pub fn unroll(&self, target: usize) -> Result<Lasso> {
        if target < self.len() {
            return Err(Error::Input(format!(
                "cannot unroll a lasso of length {} to length {target}",
                self.len()
            )));
        }
        let shift = target - self.len();
        let stem_len = self.stem.len() + shift;
        let stem = self.prefix(stem_len);
        let period = (0..self.period.len())
            .map(|i| self.letter_at(stem_len + i))
            .collect();
        Lasso::new(stem, period)
    }

    /// Shortest lasso inducing the same infinite word.
    pub fn canonical(&self) -> Lasso {
        let p = self.period.len();
        let mut root = p;
        for d in 1..=p {
            if p.is_multiple_of(d) && (0..p).all(|i| self.period[i] == self.period[i % d]) {
                root = d;
                break;
            }
        }
        let mut stem = self.stem.clone();
        let mut period: Vec<Letter> = self.period[..root].to_vec();
        while let Some(&last) = stem.last() {
            if last == period[root - 1] {
                stem.pop();
                period.rotate_right(1);
            } else {
                break;
            }
        }
        Lasso { stem, period }
    }

    /// Do the two lassos induce the same infinite word?
    pub fn same_word(&self, other: &Lasso) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> LassoDisplay<'a> {
        LassoDisplay {
            lasso: self,
            alphabet,
        }
    }
}

pub struct LassoDisplay<'a> {
    lasso: &'a Lasso,
    alphabet: &'a Alphabet,
}

impl fmt::Display for LassoDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:?}, {:?})",
            self.alphabet.format_word(&self.lasso.stem),
            self.alphabet.format_word(&self.lasso.period)
        )
    }
}
