use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A letter, stored as its position in the alphabet's total order.
pub type Letter = u8;

/// An ordered symmetric generating alphabet.
///
/// Letters are identified with their rank in the fixed total order, so the
/// derived `Ord` on [`Word`] is exactly the lexicographic order induced by
/// the alphabet order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AlphabetRepr", into = "AlphabetRepr")]
pub struct Alphabet {
    symbols: Vec<char>,
    inv: Vec<Letter>,
    index: HashMap<char, Letter>,
}

#[derive(Serialize, Deserialize)]
struct AlphabetRepr {
    letters: String,
    inverses: String,
}

impl TryFrom<AlphabetRepr> for Alphabet {
    type Error = Error;

    fn try_from(r: AlphabetRepr) -> Result<Self> {
        let letters: Vec<char> = r.letters.chars().collect();
        let inverses: Vec<char> = r.inverses.chars().collect();
        if letters.len() != inverses.len() {
            return Err(Error::InvalidAlphabet(
                "letters/inverses length mismatch".into(),
            ));
        }
        Alphabet::new(
            letters
                .iter()
                .copied()
                .zip(inverses.iter().copied())
                .collect(),
        )
    }
}

impl From<Alphabet> for AlphabetRepr {
    fn from(a: Alphabet) -> Self {
        AlphabetRepr {
            letters: a.symbols.iter().collect(),
            inverses: a.inv.iter().map(|&i| a.symbols[i as usize]).collect(),
        }
    }
}

impl Alphabet {
    /// Builds an alphabet from `(symbol, inverse symbol)` pairs listed in the
    /// desired total order.
    pub fn new(pairs: Vec<(char, char)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidAlphabet("empty alphabet".into()));
        }
        if pairs.len() > Letter::MAX as usize {
            return Err(Error::InvalidAlphabet("too many letters".into()));
        }
        let mut index = HashMap::new();
        for (i, &(c, _)) in pairs.iter().enumerate() {
            if index.insert(c, i as Letter).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate letter {c:?}")));
            }
        }
        let mut inv = Vec::with_capacity(pairs.len());
        for &(c, ci) in &pairs {
            let j = *index.get(&ci).ok_or_else(|| {
                Error::InvalidAlphabet(format!("inverse {ci:?} of {c:?} is not a letter"))
            })?;
            inv.push(j);
        }
        for (i, &j) in inv.iter().enumerate() {
            if inv[j as usize] as usize != i {
                return Err(Error::InvalidAlphabet(format!(
                    "inverse map is not an involution at {:?}",
                    pairs[i].0
                )));
            }
        }
        Ok(Alphabet {
            symbols: pairs.into_iter().map(|(c, _)| c).collect(),
            inv,
            index,
        })
    }

    /// Generators `a, b, …` with inverses `A, B, …`, in the order
    /// `a < A < b < B < …`; generators in `self_inverse` get no capital.
    pub fn standard(generators: &[char], self_inverse: &[char]) -> Result<Self> {
        let mut pairs = Vec::new();
        for &g in generators {
            if self_inverse.contains(&g) {
                pairs.push((g, g));
            } else {
                let up = upper(g)?;
                pairs.push((g, up));
                pairs.push((up, g));
            }
        }
        Alphabet::new(pairs)
    }

    /// Reorders the letters; `order` must be a permutation of the symbols.
    pub fn reordered(&self, order: &[char]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::InvalidAlphabet(
                "letter_order must list every letter once".into(),
            ));
        }
        let pairs = order
            .iter()
            .map(|&c| {
                let l = self.letter(c)?;
                Ok((c, self.symbol(self.inv(l))))
            })
            .collect::<Result<Vec<_>>>()?;
        Alphabet::new(pairs)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        0..self.symbols.len() as Letter
    }

    pub fn symbol(&self, l: Letter) -> char {
        self.symbols[l as usize]
    }

    pub fn inv(&self, l: Letter) -> Letter {
        self.inv[l as usize]
    }

    pub fn letter(&self, c: char) -> Result<Letter> {
        self.index.get(&c).copied().ok_or(Error::UnknownLetter(c))
    }

    pub fn word(&self, s: &str) -> Result<Word> {
        s.chars()
            .map(|c| self.letter(c))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn render(&self, w: &Word) -> String {
        w.0.iter().map(|&l| self.symbol(l)).collect()
    }

    pub fn inverse(&self, w: &Word) -> Word {
        Word(w.0.iter().rev().map(|&l| self.inv(l)).collect())
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }
}

fn upper(g: char) -> Result<char> {
    let mut up = g.to_uppercase();
    match (up.next(), up.next()) {
        (Some(u), None) if u != g => Ok(u),
        _ => Err(Error::InvalidAlphabet(format!(
            "generator {g:?} has no distinct uppercase inverse"
        ))),
    }
}

/// A finite word over an [`Alphabet`]; the empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n].to_vec())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    /// The length-`n` prefix of `self^∞`.
    pub fn periodic_prefix(&self, n: usize) -> Word {
        assert!(!self.is_empty(), "periodic prefix of the empty word");
        Word(self.0.iter().copied().cycle().take(n).collect())
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}
