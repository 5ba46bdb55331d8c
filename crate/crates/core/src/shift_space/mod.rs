//! Sequences over the generating set under the left shift: the graph metric
//! `ρ_s`, tail equivalence, a hyperfiniteness filtration and a bounded cover.

mod cover;
mod io;
mod partition;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Alphabet, Letter, Word};

pub use cover::{asdim_cover, audit_cover, CoverAudit, ShiftForest};
pub use io::{CarrierFile, PeriodicTag, SeqRecord, CARRIER_SCHEMA_VERSION};
pub use partition::{filtration_rn, tail_partition, FinitePartition, PartitionMeta};

/// Default minimum overlap for calling two truncated tails equal.
pub const DEFAULT_MIN_WINDOW: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SeqKind {
    /// `preperiod · base^∞` with `base` primitive and `preperiod` minimal.
    PeriodicExact { preperiod: Word, base: Word },
    /// A finite prefix of an unknown sequence.
    Truncated { word: Word },
}

#[derive(Debug, Clone)]
pub struct SeqModel {
    kind: SeqKind,
    alphabet: Arc<Alphabet>,
}

impl PartialEq for SeqModel {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && same_alphabet(&self.alphabet, &other.alphabet)
    }
}

impl Eq for SeqModel {}

impl Hash for SeqModel {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind.hash(state);
    }
}

fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn check_letters(alphabet: &Alphabet, w: &Word) -> Result<()> {
    match w.letters().iter().find(|&&l| l as usize >= alphabet.len()) {
        Some(l) => Err(Error::InvalidModel(format!(
            "letter index {l} outside the alphabet"
        ))),
        None => Ok(()),
    }
}

/// Shortest `d` with `u = (u[..d])^{|u|/d}`.
fn primitive_root(u: &[Letter]) -> &[Letter] {
    let n = u.len();
    for d in 1..n {
        if n.is_multiple_of(d) && (d..n).all(|i| u[i] == u[i - d]) {
            return &u[..d];
        }
    }
    u
}

fn rotate_left(u: &[Letter], c: usize) -> Vec<Letter> {
    let c = c % u.len();
    u[c..].iter().chain(&u[..c]).copied().collect()
}

fn least_rotation(u: &[Letter]) -> Vec<Letter> {
    (0..u.len())
        .map(|c| rotate_left(u, c))
        .min()
        .unwrap_or_default()
}

fn common_suffix(p: &[Letter], q: &[Letter]) -> usize {
    p.iter()
        .rev()
        .zip(q.iter().rev())
        .take_while(|(a, b)| a == b)
        .count()
}

impl SeqModel {
    /// The eventually periodic sequence `preperiod · base^∞`, canonicalized.
    pub fn periodic(alphabet: Arc<Alphabet>, preperiod: Word, base: Word) -> Result<Self> {
        if base.is_empty() {
            return Err(Error::InvalidModel("periodic base must be nonempty".into()));
        }
        check_letters(&alphabet, &preperiod)?;
        check_letters(&alphabet, &base)?;
        let mut base = primitive_root(base.letters()).to_vec();
        let mut pre = preperiod.0;
        while let Some(&last) = pre.last() {
            if last != *base.last().unwrap() {
                break;
            }
            pre.pop();
            base.rotate_right(1);
        }
        Ok(SeqModel {
            kind: SeqKind::PeriodicExact {
                preperiod: Word(pre),
                base: Word(base),
            },
            alphabet,
        })
    }

    pub fn truncated(alphabet: Arc<Alphabet>, word: Word) -> Result<Self> {
        check_letters(&alphabet, &word)?;
        Ok(SeqModel {
            kind: SeqKind::Truncated { word },
            alphabet,
        })
    }

    /// Parses `pre(base)` as a periodic model and a bare word as truncated.
    pub fn parse(alphabet: Arc<Alphabet>, text: &str) -> Result<Self> {
        let text = text.trim();
        match text.find('(') {
            Some(open) => {
                let close = text.strip_suffix(')').ok_or_else(|| {
                    Error::InvalidModel(format!("expected trailing ')' in {text:?}"))
                })?;
                let pre = alphabet.word(&text[..open])?;
                let base = alphabet.word(&close[open + 1..])?;
                SeqModel::periodic(alphabet, pre, base)
            }
            None => {
                let w = alphabet.word(text)?;
                SeqModel::truncated(alphabet, w)
            }
        }
    }

    pub fn kind(&self) -> &SeqKind {
        &self.kind
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.kind, SeqKind::PeriodicExact { .. })
    }

    /// Letters known to the model; `None` for periodic models.
    pub fn known_len(&self) -> Option<usize> {
        match &self.kind {
            SeqKind::PeriodicExact { .. } => None,
            SeqKind::Truncated { word } => Some(word.len()),
        }
    }

    pub fn period(&self) -> Option<usize> {
        match &self.kind {
            SeqKind::PeriodicExact { base, .. } => Some(base.len()),
            SeqKind::Truncated { .. } => None,
        }
    }

    /// The first `n` letters (fewer for a short truncated model).
    pub fn prefix(&self, n: usize) -> Word {
        match &self.kind {
            SeqKind::PeriodicExact { preperiod, base } => {
                let mut w = preperiod.prefix(n.min(preperiod.len()));
                while w.len() < n {
                    w.push(base.letters()[(w.len() - preperiod.len()) % base.len()]);
                }
                w
            }
            SeqKind::Truncated { word } => word.prefix(n.min(word.len())),
        }
    }

    /// Lex-least rotation of the base: equal exactly for tail-equivalent
    /// periodic models.
    pub fn cycle_key(&self) -> Option<Word> {
        match &self.kind {
            SeqKind::PeriodicExact { base, .. } => Some(Word(least_rotation(base.letters()))),
            SeqKind::Truncated { .. } => None,
        }
    }

    /// One step of the left shift; `None` when a truncated model is exhausted.
    pub fn shift(&self) -> Option<SeqModel> {
        let kind = match &self.kind {
            SeqKind::PeriodicExact { preperiod, base } if preperiod.is_empty() => {
                SeqKind::PeriodicExact {
                    preperiod: Word::empty(),
                    base: Word(rotate_left(base.letters(), 1)),
                }
            }
            SeqKind::PeriodicExact { preperiod, base } => SeqKind::PeriodicExact {
                preperiod: Word(preperiod.letters()[1..].to_vec()),
                base: base.clone(),
            },
            SeqKind::Truncated { word } if word.is_empty() => return None,
            SeqKind::Truncated { word } => SeqKind::Truncated {
                word: Word(word.letters()[1..].to_vec()),
            },
        };
        Some(SeqModel {
            kind,
            alphabet: self.alphabet.clone(),
        })
    }

    pub fn shift_by(&self, n: usize) -> Option<SeqModel> {
        let mut x = self.clone();
        for _ in 0..n {
            x = x.shift()?;
        }
        Some(x)
    }

    pub fn render(&self) -> String {
        match &self.kind {
            SeqKind::PeriodicExact { preperiod, base } => {
                format!(
                    "{}({})",
                    self.alphabet.render(preperiod),
                    self.alphabet.render(base)
                )
            }
            SeqKind::Truncated { word } => self.alphabet.render(word),
        }
    }
}

impl fmt::Display for SeqModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A value of `ρ_s`: `None` is infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftDistance {
    pub value: Option<usize>,
    /// Computed from exact periodic data rather than truncations.
    pub exact: bool,
}

pub fn rho_s(x: &SeqModel, y: &SeqModel) -> Result<ShiftDistance> {
    rho_s_with(x, y, DEFAULT_MIN_WINDOW)
}

/// Minimum of `n0 + n1` over `s^{n0}(x) = s^{n1}(y)`.
///
/// Truncated inputs compare suffixes on their full remaining overlap, which
/// must be at least `min_window`; the result is then only a lower estimate.
pub fn rho_s_with(x: &SeqModel, y: &SeqModel, min_window: usize) -> Result<ShiftDistance> {
    if !same_alphabet(&x.alphabet, &y.alphabet) {
        return Err(Error::AlphabetMismatch);
    }
    match (&x.kind, &y.kind) {
        (
            SeqKind::PeriodicExact {
                preperiod: p,
                base: u,
            },
            SeqKind::PeriodicExact {
                preperiod: q,
                base: v,
            },
        ) => Ok(ShiftDistance {
            value: periodic_distance(p.letters(), u.letters(), q.letters(), v.letters()),
            exact: true,
        }),
        _ => {
            let (a, b) = expand_pair(x, y);
            Ok(ShiftDistance {
                value: truncated_distance(a.letters(), b.letters(), min_window)?,
                exact: false,
            })
        }
    }
}

fn periodic_distance(p: &[Letter], u: &[Letter], q: &[Letter], v: &[Letter]) -> Option<usize> {
    if u == v {
        return Some(p.len() + q.len() - 2 * common_suffix(p, q));
    }
    if u.len() != v.len() {
        return None;
    }
    let l = u.len();
    let c = (1..l).find(|&c| rotate_left(u, c) == v)?;
    Some(p.len() + q.len() + c.min(l - c))
}

/// Both models as finite words; a periodic side is unrolled past the other.
fn expand_pair(x: &SeqModel, y: &SeqModel) -> (Word, Word) {
    let unroll = |m: &SeqModel, other: &SeqModel| match &m.kind {
        SeqKind::PeriodicExact { preperiod, base } => {
            let other_len = other.known_len().unwrap_or(0);
            m.prefix(other_len + preperiod.len() + base.len())
        }
        SeqKind::Truncated { word } => word.clone(),
    };
    (unroll(x, y), unroll(y, x))
}

fn tails_agree(a: &[Letter], b: &[Letter], n0: usize, n1: usize, min_window: usize) -> bool {
    let overlap = (a.len() - n0).min(b.len() - n1);
    overlap >= min_window && a[n0..n0 + overlap] == b[n1..n1 + overlap]
}

fn truncated_distance(a: &[Letter], b: &[Letter], min_window: usize) -> Result<Option<usize>> {
    let overlap = a.len().min(b.len());
    if overlap < min_window {
        return Err(Error::WindowTooSmall {
            overlap,
            min: min_window,
        });
    }
    for total in 0..=a.len() + b.len() {
        for n0 in total.saturating_sub(b.len())..=total.min(a.len()) {
            if tails_agree(a, b, n0, total - n0, min_window) {
                return Ok(Some(total));
            }
        }
    }
    Ok(None)
}

/// Whether `s^i(x) = s^j(y)` for some `i, j ≤ n`.
pub(crate) fn linked_within(
    x: &SeqModel,
    y: &SeqModel,
    n: usize,
    min_window: usize,
) -> Result<bool> {
    if !same_alphabet(&x.alphabet, &y.alphabet) {
        return Err(Error::AlphabetMismatch);
    }
    if x.is_exact() && y.is_exact() {
        let xs: Vec<SeqModel> = (0..=n).filter_map(|i| x.shift_by(i)).collect();
        let mut z = y.clone();
        for _ in 0..=n {
            if xs.contains(&z) {
                return Ok(true);
            }
            z = z.shift().expect("periodic models always shift");
        }
        return Ok(false);
    }
    let (a, b) = expand_pair(x, y);
    let overlap = a.len().min(b.len());
    if overlap < min_window {
        return Err(Error::WindowTooSmall {
            overlap,
            min: min_window,
        });
    }
    for n0 in 0..=n.min(a.len()) {
        for n1 in 0..=n.min(b.len()) {
            if tails_agree(a.letters(), b.letters(), n0, n1, min_window) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn ab() -> Arc<Alphabet> {
        Arc::new(Alphabet::standard(&['a', 'b'], &[]).unwrap())
    }

    fn m(s: &str) -> SeqModel {
        SeqModel::parse(ab(), s).unwrap()
    }

    fn d(x: &str, y: &str) -> Option<usize> {
        let r = rho_s(&m(x), &m(y)).unwrap();
        assert!(r.exact);
        r.value
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(m("ab(abab)"), m("(ab)"));
        assert_eq!(m("b(ab)"), m("(ba)"));
        assert_eq!(m("aaa(a)").render(), "(a)");
        assert_eq!(m("ba(a)").render(), "b(a)");
        assert!(SeqModel::parse(ab(), "a()").is_err());
        assert_eq!(m("b(a)").prefix(4), ab().word("baaa").unwrap());
    }

    #[test]
    fn examples() {
        assert_eq!(d("(ab)", "(ba)"), Some(1));
        assert_eq!(d("(a)", "(b)"), None);
        assert_eq!(d("b(a)", "(a)"), Some(1));
        assert_eq!(d("ab(A)", "Bb(A)"), Some(2));
        assert_eq!(d("(aab)", "(baa)"), Some(1));
        assert_eq!(d("(aab)", "(aba)"), Some(1));
        assert_eq!(d("a(aab)", "(aab)"), Some(1));
        assert_eq!(d("B(ab)", "(ab)"), Some(1));
    }

    #[test]
    fn shifts() {
        assert_eq!(m("b(a)").shift().unwrap(), m("(a)"));
        assert_eq!(m("(ab)").shift().unwrap(), m("(ba)"));
        assert_eq!(m("").shift(), None);
        assert_eq!(m("ab").shift().unwrap(), m("b"));
    }

    #[test]
    fn truncated_mode() {
        let x = m("babababababa");
        let y = m("abababababab");
        let r = rho_s(&x, &y).unwrap();
        assert_eq!(
            r,
            ShiftDistance {
                value: Some(1),
                exact: false
            }
        );
        assert!(matches!(
            rho_s(&m("abab"), &m("abab")),
            Err(Error::WindowTooSmall { overlap: 4, min: 8 })
        ));
        assert_eq!(rho_s_with(&m("aaaa"), &m("bbbb"), 2).unwrap().value, None);
        let mixed = rho_s(&m("b(a)"), &m("aaaaaaaaaa")).unwrap();
        assert_eq!(mixed.value, Some(1));
        assert!(!mixed.exact);
    }

    #[test]
    fn alphabets_must_match() {
        let other = Arc::new(Alphabet::standard(&['a', 'c'], &[]).unwrap());
        let x = SeqModel::parse(other, "(a)").unwrap();
        assert_eq!(rho_s(&x, &m("(a)")), Err(Error::AlphabetMismatch));
    }
}
