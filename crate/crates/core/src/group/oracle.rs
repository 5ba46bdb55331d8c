use serde::{Deserialize, Serialize};

use super::alphabet::{Alphabet, Letter, Word};
use super::fingerprint::Fingerprinter;
use crate::error::{Error, Result};

/// The built-in group families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    FreeGroup {
        rank: usize,
    },
    /// Free product of cyclic groups; an order of `0` stands for `Z`.
    FreeProductOfCyclics {
        orders: Vec<u32>,
    },
    SmallCancellation {
        relators: Vec<String>,
    },
}

/// A finitely generated group: an ordered symmetric alphabet together with
/// an exact solution of the word problem.
///
/// Oracles are immutable after construction.
#[derive(Debug, Clone)]
pub struct GroupOracle {
    alphabet: Alphabet,
    family: Family,
    /// Per letter: generator index and exponent (+1 / -1).
    letter_gen: Vec<(usize, i64)>,
    /// Positive and negative letter of each generator (equal for involutions).
    gens: Vec<(Letter, Letter)>,
    orders: Vec<u32>,
    relators: Vec<Word>,
    symmetrized: Vec<Word>,
    /// Indices into `symmetrized`, bucketed by first letter.
    by_first: Vec<Vec<usize>>,
    fingerprint: Option<Fingerprinter>,
}

impl GroupOracle {
    /// Free group on `rank` generators `a, b, …` with the default order.
    pub fn free_group(rank: usize) -> Result<Self> {
        let gens = default_generators(rank)?;
        let alphabet = Alphabet::standard(&gens, &[])?;
        Self::new(alphabet, &gens, Family::FreeGroup { rank })
    }

    /// Free product of cyclic groups of the given orders (`0` = infinite).
    pub fn free_product(orders: &[u32]) -> Result<Self> {
        let gens = default_generators(orders.len())?;
        let involutions: Vec<char> = gens
            .iter()
            .zip(orders)
            .filter(|(_, &m)| m == 2)
            .map(|(&g, _)| g)
            .collect();
        let alphabet = Alphabet::standard(&gens, &involutions)?;
        Self::new(
            alphabet,
            &gens,
            Family::FreeProductOfCyclics {
                orders: orders.to_vec(),
            },
        )
    }

    /// Small-cancellation group `<gens | relators>`; relators are strings in
    /// the standard lower/upper-case alphabet.
    pub fn small_cancellation(generators: &[char], relators: &[&str]) -> Result<Self> {
        let alphabet = Alphabet::standard(generators, &[])?;
        Self::new(
            alphabet,
            generators,
            Family::SmallCancellation {
                relators: relators.iter().map(|s| s.to_string()).collect(),
            },
        )
    }

    /// General constructor. `generators` lists the positive letter of each
    /// generator; the alphabet fixes the inverses and the letter order.
    pub fn new(alphabet: Alphabet, generators: &[char], family: Family) -> Result<Self> {
        let mut letter_gen = vec![(usize::MAX, 0i64); alphabet.len()];
        let mut gens = Vec::with_capacity(generators.len());
        for (gi, &g) in generators.iter().enumerate() {
            let pos = alphabet.letter(g)?;
            let neg = alphabet.inv(pos);
            if letter_gen[pos as usize].0 != usize::MAX {
                return Err(Error::InvalidPresentation(format!(
                    "generator {g:?} listed twice"
                )));
            }
            letter_gen[pos as usize] = (gi, 1);
            if neg != pos {
                letter_gen[neg as usize] = (gi, -1);
            }
            gens.push((pos, neg));
        }
        if letter_gen.iter().any(|&(g, _)| g == usize::MAX) {
            return Err(Error::InvalidPresentation(
                "alphabet contains letters that are not generators or their inverses".into(),
            ));
        }

        let mut orders = vec![0u32; gens.len()];
        let mut relators = Vec::new();
        match &family {
            Family::FreeGroup { rank } => {
                if *rank != gens.len() {
                    return Err(Error::InvalidPresentation(
                        "rank does not match generators".into(),
                    ));
                }
                if gens.iter().any(|&(p, n)| p == n) {
                    return Err(Error::InvalidPresentation(
                        "free group generators cannot be involutions".into(),
                    ));
                }
            }
            Family::FreeProductOfCyclics { orders: o } => {
                if o.len() != gens.len() {
                    return Err(Error::InvalidPresentation(
                        "one order per generator required".into(),
                    ));
                }
                for (&(p, n), &m) in gens.iter().zip(o) {
                    if m == 1 {
                        return Err(Error::InvalidPresentation(
                            "order 1 generators are not allowed".into(),
                        ));
                    }
                    if (m == 2) != (p == n) {
                        return Err(Error::InvalidPresentation(format!(
                            "generator {:?}: order-2 generators must be exactly the self-inverse letters",
                            alphabet.symbol(p)
                        )));
                    }
                }
                orders = o.clone();
            }
            Family::SmallCancellation { relators: rs } => {
                if gens.iter().any(|&(p, n)| p == n) {
                    return Err(Error::InvalidPresentation(
                        "small-cancellation generators cannot be involutions".into(),
                    ));
                }
                for r in rs {
                    let w = alphabet.word(r)?;
                    if w.is_empty() {
                        return Err(Error::InvalidPresentation("empty relator".into()));
                    }
                    relators.push(w);
                }
            }
        }

        let mut oracle = GroupOracle {
            alphabet,
            family,
            letter_gen,
            gens,
            orders,
            relators,
            symmetrized: Vec::new(),
            by_first: Vec::new(),
            fingerprint: None,
        };
        if let Family::SmallCancellation { .. } = oracle.family {
            oracle.symmetrize()?;
            oracle.check_c16()?;
            oracle.fingerprint = Some(Fingerprinter::search(&oracle));
        }
        Ok(oracle)
    }

    fn symmetrize(&mut self) -> Result<()> {
        let mut out: Vec<Word> = Vec::new();
        for r in &self.relators {
            let fr = free_reduce_letters(&self.alphabet, r.letters());
            let n = fr.len();
            if n == 0 || self.alphabet.inv(fr[0]) == fr[n - 1] {
                return Err(Error::InvalidPresentation(format!(
                    "relator {} is not cyclically reduced",
                    self.alphabet.render(r)
                )));
            }
            let fr = Word(fr);
            for base in [fr.clone(), self.alphabet.inverse(&fr)] {
                for k in 0..n {
                    let rot: Vec<Letter> =
                        base.0[k..].iter().chain(&base.0[..k]).copied().collect();
                    out.push(Word(rot));
                }
            }
        }
        out.sort();
        out.dedup();
        let mut by_first = vec![Vec::new(); self.alphabet.len()];
        for (i, r) in out.iter().enumerate() {
            by_first[r.0[0] as usize].push(i);
        }
        self.symmetrized = out;
        self.by_first = by_first;
        Ok(())
    }

    /// Longest piece among the symmetrized relators.
    pub fn longest_piece(&self) -> usize {
        let mut best = 0;
        for (i, r1) in self.symmetrized.iter().enumerate() {
            for r2 in &self.symmetrized[i + 1..] {
                let l = common_prefix(r1.letters(), r2.letters());
                best = best.max(l);
            }
        }
        best
    }

    fn check_c16(&self) -> Result<()> {
        for (i, r1) in self.symmetrized.iter().enumerate() {
            for (j, r2) in self.symmetrized.iter().enumerate() {
                if i == j {
                    continue;
                }
                let piece = common_prefix(r1.letters(), r2.letters());
                if 6 * piece >= r1.len() {
                    return Err(Error::NotC16 {
                        piece,
                        relator_len: r1.len(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn generators(&self) -> &[(Letter, Letter)] {
        &self.gens
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn symmetrized_relators(&self) -> &[Word] {
        &self.symmetrized
    }

    pub(crate) fn letter_generator(&self, l: Letter) -> (usize, i64) {
        self.letter_gen[l as usize]
    }

    /// True when [`GroupOracle::reduce`] returns the ShortLex normal form, so
    /// that `reduce(w).len()` is the word length of `w`.
    pub fn has_geodesic_normal_form(&self) -> bool {
        !matches!(self.family, Family::SmallCancellation { .. })
    }

    pub(crate) fn fingerprinter(&self) -> Option<&Fingerprinter> {
        self.fingerprint.as_ref()
    }

    pub fn word(&self, s: &str) -> Result<Word> {
        self.alphabet.word(s)
    }

    pub fn render(&self, w: &Word) -> String {
        self.alphabet.render(w)
    }

    fn check_letters(&self, w: &Word) -> Result<()> {
        if let Some(&l) = w.0.iter().find(|&&l| l as usize >= self.alphabet.len()) {
            return Err(Error::OutOfRange(format!(
                "letter index {l} outside alphabet"
            )));
        }
        Ok(())
    }

    /// Cancels adjacent inverse pairs.
    pub fn free_reduce(&self, w: &Word) -> Result<Word> {
        self.check_letters(w)?;
        Ok(Word(free_reduce_letters(&self.alphabet, w.letters())))
    }

    /// Family-specific reduction: free reduction, syllable normal form, or
    /// Dehn's algorithm. Never lengthens the word; preserves the element.
    pub fn reduce(&self, w: &Word) -> Result<Word> {
        self.check_letters(w)?;
        Ok(match &self.family {
            Family::FreeGroup { .. } => Word(free_reduce_letters(&self.alphabet, w.letters())),
            Family::FreeProductOfCyclics { .. } => self.syllable_normal_form(w),
            Family::SmallCancellation { .. } => self.dehn(w),
        })
    }

    pub fn is_trivial(&self, w: &Word) -> Result<bool> {
        Ok(self.reduce(w)?.is_empty())
    }

    /// `u` and `v` represent the same element.
    pub fn equal(&self, u: &Word, v: &Word) -> Result<bool> {
        self.is_trivial(&u.concat(&self.alphabet.inverse(v)))
    }

    /// Dehn's algorithm: repeatedly replace the first maximal subword that is
    /// more than half of a symmetrized relator `u·v` by `v⁻¹`.
    pub fn dehn_reduce(&self, w: &Word) -> Result<Word> {
        if !matches!(self.family, Family::SmallCancellation { .. }) {
            return Err(Error::NotSmallCancellation);
        }
        self.check_letters(w)?;
        Ok(self.dehn(w))
    }

    fn dehn(&self, w: &Word) -> Word {
        let mut cur = free_reduce_letters(&self.alphabet, w.letters());
        'outer: loop {
            for i in 0..cur.len() {
                let mut best: Option<(usize, Vec<Letter>)> = None;
                for &ri in &self.by_first[cur[i] as usize] {
                    let r = self.symmetrized[ri].letters();
                    let l = common_prefix(&cur[i..], r);
                    if 2 * l <= r.len() {
                        continue;
                    }
                    let complement: Vec<Letter> =
                        r[l..].iter().rev().map(|&x| self.alphabet.inv(x)).collect();
                    let better = match &best {
                        None => true,
                        Some((bl, bc)) => l > *bl || (l == *bl && complement < *bc),
                    };
                    if better {
                        best = Some((l, complement));
                    }
                }
                if let Some((l, complement)) = best {
                    let mut next = Vec::with_capacity(cur.len());
                    next.extend_from_slice(&cur[..i]);
                    next.extend_from_slice(&complement);
                    next.extend_from_slice(&cur[i + l..]);
                    cur = free_reduce_letters(&self.alphabet, &next);
                    continue 'outer;
                }
            }
            break;
        }
        Word(cur)
    }

    /// Syllables `(generator, exponent)` of the free-product normal form,
    /// exponents normalized to `1..m` for finite orders.
    pub fn syllables(&self, w: &Word) -> Vec<(usize, i64)> {
        let mut stack: Vec<(usize, i64)> = Vec::new();
        for &l in w.letters() {
            let (g, e) = self.letter_gen[l as usize];
            let m = self.orders.get(g).copied().unwrap_or(0) as i64;
            let norm = |x: i64| if m > 0 { x.rem_euclid(m) } else { x };
            match stack.last_mut() {
                Some(top) if top.0 == g => {
                    top.1 = norm(top.1 + e);
                    if top.1 == 0 {
                        stack.pop();
                    }
                }
                _ => {
                    let x = norm(e);
                    if x != 0 {
                        stack.push((g, x));
                    }
                }
            }
        }
        stack
    }

    fn syllable_normal_form(&self, w: &Word) -> Word {
        let mut out = Vec::new();
        for (g, k) in self.syllables(w) {
            let (pos, neg) = self.gens[g];
            let m = self.orders[g] as i64;
            let (letter, count) = if m == 0 {
                if k > 0 {
                    (pos, k)
                } else {
                    (neg, -k)
                }
            } else if 2 * k < m {
                (pos, k)
            } else if 2 * k > m {
                (neg, m - k)
            } else {
                (pos.min(neg), k)
            };
            out.extend(std::iter::repeat_n(letter, count as usize));
        }
        Word(out)
    }
}

fn default_generators(n: usize) -> Result<Vec<char>> {
    if n == 0 || n > 26 {
        return Err(Error::InvalidPresentation(format!(
            "unsupported number of generators: {n}"
        )));
    }
    Ok((0..n).map(|i| (b'a' + i as u8) as char).collect())
}

pub(crate) fn free_reduce_letters(alphabet: &Alphabet, w: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w {
        if out.last().is_some_and(|&t| alphabet.inv(t) == l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn common_prefix(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> GroupOracle {
        GroupOracle::free_group(2).unwrap()
    }

    fn z2z3() -> GroupOracle {
        GroupOracle::free_product(&[2, 3]).unwrap()
    }

    fn genus2() -> GroupOracle {
        GroupOracle::small_cancellation(&['a', 'b', 'c', 'd'], &["abABcdCD"]).unwrap()
    }

    fn red(o: &GroupOracle, s: &str) -> String {
        o.render(&o.free_reduce(&o.word(s).unwrap()).unwrap())
    }

    #[test]
    fn free_reduce_examples() {
        let o = f2();
        assert_eq!(red(&o, "aA"), "");
        assert_eq!(red(&o, "abBA"), "");
        assert_eq!(red(&o, "ab"), "ab");
    }

    #[test]
    fn unknown_letter() {
        assert_eq!(f2().word("ax"), Err(Error::UnknownLetter('x')));
    }

    #[test]
    fn dehn_examples() {
        let o = genus2();
        let d = |s: &str| o.render(&o.dehn_reduce(&o.word(s).unwrap()).unwrap());
        assert_eq!(d("abABc"), "dcD");
        assert_eq!(d(""), "");
        assert_eq!(d("abABcdCD"), "");
        assert_eq!(
            f2().dehn_reduce(&Word::empty()),
            Err(Error::NotSmallCancellation)
        );
    }

    #[test]
    fn is_trivial_examples() {
        let z = z2z3();
        assert!(z.is_trivial(&z.word("bbb").unwrap()).unwrap());
        assert!(!z.is_trivial(&z.word("ab").unwrap()).unwrap());
        assert!(z.is_trivial(&z.word("aa").unwrap()).unwrap());
        let f = f2();
        assert!(!f.is_trivial(&f.word("abAB").unwrap()).unwrap());
    }

    #[test]
    fn syllable_normal_form_prefers_short_then_least_letter() {
        let z = z2z3();
        assert_eq!(z.render(&z.reduce(&z.word("bb").unwrap()).unwrap()), "B");
        assert_eq!(
            z.render(&z.reduce(&z.word("abba").unwrap()).unwrap()),
            "aBa"
        );
        let z4 = GroupOracle::free_product(&[4]).unwrap();
        assert_eq!(
            z4.render(&z4.reduce(&z4.word("AA").unwrap()).unwrap()),
            "aa"
        );
    }

    #[test]
    fn genus2_is_c16_with_unit_pieces() {
        let o = genus2();
        assert_eq!(o.symmetrized_relators().len(), 16);
        assert_eq!(o.longest_piece(), 1);
        assert!(6 * o.longest_piece() < 8);
    }

    #[test]
    fn rejects_non_c16() {
        let err = GroupOracle::small_cancellation(&['a', 'b'], &["abAB"]).unwrap_err();
        assert!(matches!(err, Error::NotC16 { .. }));
        let err = GroupOracle::small_cancellation(&['a', 'b'], &["abA"]).unwrap_err();
        assert!(matches!(err, Error::InvalidPresentation(_)));
    }

    #[test]
    fn bad_free_product_orders() {
        assert!(GroupOracle::free_product(&[1]).is_err());
    }
}
