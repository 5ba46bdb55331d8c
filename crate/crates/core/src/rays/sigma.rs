use serde::{Deserialize, Serialize};

use super::RaySurrogate;
use crate::cayley::CayleyBall;
use crate::error::{Error, Result};
use crate::group::Word;

/// A finite prefix of the lex-least ray type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SigmaSequence {
    pub letters: Word,
    pub depth: usize,
    pub horizon: usize,
    pub slack: usize,
}

/// Lex-least geodesic word of length `m` from `e` ending within `slack` of
/// `Γ_η(m)`, cut to its first `n` letters.
///
/// Every geodesic ray from `e` to `η` passes within `2δ` of `Γ_η(m)` at
/// time `m`, so with `slack ≥ 2δ` the result is a lower bound (in `≤_lex`)
/// for the true prefix.
pub fn phi_hat(
    ball: &CayleyBall,
    eta: &RaySurrogate,
    n: usize,
    m: usize,
    slack: usize,
) -> Result<SigmaSequence> {
    if n > m || m > eta.depth {
        return Err(Error::OutOfRange(format!(
            "need N <= M <= depth, got N = {n}, M = {m}, depth = {}",
            eta.depth
        )));
    }
    if m > ball.reach() {
        return Err(Error::OutOfRange(format!(
            "horizon {m} exceeds ball radius {}",
            ball.radius()
        )));
    }
    let centre = eta.point(m);
    let mut best: Option<Word> = None;
    for t in 0..ball.ball_size(slack)? as u32 {
        let Some(nf) = ball.normal_form(&centre.concat(ball.word(t)))? else {
            continue;
        };
        if nf.len() == m && best.as_ref().is_none_or(|b| nf < *b) {
            best = Some(nf);
        }
    }
    let best = best.ok_or(Error::EmptyTargetSet)?;
    Ok(SigmaSequence {
        letters: best.prefix(n),
        depth: n,
        horizon: m,
        slack,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationReport {
    pub horizons: Vec<usize>,
    /// Length-`N` prefix at each horizon.
    pub prefixes: Vec<Word>,
    /// Longest common prefix of the full lex-least words across horizons.
    pub common_prefix: usize,
    /// First horizon index from which the length-`N` prefix no longer changes.
    pub stable_from: usize,
    /// The prefix agrees on at least the last two horizons.
    pub stable: bool,
}

pub fn stabilization_probe(
    ball: &CayleyBall,
    eta: &RaySurrogate,
    n: usize,
    horizons: &[usize],
    slack: usize,
) -> Result<StabilizationReport> {
    if horizons.is_empty() {
        return Err(Error::OutOfRange("no horizons given".into()));
    }
    let full: Vec<Word> = horizons
        .iter()
        .map(|&m| phi_hat(ball, eta, m, m, slack).map(|s| s.letters))
        .collect::<Result<_>>()?;
    if let Some(&m) = horizons.iter().find(|&&m| m < n) {
        return Err(Error::OutOfRange(format!(
            "horizon {m} is shorter than N = {n}"
        )));
    }
    let prefixes: Vec<Word> = full.iter().map(|w| w.prefix(n)).collect();
    let shortest = full.iter().map(Word::len).min().unwrap_or(0);
    let common_prefix = (0..shortest)
        .take_while(|&i| full.iter().all(|w| w.letters()[i] == full[0].letters()[i]))
        .count();
    let last = prefixes.len() - 1;
    let mut stable_from = last;
    while stable_from > 0 && prefixes[stable_from - 1] == prefixes[last] {
        stable_from -= 1;
    }
    Ok(StabilizationReport {
        horizons: horizons.to_vec(),
        prefixes,
        common_prefix,
        stable_from,
        stable: stable_from < last || horizons.len() == 1,
    })
}
