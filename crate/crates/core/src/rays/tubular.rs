use serde::{Deserialize, Serialize};

use super::RaySurrogate;
use crate::cayley::CayleyBall;
use crate::error::{Error, Result};
use crate::group::Word;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SameBaseReport {
    pub max_gap: usize,
    pub ok: bool,
    /// The endpoints differ (but lie within `2δ`).
    pub approximate: bool,
}

/// Largest `d(x_n, y_n)` along two geodesic words from `e` of equal length.
pub fn check_tubular_same_base(
    ball: &CayleyBall,
    w1: &Word,
    w2: &Word,
    delta: Rational,
) -> Result<SameBaseReport> {
    if w1.len() != w2.len() {
        return Err(Error::OutOfRange(format!(
            "words of lengths {} and {} differ",
            w1.len(),
            w2.len()
        )));
    }
    let gap = |n: usize| -> Result<usize> {
        ball.try_distance_words(&w1.prefix(n), &w2.prefix(n))?
            .ok_or_else(|| Error::OutOfRange(format!("gap at position {n} lies outside the ball")))
    };
    let end_gap = gap(w1.len())?;
    let two_delta = delta.scale(2);
    if !two_delta.bounds(end_gap as u64) {
        return Err(Error::OutOfRange(format!(
            "endpoints are {end_gap} apart, more than 2δ"
        )));
    }
    let mut max_gap = end_gap;
    for n in 0..w1.len() {
        max_gap = max_gap.max(gap(n)?);
    }
    Ok(SameBaseReport {
        max_gap,
        ok: two_delta.bounds(max_gap as u64),
        approximate: end_gap != 0,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralTubularReport {
    pub base_distance: usize,
    pub window: usize,
    /// Lex-least `(T0, T1)` with `d(x_{T0+n}, y_{T1+n}) ≤ 5δ` for `n ≤ window`.
    pub pair: Option<(usize, usize)>,
    /// Largest gap along the window at `pair`.
    pub max_gap: Option<usize>,
    /// `2(d(x0, y0) + 3δ + 2)`.
    pub bound: Rational,
    pub ok_travel: bool,
    pub ok_bound: bool,
}

/// Fellow-travel search for two rays based at `x0` and `y0`.
///
/// Candidates `(T0, T1)` are scanned in lexicographic order with
/// `T0 + window ≤ depth1` and `T1 + window ≤ depth2`; gaps whose distance
/// lies beyond the ball count as failures.
pub fn check_tubular_general(
    ball: &CayleyBall,
    x0: &Word,
    ray1: &RaySurrogate,
    y0: &Word,
    ray2: &RaySurrogate,
    delta: Rational,
    window: usize,
) -> Result<GeneralTubularReport> {
    let base_distance = ball
        .try_distance_words(x0, y0)?
        .ok_or_else(|| Error::OutOfRange("base points are not within the ball".into()))?;
    let bound = delta.scale(3).add_int(base_distance as u64 + 2).scale(2);
    let limit = delta.scale(5).floor() as usize;
    let xs: Vec<Word> = (0..=ray1.depth)
        .map(|n| x0.concat(&ray1.point(n)))
        .collect();
    let ys: Vec<Word> = (0..=ray2.depth)
        .map(|n| y0.concat(&ray2.point(n)))
        .collect();

    let mut pair = None;
    let mut max_gap = None;
    if window <= ray1.depth && window <= ray2.depth {
        'search: for t0 in 0..=ray1.depth - window {
            for t1 in 0..=ray2.depth - window {
                let mut worst = 0;
                let mut good = true;
                for n in 0..=window {
                    match ball.try_distance_words(&xs[t0 + n], &ys[t1 + n])? {
                        Some(d) if d <= limit => worst = worst.max(d),
                        _ => {
                            good = false;
                            break;
                        }
                    }
                }
                if good {
                    pair = Some((t0, t1));
                    max_gap = Some(worst);
                    break 'search;
                }
            }
        }
    }
    let ok_bound = pair.is_some_and(|(t0, t1)| bound.bounds(t0 as u64) && bound.bounds(t1 as u64));
    Ok(GeneralTubularReport {
        base_distance,
        window,
        pair,
        max_gap,
        bound,
        ok_travel: pair.is_some(),
        ok_bound,
    })
}
