use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{translate_ray, RaySurrogate, SigmaSequence};
use crate::cayley::{CayleyBall, VertexId};
use crate::error::{Error, Result};
use crate::group::Word;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    /// ShortLex-least element `g` with `|g| ≤ r` carrying `η` here.
    pub witness: Word,
    pub surrogate: RaySurrogate,
    /// Number of elements of the ball identified with this point.
    pub multiplicity: usize,
}

/// Translates `g·η` for `|g| ≤ r`, one per identification class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryBall {
    pub points: Vec<BoundaryPoint>,
    pub r: usize,
    pub horizon: usize,
    pub delta: Rational,
    /// Start of the identification window `[M/2, M]`.
    pub window_start: usize,
    /// Pairs of points that could not be compared (empty window); they are
    /// kept apart.
    pub unresolved: Vec<(usize, usize)>,
}

/// Two rays from `e` are identified when `d(x_n, y_n) ≤ 2δ` throughout the
/// window `[lo, min(M, depths)]`. `None` when the window is empty.
pub fn same_point(
    ball: &CayleyBall,
    a: &RaySurrogate,
    b: &RaySurrogate,
    lo: usize,
    m: usize,
    delta: Rational,
) -> Result<Option<bool>> {
    let hi = m.min(a.depth).min(b.depth);
    if lo > hi {
        return Ok(None);
    }
    let limit = delta.scale(2).floor() as usize;
    for n in lo..=hi {
        match ball.try_distance_words(&a.point(n), &b.point(n))? {
            Some(d) if d <= limit => {}
            _ => return Ok(Some(false)),
        }
    }
    Ok(Some(true))
}

/// The boundary ball `B(η, r)` realized on translates of the surrogate.
///
/// Elements are processed in ShortLex order; each joins the first earlier
/// class whose representative it fellow-travels.
pub fn boundary_ball(
    ball: &CayleyBall,
    eta: &RaySurrogate,
    r: usize,
    n: usize,
    m: usize,
    delta: Rational,
) -> Result<BoundaryBall> {
    if r > ball.radius() || r.saturating_add(m) > ball.reach() {
        return Err(Error::OutOfRange(format!(
            "r + M = {} exceeds ball radius {}",
            r + m,
            ball.radius()
        )));
    }
    let elements: Vec<VertexId> = (0..ball.ball_size(r)? as VertexId).collect();
    let mut translates: Vec<(Word, RaySurrogate)> = elements
        .par_iter()
        .map(|&g| {
            let w = ball.word(g).clone();
            translate_ray(ball, &w, eta, n, m).map(|t| (w, t))
        })
        .collect::<Result<_>>()?;
    translates.sort_by(|(a, _), (b, _)| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

    let lo = m / 2;
    let mut points: Vec<BoundaryPoint> = Vec::new();
    let mut unresolved = Vec::new();
    for (witness, surrogate) in translates {
        let mut home = None;
        let mut open = Vec::new();
        for (i, p) in points.iter().enumerate() {
            match same_point(ball, &p.surrogate, &surrogate, lo, m, delta)? {
                Some(true) => {
                    home = Some(i);
                    break;
                }
                Some(false) => {}
                None => open.push(i),
            }
        }
        match home {
            Some(i) => points[i].multiplicity += 1,
            None => {
                let k = points.len();
                unresolved.extend(open.into_iter().map(|i| (i, k)));
                points.push(BoundaryPoint {
                    witness,
                    surrogate,
                    multiplicity: 1,
                });
            }
        }
    }
    Ok(BoundaryBall {
        points,
        r,
        horizon: m,
        delta,
        window_start: lo,
        unresolved,
    })
}

/// Pairs of distinct points sharing the same `σ̂` and not flagged unresolved.
pub fn sigma_collisions(bb: &BoundaryBall, sigmas: &[SigmaSequence]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..sigmas.len() {
        for j in i + 1..sigmas.len() {
            if sigmas[i].letters == sigmas[j].letters && !bb.unresolved.contains(&(i, j)) {
                out.push((i, j));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cayley::build_ball;
    use crate::group::Preset;
    use crate::rays::{make_periodic_ray, phi_hat};

    #[test]
    fn free_group_unit_ball() {
        let b = build_ball(&Arc::new(Preset::F2.oracle()), 2).unwrap();
        let o = b.oracle();
        let eta = make_periodic_ray(&b, &o.word("a").unwrap(), 12, 0).unwrap();
        let bb = boundary_ball(&b, &eta, 1, 8, 12, Rational::ZERO).unwrap();
        let w: Vec<String> = bb.points.iter().map(|p| o.render(&p.witness)).collect();
        assert_eq!(w, vec!["", "b", "B"]);
        assert_eq!(bb.points[0].multiplicity, 3);
        assert!(bb.unresolved.is_empty());

        let zero = boundary_ball(&b, &eta, 0, 8, 12, Rational::ZERO).unwrap();
        assert_eq!(zero.points.len(), 1);

        let sig: Vec<SigmaSequence> = bb
            .points
            .iter()
            .map(|p| phi_hat(&b, &p.surrogate, 8, 11, 0).unwrap())
            .collect();
        assert!(sigma_collisions(&bb, &sig).is_empty());
    }

    #[test]
    fn radius_is_checked() {
        let b = build_ball(&Arc::new(Preset::Genus2.oracle()), 3).unwrap();
        let eta = make_periodic_ray(&b, &b.oracle().word("ac").unwrap(), 2, 0).unwrap();
        assert!(boundary_ball(&b, &eta, 2, 2, 2, Rational::integer(2)).is_err());
        assert!(boundary_ball(&b, &eta, 1, 2, 2, Rational::integer(2)).is_ok());
    }
}
