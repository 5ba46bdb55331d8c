//! Ball-restricted lower bounds for the hyperbolicity constant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ball::{CayleyBall, VertexId};
use crate::error::{Error, Result};
use crate::group::Word;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaParams {
    pub side_bound: usize,
    /// Triangle (and 4-tuple) budget; scans are exhaustive below it.
    pub sample: usize,
    pub seed: u64,
    /// Extra geodesics per triangle side beyond the ShortLex one.
    pub alternates: usize,
    /// Cap on geodesics per endpoint in the bigon scan.
    pub bigon_cap: usize,
}

impl DeltaParams {
    pub fn new(side_bound: usize, sample: usize, seed: u64) -> Self {
        DeltaParams {
            side_bound,
            sample,
            seed,
            alternates: 1,
            bigon_cap: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaScope {
    pub radius: usize,
    pub params: DeltaParams,
    pub triangles_examined: u64,
    pub triangles_exhaustive: bool,
    pub bigons_examined: u64,
    pub tuples_examined: u64,
    pub tuples_exhaustive: bool,
}

/// Both values are maxima over examined configurations, hence lower bounds
/// for the true constants restricted to the ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperbolicityEstimate {
    pub delta_slim: Rational,
    pub delta_4pt: Rational,
    pub scope: DeltaScope,
}

type Side = Vec<Word>;

/// Points (as words from `e`) along the path `base · w`.
fn side_points(base: &Word, w: &Word) -> Side {
    (0..=w.len()).map(|n| base.concat(&w.prefix(n))).collect()
}

/// Max over `p` in `side` of the distance from `p` to `others`.
fn side_defect(ball: &CayleyBall, side: &Side, others: &[&Side]) -> Result<usize> {
    let mut worst = 0;
    for p in side {
        let mut best = usize::MAX;
        'scan: for o in others {
            for q in o.iter() {
                if let Some(d) = ball.try_distance_words(p, q)? {
                    best = best.min(d);
                    if best <= worst {
                        break 'scan;
                    }
                }
            }
        }
        if best != usize::MAX {
            worst = worst.max(best);
        }
    }
    Ok(worst)
}

fn slimness(ball: &CayleyBall, a: &Side, b: &Side, c: &Side) -> Result<usize> {
    Ok(side_defect(ball, a, &[b, c])?
        .max(side_defect(ball, b, &[a, c])?)
        .max(side_defect(ball, c, &[a, b])?))
}

fn geodesic_choices(ball: &CayleyBall, z: VertexId, alternates: usize) -> Vec<Word> {
    ball.geodesics_to(z, alternates + 1).words
}

fn triangle_defect(
    ball: &CayleyBall,
    y: VertexId,
    z: VertexId,
    params: &DeltaParams,
) -> Result<Option<usize>> {
    let wy = ball.word(y);
    let wz = ball.word(z);
    let Some(yz) = ball.locate(&ball.oracle().alphabet().inverse(wy).concat(wz))? else {
        return Ok(None);
    };
    if ball.level(yz) > params.side_bound {
        return Ok(None);
    }
    let sides_a: Vec<Side> = geodesic_choices(ball, y, params.alternates)
        .iter()
        .map(|w| side_points(&Word::empty(), w))
        .collect();
    let sides_b: Vec<Side> = geodesic_choices(ball, z, params.alternates)
        .iter()
        .map(|w| side_points(&Word::empty(), w))
        .collect();
    let sides_c: Vec<Side> = geodesic_choices(ball, yz, params.alternates)
        .iter()
        .map(|w| side_points(wy, w))
        .collect();
    let mut worst = 0;
    for a in &sides_a {
        for b in &sides_b {
            for c in &sides_c {
                worst = worst.max(slimness(ball, a, b, c)?);
            }
        }
    }
    Ok(Some(worst))
}

fn bigon_defect(ball: &CayleyBall, v: VertexId, cap: usize) -> Result<usize> {
    let paths: Vec<Side> = ball
        .geodesics_to(v, cap)
        .words
        .iter()
        .map(|w| side_points(&Word::empty(), w))
        .collect();
    let mut worst = 0;
    for (i, a) in paths.iter().enumerate() {
        for b in &paths[i + 1..] {
            worst = worst
                .max(side_defect(ball, a, &[b])?)
                .max(side_defect(ball, b, &[a])?);
        }
    }
    Ok(worst)
}

/// Twice the four-point defect of `(e, y, z, w)`, if all distances are known.
fn four_point_defect2(ball: &CayleyBall, pts: [&Word; 4]) -> Result<Option<usize>> {
    let mut d = [[0usize; 4]; 4];
    for i in 0..4 {
        for j in i + 1..4 {
            match ball.try_distance_words(pts[i], pts[j])? {
                Some(x) => {
                    d[i][j] = x;
                    d[j][i] = x;
                }
                None => return Ok(None),
            }
        }
    }
    let mut sums = [d[0][1] + d[2][3], d[0][2] + d[1][3], d[0][3] + d[1][2]];
    sums.sort_unstable();
    Ok(Some(sums[2] - sums[1]))
}

/// `y·u` for `u` uniform on a sphere of uniformly drawn radius `k ≤ side_bound`,
/// if it lands within the side bound.
fn step_from(
    ball: &CayleyBall,
    y: VertexId,
    sb: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Option<VertexId>> {
    let k = rng.gen_range(0..=sb);
    let sphere = ball.sphere(k);
    let u = rng.gen_range(sphere.start..sphere.end);
    Ok(ball
        .locate(&ball.word(y).concat(ball.word(u)))?
        .filter(|&z| ball.level(z) <= sb))
}

/// Seeded draws of `arity` vertices in the side-bound ball, the later ones
/// reached from the first by [`step_from`]. Failed draws are retried up to a
/// fixed attempt budget.
fn sample_near(
    ball: &CayleyBall,
    params: DeltaParams,
    arity: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<VertexId>>> {
    let sb = params.side_bound;
    let n = ball.ball_size(sb)?;
    let mut out = Vec::with_capacity(params.sample);
    let mut attempts = 0usize;
    'draw: while out.len() < params.sample && attempts < params.sample.saturating_mul(64) {
        attempts += 1;
        let y = rng.gen_range(0..n) as VertexId;
        let mut pts = vec![y];
        for _ in 1..arity {
            match step_from(ball, y, sb, rng)? {
                Some(z) => pts.push(z),
                None => continue 'draw,
            }
        }
        out.push(pts);
    }
    Ok(out)
}

/// Scans geodesic triangles and 4-tuples with one corner at `e` (all others
/// are translates) inside the radius-`side_bound` ball.
pub fn estimate_delta(ball: &CayleyBall, params: DeltaParams) -> Result<HyperbolicityEstimate> {
    if params.side_bound > ball.radius() {
        return Err(Error::OutOfRange(format!(
            "side bound {} exceeds ball radius {}",
            params.side_bound,
            ball.radius()
        )));
    }
    let n = ball.ball_size(params.side_bound)? as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let triangles_exhaustive = n.saturating_mul(n) <= params.sample as u64;
    let pairs: Vec<(VertexId, VertexId)> = if triangles_exhaustive {
        (0..n as VertexId)
            .flat_map(|y| (y..n as VertexId).map(move |z| (y, z)))
            .collect()
    } else {
        sample_near(ball, params, 2, &mut rng)?
            .into_iter()
            .map(|p| (p[0], p[1]))
            .collect()
    };
    let tri: Vec<Option<usize>> = pairs
        .par_iter()
        .map(|&(y, z)| triangle_defect(ball, y, z, &params))
        .collect::<Result<_>>()?;
    let triangles_examined = tri.iter().flatten().count() as u64;
    let slim_tri = tri.iter().flatten().copied().max().unwrap_or(0);

    let bigons: Vec<usize> = (0..n as VertexId)
        .into_par_iter()
        .map(|v| bigon_defect(ball, v, params.bigon_cap))
        .collect::<Result<_>>()?;
    let slim_bigon = bigons.iter().copied().max().unwrap_or(0);

    let tuples_exhaustive = n.saturating_mul(n).saturating_mul(n) <= params.sample as u64;
    let tuples: Vec<[VertexId; 3]> = if tuples_exhaustive {
        let m = n as VertexId;
        (0..m)
            .flat_map(|a| (a..m).flat_map(move |b| (b..m).map(move |c| [a, b, c])))
            .collect()
    } else {
        sample_near(ball, params, 3, &mut rng)?
            .into_iter()
            .map(|p| [p[0], p[1], p[2]])
            .collect()
    };
    let empty = Word::empty();
    let fours: Vec<Option<usize>> = tuples
        .par_iter()
        .map(|t| {
            four_point_defect2(
                ball,
                [&empty, ball.word(t[0]), ball.word(t[1]), ball.word(t[2])],
            )
        })
        .collect::<Result<_>>()?;
    let tuples_examined = fours.iter().flatten().count() as u64;
    let four2 = fours.iter().flatten().copied().max().unwrap_or(0);

    Ok(HyperbolicityEstimate {
        delta_slim: Rational::integer(slim_tri.max(slim_bigon) as u64),
        delta_4pt: Rational::new(four2 as u64, 2),
        scope: DeltaScope {
            radius: ball.radius(),
            params,
            triangles_examined,
            triangles_exhaustive,
            bigons_examined: n,
            tuples_examined,
            tuples_exhaustive,
        },
    })
}
