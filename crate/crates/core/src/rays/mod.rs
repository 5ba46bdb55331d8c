//! Finite-depth geodesic rays from the identity, their letter types, and the
//! operations on them: translation, geodesic substitution and fellow-travel
//! checks.

mod boundary;
mod sigma;
mod tubular;

use serde::{Deserialize, Serialize};

pub use boundary::{boundary_ball, same_point, sigma_collisions, BoundaryBall, BoundaryPoint};
pub use sigma::{phi_hat, stabilization_probe, SigmaSequence, StabilizationReport};
pub use tubular::{
    check_tubular_general, check_tubular_same_base, GeneralTubularReport, SameBaseReport,
};

use crate::cayley::{CayleyBall, VertexId};
use crate::error::{Error, Result};
use crate::group::{GroupOracle, Word};

/// The ray converges to `translate · base^∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodicSeed {
    pub translate: Word,
    pub base: Word,
}

/// A geodesic word standing in for a boundary point.
///
/// `word` has length `depth` and is a prefix of a verified geodesic word of
/// length `depth + margin`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaySurrogate {
    pub word: Word,
    pub depth: usize,
    pub margin: usize,
    pub seed: Option<PeriodicSeed>,
}

/// JSON form of a [`RaySurrogate`], words rendered as strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayRecord {
    pub word: String,
    pub depth: usize,
    pub margin: usize,
    pub seed: Option<SeedRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub translate: String,
    pub base: String,
}

impl RaySurrogate {
    /// Vertex `n` of the ray, as a word.
    pub fn point(&self, n: usize) -> Word {
        self.word.prefix(n)
    }

    pub fn to_record(&self, oracle: &GroupOracle) -> RayRecord {
        RayRecord {
            word: oracle.render(&self.word),
            depth: self.depth,
            margin: self.margin,
            seed: self.seed.as_ref().map(|s| SeedRecord {
                translate: oracle.render(&s.translate),
                base: oracle.render(&s.base),
            }),
        }
    }

    pub fn from_record(record: &RayRecord, oracle: &GroupOracle) -> Result<Self> {
        let word = oracle.word(&record.word)?;
        if word.len() != record.depth {
            return Err(Error::InvalidModel(format!(
                "ray word has length {} but depth {}",
                word.len(),
                record.depth
            )));
        }
        let seed = match &record.seed {
            Some(s) => Some(PeriodicSeed {
                translate: oracle.word(&s.translate)?,
                base: oracle.word(&s.base)?,
            }),
            None => None,
        };
        Ok(RaySurrogate {
            word,
            depth: record.depth,
            margin: record.margin,
            seed,
        })
    }
}

/// Letter sequence `(x_n⁻¹ x_{n+1})` of a path of ball vertices.
pub fn typ_of(ball: &CayleyBall, path: &[VertexId]) -> Result<Word> {
    let letters = ball.oracle().alphabet();
    let mut out = Word::empty();
    for pair in path.windows(2) {
        let (x, y) = (pair[0], pair[1]);
        if x as usize >= ball.len() || y as usize >= ball.len() {
            return Err(Error::OutOfRange(format!(
                "vertex {} is not in the ball",
                x.max(y)
            )));
        }
        let s = letters
            .letters()
            .find(|&s| ball.neighbor(x, s) == Some(y))
            .ok_or_else(|| Error::NotAPath(format!("vertices {x} and {y} are not adjacent")))?;
        out.push(s);
    }
    Ok(out)
}

/// [`typ_of`] for a path given by group elements, adjacency decided by the
/// word problem.
pub fn typ_of_elements(oracle: &GroupOracle, path: &[Word]) -> Result<Word> {
    let letters = oracle.alphabet();
    let mut out = Word::empty();
    for (i, pair) in path.windows(2).enumerate() {
        let step = letters.inverse(&pair[0]).concat(&pair[1]);
        let mut found = None;
        for s in letters.letters() {
            if oracle.equal(&step, &Word(vec![s]))? {
                found = Some(s);
                break;
            }
        }
        match found {
            Some(s) => out.push(s),
            None => {
                return Err(Error::NotAPath(format!(
                    "steps {i} and {} are not adjacent",
                    i + 1
                )))
            }
        }
    }
    Ok(out)
}

/// The ray along `u^∞`, after checking that its prefix of length
/// `depth + margin` is geodesic.
pub fn make_periodic_ray(
    ball: &CayleyBall,
    u: &Word,
    depth: usize,
    margin: usize,
) -> Result<RaySurrogate> {
    if u.is_empty() {
        return Err(Error::NotGeodesic("the periodic base is empty".into()));
    }
    let total = depth + margin;
    let long = u.periodic_prefix(total);
    let length = ball.extended_length(&long)?.ok_or_else(|| {
        Error::ResourceLimit(format!(
            "cannot certify a geodesic of length {total} with a radius-{} ball",
            ball.radius()
        ))
    })?;
    if length != total {
        return Err(Error::NotGeodesic(format!(
            "{} has length {length} < {total}",
            ball.oracle().render(&long)
        )));
    }
    Ok(RaySurrogate {
        word: long.prefix(depth),
        depth,
        margin,
        seed: Some(PeriodicSeed {
            translate: Word::empty(),
            base: u.clone(),
        }),
    })
}

/// The surrogate of `g·η`: the ShortLex geodesic from `e` to `g·Γ_η(M)`.
pub fn translate_ray(
    ball: &CayleyBall,
    g: &Word,
    eta: &RaySurrogate,
    n: usize,
    m: usize,
) -> Result<RaySurrogate> {
    if n > m || m > eta.depth {
        return Err(Error::OutOfRange(format!(
            "need N <= M <= depth, got N = {n}, M = {m}, depth = {}",
            eta.depth
        )));
    }
    if g.len().saturating_add(m) > ball.reach() {
        return Err(Error::OutOfRange(format!(
            "|g| + M = {} exceeds ball radius {}",
            g.len() + m,
            ball.radius()
        )));
    }
    let end = g.concat(&eta.word.prefix(m));
    let word = ball
        .normal_form(&end)?
        .ok_or_else(|| Error::OutOfRange("translated endpoint lies outside the ball".into()))?;
    let seed = eta.seed.as_ref().map(|s| PeriodicSeed {
        translate: g.concat(&s.translate),
        base: s.base.clone(),
    });
    Ok(RaySurrogate {
        depth: word.len(),
        word,
        margin: eta.margin.saturating_sub(g.len()),
        seed,
    })
}

/// Replaces the segment between vertices `n0` and `n1` by another geodesic.
pub fn substitute_geodesic(
    ball: &CayleyBall,
    ray: &RaySurrogate,
    n0: usize,
    n1: usize,
    replacement: &Word,
) -> Result<RaySurrogate> {
    if n0 >= n1 || n1 > ray.depth {
        return Err(Error::IndexOutOfRange(format!(
            "need n0 < n1 <= {}, got {n0}, {n1}",
            ray.depth
        )));
    }
    let oracle = ball.oracle();
    let segment = Word(ray.word.letters()[n0..n1].to_vec());
    if replacement.len() != n1 - n0 || !oracle.equal(&segment, replacement)? {
        return Err(Error::NotGeodesicReplacement(format!(
            "{} does not join vertices {n0} and {n1}",
            oracle.render(replacement)
        )));
    }
    let word = ray
        .word
        .prefix(n0)
        .concat(replacement)
        .concat(&Word(ray.word.letters()[n1..].to_vec()));
    if ball.extended_length(&word)? != Some(word.len()) {
        return Err(Error::SubstitutionViolation(oracle.render(&word)));
    }
    let seed = if word == ray.word {
        ray.seed.clone()
    } else {
        None
    };
    Ok(RaySurrogate {
        word,
        depth: ray.depth,
        margin: ray.margin,
        seed,
    })
}
