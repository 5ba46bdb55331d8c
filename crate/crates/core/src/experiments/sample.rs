use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::GroupContext;
use crate::error::{Error, Result};
use crate::group::{Alphabet, GroupOracle, Word};
use crate::rays::{
    boundary_ball, make_periodic_ray, phi_hat, same_point, translate_ray, BoundaryBall,
    PeriodicSeed, RaySurrogate, SigmaSequence,
};
use crate::shift_space::SeqModel;

/// The exact lex-least type of `g · translate · base^∞` in a family whose
/// normal forms are geodesic: the reduced ray, an eventually periodic
/// sequence.
pub fn exact_sigma(
    oracle: &GroupOracle,
    alphabet: &Arc<Alphabet>,
    g: &Word,
    seed: &PeriodicSeed,
) -> Result<SeqModel> {
    if !oracle.has_geodesic_normal_form() {
        return Err(Error::Config("exact σ needs geodesic normal forms".into()));
    }
    let t = g.concat(&seed.translate);
    let copies = t.len() + 1;
    let head = oracle.reduce(&t.concat(&seed.base.periodic_prefix(copies * seed.base.len())))?;
    let longer =
        oracle.reduce(&t.concat(&seed.base.periodic_prefix((copies + 2) * seed.base.len())))?;
    let expected = head.concat(&seed.base).concat(&seed.base);
    if longer != expected {
        return Err(Error::InvalidModel(format!(
            "{} is not eventually periodic with base {}",
            oracle.render(&head),
            oracle.render(&seed.base)
        )));
    }
    SeqModel::periodic(alphabet.clone(), head, seed.base.clone())
}

/// A boundary ball around a periodic ray together with the σ̂ of each point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryMetricSample {
    pub base: Word,
    pub eta: RaySurrogate,
    pub ball: BoundaryBall,
    pub sigma: Vec<SigmaSequence>,
    #[serde(skip)]
    pub models: Vec<SeqModel>,
    /// Models are exact periodic sequences rather than truncations.
    pub exact: bool,
    pub n: usize,
    pub m: usize,
    pub slack: usize,
    /// Points whose σ̂ disagrees with the exact model's prefix.
    pub sigma_mismatches: usize,
    /// Pairs of distinct points with equal exact models.
    pub identification_mismatches: usize,
}

impl BoundaryMetricSample {
    pub fn build(ctx: &GroupContext, base: &Word, r: usize) -> Result<Self> {
        let cfg = &ctx.config;
        let ball = &ctx.ball;
        let (n, m) = (cfg.depth, cfg.horizon);
        let slack = ctx.delta.slack();
        let eta = make_periodic_ray(ball, base, m, cfg.margin)?;
        let bb = boundary_ball(ball, &eta, r, n, m, ctx.delta.used)?;
        let alphabet = Arc::new(ball.oracle().alphabet().clone());
        let exact = ctx.exact_mode();
        let sigma: Vec<SigmaSequence> = bb
            .points
            .par_iter()
            .map(|p| {
                let h = m.min(p.surrogate.depth);
                phi_hat(ball, &p.surrogate, n.min(h), h, slack)
            })
            .collect::<Result<_>>()?;
        let seed = eta.seed.clone().expect("periodic rays carry a seed");
        let models: Vec<SeqModel> = if exact {
            bb.points
                .iter()
                .map(|p| exact_sigma(ball.oracle(), &alphabet, &p.witness, &seed))
                .collect::<Result<_>>()?
        } else {
            sigma
                .iter()
                .map(|s| SeqModel::truncated(alphabet.clone(), s.letters.clone()))
                .collect::<Result<_>>()?
        };
        let sigma_mismatches = if exact {
            sigma
                .iter()
                .zip(&models)
                .filter(|(s, x)| x.prefix(s.letters.len()) != s.letters)
                .count()
        } else {
            0
        };
        let mut identification_mismatches = 0;
        if exact {
            for i in 0..models.len() {
                identification_mismatches +=
                    models[i + 1..].iter().filter(|y| **y == models[i]).count();
            }
        }
        Ok(BoundaryMetricSample {
            base: base.clone(),
            eta,
            ball: bb,
            sigma,
            models,
            exact,
            n,
            m,
            slack,
            sigma_mismatches,
            identification_mismatches,
        })
    }

    pub fn len(&self) -> usize {
        self.ball.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ball.points.is_empty()
    }

    /// Index of the point carrying `g·η`, if `|g| ≤ r`.
    pub fn locate(&self, ctx: &GroupContext, g: &Word) -> Result<Option<usize>> {
        let alphabet = self.models.first().map(|x| x.alphabet().clone());
        if self.exact {
            let a = alphabet.unwrap_or_else(|| Arc::new(ctx.oracle().alphabet().clone()));
            let target = exact_sigma(ctx.oracle(), &a, g, self.eta.seed.as_ref().expect("seeded"))?;
            return Ok(self.models.iter().position(|x| *x == target));
        }
        let t = translate_ray(&ctx.ball, g, &self.eta, self.n, self.m)?;
        for (i, p) in self.ball.points.iter().enumerate() {
            if same_point(
                &ctx.ball,
                &p.surrogate,
                &t,
                self.m / 2,
                self.m,
                ctx.delta.used,
            )? == Some(true)
            {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchreierDistance {
    /// `None` when no element within `searched` carries one point to the other.
    pub distance: Option<usize>,
    /// Radius actually searched.
    pub searched: usize,
}

/// Least `|g|` with `g·p` identified with `q`, searching `|g| ≤ radius`.
///
/// Exact samples compare exact sequences; otherwise translates of the ray
/// are compared by the fellow-travel test, which limits the search to
/// elements whose translates fit in the ball.
pub fn schreier_distance(
    ctx: &GroupContext,
    sample: &BoundaryMetricSample,
    p: usize,
    q: usize,
    radius: usize,
) -> Result<SchreierDistance> {
    let ball = &ctx.ball;
    if p >= sample.len() || q >= sample.len() {
        return Err(Error::IndexOutOfRange(format!(
            "points {p}, {q} of {}",
            sample.len()
        )));
    }
    if p == q {
        return Ok(SchreierDistance {
            distance: Some(0),
            searched: radius,
        });
    }
    let wp = &sample.ball.points[p].witness;
    let radius = radius.min(ball.radius());
    let searched = if sample.exact {
        radius
    } else {
        radius.min(ball.reach().saturating_sub(wp.len() + sample.m))
    };
    let seed = sample
        .eta
        .seed
        .as_ref()
        .expect("periodic rays carry a seed");
    let alphabet = sample.models.first().map(|x| x.alphabet().clone());
    for k in 1..=searched {
        let hit = ball.sphere(k).into_par_iter().find_map_first(|v| {
            let gw = ball.word(v).concat(wp);
            let found = if sample.exact {
                let a = alphabet.clone().expect("nonempty sample");
                exact_sigma(ball.oracle(), &a, &gw, seed).map(|x| x == sample.models[q])
            } else {
                translate_ray(ball, &gw, &sample.eta, sample.n, sample.m).and_then(|t| {
                    let q_ray = &sample.ball.points[q].surrogate;
                    same_point(ball, &t, q_ray, sample.m / 2, sample.m, ctx.delta.used)
                        .map(|s| s == Some(true))
                })
            };
            match found {
                Ok(true) => Some(Ok(())),
                Ok(false) => None,
                Err(e) => Some(Err(e)),
            }
        });
        if let Some(res) = hit {
            res?;
            return Ok(SchreierDistance {
                distance: Some(k),
                searched,
            });
        }
    }
    Ok(SchreierDistance {
        distance: None,
        searched,
    })
}
