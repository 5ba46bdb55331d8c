use std::collections::HashMap;

use rayon::prelude::*;

use super::{ExperimentReport, GroupContext, Table};
use crate::cayley::VertexId;
use crate::error::{Error, Result};
use crate::group::Word;
use crate::rays::{
    check_tubular_general, check_tubular_same_base, substitute_geodesic, RaySurrogate,
};

const GEODESIC_CAP: usize = 64;

fn finite_ray(word: Word) -> RaySurrogate {
    RaySurrogate {
        depth: word.len(),
        word,
        margin: 0,
        seed: None,
    }
}

fn check_radius(ctx: &GroupContext, radius: usize) -> Result<()> {
    if radius > ctx.ball.radius() {
        return Err(Error::OutOfRange(format!(
            "radius {radius} exceeds the ball radius {}",
            ctx.ball.radius()
        )));
    }
    Ok(())
}

/// Fellow-travel of geodesics with a common base (gap ≤ 2δ) and of geodesics
/// from nearby bases ending at a common vertex (offsets within
/// `2(d(x0, y0) + 3δ + 2)`).
pub fn audit_tubular(ctx: &GroupContext, radius: usize) -> Result<ExperimentReport> {
    check_radius(ctx, radius)?;
    let ball = &ctx.ball;
    let delta = ctx.delta.used;
    let mut report = ExperimentReport::new("tubular", &ctx.config, &ctx.delta);
    report.measure("radius", radius);

    let vertices: Vec<VertexId> = (0..=radius).flat_map(|k| ball.sphere(k)).collect();
    let same: Vec<(usize, usize, bool, bool)> = vertices
        .par_iter()
        .map(|&v| {
            let g = ball.geodesics_to(v, GEODESIC_CAP);
            let (mut pairs, mut worst, mut bad) = (0, 0, 0);
            for (i, w1) in g.words.iter().enumerate() {
                for w2 in &g.words[i + 1..] {
                    let r = check_tubular_same_base(ball, w1, w2, delta)?;
                    pairs += 1;
                    worst = worst.max(r.max_gap);
                    bad += usize::from(!r.ok);
                }
            }
            Ok((pairs, worst, bad == 0, g.overflow))
        })
        .collect::<Result<_>>()?;
    let pairs: usize = same.iter().map(|s| s.0).sum();
    let max_gap = same.iter().map(|s| s.1).max().unwrap_or(0);
    let bad = same.iter().filter(|s| !s.2).count();
    if same.iter().any(|s| s.3) {
        report.caveat("some vertices have more geodesics than the enumeration cap");
    }
    report.check(
        "same_base_gap",
        bad == 0,
        false,
        format!(
            "{pairs} pairs, max gap {max_gap}, bound 2δ = {}",
            delta.scale(2)
        ),
    );
    report.measure("same_base_pairs", pairs);
    report.measure("same_base_max_gap", max_gap);

    report.table = Table::new(&[
        "base_distance",
        "y0",
        "target",
        "t0",
        "t1",
        "max_gap",
        "bound",
    ]);
    let alphabet = ball.oracle().alphabet();
    let mut general = 0;
    let mut failures = 0;
    let mut worst_offset = 0;
    for d0 in 1..=2.min(radius) {
        let jobs: Vec<(VertexId, VertexId)> = ball
            .sphere(d0)
            .flat_map(|y| ball.sphere(radius - d0).map(move |z| (y, z)))
            .collect();
        let rows: Vec<Option<Vec<String>>> = jobs
            .par_iter()
            .map(|&(y, z)| {
                let y0 = ball.word(y);
                let to_z = ball.word(z).clone();
                let from_y = alphabet.inverse(y0).concat(&to_z);
                let Some(nf) = ball.normal_form(&from_y)? else {
                    return Ok(None);
                };
                let (r1, r2) = (finite_ray(to_z), finite_ray(nf));
                let window = r1.depth.min(r2.depth) / 2;
                let rep = check_tubular_general(ball, &Word::empty(), &r1, y0, &r2, delta, window)?;
                let ok = rep.ok_travel && rep.ok_bound;
                let (t0, t1) = rep.pair.unwrap_or((usize::MAX, usize::MAX));
                Ok(Some(vec![
                    d0.to_string(),
                    ball.oracle().render(y0),
                    ball.oracle().render(ball.word(z)),
                    t0.to_string(),
                    t1.to_string(),
                    rep.max_gap.map_or(String::new(), |g| g.to_string()),
                    rep.bound.to_string(),
                    ok.to_string(),
                ]))
            })
            .collect::<Result<_>>()?;
        for row in rows.into_iter().flatten() {
            general += 1;
            let ok = row[7] == "true";
            failures += usize::from(!ok);
            if ok {
                let t0: usize = row[3].parse().expect("numeric");
                let t1: usize = row[4].parse().expect("numeric");
                worst_offset = worst_offset.max(t0).max(t1);
            }
            let mut row = row;
            row.pop();
            if !ok {
                row[3].clear();
                row[4].clear();
            }
            report.table.push(row);
        }
    }
    report.check(
        "general_base_offsets",
        failures == 0,
        false,
        format!("{general} pairs of rays, {failures} without offsets inside the bound"),
    );
    report.measure("general_pairs", general);
    report.measure("general_max_offset", worst_offset);
    Ok(report)
}

/// Replacing any short segment of a geodesic by another geodesic between
/// the same vertices yields a geodesic.
pub fn audit_substitution(
    ctx: &GroupContext,
    radius: usize,
    max_segment: usize,
) -> Result<ExperimentReport> {
    check_radius(ctx, radius)?;
    if max_segment == 0 {
        return Err(Error::OutOfRange(
            "segments must have positive length".into(),
        ));
    }
    let ball = &ctx.ball;
    let mut report = ExperimentReport::new("substitution", &ctx.config, &ctx.delta);
    report.measure("radius", radius);
    report.measure("max_segment", max_segment);

    let seg_cap = max_segment.min(radius);
    let alternatives: HashMap<VertexId, Vec<Word>> = (1..=seg_cap)
        .flat_map(|k| ball.sphere(k))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|v| (v, ball.geodesics_to(v, GEODESIC_CAP).words))
        .collect();
    let vertices: Vec<VertexId> = (1..=radius).flat_map(|k| ball.sphere(k)).collect();
    let counts: Vec<(usize, usize)> = vertices
        .par_iter()
        .map(|&v| {
            let (mut tried, mut violations) = (0, 0);
            for w in ball.geodesics_to(v, GEODESIC_CAP).words {
                let ray = finite_ray(w);
                for n0 in 0..ray.depth {
                    for n1 in n0 + 1..=(n0 + seg_cap).min(ray.depth) {
                        let seg = Word(ray.word.letters()[n0..n1].to_vec());
                        let at = ball
                            .locate(&seg)?
                            .ok_or_else(|| Error::OutOfRange("segment outside the ball".into()))?;
                        for alt in &alternatives[&at] {
                            if *alt == seg {
                                continue;
                            }
                            tried += 1;
                            match substitute_geodesic(ball, &ray, n0, n1, alt) {
                                Ok(_) => {}
                                Err(Error::SubstitutionViolation(_)) => violations += 1,
                                Err(e) => return Err(e),
                            }
                        }
                    }
                }
            }
            Ok((tried, violations))
        })
        .collect::<Result<_>>()?;
    let tried: usize = counts.iter().map(|c| c.0).sum();
    let violations: usize = counts.iter().map(|c| c.1).sum();
    report.check(
        "substitution_geodesic",
        violations == 0,
        false,
        format!("{tried} substitutions, {violations} non-geodesic results"),
    );
    report.measure("substitutions", tried);
    report.measure("violations", violations);
    Ok(report)
}
