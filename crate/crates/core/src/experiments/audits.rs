use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::sample::{exact_sigma, schreier_distance, BoundaryMetricSample};
use super::{ExperimentReport, GroupContext, Table};
use crate::error::{Error, Result};
use crate::group::{Family, Word};
use crate::rational::Rational;
use crate::rays::{
    check_tubular_general, phi_hat, translate_ray, GeneralTubularReport, PeriodicSeed, RaySurrogate,
};
use crate::shift_space::{
    asdim_cover, audit_cover, filtration_rn, rho_s_with, tail_partition, FinitePartition,
    PartitionMeta, SeqModel,
};

const TRUNCATION_CAVEAT: &str =
    "truncation-limited: σ̂ are finite prefixes and ρ_s is a lower estimate";
const IDENTIFICATION_CAVEAT: &str =
    "finite-depth identification: boundary points are compared on a finite window";

fn bases(ctx: &GroupContext) -> Result<Vec<Word>> {
    if ctx.config.eta.is_empty() {
        return Err(Error::Config("no ray bases given".into()));
    }
    ctx.config
        .eta
        .iter()
        .map(|s| ctx.oracle().word(s))
        .collect()
}

fn samples(
    ctx: &GroupContext,
    r: usize,
    report: &mut ExperimentReport,
) -> Result<Vec<BoundaryMetricSample>> {
    let out: Vec<BoundaryMetricSample> = bases(ctx)?
        .iter()
        .map(|b| BoundaryMetricSample::build(ctx, b, r))
        .collect::<Result<_>>()?;
    if !ctx.exact_mode() {
        report.caveat(TRUNCATION_CAVEAT);
        report.caveat(IDENTIFICATION_CAVEAT);
    }
    for s in &out {
        let name = ctx.oracle().render(&s.base);
        report.check(
            &format!("sigma_consistent[{name}]"),
            s.sigma_mismatches == 0 && s.identification_mismatches == 0,
            !s.exact,
            format!(
                "{} σ̂ disagree with exact sequences, {} pairs of distinct points share one",
                s.sigma_mismatches, s.identification_mismatches
            ),
        );
        if !s.ball.unresolved.is_empty() {
            report.caveat("some boundary points could not be compared and were kept apart");
        }
    }
    Ok(out)
}

fn distance_bound(r: usize, delta: Rational) -> Rational {
    // 8(r + 3δ + 2)
    delta.scale(3).add_int(r as u64 + 2).scale(8)
}

fn travel_bound(d: usize, delta: Rational) -> Rational {
    // 2(d + 3δ + 2)
    delta.scale(3).add_int(d as u64 + 2).scale(2)
}

/// Largest within-class `ρ_s`, closed under the triangle inequality so that
/// truncated pairs with too little overlap are measured through the class.
fn max_class_rho_s(
    models: &[SeqModel],
    p: &FinitePartition,
    min_window: usize,
) -> Result<Option<usize>> {
    let mut worst = Some(0);
    for class in p.classes() {
        let k = class.len();
        let mut d = vec![vec![None; k]; k];
        for i in 0..k {
            d[i][i] = Some(0);
            for j in i + 1..k {
                let v = rho_s_with(&models[class[i]], &models[class[j]], min_window)?.value;
                d[i][j] = v;
                d[j][i] = v;
            }
        }
        for m in 0..k {
            for i in 0..k {
                for j in 0..k {
                    if let (Some(a), Some(b)) = (d[i][m], d[m][j]) {
                        if d[i][j].is_none_or(|c| a + b < c) {
                            d[i][j] = Some(a + b);
                        }
                    }
                }
            }
        }
        for row in &d {
            for &v in row {
                worst = worst.zip(v).map(|(w, v): (usize, usize)| w.max(v));
            }
        }
    }
    Ok(worst)
}

#[derive(Serialize)]
struct TailBallRow {
    eta: String,
    points: usize,
    tail_classes: usize,
    max_within_class_rho_s: Option<usize>,
    max_t0: usize,
    max_t1: usize,
}

/// Tail classes of σ̂ over a boundary ball, their `ρ_s`-diameters and the
/// fellow-travel pairs behind them.
pub fn audit_lemma_bound(ctx: &GroupContext) -> Result<ExperimentReport> {
    let cfg = &ctx.config;
    let delta = ctx.delta.used;
    let mut report = ExperimentReport::new("lemma-bound", cfg, &ctx.delta);
    let all = samples(ctx, cfg.r, &mut report)?;
    let bound = distance_bound(cfg.r, delta);
    report.measure("T", travel_bound(cfg.r, delta));
    report.measure("diameter_bound", bound);
    report.measure("M", ctx.delta.m.to_string());
    report.measure("M_squared", ctx.delta.m_squared().to_string());
    report.table = Table::new(&[
        "eta",
        "point",
        "witness",
        "multiplicity",
        "sigma",
        "model",
        "tail_class",
        "t0",
        "t1",
        "travel_bound",
    ]);
    let mut rows = Vec::new();
    for s in &all {
        let name = ctx.oracle().render(&s.base);
        let tails = tail_partition(&s.models, cfg.min_window)?;
        let max_rho = max_class_rho_s(&s.models, &tails, cfg.min_window)?;
        report.check(
            &format!("class_count[{name}]"),
            (tails.num_classes as u128) <= ctx.delta.m_squared(),
            !s.exact,
            format!(
                "{} tail classes, M² = {}",
                tails.num_classes,
                ctx.delta.m_squared()
            ),
        );
        report.check(
            &format!("class_diameter[{name}]"),
            max_rho.is_some_and(|d| bound.bounds(d as u64)),
            !s.exact,
            format!("max within-class ρ_s {max_rho:?}, bound {bound}"),
        );

        let pairs: Vec<GeneralTubularReport> = s
            .ball
            .points
            .par_iter()
            .map(|p| {
                let window = p.surrogate.depth.min(s.eta.depth) / 2;
                check_tubular_general(
                    &ctx.ball,
                    &Word::empty(),
                    &p.surrogate,
                    &p.witness,
                    &s.eta,
                    delta,
                    window,
                )
            })
            .collect::<Result<_>>()?;
        let failures = pairs
            .iter()
            .filter(|p| !(p.ok_travel && p.ok_bound))
            .count();
        report.check(
            &format!("travel_pairs[{name}]"),
            failures == 0,
            !s.exact,
            format!("{failures} points without a fellow-travel pair inside 2(|g| + 3δ + 2)"),
        );
        let (mut max_t0, mut max_t1) = (0, 0);
        for (i, p) in s.ball.points.iter().enumerate() {
            let (t0, t1) = pairs[i]
                .pair
                .map_or((String::new(), String::new()), |(a, b)| {
                    max_t0 = max_t0.max(a);
                    max_t1 = max_t1.max(b);
                    (a.to_string(), b.to_string())
                });
            report.table.push(vec![
                name.clone(),
                i.to_string(),
                ctx.oracle().render(&p.witness),
                p.multiplicity.to_string(),
                ctx.oracle().render(&s.sigma[i].letters),
                s.models[i].render(),
                tails.class_of[i].to_string(),
                t0,
                t1,
                pairs[i].bound.to_string(),
            ]);
        }
        rows.push(TailBallRow {
            eta: name,
            points: s.len(),
            tail_classes: tails.num_classes,
            max_within_class_rho_s: max_rho,
            max_t0,
            max_t1,
        });
    }
    report.measure("per_eta", rows);
    Ok(report)
}

/// `ρ ≤ ρ_s` between boundary points and their σ̂.
pub fn audit_claim(ctx: &GroupContext) -> Result<ExperimentReport> {
    let cfg = &ctx.config;
    let mut report = ExperimentReport::new("claim", cfg, &ctx.delta);
    let all = samples(ctx, cfg.r, &mut report)?;
    report.table = Table::new(&["eta", "p", "q", "rho", "rho_s", "searched", "exact"]);
    let (mut checked, mut violations, mut unresolved) = (0usize, 0usize, 0usize);
    let mut max_rho = 0;
    for s in &all {
        let name = ctx.oracle().render(&s.base);
        let pairs: Vec<(usize, usize)> = match &cfg.zeta {
            Some(z) => {
                let g = ctx.oracle().word(z)?;
                if g.len() > cfg.r {
                    return Err(Error::OutOfRange(format!(
                        "ζ = {z} lies outside the radius-{} ball",
                        cfg.r
                    )));
                }
                let q = s.locate(ctx, &g)?.ok_or_else(|| {
                    Error::OutOfRange(format!("ζ = {z} was not found among the points"))
                })?;
                vec![(0, q)]
            }
            None => (0..s.len())
                .flat_map(|p| (p + 1..s.len()).map(move |q| (p, q)))
                .collect(),
        };
        for (p, q) in pairs {
            let rs = rho_s_with(&s.models[p], &s.models[q], cfg.min_window)?;
            let Some(bound) = rs.value else {
                checked += 1;
                report.table.push(vec![
                    name.clone(),
                    p.to_string(),
                    q.to_string(),
                    String::new(),
                    "inf".into(),
                    "0".into(),
                    rs.exact.to_string(),
                ]);
                continue;
            };
            let sd = schreier_distance(ctx, s, p, q, bound)?;
            checked += 1;
            match sd.distance {
                Some(d) => max_rho = max_rho.max(d),
                None if sd.searched >= bound => {
                    violations += 1;
                    report.check(
                        &format!("rho_le_rho_s[{name}:{p},{q}]"),
                        false,
                        !rs.exact,
                        format!("no element of length ≤ {bound} carries point {p} to point {q}"),
                    );
                }
                None => unresolved += 1,
            }
            report.table.push(vec![
                name.clone(),
                p.to_string(),
                q.to_string(),
                sd.distance.map_or(String::new(), |d| d.to_string()),
                bound.to_string(),
                sd.searched.to_string(),
                rs.exact.to_string(),
            ]);
        }
    }
    if unresolved > 0 {
        report.caveat("some pairs were not resolved: the Schreier search is limited by the ball");
    }
    report.check(
        "rho_le_rho_s",
        violations == 0,
        !ctx.exact_mode(),
        format!("{checked} pairs, {violations} violations, {unresolved} unresolved"),
    );
    report.measure("pairs", checked);
    report.measure("violations", violations);
    report.measure("unresolved", unresolved);
    report.measure("max_rho", max_rho);
    Ok(report)
}

/// Random cyclically reduced word of length in `1..=max_len`.
fn random_cyclic(
    rng: &mut ChaCha8Rng,
    letters: usize,
    inv: &dyn Fn(u8) -> u8,
    max_len: usize,
) -> Word {
    loop {
        let len = rng.gen_range(1..=max_len);
        let mut w: Vec<u8> = Vec::with_capacity(len);
        while w.len() < len {
            let l = rng.gen_range(0..letters) as u8;
            if w.last().is_none_or(|&p| inv(p) != l) {
                w.push(l);
            }
        }
        if len == 1 || inv(w[len - 1]) != w[0] {
            return Word(w);
        }
    }
}

/// Either `σ_{gη} = s(σ_η)` or `σ_η = s(σ_{gη})`, for sampled periodic `η`
/// and every generator `g` of a free group.
pub fn audit_free_shift(ctx: &GroupContext) -> Result<ExperimentReport> {
    let cfg = &ctx.config;
    if !matches!(ctx.oracle().family(), Family::FreeGroup { .. }) {
        return Err(Error::Config(
            "the free-shift audit needs a free group".into(),
        ));
    }
    let mut report = ExperimentReport::new("free-shift", cfg, &ctx.delta);
    let oracle = ctx.oracle();
    let alphabet = Arc::new(oracle.alphabet().clone());
    let inv = |l: u8| alphabet.inv(l);
    let k = alphabet.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut seeds = Vec::with_capacity(cfg.sample);
    while seeds.len() < cfg.sample {
        let base = random_cyclic(&mut rng, k, &inv, 4);
        let pre_len = rng.gen_range(0..=3);
        let mut pre: Vec<u8> = Vec::new();
        while pre.len() < pre_len {
            let l = rng.gen_range(0..k) as u8;
            if pre.last().is_none_or(|&p| inv(p) != l) {
                pre.push(l);
            }
        }
        if pre.last().is_some_and(|&p| inv(p) == base.letters()[0]) {
            continue;
        }
        seeds.push(PeriodicSeed {
            translate: Word(pre),
            base,
        });
    }

    report.table = Table::new(&[
        "sample",
        "eta",
        "g",
        "sigma_g_eta",
        "first",
        "second",
        "truncated_ok",
    ]);
    let (n, m) = (cfg.depth, cfg.horizon);
    let rows: Vec<Vec<(String, bool, bool, bool)>> = seeds
        .par_iter()
        .map(|seed| {
            let x = exact_sigma(oracle, &alphabet, &Word::empty(), seed)?;
            let eta = RaySurrogate {
                word: x.prefix(m),
                depth: m,
                margin: cfg.margin,
                seed: Some(seed.clone()),
            };
            let s_eta = phi_hat(&ctx.ball, &eta, n + 1, m, 0)?.letters;
            alphabet
                .letters()
                .map(|g| {
                    let gw = Word(vec![g]);
                    let y = exact_sigma(oracle, &alphabet, &gw, seed)?;
                    let first = x.shift().is_some_and(|s| s == y);
                    let second = y.shift().is_some_and(|s| s == x);
                    let moved = translate_ray(&ctx.ball, &gw, &eta, n, m)?;
                    let h = moved.depth.min(m);
                    let s_g = phi_hat(&ctx.ball, &moved, (n + 1).min(h), h, 0)?.letters;
                    let t_first = s_g.letters()[..n] == s_eta.letters()[1..=n];
                    let t_second = s_eta.letters()[..n] == s_g.letters()[1..=n];
                    Ok((y.render(), first, second, t_first || t_second))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let (mut violations, mut truncated_violations, mut both) = (0usize, 0usize, 0usize);
    for (i, (seed, row)) in seeds.iter().zip(&rows).enumerate() {
        let eta = format!(
            "{}({})",
            oracle.render(&seed.translate),
            oracle.render(&seed.base)
        );
        for (g, (sg, first, second, t_ok)) in alphabet.letters().zip(row) {
            violations += usize::from(!first && !second);
            both += usize::from(*first && *second);
            truncated_violations += usize::from(!t_ok);
            report.table.push(vec![
                i.to_string(),
                eta.clone(),
                alphabet.symbol(g).to_string(),
                sg.clone(),
                first.to_string(),
                second.to_string(),
                t_ok.to_string(),
            ]);
        }
    }
    let total = seeds.len() * k;
    report.check(
        "shift_disjunction",
        violations == 0,
        false,
        format!("{violations} violations over {total} (η, g) pairs"),
    );
    report.check(
        "shift_disjunction_truncated",
        truncated_violations == 0,
        true,
        format!("{truncated_violations} violations on length-{n} truncations at horizon {m}"),
    );
    report.measure("pairs", total);
    report.measure("violations", violations);
    report.measure("truncated_violations", truncated_violations);
    report.measure("both_alternatives", both);
    Ok(report)
}

/// Shift closure of the given models, deduplicated, in first-seen order.
pub(crate) fn shift_closure(seeds: &[SeqModel]) -> Vec<SeqModel> {
    let mut index: HashMap<SeqModel, usize> = HashMap::new();
    let mut out = Vec::new();
    for s in seeds {
        let mut x = Some(s.clone());
        while let Some(y) = x {
            if index.contains_key(&y) {
                break;
            }
            index.insert(y.clone(), out.len());
            x = y.shift();
            out.push(y);
        }
    }
    out
}

/// Pulls a scale-`T` cover of the σ̂ carrier back to boundary points and
/// counts the classes met by boundary balls.
pub fn audit_asdim_boundary(ctx: &GroupContext) -> Result<ExperimentReport> {
    let cfg = &ctx.config;
    let delta = ctx.delta.used;
    let mut report = ExperimentReport::new("asdim", cfg, &ctx.delta);
    let all = samples(ctx, cfg.r, &mut report)?;
    let scale = distance_bound(cfg.r, delta).ceil() as usize;
    let seeds: Vec<SeqModel> = all.iter().flat_map(|s| s.models.iter().cloned()).collect();
    let carrier = shift_closure(&seeds);
    let cover = asdim_cover(&carrier, scale)?;
    let audit = audit_cover(&cover, scale, &carrier)?;
    let position: HashMap<&SeqModel, usize> =
        carrier.iter().enumerate().map(|(i, x)| (x, i)).collect();

    let c = audit.max_ball_classes as u128;
    let limit = c.saturating_mul(ctx.delta.m_squared());
    report.measure("scale_T", scale);
    report.measure("carrier_size", carrier.len());
    report.measure("cover_classes", cover.num_classes);
    report.measure("cover_audit", &audit);
    report.measure("C", audit.max_ball_classes);
    report.measure("C_times_M_squared", limit.to_string());
    report.measure(
        "theorem_bound_2M_squared",
        (2 * ctx.delta.m_squared()).to_string(),
    );
    report.check(
        "cover_diameter",
        audit.ok_diameter,
        false,
        format!(
            "max class diameter {:?}, bound 8T = {}",
            audit.max_diam, audit.diameter_bound
        ),
    );
    report.check(
        "cover_ball_classes",
        audit.max_ball_classes <= 4,
        false,
        format!("a T-ball meets at most {} classes", audit.max_ball_classes),
    );

    report.table = Table::new(&["eta", "point", "witness", "model", "class"]);
    let mut per_eta = Vec::new();
    for s in &all {
        let name = ctx.oracle().render(&s.base);
        let map: Vec<usize> = s.models.iter().map(|x| position[x]).collect();
        let pulled = cover.pull_back(
            &map,
            PartitionMeta {
                max_class_diameter: cover.meta.max_class_diameter,
                scale,
            },
        );
        for (i, p) in s.ball.points.iter().enumerate() {
            report.table.push(vec![
                name.clone(),
                i.to_string(),
                ctx.oracle().render(&p.witness),
                s.models[i].render(),
                cover.class_of[map[i]].to_string(),
            ]);
        }
        // the sample is the ρ-ball of radius r around η
        let met = pulled.num_classes;
        report.check(
            &format!("ball_classes[{name}]"),
            (met as u128) <= limit,
            !s.exact,
            format!("B(η, {}) meets {met} classes, C·M² = {limit}", cfg.r),
        );
        report.check(
            &format!("ball_classes_theorem[{name}]"),
            (met as u128) <= 2 * ctx.delta.m_squared(),
            !s.exact,
            format!(
                "B(η, {}) meets {met} classes, 2M² = {}",
                cfg.r,
                2 * ctx.delta.m_squared()
            ),
        );
        let worst = max_class_rho_s(&s.models, &pulled, cfg.min_window)?;
        report.check(
            &format!("class_rho_s_bounded[{name}]"),
            worst.is_some_and(|d| d <= audit.diameter_bound),
            !s.exact,
            format!(
                "within-class ρ_s {worst:?}, cover bound {}",
                audit.diameter_bound
            ),
        );
        per_eta.push((name, met));
    }
    report.measure("ball_classes", per_eta);
    Ok(report)
}

/// Tail equivalence pulled back to a boundary ball, and the finite
/// filtration converging to it.
pub fn audit_hyperfiniteness_witness(ctx: &GroupContext) -> Result<ExperimentReport> {
    let cfg = &ctx.config;
    let mut report = ExperimentReport::new("hyperfinite", cfg, &ctx.delta);
    report.caveat(
        "the intersection with the orbit relation is omitted: tail-related σ̂ are orbit-related",
    );
    let all = samples(ctx, cfg.r, &mut report)?;
    report.table = Table::new(&["eta", "n", "classes"]);
    let mut per_eta = Vec::new();
    for s in &all {
        let name = ctx.oracle().render(&s.base);
        let tails = tail_partition(&s.models, cfg.min_window)?;
        report.check(
            &format!("r0_classes[{name}]"),
            (tails.num_classes as u128) <= ctx.delta.m_squared(),
            !s.exact,
            format!(
                "{} classes of R_0, M² = {}",
                tails.num_classes,
                ctx.delta.m_squared()
            ),
        );
        let levels: BTreeSet<usize> = cfg.filtration.iter().copied().collect();
        let mut counts = Vec::new();
        let mut prev: Option<FinitePartition> = None;
        let mut monotone = true;
        for &n in &levels {
            let f = filtration_rn(&s.models, n, cfg.min_window)?;
            monotone &= f.refines(&tails) && prev.as_ref().is_none_or(|p| p.refines(&f));
            counts.push((n, f.num_classes));
            report
                .table
                .push(vec![name.clone(), n.to_string(), f.num_classes.to_string()]);
            prev = Some(f);
        }
        report.check(
            &format!("monotone[{name}]"),
            monotone,
            false,
            format!("class counts {counts:?}"),
        );
        // R_n stabilizes once n covers every preperiod and period
        let limit = s.models.iter().map(|x| x.render().len()).max().unwrap_or(0);
        let mut converged_at = None;
        for n in 0..=limit {
            if filtration_rn(&s.models, n, cfg.min_window)?.same_classes(&tails) {
                converged_at = Some(n);
                break;
            }
        }
        report.check(
            &format!("converges[{name}]"),
            converged_at.is_some(),
            false,
            format!("R_n equals R_0 from n = {converged_at:?}"),
        );
        per_eta.push(serde_json::json!({
            "eta": name,
            "r0_classes": tails.num_classes,
            "filtration": counts,
            "converged_at": converged_at,
        }));
    }
    report.measure("per_eta", per_eta);
    Ok(report)
}
