//! End-to-end acceptance criteria. Runs sequentially and prints one
//! PASS/FAIL line per criterion; exits nonzero if any fails.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use hyperbound::cayley::{build_ball, estimate_delta, DeltaParams};
use hyperbound::experiments::{
    audit_asdim_boundary, audit_claim, audit_free_shift, audit_hyperfiniteness_witness,
    audit_lemma_bound, audit_substitution, audit_tubular, ExperimentReport, GroupContext,
    RunConfig, Status,
};
use hyperbound::group::{Alphabet, Preset, Word};
use hyperbound::rays::{make_periodic_ray, phi_hat};
use hyperbound::shift_space::{asdim_cover, audit_cover, SeqModel};
use hyperbound::Rational;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn context(preset: Preset, f: impl FnOnce(&mut RunConfig)) -> GroupContext {
    let mut cfg = RunConfig::for_preset(preset);
    f(&mut cfg);
    GroupContext::new(Arc::new(preset.oracle()), cfg).unwrap()
}

fn assertion(report: &ExperimentReport, prefix: &str) -> Vec<Status> {
    report
        .assertions
        .iter()
        .filter(|a| a.name.starts_with(prefix))
        .map(|a| a.status)
        .collect()
}

fn all_pass(report: &ExperimentReport, prefix: &str) -> bool {
    let s = assertion(report, prefix);
    !s.is_empty() && s.iter().all(|&x| x == Status::Pass)
}

fn no_fail(report: &ExperimentReport) -> Result<(), String> {
    ensure(
        report.status() != Status::Fail,
        format!("{} failed: {:?}", report.experiment, report.assertions),
    )?;
    ensure(
        report.status() == Status::Pass || !report.caveats.is_empty(),
        format!("{} warns without caveats", report.experiment),
    )
}

/// Reduced words of the free group up to `n`, as raw letters.
fn reduced_words(alphabet: &Alphabet, n: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &frontier {
            for l in alphabet.letters() {
                if w.letters().last().is_none_or(|&p| alphabet.inv(p) != l) {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn shift_closure(seeds: &[SeqModel]) -> Vec<SeqModel> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for s in seeds {
        let mut x = Some(s.clone());
        while let Some(y) = x {
            if !seen.insert(y.clone()) {
                break;
            }
            x = y.shift();
            out.push(y);
        }
    }
    out
}

fn peak_rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    status
        .lines()
        .find(|l| l.starts_with("VmHWM:"))?
        .split_whitespace()
        .nth(1)?
        .parse()
        .ok()
}

fn free_group_exactness() -> Outcome {
    let oracle = Arc::new(Preset::F2.oracle());
    let start = Instant::now();
    let ball = build_ball(&oracle, 6).unwrap();
    let est = estimate_delta(&ball, DeltaParams::new(6, 2_200_000, 1)).unwrap();
    let took = start.elapsed();
    ensure(
        est.scope.triangles_exhaustive,
        "triangle scan not exhaustive",
    )?;
    ensure(
        est.delta_slim == Rational::integer(0),
        format!("δ = {}", est.delta_slim),
    )?;
    ensure(took < Duration::from_secs(10), format!("δ took {took:?}"))?;

    let mut checked = 0;
    for w in reduced_words(oracle.alphabet(), 3).iter().skip(1) {
        let cyclic =
            w.len() == 1 || oracle.alphabet().inv(w.letters()[w.len() - 1]) != w.letters()[0];
        if !cyclic {
            continue;
        }
        let eta = make_periodic_ray(&ball, w, 6, 0).unwrap();
        for m in 1..=6 {
            let s = phi_hat(&ball, &eta, m, m, 0).unwrap();
            ensure(
                s.letters == eta.word.prefix(m),
                format!("phi differs at horizon {m}"),
            )?;
            checked += 1;
        }
    }

    let ctx = context(Preset::F2, |c| c.seed = 7);
    let rep = audit_free_shift(&ctx).unwrap();
    ensure(
        rep.measured["pairs"] == 400,
        "expected 100 rays × 4 generators",
    )?;
    ensure(
        all_pass(&rep, "shift_disjunction"),
        format!("{:?}", rep.assertions),
    )?;
    Ok(format!(
        "δ = 0 exhaustive in {took:.1?}; {checked} phi horizons; 400 shift pairs, 0 violations"
    ))
}

fn tubular_lemma() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    for preset in [Preset::Z2Z3, Preset::Genus2] {
        let ctx = context(preset, |c| c.ball_radius = 6);
        let rep = audit_tubular(&ctx, 6).unwrap();
        ensure(
            rep.caveats.is_empty(),
            format!("{preset}: {:?}", rep.caveats),
        )?;
        ensure(
            rep.status() == Status::Pass,
            format!("{preset}: {:?}", rep.assertions),
        )?;
        notes.push(format!(
            "{preset}: {} same-base pairs (gap ≤ {}), {} general pairs",
            rep.measured["same_base_pairs"],
            rep.measured["same_base_max_gap"],
            rep.measured["general_pairs"]
        ));
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(300), format!("took {took:?}"))?;
    Ok(format!("{} in {took:.1?}", notes.join("; ")))
}

fn substitution_lemma() -> Outcome {
    let mut notes = Vec::new();
    for preset in [Preset::F2, Preset::Z2Z3, Preset::Genus2] {
        let ctx = context(preset, |c| c.ball_radius = 6);
        let rep = audit_substitution(&ctx, 6, 5).unwrap();
        ensure(
            rep.status() == Status::Pass,
            format!("{preset}: {:?}", rep.assertions),
        )?;
        notes.push(format!("{preset}: {}", rep.measured["substitutions"]));
    }
    Ok(format!(
        "substitutions without violations: {}",
        notes.join(", ")
    ))
}

fn lemma_bound() -> Outcome {
    let mut notes = Vec::new();
    for preset in Preset::ALL {
        for r in [1, 2] {
            let ctx = context(preset, |c| c.r = r);
            let rep = audit_lemma_bound(&ctx).unwrap();
            ensure(
                all_pass(&rep, "class_count"),
                format!("{preset} r={r}: {:?}", rep.assertions),
            )?;
            ensure(
                all_pass(&rep, "class_diameter"),
                format!("{preset} r={r}: {:?}", rep.assertions),
            )?;
            ensure(
                all_pass(&rep, "travel_pairs"),
                format!("{preset} r={r}: {:?}", rep.assertions),
            )?;
            no_fail(&rep)?;
            let classes: Vec<String> = rep.measured["per_eta"]
                .as_array()
                .unwrap()
                .iter()
                .map(|e| e["tail_classes"].to_string())
                .collect();
            notes.push(format!("{preset}/r{r}:{}", classes.join("+")));
        }
    }
    let ctx = context(Preset::F2, |c| {
        c.eta = vec!["a".into()];
        c.r = 1;
    });
    let rep = audit_lemma_bound(&ctx).unwrap();
    let row = &rep.measured["per_eta"][0];
    ensure(row["tail_classes"] == 1, "f2: expected one class")?;
    ensure(
        row["max_within_class_rho_s"]
            .as_u64()
            .is_some_and(|d| d <= 2),
        "f2: diameter above 2",
    )?;
    ensure(
        rep.measured["diameter_bound"] == "24",
        "f2: bound is not 24",
    )?;
    Ok(format!(
        "tail classes {}; f2 r=1: 1 class, diameter 2 ≤ 24",
        notes.join(" ")
    ))
}

fn claim() -> Outcome {
    let (mut pairs, mut unresolved) = (0, 0);
    for preset in Preset::ALL {
        for r in [1, 2] {
            let rep = audit_claim(&context(preset, |c| c.r = r)).unwrap();
            no_fail(&rep)?;
            if rep.config.group != "genus2" {
                ensure(
                    rep.status() == Status::Pass,
                    format!("{preset}: exact pairs must pass"),
                )?;
            }
            pairs += rep.measured["pairs"].as_u64().unwrap();
            unresolved += rep.measured["unresolved"].as_u64().unwrap();
        }
    }
    Ok(format!(
        "{pairs} pairs, 0 FAIL, {unresolved} unresolved (search limited by the ball)"
    ))
}

fn cover_audit() -> Outcome {
    let oracle = Preset::F2.oracle();
    let alphabet = Arc::new(oracle.alphabet().clone());
    let tree: Vec<SeqModel> = reduced_words(&alphabet, 9)
        .into_iter()
        .map(|w| SeqModel::truncated(alphabet.clone(), w).unwrap())
        .collect();
    let line = shift_closure(&[SeqModel::truncated(
        alphabet.clone(),
        oracle.word(&"ab".repeat(2000)).unwrap(),
    )
    .unwrap()]);
    let mut periodic_seeds = Vec::new();
    for pre in reduced_words(&alphabet, 3) {
        for base in reduced_words(&alphabet, 3).into_iter().skip(1) {
            periodic_seeds.push(SeqModel::periodic(alphabet.clone(), pre.clone(), base).unwrap());
        }
    }
    let cyclic = shift_closure(&periodic_seeds);
    let mut notes = Vec::new();
    for (name, items) in [("tree", &tree), ("line", &line), ("cycles", &cyclic)] {
        ensure(items.len() <= 50_000, format!("{name} carrier too large"))?;
        for t in [2, 4, 8] {
            let p = asdim_cover(items, t).unwrap();
            let a = audit_cover(&p, t, items).unwrap();
            ensure(a.shift_closed, format!("{name}: not shift-closed"))?;
            ensure(
                a.max_diam.is_some_and(|d| d <= 8 * t),
                format!("{name} T={t}: diameter {:?}", a.max_diam),
            )?;
            ensure(
                a.max_ball_classes <= 4,
                format!("{name} T={t}: C = {}", a.max_ball_classes),
            )?;
            if name == "line" {
                ensure(
                    a.max_ball_classes == 2,
                    format!("line T={t}: C = {}", a.max_ball_classes),
                )?;
            }
            notes.push(format!(
                "{name}/T{t}: diam {} C {}",
                a.max_diam.unwrap(),
                a.max_ball_classes
            ));
        }
    }
    Ok(format!(
        "carriers of {}, {}, {} sequences; {}",
        tree.len(),
        line.len(),
        cyclic.len(),
        notes.join(", ")
    ))
}

fn asdim_instantiation() -> Outcome {
    let ctx = context(Preset::F2, |c| c.r = 1);
    ensure(
        ctx.delta.used == Rational::integer(0) && ctx.delta.m == 1,
        "expected δ = 0, M = 1",
    )?;
    let rep = audit_asdim_boundary(&ctx).unwrap();
    ensure(
        rep.status() == Status::Pass,
        format!("{:?}", rep.assertions),
    )?;
    ensure(rep.measured["theorem_bound_2M_squared"] == "2", "2M² ≠ 2")?;
    let met: Vec<u64> = rep.measured["ball_classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e[1].as_u64().unwrap())
        .collect();
    ensure(met.iter().all(|&m| m <= 2), format!("classes met {met:?}"))?;
    for preset in [Preset::F3, Preset::Z2Z3, Preset::Genus2] {
        no_fail(&audit_asdim_boundary(&context(preset, |c| c.r = 1)).unwrap())?;
    }
    Ok(format!(
        "1-balls meet {met:?} classes ≤ 2 = 2M², so d + 1 = 2 with d = 1"
    ))
}

fn hyperfinite_witness() -> Outcome {
    let mut notes = Vec::new();
    for preset in Preset::ALL {
        for r in [1, 2] {
            let rep = audit_hyperfiniteness_witness(&context(preset, |c| c.r = r)).unwrap();
            for prefix in ["monotone", "converges", "r0_classes"] {
                ensure(
                    all_pass(&rep, prefix),
                    format!("{preset} r={r}: {:?}", rep.assertions),
                )?;
            }
            no_fail(&rep)?;
            if r == 2 {
                let seqs: Vec<String> = rep.measured["per_eta"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|e| {
                        let counts: Vec<String> = e["filtration"]
                            .as_array()
                            .unwrap()
                            .iter()
                            .map(|p| p[1].to_string())
                            .collect();
                        counts.join(",")
                    })
                    .collect();
                notes.push(format!("{preset}: {}", seqs.join(" / ")));
            }
        }
    }
    Ok(format!(
        "class counts over n = 0,1,2,4,8: {}",
        notes.join("; ")
    ))
}

fn performance() -> Outcome {
    let start = Instant::now();
    let ball = build_ball(&Arc::new(Preset::F2.oracle()), 10).unwrap();
    let f2 = start.elapsed();
    ensure(ball.len() == 118_097, format!("{} vertices", ball.len()))?;
    ensure(
        f2 < Duration::from_secs(5),
        format!("f2 radius 10 took {f2:?}"),
    )?;
    let rss = peak_rss_kib().ok_or("no /proc/self/status")?;
    ensure(rss < 1024 * 1024, format!("peak RSS {rss} KiB"))?;
    drop(ball);
    let start = Instant::now();
    let ball = build_ball(&Arc::new(Preset::Genus2.oracle()), 6).unwrap();
    let g2 = start.elapsed();
    ensure(
        g2 < Duration::from_secs(60),
        format!("genus2 radius 6 took {g2:?}"),
    )?;
    Ok(format!(
        "f2 radius 10: 118097 vertices in {f2:.2?}, peak RSS {} MiB; genus2 radius 6: {} vertices in {g2:.2?}",
        rss / 1024,
        ball.len()
    ))
}

fn determinism() -> Outcome {
    let run = || -> Vec<String> {
        let mut out = Vec::new();
        for preset in [Preset::F2, Preset::Z2Z3, Preset::Genus2] {
            let ctx = context(preset, |c| {
                c.seed = 3;
                c.r = 2;
            });
            let mut reports = vec![
                audit_lemma_bound(&ctx).unwrap(),
                audit_claim(&ctx).unwrap(),
                audit_asdim_boundary(&ctx).unwrap(),
                audit_hyperfiniteness_witness(&ctx).unwrap(),
            ];
            if preset == Preset::F2 {
                reports.push(audit_free_shift(&ctx).unwrap());
            }
            for mut r in reports {
                r.stamp();
                r.timestamp = None;
                out.push(r.to_json().unwrap());
            }
        }
        out
    };
    let (a, b) = (run(), run());
    ensure(a == b, "reports differ between runs")?;
    Ok(format!(
        "{} reports byte-identical across two runs",
        a.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("free-group exactness", free_group_exactness),
        ("tubular lemma", tubular_lemma),
        ("substitution lemma", substitution_lemma),
        ("tail-class bound", lemma_bound),
        ("rho below rho_s", claim),
        ("shift-space cover", cover_audit),
        ("asdim instantiation", asdim_instantiation),
        ("hyperfiniteness witness", hyperfinite_witness),
        ("performance", performance),
        ("determinism", determinism),
    ];
    let only: Option<usize> = std::env::args().nth(1).and_then(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS {name} ({took:.1?}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2} FAIL {name} ({took:.1?}): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
