use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use hyperbound::group::{Alphabet, Word};
use hyperbound::shift_space::{
    asdim_cover, audit_cover, filtration_rn, rho_s, tail_partition, CarrierFile, FinitePartition,
    SeqModel,
};
use proptest::prelude::*;

fn alphabet() -> Arc<Alphabet> {
    Arc::new(Alphabet::standard(&['a', 'b'], &[]).unwrap())
}

/// `ρ_s` by comparing long unrolled prefixes of every pair of shifts.
fn brute_rho(x: &SeqModel, y: &SeqModel) -> Option<usize> {
    let span = 2 * (x.render().len() + y.render().len()) + 2;
    let window = span + x.period().unwrap() * y.period().unwrap();
    let xs = x.prefix(span + window);
    let ys = y.prefix(span + window);
    (0..=2 * span).find(|&total| {
        (0..=total.min(span)).any(|n0| {
            let n1 = total - n0;
            n1 <= span && xs.letters()[n0..n0 + window] == ys.letters()[n1..n1 + window]
        })
    })
}

fn periodic() -> impl Strategy<Value = SeqModel> {
    (
        proptest::collection::vec(0u8..4, 0..5),
        proptest::collection::vec(0u8..4, 1..4),
    )
        .prop_map(|(p, u)| SeqModel::periodic(alphabet(), Word(p), Word(u)).unwrap())
}

/// Two-letter models so that tails coincide often.
fn sparse_periodic() -> impl Strategy<Value = SeqModel> {
    (
        proptest::collection::vec(0u8..2, 0..5),
        proptest::collection::vec(0u8..2, 1..3),
    )
        .prop_map(|(p, u)| SeqModel::periodic(alphabet(), Word(p), Word(u)).unwrap())
}

proptest! {
    #[test]
    fn rho_matches_brute_force(x in periodic(), y in periodic()) {
        prop_assert_eq!(rho_s(&x, &y).unwrap().value, brute_rho(&x, &y));
    }

    #[test]
    fn rho_matches_brute_force_on_close_pairs(x in sparse_periodic(), y in sparse_periodic()) {
        prop_assert_eq!(rho_s(&x, &y).unwrap().value, brute_rho(&x, &y));
    }

    #[test]
    fn rho_is_an_extended_metric(items in proptest::collection::vec(sparse_periodic(), 1..=12)) {
        let d: Vec<Vec<Option<usize>>> =
            items.iter().map(|x| items.iter().map(|y| rho_s(x, y).unwrap().value).collect()).collect();
        let n = items.len();
        for i in 0..n {
            prop_assert_eq!(d[i][i], Some(0));
            for j in 0..n {
                prop_assert_eq!(d[i][j], d[j][i]);
                prop_assert_eq!(d[i][j] == Some(0), items[i] == items[j]);
                for k in 0..n {
                    if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                        prop_assert!(d[i][j].is_some_and(|c| c <= a + b));
                    }
                }
            }
        }
    }

    #[test]
    fn filtration_is_monotone_and_converges(items in proptest::collection::vec(sparse_periodic(), 0..=12)) {
        let tail = tail_partition(&items, 8).unwrap();
        let mut prev = filtration_rn(&items, 0, 8).unwrap();
        for n in 1..=10 {
            let next = filtration_rn(&items, n, 8).unwrap();
            prop_assert!(prev.refines(&next));
            prop_assert!(next.refines(&tail));
            prev = next;
        }
        prop_assert!(prev.same_classes(&tail));
    }

    #[test]
    fn linked_pairs_are_close(items in proptest::collection::vec(sparse_periodic(), 2..=8), n in 0usize..5) {
        // a direct link s^i x = s^j y with i, j <= n costs at most 2n
        let p = filtration_rn(&items, n, 8).unwrap();
        for i in 0..items.len() {
            for j in 0..items.len() {
                let pair = filtration_rn(&[items[i].clone(), items[j].clone()], n, 8).unwrap();
                if pair.num_classes == 1 {
                    prop_assert!(rho_s(&items[i], &items[j]).unwrap().value.is_some_and(|d| d <= 2 * n));
                    prop_assert_eq!(p.class_of[i], p.class_of[j]);
                }
            }
        }
    }
}

/// All shifts of the given models, deduplicated, in first-seen order.
fn shift_closure(seeds: &[SeqModel]) -> Vec<SeqModel> {
    let mut seen: HashMap<SeqModel, ()> = HashMap::new();
    let mut out = Vec::new();
    for s in seeds {
        let mut x = Some(s.clone());
        while let Some(y) = x {
            if seen.insert(y.clone(), ()).is_some() {
                break;
            }
            x = y.shift();
            out.push(y);
        }
    }
    out
}

/// Class diameters and ball-class counts by BFS on the undirected shift graph.
fn brute_audit(items: &[SeqModel], p: &FinitePartition, t: usize) -> (Option<usize>, usize) {
    let index: HashMap<&SeqModel, usize> = items.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let mut adj = vec![Vec::new(); items.len()];
    for (i, x) in items.iter().enumerate() {
        if let Some(s) = x.shift() {
            let j = index[&s];
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    let dist: Vec<Vec<usize>> = (0..items.len())
        .map(|s| {
            let mut d = vec![usize::MAX; items.len()];
            d[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(x) = q.pop_front() {
                for &y in &adj[x] {
                    if d[y] == usize::MAX {
                        d[y] = d[x] + 1;
                        q.push_back(y);
                    }
                }
            }
            d
        })
        .collect();
    let mut diam = Some(0);
    for c in p.classes() {
        for &i in &c {
            for &j in &c {
                diam =
                    diam.and_then(|m: usize| (dist[i][j] != usize::MAX).then(|| m.max(dist[i][j])));
            }
        }
    }
    let c = (0..items.len())
        .map(|x| {
            let mut met: Vec<usize> = (0..items.len())
                .filter(|&y| dist[x][y] <= t)
                .map(|y| p.class_of[y])
                .collect();
            met.sort_unstable();
            met.dedup();
            met.len()
        })
        .max()
        .unwrap_or(0);
    (diam, c)
}

fn truncated_seeds() -> impl Strategy<Value = Vec<SeqModel>> {
    proptest::collection::vec(proptest::collection::vec(0u8..4, 0..14), 1..8).prop_map(|ws| {
        ws.into_iter()
            .map(|w| SeqModel::truncated(alphabet(), Word(w)).unwrap())
            .collect()
    })
}

fn periodic_seeds() -> impl Strategy<Value = Vec<SeqModel>> {
    proptest::collection::vec(
        (
            proptest::collection::vec(0u8..3, 0..12),
            proptest::collection::vec(0u8..3, 1..12),
        ),
        1..6,
    )
    .prop_map(|v| {
        v.into_iter()
            .map(|(p, u)| SeqModel::periodic(alphabet(), Word(p), Word(u)).unwrap())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cover_audit_matches_brute_force_on_trees(seeds in truncated_seeds(), t in 1usize..4) {
        let items = shift_closure(&seeds);
        let p = asdim_cover(&items, t).unwrap();
        let audit = audit_cover(&p, t, &items).unwrap();
        let (diam, c) = brute_audit(&items, &p, t);
        prop_assert_eq!(audit.max_diam, diam);
        prop_assert_eq!(p.meta.max_class_diameter, diam);
        prop_assert_eq!(audit.max_ball_classes, c);
        prop_assert!(diam.is_some_and(|d| d <= 6 * t - 2));
        prop_assert!(c <= 2);
    }

    #[test]
    fn cover_audit_matches_brute_force_with_cycles(seeds in periodic_seeds(), t in 1usize..4) {
        let items = shift_closure(&seeds);
        let p = asdim_cover(&items, t).unwrap();
        let audit = audit_cover(&p, t, &items).unwrap();
        let (diam, c) = brute_audit(&items, &p, t);
        prop_assert_eq!(audit.max_diam, diam);
        prop_assert_eq!(audit.max_ball_classes, c);
        prop_assert!(diam.is_some_and(|d| d <= 6 * t - 2));
        prop_assert!(c <= 4);
    }
}

fn parse_all(words: &[&str]) -> Vec<SeqModel> {
    let a = alphabet();
    words
        .iter()
        .map(|s| SeqModel::parse(a.clone(), s).unwrap())
        .collect()
}

#[test]
fn line_carriers_meet_two_classes() {
    for t in [1, 2, 4, 8] {
        let items = shift_closure(&parse_all(&[&"a".repeat(200)]));
        let p = asdim_cover(&items, t).unwrap();
        let audit = audit_cover(&p, t, &items).unwrap();
        assert_eq!(audit.max_ball_classes, 2, "T = {t}");
        assert!(audit.ok_diameter);
        assert_eq!(brute_audit(&items, &p, t).1, 2);
    }
}

#[test]
fn branching_carrier_golden() {
    let items = shift_closure(&parse_all(&["ababababab(A)", "bababababa(A)"]));
    assert_eq!(items.len(), 21);
    let p = asdim_cover(&items, 2).unwrap();
    let audit = audit_cover(&p, 2, &items).unwrap();
    assert_eq!(
        brute_audit(&items, &p, 2),
        (audit.max_diam, audit.max_ball_classes)
    );
    assert_eq!(audit.max_ball_classes, 2);
    assert_eq!(audit.max_diam, Some(6));
    assert_eq!(p.num_classes, 5);
}

#[test]
fn long_cycle_is_cut() {
    // a single cycle of length 12 with T = 1 exceeds the 4T root threshold
    let items = shift_closure(&parse_all(&["(aaaaaaaaaaab)"]));
    assert_eq!(items.len(), 12);
    let p = asdim_cover(&items, 1).unwrap();
    let audit = audit_cover(&p, 1, &items).unwrap();
    assert_eq!(
        brute_audit(&items, &p, 1),
        (audit.max_diam, audit.max_ball_classes)
    );
    assert!(audit.ok_diameter);
    assert!(audit.max_ball_classes <= 4);
    // short enough at T = 3: one class
    assert_eq!(asdim_cover(&items, 3).unwrap().num_classes, 1);
}

#[test]
fn free_tails_form_one_class() {
    let items = parse_all(&["(a)", "b(a)", "B(a)", "bb(a)", "Ab(a)"]);
    let p = tail_partition(&items, 8).unwrap();
    assert_eq!(p.num_classes, 1);
    for x in &items {
        assert!(rho_s(&items[0], x).unwrap().exact);
    }
}

#[test]
fn carrier_file_round_trip() {
    let items = shift_closure(&parse_all(&["ab(ba)", "aBBb", "(ab)"]));
    let file = CarrierFile::of(&alphabet(), &items);
    let back = CarrierFile::from_json(&file.to_json().unwrap()).unwrap();
    assert_eq!(back.models().unwrap(), items);
}
