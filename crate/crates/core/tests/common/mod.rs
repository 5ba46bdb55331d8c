//! Brute-force reference implementations shared by the integration tests.
//! Nothing here goes through the crate's reduction or ball code.

#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

/// Every word of length exactly `n` over `k` letters (letters are ranks).
pub fn words_of_length(k: u8, n: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |l| {
                    let mut v = w.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
    }
    out
}

/// Counts freely reduced words of length at most `n` in the free group of
/// `rank`, with letters paired as `2i, 2i+1`.
pub fn free_reduced_count(rank: u8, n: usize) -> usize {
    (0..=n)
        .map(|len| {
            words_of_length(2 * rank, len)
                .into_iter()
                .filter(|w| w.windows(2).all(|p| p[0] ^ 1 != p[1]))
                .count()
        })
        .sum()
}

/// Reduces a word of `Z/2 * Z/3` over `a=0, b=1, B=2` with the rules
/// `aa → ε`, `bB, Bb → ε`, `bb → B`, `BB → b`.
pub fn z2z3_rewrite(w: &[u8]) -> Vec<u8> {
    let mut out: Vec<u8> = Vec::new();
    for &l in w {
        out.push(l);
        loop {
            let n = out.len();
            if n < 2 {
                break;
            }
            match (out[n - 2], out[n - 1]) {
                (0, 0) | (1, 2) | (2, 1) => {
                    out.truncate(n - 2);
                }
                (1, 1) => {
                    out.truncate(n - 2);
                    out.push(2);
                }
                (2, 2) => {
                    out.truncate(n - 2);
                    out.push(1);
                }
                _ => break,
            }
        }
    }
    out
}

/// Number of `Z/2 * Z/3` normal forms (alternating `a` and a single `b`/`B`)
/// per length, up to `n`.
pub fn z2z3_sphere_sizes(n: usize) -> Vec<usize> {
    (0..=n)
        .map(|len| {
            words_of_length(3, len)
                .into_iter()
                .filter(|w| z2z3_rewrite(w) == *w)
                .count()
        })
        .collect()
}

/// BFS distances in an explicit graph given as adjacency lists.
pub fn bfs(adj: &[Vec<usize>], src: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[src] = 0;
    let mut q = VecDeque::from([src]);
    while let Some(v) = q.pop_front() {
        for &u in &adj[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                q.push_back(u);
            }
        }
    }
    dist
}

/// All shortest paths (as vertex sequences) from `s` to `t`, given BFS
/// distances from both ends.
pub fn all_shortest_paths(
    adj: &[Vec<usize>],
    dist_from_s: &[usize],
    dt: &[usize],
    s: usize,
    t: usize,
) -> Vec<Vec<usize>> {
    let total = dist_from_s[t];
    let mut out = Vec::new();
    let mut stack = vec![vec![s]];
    while let Some(path) = stack.pop() {
        let v = *path.last().unwrap();
        if v == t {
            out.push(path);
            continue;
        }
        for &u in &adj[v] {
            if dist_from_s[u] == path.len() && dt[u] + path.len() == total {
                let mut p = path.clone();
                p.push(u);
                stack.push(p);
            }
        }
    }
    out
}

/// Maximal vertex-slimness over all geodesic triangles with one corner at
/// `root` and all sides of length at most `bound`, taking every geodesic for
/// every side. `dist[v]` holds BFS distances from `v`; rows must exist for
/// every vertex a side can visit.
pub fn brute_slimness(adj: &[Vec<usize>], dist: &[Vec<usize>], root: usize, bound: usize) -> usize {
    let n = dist.len();
    let mut paths: HashMap<(usize, usize), Vec<Vec<usize>>> = HashMap::new();
    let mut geos = |a: usize, b: usize| -> Vec<Vec<usize>> {
        paths
            .entry((a, b))
            .or_insert_with(|| all_shortest_paths(adj, &dist[a], &dist[b], a, b))
            .clone()
    };
    let defect = |side: &[usize], others: [&[usize]; 2]| -> usize {
        side.iter()
            .map(|&p| {
                others
                    .iter()
                    .flat_map(|o| o.iter())
                    .map(|&q| dist[p][q])
                    .min()
                    .unwrap()
            })
            .max()
            .unwrap()
    };
    let mut worst = 0;
    for y in 0..n {
        for z in y..n {
            if dist[root][y] > bound || dist[root][z] > bound || dist[y][z] > bound {
                continue;
            }
            let (ga, gb, gc) = (geos(root, y), geos(root, z), geos(y, z));
            for a in &ga {
                for b in &gb {
                    for c in &gc {
                        worst = worst
                            .max(defect(a, [b, c]))
                            .max(defect(b, [a, c]))
                            .max(defect(c, [a, b]));
                    }
                }
            }
        }
    }
    worst
}
