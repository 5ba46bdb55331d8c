use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{rho_s_with, FinitePartition, PartitionMeta, SeqModel, DEFAULT_MIN_WINDOW};
use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

/// The shift graph restricted to a shift-closed carrier: every node has at
/// most one successor, so each component is a tree hanging off a cycle or a
/// terminal node.
#[derive(Debug, Clone)]
pub struct ShiftForest {
    succ: Vec<u32>,
    preds: Vec<Vec<u32>>,
    /// Cycles in successor order.
    cycles: Vec<Vec<u32>>,
    /// `(cycle, position)` for cycle nodes.
    cycle_pos: Vec<Option<(u32, u32)>>,
    /// First cycle node or terminal node on the forward orbit.
    entry: Vec<u32>,
    /// Steps to `entry`.
    depth: Vec<u32>,
}

impl ShiftForest {
    pub fn new(items: &[SeqModel]) -> Result<Self> {
        let n = items.len();
        let mut index: HashMap<&SeqModel, u32> = HashMap::with_capacity(n);
        for (i, x) in items.iter().enumerate() {
            if index.insert(x, i as u32).is_some() {
                return Err(Error::InvalidModel(format!(
                    "duplicate carrier element {x}"
                )));
            }
        }
        let mut succ = vec![NONE; n];
        let mut preds = vec![Vec::new(); n];
        for (i, x) in items.iter().enumerate() {
            if let Some(s) = x.shift() {
                let &j = index
                    .get(&s)
                    .ok_or_else(|| Error::NotShiftClosed(format!("shift of {x} is missing")))?;
                succ[i] = j;
                preds[j as usize].push(i as u32);
            }
        }

        // colour 0 unvisited, 1 on the current walk, 2 done
        let mut colour = vec![0u8; n];
        let mut cycles = Vec::new();
        let mut cycle_pos = vec![None; n];
        for start in 0..n {
            let mut walk = Vec::new();
            let mut x = start as u32;
            while x != NONE && colour[x as usize] == 0 {
                colour[x as usize] = 1;
                walk.push(x);
                x = succ[x as usize];
            }
            if x != NONE && colour[x as usize] == 1 {
                let at = walk.iter().position(|&w| w == x).unwrap();
                let cycle = walk[at..].to_vec();
                for (p, &c) in cycle.iter().enumerate() {
                    cycle_pos[c as usize] = Some((cycles.len() as u32, p as u32));
                }
                cycles.push(cycle);
            }
            for w in walk {
                colour[w as usize] = 2;
            }
        }

        let mut entry = vec![NONE; n];
        let mut depth = vec![0u32; n];
        let mut queue: Vec<u32> = (0..n as u32)
            .filter(|&x| cycle_pos[x as usize].is_some() || succ[x as usize] == NONE)
            .collect();
        for &x in &queue {
            entry[x as usize] = x;
        }
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for &y in &preds[x as usize] {
                if entry[y as usize] == NONE {
                    entry[y as usize] = entry[x as usize];
                    depth[y as usize] = depth[x as usize] + 1;
                    queue.push(y);
                }
            }
        }
        Ok(ShiftForest {
            succ,
            preds,
            cycles,
            cycle_pos,
            entry,
            depth,
        })
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn successor(&self, x: usize) -> Option<usize> {
        (self.succ[x] != NONE).then_some(self.succ[x] as usize)
    }

    pub fn cycles(&self) -> &[Vec<u32>] {
        &self.cycles
    }

    /// Identifies the component: a cycle index, or `cycles.len() + terminal`.
    pub fn component(&self, x: usize) -> usize {
        let e = self.entry[x] as usize;
        match self.cycle_pos[e] {
            Some((c, _)) => c as usize,
            None => self.cycles.len() + e,
        }
    }

    fn cycle_distance(&self, a: usize, b: usize) -> Option<usize> {
        if a == b {
            return Some(0);
        }
        let ((ca, pa), (cb, pb)) = (self.cycle_pos[a]?, self.cycle_pos[b]?);
        if ca != cb {
            return None;
        }
        let l = self.cycles[ca as usize].len();
        let c = (pb as usize + l - pa as usize) % l;
        Some(c.min(l - c))
    }

    /// Distance inside the tree hanging at a common entry node.
    fn tree_distance(&self, mut x: usize, mut y: usize) -> usize {
        let mut steps = 0;
        while self.depth[x] > self.depth[y] {
            x = self.succ[x] as usize;
            steps += 1;
        }
        while self.depth[y] > self.depth[x] {
            y = self.succ[y] as usize;
            steps += 1;
        }
        while x != y {
            x = self.succ[x] as usize;
            y = self.succ[y] as usize;
            steps += 2;
        }
        steps
    }

    /// Graph distance in the undirected shift graph; `None` across components.
    pub fn distance(&self, x: usize, y: usize) -> Option<usize> {
        let (ex, ey) = (self.entry[x] as usize, self.entry[y] as usize);
        if ex == ey {
            return Some(self.tree_distance(x, y));
        }
        Some(self.depth[x] as usize + self.depth[y] as usize + self.cycle_distance(ex, ey)?)
    }

    /// Exact diameter of a set of nodes; `None` when it spans components.
    pub fn diameter(&self, members: &[usize]) -> Option<usize> {
        let mut by_entry: HashMap<usize, Vec<usize>> = HashMap::new();
        for &x in members {
            by_entry.entry(self.entry[x] as usize).or_default().push(x);
        }
        let mut best = 0;
        // double sweep is exact for subsets of a tree
        for group in by_entry.values() {
            let far = |a: usize| -> (usize, usize) {
                group
                    .iter()
                    .map(|&y| (self.tree_distance(a, y), y))
                    .max()
                    .unwrap()
            };
            let (_, b) = far(group[0]);
            best = best.max(far(b).0);
        }
        let tops: Vec<(usize, usize)> = by_entry
            .iter()
            .map(|(&e, g)| (e, g.iter().map(|&x| self.depth[x] as usize).max().unwrap()))
            .collect();
        for (i, &(e, h)) in tops.iter().enumerate() {
            for &(f, k) in &tops[i + 1..] {
                best = best.max(h + k + self.cycle_distance(e, f)?);
            }
        }
        Some(best)
    }

    /// Nodes within undirected distance `r` of `x`, written into `out`.
    fn ball(&self, x: usize, r: usize, stamp: &mut [u32], gen: u32, out: &mut Vec<u32>) {
        out.clear();
        out.push(x as u32);
        stamp[x] = gen;
        let mut frontier_start = 0;
        for _ in 0..r {
            let frontier_end = out.len();
            for i in frontier_start..frontier_end {
                let y = out[i] as usize;
                let s = self.succ[y];
                let next = (s != NONE)
                    .then_some(s)
                    .into_iter()
                    .chain(self.preds[y].iter().copied());
                for z in next {
                    if stamp[z as usize] != gen {
                        stamp[z as usize] = gen;
                        out.push(z);
                    }
                }
            }
            if out.len() == frontier_end {
                break;
            }
            frontier_start = frontier_end;
        }
    }
}

/// A cover of a shift-closed carrier by classes of diameter at most `8T`.
///
/// Cycles of length at most `4T` form the root set of their component;
/// longer cycles are cut at their least element. With heights `h` measured
/// to the root, a point at height `h` goes to annulus `k = ⌊h / 2T⌋` and is
/// grouped by its ancestor at height `max(0, 2Tk - T)`; annulus 0 forms one
/// class per component.
pub fn asdim_cover(items: &[SeqModel], t: usize) -> Result<FinitePartition> {
    if t == 0 {
        return Err(Error::OutOfRange("cover scale T must be at least 1".into()));
    }
    let forest = ShiftForest::new(items)?;
    let n = forest.len();

    let mut height = vec![NONE; n];
    let mut queue = Vec::new();
    for (i, cycle) in forest.cycles.iter().enumerate() {
        if cycle.len() <= 4 * t {
            queue.extend(cycle.iter().copied());
        } else {
            let cut = cycle
                .iter()
                .copied()
                .min_by(|&a, &b| items[a as usize].kind().cmp(items[b as usize].kind()));
            queue.push(cut.unwrap_or_else(|| panic!("empty cycle {i}")));
        }
    }
    queue.extend((0..n as u32).filter(|&x| forest.succ[x as usize] == NONE));
    for &x in &queue {
        height[x as usize] = 0;
    }
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head] as usize;
        head += 1;
        for &y in &forest.preds[x] {
            if height[y as usize] == NONE {
                height[y as usize] = height[x] + 1;
                queue.push(y);
            }
        }
    }

    let width = 2 * t;
    let labels: Vec<(usize, usize, u32)> = (0..n)
        .map(|x| {
            let h = height[x] as usize;
            let k = h / width;
            if k == 0 {
                return (forest.component(x), 0, NONE);
            }
            let mut a = x;
            for _ in 0..h - (width * k - t) {
                a = forest.succ[a] as usize;
            }
            (forest.component(x), k, a as u32)
        })
        .collect();
    let mut partition = FinitePartition::from_labels(
        labels,
        PartitionMeta {
            max_class_diameter: None,
            scale: t,
        },
        items.iter().all(SeqModel::is_exact),
    );
    let diameters: Vec<Option<usize>> = partition
        .classes()
        .par_iter()
        .map(|c| forest.diameter(c))
        .collect();
    partition.meta.max_class_diameter = diameters
        .into_iter()
        .try_fold(0, |m, d| d.map(|d| m.max(d)));
    Ok(partition)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverAudit {
    pub scale: usize,
    /// Largest class diameter; `None` when some class is unbounded.
    pub max_diam: Option<usize>,
    /// Most classes met by one ball of radius `T`.
    pub max_ball_classes: usize,
    pub diameter_bound: usize,
    pub ok_diameter: bool,
    /// Distances came from the shift graph of a shift-closed carrier.
    pub shift_closed: bool,
}

/// Exhaustive audit of class diameters and ball-class counts.
///
/// Shift-closed carriers use the shift-graph metric; otherwise pairwise
/// `ρ_s` is computed directly.
pub fn audit_cover(
    partition: &FinitePartition,
    t: usize,
    items: &[SeqModel],
) -> Result<CoverAudit> {
    if partition.len() != items.len() {
        return Err(Error::OutOfRange(format!(
            "partition covers {} points, carrier has {}",
            partition.len(),
            items.len()
        )));
    }
    let classes = partition.classes();
    let (max_diam, max_ball_classes, shift_closed) = match ShiftForest::new(items) {
        Ok(forest) => {
            let diam = classes
                .par_iter()
                .map(|c| forest.diameter(c))
                .collect::<Vec<_>>()
                .into_iter()
                .try_fold(0, |m, d| d.map(|d| m.max(d)));
            let c = (0..items.len())
                .into_par_iter()
                .map_init(
                    || {
                        (
                            vec![0u32; items.len()],
                            vec![0u32; partition.num_classes],
                            Vec::new(),
                            0u32,
                        )
                    },
                    |(stamp, class_stamp, ball, gen), x| {
                        *gen += 1;
                        forest.ball(x, t, stamp, *gen, ball);
                        let mut count = 0;
                        for &y in ball.iter() {
                            let c = partition.class_of[y as usize];
                            if class_stamp[c] != *gen {
                                class_stamp[c] = *gen;
                                count += 1;
                            }
                        }
                        count
                    },
                )
                .max()
                .unwrap_or(0);
            (diam, c, true)
        }
        Err(Error::NotShiftClosed(_)) => {
            let rows: Vec<Vec<Option<usize>>> = (0..items.len())
                .into_par_iter()
                .map(|i| {
                    items
                        .iter()
                        .map(|y| rho_s_with(&items[i], y, DEFAULT_MIN_WINDOW).map(|d| d.value))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;
            let mut diam = Some(0);
            for c in &classes {
                for &i in c {
                    for &j in c {
                        diam = match (diam, rows[i][j]) {
                            (Some(m), Some(d)) => Some(m.max(d)),
                            _ => None,
                        };
                    }
                }
            }
            let c = rows
                .iter()
                .map(|row| {
                    let mut met: Vec<usize> = row
                        .iter()
                        .enumerate()
                        .filter(|(_, d)| d.is_some_and(|d| d <= t))
                        .map(|(j, _)| partition.class_of[j])
                        .collect();
                    met.sort_unstable();
                    met.dedup();
                    met.len()
                })
                .max()
                .unwrap_or(0);
            (diam, c, false)
        }
        Err(e) => return Err(e),
    };
    let diameter_bound = 8 * t;
    Ok(CoverAudit {
        scale: t,
        max_diam,
        max_ball_classes,
        diameter_bound,
        ok_diameter: max_diam.is_some_and(|d| d <= diameter_bound),
        shift_closed,
    })
}
