use std::collections::HashMap;
use std::hash::Hash;

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{linked_within, rho_s_with, SeqKind, SeqModel};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionMeta {
    /// `None` when not known.
    pub max_class_diameter: Option<usize>,
    pub scale: usize,
}

/// An equivalence relation on `0..len`, classes numbered by first member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitePartition {
    pub class_of: Vec<usize>,
    pub num_classes: usize,
    pub meta: PartitionMeta,
    /// Every comparison behind the partition was exact.
    pub exact: bool,
}

impl FinitePartition {
    /// Renumbers arbitrary labels by order of first appearance.
    pub fn from_labels<K: Hash + Eq>(
        labels: impl IntoIterator<Item = K>,
        meta: PartitionMeta,
        exact: bool,
    ) -> Self {
        let mut ids: HashMap<K, usize> = HashMap::new();
        let class_of: Vec<usize> = labels
            .into_iter()
            .map(|k| {
                let next = ids.len();
                *ids.entry(k).or_insert(next)
            })
            .collect();
        FinitePartition {
            num_classes: ids.len(),
            class_of,
            meta,
            exact,
        }
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes];
        for (i, &c) in self.class_of.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    /// Every class of `self` lies inside a class of `other`.
    pub fn refines(&self, other: &FinitePartition) -> bool {
        let mut image = vec![None; self.num_classes];
        self.class_of
            .iter()
            .zip(&other.class_of)
            .all(|(&a, &b)| *image[a].get_or_insert(b) == b)
    }

    /// Same classes, regardless of numbering.
    pub fn same_classes(&self, other: &FinitePartition) -> bool {
        self.len() == other.len() && self.refines(other) && other.refines(self)
    }

    /// Classes of `self` restricted and pulled back along `map`.
    pub fn pull_back(&self, map: &[usize], meta: PartitionMeta) -> FinitePartition {
        FinitePartition::from_labels(map.iter().map(|&i| self.class_of[i]), meta, self.exact)
    }
}

fn union_classes(
    items: &[SeqModel],
    linked: impl Fn(&SeqModel, &SeqModel) -> Result<bool> + Sync,
) -> Result<Vec<usize>> {
    let edges: Vec<(usize, usize)> = (0..items.len())
        .into_par_iter()
        .map(|i| -> Result<Vec<(usize, usize)>> {
            let mut out = Vec::new();
            for j in i + 1..items.len() {
                if linked(&items[i], &items[j])? {
                    out.push((i, j));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut uf = UnionFind::<usize>::new(items.len());
    for (i, j) in edges {
        uf.union(i, j);
    }
    Ok(uf.into_labeling())
}

/// Classes of tail equivalence on the carrier.
pub fn tail_partition(items: &[SeqModel], min_window: usize) -> Result<FinitePartition> {
    let exact = items.iter().all(SeqModel::is_exact);
    let meta = PartitionMeta {
        max_class_diameter: None,
        scale: 0,
    };
    if exact {
        if let Some(x) = items.first() {
            for y in items {
                rho_s_with(x, y, min_window)?;
            }
        }
        return Ok(FinitePartition::from_labels(
            items.iter().map(|x| x.cycle_key()),
            meta,
            true,
        ));
    }
    let labels = union_classes(items, |x, y| {
        Ok(rho_s_with(x, y, min_window)?.value.is_some())
    })?;
    Ok(FinitePartition::from_labels(labels, meta, false))
}

/// Transitive closure of `s^i(x) = s^j(y)` with `i, j ≤ n`.
pub fn filtration_rn(items: &[SeqModel], n: usize, min_window: usize) -> Result<FinitePartition> {
    let exact = items.iter().all(SeqModel::is_exact);
    let meta = PartitionMeta {
        max_class_diameter: None,
        scale: n,
    };
    if !exact {
        let labels = union_classes(items, |x, y| linked_within(x, y, n, min_window))?;
        return Ok(FinitePartition::from_labels(labels, meta, false));
    }
    if let Some(x) = items.first() {
        for y in items {
            rho_s_with(x, y, min_window)?;
        }
    }
    let mut uf = UnionFind::<usize>::new(items.len());
    let mut first: HashMap<SeqKind, usize> = HashMap::new();
    for (i, x) in items.iter().enumerate() {
        let mut z = x.clone();
        for _ in 0..=n {
            match first.get(z.kind()) {
                Some(&j) => {
                    uf.union(i, j);
                }
                None => {
                    first.insert(z.kind().clone(), i);
                }
            }
            z = z.shift().expect("periodic models always shift");
        }
    }
    Ok(FinitePartition::from_labels(uf.into_labeling(), meta, true))
}
