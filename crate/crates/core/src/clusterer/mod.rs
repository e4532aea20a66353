//! Complete-linkage agglomeration of footprints under Manhattan distance,
//! threshold cuts, and medoid representatives.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::footprints::FootprintMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("threshold {0} outside [0, 1]")]
    Threshold(f64),
    #[error("distance matrix is empty")]
    Empty,
    #[error("distance matrix is not symmetric with zero diagonal at ({0}, {1})")]
    NotMetric(usize, usize),
    #[error("row {0} has the wrong length")]
    Ragged(usize),
    #[error("pattern id {0} appears twice")]
    DuplicateId(usize),
}

/// Symmetric integer distances between patterns, in the order of `ids`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    ids: Vec<usize>,
    position: HashMap<usize, usize>,
    d: Vec<u32>,
}

impl DistanceMatrix {
    pub fn from_rows(ids: Vec<usize>, rows: &[Vec<u32>]) -> Result<Self, ClusterError> {
        let n = ids.len();
        if n == 0 {
            return Err(ClusterError::Empty);
        }
        let mut d = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(ClusterError::Ragged(i));
            }
            d.extend_from_slice(row);
        }
        if rows.len() != n {
            return Err(ClusterError::Ragged(rows.len()));
        }
        for i in 0..n {
            for j in 0..n {
                if d[i * n + j] != d[j * n + i] || (i == j && d[i * n + i] != 0) {
                    return Err(ClusterError::NotMetric(i, j));
                }
            }
        }
        Self::build(ids, d)
    }

    fn build(ids: Vec<usize>, d: Vec<u32>) -> Result<Self, ClusterError> {
        let mut position = HashMap::with_capacity(ids.len());
        for (i, &id) in ids.iter().enumerate() {
            if position.insert(id, i).is_some() {
                return Err(ClusterError::DuplicateId(id));
            }
        }
        Ok(Self { ids, position, d })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    /// Distance between the patterns at positions `i` and `j`.
    pub fn at(&self, i: usize, j: usize) -> u32 {
        self.d[i * self.len() + j]
    }

    /// Distance between pattern ids `x` and `y`.
    pub fn between(&self, x: usize, y: usize) -> u32 {
        self.at(self.position[&x], self.position[&y])
    }
}

/// Hamming distances between the footprints of `pattern_ids`.
pub fn manhattan_matrix(
    matrix: &FootprintMatrix,
    pattern_ids: &[usize],
) -> Result<DistanceMatrix, ClusterError> {
    let n = pattern_ids.len();
    if n == 0 {
        return Err(ClusterError::Empty);
    }
    let cols: Vec<_> = pattern_ids.iter().map(|&p| matrix.column(p)).collect();
    let d: Vec<u32> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let ci = cols[i];
            cols.iter().map(move |cj| ci.xor_count(cj) as u32)
        })
        .collect();
    DistanceMatrix::build(pattern_ids.to_vec(), d)
}

/// One agglomeration step. Leaves are positions `0..n_leaves`; the cluster
/// created by merge `k` has id `n_leaves + k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Merge {
    /// The merged cluster with the smaller minimum pattern id.
    pub left: usize,
    pub right: usize,
    /// Complete-linkage distance between `left` and `right`.
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dendrogram {
    pub n_leaves: usize,
    pub merges: Vec<Merge>,
}

/// Nearest-neighbour bookkeeping over distinct footprints.
struct Agglomerator {
    q: usize,
    d: Vec<u32>,
    min_id: Vec<usize>,
    active: Vec<bool>,
    best: Vec<Option<(u32, usize, usize, usize)>>,
}

impl Agglomerator {
    fn key(&self, i: usize, j: usize) -> (u32, usize, usize, usize) {
        let (lo, hi) = if self.min_id[i] < self.min_id[j] {
            (self.min_id[i], self.min_id[j])
        } else {
            (self.min_id[j], self.min_id[i])
        };
        (self.d[i * self.q + j], lo, hi, j)
    }

    fn recompute(&mut self, i: usize) {
        self.best[i] = (0..self.q)
            .filter(|&j| j != i && self.active[j])
            .map(|j| self.key(i, j))
            .min();
    }
}

/// Complete-linkage agglomeration. At each step the pair with the smallest
/// `(distance, smaller min id, larger min id)` merges, where a cluster's min id
/// is the smallest pattern id it contains.
pub fn agglomerate_complete(dist: &DistanceMatrix) -> Dendrogram {
    let n = dist.len();
    // identical footprints form groups, represented by their first position
    let mut group_of = vec![usize::MAX; n];
    let mut heads = Vec::new();
    for i in 0..n {
        if group_of[i] != usize::MAX {
            continue;
        }
        group_of[i] = heads.len();
        for j in i + 1..n {
            if group_of[j] == usize::MAX && dist.at(i, j) == 0 {
                group_of[j] = heads.len();
            }
        }
        heads.push(i);
    }
    let q = heads.len();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); q];
    for i in 0..n {
        members[group_of[i]].push(i);
    }
    for m in &mut members {
        m.sort_by_key(|&i| dist.ids[i]);
    }

    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    // zero-height merges: each group's min member absorbs the rest in id order
    let mut zero: Vec<(usize, usize, usize)> = members
        .iter()
        .enumerate()
        .flat_map(|(g, m)| m[1..].iter().map(move |&x| (g, m[0], x)))
        .collect();
    zero.sort_by_key(|&(_, head, x)| (dist.ids[head], dist.ids[x]));
    let mut cluster_of_group: Vec<usize> = members.iter().map(|m| m[0]).collect();
    for (g, _, x) in zero {
        merges.push(Merge {
            left: cluster_of_group[g],
            right: x,
            height: 0,
        });
        cluster_of_group[g] = n + merges.len() - 1;
    }

    let mut ag = Agglomerator {
        q,
        d: (0..q)
            .flat_map(|i| (0..q).map(move |j| (i, j)))
            .map(|(i, j)| dist.at(heads[i], heads[j]))
            .collect(),
        min_id: members.iter().map(|m| dist.ids[m[0]]).collect(),
        active: vec![true; q],
        best: vec![None; q],
    };
    for i in 0..q {
        ag.recompute(i);
    }
    for _ in 1..q {
        let (a, (h, _, _, b)) = (0..q)
            .filter(|&i| ag.active[i])
            .filter_map(|i| ag.best[i].map(|k| (i, k)))
            .min_by_key(|&(_, k)| (k.0, k.1, k.2))
            .expect("at least two active clusters");
        let (keep, drop) = if ag.min_id[a] < ag.min_id[b] {
            (a, b)
        } else {
            (b, a)
        };
        merges.push(Merge {
            left: cluster_of_group[keep],
            right: cluster_of_group[drop],
            height: h,
        });
        cluster_of_group[keep] = n + merges.len() - 1;
        ag.active[drop] = false;
        ag.min_id[keep] = ag.min_id[keep].min(ag.min_id[drop]);
        for k in 0..q {
            let v = ag.d[keep * q + k].max(ag.d[drop * q + k]);
            ag.d[keep * q + k] = v;
            ag.d[k * q + keep] = v;
        }
        ag.recompute(keep);
        for k in 0..q {
            if !ag.active[k] || k == keep {
                continue;
            }
            match ag.best[k] {
                Some((_, _, _, t)) if t == keep || t == drop => ag.recompute(k),
                Some(cur) => {
                    let cand = ag.key(k, keep);
                    if cand < cur {
                        ag.best[k] = Some(cand);
                    }
                }
                None => ag.recompute(k),
            }
        }
    }
    Dendrogram {
        n_leaves: n,
        merges,
    }
}

/// A flat clustering with one medoid per cluster.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterCut {
    /// Absolute distance threshold.
    pub threshold: u32,
    /// Pattern ids per cluster, ascending; clusters ordered by smallest member.
    pub clusters: Vec<Vec<usize>>,
    /// Medoid of each cluster, aligned with `clusters`.
    pub representatives: Vec<usize>,
}

impl ClusterCut {
    /// Representatives in ascending id order.
    pub fn sorted_representatives(&self) -> Vec<usize> {
        let mut r = self.representatives.clone();
        r.sort_unstable();
        r
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Clusters after every merge of height at most `threshold`.
pub fn cut_at(dendrogram: &Dendrogram, dist: &DistanceMatrix, threshold: u32) -> ClusterCut {
    let n = dendrogram.n_leaves;
    let mut parent: Vec<usize> = (0..n + dendrogram.merges.len()).collect();
    for (k, m) in dendrogram.merges.iter().enumerate() {
        if m.height > threshold {
            break;
        }
        let c = n + k;
        let (l, r) = (find(&mut parent, m.left), find(&mut parent, m.right));
        parent[l] = c;
        parent[r] = c;
    }
    let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        by_root.entry(root).or_default().push(dist.ids[i]);
    }
    let mut clusters: Vec<Vec<usize>> = by_root.into_values().collect();
    for c in &mut clusters {
        c.sort_unstable();
    }
    clusters.sort_unstable_by_key(|c| c[0]);
    let representatives = medoids(&clusters, dist);
    ClusterCut {
        threshold,
        clusters,
        representatives,
    }
}

/// `floor(threshold_pct · n_graphs)`, with the product rounded to 9 decimals
/// first so that `0.29 · 100` gives 29.
pub fn absolute_threshold(threshold_pct: f64, n_graphs: usize) -> Result<u32, ClusterError> {
    if !(0.0..=1.0).contains(&threshold_pct) {
        return Err(ClusterError::Threshold(threshold_pct));
    }
    let x = threshold_pct * n_graphs as f64;
    Ok(((x * 1e9).round() / 1e9).floor() as u32)
}

/// `threshold_pct` is a fraction of `n_graphs`; see [`absolute_threshold`].
pub fn cut(
    dendrogram: &Dendrogram,
    dist: &DistanceMatrix,
    threshold_pct: f64,
    n_graphs: usize,
) -> Result<ClusterCut, ClusterError> {
    Ok(cut_at(
        dendrogram,
        dist,
        absolute_threshold(threshold_pct, n_graphs)?,
    ))
}

/// Member of each cluster with the least summed distance to the others; ties by id.
pub fn medoids(clusters: &[Vec<usize>], dist: &DistanceMatrix) -> Vec<usize> {
    clusters
        .iter()
        .map(|c| {
            let pos: Vec<usize> = c.iter().map(|id| dist.position[id]).collect();
            let total = |i: usize| pos.iter().map(|&j| u64::from(dist.at(i, j))).sum::<u64>();
            let (_, id) = pos
                .iter()
                .zip(c)
                .map(|(&i, &id)| (total(i), id))
                .min()
                .expect("clusters are non-empty");
            id
        })
        .collect()
}

/// `cluster_id,pattern_id,is_representative`.
pub fn clusters_csv(cut: &ClusterCut) -> String {
    let mut out = String::from("cluster_id,pattern_id,is_representative\n");
    for (k, (members, &rep)) in cut.clusters.iter().zip(&cut.representatives).enumerate() {
        for &p in members {
            let _ = writeln!(out, "{k},{p},{}", p == rep);
        }
    }
    out
}

/// `merge_index,left,right,height`; leaves are positions, merge `k` creates `n_leaves + k`.
pub fn dendrogram_csv(d: &Dendrogram) -> String {
    let mut out = String::from("merge_index,left,right,height\n");
    for (k, m) in d.merges.iter().enumerate() {
        let _ = writeln!(out, "{k},{},{},{}", m.left, m.right, m.height);
    }
    out
}
