//! Label-preserving subgraph isomorphism by backtracking.

use super::dfs::SmallGraph;
use crate::graphdata::AttributedGraph;

/// Target graph prepared for repeated containment queries.
#[derive(Debug, Clone)]
pub(crate) struct Target {
    labels: Vec<u32>,
    adj: Vec<Vec<(u32, u32)>>,
}

impl Target {
    pub(crate) fn new(g: &AttributedGraph) -> Self {
        Self {
            labels: g.vertex_labels.clone(),
            adj: g.adjacency(),
        }
    }

    fn edge_label(&self, u: u32, v: u32) -> Option<u32> {
        let list = &self.adj[u as usize];
        list.binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| list[i].1)
    }
}

/// Matches pattern vertices in DFS-code order, so every vertex after the
/// first has an already-mapped neighbor (its DFS parent).
pub(crate) fn embeds(p: &SmallGraph, parent: &[u32], t: &Target) -> bool {
    let n = p.labels.len();
    if n == 0 {
        return true;
    }
    if n > t.labels.len() {
        return false;
    }
    let mut map = vec![u32::MAX; n];
    let mut used = vec![false; t.labels.len()];
    let deg: Vec<usize> = p.adj.iter().map(Vec::len).collect();
    (0..t.labels.len() as u32).any(|c| try_vertex(p, parent, &deg, t, 0, c, &mut map, &mut used))
}

#[allow(clippy::too_many_arguments)]
fn try_vertex(
    p: &SmallGraph,
    parent: &[u32],
    deg: &[usize],
    t: &Target,
    k: usize,
    cand: u32,
    map: &mut [u32],
    used: &mut [bool],
) -> bool {
    if used[cand as usize]
        || t.labels[cand as usize] != p.labels[k]
        || t.adj[cand as usize].len() < deg[k]
    {
        return false;
    }
    // every pattern edge back to an already-mapped vertex must exist with its label
    for &(w, el) in &p.adj[k] {
        if (w as usize) < k && t.edge_label(cand, map[w as usize]) != Some(el) {
            return false;
        }
    }
    map[k] = cand;
    used[cand as usize] = true;
    let next = k + 1;
    let found = if next == map.len() {
        true
    } else {
        let anchor = map[parent[next] as usize];
        t.adj[anchor as usize]
            .iter()
            .any(|&(c, _)| try_vertex(p, parent, deg, t, next, c, map, used))
    };
    used[cand as usize] = false;
    map[k] = u32::MAX;
    found
}
