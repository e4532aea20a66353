//! DFS codes and the minimum-code canonical form.

use serde::{Deserialize, Serialize};

/// One extension tuple `(i, j, label_i, edge_label, label_j)`.
///
/// Forward edges have `i < j` and introduce vertex `j`; backward edges have
/// `i > j` and close a cycle from the rightmost vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DfsEdge {
    pub from: u32,
    pub to: u32,
    pub from_label: u32,
    pub edge_label: u32,
    pub to_label: u32,
}

impl DfsEdge {
    pub fn is_forward(&self) -> bool {
        self.from < self.to
    }
}

/// Sort key of an extension of a fixed code prefix.
///
/// Backward edges precede forward edges; backward edges to shallower vertices
/// come first; forward edges from deeper rightmost-path vertices come first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum ExtKey {
    Backward {
        to: u32,
        edge_label: u32,
    },
    Forward {
        depth_rev: std::cmp::Reverse<u32>,
        edge_label: u32,
        to_label: u32,
    },
}

impl ExtKey {
    pub(crate) fn of(edge: &DfsEdge) -> Self {
        if edge.is_forward() {
            ExtKey::Forward {
                depth_rev: std::cmp::Reverse(edge.from),
                edge_label: edge.edge_label,
                to_label: edge.to_label,
            }
        } else {
            ExtKey::Backward {
                to: edge.to,
                edge_label: edge.edge_label,
            }
        }
    }
}

/// A DFS code: the sequence of extension tuples building a connected pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct DfsCode(pub Vec<DfsEdge>);

impl DfsCode {
    pub fn edges(&self) -> &[DfsEdge] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn n_vertices(&self) -> usize {
        self.0
            .iter()
            .map(|e| e.from.max(e.to) as usize + 1)
            .max()
            .unwrap_or(0)
    }

    /// Vertex labels indexed by DFS discovery order.
    pub fn vertex_labels(&self) -> Vec<u32> {
        let mut labels = vec![0; self.n_vertices()];
        for e in &self.0 {
            labels[e.from as usize] = e.from_label;
            labels[e.to as usize] = e.to_label;
        }
        labels
    }

    /// Rightmost path from the root (vertex 0) to the rightmost vertex.
    pub fn rightmost_path(&self) -> Vec<u32> {
        let n = self.n_vertices();
        if n == 0 {
            return Vec::new();
        }
        let mut parent = vec![u32::MAX; n];
        for e in self.0.iter().filter(|e| e.is_forward()) {
            parent[e.to as usize] = e.from;
        }
        let mut path = vec![(n - 1) as u32];
        let mut v = n - 1;
        while parent[v] != u32::MAX {
            v = parent[v] as usize;
            path.push(v as u32);
        }
        path.reverse();
        path
    }
}

/// Small undirected labeled graph given by adjacency lists.
#[derive(Debug, Clone)]
pub(crate) struct SmallGraph {
    pub labels: Vec<u32>,
    pub adj: Vec<Vec<(u32, u32)>>,
    pub n_edges: usize,
}

impl SmallGraph {
    pub(crate) fn from_code(code: &DfsCode) -> Self {
        let labels = code.vertex_labels();
        let mut adj = vec![Vec::new(); labels.len()];
        for e in code.edges() {
            adj[e.from as usize].push((e.to, e.edge_label));
            adj[e.to as usize].push((e.from, e.edge_label));
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        Self {
            labels,
            adj,
            n_edges: code.len(),
        }
    }

    pub(crate) fn edge_label(&self, u: u32, v: u32) -> Option<u32> {
        let list = &self.adj[u as usize];
        list.binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| list[i].1)
    }
}

/// Keeps the embeddings whose extension has the smallest key seen so far.
fn consider(
    edge: DfsEdge,
    emb: Vec<u32>,
    best: &mut Option<(ExtKey, DfsEdge)>,
    next: &mut Vec<Vec<u32>>,
) {
    let key = ExtKey::of(&edge);
    match best {
        Some((k, _)) if key > *k => {}
        Some((k, _)) if key == *k => next.push(emb),
        _ => {
            *best = Some((key, edge));
            next.clear();
            next.push(emb);
        }
    }
}

/// Greedy minimum-code search over all embeddings of the current prefix.
///
/// With `target` set, stops as soon as the minimum diverges from it and
/// reports whether `target` is the minimum.
fn min_code(g: &SmallGraph, target: Option<&DfsCode>) -> (DfsCode, bool) {
    let mut best_first: Option<(u32, u32, u32)> = None;
    let mut embs: Vec<Vec<u32>> = Vec::new();
    for u in 0..g.labels.len() as u32 {
        for &(v, el) in &g.adj[u as usize] {
            let key = (g.labels[u as usize], el, g.labels[v as usize]);
            match best_first {
                Some(b) if key > b => continue,
                Some(b) if key == b => embs.push(vec![u, v]),
                _ => {
                    best_first = Some(key);
                    embs = vec![vec![u, v]];
                }
            }
        }
    }
    let Some((l0, e0, l1)) = best_first else {
        return (DfsCode::default(), target.is_none_or(|t| t.is_empty()));
    };
    let mut code = DfsCode(vec![DfsEdge {
        from: 0,
        to: 1,
        from_label: l0,
        edge_label: e0,
        to_label: l1,
    }]);
    if let Some(t) = target {
        if t.0.first() != code.0.first() {
            return (code, false);
        }
    }

    // pattern-side adjacency of the code built so far
    let mut used: Vec<Vec<u32>> = vec![vec![1], vec![0]];
    while code.len() < g.n_edges {
        let rmpath = code.rightmost_path();
        let r = *rmpath.last().unwrap();
        let mut best: Option<(ExtKey, DfsEdge)> = None;
        let mut next: Vec<Vec<u32>> = Vec::new();

        for emb in &embs {
            let gr = emb[r as usize];
            for &j in &rmpath[..rmpath.len() - 1] {
                if used[r as usize].contains(&j) {
                    continue;
                }
                if let Some(el) = g.edge_label(gr, emb[j as usize]) {
                    let edge = DfsEdge {
                        from: r,
                        to: j,
                        from_label: g.labels[gr as usize],
                        edge_label: el,
                        to_label: g.labels[emb[j as usize] as usize],
                    };
                    consider(edge, emb.clone(), &mut best, &mut next);
                }
            }
        }
        if best.is_none() {
            let new = code.n_vertices() as u32;
            for emb in &embs {
                for &i in rmpath.iter().rev() {
                    let gi = emb[i as usize];
                    for &(w, el) in &g.adj[gi as usize] {
                        if emb.contains(&w) {
                            continue;
                        }
                        let edge = DfsEdge {
                            from: i,
                            to: new,
                            from_label: g.labels[gi as usize],
                            edge_label: el,
                            to_label: g.labels[w as usize],
                        };
                        let mut e2 = emb.clone();
                        e2.push(w);
                        consider(edge, e2, &mut best, &mut next);
                    }
                }
            }
        }
        let Some((_, edge)) = best else {
            // disconnected remainder
            break;
        };
        if let Some(t) = target {
            if t.0.get(code.len()) != Some(&edge) {
                return (code, false);
            }
        }
        if edge.is_forward() {
            used.push(Vec::new());
        }
        used[edge.from as usize].push(edge.to);
        used[edge.to as usize].push(edge.from);
        code.0.push(edge);
        embs = next;
    }
    let ok = target.is_none_or(|t| t.len() == code.len());
    (code, ok)
}

/// Whether `code` is the minimum DFS code of the graph it describes.
pub fn is_min(code: &DfsCode) -> bool {
    let g = SmallGraph::from_code(code);
    min_code(&g, Some(code)).1
}

pub(crate) fn min_code_of(g: &SmallGraph) -> DfsCode {
    min_code(g, None).0
}
