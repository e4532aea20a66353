//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use gpattern::graphdata::{AttributedGraph, Class, GraphDataset};
use rand::Rng;

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        out.push(perm.clone());
        let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

/// Canonical form by brute force: the smallest encoding over all vertex relabelings.
pub fn brute_canon(labels: &[u32], edges: &[(u32, u32, u32)]) -> Vec<u32> {
    let n = labels.len();
    let mut mat = vec![vec![0u32; n]; n];
    for &(u, v, l) in edges {
        mat[u as usize][v as usize] = l + 1;
        mat[v as usize][u as usize] = l + 1;
    }
    let mut best: Option<Vec<u32>> = None;
    for perm in permutations(n) {
        // perm[new] = old
        let mut enc = vec![n as u32];
        enc.extend(perm.iter().map(|&o| labels[o]));
        for a in 0..n {
            for b in a + 1..n {
                enc.push(mat[perm[a]][perm[b]]);
            }
        }
        if best.as_ref().is_none_or(|b| enc < *b) {
            best = Some(enc);
        }
    }
    best.unwrap()
}

pub fn graph_canon(g: &AttributedGraph) -> Vec<u32> {
    let edges: Vec<_> = g.edges.iter().map(|e| (e.u, e.v, e.label)).collect();
    brute_canon(&g.vertex_labels, &edges)
}

fn connected(n_vertices: usize, edges: &[(u32, u32, u32)]) -> bool {
    let mut seen = vec![false; n_vertices];
    let mut stack = vec![0u32];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &(u, v, _) in edges {
            for (a, b) in [(u, v), (v, u)] {
                if a == x && !seen[b as usize] {
                    seen[b as usize] = true;
                    stack.push(b);
                }
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Canonical forms of every connected edge-subset of `g` with at most `max_edges` edges.
pub fn connected_subgraph_classes(g: &AttributedGraph, max_edges: usize) -> HashSet<Vec<u32>> {
    let edges: Vec<_> = g.edges.iter().map(|e| (e.u, e.v, e.label)).collect();
    let m = edges.len();
    assert!(m <= 20, "brute-force oracle limited to small graphs");
    let mut out = HashSet::new();
    for mask in 1u32..(1 << m) {
        if mask.count_ones() as usize > max_edges {
            continue;
        }
        let subset: Vec<_> = (0..m)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| edges[i])
            .collect();
        let verts: BTreeSet<u32> = subset.iter().flat_map(|&(u, v, _)| [u, v]).collect();
        let index: Vec<u32> = verts.iter().copied().collect();
        let pos = |x: u32| index.iter().position(|&y| y == x).unwrap() as u32;
        let local: Vec<_> = subset
            .iter()
            .map(|&(u, v, l)| (pos(u), pos(v), l))
            .collect();
        if !connected(index.len(), &local) {
            continue;
        }
        let labels: Vec<u32> = index.iter().map(|&v| g.vertex_labels[v as usize]).collect();
        out.insert(brute_canon(&labels, &local));
    }
    out
}

/// Random simple graph with `2..=max_vertices` vertices and at most `max_edges` edges.
pub fn random_graph(
    rng: &mut impl Rng,
    id: usize,
    max_vertices: usize,
    max_edges: usize,
    vlabels: u32,
    elabels: u32,
) -> AttributedGraph {
    let n = rng.gen_range(2..=max_vertices);
    let labels: Vec<u32> = (0..n).map(|_| rng.gen_range(0..vlabels)).collect();
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            pairs.push((u, v));
        }
    }
    let mut edges = Vec::new();
    for (u, v) in pairs {
        if edges.len() < max_edges && rng.gen_bool(0.5) {
            edges.push((u, v, rng.gen_range(0..elabels)));
        }
    }
    let class = if id.is_multiple_of(2) {
        Class::Positive
    } else {
        Class::Negative
    };
    AttributedGraph::new(id, labels, edges, Some(class)).unwrap()
}

pub fn dataset_of(graphs: Vec<AttributedGraph>) -> GraphDataset {
    GraphDataset {
        graphs,
        ..Default::default()
    }
}
