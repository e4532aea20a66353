mod common;

use std::collections::{HashMap, HashSet};

use common::{brute_canon, connected_subgraph_classes, dataset_of, graph_canon, random_graph};
use gpattern::graphdata::AttributedGraph;
use gpattern::miner::{canonical_code, contains, graph_support, mine_frequent, Pattern};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn brute_expected(graphs: &[AttributedGraph], max_edges: usize) -> Vec<HashSet<Vec<u32>>> {
    graphs
        .iter()
        .map(|g| connected_subgraph_classes(g, max_edges))
        .collect()
}

#[test]
fn mining_is_complete_on_random_small_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for round in 0..10 {
        let graphs: Vec<_> = (0..5)
            .map(|i| random_graph(&mut rng, i, 6, 8, 2, 2))
            .collect();
        let per_graph = brute_expected(&graphs, usize::MAX);
        let ds = dataset_of(graphs);
        let set = mine_frequent(&ds, 1, usize::MAX, usize::MAX).unwrap();
        let mined: Vec<Vec<u32>> = set
            .patterns
            .iter()
            .map(|p| graph_canon(&p.to_graph()))
            .collect();
        let mined_set: HashSet<_> = mined.iter().cloned().collect();
        assert_eq!(
            mined_set.len(),
            mined.len(),
            "round {round}: duplicate pattern"
        );
        let all: HashSet<_> = per_graph.iter().flatten().cloned().collect();
        assert_eq!(mined_set, all, "round {round}");
        for (p, canon) in set.patterns.iter().zip(&mined) {
            let expected: Vec<usize> = (0..ds.len())
                .filter(|&g| per_graph[g].contains(canon))
                .collect();
            assert_eq!(p.graph_ids, expected);
        }
    }
}

#[test]
fn max_edges_and_min_support_are_respected() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let graphs: Vec<_> = (0..8)
        .map(|i| random_graph(&mut rng, i, 6, 8, 2, 1))
        .collect();
    let per_graph = brute_expected(&graphs, 3);
    let ds = dataset_of(graphs);
    let set = mine_frequent(&ds, 2, usize::MAX, 3).unwrap();
    let mut counts: HashMap<Vec<u32>, usize> = HashMap::new();
    for s in &per_graph {
        for c in s {
            *counts.entry(c.clone()).or_default() += 1;
        }
    }
    let expected: HashSet<_> = counts
        .into_iter()
        .filter(|&(_, n)| n >= 2)
        .map(|(c, _)| c)
        .collect();
    let mined: HashSet<_> = set
        .patterns
        .iter()
        .map(|p| graph_canon(&p.to_graph()))
        .collect();
    assert_eq!(mined, expected);
    assert!(set
        .patterns
        .iter()
        .all(|p| p.n_edges <= 3 && p.support() >= 2));
}

#[test]
fn four_vertex_path_is_absent_from_triangles() {
    let tri = AttributedGraph::new(0, vec![0; 3], [(0, 1, 0), (1, 2, 0), (0, 2, 0)], None).unwrap();
    let path =
        AttributedGraph::new(0, vec![0; 4], [(0, 1, 0), (1, 2, 0), (2, 3, 0)], None).unwrap();
    let p = Pattern::new(0, canonical_code(&path).unwrap(), vec![]);
    assert_eq!(graph_support(&p, &dataset_of(vec![tri])), 0);
}

#[test]
fn whole_graph_pattern_has_support() {
    let g = AttributedGraph::new(0, vec![0, 1, 2], [(0, 1, 0), (1, 2, 1)], None).unwrap();
    let p = Pattern::new(0, canonical_code(&g).unwrap(), vec![]);
    assert_eq!(graph_support(&p, &dataset_of(vec![g])), 1);
}

/// All connected graphs with exactly three edges over two vertex and two edge labels.
fn three_edge_graphs() -> Vec<AttributedGraph> {
    let mut out = Vec::new();
    for n in 3..=4usize {
        let pairs: Vec<(u32, u32)> = (0..n as u32)
            .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)))
            .collect();
        let m = pairs.len();
        for mask in 0u32..(1 << m) {
            if mask.count_ones() != 3 {
                continue;
            }
            let chosen: Vec<_> = (0..m)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| pairs[i])
                .collect();
            for vl in 0u32..(1 << n) {
                for el in 0u32..8 {
                    let labels = (0..n).map(|i| vl >> i & 1).collect();
                    let edges = chosen
                        .iter()
                        .enumerate()
                        .map(|(k, &(u, v))| (u, v, el >> k & 1));
                    let g = AttributedGraph::new(0, labels, edges, None).unwrap();
                    if g.is_connected() {
                        out.push(g);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn canonical_codes_partition_into_isomorphism_classes() {
    let graphs = three_edge_graphs();
    let codes: Vec<_> = graphs.iter().map(|g| canonical_code(g).unwrap()).collect();
    let canons: Vec<_> = graphs.iter().map(graph_canon).collect();
    let mut code_to_canon = HashMap::new();
    let mut canon_to_code = HashMap::new();
    for (code, canon) in codes.iter().zip(&canons) {
        assert_eq!(
            code_to_canon.entry(code.clone()).or_insert(canon.clone()),
            canon
        );
        assert_eq!(
            canon_to_code.entry(canon.clone()).or_insert(code.clone()),
            code
        );
    }
    assert!(code_to_canon.len() > 10);
}

#[test]
fn star_containment_matches_injective_map_enumeration() {
    // star with center label 0 and leaves labeled 1, 2, 1, 3
    let star = AttributedGraph::new(
        0,
        vec![0, 1, 2, 1, 3],
        [(0, 1, 0), (0, 2, 0), (0, 3, 1), (0, 4, 0)],
        None,
    )
    .unwrap();
    for (a, b, c) in [(1, 0, 2), (1, 0, 1), (2, 0, 3), (0, 1, 0), (1, 0, 4)] {
        for (ea, eb) in [(0, 0), (0, 1), (1, 1)] {
            let path =
                AttributedGraph::new(0, vec![a, b, c], [(0, 1, ea), (1, 2, eb)], None).unwrap();
            let pat = Pattern::new(0, canonical_code(&path).unwrap(), vec![]);
            let brute = injective_match(&path, &star);
            assert_eq!(contains(&pat, &star), brute, "path {a}-{b}-{c} ({ea},{eb})");
        }
    }
}

fn injective_match(p: &AttributedGraph, g: &AttributedGraph) -> bool {
    let n = g.n_vertices();
    let k = p.n_vertices();
    let label = |g: &AttributedGraph, u: u32, v: u32| {
        g.edges
            .iter()
            .find(|e| (e.u, e.v) == (u.min(v), u.max(v)))
            .map(|e| e.label)
    };
    common::permutations(n).into_iter().any(|perm| {
        let map = &perm[..k];
        (0..k).all(|i| p.vertex_labels[i] == g.vertex_labels[map[i]])
            && p.edges.iter().all(|e| {
                label(g, map[e.u as usize] as u32, map[e.v as usize] as u32) == Some(e.label)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_code_is_relabeling_invariant(seed in any::<u64>(), shift in 0usize..720) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 0, 5, 7, 2, 2);
        prop_assume!(g.n_edges() > 0 && g.is_connected());
        let perms = common::permutations(g.n_vertices());
        let perm = &perms[shift % perms.len()];
        let mut labels = vec![0; g.n_vertices()];
        for (old, &new) in perm.iter().enumerate() {
            labels[new] = g.vertex_labels[old];
        }
        let edges = g.edges.iter().map(|e| (perm[e.u as usize] as u32, perm[e.v as usize] as u32, e.label));
        let h = AttributedGraph::new(0, labels, edges, None).unwrap();
        prop_assert_eq!(canonical_code(&g).unwrap(), canonical_code(&h).unwrap());
        prop_assert_eq!(
            brute_canon(&g.vertex_labels, &g.edges.iter().map(|e| (e.u, e.v, e.label)).collect::<Vec<_>>()),
            graph_canon(&h)
        );
    }

    #[test]
    fn support_is_anti_monotone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ds = dataset_of((0..6).map(|i| random_graph(&mut rng, i, 6, 7, 2, 2)).collect());
        let set = mine_frequent(&ds, 1, usize::MAX, usize::MAX).unwrap();
        for p in &set.patterns {
            let g = p.to_graph();
            for skip in 0..g.n_edges() {
                let edges = g.edges.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, e)| (e.u, e.v, e.label));
                let sub = AttributedGraph::new(0, g.vertex_labels.clone(), edges, None).unwrap();
                // drop an isolated vertex left behind by removing a pendant edge
                let deg = sub.degrees();
                let keep: Vec<usize> = (0..deg.len()).filter(|&v| deg[v] > 0).collect();
                if keep.is_empty() {
                    continue;
                }
                let pos = |v: u32| keep.iter().position(|&k| k == v as usize).unwrap() as u32;
                let sub = AttributedGraph::new(
                    0,
                    keep.iter().map(|&v| sub.vertex_labels[v]).collect(),
                    sub.edges.iter().map(|e| (pos(e.u), pos(e.v), e.label)),
                    None,
                ).unwrap();
                if !sub.is_connected() {
                    continue;
                }
                let sp = Pattern::new(0, canonical_code(&sub).unwrap(), vec![]);
                prop_assert!(graph_support(&sp, &ds) >= p.support());
            }
        }
    }
}
