//! Frequent connected subgraph mining by rightmost-path extension over
//! minimum DFS codes.
//!
//! Support is the number of graphs containing a pattern at least once. Each
//! mined pattern carries the sorted ids of the graphs it occurs in.

mod dfs;
mod io;
mod iso;

use std::cmp::Reverse;
use std::collections::BTreeMap;

pub use dfs::{is_min, DfsCode, DfsEdge};
pub use io::{export_patterns, import_patterns};

use dfs::{min_code_of, ExtKey, SmallGraph};
use iso::Target;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphdata::{AttributedGraph, DataError, GraphDataset};

#[derive(Debug, Error)]
pub enum MineError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("graph has no edges")]
    NoEdges,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("duplicate pattern: patterns {0} and {1} are isomorphic")]
    Duplicate(usize, usize),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// A connected pattern identified by its minimum DFS code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    pub id: usize,
    pub code: DfsCode,
    pub n_vertices: usize,
    pub n_edges: usize,
    /// Sorted ids of the graphs containing the pattern.
    pub graph_ids: Vec<usize>,
}

impl Pattern {
    pub fn new(id: usize, code: DfsCode, graph_ids: Vec<usize>) -> Self {
        Self {
            id,
            n_vertices: code.n_vertices(),
            n_edges: code.len(),
            code,
            graph_ids,
        }
    }

    pub fn support(&self) -> usize {
        self.graph_ids.len()
    }

    /// The pattern as a graph with vertices in DFS discovery order.
    pub fn to_graph(&self) -> AttributedGraph {
        let edges = self
            .code
            .edges()
            .iter()
            .map(|e| (e.from, e.to, e.edge_label));
        AttributedGraph::new(self.id, self.code.vertex_labels(), edges, None)
            .expect("a DFS code describes a simple graph")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternSet {
    pub patterns: Vec<Pattern>,
    pub min_support: usize,
    /// Set when `max_patterns` cut the search short.
    pub truncated: bool,
}

impl PatternSet {
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

#[derive(Debug, Clone)]
struct Embedding {
    gid: u32,
    map: Vec<u32>,
}

fn distinct_gids(embs: &[Embedding]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for e in embs {
        if out.last() != Some(&(e.gid as usize)) {
            out.push(e.gid as usize);
        }
    }
    out
}

struct Miner<'a> {
    graphs: Vec<(&'a [u32], Vec<Vec<(u32, u32)>>)>,
    min_support: usize,
    max_patterns: usize,
    max_edges: usize,
    out: Vec<Pattern>,
    truncated: bool,
}

impl Miner<'_> {
    /// Reports `code` and explores its children; returns false once the cap is hit.
    fn grow(&mut self, code: &mut DfsCode, embs: Vec<Embedding>) -> bool {
        if self.out.len() == self.max_patterns {
            self.truncated = true;
            return false;
        }
        let id = self.out.len();
        self.out
            .push(Pattern::new(id, code.clone(), distinct_gids(&embs)));
        if code.len() >= self.max_edges {
            return true;
        }

        let pattern = SmallGraph::from_code(code);
        let rmpath = code.rightmost_path();
        let r = *rmpath.last().expect("non-empty code");
        let new_vertex = code.n_vertices() as u32;
        let mut ext: BTreeMap<ExtKey, Vec<Embedding>> = BTreeMap::new();
        for emb in &embs {
            let (labels, adj) = &self.graphs[emb.gid as usize];
            let gr = emb.map[r as usize];
            for &j in &rmpath[..rmpath.len() - 1] {
                if pattern.edge_label(r, j).is_some() {
                    continue;
                }
                let gj = emb.map[j as usize];
                if let Ok(pos) = adj[gr as usize].binary_search_by_key(&gj, |&(w, _)| w) {
                    let key = ExtKey::Backward {
                        to: j,
                        edge_label: adj[gr as usize][pos].1,
                    };
                    ext.entry(key).or_default().push(emb.clone());
                }
            }
            for &i in &rmpath {
                let gi = emb.map[i as usize];
                for &(w, el) in &adj[gi as usize] {
                    if emb.map.contains(&w) {
                        continue;
                    }
                    let key = ExtKey::Forward {
                        depth_rev: Reverse(i),
                        edge_label: el,
                        to_label: labels[w as usize],
                    };
                    let mut map = emb.map.clone();
                    map.push(w);
                    ext.entry(key)
                        .or_default()
                        .push(Embedding { gid: emb.gid, map });
                }
            }
        }

        for (key, list) in ext {
            if distinct_gids(&list).len() < self.min_support {
                continue;
            }
            let edge = match key {
                ExtKey::Backward { to, edge_label } => DfsEdge {
                    from: r,
                    to,
                    from_label: pattern.labels[r as usize],
                    edge_label,
                    to_label: pattern.labels[to as usize],
                },
                ExtKey::Forward {
                    depth_rev: Reverse(from),
                    edge_label,
                    to_label,
                } => DfsEdge {
                    from,
                    to: new_vertex,
                    from_label: pattern.labels[from as usize],
                    edge_label,
                    to_label,
                },
            };
            code.0.push(edge);
            let keep_going = !is_min(code) || self.grow(code, list);
            code.0.pop();
            if !keep_going {
                return false;
            }
        }
        true
    }
}

/// Mines every connected pattern with support at least `min_support` and at
/// most `max_edges` edges, stopping after `max_patterns`.
///
/// Patterns are emitted in pre-order of the DFS-code search tree with siblings
/// in ascending extension order, so output is deterministic.
pub fn mine_frequent(
    dataset: &GraphDataset,
    min_support: usize,
    max_patterns: usize,
    max_edges: usize,
) -> Result<PatternSet, MineError> {
    if min_support < 1 {
        return Err(MineError::InvalidArgument(
            "min_support must be at least 1".into(),
        ));
    }
    if dataset.is_empty() {
        return Err(MineError::Data(DataError::Empty));
    }
    let graphs: Vec<_> = dataset
        .graphs
        .iter()
        .map(|g| (g.vertex_labels.as_slice(), g.adjacency()))
        .collect();

    let mut roots: BTreeMap<(u32, u32, u32), Vec<Embedding>> = BTreeMap::new();
    for (gid, (labels, _)) in graphs.iter().enumerate() {
        for e in &dataset.graphs[gid].edges {
            let (lu, lv) = (labels[e.u as usize], labels[e.v as usize]);
            let mut push = |a: u32, b: u32, la: u32, lb: u32| {
                roots.entry((la, e.label, lb)).or_default().push(Embedding {
                    gid: gid as u32,
                    map: vec![a, b],
                });
            };
            if lu <= lv {
                push(e.u, e.v, lu, lv);
            }
            if lv <= lu {
                push(e.v, e.u, lv, lu);
            }
        }
    }

    let mut miner = Miner {
        graphs,
        min_support,
        max_patterns,
        max_edges,
        out: Vec::new(),
        truncated: false,
    };
    if max_edges >= 1 {
        for ((from_label, edge_label, to_label), embs) in roots {
            if distinct_gids(&embs).len() < min_support {
                continue;
            }
            let mut code = DfsCode(vec![DfsEdge {
                from: 0,
                to: 1,
                from_label,
                edge_label,
                to_label,
            }]);
            if !miner.grow(&mut code, embs) {
                break;
            }
        }
    }
    Ok(PatternSet {
        patterns: miner.out,
        min_support,
        truncated: miner.truncated,
    })
}

fn small_graph(g: &AttributedGraph) -> SmallGraph {
    SmallGraph {
        labels: g.vertex_labels.clone(),
        adj: g.adjacency(),
        n_edges: g.n_edges(),
    }
}

/// Minimum DFS code of a connected graph with at least one edge.
pub fn canonical_code(graph: &AttributedGraph) -> Result<DfsCode, MineError> {
    if graph.n_edges() == 0 {
        return Err(MineError::NoEdges);
    }
    if !graph.is_connected() {
        return Err(MineError::Disconnected);
    }
    Ok(min_code_of(&small_graph(graph)))
}

fn dfs_parents(code: &DfsCode) -> Vec<u32> {
    let mut parent = vec![u32::MAX; code.n_vertices()];
    for e in code.edges().iter().filter(|e| e.is_forward()) {
        parent[e.to as usize] = e.from;
    }
    parent
}

/// Whether `graph` contains a label-preserving copy of `pattern`.
pub fn contains(pattern: &Pattern, graph: &AttributedGraph) -> bool {
    let p = SmallGraph::from_code(&pattern.code);
    iso::embeds(&p, &dfs_parents(&pattern.code), &Target::new(graph))
}

/// Number of graphs containing `pattern`, recounted by isomorphism tests.
pub fn graph_support(pattern: &Pattern, dataset: &GraphDataset) -> usize {
    containing_graphs(pattern, dataset).len()
}

pub(crate) fn containing_graphs(pattern: &Pattern, dataset: &GraphDataset) -> Vec<usize> {
    let p = SmallGraph::from_code(&pattern.code);
    let parent = dfs_parents(&pattern.code);
    dataset
        .graphs
        .iter()
        .enumerate()
        .filter(|(_, g)| iso::embeds(&p, &parent, &Target::new(g)))
        .map(|(i, _)| i)
        .collect()
}
