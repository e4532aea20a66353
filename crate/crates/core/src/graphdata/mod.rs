//! Labeled undirected graph collections with a binary class label per graph.
//!
//! Vertex and edge attributes are collapsed to dense integer label ids. Raw
//! label tokens are interned in file order and kept in the dataset's
//! vocabularies so that exports can write the original tokens back.

mod spmf;
mod stats;
mod tudataset;

pub use spmf::{parse_class_labels, parse_spmf, parse_spmf_with_labels, write_spmf};
pub use stats::{dataset_stats, DatasetStats};
pub use tudataset::{load_tudataset, parse_tudataset, TuFiles};

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Binary class of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class {
    Negative,
    Positive,
}

impl Class {
    pub fn is_positive(self) -> bool {
        self == Class::Positive
    }

    /// `+1` for positive, `-1` for negative.
    pub fn sign(self) -> f64 {
        match self {
            Class::Positive => 1.0,
            Class::Negative => -1.0,
        }
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("graph {graph}: {msg}")]
    Structure { graph: usize, msg: String },
    #[error("inconsistent dataset: {0}")]
    Consistency(String),
    #[error("class {0:?} has no graphs")]
    EmptyClass(Class),
    #[error("dataset is empty")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Undirected labeled edge, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub label: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributedGraph {
    pub id: usize,
    pub vertex_labels: Vec<u32>,
    pub edges: Vec<Edge>,
    pub class: Option<Class>,
}

impl AttributedGraph {
    /// Builds a graph, normalizing every edge to `u < v`.
    ///
    /// Self-loops, dangling endpoints and parallel edges are rejected.
    pub fn new(
        id: usize,
        vertex_labels: Vec<u32>,
        edges: impl IntoIterator<Item = (u32, u32, u32)>,
        class: Option<Class>,
    ) -> Result<Self, DataError> {
        let n = vertex_labels.len() as u32;
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (a, b, label) in edges {
            if a == b {
                return Err(DataError::Structure {
                    graph: id,
                    msg: format!("self-loop on vertex {a}"),
                });
            }
            if a >= n || b >= n {
                return Err(DataError::Structure {
                    graph: id,
                    msg: format!("edge ({a}, {b}) references a missing vertex (graph has {n})"),
                });
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((u, v)) {
                return Err(DataError::Structure {
                    graph: id,
                    msg: format!("parallel edge ({u}, {v})"),
                });
            }
            out.push(Edge { u, v, label });
        }
        Ok(Self {
            id,
            vertex_labels,
            edges: out,
            class,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Adjacency lists of `(neighbor, edge label)`.
    pub fn adjacency(&self) -> Vec<Vec<(u32, u32)>> {
        let mut adj = vec![Vec::new(); self.n_vertices()];
        for e in &self.edges {
            adj[e.u as usize].push((e.v, e.label));
            adj[e.v as usize].push((e.u, e.label));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_vertices()];
        for e in &self.edges {
            deg[e.u as usize] += 1;
            deg[e.v as usize] += 1;
        }
        deg
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n_vertices();
        if n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &(y, _) in &adj[x] {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    count += 1;
                    stack.push(y as usize);
                }
            }
        }
        count == n
    }
}

/// A collection of graphs with ids `0..N`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphDataset {
    pub graphs: Vec<AttributedGraph>,
    /// Raw vertex label token for each label id.
    pub vertex_vocab: Vec<String>,
    /// Raw edge label token for each label id.
    pub edge_vocab: Vec<String>,
    /// Raw class values mapped to (negative, positive).
    pub class_values: Option<(i64, i64)>,
}

impl GraphDataset {
    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn n_pos(&self) -> usize {
        self.graphs
            .iter()
            .filter(|g| g.class == Some(Class::Positive))
            .count()
    }

    pub fn n_neg(&self) -> usize {
        self.graphs
            .iter()
            .filter(|g| g.class == Some(Class::Negative))
            .count()
    }

    /// Per-graph classes; errors if any graph is unlabeled.
    pub fn labels(&self) -> Result<Vec<Class>, DataError> {
        self.graphs
            .iter()
            .map(|g| {
                g.class.ok_or_else(|| DataError::Structure {
                    graph: g.id,
                    msg: "missing class label".into(),
                })
            })
            .collect()
    }

    /// Checks that graph ids are exactly `0..N`.
    pub fn validate_ids(&self) -> Result<(), DataError> {
        for (i, g) in self.graphs.iter().enumerate() {
            if g.id != i {
                return Err(DataError::Consistency(format!(
                    "graph at position {i} has id {}",
                    g.id
                )));
            }
        }
        Ok(())
    }

    /// The sub-collection at `positions`, re-numbered `0..k` in the given order.
    pub fn select(&self, positions: &[usize]) -> GraphDataset {
        let graphs = positions
            .iter()
            .enumerate()
            .map(|(new_id, &p)| {
                let mut g = self.graphs[p].clone();
                g.id = new_id;
                g
            })
            .collect();
        GraphDataset {
            graphs,
            vertex_vocab: self.vertex_vocab.clone(),
            edge_vocab: self.edge_vocab.clone(),
            class_values: self.class_values,
        }
    }
}

/// Down-samples the majority class uniformly at random to the minority size.
///
/// The relative order of the kept graphs is preserved and ids are renumbered.
/// A balanced input is returned unchanged.
pub fn balance_undersample(dataset: &GraphDataset, seed: u64) -> Result<GraphDataset, DataError> {
    let labels = dataset.labels()?;
    let pos: Vec<usize> = (0..labels.len())
        .filter(|&i| labels[i].is_positive())
        .collect();
    let neg: Vec<usize> = (0..labels.len())
        .filter(|&i| !labels[i].is_positive())
        .collect();
    if pos.is_empty() {
        return Err(DataError::EmptyClass(Class::Positive));
    }
    if neg.is_empty() {
        return Err(DataError::EmptyClass(Class::Negative));
    }
    if pos.len() == neg.len() {
        return Ok(dataset.clone());
    }
    let (major, minor) = if pos.len() > neg.len() {
        (&pos, &neg)
    } else {
        (&neg, &pos)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kept: Vec<usize> = sample(&mut rng, major.len(), minor.len())
        .into_iter()
        .map(|i| major[i])
        .collect();
    kept.extend_from_slice(minor);
    kept.sort_unstable();
    Ok(dataset.select(&kept))
}

/// Interns raw label tokens to dense ids in order of first appearance.
#[derive(Debug, Default)]
pub(crate) struct Interner {
    ids: std::collections::HashMap<String, u32>,
    tokens: Vec<String>,
}

impl Interner {
    pub(crate) fn intern(&mut self, token: &str) -> u32 {
        if let Some(&id) = self.ids.get(token) {
            return id;
        }
        let id = self.tokens.len() as u32;
        self.ids.insert(token.to_string(), id);
        self.tokens.push(token.to_string());
        id
    }

    pub(crate) fn into_tokens(self) -> Vec<String> {
        self.tokens
    }
}

/// Maps a set of raw class values onto `{Negative, Positive}` by ascending value.
///
/// A single distinct value `v` is positive iff `v > 0`.
pub(crate) fn class_mapping(
    values: impl IntoIterator<Item = i64>,
) -> Result<(i64, i64), DataError> {
    let mut distinct: Vec<i64> = values.into_iter().collect();
    distinct.sort_unstable();
    distinct.dedup();
    match distinct.as_slice() {
        [neg, pos] => Ok((*neg, *pos)),
        [v] if *v > 0 => Ok((v - 1, *v)),
        [v] => Ok((*v, v + 1)),
        other => Err(DataError::Consistency(format!(
            "expected exactly two class values, found {}: {:?}",
            other.len(),
            other
        ))),
    }
}
