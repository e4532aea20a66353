//! TUDataset multi-file format.
//!
//! `DS_A.txt` holds comma-separated 1-based node pairs with both directions of
//! every undirected edge, `DS_graph_indicator.txt` maps each node to its
//! 1-based graph, and `DS_graph_labels.txt` holds one class per graph. Node and
//! edge label files are optional and default every label to `0`.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use super::{class_mapping, AttributedGraph, Class, DataError, GraphDataset, Interner};

/// Contents of the files making up one TUDataset.
#[derive(Debug, Clone, Default)]
pub struct TuFiles {
    pub adjacency: String,
    pub graph_indicator: String,
    pub graph_labels: String,
    pub node_labels: Option<String>,
    pub edge_labels: Option<String>,
}

fn consistency(msg: impl Into<String>) -> DataError {
    DataError::Consistency(msg.into())
}

/// Non-empty trimmed lines, each paired with its 1-based line number.
fn rows(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_int(tok: &str, line: usize, file: &str) -> Result<i64, DataError> {
    tok.trim().parse().map_err(|_| DataError::Parse {
        line,
        msg: format!("{file}: invalid integer `{}`", tok.trim()),
    })
}

/// First comma- or whitespace-separated token of a label row.
fn label_token(row: &str) -> &str {
    row.split(|c: char| c == ',' || c.is_whitespace())
        .find(|t| !t.is_empty())
        .unwrap_or(row)
}

pub fn parse_tudataset(files: &TuFiles) -> Result<GraphDataset, DataError> {
    let mut node_graph = Vec::new();
    for (line, row) in rows(&files.graph_indicator) {
        let g = parse_int(row, line, "graph_indicator")?;
        if g < 1 {
            return Err(consistency(format!(
                "graph_indicator line {line}: graph id {g} is not a 1-based id"
            )));
        }
        node_graph.push((g - 1) as usize);
    }

    let raw_classes: Vec<i64> = rows(&files.graph_labels)
        .map(|(line, row)| parse_int(row, line, "graph_labels"))
        .collect::<Result<_, _>>()?;
    let n_graphs = raw_classes.len();
    if let Some(&max) = node_graph.iter().max() {
        if max >= n_graphs {
            return Err(consistency(format!(
                "graph_indicator references graph {} but graph_labels has {n_graphs} rows",
                max + 1
            )));
        }
    }

    let mut vertex_vocab = Interner::default();
    let node_labels: Vec<u32> = match &files.node_labels {
        Some(text) => rows(text)
            .map(|(_, row)| vertex_vocab.intern(label_token(row)))
            .collect(),
        None => {
            vertex_vocab.intern("0");
            vec![0; node_graph.len()]
        }
    };
    if node_labels.len() != node_graph.len() {
        return Err(consistency(format!(
            "node_labels has {} rows but graph_indicator has {}",
            node_labels.len(),
            node_graph.len()
        )));
    }

    // Local vertex index of every node within its graph, in file order.
    let mut local = Vec::with_capacity(node_graph.len());
    let mut labels_per_graph = vec![Vec::new(); n_graphs];
    for (node, &g) in node_graph.iter().enumerate() {
        local.push(labels_per_graph[g].len() as u32);
        labels_per_graph[g].push(node_labels[node]);
    }

    let mut pairs = Vec::new();
    for (line, row) in rows(&files.adjacency) {
        let mut it = row.split(',');
        let (Some(x), Some(y), None) = (it.next(), it.next(), it.next()) else {
            return Err(DataError::Parse {
                line,
                msg: "adjacency: expected `<src>, <dst>`".into(),
            });
        };
        let (x, y) = (
            parse_int(x, line, "adjacency")?,
            parse_int(y, line, "adjacency")?,
        );
        for n in [x, y] {
            if n < 1 || n as usize > node_graph.len() {
                return Err(consistency(format!(
                    "adjacency line {line}: node {n} outside 1..={}",
                    node_graph.len()
                )));
            }
        }
        pairs.push(((x - 1) as usize, (y - 1) as usize));
    }

    let mut edge_vocab = Interner::default();
    let edge_labels: Vec<u32> = match &files.edge_labels {
        Some(text) => rows(text)
            .map(|(_, row)| edge_vocab.intern(label_token(row)))
            .collect(),
        None => {
            edge_vocab.intern("0");
            vec![0; pairs.len()]
        }
    };
    if edge_labels.len() != pairs.len() {
        return Err(consistency(format!(
            "edge_labels has {} rows but adjacency has {}",
            edge_labels.len(),
            pairs.len()
        )));
    }

    // Both directions appear; the first row seen supplies the edge label.
    let mut seen: HashMap<(usize, usize), u32> = HashMap::new();
    let mut edges_per_graph = vec![Vec::new(); n_graphs];
    for (row, &(x, y)) in pairs.iter().enumerate() {
        let g = node_graph[x];
        if node_graph[y] != g {
            return Err(consistency(format!(
                "adjacency row {}: nodes {} and {} belong to different graphs",
                row + 1,
                x + 1,
                y + 1
            )));
        }
        let key = (x.min(y), x.max(y));
        if seen.contains_key(&key) {
            continue;
        }
        seen.insert(key, edge_labels[row]);
        edges_per_graph[g].push((local[x], local[y], edge_labels[row]));
    }

    let class_values = if n_graphs == 0 {
        None
    } else {
        Some(class_mapping(raw_classes.iter().copied())?)
    };
    let mut graphs = Vec::with_capacity(n_graphs);
    for (g, (labels, edges)) in labels_per_graph
        .into_iter()
        .zip(edges_per_graph)
        .enumerate()
    {
        let class = class_values.map(|(neg, _)| {
            if raw_classes[g] == neg {
                Class::Negative
            } else {
                Class::Positive
            }
        });
        graphs.push(AttributedGraph::new(g, labels, edges, class)?);
    }
    Ok(GraphDataset {
        graphs,
        vertex_vocab: vertex_vocab.into_tokens(),
        edge_vocab: edge_vocab.into_tokens(),
        class_values,
    })
}

/// Reads `<dir>/<name>_A.txt` and its sibling files.
pub fn load_tudataset(dir: impl AsRef<Path>, name: &str) -> Result<GraphDataset, DataError> {
    let dir = dir.as_ref();
    let read = |suffix: &str| fs::read_to_string(dir.join(format!("{name}_{suffix}.txt")));
    let optional = |suffix: &str| {
        let path = dir.join(format!("{name}_{suffix}.txt"));
        if path.exists() {
            fs::read_to_string(path).map(Some)
        } else {
            Ok(None)
        }
    };
    let files = TuFiles {
        adjacency: read("A")?,
        graph_indicator: read("graph_indicator")?,
        graph_labels: read("graph_labels")?,
        node_labels: optional("node_labels")?,
        edge_labels: optional("edge_labels")?,
    };
    parse_tudataset(&files)
}
