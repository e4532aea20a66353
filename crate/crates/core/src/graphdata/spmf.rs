//! gSpan/SPMF transaction format.
//!
//! ```text
//! t # <gid> [class]
//! v <vid> <vlabel>
//! e <src> <dst> <elabel>
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. A trailing `t # -1`
//! ends the input.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{class_mapping, AttributedGraph, Class, DataError, GraphDataset, Interner};

struct Pending {
    labels: Vec<u32>,
    edges: Vec<(u32, u32, u32)>,
    raw_class: Option<i64>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> DataError {
    DataError::Parse {
        line,
        msg: msg.into(),
    }
}

fn field<'a>(
    it: &mut impl Iterator<Item = &'a str>,
    line: usize,
    what: &str,
) -> Result<&'a str, DataError> {
    it.next()
        .ok_or_else(|| parse_err(line, format!("missing {what}")))
}

fn number<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, DataError> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

/// Parses graphs; class labels come from the optional trailing `t # id class` field.
pub fn parse_spmf(text: &str) -> Result<GraphDataset, DataError> {
    parse_inner(text, None)
}

/// Parses graphs and takes their classes from a separate `<gid> <class>` file.
pub fn parse_spmf_with_labels(text: &str, labels: &str) -> Result<GraphDataset, DataError> {
    let labels = parse_class_labels(labels)?;
    parse_inner(text, Some(labels))
}

/// Parses a label file of `<gid> <class>` pairs.
pub fn parse_class_labels(text: &str) -> Result<HashMap<usize, i64>, DataError> {
    let mut out = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let mut it = raw.split_whitespace();
        let gid: usize = number(field(&mut it, line, "graph id")?, line, "graph id")?;
        let class: i64 = number(field(&mut it, line, "class")?, line, "class")?;
        if out.insert(gid, class).is_some() {
            return Err(parse_err(line, format!("duplicate label for graph {gid}")));
        }
    }
    Ok(out)
}

fn parse_inner(text: &str, labels: Option<HashMap<usize, i64>>) -> Result<GraphDataset, DataError> {
    let mut vertex_vocab = Interner::default();
    let mut edge_vocab = Interner::default();
    let mut pending: Vec<Pending> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let mut it = raw.split_whitespace();
        match it.next() {
            Some("t") => {
                if it.next() != Some("#") {
                    return Err(parse_err(line, "expected `t # <gid>`"));
                }
                let gid: i64 = number(field(&mut it, line, "graph id")?, line, "graph id")?;
                if gid == -1 {
                    break;
                }
                let raw_class = it
                    .next()
                    .map(|t| number::<i64>(t, line, "class"))
                    .transpose()?;
                pending.push(Pending {
                    labels: Vec::new(),
                    edges: Vec::new(),
                    raw_class,
                });
            }
            Some("v") => {
                let g = pending
                    .last_mut()
                    .ok_or_else(|| parse_err(line, "vertex before any `t #` line"))?;
                let vid: usize = number(field(&mut it, line, "vertex id")?, line, "vertex id")?;
                if vid != g.labels.len() {
                    return Err(parse_err(
                        line,
                        format!("vertex ids must be sequential, expected {}", g.labels.len()),
                    ));
                }
                let label = field(&mut it, line, "vertex label")?;
                g.labels.push(vertex_vocab.intern(label));
            }
            Some("e") => {
                let g = pending
                    .last_mut()
                    .ok_or_else(|| parse_err(line, "edge before any `t #` line"))?;
                let u: u32 = number(field(&mut it, line, "edge source")?, line, "edge source")?;
                let v: u32 = number(field(&mut it, line, "edge target")?, line, "edge target")?;
                let label = field(&mut it, line, "edge label")?;
                g.edges.push((u, v, edge_vocab.intern(label)));
            }
            Some(other) => return Err(parse_err(line, format!("unknown record `{other}`"))),
            None => unreachable!(),
        }
    }

    let raw_classes: Vec<Option<i64>> = pending
        .iter()
        .enumerate()
        .map(|(idx, p)| match &labels {
            Some(map) => map.get(&idx).copied(),
            None => p.raw_class,
        })
        .collect();
    let present: Vec<i64> = raw_classes.iter().flatten().copied().collect();
    let class_values = if present.is_empty() {
        None
    } else {
        if present.len() != pending.len() {
            let missing = raw_classes.iter().position(Option::is_none).unwrap_or(0);
            return Err(DataError::Structure {
                graph: missing,
                msg: "missing class label".into(),
            });
        }
        Some(class_mapping(present)?)
    };

    let mut graphs = Vec::with_capacity(pending.len());
    for (idx, (p, raw)) in pending.into_iter().zip(raw_classes).enumerate() {
        let class = match (class_values, raw) {
            (Some((neg, _)), Some(r)) => Some(if r == neg {
                Class::Negative
            } else {
                Class::Positive
            }),
            _ => None,
        };
        graphs.push(AttributedGraph::new(idx, p.labels, p.edges, class)?);
    }
    Ok(GraphDataset {
        graphs,
        vertex_vocab: vertex_vocab.into_tokens(),
        edge_vocab: edge_vocab.into_tokens(),
        class_values,
    })
}

/// Writes a dataset back in SPMF form, with the class as the trailing `t #` field.
pub fn write_spmf(dataset: &GraphDataset) -> String {
    let vtok = |id: u32| {
        dataset
            .vertex_vocab
            .get(id as usize)
            .cloned()
            .unwrap_or_else(|| id.to_string())
    };
    let etok = |id: u32| {
        dataset
            .edge_vocab
            .get(id as usize)
            .cloned()
            .unwrap_or_else(|| id.to_string())
    };
    let mut out = String::new();
    for g in &dataset.graphs {
        match (g.class, dataset.class_values) {
            (Some(c), Some((neg, pos))) => {
                let raw = if c.is_positive() { pos } else { neg };
                let _ = writeln!(out, "t # {} {}", g.id, raw);
            }
            (Some(c), None) => {
                let _ = writeln!(out, "t # {} {}", g.id, i64::from(c.is_positive()));
            }
            (None, _) => {
                let _ = writeln!(out, "t # {}", g.id);
            }
        }
        for (v, &l) in g.vertex_labels.iter().enumerate() {
            let _ = writeln!(out, "v {} {}", v, vtok(l));
        }
        for e in &g.edges {
            let _ = writeln!(out, "e {} {} {}", e.u, e.v, etok(e.label));
        }
    }
    out
}
