//! Pattern files in the `t #` graph format with a `<pattern_id> <support>` sidecar.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{canonical_code, containing_graphs, MineError, Pattern, PatternSet};
use crate::graphdata::{parse_spmf, GraphDataset};

fn token(vocab: &[String], id: u32) -> String {
    vocab
        .get(id as usize)
        .cloned()
        .unwrap_or_else(|| id.to_string())
}

/// Returns `(patterns, supports)` file contents.
///
/// Vertices are written in DFS discovery order; labels use the dataset's raw tokens.
pub fn export_patterns(set: &PatternSet, dataset: &GraphDataset) -> (String, String) {
    let mut graphs = String::new();
    let mut supports = String::new();
    for p in &set.patterns {
        let _ = writeln!(graphs, "t # {}", p.id);
        for (v, &l) in p.code.vertex_labels().iter().enumerate() {
            let _ = writeln!(graphs, "v {} {}", v, token(&dataset.vertex_vocab, l));
        }
        for e in p.code.edges() {
            let _ = writeln!(
                graphs,
                "e {} {} {}",
                e.from,
                e.to,
                token(&dataset.edge_vocab, e.edge_label)
            );
        }
        let _ = writeln!(supports, "{} {}", p.id, p.support());
    }
    (graphs, supports)
}

/// Maps pattern-file tokens onto dataset label ids.
///
/// Tokens unknown to the dataset get fresh ids past its vocabulary, so they
/// never match a dataset label.
struct LabelMap<'a> {
    vocab: &'a [String],
    index: HashMap<&'a str, u32>,
    unknown: HashMap<String, u32>,
}

impl<'a> LabelMap<'a> {
    fn new(vocab: &'a [String]) -> Self {
        let index = vocab
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i as u32))
            .collect();
        Self {
            vocab,
            index,
            unknown: HashMap::new(),
        }
    }

    fn id(&mut self, tok: &str) -> u32 {
        if let Some(&id) = self.index.get(tok) {
            return id;
        }
        if self.vocab.is_empty() {
            if let Ok(id) = tok.parse() {
                return id;
            }
        }
        let next = (self.vocab.len() + self.unknown.len()) as u32;
        *self.unknown.entry(tok.to_string()).or_insert(next)
    }
}

/// Reads patterns mined elsewhere and recomputes their supports on `dataset`.
///
/// Ids follow file order. `min_support` of the result is the smallest
/// recomputed support.
pub fn import_patterns(text: &str, dataset: &GraphDataset) -> Result<PatternSet, MineError> {
    let parsed = parse_spmf(text)?;
    let mut vmap = LabelMap::new(&dataset.vertex_vocab);
    let mut emap = LabelMap::new(&dataset.edge_vocab);
    let mut seen = HashMap::new();
    let mut patterns = Vec::with_capacity(parsed.len());
    for (id, mut g) in parsed.graphs.into_iter().enumerate() {
        for l in &mut g.vertex_labels {
            *l = vmap.id(&parsed.vertex_vocab[*l as usize]);
        }
        for e in &mut g.edges {
            e.label = emap.id(&parsed.edge_vocab[e.label as usize]);
        }
        let code = canonical_code(&g)?;
        if let Some(&first) = seen.get(&code) {
            return Err(MineError::Duplicate(first, id));
        }
        seen.insert(code.clone(), id);
        let mut p = Pattern::new(id, code, Vec::new());
        p.graph_ids = containing_graphs(&p, dataset);
        patterns.push(p);
    }
    let min_support = patterns.iter().map(Pattern::support).min().unwrap_or(0);
    Ok(PatternSet {
        patterns,
        min_support,
        truncated: false,
    })
}
