//! Binary pattern-occurrence matrix and per-pattern class contingencies.
//!
//! Column `j` (the footprint of pattern `j`) is a packed bitset over graphs:
//! bit `i` is set iff pattern `j` occurs in graph `i`.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphdata::{Class, DataError, GraphDataset};
use crate::miner::PatternSet;

#[derive(Debug, Error)]
pub enum FootprintError {
    #[error("pattern {0} occurs in no graph")]
    ZeroSupport(usize),
    #[error("pattern {pattern} references graph {graph} outside 0..{n_graphs}")]
    OutOfRange {
        pattern: usize,
        graph: usize,
        n_graphs: usize,
    },
    #[error("invalid contingency counts: {0}")]
    InvalidCounts(String),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Fixed-length packed bitset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Self::zeros(len);
        for i in ones {
            b.set(i);
        }
        b
    }

    pub fn from_bools(values: &[bool]) -> Self {
        Self::from_indices(values.len(), (0..values.len()).filter(|&i| values[i]))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Popcount of `self & other`.
    pub fn and_count(&self, other: &Bits) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Hamming distance.
    pub fn xor_count(&self, other: &Bits) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }
}

/// Supports of one pattern in each class plus the class sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ContingencyCounts {
    /// Support in the positive class (true positives).
    pub a: u64,
    /// Support in the negative class (false positives).
    pub b: u64,
    pub n_pos: u64,
    pub n_neg: u64,
}

impl ContingencyCounts {
    /// Checks `a <= n_pos`, `b <= n_neg` and `a + b >= 1`.
    pub fn new(a: u64, b: u64, n_pos: u64, n_neg: u64) -> Result<Self, FootprintError> {
        if a > n_pos || b > n_neg || a + b == 0 {
            return Err(FootprintError::InvalidCounts(format!(
                "(a={a}, b={b}, n_pos={n_pos}, n_neg={n_neg})"
            )));
        }
        Ok(Self { a, b, n_pos, n_neg })
    }

    pub fn n(&self) -> u64 {
        self.n_pos + self.n_neg
    }

    pub fn tp(&self) -> u64 {
        self.a
    }

    pub fn fp(&self) -> u64 {
        self.b
    }

    pub fn fn_(&self) -> u64 {
        self.n_pos - self.a
    }

    pub fn tn(&self) -> u64 {
        self.n_neg - self.b
    }
}

/// Binary matrix `H` with one column per pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FootprintMatrix {
    labels: Vec<Class>,
    positive: Bits,
    columns: Vec<Bits>,
}

impl FootprintMatrix {
    /// Builds the matrix from columns; every column needs at least one set bit.
    pub fn from_columns(labels: Vec<Class>, columns: Vec<Bits>) -> Result<Self, FootprintError> {
        let n = labels.len();
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), n, "column {j} has {} rows, expected {n}", c.len());
            if c.count_ones() == 0 {
                return Err(FootprintError::ZeroSupport(j));
            }
        }
        let positive = Bits::from_indices(n, (0..n).filter(|&i| labels[i].is_positive()));
        Ok(Self {
            labels,
            positive,
            columns,
        })
    }

    pub fn n_graphs(&self) -> usize {
        self.labels.len()
    }

    pub fn n_patterns(&self) -> usize {
        self.columns.len()
    }

    pub fn labels(&self) -> &[Class] {
        &self.labels
    }

    pub fn n_pos(&self) -> usize {
        self.positive.count_ones()
    }

    pub fn n_neg(&self) -> usize {
        self.n_graphs() - self.n_pos()
    }

    pub fn column(&self, pattern: usize) -> &Bits {
        &self.columns[pattern]
    }

    pub fn columns(&self) -> &[Bits] {
        &self.columns
    }

    pub fn get(&self, graph: usize, pattern: usize) -> bool {
        self.columns[pattern].get(graph)
    }

    /// Rows restricted to `graphs`, in that order.
    pub fn select_rows(&self, graphs: &[usize]) -> Result<Self, FootprintError> {
        let labels = graphs.iter().map(|&g| self.labels[g]).collect();
        let columns = self
            .columns
            .iter()
            .map(|c| {
                Bits::from_indices(
                    graphs.len(),
                    (0..graphs.len()).filter(|&k| c.get(graphs[k])),
                )
            })
            .collect();
        Self::from_columns(labels, columns)
    }

    /// Columns restricted to `patterns`, renumbered in that order.
    pub fn select_columns(&self, patterns: &[usize]) -> Self {
        Self {
            labels: self.labels.clone(),
            positive: self.positive.clone(),
            columns: patterns.iter().map(|&p| self.columns[p].clone()).collect(),
        }
    }
}

/// Footprint matrix of a mined pattern set, columns in pattern-id order.
pub fn build_matrix(
    set: &PatternSet,
    dataset: &GraphDataset,
) -> Result<FootprintMatrix, FootprintError> {
    let labels = dataset.labels()?;
    let n = labels.len();
    let mut columns = Vec::with_capacity(set.len());
    for (j, p) in set.patterns.iter().enumerate() {
        if let Some(&g) = p.graph_ids.iter().find(|&&g| g >= n) {
            return Err(FootprintError::OutOfRange {
                pattern: j,
                graph: g,
                n_graphs: n,
            });
        }
        columns.push(Bits::from_indices(n, p.graph_ids.iter().copied()));
    }
    FootprintMatrix::from_columns(labels, columns)
}

pub fn contingency(matrix: &FootprintMatrix, pattern: usize) -> ContingencyCounts {
    let col = matrix.column(pattern);
    let a = col.and_count(&matrix.positive) as u64;
    ContingencyCounts {
        a,
        b: col.count_ones() as u64 - a,
        n_pos: matrix.n_pos() as u64,
        n_neg: matrix.n_neg() as u64,
    }
}

/// Patterns grouped by bit-identical footprints, groups ordered by smallest member.
pub fn distinct_footprint_groups(matrix: &FootprintMatrix) -> Vec<Vec<usize>> {
    let mut index: HashMap<&Bits, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (j, c) in matrix.columns.iter().enumerate() {
        match index.get(c) {
            Some(&g) => groups[g].push(j),
            None => {
                index.insert(c, groups.len());
                groups.push(vec![j]);
            }
        }
    }
    groups
}

/// `graph_id,pattern_id,present` for every cell.
pub fn matrix_csv(matrix: &FootprintMatrix) -> String {
    let mut out = String::from("graph_id,pattern_id,present\n");
    for g in 0..matrix.n_graphs() {
        for p in 0..matrix.n_patterns() {
            let _ = writeln!(out, "{g},{p},{}", u8::from(matrix.get(g, p)));
        }
    }
    out
}

/// `pattern_id,a,b,n_pos,n_neg` for every pattern.
pub fn contingency_csv(matrix: &FootprintMatrix) -> String {
    let mut out = String::from("pattern_id,a,b,n_pos,n_neg\n");
    for p in 0..matrix.n_patterns() {
        let c = contingency(matrix, p);
        let _ = writeln!(out, "{p},{},{},{},{}", c.a, c.b, c.n_pos, c.n_neg);
    }
    out
}
