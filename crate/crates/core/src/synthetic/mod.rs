//! Seeded synthetic data: random balanced footprint matrices, matrices with
//! planted discriminative columns, and small labeled graph datasets.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::footprints::{Bits, FootprintMatrix};
use crate::graphdata::{AttributedGraph, Class, GraphDataset};

/// `n_half` positives followed by `n_half` negatives.
pub fn balanced_labels(n_half: usize) -> Vec<Class> {
    let mut labels = vec![Class::Positive; n_half];
    labels.resize(2 * n_half, Class::Negative);
    labels
}

fn column(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Vec<bool> {
    (0..n).map(|_| rng.gen_bool(density)).collect()
}

/// Columns with a density drawn uniformly from `[0.05, 0.95)`; never empty, never full.
pub fn random_footprints(n_half: usize, n_patterns: usize, seed: u64) -> FootprintMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 2 * n_half;
    let columns = (0..n_patterns)
        .map(|_| loop {
            let density = rng.gen_range(0.05..0.95);
            let c = column(&mut rng, n, density);
            let ones = c.iter().filter(|&&x| x).count();
            if ones > 0 && ones < n {
                break Bits::from_bools(&c);
            }
        })
        .collect();
    FootprintMatrix::from_columns(balanced_labels(n_half), columns).expect("columns are non-empty")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedConfig {
    pub n_half: usize,
    pub n_planted: usize,
    pub n_noise: usize,
    /// Occurrence probability of a planted pattern in a positive graph.
    pub planted_pos_rate: f64,
    /// Occurrence probability of a planted pattern in a negative graph.
    pub planted_neg_rate: f64,
    /// Noise densities are uniform in this range, independent of the class.
    pub noise_density: (f64, f64),
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        Self {
            n_half: 50,
            n_planted: 5,
            n_noise: 200,
            planted_pos_rate: 0.9,
            planted_neg_rate: 0.1,
            noise_density: (0.02, 0.5),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Planted {
    pub matrix: FootprintMatrix,
    /// Column ids of the planted patterns, ascending.
    pub planted: Vec<usize>,
}

/// Planted and noise columns in a seeded random order.
pub fn planted_footprints(cfg: &PlantedConfig) -> Planted {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = 2 * cfg.n_half;
    let labels = balanced_labels(cfg.n_half);
    let mut columns: Vec<(bool, Bits)> = Vec::with_capacity(cfg.n_planted + cfg.n_noise);
    for k in 0..cfg.n_planted + cfg.n_noise {
        let planted = k < cfg.n_planted;
        let bits = loop {
            let c: Vec<bool> = if planted {
                labels
                    .iter()
                    .map(|l| {
                        rng.gen_bool(if l.is_positive() {
                            cfg.planted_pos_rate
                        } else {
                            cfg.planted_neg_rate
                        })
                    })
                    .collect()
            } else {
                let density = rng.gen_range(cfg.noise_density.0..cfg.noise_density.1);
                column(&mut rng, n, density)
            };
            if c.iter().any(|&x| x) {
                break Bits::from_bools(&c);
            }
        };
        columns.push((planted, bits));
    }
    columns.shuffle(&mut rng);
    let planted = (0..columns.len()).filter(|&j| columns[j].0).collect();
    let matrix = FootprintMatrix::from_columns(labels, columns.into_iter().map(|c| c.1).collect())
        .expect("columns are non-empty");
    Planted { matrix, planted }
}

/// Balanced graphs over vertex labels `C, N, O` and edge labels `1, 2`.
///
/// Each graph is a random tree with a few extra edges. A motif (an `S` vertex
/// bonded by a `2` edge to an `O` vertex) is attached to 90% of positives and
/// 10% of negatives.
pub fn planted_graph_dataset(n_half: usize, seed: u64) -> GraphDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graphs = balanced_labels(n_half)
        .into_iter()
        .enumerate()
        .map(|(id, class)| {
            let n_v = rng.gen_range(5..=8u32);
            let mut labels: Vec<u32> = (0..n_v).map(|_| rng.gen_range(0..3)).collect();
            let mut edges: Vec<(u32, u32, u32)> = (1..n_v)
                .map(|v| (rng.gen_range(0..v), v, rng.gen_range(0..2)))
                .collect();
            for _ in 0..rng.gen_range(0..3) {
                let (a, b) = (rng.gen_range(0..n_v), rng.gen_range(0..n_v));
                let (u, v) = (a.min(b), a.max(b));
                if u != v && !edges.iter().any(|e| (e.0.min(e.1), e.0.max(e.1)) == (u, v)) {
                    edges.push((u, v, rng.gen_range(0..2)));
                }
            }
            let rate = if class.is_positive() { 0.9 } else { 0.1 };
            if rng.gen_bool(rate) {
                let anchor = rng.gen_range(0..n_v);
                labels[anchor as usize] = 2;
                labels.push(3);
                edges.push((anchor, n_v, 1));
            }
            AttributedGraph::new(id, labels, edges, Some(class)).expect("generated graph is simple")
        })
        .collect();
    GraphDataset {
        graphs,
        vertex_vocab: ["C", "N", "O", "S"].map(String::from).to_vec(),
        edge_vocab: ["1", "2"].map(String::from).to_vec(),
        class_values: Some((0, 1)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_footprints_avoid_empty_and_full_columns() {
        let m = random_footprints(10, 50, 1);
        assert_eq!((m.n_pos(), m.n_neg(), m.n_patterns()), (10, 10, 50));
        assert!(m
            .columns()
            .iter()
            .all(|c| c.count_ones() > 0 && c.count_ones() < 20));
        assert_eq!(m, random_footprints(10, 50, 1));
    }

    #[test]
    fn planted_columns_are_discriminative() {
        let p = planted_footprints(&PlantedConfig::default());
        assert_eq!(p.planted.len(), 5);
        assert_eq!(p.matrix.n_patterns(), 205);
        for &j in &p.planted {
            let c = crate::footprints::contingency(&p.matrix, j);
            assert!(c.a > 35 && c.b < 15, "{c:?}");
        }
    }

    #[test]
    fn planted_graphs_are_connected_and_balanced() {
        let ds = planted_graph_dataset(20, 4);
        assert_eq!((ds.n_pos(), ds.n_neg()), (20, 20));
        assert!(ds.graphs.iter().all(|g| g.is_connected()));
        let with_motif = |c: Class| {
            ds.graphs
                .iter()
                .filter(|g| g.class == Some(c) && g.vertex_labels.contains(&3))
                .count()
        };
        assert!(with_motif(Class::Positive) > with_motif(Class::Negative));
    }
}
