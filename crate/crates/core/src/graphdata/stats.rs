use serde::Serialize;

use super::{AttributedGraph, DataError, GraphDataset};

/// Per-graph averages over a dataset.
///
/// Density is always `2m / (n(n-1))`, also for bipartite graphs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStats {
    pub n_graphs: usize,
    pub avg_vertices: f64,
    pub avg_edges: f64,
    pub mean_avg_degree: f64,
    pub avg_density: f64,
    /// Mean over the graphs that have at least one connected triple.
    pub avg_global_clustering: Option<f64>,
}

fn density(g: &AttributedGraph) -> f64 {
    let n = g.n_vertices();
    if n < 2 {
        0.0
    } else {
        2.0 * g.n_edges() as f64 / (n * (n - 1)) as f64
    }
}

/// `3 * triangles / connected triples`, `None` without any triple.
fn global_clustering(g: &AttributedGraph) -> Option<f64> {
    let adj = g.adjacency();
    let triples: usize = adj
        .iter()
        .map(|l| l.len() * l.len().saturating_sub(1) / 2)
        .sum();
    if triples == 0 {
        return None;
    }
    let mut triangles = 0usize;
    for e in &g.edges {
        let (nu, nv) = (&adj[e.u as usize], &adj[e.v as usize]);
        let (mut i, mut j) = (0, 0);
        while i < nu.len() && j < nv.len() {
            let (x, y) = (nu[i].0, nv[j].0);
            if x == y {
                if x > e.v {
                    triangles += 1;
                }
                i += 1;
                j += 1;
            } else if x < y {
                i += 1;
            } else {
                j += 1;
            }
        }
    }
    Some(3.0 * triangles as f64 / triples as f64)
}

pub fn dataset_stats(dataset: &GraphDataset) -> Result<DatasetStats, DataError> {
    if dataset.is_empty() {
        return Err(DataError::Empty);
    }
    let n = dataset.len() as f64;
    let mean = |f: &dyn Fn(&AttributedGraph) -> f64| dataset.graphs.iter().map(f).sum::<f64>() / n;
    let clustering: Vec<f64> = dataset
        .graphs
        .iter()
        .filter_map(global_clustering)
        .collect();
    Ok(DatasetStats {
        n_graphs: dataset.len(),
        avg_vertices: mean(&|g| g.n_vertices() as f64),
        avg_edges: mean(&|g| g.n_edges() as f64),
        mean_avg_degree: mean(&|g| {
            if g.n_vertices() == 0 {
                0.0
            } else {
                2.0 * g.n_edges() as f64 / g.n_vertices() as f64
            }
        }),
        avg_density: mean(&density),
        avg_global_clustering: (!clustering.is_empty())
            .then(|| clustering.iter().sum::<f64>() / clustering.len() as f64),
    })
}
