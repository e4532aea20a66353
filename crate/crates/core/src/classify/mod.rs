//! Linear soft-margin SVM on binary pattern-occurrence vectors, trained by
//! deterministic primal subgradient descent, with stratified cross-validation.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::footprints::FootprintMatrix;
use crate::graphdata::Class;

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    #[error("training rows contain only one class")]
    SingleClass,
    #[error("model has {model} features, data has {data}")]
    Dimension { model: usize, data: usize },
    #[error("class {class:?} has {count} rows, fewer than {k} folds")]
    ClassTooSmall {
        class: Class,
        count: usize,
        k: usize,
    },
    #[error("need at least 2 folds, got {0}")]
    TooFewFolds(usize),
    #[error("C must be positive and finite, got {0}")]
    BadC(f64),
    #[error("prediction and truth lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Binary rows restricted to selected pattern columns, stored sparsely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureView {
    columns: Vec<usize>,
    /// Positions (into `columns`) of the set features, row after row, ascending within a row.
    indices: Vec<u32>,
    /// Row `i` occupies `indices[offsets[i]..offsets[i + 1]]`.
    offsets: Vec<usize>,
    labels: Vec<Class>,
}

fn flatten(rows: impl IntoIterator<Item = Vec<u32>>) -> (Vec<u32>, Vec<usize>) {
    let mut indices = Vec::new();
    let mut offsets = vec![0];
    for r in rows {
        indices.extend(r);
        offsets.push(indices.len());
    }
    (indices, offsets)
}

impl FeatureView {
    /// Rows are graphs of `matrix`; feature `j` is pattern `columns[j]`.
    pub fn new(matrix: &FootprintMatrix, columns: &[usize]) -> Self {
        let mut rows = vec![Vec::new(); matrix.n_graphs()];
        for (j, &p) in columns.iter().enumerate() {
            for g in matrix.column(p).ones() {
                rows[g].push(j as u32);
            }
        }
        let (indices, offsets) = flatten(rows);
        Self {
            columns: columns.to_vec(),
            indices,
            offsets,
            labels: matrix.labels().to_vec(),
        }
    }

    pub fn from_dense(rows: &[Vec<bool>], labels: Vec<Class>) -> Self {
        let d = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == d), "ragged rows");
        assert_eq!(rows.len(), labels.len(), "one label per row");
        let (indices, offsets) = flatten(
            rows.iter()
                .map(|r| (0..d as u32).filter(|&j| r[j as usize]).collect()),
        );
        Self {
            columns: (0..d).collect(),
            indices,
            offsets,
            labels,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    pub fn labels(&self) -> &[Class] {
        &self.labels
    }

    pub fn active(&self, row: usize) -> &[u32] {
        &self.indices[self.offsets[row]..self.offsets[row + 1]]
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let (indices, offsets) = flatten(rows.iter().map(|&r| self.active(r).to_vec()));
        Self {
            columns: self.columns.clone(),
            indices,
            offsets,
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrainConfig {
    /// Soft-margin penalty.
    pub c: f64,
    pub epochs: usize,
    /// Drives the example order.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            epochs: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearModel {
    /// Pattern id of each weight.
    pub columns: Vec<usize>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub c: f64,
    pub seed: u64,
    /// Objective of the returned iterate after each epoch; non-increasing.
    pub objective_trace: Vec<f64>,
}

impl LinearModel {
    pub fn decision(&self, active: &[u32]) -> f64 {
        active
            .iter()
            .map(|&j| self.weights[j as usize])
            .sum::<f64>()
            + self.bias
    }
}

fn sign_of(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// `λ/2 (|w|² + b²) + mean hinge loss`.
fn objective(fv: &FeatureView, w: &[f64], b: f64, lambda: f64) -> f64 {
    let reg = w.iter().map(|x| x * x).sum::<f64>() + b * b;
    let loss: f64 = (0..fv.n_rows())
        .map(|i| {
            let f = fv.active(i).iter().map(|&j| w[j as usize]).sum::<f64>() + b;
            (1.0 - fv.labels[i].sign() * f).max(0.0)
        })
        .sum();
    lambda / 2.0 * reg + loss / fv.n_rows() as f64
}

/// Trains on every row of `fv`. The bias is an extra constant feature.
///
/// Step `t` uses rate `1/(λt)` with `λ = 1/(C n)`; after `t` steps the iterate
/// is `u_t / (λt)` where `u_t` sums `y x` over margin violators. The returned
/// model is the iterate with the lowest objective seen at an epoch end.
pub fn train(fv: &FeatureView, cfg: &TrainConfig) -> Result<LinearModel, ClassifyError> {
    if !(cfg.c > 0.0 && cfg.c.is_finite()) {
        return Err(ClassifyError::BadC(cfg.c));
    }
    let n = fv.n_rows();
    let n_pos = fv.labels.iter().filter(|c| c.is_positive()).count();
    if n_pos == 0 || n_pos == n {
        return Err(ClassifyError::SingleClass);
    }
    let d = fv.n_features();
    let model = |weights: Vec<f64>, bias: f64, objective_trace: Vec<f64>| LinearModel {
        columns: fv.columns.clone(),
        weights,
        bias,
        c: cfg.c,
        seed: cfg.seed,
        objective_trace,
    };
    let lambda = 1.0 / (cfg.c * n as f64);
    let mut set = vec![0usize; d];
    for &j in &fv.indices {
        set[j as usize] += 1;
    }
    let informative = set.iter().any(|&c| c != 0 && c != n);
    if !informative {
        // constant features: the majority sign, positive on ties
        let b = sign_of(2.0 * n_pos as f64 - n as f64);
        let obj = objective(fv, &vec![0.0; d], b, lambda);
        return Ok(model(vec![0.0; d], b, vec![obj; cfg.epochs]));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut u = vec![0.0; d];
    let mut u_b = 0.0;
    let mut t: u64 = 0;
    let mut best = (f64::INFINITY, vec![0.0; d], 0.0);
    let mut trace = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let y = fv.labels[i].sign();
            let scale = if t == 0 {
                0.0
            } else {
                1.0 / (lambda * t as f64)
            };
            let margin =
                y * scale * (fv.active(i).iter().map(|&j| u[j as usize]).sum::<f64>() + u_b);
            if margin < 1.0 {
                for &j in fv.active(i) {
                    u[j as usize] += y;
                }
                u_b += y;
            }
            t += 1;
        }
        let scale = 1.0 / (lambda * t as f64);
        let w: Vec<f64> = u.iter().map(|x| x * scale).collect();
        let b = u_b * scale;
        let obj = objective(fv, &w, b, lambda);
        if obj < best.0 {
            best = (obj, w, b);
        }
        trace.push(best.0);
    }
    Ok(model(best.1, best.2, trace))
}

/// `sign(w·x + b)` with `sign(0)` positive.
pub fn predict(model: &LinearModel, fv: &FeatureView) -> Result<Vec<Class>, ClassifyError> {
    if model.weights.len() != fv.n_features() {
        return Err(ClassifyError::Dimension {
            model: model.weights.len(),
            data: fv.n_features(),
        });
    }
    Ok((0..fv.n_rows())
        .map(|i| {
            if model.decision(fv.active(i)) >= 0.0 {
                Class::Positive
            } else {
                Class::Negative
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf1 {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn safe_div(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        0.0
    } else {
        x / y
    }
}

/// Precision, recall and F1 of the positive class; 0 for empty denominators.
pub fn prf1(predicted: &[Class], truth: &[Class]) -> Result<Prf1, ClassifyError> {
    if predicted.len() != truth.len() {
        return Err(ClassifyError::LengthMismatch(predicted.len(), truth.len()));
    }
    let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
    for (p, t) in predicted.iter().zip(truth) {
        match (p.is_positive(), t.is_positive()) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let precision = safe_div(tp as f64, (tp + fp) as f64);
    let recall = safe_div(tp as f64, (tp + fn_) as f64);
    Ok(Prf1 {
        precision,
        recall,
        f1: safe_div(2.0 * precision * recall, precision + recall),
    })
}

/// Test fold of every row: each class is shuffled by `seed` and dealt round-robin.
pub fn stratified_folds(
    labels: &[Class],
    k: usize,
    seed: u64,
) -> Result<Vec<usize>, ClassifyError> {
    if k < 2 {
        return Err(ClassifyError::TooFewFolds(k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold = vec![0; labels.len()];
    for class in [Class::Positive, Class::Negative] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < k {
            return Err(ClassifyError::ClassTooSmall {
                class,
                count: idx.len(),
                k,
            });
        }
        idx.shuffle(&mut rng);
        for (r, &i) in idx.iter().enumerate() {
            fold[i] = r % k;
        }
    }
    Ok(fold)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub k: usize,
    pub folds: Vec<Prf1>,
    /// Means over folds.
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Stratified `k`-fold evaluation; fold `i` trains with seed `cfg.seed + i`.
pub fn cross_validate(
    fv: &FeatureView,
    k: usize,
    cfg: &TrainConfig,
    fold_seed: u64,
) -> Result<EvalReport, ClassifyError> {
    let fold = stratified_folds(fv.labels(), k, fold_seed)?;
    let folds: Vec<Prf1> = (0..k)
        .into_par_iter()
        .map(|f| {
            let train_rows: Vec<usize> = (0..fv.n_rows()).filter(|&i| fold[i] != f).collect();
            let test_rows: Vec<usize> = (0..fv.n_rows()).filter(|&i| fold[i] == f).collect();
            let fold_cfg = TrainConfig {
                seed: cfg.seed.wrapping_add(f as u64),
                ..*cfg
            };
            let model = train(&fv.select_rows(&train_rows), &fold_cfg)?;
            let test = fv.select_rows(&test_rows);
            prf1(&predict(&model, &test)?, test.labels())
        })
        .collect::<Result<_, _>>()?;
    let mean = |g: fn(&Prf1) -> f64| folds.iter().map(g).sum::<f64>() / k as f64;
    Ok(EvalReport {
        k,
        precision: mean(|p| p.precision),
        recall: mean(|p| p.recall),
        f1: mean(|p| p.f1),
        folds,
    })
}

/// `fold,precision,recall,f1` with 0-based folds.
pub fn folds_csv(report: &EvalReport) -> String {
    let mut out = String::from("fold,precision,recall,f1\n");
    for (i, p) in report.folds.iter().enumerate() {
        let _ = writeln!(out, "{i},{},{},{}", p.precision, p.recall, p.f1);
    }
    out
}

/// `pattern_id,weight` per feature, then a `bias` row.
pub fn model_csv(model: &LinearModel) -> String {
    let mut out = String::from("pattern_id,weight\n");
    for (p, w) in model.columns.iter().zip(&model.weights) {
        let _ = writeln!(out, "{p},{w}");
    }
    let _ = writeln!(out, "bias,{}", model.bias);
    out
}
