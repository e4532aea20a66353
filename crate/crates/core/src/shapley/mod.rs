//! Shapley values of patterns for classification performance: exact over all
//! coalitions for few players, permutation-sampled otherwise.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::classify::{cross_validate, stratified_folds, ClassifyError, FeatureView, TrainConfig};
use crate::footprints::FootprintMatrix;
use crate::measures::{Ranking, Score};

#[derive(Debug, Error, PartialEq)]
pub enum ShapleyError {
    #[error("{players} players exceed the exact limit {limit}; use sampled mode")]
    TooManyPlayers { players: usize, limit: usize },
    #[error("need at least one permutation")]
    NoPermutations,
    #[error("no players")]
    NoPlayers,
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

/// Coalitions are ascending player indices in `0..k`.
pub trait Characteristic: Sync {
    fn value(&self, coalition: &[usize]) -> f64;
}

impl<F: Fn(&[usize]) -> f64 + Sync> Characteristic for F {
    fn value(&self, coalition: &[usize]) -> f64 {
        self(coalition)
    }
}

fn members(mask: u64, k: usize) -> Vec<usize> {
    (0..k).filter(|&i| mask >> i & 1 == 1).collect()
}

/// `SV_i = Σ_{S ∌ i} |S|! (k-|S|-1)! / k! · (f(S ∪ {i}) - f(S))`.
pub fn exact_shapley<F: Characteristic + ?Sized>(
    k: usize,
    f: &F,
    exact_limit: usize,
) -> Result<Vec<f64>, ShapleyError> {
    if k == 0 {
        return Err(ShapleyError::NoPlayers);
    }
    if k > exact_limit || k > 30 {
        return Err(ShapleyError::TooManyPlayers {
            players: k,
            limit: exact_limit.min(30),
        });
    }
    let values: Vec<f64> = (0..1u64 << k)
        .into_par_iter()
        .map(|mask| f.value(&members(mask, k)))
        .collect();
    // weight(s) = 1 / (k · C(k-1, s))
    let mut weight = vec![0.0; k];
    let mut binom = 1.0;
    for (s, w) in weight.iter_mut().enumerate() {
        *w = 1.0 / (k as f64 * binom);
        binom = binom * (k - 1 - s) as f64 / (s + 1) as f64;
    }
    Ok((0..k)
        .map(|i| {
            let bit = 1u64 << i;
            (0..1u64 << k)
                .filter(|m| m & bit == 0)
                .map(|m| {
                    weight[m.count_ones() as usize]
                        * (values[(m | bit) as usize] - values[m as usize])
                })
                .sum()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub values: Vec<f64>,
    /// Sample standard deviation of the marginals over `sqrt(n_permutations)`.
    pub std_errors: Vec<f64>,
}

/// Memoizes a characteristic function by coalition.
struct Memo<'a, F: ?Sized> {
    f: &'a F,
    cache: Mutex<HashMap<Vec<usize>, f64>>,
}

impl<F: Characteristic + ?Sized> Memo<'_, F> {
    fn get(&self, coalition: &[usize]) -> f64 {
        if let Some(&v) = self.cache.lock().expect("cache lock").get(coalition) {
            return v;
        }
        let v = self.f.value(coalition);
        self.cache
            .lock()
            .expect("cache lock")
            .insert(coalition.to_vec(), v);
        v
    }
}

/// Mean marginal contribution over `n_permutations` uniform orders drawn from `seed`.
pub fn sampled_shapley<F: Characteristic + ?Sized>(
    k: usize,
    f: &F,
    n_permutations: usize,
    seed: u64,
) -> Result<Estimate, ShapleyError> {
    if k == 0 {
        return Err(ShapleyError::NoPlayers);
    }
    if n_permutations == 0 {
        return Err(ShapleyError::NoPermutations);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perms: Vec<Vec<usize>> = (0..n_permutations)
        .map(|_| {
            let mut p: Vec<usize> = (0..k).collect();
            p.shuffle(&mut rng);
            p
        })
        .collect();
    let memo = Memo {
        f,
        cache: Mutex::new(HashMap::new()),
    };
    let marginals: Vec<Vec<f64>> = perms
        .par_iter()
        .map(|perm| {
            let mut out = vec![0.0; k];
            let mut coalition: Vec<usize> = Vec::with_capacity(k);
            let mut prev = memo.get(&coalition);
            for &i in perm {
                let pos = coalition.partition_point(|&x| x < i);
                coalition.insert(pos, i);
                let cur = memo.get(&coalition);
                out[i] = cur - prev;
                prev = cur;
            }
            out
        })
        .collect();
    let n = n_permutations as f64;
    let values: Vec<f64> = (0..k)
        .map(|i| marginals.iter().map(|m| m[i]).sum::<f64>() / n)
        .collect();
    let std_errors = (0..k)
        .map(|i| {
            if n_permutations < 2 {
                return 0.0;
            }
            let var = marginals
                .iter()
                .map(|m| (m[i] - values[i]).powi(2))
                .sum::<f64>()
                / (n - 1.0);
            (var / n).sqrt()
        })
        .collect();
    Ok(Estimate { values, std_errors })
}

/// `f(S)`: mean F1 of stratified cross-validation on the columns `S`, 0 for `S = ∅`.
pub struct PerformanceFn<'a> {
    matrix: &'a FootprintMatrix,
    pattern_ids: Vec<usize>,
    k_folds: usize,
    train: TrainConfig,
    fold_seed: u64,
}

impl<'a> PerformanceFn<'a> {
    /// Fails when a class has fewer rows than folds.
    pub fn new(
        matrix: &'a FootprintMatrix,
        pattern_ids: &[usize],
        k_folds: usize,
        train: TrainConfig,
        fold_seed: u64,
    ) -> Result<Self, ShapleyError> {
        stratified_folds(matrix.labels(), k_folds, fold_seed)?;
        Ok(Self {
            matrix,
            pattern_ids: pattern_ids.to_vec(),
            k_folds,
            train,
            fold_seed,
        })
    }

    pub fn n_players(&self) -> usize {
        self.pattern_ids.len()
    }
}

impl Characteristic for PerformanceFn<'_> {
    fn value(&self, coalition: &[usize]) -> f64 {
        if coalition.is_empty() {
            return 0.0;
        }
        let cols: Vec<usize> = coalition.iter().map(|&i| self.pattern_ids[i]).collect();
        let fv = FeatureView::new(self.matrix, &cols);
        cross_validate(&fv, self.k_folds, &self.train, self.fold_seed)
            .expect("stratification checked at construction")
            .f1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Exact,
    Sampled { n_permutations: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoldConfig {
    pub exact_limit: usize,
    pub n_permutations: usize,
    pub permutation_seed: u64,
    pub k_folds: usize,
    pub fold_seed: u64,
    pub train: TrainConfig,
}

impl Default for GoldConfig {
    fn default() -> Self {
        Self {
            exact_limit: 15,
            n_permutations: 200,
            permutation_seed: 0,
            k_folds: 5,
            fold_seed: 0,
            train: TrainConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldStandard {
    pub pattern_ids: Vec<usize>,
    pub values: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Descending value, ties by ascending id.
    pub ranking: Ranking,
    pub method: Method,
}

/// Exact when at most `exact_limit` patterns, sampled otherwise.
pub fn gold_standard(
    matrix: &FootprintMatrix,
    pattern_ids: &[usize],
    cfg: &GoldConfig,
) -> Result<GoldStandard, ShapleyError> {
    let f = PerformanceFn::new(matrix, pattern_ids, cfg.k_folds, cfg.train, cfg.fold_seed)?;
    let k = pattern_ids.len();
    let (values, std_errors, method) = if k <= cfg.exact_limit {
        (
            exact_shapley(k, &f, cfg.exact_limit)?,
            vec![0.0; k],
            Method::Exact,
        )
    } else {
        let e = sampled_shapley(k, &f, cfg.n_permutations, cfg.permutation_seed)?;
        (
            e.values,
            e.std_errors,
            Method::Sampled {
                n_permutations: cfg.n_permutations,
                seed: cfg.permutation_seed,
            },
        )
    };
    let ranking = Ranking::from_scores(
        pattern_ids
            .iter()
            .zip(&values)
            .map(|(&p, &v)| (p, Score::new(v))),
    );
    Ok(GoldStandard {
        pattern_ids: pattern_ids.to_vec(),
        values,
        std_errors,
        ranking,
        method,
    })
}

/// `pattern_id,shapley_value,std_error,rank` in pattern order, 1-based ranks.
pub fn shapley_csv(gold: &GoldStandard) -> String {
    let rank: HashMap<usize, usize> = gold
        .ranking
        .ids()
        .into_iter()
        .enumerate()
        .map(|(r, p)| (p, r + 1))
        .collect();
    let mut out = String::from("pattern_id,shapley_value,std_error,rank\n");
    for (i, &p) in gold.pattern_ids.iter().enumerate() {
        let _ = writeln!(
            out,
            "{p},{},{},{}",
            gold.values[i], gold.std_errors[i], rank[&p]
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric(c: &[usize]) -> f64 {
        0.5 * c.len() as f64
    }

    #[test]
    fn two_symmetric_players() {
        assert_eq!(exact_shapley(2, &symmetric, 15).unwrap(), vec![0.5, 0.5]);
        let e = sampled_shapley(2, &symmetric, 7, 3).unwrap();
        assert_eq!(e.values[0], e.values[1]);
    }

    #[test]
    fn dummy_gets_zero() {
        let f = |c: &[usize]| if c.contains(&0) { 0.7 } else { 0.0 };
        assert_eq!(exact_shapley(3, &f, 15).unwrap(), vec![0.7, 0.0, 0.0]);
    }

    #[test]
    fn limits() {
        assert_eq!(
            exact_shapley(16, &symmetric, 15),
            Err(ShapleyError::TooManyPlayers {
                players: 16,
                limit: 15
            })
        );
        assert_eq!(
            sampled_shapley(2, &symmetric, 0, 0),
            Err(ShapleyError::NoPermutations)
        );
        assert_eq!(
            exact_shapley(0, &symmetric, 15),
            Err(ShapleyError::NoPlayers)
        );
    }

    #[test]
    fn sampling_is_deterministic() {
        let f = |c: &[usize]| c.iter().map(|&i| (i * i) as f64).sum::<f64>().sqrt();
        assert_eq!(
            sampled_shapley(5, &f, 50, 9).unwrap(),
            sampled_shapley(5, &f, 50, 9).unwrap()
        );
    }
}
