use gpattern::classify::{
    cross_validate, predict, prf1, train, FeatureView, LinearModel, TrainConfig,
};
use gpattern::graphdata::Class;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use Class::{Negative as N, Positive as P};

fn random_view(seed: u64, n: usize, d: usize, density: f64) -> FeatureView {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<Class> = (0..n).map(|i| if i % 2 == 0 { P } else { N }).collect();
    let rows: Vec<Vec<bool>> = (0..n)
        .map(|_| (0..d).map(|_| rng.gen_bool(density)).collect())
        .collect();
    FeatureView::from_dense(&rows, labels)
}

/// Best geometric margin over a weight grid; `None` if no grid point separates.
fn grid_max_margin(points: &[([f64; 2], f64)]) -> Option<(f64, f64, f64)> {
    let grid: Vec<f64> = (-20..=20).map(|i| i as f64 / 4.0).collect();
    let mut best: Option<(f64, (f64, f64, f64))> = None;
    for &w1 in &grid {
        for &w2 in &grid {
            let norm = (w1 * w1 + w2 * w2).sqrt();
            if norm == 0.0 {
                continue;
            }
            for &b in &grid {
                let margin = points
                    .iter()
                    .map(|(x, y)| y * (w1 * x[0] + w2 * x[1] + b) / norm)
                    .fold(f64::INFINITY, f64::min);
                if margin > 0.0 && best.is_none_or(|(m, _)| margin > m) {
                    best = Some((margin, (w1, w2, b)));
                }
            }
        }
    }
    best.map(|b| b.1)
}

#[test]
fn separable_toys_agree_with_grid_search() {
    let corners = [[false, false], [false, true], [true, false], [true, true]];
    // every labelling of the square except xor and the single-class ones
    for mask in 1u8..15 {
        if mask == 0b0110 || mask == 0b1001 {
            continue;
        }
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..6 {
            for (i, c) in corners.iter().enumerate() {
                rows.push(c.to_vec());
                labels.push(if mask >> i & 1 == 1 { P } else { N });
            }
        }
        let fv = FeatureView::from_dense(&rows, labels.clone());
        let cfg = TrainConfig {
            c: 100.0,
            ..TrainConfig::default()
        };
        let model = train(&fv, &cfg).unwrap();
        let points: Vec<([f64; 2], f64)> = (0..4)
            .map(|i| {
                let c = corners[i];
                (
                    [f64::from(u8::from(c[0])), f64::from(u8::from(c[1]))],
                    if mask >> i & 1 == 1 { 1.0 } else { -1.0 },
                )
            })
            .collect();
        let (w1, w2, b) = grid_max_margin(&points).expect("separable");
        let oracle: Vec<Class> = rows
            .iter()
            .map(|r| {
                let v = w1 * f64::from(u8::from(r[0])) + w2 * f64::from(u8::from(r[1])) + b;
                if v >= 0.0 {
                    P
                } else {
                    N
                }
            })
            .collect();
        assert_eq!(predict(&model, &fv).unwrap(), oracle, "mask {mask:04b}");
        assert_eq!(oracle, labels);
    }
}

#[test]
fn predictions_match_dot_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for seed in 0..20 {
        let fv = random_view(seed, 30, 7, 0.4);
        let model = LinearModel {
            columns: (0..7).collect(),
            weights: (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            bias: rng.gen_range(-1.0..1.0),
            c: 1.0,
            seed: 0,
            objective_trace: vec![],
        };
        let pred = predict(&model, &fv).unwrap();
        for (i, p) in pred.iter().enumerate() {
            let mut v = model.bias;
            for j in 0..7 {
                if fv.active(i).contains(&(j as u32)) {
                    v += model.weights[j];
                }
            }
            assert_eq!(*p, if v >= 0.0 { P } else { N });
        }
    }
}

#[test]
fn random_labels_give_middling_f1() {
    let scores: Vec<f64> = (0..100)
        .map(|seed| {
            let fv = random_view(1000 + seed, 100, 10, 0.3);
            let cfg = TrainConfig {
                seed,
                ..TrainConfig::default()
            };
            cross_validate(&fv, 5, &cfg, seed).unwrap().f1
        })
        .collect();
    for f in &scores {
        assert!((0.3..=0.8).contains(f), "{f}");
    }
}

#[test]
fn separable_data_scores_one() {
    let labels: Vec<Class> = (0..40).map(|i| if i < 20 { P } else { N }).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rows: Vec<Vec<bool>> = labels
        .iter()
        .map(|c| vec![rng.gen_bool(0.5), c.is_positive(), rng.gen_bool(0.5)])
        .collect();
    let fv = FeatureView::from_dense(&rows, labels);
    let rep = cross_validate(&fv, 5, &TrainConfig::default(), 1).unwrap();
    assert_eq!(rep.f1, 1.0);
    assert_eq!(
        rep,
        cross_validate(&fv, 5, &TrainConfig::default(), 1).unwrap()
    );
}

#[test]
fn all_zero_features_predict_a_constant() {
    let fv = random_view(0, 20, 3, 0.0);
    let model = train(&fv, &TrainConfig::default()).unwrap();
    let pred = predict(&model, &fv).unwrap();
    assert!(pred.iter().all(|&c| c == pred[0]));
    let f1 = prf1(&pred, fv.labels()).unwrap().f1;
    assert!((f1 - 2.0 / 3.0).abs() < 1e-12 || f1 == 0.0);
}

proptest! {
    #[test]
    fn prf1_matches_confusion_counts(pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..60)) {
        let pred: Vec<Class> = pairs.iter().map(|p| if p.0 { P } else { N }).collect();
        let truth: Vec<Class> = pairs.iter().map(|p| if p.1 { P } else { N }).collect();
        let tp = pairs.iter().filter(|p| p.0 && p.1).count() as f64;
        let fp = pairs.iter().filter(|p| p.0 && !p.1).count() as f64;
        let fn_ = pairs.iter().filter(|p| !p.0 && p.1).count() as f64;
        let r = prf1(&pred, &truth).unwrap();
        let precision = if tp + fp == 0.0 { 0.0 } else { tp / (tp + fp) };
        let recall = if tp + fn_ == 0.0 { 0.0 } else { tp / (tp + fn_) };
        let f1 = if tp == 0.0 { 0.0 } else { 2.0 * tp / (2.0 * tp + fp + fn_) };
        prop_assert_eq!(r.precision, precision);
        prop_assert_eq!(r.recall, recall);
        prop_assert!((r.f1 - f1).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&r.f1));
    }

    #[test]
    fn objective_trace_never_increases(seed in 0u64..500) {
        let fv = random_view(seed, 30, 5, 0.5);
        let model = train(&fv, &TrainConfig { seed, epochs: 40, ..TrainConfig::default() }).unwrap();
        prop_assert_eq!(model.objective_trace.len(), 40);
        for w in model.objective_trace.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        prop_assert!(model.weights.iter().all(|w| w.is_finite()) && model.bias.is_finite());
        let again = train(&fv, &TrainConfig { seed, epochs: 40, ..TrainConfig::default() }).unwrap();
        prop_assert_eq!(model, again);
    }
}
