use gpattern::classify::TrainConfig;
use gpattern::footprints::{Bits, FootprintMatrix};
use gpattern::measures::Ranking;
use gpattern::rankcmp::rbo;
use gpattern::shapley::{
    exact_shapley, gold_standard, sampled_shapley, Characteristic, GoldConfig, Method,
    PerformanceFn,
};
use gpattern::synthetic::{balanced_labels, planted_footprints, PlantedConfig};
use proptest::prelude::*;

/// A game given by its value on every mask.
fn table_game(k: usize, seed: u64) -> Vec<f64> {
    let mut x = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    (0..1usize << k)
        .map(|m| {
            if m == 0 {
                return 0.0;
            }
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x % 1000) as f64 / 1000.0
        })
        .collect()
}

fn mask(c: &[usize]) -> usize {
    c.iter().map(|&i| 1 << i).sum()
}

/// Average marginal contribution over every order.
fn all_orders(k: usize, v: &[f64]) -> Vec<f64> {
    fn rec(k: usize, v: &[f64], order: &mut Vec<usize>, acc: &mut [f64], count: &mut usize) {
        if order.len() == k {
            let mut m = 0;
            for &i in order.iter() {
                acc[i] += v[m | 1 << i] - v[m];
                m |= 1 << i;
            }
            *count += 1;
            return;
        }
        for i in 0..k {
            if !order.contains(&i) {
                order.push(i);
                rec(k, v, order, acc, count);
                order.pop();
            }
        }
    }
    let mut acc = vec![0.0; k];
    let mut count = 0;
    rec(k, v, &mut Vec::new(), &mut acc, &mut count);
    acc.iter().map(|a| a / count as f64).collect()
}

#[test]
fn exact_matches_all_orders() {
    for k in 1..=5 {
        for seed in 0..10 {
            let v = table_game(k, seed);
            let f = |c: &[usize]| v[mask(c)];
            let got = exact_shapley(k, &f, 15).unwrap();
            for (g, o) in got.iter().zip(all_orders(k, &v)) {
                assert!((g - o).abs() < 1e-12, "{g} {o}");
            }
        }
    }
}

#[test]
fn sampled_converges_to_exact() {
    for seed in 0..5 {
        let v = table_game(6, 100 + seed);
        let f = |c: &[usize]| v[mask(c)];
        let exact = exact_shapley(6, &f, 15).unwrap();
        let est = sampled_shapley(6, &f, 2000, seed).unwrap();
        for i in 0..6 {
            assert!(
                (est.values[i] - exact[i]).abs() <= 0.05,
                "{} {}",
                est.values[i],
                exact[i]
            );
            assert!(est.std_errors[i] > 0.0 && est.std_errors[i] < 0.05);
        }
        let total: f64 = est.values.iter().sum();
        assert!((total - v[63]).abs() < 1e-9);
    }
}

proptest! {
    #[test]
    fn axioms_hold(k in 1usize..=8, seed in any::<u64>(), twin in any::<bool>()) {
        let mut v = table_game(k, seed);
        // player 0 is a dummy
        for m in 0..1usize << k {
            if m & 1 == 1 {
                v[m] = v[m & !1];
            }
        }
        if twin && k >= 3 {
            // players 1 and 2 become interchangeable
            for m in 0..1usize << k {
                if m & 0b110 == 0b100 {
                    v[m] = v[m ^ 0b110];
                }
            }
        }
        let f = |c: &[usize]| v[mask(c)];
        let sv = exact_shapley(k, &f, 15).unwrap();
        let total: f64 = sv.iter().sum();
        prop_assert!((total - v[(1 << k) - 1]).abs() < 1e-9);
        prop_assert!(sv[0].abs() < 1e-12);
        if twin && k >= 3 {
            prop_assert!((sv[1] - sv[2]).abs() < 1e-12);
        }
    }
}

fn matrix_from(cols: &[Vec<bool>], n_half: usize) -> FootprintMatrix {
    FootprintMatrix::from_columns(
        balanced_labels(n_half),
        cols.iter().map(|c| Bits::from_bools(c)).collect(),
    )
    .unwrap()
}

#[test]
fn performance_fn_reference_values() {
    let n_half = 10;
    let separator: Vec<bool> = (0..20).map(|i| i < n_half).collect();
    let all = vec![true; 20];
    let m = matrix_from(&[separator, all], n_half);
    let f = PerformanceFn::new(&m, &[0, 1], 5, TrainConfig::default(), 0).unwrap();
    assert_eq!(f.n_players(), 2);
    assert_eq!(f.value(&[]), 0.0);
    assert_eq!(f.value(&[0]), 1.0);
    assert!((f.value(&[1]) - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn gold_standard_ranks_planted_patterns_first() {
    let cfg = PlantedConfig {
        n_planted: 2,
        n_noise: 8,
        ..PlantedConfig::default()
    };
    let p = planted_footprints(&cfg);
    let ids: Vec<usize> = (0..10).collect();
    let gold = gold_standard(&p.matrix, &ids, &GoldConfig::default()).unwrap();
    assert_eq!(gold.method, Method::Exact);
    let mut top = gold.ranking.top(2);
    top.sort();
    assert_eq!(top, p.planted);
    assert!(gold.std_errors.iter().all(|&s| s == 0.0));
}

#[test]
fn sampled_gold_agrees_with_exact() {
    let cfg = PlantedConfig {
        n_planted: 3,
        n_noise: 7,
        seed: 5,
        ..PlantedConfig::default()
    };
    let p = planted_footprints(&cfg);
    let ids: Vec<usize> = (0..10).collect();
    let exact = gold_standard(&p.matrix, &ids, &GoldConfig::default()).unwrap();
    let sampled = gold_standard(
        &p.matrix,
        &ids,
        &GoldConfig {
            exact_limit: 5,
            n_permutations: 300,
            ..GoldConfig::default()
        },
    )
    .unwrap();
    assert!(matches!(
        sampled.method,
        Method::Sampled {
            n_permutations: 300,
            ..
        }
    ));
    let a: Ranking = exact.ranking.clone();
    let r = rbo(&a.ids(), &sampled.ranking.ids(), 0.9, 10).unwrap();
    assert!(r >= 0.9, "{r}");
}
