use gpattern::rankcmp::{kendall_tau, rbo, rbo_prefix_monotonicity_check, rbo_truncated};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sum of sgn products over all pairs.
fn tau_oracle(a: &[usize], b: &[usize]) -> f64 {
    let rank = |r: &[usize], x: usize| r.iter().position(|&y| y == x).unwrap() as i64;
    let s = a.len();
    let mut sum = 0i64;
    for i in 0..s {
        for j in i + 1..s {
            let (x, y) = (a[i], a[j]);
            sum += (rank(a, x) - rank(a, y)).signum() * (rank(b, x) - rank(b, y)).signum();
        }
    }
    2.0 * sum as f64 / (s * (s - 1)) as f64
}

/// Term-by-term truncated RBO with set intersections recomputed at every depth.
fn rbo_oracle(a: &[usize], b: &[usize], p: f64, depth: usize) -> (f64, f64) {
    let mut raw = 0.0;
    let mut norm = 0.0;
    for d in 1..=depth {
        let pa = &a[..d.min(a.len())];
        let pb = &b[..d.min(b.len())];
        let overlap = pa.iter().filter(|x| pb.contains(x)).count();
        raw += p.powi(d as i32 - 1) * overlap as f64 / d as f64;
        norm += p.powi(d as i32 - 1);
    }
    ((1.0 - p) * raw, raw / norm)
}

#[test]
fn tau_matches_pair_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let s = rng.gen_range(2..=200);
        let a: Vec<usize> = (0..s).collect();
        let mut b = a.clone();
        b.shuffle(&mut rng);
        let mut a = a;
        a.shuffle(&mut rng);
        let t = kendall_tau(&a, &b).unwrap();
        assert!((t - tau_oracle(&a, &b)).abs() < 1e-12);
        assert_eq!(t, kendall_tau(&b, &a).unwrap());
    }
}

#[test]
fn rbo_matches_term_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for p in [0.5, 0.9, 0.98] {
        for _ in 0..300 {
            let universe: Vec<usize> = (0..60).collect();
            let (la, lb) = (rng.gen_range(1..40), rng.gen_range(1..40));
            let a: Vec<usize> = universe.choose_multiple(&mut rng, la).copied().collect();
            let b: Vec<usize> = universe.choose_multiple(&mut rng, lb).copied().collect();
            let depth = rng.gen_range(1..50);
            let (raw, norm) = rbo_oracle(&a, &b, p, depth);
            assert!((rbo_truncated(&a, &b, p, depth).unwrap() - raw).abs() < 1e-12);
            let v = rbo(&a, &b, p, depth).unwrap();
            assert!((v - norm).abs() < 1e-12);
            assert!((0.0..=1.0 + 1e-12).contains(&v));
            assert_eq!(v, rbo(&b, &a, p, depth).unwrap());
        }
    }
}

#[test]
fn prefix_pairs_are_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in [0.5, 0.9, 0.98] {
        for _ in 0..1000 {
            let mut ext: Vec<usize> = (0..80).collect();
            ext.shuffle(&mut rng);
            ext.truncate(rng.gen_range(1..80));
            let base = ext[..rng.gen_range(1..=ext.len())].to_vec();
            assert!(rbo_prefix_monotonicity_check(&base, &ext, p));
        }
    }
}

#[test]
fn worked_rbo_value() {
    // A=0, B=1, C=2
    let v = rbo(&[0, 1], &[0, 2], 0.5, 2).unwrap();
    assert!((v - 5.0 / 6.0).abs() < 1e-15);
}

proptest! {
    #[test]
    fn tau_bounds_and_identity(perm in Just((0..30usize).collect::<Vec<_>>()).prop_shuffle()) {
        let id: Vec<usize> = (0..30).collect();
        let t = kendall_tau(&id, &perm).unwrap();
        prop_assert!((-1.0..=1.0).contains(&t));
        prop_assert_eq!(kendall_tau(&perm, &perm).unwrap(), 1.0);
        let rev: Vec<usize> = perm.iter().rev().copied().collect();
        prop_assert_eq!(kendall_tau(&perm, &rev).unwrap(), -1.0);
    }
}
