//! Ranking comparison: Kendall's tau on strict rankings of the same items and
//! rank-biased overlap (RBO) on possibly disjoint rankings.
//!
//! Rankings are slices of item ids, best first, without repeats.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RankError {
    #[error("rankings cover different item sets")]
    DifferentItems,
    #[error("tau needs at least two items, got {0}")]
    TooShort(usize),
    #[error("ranking lists item {0} twice")]
    Repeated(usize),
    #[error("persistence p = {0} outside (0, 1)")]
    BadPersistence(f64),
    #[error("depth must be at least 1")]
    ZeroDepth,
}

/// Counts inversions of `v` while merge-sorting it.
fn inversions(v: &mut [usize], buf: &mut Vec<usize>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = inversions(&mut v[..mid], buf) + inversions(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[i] <= v[j] {
            buf.push(v[i]);
            i += 1;
        } else {
            buf.push(v[j]);
            inv += (mid - i) as u64;
            j += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..]);
    v.copy_from_slice(buf);
    inv
}

/// Number of discordant pairs between two strict rankings of the same items.
pub fn discordant_pairs(a: &[usize], b: &[usize]) -> Result<u64, RankError> {
    if a.len() != b.len() {
        return Err(RankError::DifferentItems);
    }
    let mut pos_b = HashMap::with_capacity(b.len());
    for (i, &x) in b.iter().enumerate() {
        if pos_b.insert(x, i).is_some() {
            return Err(RankError::Repeated(x));
        }
    }
    let mut seq = Vec::with_capacity(a.len());
    let mut seen = HashSet::with_capacity(a.len());
    for &x in a {
        if !seen.insert(x) {
            return Err(RankError::Repeated(x));
        }
        seq.push(*pos_b.get(&x).ok_or(RankError::DifferentItems)?);
    }
    Ok(inversions(&mut seq, &mut Vec::with_capacity(a.len())))
}

/// `(concordant - discordant) / (s(s-1)/2)`; exactly 1 for identical rankings.
pub fn kendall_tau(a: &[usize], b: &[usize]) -> Result<f64, RankError> {
    let s = a.len();
    if s < 2 {
        return Err(RankError::TooShort(s));
    }
    let d = discordant_pairs(a, b)?;
    let pairs = (s as u64) * (s as u64 - 1) / 2;
    Ok((pairs as f64 - 2.0 * d as f64) / pairs as f64)
}

fn check_p(p: f64) -> Result<(), RankError> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(RankError::BadPersistence(p))
    }
}

/// Overlap `|A(d) ∩ B(d)|` of the depth-`d` prefixes for `d = 1..=depth`.
fn overlaps(a: &[usize], b: &[usize], depth: usize) -> Vec<usize> {
    let mut seen_a = HashSet::new();
    let mut seen_b = HashSet::new();
    let mut overlap = 0;
    let mut out = Vec::with_capacity(depth);
    for d in 0..depth {
        if let Some(&x) = a.get(d) {
            seen_a.insert(x);
            if seen_b.contains(&x) {
                overlap += 1;
            }
        }
        if let Some(&y) = b.get(d) {
            seen_b.insert(y);
            if seen_a.contains(&y) {
                overlap += 1;
            }
        }
        out.push(overlap);
    }
    out
}

/// Un-normalized truncated RBO: `(1-p) Σ_{d=1..depth} p^(d-1) |A(d) ∩ B(d)| / d`.
pub fn rbo_truncated(a: &[usize], b: &[usize], p: f64, depth: usize) -> Result<f64, RankError> {
    check_p(p)?;
    if depth == 0 {
        return Err(RankError::ZeroDepth);
    }
    let mut weight = 1.0;
    let mut sum = 0.0;
    for (d, &o) in overlaps(a, b, depth).iter().enumerate() {
        sum += weight * o as f64 / (d + 1) as f64;
        weight *= p;
    }
    Ok((1.0 - p) * sum)
}

/// Truncated RBO divided by its value for identical lists, so it lies in `[0, 1]`.
pub fn rbo(a: &[usize], b: &[usize], p: f64, depth: usize) -> Result<f64, RankError> {
    let raw = rbo_truncated(a, b, p, depth)?;
    let mut weight = 1.0;
    let mut norm = 0.0;
    for _ in 0..depth {
        norm += weight;
        weight *= p;
    }
    Ok(raw / ((1.0 - p) * norm))
}

/// Whether un-normalized RBO between `base` and `extension` never decreases
/// as the depth grows to the length of `extension`.
pub fn rbo_prefix_monotonicity_check(base: &[usize], extension: &[usize], p: f64) -> bool {
    let mut last = 0.0;
    for depth in 1..=extension.len().max(base.len()) {
        let Ok(v) = rbo_truncated(base, extension, p, depth) else {
            return false;
        };
        if v < last {
            return false;
        }
        last = v;
    }
    true
}
