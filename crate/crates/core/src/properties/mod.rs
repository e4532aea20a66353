//! Exhaustive property checks over balanced contingency tables
//! (`n_pos = n_neg = n`, `a, b ∈ [0, n]`, `a + b ≥ 1`) and rank-equivalence
//! blocks across datasets.

use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::footprints::ContingencyCounts;
use crate::measures::{effective_score, prob_kit, score, MeasureId, Ranking, Score};
use crate::rankcmp::{kendall_tau, RankError};

#[derive(Debug, Error)]
pub enum PropertyError {
    #[error("class size must be at least 2, got {0}")]
    ClassTooSmall(u64),
    #[error("no datasets given")]
    NoDatasets,
    #[error("dataset {dataset} ranks measures {found:?}, expected {expected:?}")]
    MeasureMismatch {
        dataset: usize,
        expected: Vec<MeasureId>,
        found: Vec<MeasureId>,
    },
    #[error("dataset {dataset}: {source}")]
    Rankings { dataset: usize, source: RankError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Property {
    Contrastivity,
    Jumpiness,
    ClassSymmetry,
    PatternSymmetry,
    /// Score increases with positive support at fixed total support.
    PS2,
}

impl Property {
    pub const FLAGGED: [Property; 4] = [
        Property::Contrastivity,
        Property::Jumpiness,
        Property::ClassSymmetry,
        Property::PatternSymmetry,
    ];

    /// Declared flag of `m`; `None` for PS2, which has no declared column.
    pub fn expected(self, m: MeasureId) -> Option<bool> {
        let f = m.flags();
        match self {
            Property::Contrastivity => Some(f.contrastivity),
            Property::Jumpiness => Some(f.jumpiness),
            Property::ClassSymmetry => Some(f.class_symmetry),
            Property::PatternSymmetry => Some(f.pattern_symmetry),
            Property::PS2 => None,
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Which boundary of the domain a counterexample touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Degeneracy {
    /// A table with `a = 0`: every positive-class conditional on `P` is 0.
    ZeroPositiveSupport,
    /// A table with `a = n`: the complement has no positive support.
    SaturatedPositive,
    /// Both scores are the same infinity.
    InfiniteTie,
    Interior,
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Explanation of a verdict that disagrees with the declared flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Attribution {
    pub degeneracy: Degeneracy,
    /// Verdict over tables with `1 ≤ a ≤ n - 1` only.
    pub restricted_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub measure: MeasureId,
    pub property: Property,
    pub holds: bool,
    /// First violating pair in scan order; present iff `holds` is false.
    pub counterexample: Option<(ContingencyCounts, ContingencyCounts)>,
    /// Class size of the domain.
    pub n: u64,
    pub expected: Option<bool>,
    /// Present iff `expected` is known and differs from `holds`.
    pub attribution: Option<Attribution>,
}

impl PropertyReport {
    pub fn matches_expected(&self) -> Option<bool> {
        self.expected.map(|e| e == self.holds)
    }

    /// Matches the flag, or matches it once `a ∈ {0, n}` tables are excluded.
    pub fn explained(&self) -> bool {
        match (self.expected, self.attribution) {
            (None, _) => true,
            (Some(e), None) => e == self.holds,
            (Some(e), Some(at)) => at.restricted_holds == e,
        }
    }

    /// Whether the stored counterexample still violates the property.
    pub fn recheck(&self) -> bool {
        match &self.counterexample {
            None => false,
            Some((x, y)) => violates(self.measure, self.property, x, y),
        }
    }
}

fn violates(
    m: MeasureId,
    property: Property,
    x: &ContingencyCounts,
    y: &ContingencyCounts,
) -> bool {
    match property {
        Property::Contrastivity | Property::Jumpiness | Property::PS2 => {
            effective_score(m, x) <= effective_score(m, y)
        }
        Property::ClassSymmetry | Property::PatternSymmetry => score(m, x) != score(m, y),
    }
}

/// Raw and effective scores of one measure on every balanced table of class size `n`.
struct Grid {
    n: u64,
    raw: Vec<Score>,
    eff: Vec<Score>,
}

impl Grid {
    fn new(m: MeasureId, n: u64) -> Self {
        let mut raw = Vec::with_capacity(((n + 1) * (n + 1)) as usize);
        let mut eff = Vec::with_capacity(raw.capacity());
        for a in 0..=n {
            for b in 0..=n {
                let s = if a + b == 0 {
                    Score::new(0.0)
                } else {
                    score(m, &table(a, b, n))
                };
                raw.push(s);
                eff.push(if m.reversed() {
                    Score::new(-s.value())
                } else {
                    s
                });
            }
        }
        Self { n, raw, eff }
    }

    fn idx(&self, a: u64, b: u64) -> usize {
        (a * (self.n + 1) + b) as usize
    }

    fn raw(&self, a: u64, b: u64) -> Score {
        self.raw[self.idx(a, b)]
    }

    fn eff(&self, a: u64, b: u64) -> Score {
        self.eff[self.idx(a, b)]
    }
}

fn table(a: u64, b: u64, n: u64) -> ContingencyCounts {
    ContingencyCounts {
        a,
        b,
        n_pos: n,
        n_neg: n,
    }
}

/// Pairs `((a, b), (a', b'))` quantified by `property`, in scan order.
fn pairs(property: Property, n: u64) -> Vec<((u64, u64), (u64, u64))> {
    let mut out = Vec::new();
    match property {
        Property::Contrastivity => {
            for a in 0..=n {
                for b in 0..=n {
                    for b2 in b + 1..=n {
                        if a + b >= 1 {
                            out.push(((a, b), (a, b2)));
                        }
                    }
                }
            }
        }
        Property::Jumpiness => {
            for a in 2..=n {
                for a2 in 1..a {
                    out.push(((a, 0), (a2, 0)));
                }
            }
        }
        Property::ClassSymmetry => {
            for a in 0..=n {
                for b in a + 1..=n {
                    out.push(((a, b), (b, a)));
                }
            }
        }
        Property::PatternSymmetry => {
            for a in 0..=n {
                for b in 0..=n {
                    if (1..2 * n).contains(&(a + b)) {
                        out.push(((a, b), (n - a, n - b)));
                    }
                }
            }
        }
        Property::PS2 => {
            for s in 1..=2 * n {
                for a in s.saturating_sub(n)..=s.min(n) {
                    for a2 in s.saturating_sub(n)..a {
                        out.push(((a, s - a), (a2, s - a2)));
                    }
                }
            }
        }
    }
    out
}

fn pair_violates(g: &Grid, property: Property, x: (u64, u64), y: (u64, u64)) -> bool {
    match property {
        Property::Contrastivity | Property::Jumpiness | Property::PS2 => {
            g.eff(x.0, x.1) <= g.eff(y.0, y.1)
        }
        Property::ClassSymmetry | Property::PatternSymmetry => g.raw(x.0, x.1) != g.raw(y.0, y.1),
    }
}

fn interior(n: u64, a: u64) -> bool {
    a >= 1 && a < n
}

fn check(m: MeasureId, property: Property, n: u64, g: &Grid) -> PropertyReport {
    let all = pairs(property, n);
    let first = all.iter().find(|&&(x, y)| pair_violates(g, property, x, y));
    let holds = first.is_none();
    let expected = property.expected(m);
    let attribution = match (expected, first) {
        (Some(e), _) if e == holds => None,
        (None, _) => None,
        (Some(_), found) => {
            let restricted_holds = !all
                .iter()
                .filter(|(x, y)| interior(n, x.0) && interior(n, y.0))
                .any(|&(x, y)| pair_violates(g, property, x, y));
            let degeneracy = match found {
                Some(&(x, y)) => classify(g, n, x, y),
                None => Degeneracy::Interior,
            };
            Some(Attribution {
                degeneracy,
                restricted_holds,
            })
        }
    };
    PropertyReport {
        measure: m,
        property,
        holds,
        counterexample: first.map(|&(x, y)| (table(x.0, x.1, n), table(y.0, y.1, n))),
        n,
        expected,
        attribution,
    }
}

fn classify(g: &Grid, n: u64, x: (u64, u64), y: (u64, u64)) -> Degeneracy {
    let (sx, sy) = (g.eff(x.0, x.1), g.eff(y.0, y.1));
    if x.0 == 0 || y.0 == 0 {
        Degeneracy::ZeroPositiveSupport
    } else if x.0 == n || y.0 == n {
        Degeneracy::SaturatedPositive
    } else if sx == sy && sx.value().is_infinite() {
        Degeneracy::InfiniteTie
    } else {
        Degeneracy::Interior
    }
}

fn checked(m: MeasureId, property: Property, n: u64) -> Result<PropertyReport, PropertyError> {
    if n < 2 {
        return Err(PropertyError::ClassTooSmall(n));
    }
    Ok(check(m, property, n, &Grid::new(m, n)))
}

pub fn check_contrastivity(m: MeasureId, n: u64) -> Result<PropertyReport, PropertyError> {
    checked(m, Property::Contrastivity, n)
}

pub fn check_jumpiness(m: MeasureId, n: u64) -> Result<PropertyReport, PropertyError> {
    checked(m, Property::Jumpiness, n)
}

pub fn check_class_symmetry(m: MeasureId, n: u64) -> Result<PropertyReport, PropertyError> {
    checked(m, Property::ClassSymmetry, n)
}

pub fn check_pattern_symmetry(m: MeasureId, n: u64) -> Result<PropertyReport, PropertyError> {
    checked(m, Property::PatternSymmetry, n)
}

pub fn check_ps2(m: MeasureId, n: u64) -> Result<PropertyReport, PropertyError> {
    checked(m, Property::PS2, n)
}

/// Every property of every measure in `measures`, measure-major.
pub fn full_report(measures: &[MeasureId], n: u64) -> Result<Vec<PropertyReport>, PropertyError> {
    if n < 2 {
        return Err(PropertyError::ClassTooSmall(n));
    }
    let nested: Vec<Vec<PropertyReport>> = measures
        .par_iter()
        .map(|&m| {
            let g = Grid::new(m, n);
            Property::FLAGGED
                .iter()
                .chain(&[Property::PS2])
                .map(|&p| check(m, p, n, &g))
                .collect()
        })
        .collect();
    Ok(nested.into_iter().flatten().collect())
}

/// `(independent, at equilibrium)` for one table with `a + b ≥ 1`:
/// `p(P, G+) = p(P) p(G+)` and `p(G+|P) = p(G-|P)`.
pub fn independence_and_equilibrium(c: &ContingencyCounts) -> (bool, bool) {
    let k = prob_kit(c);
    (k.p_and_pos == &k.p * &k.pos, k.pos_given_p == k.neg_given_p)
}

/// Whether independence and equilibrium coincide on every balanced table.
pub fn check_independence_equilibrium(n: u64) -> bool {
    (0..=n).all(|a| {
        (0..=n).filter(|&b| a + b >= 1).all(|b| {
            let (i, e) = independence_and_equilibrium(&table(a, b, n));
            i == e
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Ps2Row {
    pub measure: MeasureId,
    pub ps2_holds: bool,
    pub class_symmetric: bool,
}

/// PS2 and class-symmetry verdicts for every measure.
pub fn check_ps2_exclusivity(n: u64) -> Result<Vec<Ps2Row>, PropertyError> {
    if n < 2 {
        return Err(PropertyError::ClassTooSmall(n));
    }
    Ok(MeasureId::ALL
        .par_iter()
        .map(|&m| {
            let g = Grid::new(m, n);
            Ps2Row {
                measure: m,
                ps2_holds: check(m, Property::PS2, n, &g).holds,
                class_symmetric: check(m, Property::ClassSymmetry, n, &g).holds,
            }
        })
        .collect())
}

fn fmt_table(c: Option<&ContingencyCounts>) -> String {
    c.map(|c| format!("{}:{}", c.a, c.b)).unwrap_or_default()
}

/// One row per report; tables are written `a:b`.
pub fn report_csv(reports: &[PropertyReport]) -> String {
    let mut out = String::from(
        "measure,property,holds,counterexample_a,counterexample_b,expected_flag,matches_expected,degeneracy,restricted_holds\n",
    );
    for r in reports {
        let opt = |b: Option<bool>| b.map(|b| b.to_string()).unwrap_or_default();
        let cx = r.counterexample.as_ref();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.measure,
            r.property,
            r.holds,
            fmt_table(cx.map(|c| &c.0)),
            fmt_table(cx.map(|c| &c.1)),
            opt(r.expected),
            opt(r.matches_expected()),
            r.attribution
                .map(|a| a.degeneracy.to_string())
                .unwrap_or_default(),
            opt(r.attribution.map(|a| a.restricted_holds)),
        );
    }
    out
}

/// Partition of measures by identical rankings on every dataset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceBlocks {
    pub measures: Vec<MeasureId>,
    /// Blocks ordered by first member; members in `measures` order.
    pub blocks: Vec<Vec<MeasureId>>,
    /// `tau[d][i][j]` between measures `i` and `j` on dataset `d`.
    pub tau: Vec<Vec<Vec<f64>>>,
    /// Elementwise minimum of `tau` over datasets.
    pub min_tau: Vec<Vec<f64>>,
}

impl EquivalenceBlocks {
    pub fn block_of(&self, m: MeasureId) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&m))
    }

    pub fn same_block(&self, x: MeasureId, y: MeasureId) -> bool {
        matches!((self.block_of(x), self.block_of(y)), (Some(i), Some(j)) if i == j)
    }

    /// `measure_a,measure_b,tau` over all ordered pairs.
    pub fn min_tau_csv(&self) -> String {
        let mut out = String::from("measure_a,measure_b,tau\n");
        for (i, a) in self.measures.iter().enumerate() {
            for (j, b) in self.measures.iter().enumerate() {
                let _ = writeln!(out, "{a},{b},{}", self.min_tau[i][j]);
            }
        }
        out
    }

    /// `block,measure` with 0-based block ids.
    pub fn blocks_csv(&self) -> String {
        let mut out = String::from("block,measure\n");
        for (k, block) in self.blocks.iter().enumerate() {
            for m in block {
                let _ = writeln!(out, "{k},{m}");
            }
        }
        out
    }
}

/// Groups measures whose minimum tau over all datasets is exactly 1.
///
/// Every dataset must rank the same measures in the same order, and within one
/// dataset every ranking must cover the same patterns.
pub fn equivalence_blocks(
    datasets: &[Vec<(MeasureId, Ranking)>],
) -> Result<EquivalenceBlocks, PropertyError> {
    let first = datasets.first().ok_or(PropertyError::NoDatasets)?;
    let measures: Vec<MeasureId> = first.iter().map(|r| r.0).collect();
    let k = measures.len();
    let mut tau = Vec::with_capacity(datasets.len());
    for (d, rankings) in datasets.iter().enumerate() {
        let found: Vec<MeasureId> = rankings.iter().map(|r| r.0).collect();
        if found != measures {
            return Err(PropertyError::MeasureMismatch {
                dataset: d,
                expected: measures.clone(),
                found,
            });
        }
        let ids: Vec<Vec<usize>> = rankings.iter().map(|r| r.1.ids()).collect();
        let mut t = vec![vec![1.0; k]; k];
        for i in 0..k {
            for j in i + 1..k {
                let v = kendall_tau(&ids[i], &ids[j])
                    .map_err(|source| PropertyError::Rankings { dataset: d, source })?;
                t[i][j] = v;
                t[j][i] = v;
            }
        }
        tau.push(t);
    }
    let min_tau: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| tau.iter().map(|t| t[i][j]).fold(f64::INFINITY, f64::min))
                .collect()
        })
        .collect();
    let mut block_id: Vec<Option<usize>> = vec![None; k];
    let mut blocks: Vec<Vec<MeasureId>> = Vec::new();
    for i in 0..k {
        if block_id[i].is_some() {
            continue;
        }
        block_id[i] = Some(blocks.len());
        let mut block = vec![measures[i]];
        for j in i + 1..k {
            if block_id[j].is_none() && min_tau[i][j] == 1.0 {
                block_id[j] = Some(blocks.len());
                block.push(measures[j]);
            }
        }
        blocks.push(block);
    }
    Ok(EquivalenceBlocks {
        measures,
        blocks,
        tau,
        min_tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use MeasureId::*;

    #[test]
    fn cover_fails_contrastivity_with_equal_scores() {
        let r = check_contrastivity(Cover, 10).unwrap();
        assert!(!r.holds);
        let (x, y) = r.counterexample.unwrap();
        assert_eq!(x.a, y.a);
        assert_eq!(score(Cover, &x), score(Cover, &y));
        assert!(r.recheck());
    }

    #[test]
    fn gr_contrastivity_breaks_only_without_positive_support() {
        let r = check_contrastivity(GR, 10).unwrap();
        let (x, y) = r.counterexample.unwrap();
        assert_eq!((x.a, y.a), (0, 0));
        let at = r.attribution.unwrap();
        assert_eq!(at.degeneracy, Degeneracy::ZeroPositiveSupport);
        assert!(at.restricted_holds && r.explained());
    }

    #[test]
    fn jumpiness_examples() {
        let conf = check_jumpiness(Conf, 10).unwrap();
        assert!(!conf.holds);
        let (x, y) = conf.counterexample.unwrap();
        assert_eq!(score(Conf, &x).value(), 1.0);
        assert_eq!(score(Conf, &y).value(), 1.0);
        assert!(check_jumpiness(SupDif, 10).unwrap().holds);
    }

    #[test]
    fn symmetry_examples() {
        assert!(check_class_symmetry(Dep, 10).unwrap().holds);
        assert!(!check_class_symmetry(Conf, 10).unwrap().holds);
        assert!(check_pattern_symmetry(AbsSupDif, 10).unwrap().holds);
        assert!(!check_pattern_symmetry(Conf, 10).unwrap().holds);
    }

    #[test]
    fn conf_class_asymmetry_at_three_two() {
        let x = table(3, 2, 3);
        let y = table(2, 3, 3);
        assert_eq!(score(Conf, &x).value(), 0.6);
        assert_eq!(score(Conf, &y).value(), 0.4);
    }

    #[test]
    fn independence_examples() {
        assert_eq!(independence_and_equilibrium(&table(3, 3, 10)), (true, true));
        assert_eq!(
            independence_and_equilibrium(&table(5, 1, 10)),
            (false, false)
        );
        assert!(check_independence_equilibrium(10));
    }

    #[test]
    fn ps2_examples() {
        let rows = check_ps2_exclusivity(10).unwrap();
        let row = |m| *rows.iter().find(|r| r.measure == m).unwrap();
        assert!(!row(AbsSupDif).ps2_holds && row(AbsSupDif).class_symmetric);
        assert!(row(Conf).ps2_holds && !row(Conf).class_symmetric);
        assert!(rows.iter().all(|r| !(r.ps2_holds && r.class_symmetric)));
    }

    #[test]
    fn small_class_is_rejected() {
        assert!(matches!(
            check_jumpiness(Sup, 1),
            Err(PropertyError::ClassTooSmall(1))
        ));
    }

    #[test]
    fn pair_counts() {
        assert_eq!(pairs(Property::Jumpiness, 4).len(), 6);
        assert_eq!(pairs(Property::ClassSymmetry, 3).len(), 6);
        assert_eq!(pairs(Property::PS2, 1).len(), 1);
    }

    #[test]
    fn blocks_from_rankings() {
        let r = |ids: &[usize]| {
            Ranking::from_scores(
                ids.iter()
                    .enumerate()
                    .map(|(i, &p)| (p, Score::new(-(i as f64)))),
            )
        };
        let d1 = vec![
            (Sup, r(&[0, 1, 2])),
            (Cover, r(&[0, 1, 2])),
            (GR, r(&[2, 1, 0])),
        ];
        let d2 = vec![
            (Sup, r(&[1, 0, 2])),
            (Cover, r(&[1, 0, 2])),
            (GR, r(&[1, 0, 2])),
        ];
        let eb = equivalence_blocks(&[d1.clone(), d2]).unwrap();
        assert_eq!(eb.blocks, vec![vec![Sup, Cover], vec![GR]]);
        assert!(eb.same_block(Sup, Cover) && !eb.same_block(Sup, GR));
        assert_eq!(eb.min_tau[0][2], -1.0);
        let bad = vec![
            (Sup, r(&[0, 1, 3])),
            (Cover, r(&[0, 1, 2])),
            (GR, r(&[2, 1, 0])),
        ];
        assert!(matches!(
            equivalence_blocks(&[bad]),
            Err(PropertyError::Rankings { dataset: 0, .. })
        ));
        let other = vec![(Sup, r(&[0, 1, 2]))];
        assert!(matches!(
            equivalence_blocks(&[d1, other]),
            Err(PropertyError::MeasureMismatch { dataset: 1, .. })
        ));
        assert!(equivalence_blocks(&[]).is_err());
    }
}
