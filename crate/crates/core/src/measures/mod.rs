//! The 38 pattern quality measures, evaluated on contingency counts.
//!
//! Scores are computed in exact rational arithmetic and converted to `f64`
//! once, so measures that are monotone transforms of the same quantity tie
//! exactly. Square roots and logarithms (base 2) are taken in `f64` on the
//! exact argument. Division by zero, `log 0` and `0·∞` follow the conventions
//! of [`ext`].

pub mod ext;
mod kit;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::footprints::{contingency, ContingencyCounts, FootprintMatrix};
use ext::{fadd, fdiv, fmul, fsub, Ext};
pub use kit::{prob_kit, ProbKit};

macro_rules! measures {
    ($($id:ident => $name:literal,)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum MeasureId {
            $($id,)*
        }

        impl MeasureId {
            pub const ALL: [MeasureId; 38] = [$(MeasureId::$id,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(MeasureId::$id => $name,)*
                }
            }
        }
    };
}

measures! {
    AbsSupDif => "AbsSupDif",
    Acc => "Acc",
    Brins => "Brins",
    CConf => "CConf",
    CFactor => "CFactor",
    Cole => "Cole",
    ColStr => "ColStr",
    Conf => "Conf",
    Cos => "Cos",
    Cover => "Cover",
    Dep => "Dep",
    Entropy => "Entropy",
    Excex => "Excex",
    Fisher => "Fisher",
    FPR => "FPR",
    Gain => "Gain",
    Gini => "Gini",
    GR => "GR",
    InfGain => "InfGain",
    Jacc => "Jacc",
    Klos => "Klos",
    Lap => "Lap",
    Lever => "Lever",
    Lift => "Lift",
    MDisc => "MDisc",
    MutInf => "MutInf",
    NetConf => "NetConf",
    OddsR => "OddsR",
    Pearson => "Pearson",
    RelRisk => "RelRisk",
    Sebag => "Sebag",
    Spec => "Spec",
    Strength => "Strength",
    Sup => "Sup",
    SupDif => "SupDif",
    WRACC => "WRACC",
    Zhang => "Zhang",
    Chi2 => "Chi2",
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownMeasure(pub String);

impl fmt::Display for UnknownMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown measure `{}`", self.0)
    }
}

impl std::error::Error for UnknownMeasure {}

impl FromStr for MeasureId {
    type Err = UnknownMeasure;

    /// Case-insensitive; `χ2` and `chi2` both name [`MeasureId::Chi2`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        MeasureId::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(t))
            .or((t == "χ2" || t == "χ²").then_some(MeasureId::Chi2))
            .ok_or_else(|| UnknownMeasure(t.to_string()))
    }
}

/// Declared range of a measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let end = |x: f64| {
            if x.is_infinite() {
                if x > 0.0 {
                    "+inf".to_string()
                } else {
                    "-inf".to_string()
                }
            } else {
                x.to_string()
            }
        };
        let open = if self.lo.is_infinite() { ']' } else { '[' };
        let close = if self.hi.is_infinite() { '[' } else { ']' };
        write!(f, "{open}{},{}{close}", end(self.lo), end(self.hi))
    }
}

/// Property flags: Contrastivity, Jumpiness, Class Symmetry, Pattern Symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Flags {
    pub contrastivity: bool,
    pub jumpiness: bool,
    pub class_symmetry: bool,
    pub pattern_symmetry: bool,
}

impl Flags {
    const fn from_bits(b: [u8; 4]) -> Self {
        Self {
            contrastivity: b[0] == 1,
            jumpiness: b[1] == 1,
            class_symmetry: b[2] == 1,
            pattern_symmetry: b[3] == 1,
        }
    }
}

/// Static description of a measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureInfo {
    pub id: MeasureId,
    pub bounds: Bounds,
    /// Lower raw scores are better; the effective score is negated.
    pub reversed: bool,
    pub flags: Flags,
}

const INF: f64 = f64::INFINITY;

impl MeasureId {
    pub fn reversed(self) -> bool {
        matches!(self, MeasureId::FPR | MeasureId::Gini | MeasureId::Entropy)
    }

    pub fn bounds(self) -> Bounds {
        use MeasureId::*;
        let (lo, hi) = match self {
            AbsSupDif | Acc | Conf | Cos | Cover | Entropy | FPR | Jacc | Klos | Lap | MutInf
            | Spec | Strength | Sup => (0.0, 1.0),
            CFactor | Cole | Gain | NetConf | Pearson | SupDif | WRACC | Zhang => (-1.0, 1.0),
            Dep | Gini => (0.0, 0.5),
            Brins | Fisher | GR | OddsR | RelRisk | Sebag | Chi2 => (0.0, INF),
            CConf => (-0.5, 0.5),
            ColStr => (-10.0, INF),
            Excex => (-INF, 1.0),
            InfGain => (-INF, 0.0),
            Lever => (-0.25, 0.25),
            Lift => (0.0, 2.0),
            MDisc => (-INF, INF),
        };
        Bounds { lo, hi }
    }

    /// Declared property flags.
    pub fn flags(self) -> Flags {
        use MeasureId::*;
        Flags::from_bits(match self {
            AbsSupDif | MutInf | Chi2 => [0, 1, 1, 1],
            Acc | Cos | FPR | Gain | Jacc | Klos | Lap | Lever | NetConf | Pearson | RelRisk
            | Spec | Strength | SupDif | WRACC => [1, 1, 0, 0],
            Brins | CConf | CFactor | Cole | Conf | Excex | GR | InfGain | Lift | MDisc | OddsR
            | Sebag | Zhang => [1, 0, 0, 0],
            ColStr | Cover | Sup => [0, 1, 0, 0],
            Dep | Entropy | Fisher | Gini => [0, 0, 1, 0],
        })
    }

    pub fn info(self) -> MeasureInfo {
        MeasureInfo {
            id: self,
            bounds: self.bounds(),
            reversed: self.reversed(),
            flags: self.flags(),
        }
    }
}

pub fn measure_table() -> Vec<MeasureInfo> {
    MeasureId::ALL.iter().map(|m| m.info()).collect()
}

/// A totally ordered extended real; never NaN, `-0.0` is stored as `0.0`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Score(f64);

impl Score {
    pub fn new(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN score");
        Score(if x == 0.0 { 0.0 } else { x })
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl PartialEq for Score {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Score {}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn q(r: &ext::Rational) -> Ext {
    Ext::from(r)
}

/// The measure's formula, unreversed.
fn raw(m: MeasureId, k: &ProbKit) -> f64 {
    use MeasureId::*;
    let one = Ext::one;
    let c = || q(&k.pos_given_p);
    let cm = || q(&k.neg_given_p);
    let pp = || q(&k.p);
    let pnp = || q(&k.not_p);
    let ppos = || q(&k.pos);
    let pneg = || q(&k.neg);
    let pa = || q(&k.p_and_pos);
    let pb = || q(&k.p_and_neg);
    let pna = || q(&k.not_p_and_pos);
    let pnb = || q(&k.not_p_and_neg);
    let n = || Ext::int(k.n as i64);
    let gr = || q(&k.p_given_pos) / q(&k.p_given_neg);
    let exact = match m {
        AbsSupDif => (q(&k.p_given_pos) - q(&k.p_given_neg)).abs(),
        Acc => pa() + pnb(),
        Brins => (pp() * pneg()) / pb(),
        CConf => c() - ppos(),
        CFactor => ((pa() / pp()) - ppos()) / (one() - ppos()),
        Cole => (c() - ppos()) / (one() - ppos()),
        ColStr => {
            let left = (pa() + pnb()) / (pp() * ppos() + pnp() * pneg());
            let right =
                (one() - pp() * ppos() - pnp() * pneg()) / (one() - pa() - q(&k.neg_given_not_p));
            left * right
        }
        Conf => c(),
        Cover => q(&k.p_given_pos),
        Dep => (pneg() - cm()).abs(),
        Excex => one() - cm() / q(&k.pos_given_not_p),
        Fisher => (c() - cm()).square() / (c() * (one() - c()) + cm() * (one() - cm())),
        FPR => q(&k.pos_given_not_p),
        Gini => one() - c().square() - cm().square(),
        GR => gr(),
        Jacc => pa() / (pp() + ppos() - pa()),
        Lap => {
            let inv = one() / n();
            (pa() + inv.clone()) / (pp() + Ext::int(2) * inv)
        }
        Lever => pa() - pp() * ppos(),
        Lift => pa() / (pp() * ppos()),
        NetConf => (c() - ppos()) / (one() - pp()),
        OddsR => (pa() / (one() - pa())) / (pb() / (one() - pb())),
        RelRisk => c() / q(&k.pos_given_not_p),
        Sebag => pa() / pb(),
        Spec => q(&k.neg_given_not_p),
        Strength => {
            let g = gr();
            let frac = if g.is_infinite() {
                one()
            } else {
                g.clone() / (g + one())
            };
            frac * pa()
        }
        Sup => pa(),
        SupDif => q(&k.p_given_pos) - q(&k.p_given_neg),
        WRACC => pp() * (c() - ppos()),
        Zhang => (pa() - pp() * ppos()) / (pa() * pneg()).max(ppos() * pb()),
        Chi2 => {
            let num = (pa() * pnb() - pb() * pna()).square();
            n() * (num / (pp() * ppos() * pnp() * pneg()))
        }
        Cos | Entropy | Gain | InfGain | Klos | MDisc | MutInf | Pearson => {
            return transcendental(m, k);
        }
    };
    exact.to_f64()
}

/// Measures with a square root or logarithm.
fn transcendental(m: MeasureId, k: &ProbKit) -> f64 {
    use MeasureId::*;
    let c = q(&k.pos_given_p);
    let cm = q(&k.neg_given_p);
    let plogp = |x: &Ext| fmul(x.to_f64(), x.log2());
    match m {
        Cos => (c * q(&k.p_given_pos)).sqrt(),
        Entropy => fsub(-plogp(&c), plogp(&cm)),
        Gain => fmul(q(&k.p_and_pos).to_f64(), fsub(c.log2(), q(&k.pos).log2())),
        InfGain => fadd(-q(&k.pos).log2(), c.log2()),
        Klos => fmul(q(&k.p_and_pos).sqrt(), (c - q(&k.pos)).to_f64()),
        MDisc => {
            let r =
                (q(&k.p_and_pos) * q(&k.not_p_and_neg)) / (q(&k.p_and_neg) * q(&k.not_p_and_pos));
            r.log2()
        }
        MutInf => {
            let cells = [
                (&k.p_and_pos, &k.p, &k.pos),
                (&k.p_and_neg, &k.p, &k.neg),
                (&k.not_p_and_pos, &k.not_p, &k.pos),
                (&k.not_p_and_neg, &k.not_p, &k.neg),
            ];
            let mut terms: Vec<f64> = cells
                .iter()
                .map(|&(joint, pi, pj)| {
                    let r = q(joint) / (q(pi) * q(pj));
                    fmul(q(joint).to_f64(), r.log2())
                })
                .collect();
            // summation order independent of which cell is which
            terms.sort_by(f64::total_cmp);
            terms.into_iter().fold(0.0, fadd)
        }
        Pearson => {
            let num = (q(&k.p_and_pos) - q(&k.p) * q(&k.pos)).to_f64();
            let den = (Ext::int(k.n as i64) * q(&k.p) * q(&k.pos) * q(&k.not_p) * q(&k.neg)).sqrt();
            fdiv(num, den)
        }
        _ => unreachable!("{m} has an exact formula"),
    }
}

/// The measure's value as defined by its formula.
pub fn score(m: MeasureId, counts: &ContingencyCounts) -> Score {
    Score::new(raw(m, &prob_kit(counts)))
}

/// Score oriented so that higher is always better.
pub fn effective_score(m: MeasureId, counts: &ContingencyCounts) -> Score {
    let s = score(m, counts);
    if m.reversed() {
        Score::new(-s.value())
    } else {
        s
    }
}

/// Pattern ids ordered best first, ties by ascending id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranking {
    pub entries: Vec<(usize, Score)>,
}

impl Ranking {
    pub fn from_scores(scores: impl IntoIterator<Item = (usize, Score)>) -> Self {
        let mut entries: Vec<(usize, Score)> = scores.into_iter().collect();
        entries.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
        Self { entries }
    }

    pub fn ids(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The first `s` ids.
    pub fn top(&self, s: usize) -> Vec<usize> {
        self.entries.iter().take(s).map(|e| e.0).collect()
    }
}

pub fn rank(m: MeasureId, matrix: &FootprintMatrix, pattern_ids: &[usize]) -> Ranking {
    Ranking::from_scores(
        pattern_ids
            .iter()
            .map(|&p| (p, effective_score(m, &contingency(matrix, p)))),
    )
}

/// Rankings of `pattern_ids` under every measure in `measures`, in that order.
pub fn rank_all(
    measures: &[MeasureId],
    matrix: &FootprintMatrix,
    pattern_ids: &[usize],
) -> Vec<Ranking> {
    let counts: Vec<ContingencyCounts> = pattern_ids
        .iter()
        .map(|&p| contingency(matrix, p))
        .collect();
    measures
        .par_iter()
        .map(|&m| {
            Ranking::from_scores(
                pattern_ids
                    .iter()
                    .zip(&counts)
                    .map(|(&p, c)| (p, effective_score(m, c))),
            )
        })
        .collect()
}

/// `pattern_id,measure,raw_score,effective_score,rank` with 1-based ranks.
pub fn scores_csv(
    measures: &[MeasureId],
    matrix: &FootprintMatrix,
    pattern_ids: &[usize],
) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("pattern_id,measure,raw_score,effective_score,rank\n");
    for (m, ranking) in measures.iter().zip(rank_all(measures, matrix, pattern_ids)) {
        let mut position = vec![0; ranking.len()];
        let index: std::collections::HashMap<usize, usize> = pattern_ids
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i))
            .collect();
        for (r, &(p, _)) in ranking.entries.iter().enumerate() {
            position[index[&p]] = r + 1;
        }
        for (i, &p) in pattern_ids.iter().enumerate() {
            let c = contingency(matrix, p);
            let _ = writeln!(
                out,
                "{p},{m},{},{},{}",
                score(*m, &c),
                effective_score(*m, &c),
                position[i]
            );
        }
    }
    out
}

/// `measure,bounds,reversed,co,ju,cs,ps` for every measure.
pub fn measure_table_csv() -> String {
    use std::fmt::Write as _;
    let mut out = String::from("measure,bounds,reversed,co,ju,cs,ps\n");
    for info in measure_table() {
        let f = info.flags;
        let _ = writeln!(
            out,
            "{},\"{}\",{},{},{},{},{}",
            info.id,
            info.bounds,
            info.reversed,
            f.contrastivity,
            f.jumpiness,
            f.class_symmetry,
            f.pattern_symmetry
        );
    }
    out
}
