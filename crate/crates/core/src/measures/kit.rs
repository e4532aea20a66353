use super::ext::{ratio, Rational};
use crate::footprints::ContingencyCounts;

/// Every probability a measure is built from, as exact rationals.
///
/// A conditional probability on an empty event is 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbKit {
    /// Total number of graphs.
    pub n: u64,
    pub p: Rational,
    pub not_p: Rational,
    pub pos: Rational,
    pub neg: Rational,
    pub p_and_pos: Rational,
    pub p_and_neg: Rational,
    pub not_p_and_pos: Rational,
    pub not_p_and_neg: Rational,
    pub pos_given_p: Rational,
    pub neg_given_p: Rational,
    pub pos_given_not_p: Rational,
    pub neg_given_not_p: Rational,
    pub p_given_pos: Rational,
    pub p_given_neg: Rational,
    pub not_p_given_pos: Rational,
    pub not_p_given_neg: Rational,
}

pub fn prob_kit(c: &ContingencyCounts) -> ProbKit {
    let n = c.n();
    let s = c.a + c.b;
    let one = Rational::from_integer(1.into());
    let p = ratio(s, n);
    let pos = ratio(c.n_pos, n);
    ProbKit {
        n,
        not_p: &one - &p,
        neg: &one - &pos,
        p,
        pos,
        p_and_pos: ratio(c.a, n),
        p_and_neg: ratio(c.b, n),
        not_p_and_pos: ratio(c.n_pos - c.a, n),
        not_p_and_neg: ratio(c.n_neg - c.b, n),
        pos_given_p: ratio(c.a, s),
        neg_given_p: ratio(c.b, s),
        pos_given_not_p: ratio(c.n_pos - c.a, n - s),
        neg_given_not_p: ratio(c.n_neg - c.b, n - s),
        p_given_pos: ratio(c.a, c.n_pos),
        p_given_neg: ratio(c.b, c.n_neg),
        not_p_given_pos: ratio(c.n_pos - c.a, c.n_pos),
        not_p_given_neg: ratio(c.n_neg - c.b, c.n_neg),
    }
}
