//! Extended reals: exact rationals plus `±∞`, and an `f64` counterpart with
//! the same conventions for steps after a square root or logarithm.
//!
//! Conventions: `x/0 = ±∞` by the sign of `x`, `0/0 = 0`, `x/±∞ = 0`,
//! `±∞/±∞ = 0`, `0·(±∞) = 0`, `∞ - ∞ = 0`, `log 0 = -∞`.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn ratio(num: u64, den: u64) -> Rational {
    if den == 0 {
        return Rational::zero();
    }
    Rational::new(num.into(), den.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ext {
    NegInf,
    Fin(Rational),
    PosInf,
}

use Ext::{Fin, NegInf, PosInf};

impl Ext {
    pub fn int(x: i64) -> Self {
        Fin(Rational::from_integer(x.into()))
    }

    pub fn zero() -> Self {
        Fin(Rational::zero())
    }

    pub fn one() -> Self {
        Fin(Rational::one())
    }

    fn signum(&self) -> i8 {
        match self {
            NegInf => -1,
            PosInf => 1,
            Fin(r) if r.is_zero() => 0,
            Fin(r) if r.is_positive() => 1,
            Fin(_) => -1,
        }
    }

    fn inf(sign: i8) -> Self {
        if sign < 0 {
            NegInf
        } else {
            PosInf
        }
    }

    pub fn is_infinite(&self) -> bool {
        !matches!(self, Fin(_))
    }

    pub fn abs(self) -> Self {
        match self {
            NegInf | PosInf => PosInf,
            Fin(r) => Fin(r.abs()),
        }
    }

    pub fn square(self) -> Self {
        self.clone() * self
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            NegInf => f64::NEG_INFINITY,
            PosInf => f64::INFINITY,
            Fin(r) => r.to_f64().expect("rational converts to f64"),
        }
    }

    pub fn sqrt(&self) -> f64 {
        fsqrt(self.to_f64())
    }

    pub fn log2(&self) -> f64 {
        flog2(self.to_f64())
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ext {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Fin(a), Fin(b)) => a.cmp(b),
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (PosInf, _) | (_, NegInf) => Ordering::Greater,
        }
    }
}

impl Neg for Ext {
    type Output = Ext;
    fn neg(self) -> Ext {
        match self {
            NegInf => PosInf,
            PosInf => NegInf,
            Fin(r) => Fin(-r),
        }
    }
}

impl Add for Ext {
    type Output = Ext;
    fn add(self, rhs: Ext) -> Ext {
        match (self, rhs) {
            (Fin(a), Fin(b)) => Fin(a + b),
            (PosInf, NegInf) | (NegInf, PosInf) => Ext::zero(),
            (x @ (PosInf | NegInf), _) | (_, x @ (PosInf | NegInf)) => x,
        }
    }
}

impl Sub for Ext {
    type Output = Ext;
    fn sub(self, rhs: Ext) -> Ext {
        self + (-rhs)
    }
}

impl Mul for Ext {
    type Output = Ext;
    fn mul(self, rhs: Ext) -> Ext {
        match (self, rhs) {
            (Fin(a), Fin(b)) => Fin(a * b),
            (x, y) => match x.signum() * y.signum() {
                0 => Ext::zero(),
                s => Ext::inf(s),
            },
        }
    }
}

impl Div for Ext {
    type Output = Ext;
    fn div(self, rhs: Ext) -> Ext {
        match (self, rhs) {
            (Fin(a), Fin(b)) if b.is_zero() => {
                if a.is_zero() {
                    Ext::zero()
                } else {
                    Ext::inf(if a.is_positive() { 1 } else { -1 })
                }
            }
            (Fin(a), Fin(b)) => Fin(a / b),
            (_, y) if y.is_infinite() => Ext::zero(),
            (x, y) => Ext::inf(x.signum() * if y.signum() < 0 { -1 } else { 1 }),
        }
    }
}

impl From<Rational> for Ext {
    fn from(r: Rational) -> Self {
        Fin(r)
    }
}

impl From<&Rational> for Ext {
    fn from(r: &Rational) -> Self {
        Fin(r.clone())
    }
}

pub fn fsqrt(x: f64) -> f64 {
    debug_assert!(x >= 0.0, "square root of negative value {x}");
    x.sqrt()
}

pub fn flog2(x: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else {
        x.log2()
    }
}

pub fn fmul(x: f64, y: f64) -> f64 {
    if x == 0.0 || y == 0.0 {
        0.0
    } else {
        x * y
    }
}

pub fn fadd(x: f64, y: f64) -> f64 {
    if x.is_infinite() && y.is_infinite() && x.signum() != y.signum() {
        0.0
    } else {
        x + y
    }
}

pub fn fsub(x: f64, y: f64) -> f64 {
    fadd(x, -y)
}

pub fn fdiv(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        if x == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(x)
        }
    } else if y.is_infinite() {
        0.0
    } else {
        x / y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Ext {
        Fin(Rational::new(n.into(), d.into()))
    }

    #[test]
    fn division_conventions() {
        assert_eq!(Ext::one() / Ext::zero(), PosInf);
        assert_eq!(Ext::int(-2) / Ext::zero(), NegInf);
        assert_eq!(Ext::zero() / Ext::zero(), Ext::zero());
        assert_eq!(Ext::one() / PosInf, Ext::zero());
        assert_eq!(PosInf / PosInf, Ext::zero());
        assert_eq!(PosInf / Ext::int(-3), NegInf);
        assert_eq!(NegInf / Ext::zero(), NegInf);
        assert_eq!(q(1, 2) / q(1, 4), Ext::int(2));
    }

    #[test]
    fn products_and_sums() {
        assert_eq!(Ext::zero() * PosInf, Ext::zero());
        assert_eq!(NegInf * Ext::int(-1), PosInf);
        assert_eq!(PosInf - PosInf, Ext::zero());
        assert_eq!(PosInf + Ext::int(5), PosInf);
        assert_eq!(Ext::one() - PosInf, NegInf);
        assert!(NegInf < Ext::int(-1000) && Ext::int(1000) < PosInf);
    }

    #[test]
    fn float_helpers() {
        assert_eq!(flog2(0.0), f64::NEG_INFINITY);
        assert_eq!(fmul(0.0, f64::NEG_INFINITY), 0.0);
        assert_eq!(fsub(f64::INFINITY, f64::INFINITY), 0.0);
        assert_eq!(fdiv(-1.0, 0.0), f64::NEG_INFINITY);
        assert_eq!(fdiv(0.0, 0.0), 0.0);
        assert_eq!(q(1, 3).to_f64(), 1.0 / 3.0);
    }
}
