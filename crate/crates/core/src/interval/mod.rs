//! Closed floating-point intervals with outward rounding.
//!
//! Every operation returns an interval containing the exact image of its
//! operands. Non-finite endpoints are never produced silently: the `checked_*`
//! methods report [`Error::Overflow`], and the operator overloads panic on it.

mod elementary;
mod format;
pub mod rounding;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use elementary::{exp_down, exp_up, ln_down, ln_up, LN2};
pub use format::{format_outward, OutwardDecimal};
use rounding::{add_down, add_up, div_down, div_up, mul_down, mul_up, sub_down, sub_up};

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval", into = "RawInterval")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[derive(Serialize, Deserialize)]
struct RawInterval {
    lo: f64,
    hi: f64,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;
    fn try_from(raw: RawInterval) -> Result<Self> {
        Interval::new(raw.lo, raw.hi)
    }
}

impl From<Interval> for RawInterval {
    fn from(x: Interval) -> Self {
        RawInterval { lo: x.lo, hi: x.hi }
    }
}

/// Arithmetic operations accepted by [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Abs,
}

/// Apply `op` to `x` (and `y` for binary ops). Unary ops ignore `y`.
pub fn arith(op: Op, x: Interval, y: Option<Interval>) -> Result<Interval> {
    let rhs = || y.ok_or_else(|| Error::DomainError(format!("{op:?} needs two operands")));
    match op {
        Op::Add => x.checked_add(rhs()?),
        Op::Sub => x.checked_sub(rhs()?),
        Op::Mul => x.checked_mul(rhs()?),
        Op::Div => x.checked_div(rhs()?),
        Op::Neg => Ok(-x),
        Op::Abs => Ok(x.abs()),
    }
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::DomainError(format!("NaN endpoint in [{lo}, {hi}]")));
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Overflow);
        }
        if lo > hi {
            return Err(Error::DomainError(format!("inverted interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    /// Degenerate interval `[x, x]`. Panics on a non-finite `x`.
    pub fn point(x: f64) -> Self {
        assert!(x.is_finite(), "interval point must be finite, got {x}");
        Interval { lo: x, hi: x }
    }

    /// Enclosure of `num / den` for two exactly representable integers or floats.
    pub fn ratio(num: f64, den: f64) -> Result<Self> {
        Interval::point(num).checked_div(Interval::point(den))
    }

    #[inline]
    pub(crate) fn from_bounds(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() {
            debug_assert!(lo <= hi);
            Ok(Interval { lo, hi })
        } else {
            Err(Error::Overflow)
        }
    }

    /// Symmetric interval `[-r, r]` for `r >= 0`.
    pub fn symmetric(r: f64) -> Result<Self> {
        Interval::new(-r, r)
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    /// Upper bound on `hi - lo`.
    pub fn width(self) -> f64 {
        sub_up(self.hi, self.lo)
    }

    pub fn midpoint(self) -> f64 {
        if self.lo == -self.hi {
            return 0.0;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Largest absolute value in the interval.
    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value in the interval.
    pub fn mig(self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_subset(self, other: Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn is_point(self) -> bool {
        self.lo == self.hi
    }

    pub fn hull(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// `None` when the intervals are disjoint.
    pub fn intersect(self, other: Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn overlaps(self, other: Interval) -> bool {
        self.intersect(other).is_some()
    }

    /// Two halves sharing the midpoint.
    pub fn split(self) -> (Interval, Interval) {
        let m = self.midpoint();
        (
            Interval { lo: self.lo, hi: m },
            Interval { lo: m, hi: self.hi },
        )
    }

    /// Widen by `r >= 0` on both sides.
    pub fn inflate(self, r: f64) -> Result<Interval> {
        Interval::from_bounds(sub_down(self.lo, r), add_up(self.hi, r))
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval {
                lo: 0.0,
                hi: (-self.lo).max(self.hi),
            }
        }
    }

    pub fn checked_add(self, rhs: Interval) -> Result<Interval> {
        Interval::from_bounds(add_down(self.lo, rhs.lo), add_up(self.hi, rhs.hi))
    }

    pub fn checked_sub(self, rhs: Interval) -> Result<Interval> {
        Interval::from_bounds(sub_down(self.lo, rhs.hi), sub_up(self.hi, rhs.lo))
    }

    pub fn checked_mul(self, rhs: Interval) -> Result<Interval> {
        let (lo, hi) = mul_bounds(self, rhs);
        Interval::from_bounds(lo, hi)
    }

    pub fn checked_div(self, rhs: Interval) -> Result<Interval> {
        if rhs.contains(0.0) {
            return Err(Error::DivisionByZeroInterval(rhs));
        }
        let (lo, hi) = if rhs.lo > 0.0 {
            div_bounds_pos(self, rhs)
        } else {
            div_bounds_pos(-self, -rhs)
        };
        Interval::from_bounds(lo, hi)
    }

    pub fn recip(self) -> Result<Interval> {
        Interval::ONE.checked_div(self)
    }

    pub fn square(self) -> Interval {
        self.pow_int(2).expect("interval overflow")
    }

    /// Enclosure of `{x^k : x in self}`.
    pub fn pow_int(self, k: u32) -> Result<Interval> {
        if k == 0 {
            return Ok(Interval::ONE);
        }
        if k % 2 == 0 {
            let a = self.abs();
            return Interval::from_bounds(pow_down_nonneg(a.lo, k), pow_up_nonneg(a.hi, k));
        }
        let lo = if self.lo >= 0.0 {
            pow_down_nonneg(self.lo, k)
        } else {
            -pow_up_nonneg(-self.lo, k)
        };
        let hi = if self.hi >= 0.0 {
            pow_up_nonneg(self.hi, k)
        } else {
            -pow_down_nonneg(-self.hi, k)
        };
        Interval::from_bounds(lo, hi)
    }

    /// Natural logarithm enclosure; requires `lo > 0`.
    pub fn ln(self) -> Result<Interval> {
        if self.lo <= 0.0 {
            return Err(Error::DomainError(format!("log of {self}")));
        }
        Interval::from_bounds(elementary::ln_down(self.lo), elementary::ln_up(self.hi))
    }

    pub fn exp(self) -> Result<Interval> {
        Interval::from_bounds(exp_down(self.lo), exp_up(self.hi))
    }

    /// Enclosure of `{x^s : x in self, s in exponent}` via `exp(s * log x)`.
    pub fn pow_real(self, exponent: Interval) -> Result<Interval> {
        if self.lo <= 0.0 {
            return Err(Error::DomainError(format!(
                "pow_real needs a positive base, got {self}"
            )));
        }
        self.ln()?.checked_mul(exponent)?.exp()
    }
}

#[inline]
fn mul_bounds(a: Interval, b: Interval) -> (f64, f64) {
    let (al, ah, bl, bh) = (a.lo, a.hi, b.lo, b.hi);
    if al >= 0.0 {
        if bl >= 0.0 {
            (mul_down(al, bl), mul_up(ah, bh))
        } else if bh <= 0.0 {
            (mul_down(ah, bl), mul_up(al, bh))
        } else {
            (mul_down(ah, bl), mul_up(ah, bh))
        }
    } else if ah <= 0.0 {
        if bl >= 0.0 {
            (mul_down(al, bh), mul_up(ah, bl))
        } else if bh <= 0.0 {
            (mul_down(ah, bh), mul_up(al, bl))
        } else {
            (mul_down(al, bh), mul_up(al, bl))
        }
    } else if bl >= 0.0 {
        (mul_down(al, bh), mul_up(ah, bh))
    } else if bh <= 0.0 {
        (mul_down(ah, bl), mul_up(al, bl))
    } else {
        (
            mul_down(al, bh).min(mul_down(ah, bl)),
            mul_up(al, bl).max(mul_up(ah, bh)),
        )
    }
}

/// Quotient bounds for a strictly positive divisor.
#[inline]
fn div_bounds_pos(a: Interval, b: Interval) -> (f64, f64) {
    if a.lo >= 0.0 {
        (div_down(a.lo, b.hi), div_up(a.hi, b.lo))
    } else if a.hi <= 0.0 {
        (div_down(a.lo, b.lo), div_up(a.hi, b.hi))
    } else {
        (div_down(a.lo, b.lo), div_up(a.hi, b.lo))
    }
}

fn pow_down_nonneg(x: f64, k: u32) -> f64 {
    directed_pow(x, k, mul_down)
}

fn pow_up_nonneg(x: f64, k: u32) -> f64 {
    directed_pow(x, k, mul_up)
}

/// Square-and-multiply; monotone for nonnegative `x`, so one rounding
/// direction throughout gives a one-sided bound.
fn directed_pow(x: f64, mut k: u32, mul: fn(f64, f64) -> f64) -> f64 {
    let mut base = x;
    let mut acc = 1.0;
    while k > 0 {
        if k & 1 == 1 {
            acc = mul(acc, base);
        }
        k >>= 1;
        if k > 0 {
            base = mul(base, base);
        }
    }
    acc
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

macro_rules! panicking_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for Interval {
            type Output = Interval;
            #[inline]
            fn $method(self, rhs: Interval) -> Interval {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("interval {}: {e}", stringify!($method)),
                }
            }
        }
    };
}

panicking_op!(Add, add, checked_add);
panicking_op!(Sub, sub, checked_sub);
panicking_op!(Mul, mul, checked_mul);
panicking_op!(Div, div, checked_div);

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn add_exact_dyadic() {
        assert_eq!(arith(Op::Add, iv(1.0, 2.0), Some(iv(3.0, 4.0))).unwrap(), iv(4.0, 6.0));
    }

    #[test]
    fn mul_sign_cases() {
        assert_eq!(iv(-1.0, 2.0) * iv(3.0, 4.0), iv(-4.0, 8.0));
        assert_eq!(iv(-1.0, 2.0) * iv(-3.0, 4.0), iv(-6.0, 8.0));
        assert_eq!(iv(-2.0, -1.0) * iv(-3.0, 4.0), iv(-8.0, 6.0));
    }

    #[test]
    fn third_has_positive_width() {
        let x = arith(Op::Div, Interval::ONE, Some(Interval::point(3.0))).unwrap();
        assert!(x.lo() < x.hi());
        assert!(x.lo() * 3.0 <= 1.0 && x.hi() * 3.0 >= 1.0);
    }

    #[test]
    fn division_by_zero_interval() {
        let e = arith(Op::Div, Interval::ONE, Some(iv(-1.0, 1.0)));
        assert!(matches!(e, Err(Error::DivisionByZeroInterval(_))));
    }

    #[test]
    fn overflow_is_an_error() {
        let big = Interval::point(f64::MAX);
        assert!(matches!(big.checked_add(big), Err(Error::Overflow)));
        assert!(matches!(big.pow_int(2), Err(Error::Overflow)));
        assert!(matches!(Interval::new(0.0, f64::INFINITY), Err(Error::Overflow)));
    }

    #[test]
    fn pow_int_cases() {
        assert_eq!(iv(-2.0, 1.0).pow_int(2).unwrap(), iv(0.0, 4.0));
        assert_eq!(Interval::point(2.0).pow_int(10).unwrap(), Interval::point(1024.0));
        assert_eq!(iv(-7.0, 3.0).pow_int(0).unwrap(), Interval::ONE);
        assert_eq!(iv(-2.0, 3.0).pow_int(3).unwrap(), iv(-8.0, 27.0));
        assert_eq!(iv(-3.0, -2.0).pow_int(3).unwrap(), iv(-27.0, -8.0));
    }

    #[test]
    fn set_operations() {
        assert_eq!(iv(0.0, 1.0).hull(iv(2.0, 3.0)), iv(0.0, 3.0));
        assert_eq!(iv(0.0, 1.0).split(), (iv(0.0, 0.5), iv(0.5, 1.0)));
        assert!(iv(0.53, 0.54).contains(0.538045));
        assert_eq!(iv(0.0, 1.0).intersect(iv(2.0, 3.0)), None);
        assert_eq!(iv(0.0, 2.0).intersect(iv(1.0, 3.0)), Some(iv(1.0, 2.0)));
        assert!(iv(0.2, 0.3).is_subset(iv(0.0, 1.0)));
        assert!(!iv(0.2, 1.3).is_subset(iv(0.0, 1.0)));
        assert_eq!(iv(-3.0, 1.0).abs(), iv(0.0, 3.0));
        assert_eq!(iv(0.0, 1.0).width(), 1.0);
    }

    #[test]
    fn pow_real_examples() {
        let r = Interval::point(4.0).pow_real(Interval::point(0.5)).unwrap();
        assert!(r.contains(2.0));
        assert!(r.width() <= 4.0 * f64::EPSILON * 2.0, "{r}");
        let one = Interval::ONE.pow_real(iv(-3.0, 7.0)).unwrap();
        assert!(one.contains(1.0));
        assert!(matches!(iv(0.0, 1.0).pow_real(Interval::ONE), Err(Error::DomainError(_))));
    }

    #[test]
    fn pow_real_half_to_cantor_exponent() {
        // 0.5^s at the f64 endpoints of s, frozen from a 50-digit mpmath evaluation
        let s = iv(0.6309297, 0.6309298);
        let r = Interval::point(0.5).pow_real(s).unwrap();
        let at_s_hi = 0.645_760_096_383_366_4; // 0.5^0.6309298
        let at_s_lo = 0.645_760_141_144_046_9; // 0.5^0.6309297
        assert!(r.lo() <= at_s_hi - 2e-16 && r.hi() >= at_s_lo + 2e-16, "{r}");
        assert!(r.width() < 1e-7);
    }

    #[test]
    fn serde_round_trip_is_exact() {
        let x = Interval::ratio(1.0, 3.0).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        let y: Interval = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
        assert!(serde_json::from_str::<Interval>(r#"{"lo":2.0,"hi":1.0}"#).is_err());
    }
}
