//! Guaranteed enclosures of `exp` and `ln` at floating-point arguments.
//!
//! Both kernels run entirely in outward-rounded interval arithmetic with an
//! explicit Taylor remainder, so the returned bounds hold regardless of how
//! the platform libm behaves.

use std::sync::OnceLock;

use super::rounding::{mul_down, mul_up};
use super::Interval;

/// `ln 2` lies strictly between these two adjacent doubles.
pub const LN2: Interval = Interval {
    lo: f64::from_bits(0x3FE6_2E42_FEFA_39EF),
    hi: f64::from_bits(0x3FE6_2E42_FEFA_39F0),
};

/// ln2 = LN2_A + LN2_B + e with 0 <= e <= 2^-85. LN2_A has 32 significant
/// bits so `k * LN2_A` is exact for every reduction index we use.
const LN2_A: f64 = f64::from_bits(0x3FE6_2E42_FEE0_0000);
const LN2_B: f64 = f64::from_bits(0x3DEA_39EF_3579_3C76);
const LN2_C_MAX: f64 = f64::from_bits((1023 - 85) << 52);

const TABLE_BITS: u32 = 8;
const TABLE_SIZE: usize = 1 << TABLE_BITS;
/// Degree of the Taylor polynomial used after table reduction (|r| <= ln2/512).
const REDUCED_DEGREE: usize = 6;
/// Series length for the table itself (|arg| <= ln2).
const TABLE_TERMS: usize = 26;
/// atanh series length for ln on [1/sqrt2, sqrt2].
const ATANH_TERMS: usize = 14;

struct ExpTables {
    /// 1/i! for i = 0..TABLE_TERMS
    inv_fact: Vec<Interval>,
    /// ln2 / 256
    step: Interval,
    /// 2^(j/256) for j = 0..256
    pow2_frac: Vec<Interval>,
}

fn tables() -> &'static ExpTables {
    static TABLES: OnceLock<ExpTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut inv_fact = Vec::with_capacity(TABLE_TERMS + 1);
        let mut f = Interval::ONE;
        inv_fact.push(f);
        for i in 1..=TABLE_TERMS {
            f = f / Interval::point(i as f64);
            inv_fact.push(f);
        }
        let step = LN2 / Interval::point(TABLE_SIZE as f64);
        let pow2_frac = (0..TABLE_SIZE)
            .map(|j| taylor_exp(step * Interval::point(j as f64), &inv_fact, TABLE_TERMS))
            .collect();
        ExpTables {
            inv_fact,
            step,
            pow2_frac,
        }
    })
}

/// Taylor polynomial of degree `n - 1` plus a Lagrange remainder bound, valid
/// for `|r| <= 1`.
fn taylor_exp(r: Interval, inv_fact: &[Interval], n: usize) -> Interval {
    let mut acc = inv_fact[n - 1];
    for k in (0..n - 1).rev() {
        acc = acc * r + inv_fact[k];
    }
    // |R_n| <= |r|^n / n! * e^|r| <= 3 |r|^n / n!
    let m = r.mag();
    debug_assert!(m <= 1.0);
    let tail = Interval::point(m).pow_int(n as u32).unwrap() * inv_fact[n] * Interval::point(3.0);
    acc + Interval::new(-tail.hi(), tail.hi()).unwrap()
}

fn pow2(q: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&q));
    f64::from_bits(((q + 1023) as u64) << 52)
}

/// Enclosure of `exp(x)` for finite `x`. Returns `(lo, hi)`; `hi` may be
/// infinite when `x` is too large.
fn exp_enclosure(x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (1.0, 1.0);
    }
    if x > 709.0 {
        return (f64::MAX, f64::INFINITY);
    }
    if x < -700.0 {
        // e^-700 < 2^-1009
        return (0.0, pow2(-1009));
    }
    let t = tables();
    let k = (x / t.step.midpoint()).round();
    // r = x - k ln2 / 256, the large part cancelling exactly
    let kq = Interval::point(k / TABLE_SIZE as f64);
    let r = Interval::point(x) - Interval::point(k * LN2_A / TABLE_SIZE as f64)
        - kq * Interval::point(LN2_B)
        - kq * Interval::new(0.0, LN2_C_MAX).unwrap();
    let poly = taylor_exp(r, &t.inv_fact, REDUCED_DEGREE + 1);
    let k = k as i64;
    let j = k.rem_euclid(TABLE_SIZE as i64);
    let q = ((k - j) / TABLE_SIZE as i64) as i32;
    let m = poly * t.pow2_frac[j as usize];
    let scale = pow2(q);
    (mul_down(m.lo(), scale).max(0.0), mul_up(m.hi(), scale))
}

/// Lower bound on `exp(x)`.
pub fn exp_down(x: f64) -> f64 {
    exp_enclosure(x).0
}

/// Upper bound on `exp(x)`; `+inf` signals overflow.
pub fn exp_up(x: f64) -> f64 {
    exp_enclosure(x).1
}

/// Enclosure of `ln(x)` for finite `x > 0`.
fn ln_enclosure(x: f64) -> Interval {
    debug_assert!(x > 0.0 && x.is_finite());
    if x == 1.0 {
        return Interval::ZERO;
    }
    // x = m * 2^e with m in [1/sqrt2, sqrt2]
    let (mut m, mut e) = frexp(x);
    if m > std::f64::consts::SQRT_2 {
        m *= 0.5;
        e += 1;
    }
    let mi = Interval::point(m);
    // m - 1 is exact (Sterbenz); m + 1 may round
    let t = (mi - Interval::ONE) / (mi + Interval::ONE);
    let t2 = t.square();
    let mut acc = Interval::ratio(1.0, (2 * ATANH_TERMS - 1) as f64).unwrap();
    for i in (0..ATANH_TERMS - 1).rev() {
        acc = acc * t2 + Interval::ratio(1.0, (2 * i + 1) as f64).unwrap();
    }
    let mut series = acc * t;
    // tail: sum_{i>=N} |t|^(2i+1)/(2i+1) <= |t|^(2N+1) / ((2N+1)(1 - t^2))
    let n = ATANH_TERMS as u32;
    let tm = Interval::point(t.mag());
    let tail = tm.pow_int(2 * n + 1).unwrap()
        / (Interval::point((2 * n + 1) as f64) * (Interval::ONE - tm.square()));
    series = series + Interval::symmetric(tail.hi()).unwrap();
    let log_m = Interval::point(2.0) * series;
    if e == 0 {
        log_m
    } else {
        LN2 * Interval::point(e as f64) + log_m
    }
}

/// Mantissa in [1, 2) and binary exponent, subnormals included.
fn frexp(x: f64) -> (f64, i32) {
    let (x, bias) = if x < f64::MIN_POSITIVE {
        (x * pow2(64), -64)
    } else {
        (x, 0)
    };
    let bits = x.to_bits();
    let e = ((bits >> 52) & 0x7ff) as i32 - 1023;
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (1023 << 52));
    (m, e + bias)
}

/// Lower bound on `ln(x)` for finite `x > 0`.
pub fn ln_down(x: f64) -> f64 {
    ln_enclosure(x).lo()
}

/// Upper bound on `ln(x)` for finite `x > 0`.
pub fn ln_up(x: f64) -> f64 {
    ln_enclosure(x).hi()
}
