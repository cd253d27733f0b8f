//! Directed rounding without touching the FPU control word.
//!
//! Each primitive computes the round-to-nearest result and then recovers the
//! sign of the rounding error with an error-free transformation (TwoSum, or an
//! FMA residual for products and quotients). The result is nudged by one ulp
//! only when it lies on the wrong side of the exact value, so exact operations
//! stay exact.

/// Below this magnitude FMA residuals may be inexact; fall back to a blind nudge.
const TINY: f64 = 1.0e-290;

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
pub fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if two_sum_err(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if two_sum_err(a, b, s) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

#[inline]
pub fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

/// Sign of (exact product - rounded product): -1, 0 or 1, or `None` when the
/// residual cannot be trusted.
#[inline]
fn mul_err_sign(a: f64, b: f64, p: f64) -> Option<f64> {
    if p == 0.0 && (a == 0.0 || b == 0.0) {
        return Some(0.0);
    }
    if !p.is_finite() || p.abs() < TINY {
        return None;
    }
    Some(a.mul_add(b, -p))
}

#[inline]
pub fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    match mul_err_sign(a, b, p) {
        Some(e) if e >= 0.0 => p,
        _ => p.next_down(),
    }
}

#[inline]
pub fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    match mul_err_sign(a, b, p) {
        Some(e) if e <= 0.0 => p,
        _ => p.next_up(),
    }
}

/// Sign of (exact quotient - rounded quotient), from the exact remainder
/// `a - q*b`.
#[inline]
fn div_err_sign(a: f64, b: f64, q: f64) -> Option<f64> {
    if a == 0.0 && b != 0.0 {
        return Some(0.0);
    }
    if !q.is_finite() || q.abs() < TINY || a.abs() < TINY {
        return None;
    }
    let r = (-q).mul_add(b, a);
    Some(if b > 0.0 { r } else { -r })
}

#[inline]
pub fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    match div_err_sign(a, b, q) {
        Some(e) if e >= 0.0 => q,
        _ => q.next_down(),
    }
}

#[inline]
pub fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    match div_err_sign(a, b, q) {
        Some(e) if e <= 0.0 => q,
        _ => q.next_up(),
    }
}
