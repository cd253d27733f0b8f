//! Rigorous roots of the partition equation `sum_i v_i^s = 1` for ratios
//! `v_i` in `(0, 1)`.
//!
//! The upper side uses the `hi` endpoints and returns an `s` at which the
//! outward-rounded sum is at most 1; the lower side uses the `lo` endpoints
//! and returns an `s` at which it is at least 1. Since `s -> sum v_i^s` is
//! strictly decreasing, these bracket the true roots.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::search::{find_edge, Outcome};
use crate::interval::rounding::{add_down, add_up, mul_down, mul_up};
use crate::interval::{exp_down, exp_up, ln_down, ln_up, Interval};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

/// Leaves of the summation tree; the tree shape depends only on the length.
const BLOCK: usize = 4096;
const S_MAX: f64 = 2.0;

/// Logarithms of the relevant endpoints, rounded so the sums stay one-sided.
pub struct PartitionSum {
    logs: Vec<f64>,
    side: Side,
}

impl PartitionSum {
    pub fn new(values: &[Interval], side: Side) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NoRoot);
        }
        let logs = values
            .par_iter()
            .map(|v| {
                if !(v.lo() > 0.0 && v.hi() < 1.0) {
                    return Err(Error::DomainError(format!(
                        "partition value {v} is not inside (0, 1)"
                    )));
                }
                Ok(match side {
                    Side::Upper => ln_up(v.hi()),
                    Side::Lower => ln_down(v.lo()),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(PartitionSum { logs, side })
    }

    /// Upper bound (upper side) or lower bound (lower side) on the sum at `s >= 0`.
    pub fn eval(&self, s: f64) -> f64 {
        tree_sum(&self.logs, s, self.side)
    }

    /// Float estimate of the root by Newton on `ln sum exp(s l_i)`, which is
    /// convex and decreasing, started at `s = 0`.
    fn estimate(&self) -> f64 {
        let mut s = 0.0;
        for _ in 0..100 {
            let (e, le) = float_sums(&self.logs, s);
            if !(e > 0.0 && le < 0.0) {
                break;
            }
            let next = (s - e.ln() * e / le).clamp(0.0, S_MAX);
            if (next - s).abs() <= 4.0 * f64::EPSILON {
                return next;
            }
            s = next;
        }
        s
    }
}

/// `(sum exp(s l_i), sum l_i exp(s l_i))` in plain floating point, on the
/// same fixed tree as the rigorous sums.
fn float_sums(logs: &[f64], s: f64) -> (f64, f64) {
    if logs.len() <= BLOCK {
        return logs.iter().fold((0.0, 0.0), |(e, le), &l| {
            let x = (s * l).exp();
            (e + x, le + l * x)
        });
    }
    let (a, b) = logs.split_at(logs.len() / 2);
    let (x, y) = rayon::join(|| float_sums(a, s), || float_sums(b, s));
    (x.0 + y.0, x.1 + y.1)
}

fn tree_sum(logs: &[f64], s: f64, side: Side) -> f64 {
    if logs.len() <= BLOCK {
        return match side {
            Side::Upper => logs.iter().fold(0.0, |acc, &l| add_up(acc, exp_up(mul_up(s, l)))),
            Side::Lower => logs
                .iter()
                .fold(0.0, |acc, &l| add_down(acc, exp_down(mul_down(s, l)))),
        };
    }
    let (a, b) = logs.split_at(logs.len() / 2);
    let (x, y) = rayon::join(|| tree_sum(a, s, side), || tree_sum(b, s, side));
    match side {
        Side::Upper => add_up(x, y),
        Side::Lower => add_down(x, y),
    }
}

/// Root bracket of width `tol` inside `[0, 2]`; returns the rigorous end.
///
/// The search starts from a floating-point estimate and only ever returns an
/// `s` at which the rounded sum satisfies the side condition.
pub fn solve_partition(values: &[Interval], side: Side, tol: f64) -> Result<f64> {
    let sum = PartitionSum::new(values, side)?;
    solve(&sum, tol)
}

pub fn solve(sum: &PartitionSum, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("partition tolerance {tol} must be positive")));
    }
    // the upper side needs sum <= 1 (large s), the lower side sum >= 1 (small s)
    let (good_end, bad_end) = match sum.side {
        Side::Upper => {
            if sum.eval(S_MAX) > 1.0 {
                return Err(Error::NoRoot);
            }
            (S_MAX, 0.0)
        }
        Side::Lower => {
            if sum.eval(0.0) < 1.0 {
                return Err(Error::NoRoot);
            }
            (0.0, S_MAX)
        }
    };
    let ok = |s: f64| -> Result<bool> {
        let v = sum.eval(s);
        Ok(match sum.side {
            Side::Upper => v <= 1.0,
            Side::Lower => v >= 1.0,
        })
    };
    let cap = 2 * ((S_MAX / tol).log2().ceil().max(0.0) as u32 + 5);
    match find_edge(good_end, bad_end, sum.estimate(), tol, cap, ok)? {
        Outcome::Found(e) => Ok(e.good),
        Outcome::Stalled(e) => Err(Error::ToleranceFloor((e.good - e.bad).abs())),
    }
}
