//! Period-doubling renormalization on truncated power series in
//! `u = (|x|/rho)^d`, a Newton solver for its fixed point, and the scaling
//! constant `alpha = 1/g(1)`.
//!
//! For even `d` the operator is `g(x) -> alpha g(g(x/alpha))`. For odd `d` we
//! work with the analytic branch `g_+` on `x >= 0` and use
//! `g_+(x) -> alpha g_+(g_+(-x/alpha))`, so the inner argument stays positive.
//! In the u-variable both become
//! `R(G)(u) = alpha * G((P(u)/rho)^d)` with `P(u) = G(lambda u)` and
//! `lambda = s^d`, where `s` is the signed inner scale.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::ball::{BallProvenance, FunctionBall, ProvenanceSource};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::profile::DegreeProfile;

#[derive(Clone, Debug, PartialEq)]
pub struct RenormConfig {
    pub degree: u32,
    pub truncation: usize,
    pub rho: f64,
    pub t_max: f64,
    pub newton_tol: f64,
    pub max_iters: usize,
    /// Seed u-coefficients (c_0 is forced to 1).
    pub seed: Vec<f64>,
}

impl RenormConfig {
    pub fn from_profile(p: &DegreeProfile) -> Self {
        RenormConfig {
            degree: p.degree,
            truncation: p.truncation,
            rho: p.rho,
            t_max: p.t_max,
            newton_tol: p.newton_tol,
            max_iters: p.max_iters,
            seed: vec![1.0, p.seed_x_coeff * p.rho.powi(p.degree as i32)],
        }
    }

    fn validate(&self) -> Result<()> {
        if self.truncation < 5 {
            return Err(Error::Config(format!("truncation {} < 5", self.truncation)));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::Config("newton_tol must be positive".into()));
        }
        if self.degree < 2 {
            return Err(Error::Config(format!("degree {} < 2", self.degree)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormConstants {
    pub alpha: Interval,
    pub alpha_inv: Interval,
    pub degree: u32,
}

/// Scale applied to `x` inside the inner `g`: `1/alpha` for even degree,
/// `-1/alpha` for odd degree.
pub fn inner_scale(alpha: f64, degree: u32) -> f64 {
    if degree % 2 == 0 {
        1.0 / alpha
    } else {
        -1.0 / alpha
    }
}

/// Image of a center polynomial under the renormalization operator.
#[derive(Clone, Debug)]
pub struct RenormImage {
    pub coeffs: Vec<f64>,
    pub alpha: f64,
    /// Factor multiplying `u` in the inner evaluation; negative would mean the
    /// inner argument changed sign.
    pub inner_u_scale: f64,
    /// l1 mass of the composed series between degrees N+1 and 2N.
    pub tail_l1: f64,
}

fn horner_f64(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck)
}

/// Truncated product of two series.
fn mul_trunc(a: &[f64], b: &[f64], keep: usize) -> Vec<f64> {
    let mut out = vec![0.0; keep + 1];
    for (i, &ai) in a.iter().enumerate().take(keep + 1) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(keep + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Apply the operator to `coeffs`, composing series up to degree `keep`.
fn apply_r_keep(
    coeffs: &[f64],
    degree: u32,
    rho: f64,
    t_max: f64,
    keep: usize,
) -> Result<RenormImage> {
    let rho_d = rho.powi(degree as i32);
    let g1 = horner_f64(coeffs, 1.0 / rho_d);
    let alpha = 1.0 / g1;
    let lambda = inner_scale(alpha, degree).powi(degree as i32);

    // P(u) = G(lambda u)
    let mut p = Vec::with_capacity(coeffs.len());
    let mut lk = 1.0;
    for &c in coeffs {
        p.push(c * lk);
        lk *= lambda;
    }

    // the outer argument P(u) must stay inside the evaluation disk on u in [0, 1]
    let limit = rho * t_max;
    let worst = (0..=64)
        .map(|i| horner_f64(&p, i as f64 / 64.0).abs())
        .fold(0.0, f64::max);
    if !(worst <= limit) {
        return Err(Error::CompositionDivergence {
            inner: worst,
            limit,
        });
    }

    // Q = (P/rho)^d
    let p_scaled: Vec<f64> = p.iter().map(|c| c / rho).collect();
    let mut q = vec![1.0];
    for _ in 0..degree {
        q = mul_trunc(&q, &p_scaled, keep);
    }

    // alpha * G(Q) by Horner
    let (last, rest) = coeffs.split_last().expect("nonempty");
    let mut acc = vec![*last];
    for &c in rest.iter().rev() {
        acc = mul_trunc(&acc, &q, keep);
        acc[0] += c;
    }
    acc.resize(keep + 1, 0.0);
    let n = coeffs.len() - 1;
    let image: Vec<f64> = acc.iter().map(|c| alpha * c).collect();
    let tail_l1 = image.iter().skip(n + 1).map(|c| c.abs()).sum();
    let mut out = image;
    out.truncate(n + 1);
    Ok(RenormImage {
        coeffs: out,
        alpha,
        inner_u_scale: lambda,
        tail_l1,
    })
}

/// One application of the renormalization operator to a center polynomial.
pub fn apply_r(coeffs: &[f64], cfg: &RenormConfig) -> Result<RenormImage> {
    if coeffs.len() != cfg.truncation + 1 {
        return Err(Error::Config(format!(
            "expected {} coefficients, got {}",
            cfg.truncation + 1,
            coeffs.len()
        )));
    }
    apply_r_keep(coeffs, cfg.degree, cfg.rho, cfg.t_max, 2 * cfg.truncation)
}

#[derive(Clone, Debug)]
pub struct NewtonResult {
    pub coeffs: Vec<f64>,
    pub residual_l1: f64,
    pub alpha: f64,
    pub tail_l1: f64,
    /// Residual before each step, then after the last one.
    pub history: Vec<f64>,
}

fn residual(c: &[f64], degree: u32, rho: f64, t_max: f64) -> Result<Vec<f64>> {
    let n = c.len() - 1;
    let img = apply_r_keep(c, degree, rho, t_max, n)?;
    Ok((1..=n).map(|k| img.coeffs[k] - c[k]).collect())
}

fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Newton on `c_1..c_N` with `c_0 = 1` pinned; Jacobian by central differences.
fn newton_at(
    seed: &[f64],
    n: usize,
    cfg: &RenormConfig,
) -> std::result::Result<(Vec<f64>, Vec<f64>), (Vec<f64>, f64)> {
    let (d, rho, t_max) = (cfg.degree, cfg.rho, cfg.t_max);
    let mut c = vec![0.0; n + 1];
    for (k, s) in seed.iter().enumerate().take(n + 1) {
        c[k] = *s;
    }
    c[0] = 1.0;
    let mut history = Vec::new();
    let mut best = (c.clone(), f64::INFINITY);
    for _ in 0..cfg.max_iters {
        let f = match residual(&c, d, rho, t_max) {
            Ok(f) => f,
            Err(_) => return Err(best),
        };
        let r = l1(&f);
        history.push(r);
        if r < best.1 {
            best = (c.clone(), r);
        }
        if !r.is_finite() {
            return Err(best);
        }
        if r <= cfg.newton_tol {
            return Ok((c, history));
        }
        let h = 1e-7;
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            let mut cp = c.clone();
            let mut cm = c.clone();
            cp[j + 1] += h;
            cm[j + 1] -= h;
            let (Ok(fp), Ok(fm)) = (residual(&cp, d, rho, t_max), residual(&cm, d, rho, t_max))
            else {
                return Err(best);
            };
            for i in 0..n {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let rhs = DVector::from_iterator(n, f.iter().map(|x| -x));
        let Some(step) = jac.lu().solve(&rhs) else {
            return Err(best);
        };
        for j in 0..n {
            c[j + 1] += step[j];
        }
    }
    match residual(&c, d, rho, t_max) {
        Ok(f) if l1(&f) <= cfg.newton_tol => {
            history.push(l1(&f));
            Ok((c, history))
        }
        Ok(f) => {
            let r = l1(&f);
            if r < best.1 {
                best = (c, r);
            }
            Err(best)
        }
        Err(_) => Err(best),
    }
}

/// Approximate fixed-point center by Newton's method, falling back to
/// continuation in the truncation when the direct solve fails.
pub fn newton_fixpoint(cfg: &RenormConfig) -> Result<NewtonResult> {
    cfg.validate()?;
    let n = cfg.truncation;
    let solved = match newton_at(&cfg.seed, n, cfg) {
        Ok(ok) => Ok(ok),
        Err(_) => {
            let mut seed = cfg.seed.clone();
            let mut m = 5;
            let mut last = Err((seed.clone(), f64::INFINITY));
            while m < n {
                match newton_at(&seed, m, cfg) {
                    Ok((c, _)) => seed = c,
                    Err(b) => {
                        last = Err(b);
                        break;
                    }
                }
                m = (2 * m).min(n);
            }
            if m >= n {
                last = newton_at(&seed, n, cfg);
            }
            last
        }
    };
    match solved {
        Ok((coeffs, history)) => {
            let img = apply_r(&coeffs, cfg)?;
            let residual_l1 = *history.last().expect("nonempty history");
            Ok(NewtonResult {
                alpha: img.alpha,
                tail_l1: img.tail_l1,
                coeffs,
                residual_l1,
                history,
            })
        }
        Err((mut best, best_residual)) => {
            // continuation may stop at a shorter truncation
            best.resize(n + 1, 0.0);
            Err(Error::NoConvergence {
            iterations: cfg.max_iters,
                best_residual,
                best,
            })
        }
    }
}

/// Wrap a Newton center as a ball with the given assumed radius. The ball is
/// flagged rigorous only if requested, the radius is positive and the
/// discarded composition tail is below a tenth of the radius.
pub fn ball_from_newton(
    result: &NewtonResult,
    cfg: &RenormConfig,
    radius: f64,
    assume_rigorous: bool,
) -> Result<FunctionBall> {
    let coeffs = result.coeffs.iter().map(|&c| Interval::point(c)).collect();
    let assumed_rigorous = assume_rigorous && radius > 0.0 && result.tail_l1 <= radius / 10.0;
    FunctionBall::new(
        cfg.degree,
        cfg.rho,
        coeffs,
        radius,
        cfg.t_max,
        BallProvenance {
            source: ProvenanceSource::NewtonComputed,
            residual_l1: result.residual_l1,
            assumed_rigorous,
        },
    )
}

/// `alpha = 1/g(1)` with `alpha_inv = g(1)` taken directly from the ball.
pub fn alpha_of(ball: &FunctionBall) -> Result<RenormConstants> {
    let g1 = ball.eval(Interval::ONE)?;
    if g1.contains(0.0) {
        return Err(Error::SingularAlpha(g1));
    }
    let alpha = g1.recip()?;
    if alpha.hi() >= -1.0 {
        return Err(Error::DomainError(format!(
            "alpha enclosure {alpha} is not below -1"
        )));
    }
    Ok(RenormConstants {
        alpha,
        alpha_inv: g1,
        degree: ball.degree(),
    })
}

/// l1 norm of `R(center) - center` over the retained coefficients.
/// Informational only; infinite if the operator cannot be applied.
pub fn residual_diagnostic(ball: &FunctionBall) -> f64 {
    let c = ball.center();
    residual(&c, ball.degree(), ball.rho(), ball.t_max())
        .map(|f| l1(&f))
        .unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests;
