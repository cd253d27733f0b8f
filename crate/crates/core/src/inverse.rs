//! Enclosures of `g^{-1}`, the inverse of `g` restricted to `J`, by one-sided
//! bisection against the decreasing-`g` certificate.
//!
//! For a target `Y` the result `X = [a, b]` satisfies `g(a) >= Y.hi` and
//! `g(b) <= Y.lo` for every function in the ball, so each `y` in `Y` has its
//! unique preimage in `X`. Each side starts from a Newton estimate on the
//! center polynomial and is refined until its bracket is below `tol`; what
//! remains of `width(X)` is the enclosure floor.

use crate::ball::FunctionBall;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::monotonicity::MonotonicityCertificate;
use crate::renorm::RenormConstants;
use crate::search::{find_edge, Outcome};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InverseQuery {
    pub y: Interval,
    pub tol: f64,
}

/// Iteration counts of the two one-sided searches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InverseStats {
    pub lower_steps: u32,
    pub upper_steps: u32,
}

/// A ball paired with a certificate that was checked against it once.
#[derive(Clone, Debug)]
pub struct MonotoneInverse<'a> {
    ball: &'a FunctionBall,
    domain: Interval,
    /// `g` on the domain endpoints
    g_left: Interval,
    g_right: Interval,
    max_query_width: f64,
    min_abs_gprime: f64,
    tol: f64,
    center: Vec<f64>,
}

impl<'a> MonotoneInverse<'a> {
    /// Checks only that the certificate belongs to `ball` and claims both
    /// signs; use [`MonotonicityCertificate::check`] for full re-verification.
    pub fn new(ball: &'a FunctionBall, cert: &MonotonicityCertificate) -> Result<Self> {
        let actual = ball.checksum();
        if cert.ball_checksum != actual {
            return Err(Error::CertificateMismatch(format!(
                "certificate is for ball {}, not {actual}",
                cert.ball_checksum
            )));
        }
        if !(cert.gprime_negative && cert.gsecond_negative) {
            return Err(Error::CertificateMismatch(
                "certificate does not establish that g is decreasing".into(),
            ));
        }
        let domain = cert.domain;
        let g_left = ball.eval(Interval::point(domain.lo()))?;
        let g_right = ball.eval(Interval::point(domain.hi()))?;
        let g_j = ball.eval(Interval::point(cert.j.lo()))?.hull(ball.eval(Interval::ONE)?);
        Ok(MonotoneInverse {
            ball,
            domain,
            g_left,
            g_right,
            max_query_width: g_j.width() / 4.0,
            min_abs_gprime: cert.min_abs_gprime,
            tol: 1e-14,
            center: ball.center(),
        })
    }

    /// Default bracket tolerance used by the IFS maps.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn min_abs_gprime(&self) -> f64 {
        self.min_abs_gprime
    }

    pub fn invert(&self, q: InverseQuery) -> Result<Interval> {
        self.invert_counted(q).map(|(x, _)| x)
    }

    pub fn invert_counted(&self, q: InverseQuery) -> Result<(Interval, InverseStats)> {
        let y = q.y;
        if !(q.tol > 0.0) {
            return Err(Error::Config(format!("inverse tolerance {} must be positive", q.tol)));
        }
        if y.width() > self.max_query_width {
            return Err(Error::RangeError { y });
        }
        // the domain endpoints must bracket every target
        if !(self.g_left.lo() >= y.hi() && self.g_right.hi() <= y.lo()) {
            return Err(Error::RangeError { y });
        }
        let cap = 2 * (((self.domain.width() / q.tol).log2().ceil().max(0.0) as u32) + 5);
        let left_ok = |m: f64| -> Result<bool> {
            Ok(self.ball.eval(Interval::point(m))?.lo() >= y.hi())
        };
        let right_ok = |m: f64| -> Result<bool> {
            Ok(self.ball.eval(Interval::point(m))?.hi() <= y.lo())
        };
        let r = self.ball.radius();
        let (lo, hi) = (self.domain.lo(), self.domain.hi());
        let (a, lower_steps) =
            self.search(lo, hi, self.center_preimage(y.hi() + r), q.tol, cap, left_ok)?;
        let (b, upper_steps) =
            self.search(hi, lo, self.center_preimage(y.lo() - r), q.tol, cap, right_ok)?;
        if a > b {
            return Err(Error::CertificateMismatch(format!(
                "inverse brackets crossed ({a} > {b}) for target {y}"
            )));
        }
        Ok((
            Interval::new(a, b)?,
            InverseStats {
                lower_steps,
                upper_steps,
            },
        ))
    }

    fn search(
        &self,
        good_end: f64,
        bad_end: f64,
        est: f64,
        tol: f64,
        cap: u32,
        ok: impl Fn(f64) -> Result<bool>,
    ) -> Result<(f64, u32)> {
        match find_edge(good_end, bad_end, est, tol, cap, ok)? {
            Outcome::Found(e) => Ok((e.good, e.evals)),
            Outcome::Stalled(e) => Err(Error::ToleranceUnreachable {
                x: Interval::new(e.good.min(e.bad), e.good.max(e.bad))?,
                tol,
            }),
        }
    }

    /// Float solution of `g_c(x) = target` on the domain, where `g_c` is the
    /// center polynomial. `g` is decreasing and concave there, so Newton from
    /// the right end converges monotonically.
    fn center_preimage(&self, target: f64) -> f64 {
        let (lo, hi) = (self.domain.lo(), self.domain.hi());
        let rho = self.ball.rho();
        let d = self.ball.degree() as i32;
        let mut x = hi;
        for _ in 0..60 {
            let s = x / rho;
            let u = s.powi(d);
            let (mut p, mut dp) = (0.0, 0.0);
            for &c in self.center.iter().rev() {
                dp = dp * u + p;
                p = p * u + c;
            }
            let slope = dp * d as f64 * s.powi(d - 1) / rho;
            if !(slope < 0.0) {
                break;
            }
            let next = (x - (p - target) / slope).clamp(lo, hi);
            if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs() {
                x = next;
                break;
            }
            x = next;
        }
        x
    }

    /// Enclosure of `(g^{-1})'(y)` for all `y` in the target, as `1/g'(X)`.
    pub fn inverse_deriv(&self, q: InverseQuery) -> Result<Interval> {
        let x = self.invert(q)?;
        self.reciprocal_deriv(x)
    }

    fn reciprocal_deriv(&self, x: Interval) -> Result<Interval> {
        let d = self.ball.eval_deriv(x)?;
        if d.contains(0.0) {
            return Err(Error::DerivativeContainsZero(d));
        }
        d.recip()
    }

    /// `Psi1(p) = g^{-1}(p / alpha)` and `|Psi1'(p)| = (1/alpha) / g'(Psi1(p))`
    /// from one inversion.
    pub fn psi1_with_deriv(
        &self,
        consts: &RenormConstants,
        p: Interval,
    ) -> Result<(Interval, Interval)> {
        let y = consts.alpha_inv.checked_mul(p)?;
        let x = self.invert(InverseQuery { y, tol: self.tol })?;
        let deriv = consts.alpha_inv.checked_mul(self.reciprocal_deriv(x)?)?;
        Ok((x, deriv))
    }
}
