//! Function balls: a polynomial center plus an l1 radius, in the variable
//! `u = (|x|/rho)^d`.
//!
//! A function `g(x) = sum_k a_k u^k` belongs to the ball when
//! `sum_k |a_k - c_k| <= radius` (with `c_k = 0` beyond the truncation).
//! Since every evaluation keeps `|u| < 1`, the discrepancy in value is bounded
//! by the radius and the discrepancies in `dg/du`, `d2g/du2` by the radius
//! times `sup_k k t^(k-1)` and `sup_k k(k-1) t^(k-2)`.

mod io;

pub use io::default_ball_path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hexfloat::to_hex;
use crate::interval::rounding::{add_up, mul_up};
use crate::interval::Interval;
use crate::renorm::RenormConstants;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProvenanceSource {
    NewtonComputed,
    LoadedFromFile,
}

impl ProvenanceSource {
    pub fn as_str(self) -> &'static str {
        match self {
            ProvenanceSource::NewtonComputed => "newton_computed",
            ProvenanceSource::LoadedFromFile => "loaded_from_file",
        }
    }
}

/// Records the conditional-rigor contract: bounds derived from a ball are
/// rigorous only if the ball really contains the fixed point.
#[derive(Clone, Debug, PartialEq)]
pub struct BallProvenance {
    pub source: ProvenanceSource,
    /// Non-rigorous diagnostic: truncated l1 norm of R(center) - center.
    pub residual_l1: f64,
    pub assumed_rigorous: bool,
}

#[derive(Clone, Debug)]
pub struct FunctionBall {
    degree: u32,
    rho: f64,
    radius: f64,
    t_max: f64,
    coeffs: Vec<Interval>,
    /// k c_k, for k >= 1
    d1: Vec<Interval>,
    /// k (k-1) c_k, for k >= 2
    d2: Vec<Interval>,
    provenance: BallProvenance,
}

impl FunctionBall {
    pub fn new(
        degree: u32,
        rho: f64,
        coeffs: Vec<Interval>,
        radius: f64,
        t_max: f64,
        provenance: BallProvenance,
    ) -> Result<Self> {
        if degree < 2 {
            return Err(Error::Config(format!("critical degree {degree} < 2")));
        }
        if !(rho.is_finite() && rho > 1.0) {
            return Err(Error::Config(format!("rho = {rho} must exceed 1")));
        }
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::Config(format!("radius = {radius} must be >= 0")));
        }
        if !(t_max > 0.0 && t_max < 1.0) {
            return Err(Error::Config(format!("t_max = {t_max} must lie in (0, 1)")));
        }
        if coeffs.len() < 2 {
            return Err(Error::Config("ball needs at least two coefficients".into()));
        }
        if !coeffs[0].contains(1.0) {
            return Err(Error::Config(format!(
                "constant coefficient {} does not enclose g(0) = 1",
                coeffs[0]
            )));
        }
        if provenance.assumed_rigorous && radius <= 0.0 {
            return Err(Error::Config(
                "a ball can only be assumed rigorous with an explicit positive radius".into(),
            ));
        }
        let d1 = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| *c * Interval::point(k as f64))
            .collect();
        let d2 = coeffs
            .iter()
            .enumerate()
            .skip(2)
            .map(|(k, c)| *c * Interval::point((k * (k - 1)) as f64))
            .collect();
        let ball = FunctionBall {
            degree,
            rho,
            radius,
            t_max,
            coeffs,
            d1,
            d2,
            provenance,
        };
        let g1 = ball.eval(Interval::ONE)?;
        if g1.hi() >= 0.0 {
            return Err(Error::Config(format!("g(1) enclosure {g1} is not negative")));
        }
        Ok(ball)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Interval] {
        &self.coeffs
    }

    pub fn provenance(&self) -> &BallProvenance {
        &self.provenance
    }

    pub fn set_provenance(&mut self, provenance: BallProvenance) -> Result<()> {
        if provenance.assumed_rigorous && self.radius <= 0.0 {
            return Err(Error::Config(
                "a ball can only be assumed rigorous with an explicit positive radius".into(),
            ));
        }
        self.provenance = provenance;
        Ok(())
    }

    /// Midpoints of the center coefficients.
    pub fn center(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.midpoint()).collect()
    }

    /// Largest |x| at which the ball may be evaluated.
    pub fn domain_limit(&self) -> f64 {
        // rounded down so the check is conservative
        (self.rho * self.t_max).next_down()
    }

    fn check_domain(&self, x: Interval) -> Result<()> {
        let limit = self.domain_limit();
        if x.mag() > limit {
            Err(Error::DomainExceeded { arg: x, limit })
        } else {
            Ok(())
        }
    }

    /// `|x| / rho` for nonnegative `x`.
    fn scaled(&self, a: Interval) -> Result<Interval> {
        a.checked_div(Interval::point(self.rho))
    }

    /// Enclosure of `g(x)` for every `x` in `x` and every `g` in the ball.
    pub fn eval(&self, x: Interval) -> Result<Interval> {
        self.check_domain(x)?;
        let t = self.scaled(x.abs())?.pow_int(self.degree)?;
        horner(&self.coeffs, t)?.inflate(self.radius)
    }

    /// Enclosure of `g'(x)`.
    pub fn eval_deriv(&self, x: Interval) -> Result<Interval> {
        self.check_domain(x)?;
        if x.lo() >= 0.0 {
            self.deriv_nonneg(x)
        } else if x.hi() <= 0.0 {
            Ok(-self.deriv_nonneg(-x)?)
        } else {
            // g' is odd; evaluate both halves on the positive side
            let left = -self.deriv_nonneg(Interval::new(0.0, -x.lo())?)?;
            let right = self.deriv_nonneg(Interval::new(0.0, x.hi())?)?;
            Ok(left.hull(right))
        }
    }

    /// Enclosure of `g''(x)`; `g''` is even, so only `|x|` matters.
    pub fn eval_second_deriv(&self, x: Interval) -> Result<Interval> {
        self.check_domain(x)?;
        self.second_deriv_nonneg(x.abs())
    }

    /// du/dx = (d/rho) s^(d-1) and d2u/dx2 = (d(d-1)/rho^2) s^(d-2), s = x/rho.
    fn chain_factors(&self, s: Interval) -> Result<(Interval, Interval)> {
        let d = self.degree;
        let rho = Interval::point(self.rho);
        let du = Interval::point(d as f64)
            .checked_div(rho)?
            .checked_mul(s.pow_int(d - 1)?)?;
        let ddu = Interval::point((d * (d - 1)) as f64)
            .checked_div(rho.checked_mul(rho)?)?
            .checked_mul(s.pow_int(d - 2)?)?;
        Ok((du, ddu))
    }

    fn deriv_nonneg(&self, a: Interval) -> Result<Interval> {
        let s = self.scaled(a)?;
        let t = s.pow_int(self.degree)?;
        let (du, _) = self.chain_factors(s)?;
        let g1 = horner(&self.d1, t)?;
        let tail = mul_up(mul_up(self.radius, first_deriv_tail(t.hi())), du.hi());
        g1.checked_mul(du)?.inflate(tail)
    }

    fn second_deriv_nonneg(&self, a: Interval) -> Result<Interval> {
        let s = self.scaled(a)?;
        let t = s.pow_int(self.degree)?;
        let (du, ddu) = self.chain_factors(s)?;
        let g1 = horner(&self.d1, t)?;
        let g2 = if self.d2.is_empty() {
            Interval::ZERO
        } else {
            horner(&self.d2, t)?
        };
        let du2 = du.pow_int(2)?;
        let center = g2.checked_mul(du2)?.checked_add(g1.checked_mul(ddu)?)?;
        let tail = mul_up(
            self.radius,
            add_up(
                mul_up(second_deriv_tail(t.hi()), du2.hi()),
                mul_up(first_deriv_tail(t.hi()), ddu.hi()),
            ),
        );
        center.inflate(tail)
    }

    /// Both sides of `g'(x) = g'(g(x/alpha)) g'(x/alpha)`, obtained by
    /// differentiating the fixed-point equation. A consistency check only.
    pub fn deriv_identity_check(
        &self,
        consts: &RenormConstants,
        x: Interval,
    ) -> Result<(Interval, Interval)> {
        let lhs = self.eval_deriv(x)?;
        let inner = x.checked_mul(consts.alpha_inv)?;
        let rhs = self
            .eval_deriv(self.eval(inner)?)?
            .checked_mul(self.eval_deriv(inner)?)?;
        Ok((lhs, rhs))
    }

    /// SHA-256 over the mathematical content (degree, scales, radius,
    /// coefficient endpoints). Provenance metadata is excluded.
    pub fn checksum(&self) -> String {
        sha256_tag(self.canonical_content().as_bytes())
    }

    fn canonical_content(&self) -> String {
        let mut s = format!(
            "degree_d={}\nrho={}\nradius={}\nt_max={}\ntruncation_N={}\n",
            self.degree,
            to_hex(self.rho),
            to_hex(self.radius),
            to_hex(self.t_max),
            self.truncation()
        );
        for c in &self.coeffs {
            s.push_str(&to_hex(c.lo()));
            s.push(' ');
            s.push_str(&to_hex(c.hi()));
            s.push('\n');
        }
        s
    }
}

/// `sha256:<hex>` of `bytes`.
pub fn sha256_tag(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

fn horner(coeffs: &[Interval], t: Interval) -> Result<Interval> {
    let (last, rest) = coeffs.split_last().expect("nonempty coefficient list");
    let mut acc = *last;
    for c in rest.iter().rev() {
        acc = acc.checked_mul(t)?.checked_add(*c)?;
    }
    Ok(acc)
}

/// Upper bound on `sup_{k >= 1} k t^k` for `0 <= t < 1`.
pub fn k1(t: f64) -> f64 {
    scan_sup(t, 1, 0, |k| k as f64)
}

/// Upper bound on `sup_{k >= 1} k t^(k-1)`.
pub fn first_deriv_tail(t: f64) -> f64 {
    scan_sup(t, 1, 1, |k| k as f64)
}

/// Upper bound on `sup_{k >= 2} k (k-1) t^(k-2)`.
pub fn second_deriv_tail(t: f64) -> f64 {
    scan_sup(t, 2, 2, |k| (k * (k - 1)) as f64)
}

/// `sup_{k >= k0} w(k) t^(k - shift)` for weights with `w(k+1)/w(k)`
/// decreasing: the terms are unimodal in `k` and decrease once
/// `w(k+1)/w(k) * t < 1`, which holds for `k > (1+t)/(1-t)` in both uses.
fn scan_sup(t: f64, k0: u64, shift: u64, w: impl Fn(u64) -> f64) -> f64 {
    assert!((0.0..1.0).contains(&t), "tail factor needs 0 <= t < 1, got {t}");
    let k_end = ((1.0 + t) / (1.0 - t)).floor() as u64 + 2;
    let mut best: f64 = 0.0;
    let mut pow = 1.0; // upper bound on t^(k - shift)
    for _ in shift..k0 {
        pow = mul_up(pow, t);
    }
    for k in k0..=k_end.max(k0) {
        best = best.max(mul_up(w(k), pow));
        pow = mul_up(pow, t);
    }
    best
}
