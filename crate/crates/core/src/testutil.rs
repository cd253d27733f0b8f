use std::cmp::Ordering;
use std::sync::OnceLock;

use num_bigint::BigInt;

use crate::ball::FunctionBall;
use crate::interval::Interval;
use crate::monotonicity::MonotonicityCertificate;
use crate::profile::profile;
use crate::renorm::{ball_from_newton, newton_fixpoint, RenormConfig};

/// Newton fixed-point ball with the bundled profile, computed once per degree.
pub fn fixed_ball(degree: u32) -> &'static FunctionBall {
    static BALLS: [OnceLock<FunctionBall>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    BALLS[(degree - 2) as usize].get_or_init(|| {
        let p = profile(degree).unwrap();
        let cfg = RenormConfig::from_profile(&p);
        let r = newton_fixpoint(&cfg).unwrap();
        ball_from_newton(&r, &cfg, p.radius, true).unwrap()
    })
}

/// Certificate for [`fixed_ball`] at the profile depth.
pub fn fixed_cert(degree: u32) -> &'static MonotonicityCertificate {
    static CERTS: [OnceLock<MonotonicityCertificate>; 3] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CERTS[(degree - 2) as usize].get_or_init(|| {
        let depth = profile(degree).unwrap().max_depth;
        MonotonicityCertificate::build(fixed_ball(degree), depth).unwrap()
    })
}

/// Center polynomial and its first two derivatives in x, in plain floats.
pub fn center_derivs(ball: &FunctionBall, x: f64) -> [f64; 3] {
    let c = ball.center();
    let d = ball.degree() as i32;
    let rho = ball.rho();
    let (mut g, mut g1, mut g2) = (0.0, 0.0, 0.0);
    for (k, ck) in c.iter().enumerate() {
        let p = d * k as i32;
        let s = x.abs() / rho;
        g += ck * s.powi(p);
        if p >= 1 {
            g1 += ck * p as f64 * s.powi(p - 1) / rho * x.signum();
        }
        if p >= 2 {
            g2 += ck * (p * (p - 1)) as f64 * s.powi(p - 2) / (rho * rho);
        }
    }
    [g, g1, g2]
}

/// Exact dyadic rational `m * 2^e`.
#[derive(Clone, Debug)]
pub struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite());
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | (1 << 52), exp - 1075) };
        Dyadic { m: BigInt::from(m) * sign, e }
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        let e = self.e.min(o.e);
        let a = &self.m << (self.e - e) as usize;
        let b = &o.m << (o.e - e) as usize;
        Dyadic { m: a + b, e }
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic { m: &self.m * &o.m, e: self.e + o.e }
    }

    pub fn cmp(&self, o: &Dyadic) -> Ordering {
        let neg = Dyadic { m: -o.m.clone(), e: o.e };
        self.add(&neg).m.sign().cmp(&num_bigint::Sign::NoSign)
    }
}

/// Exact value `num / den` with `den > 0`.
pub struct Ratio {
    pub num: Dyadic,
    pub den: Dyadic,
}

impl Ratio {
    pub fn within(&self, x: Interval) -> bool {
        let lo = Dyadic::from_f64(x.lo()).mul(&self.den);
        let hi = Dyadic::from_f64(x.hi()).mul(&self.den);
        lo.cmp(&self.num) != Ordering::Greater && self.num.cmp(&hi) != Ordering::Greater
    }
}

/// Exact value of the center polynomial at `x` (point coefficients assumed):
/// with `X = |x|^d`, `R = rho^d`, the value is `sum c_k X^k R^(N-k) / R^N`.
pub fn center_value_exact(ball: &FunctionBall, x: f64) -> Ratio {
    let pow = |b: &Dyadic, k: u32| (0..k).fold(Dyadic::from_f64(1.0), |acc, _| acc.mul(b));
    let xd = pow(&Dyadic::from_f64(x.abs()), ball.degree());
    let rd = pow(&Dyadic::from_f64(ball.rho()), ball.degree());
    let coeffs = ball.coeffs();
    let n = coeffs.len() - 1;
    let mut acc = Dyadic::from_f64(coeffs[n].lo());
    let mut rk = Dyadic::from_f64(1.0);
    for c in coeffs[..n].iter().rev() {
        assert!(c.is_point());
        rk = rk.mul(&rd);
        acc = acc.mul(&xd).add(&Dyadic::from_f64(c.lo()).mul(&rk));
    }
    Ratio { num: acc, den: rk }
}
