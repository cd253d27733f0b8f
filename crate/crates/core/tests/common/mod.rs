#![allow(dead_code)]

use std::cmp::Ordering;
use std::sync::OnceLock;

use feigdim::monotonicity::MonotonicityCertificate;
use feigdim::profile::profile;
use feigdim::renorm::{ball_from_newton, newton_fixpoint, RenormConfig};
use feigdim::FunctionBall;
use num_bigint::{BigInt, Sign};

pub const REFERENCE: [(u32, f64); 3] = [(2, 0.538_045_143_580_549_9), (3, 0.606), (4, 0.642_575_065)];

pub fn fixed_ball(degree: u32) -> &'static FunctionBall {
    static BALLS: [OnceLock<FunctionBall>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    BALLS[(degree - 2) as usize].get_or_init(|| {
        let p = profile(degree).unwrap();
        let cfg = RenormConfig::from_profile(&p);
        let r = newton_fixpoint(&cfg).unwrap();
        ball_from_newton(&r, &cfg, p.radius, true).unwrap()
    })
}

pub fn fixed_cert(degree: u32) -> &'static MonotonicityCertificate {
    static CERTS: [OnceLock<MonotonicityCertificate>; 3] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CERTS[(degree - 2) as usize].get_or_init(|| {
        let depth = profile(degree).unwrap().max_depth;
        MonotonicityCertificate::build(fixed_ball(degree), depth).unwrap()
    })
}

/// Exact `m * 2^e`.
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
        Dyadic {
            m: (&self.m << (self.e - e) as usize) + (&o.m << (o.e - e) as usize),
            e,
        }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { m: -self.m.clone(), e: self.e }
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic { m: &self.m * &o.m, e: self.e + o.e }
    }

    pub fn cmp(&self, o: &Dyadic) -> Ordering {
        match self.add(&o.neg()).m.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    pub fn le(&self, o: &Dyadic) -> bool {
        self.cmp(o) != Ordering::Greater
    }
}
