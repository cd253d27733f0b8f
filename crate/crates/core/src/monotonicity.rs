//! Sign certificates for `g'` and `g''` on `J = [g(g(1)), 1]`, orbit
//! enclosures and rectangle coverings of the graphs.
//!
//! The certified region is `J` widened by [`DOMAIN_MARGIN`] on both sides, so
//! that preimages of slightly fattened targets still land where `g` is known to
//! be strictly decreasing.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ball::{sha256_tag, FunctionBall};
use crate::error::{Error, Result};
use crate::interval::{format_outward, Interval};
use crate::inverse::MonotoneInverse;
use crate::renorm::{alpha_of, RenormConstants};

/// Widening of `J` on each side.
pub const DOMAIN_MARGIN: f64 = 1.0 / 65536.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Derivative {
    First,
    Second,
}

impl Derivative {
    fn eval(self, ball: &FunctionBall, x: Interval) -> Result<Interval> {
        match self {
            Derivative::First => ball.eval_deriv(x),
            Derivative::Second => ball.eval_second_deriv(x),
        }
    }
}

/// One leaf of an adaptive cover.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverLeaf {
    pub subinterval: Interval,
    pub enclosure: Interval,
    pub depth: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignCover {
    /// Sorted by lower endpoint, sharing endpoints.
    pub leaves: Vec<CoverLeaf>,
    pub max_depth_used: u32,
}

/// Prove `f < 0` on `k` by adaptive midpoint bisection. The leftmost failure
/// is reported, so errors are independent of scheduling.
pub fn verify_sign_on(
    which: Derivative,
    ball: &FunctionBall,
    k: Interval,
    max_depth: u32,
) -> Result<SignCover> {
    let mut leaves = Vec::new();
    cover_rec(which, ball, k, 0, max_depth, &mut leaves)?;
    let max_depth_used = leaves.iter().map(|l| l.depth).max().unwrap_or(0);
    Ok(SignCover {
        leaves,
        max_depth_used,
    })
}

fn cover_rec(
    which: Derivative,
    ball: &FunctionBall,
    k: Interval,
    depth: u32,
    max_depth: u32,
    out: &mut Vec<CoverLeaf>,
) -> Result<()> {
    let enclosure = which.eval(ball, k)?;
    if enclosure.hi() < 0.0 {
        out.push(CoverLeaf {
            subinterval: k,
            enclosure,
            depth,
        });
        return Ok(());
    }
    if enclosure.lo() > 0.0 {
        return Err(Error::PositiveSignWitness {
            subinterval: k,
            enclosure,
        });
    }
    let (left, right) = k.split();
    if depth >= max_depth || left == k || right == k {
        return Err(Error::Inconclusive {
            subinterval: k,
            enclosure,
            depth,
        });
    }
    let mut right_leaves = Vec::new();
    let (l, r) = rayon::join(
        || cover_rec(which, ball, left, depth + 1, max_depth, out),
        || cover_rec(which, ball, right, depth + 1, max_depth, &mut right_leaves),
    );
    l?;
    r?;
    out.append(&mut right_leaves);
    Ok(())
}

/// `J = hull(g(g(1)), 1)`, after checking `alpha g(J) = I` at both endpoints.
pub fn compute_j(ball: &FunctionBall) -> Result<Interval> {
    let consts = alpha_of(ball)?;
    let gg1 = ball.eval(consts.alpha_inv)?;
    let j = gg1.hull(Interval::ONE);
    // alpha g(g(g(1))) = alpha^-1 and alpha g(1) = 1
    let slack = 1e-6;
    let low = consts.alpha.checked_mul(ball.eval(gg1)?)?;
    let high = consts.alpha.checked_mul(consts.alpha_inv)?;
    if !low.inflate(slack)?.overlaps(consts.alpha_inv) || !high.inflate(slack)?.contains(1.0) {
        return Err(Error::DomainError(format!(
            "alpha g(J) does not match I: alpha g(J.lo) = {low}, alpha g(1) = {high}"
        )));
    }
    Ok(j)
}

/// `J` widened by [`DOMAIN_MARGIN`] on each side.
pub fn widened(j: Interval) -> Result<Interval> {
    j.inflate(DOMAIN_MARGIN)
}

/// Enclosures of the critical orbit `g^k(0)`, `k = 0..count`. The
/// normalization `g(0) = 1` fixes the first iterate exactly, so `points[2]`
/// is the same enclosure of `alpha^-1` as `g(1)`.
pub fn orbit_enclosures(ball: &FunctionBall, count: usize) -> Result<Vec<Interval>> {
    if count < 2 {
        return Err(Error::Config(format!("orbit needs at least 2 points, got {count}")));
    }
    let mut pts = vec![Interval::ZERO, Interval::ONE];
    while pts.len() < count {
        let next = ball.eval(*pts.last().expect("nonempty"))?;
        pts.push(next);
    }
    Ok(pts)
}

/// Machine-checkable proof that `g' < 0` and `g'' < 0` on the widened `J`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityCertificate {
    pub degree_d: u32,
    pub ball_checksum: String,
    #[serde(rename = "J")]
    pub j: Interval,
    /// Region actually covered: `J` plus the margin.
    pub domain: Interval,
    pub gprime_negative: bool,
    pub gsecond_negative: bool,
    /// Leaves of the `g''` cover.
    pub cover: Vec<CoverLeaf>,
    /// Leaves of the `g'` cover.
    pub gprime_cover: Vec<CoverLeaf>,
    pub max_depth_used: u32,
    /// Lower bound on `|g'|` over the domain.
    pub min_abs_gprime: f64,
}

impl MonotonicityCertificate {
    /// Certify both signs; fails with the first inconclusive or positive leaf.
    pub fn build(ball: &FunctionBall, max_depth: u32) -> Result<Self> {
        let j = compute_j(ball)?;
        let domain = widened(j)?;
        let g1 = verify_sign_on(Derivative::First, ball, domain, max_depth)?;
        let g2 = verify_sign_on(Derivative::Second, ball, domain, max_depth)?;
        let min_abs_gprime = min_abs(&g1.leaves);
        Ok(MonotonicityCertificate {
            degree_d: ball.degree(),
            ball_checksum: ball.checksum(),
            j,
            domain,
            gprime_negative: true,
            gsecond_negative: true,
            max_depth_used: g1.max_depth_used.max(g2.max_depth_used),
            cover: g2.leaves,
            gprime_cover: g1.leaves,
            min_abs_gprime,
        })
    }

    /// Re-verify every claim against `ball`.
    pub fn check(&self, ball: &FunctionBall) -> Result<()> {
        let fail = |msg: String| Err(Error::CertificateMismatch(msg));
        let actual = ball.checksum();
        if actual != self.ball_checksum {
            return fail(format!(
                "certificate is for ball {}, not {actual}",
                self.ball_checksum
            ));
        }
        if self.degree_d != ball.degree() {
            return fail(format!("degree {} vs ball degree {}", self.degree_d, ball.degree()));
        }
        if !(self.gprime_negative && self.gsecond_negative) {
            return fail("certificate does not claim both signs".into());
        }
        let j = compute_j(ball)?;
        if j != self.j || widened(j)? != self.domain {
            return fail(format!("J recomputes to {j}, certificate has {}", self.j));
        }
        for (name, leaves, which) in [
            ("g'", &self.gprime_cover, Derivative::First),
            ("g''", &self.cover, Derivative::Second),
        ] {
            check_contiguous(leaves, self.domain)
                .map_err(|m| Error::CertificateMismatch(format!("{name} cover: {m}")))?;
            for leaf in leaves {
                let e = which.eval(ball, leaf.subinterval)?;
                if e != leaf.enclosure || e.hi() >= 0.0 {
                    return fail(format!(
                        "{name} leaf {} re-evaluates to {e}",
                        leaf.subinterval
                    ));
                }
            }
        }
        if min_abs(&self.gprime_cover) != self.min_abs_gprime {
            return fail("min |g'| does not match the cover".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    /// Digest of the saved form.
    pub fn checksum(&self) -> String {
        sha256_tag(self.to_json().as_bytes())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

fn min_abs(leaves: &[CoverLeaf]) -> f64 {
    leaves
        .iter()
        .map(|l| l.enclosure.mig())
        .fold(f64::INFINITY, f64::min)
}

fn check_contiguous(leaves: &[CoverLeaf], domain: Interval) -> std::result::Result<(), String> {
    let (Some(first), Some(last)) = (leaves.first(), leaves.last()) else {
        return Err("empty cover".into());
    };
    if first.subinterval.lo() != domain.lo() || last.subinterval.hi() != domain.hi() {
        return Err(format!("cover does not span {domain}"));
    }
    for w in leaves.windows(2) {
        if w[0].subinterval.hi() != w[1].subinterval.lo() {
            return Err(format!("gap between {} and {}", w[0].subinterval, w[1].subinterval));
        }
    }
    Ok(())
}

/// Graphs that can be covered by rectangles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Panel {
    G,
    GPrime,
    GSecond,
    Psi0,
    Psi1,
    Psi0Prime,
    Psi1Prime,
}

impl Panel {
    pub const ALL: [Panel; 7] = [
        Panel::G,
        Panel::GPrime,
        Panel::GSecond,
        Panel::Psi0,
        Panel::Psi1,
        Panel::Psi0Prime,
        Panel::Psi1Prime,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Panel::G => "g",
            Panel::GPrime => "gprime",
            Panel::GSecond => "gsecond",
            Panel::Psi0 => "psi0",
            Panel::Psi1 => "psi1",
            Panel::Psi0Prime => "psi0prime",
            Panel::Psi1Prime => "psi1prime",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rectangle {
    pub x: Interval,
    pub y: Interval,
    pub tag: String,
}

/// Cover the graph of `which` with `grid` rectangles `X x f(X)`. `g` is drawn
/// on `[-1, 1]`, its derivatives on `J`, the IFS maps on `I`. The `Psi1`
/// panels use the monotonicity in the certificate: `Psi1` is increasing and
/// `|Psi1'|` decreasing, so endpoint enclosures bound each strip.
pub fn emit_cover_rectangles(
    ball: &FunctionBall,
    cert: &MonotonicityCertificate,
    which: Panel,
    grid: usize,
) -> Result<Vec<Rectangle>> {
    if grid == 0 {
        return Err(Error::Config("grid must be at least 1".into()));
    }
    let consts = alpha_of(ball)?;
    let fund = fundamental_interval(&consts)?;
    let domain = match which {
        Panel::G => Interval::new(-1.0, 1.0)?,
        Panel::GPrime | Panel::GSecond => cert.j,
        _ => fund,
    };
    let inverse = match which {
        Panel::Psi1 | Panel::Psi1Prime => Some(MonotoneInverse::new(ball, cert)?),
        _ => None,
    };
    let strips = grid_strips(domain, grid)?;
    let mut out = Vec::with_capacity(grid);
    for x in strips {
        let y = match which {
            Panel::G => ball.eval(x)?,
            Panel::GPrime => ball.eval_deriv(x)?,
            Panel::GSecond => ball.eval_second_deriv(x)?,
            Panel::Psi0 => consts.alpha_inv.checked_mul(x)?,
            Panel::Psi0Prime => consts.alpha_inv,
            Panel::Psi1 | Panel::Psi1Prime => {
                let inv = inverse.as_ref().expect("built above");
                let (a, da) = inv.psi1_with_deriv(&consts, Interval::point(x.lo()))?;
                let (b, db) = inv.psi1_with_deriv(&consts, Interval::point(x.hi()))?;
                if which == Panel::Psi1 {
                    a.hull(b)
                } else {
                    da.hull(db)
                }
            }
        };
        out.push(Rectangle {
            x,
            y,
            tag: which.tag().to_string(),
        });
    }
    Ok(out)
}

/// Rectangles from the adaptive `g''` cover, refined where the sign is delicate.
pub fn certificate_rectangles(cert: &MonotonicityCertificate) -> Vec<Rectangle> {
    cert.cover
        .iter()
        .map(|l| Rectangle {
            x: l.subinterval,
            y: l.enclosure,
            tag: "gsecond_cover".into(),
        })
        .collect()
}

/// `I = [alpha^-1, 1]`, with the lower end enclosing `alpha^-1`.
pub fn fundamental_interval(consts: &RenormConstants) -> Result<Interval> {
    Interval::new(consts.alpha_inv.lo(), 1.0)
}

/// `grid` strips with shared endpoints, covering `domain` exactly.
fn grid_strips(domain: Interval, grid: usize) -> Result<Vec<Interval>> {
    let (a, b) = (domain.lo(), domain.hi());
    let mut cuts: Vec<f64> = (0..=grid)
        .map(|i| a + (b - a) * (i as f64 / grid as f64))
        .collect();
    cuts[0] = a;
    cuts[grid] = b;
    cuts.windows(2).map(|w| Interval::new(w[0], w[1].max(w[0]))).collect()
}

/// CSV with columns `x_lo,x_hi,y_lo,y_hi,tag,degree`; numbers are rounded
/// outward to 17 significant digits.
pub fn rectangles_csv(rects: &[Rectangle], degree: u32) -> String {
    let mut s = String::from("x_lo,x_hi,y_lo,y_hi,tag,degree\n");
    for r in rects {
        let x = format_outward(r.x, 17);
        let y = format_outward(r.y, 17);
        s.push_str(&format!("{},{},{},{},{},{}\n", x.lo, x.hi, y.lo, y.hi, r.tag, degree));
    }
    s
}

#[cfg(test)]
mod tests;
