//! The two-map iterated function system on `I = [alpha^-1, 1]`,
//!
//! ```text
//! Psi0(x) = x / alpha            (order-reversing, constant derivative)
//! Psi1(x) = g^{-1}(x / alpha)    (order-preserving)
//! ```
//!
//! and the per-generation dimension brackets from the partition equations.
//!
//! Each node stores enclosures of the two endpoints of `I_sigma` together with
//! `|Psi_sigma'|` at the matching endpoints of `I`. Appending an outer symbol
//! multiplies in one new factor, evaluated at the node's endpoints. The
//! certificate makes `|Psi1'|` monotone on `I`, which gives two ways to bound
//! `|Psi_sigma'|` over `I` (see [`ContractionMethod`]).

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::ball::FunctionBall;
use crate::error::{Error, Result};
use crate::interval::rounding::{mul_down, mul_up};
use crate::interval::Interval;
use crate::inverse::MonotoneInverse;
use crate::monotonicity::{fundamental_interval, MonotonicityCertificate};
use crate::partition::{solve, PartitionSum, Side};
use crate::renorm::{alpha_of, RenormConstants};

/// Endpoint enclosures wider than this abort the run.
pub const WIDTH_LIMIT: f64 = 1e-8;
/// Longest word a node can carry.
pub const MAX_GENERATIONS: u32 = 63;

/// Word `a_{n-1} ... a_1 a_0`; bit `i` holds `a_i`, `a_0` being applied first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SymbolSequence {
    bits: u64,
    len: u8,
}

impl SymbolSequence {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(self) -> u32 {
        self.len as u32
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    /// Symbol applied at step `i` (0 = innermost).
    pub fn symbol(self, i: u32) -> u8 {
        assert!(i < self.len());
        ((self.bits >> i) & 1) as u8
    }

    /// `a sigma`: `a` applied after `sigma`.
    pub fn push_outer(self, a: u8) -> Self {
        assert!(a <= 1 && (self.len as u32) < MAX_GENERATIONS);
        SymbolSequence {
            bits: self.bits | ((a as u64) << self.len),
            len: self.len + 1,
        }
    }

    /// Drop the innermost symbol.
    pub fn drop_inner(self) -> Self {
        assert!(self.len > 0);
        SymbolSequence {
            bits: self.bits >> 1,
            len: self.len - 1,
        }
    }

    /// Parse a word written outermost first, e.g. `"01"` = `Psi0 o Psi1`.
    pub fn parse(s: &str) -> Option<Self> {
        s.bytes().try_fold(SymbolSequence::empty(), |acc, b| match b {
            b'0' | b'1' => Some(SymbolSequence {
                bits: (acc.bits << 1) | (b - b'0') as u64,
                len: acc.len.checked_add(1)?,
            }),
            _ => None,
        })
    }
}

impl fmt::Display for SymbolSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return f.write_str("()");
        }
        for i in (0..self.len()).rev() {
            write!(f, "{}", self.symbol(i))?;
        }
        Ok(())
    }
}

/// The image of one point of `I` under `Psi_sigma`, with `|Psi_sigma'|`
/// there. Each factor of the derivative is monotone along `I` with a known
/// direction, and the factors are also multiplied up by direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackedPoint {
    pub pt: Interval,
    /// Product of all factors.
    pub deriv: Interval,
    /// Product of the factors that are nondecreasing along `I`.
    pub rising: Interval,
    /// Product of the factors that are nonincreasing along `I`.
    pub falling: Interval,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IfsNode {
    pub sigma: SymbolSequence,
    /// Odd number of `Psi0` factors, so `Psi_sigma` reverses order.
    pub reversed: bool,
    /// Images of the grid points of `I`, in the order of `I`. The first and
    /// last are the images of the ends of `I`.
    pub track: Vec<TrackedPoint>,
}

impl IfsNode {
    fn left(&self) -> &TrackedPoint {
        let t = if self.reversed { self.track.last() } else { self.track.first() };
        t.expect("track has both ends")
    }

    fn right(&self) -> &TrackedPoint {
        let t = if self.reversed { self.track.first() } else { self.track.last() };
        t.expect("track has both ends")
    }

    /// Left end of `I_sigma`.
    pub fn left_pt(&self) -> Interval {
        self.left().pt
    }

    pub fn right_pt(&self) -> Interval {
        self.right().pt
    }

    /// `|Psi_sigma'|` at the end of `I` mapped to `left_pt`.
    pub fn deriv_left(&self) -> Interval {
        self.left().deriv
    }

    pub fn deriv_right(&self) -> Interval {
        self.right().deriv
    }

    /// Enclosure of `I_sigma`.
    pub fn hull(&self) -> Interval {
        self.left_pt().hull(self.right_pt())
    }

    pub fn max_endpoint_width(&self) -> f64 {
        self.track.iter().map(|t| t.pt.width()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractionBounds {
    /// Upper bound on `|Psi_sigma'|` over `I`.
    pub c_sigma: f64,
    /// Lower bound on `|Psi_sigma'|` over `I`.
    pub d_sigma: f64,
}

impl ContractionBounds {
    /// `[d_sigma, c_sigma]`, the form the partition solver takes.
    pub fn as_interval(self) -> Interval {
        Interval::new(self.d_sigma, self.c_sigma).expect("d <= c")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimensionBounds {
    pub generation: u32,
    /// Rigorous lower bound.
    pub r_n: f64,
    /// Rigorous upper bound.
    pub s_n: f64,
    pub node_count: usize,
    pub max_endpoint_width: f64,
    pub wall_time: Duration,
}

/// How `c_sigma` and `d_sigma` are read off a node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ContractionMethod {
    /// Max/min of the two endpoint derivatives of `Psi_sigma`. This is exact
    /// when all factors vary in the same direction, but a word mixing both
    /// maps can put an extremum of `|Psi_sigma'|` inside `I`.
    #[default]
    Endpoint,
    /// Each factor is monotone along `I` with a known direction, so on every
    /// piece between tracked points the rising and falling products are
    /// bounded by their values at the piece ends. Always valid; the slack
    /// shrinks as more pieces are tracked.
    Factorwise,
}

impl ContractionMethod {
    pub fn bounds(self, node: &IfsNode) -> Result<ContractionBounds> {
        match self {
            ContractionMethod::Endpoint => contraction_bounds(node),
            ContractionMethod::Factorwise => factorwise_bounds(node),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ContractionMethod::Endpoint => "endpoint",
            ContractionMethod::Factorwise => "factorwise",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "endpoint" => Some(ContractionMethod::Endpoint),
            "factorwise" => Some(ContractionMethod::Factorwise),
            _ => None,
        }
    }
}

/// Everything needed to apply the two maps.
pub struct IfsMaps<'a> {
    pub consts: RenormConstants,
    inverse: MonotoneInverse<'a>,
    pieces: u32,
}

impl<'a> IfsMaps<'a> {
    pub fn new(ball: &'a FunctionBall, cert: &MonotonicityCertificate, inverse_tol: f64) -> Result<Self> {
        let consts = alpha_of(ball)?;
        let inverse = MonotoneInverse::new(ball, cert)?.with_tol(inverse_tol);
        Ok(IfsMaps {
            consts,
            inverse,
            pieces: 1,
        })
    }

    /// Track `pieces + 1` equally spaced points of `I` instead of its ends only.
    pub fn with_pieces(mut self, pieces: u32) -> Result<Self> {
        if pieces == 0 {
            return Err(Error::Config("pieces must be at least 1".into()));
        }
        self.pieces = pieces;
        Ok(self)
    }

    pub fn pieces(&self) -> u32 {
        self.pieces
    }

    pub fn inverse(&self) -> &MonotoneInverse<'a> {
        &self.inverse
    }

    pub fn fundamental_interval(&self) -> Result<Interval> {
        fundamental_interval(&self.consts)
    }

    pub fn psi0(&self, x: Interval) -> Result<Interval> {
        self.consts.alpha_inv.checked_mul(x)
    }

    /// `|Psi0'|`, a constant.
    pub fn psi0_deriv(&self) -> Interval {
        self.consts.alpha_inv.abs()
    }

    pub fn psi1(&self, x: Interval) -> Result<Interval> {
        Ok(self.inverse.psi1_with_deriv(&self.consts, x)?.0)
    }

    /// `|Psi1'|` at `x`.
    pub fn psi1_deriv(&self, x: Interval) -> Result<Interval> {
        Ok(self.inverse.psi1_with_deriv(&self.consts, x)?.1)
    }

    /// `Psi_a(x)` and `|Psi_a'(x)|`.
    pub fn apply(&self, a: u8, x: Interval) -> Result<(Interval, Interval)> {
        if a == 0 {
            Ok((self.psi0(x)?, self.psi0_deriv()))
        } else {
            self.inverse.psi1_with_deriv(&self.consts, x)
        }
    }

    /// The tracked points of `I`: its two ends and `pieces - 1` points between.
    pub fn grid(&self) -> Vec<Interval> {
        let k = self.pieces;
        let lo = self.consts.alpha_inv;
        (0..=k)
            .map(|j| match j {
                0 => lo,
                j if j == k => Interval::ONE,
                j => Interval::point(lo.hi() + (1.0 - lo.hi()) * (j as f64 / k as f64)),
            })
            .collect()
    }

    /// Generation 0: `I` itself with unit derivatives.
    pub fn root(&self) -> Result<IfsNode> {
        Ok(IfsNode {
            sigma: SymbolSequence::empty(),
            reversed: false,
            track: self
                .grid()
                .into_iter()
                .map(|pt| TrackedPoint {
                    pt,
                    deriv: Interval::ONE,
                    rising: Interval::ONE,
                    falling: Interval::ONE,
                })
                .collect(),
        })
    }

    /// Apply `Psi_a` to one tracked point of a node with orientation `reversed`.
    fn step(&self, a: u8, reversed: bool, t: &TrackedPoint) -> Result<TrackedPoint> {
        let (pt, f) = self.apply(a, t.pt)?;
        // |Psi1'| decreases, so along I it falls where Psi_sigma preserves order
        let falls = a == 1 && !reversed;
        Ok(TrackedPoint {
            pt,
            deriv: f.checked_mul(t.deriv)?,
            rising: if falls { t.rising } else { f.checked_mul(t.rising)? },
            falling: if falls { f.checked_mul(t.falling)? } else { t.falling },
        })
    }

    /// The child `a sigma` of `node`.
    pub fn child(&self, node: &IfsNode, a: u8) -> Result<IfsNode> {
        let track = node
            .track
            .iter()
            .map(|t| self.step(a, node.reversed, t))
            .collect::<Result<Vec<_>>>()?;
        let child = IfsNode {
            sigma: node.sigma.push_outer(a),
            reversed: node.reversed ^ (a == 0),
            track,
        };
        self.validate(&child)?;
        Ok(child)
    }

    fn validate(&self, node: &IfsNode) -> Result<()> {
        // Once I_sigma is shorter than the enclosure floor the two endpoint
        // enclosures overlap; only an outright inversion is an error.
        if node.left_pt().lo() > node.right_pt().hi() {
            return Err(Error::NodeOrderViolation {
                sigma: node.sigma.to_string(),
                left: node.left_pt(),
                right: node.right_pt(),
            });
        }
        let width = node.max_endpoint_width();
        if width > WIDTH_LIMIT {
            return Err(Error::WidthAbort {
                sigma: node.sigma.to_string(),
                width,
                limit: WIDTH_LIMIT,
            });
        }
        Ok(())
    }

    /// Both children of every node, children of a node adjacent (`0` first).
    /// The first error in node order is returned.
    pub fn expand_generation(&self, nodes: &[IfsNode]) -> Result<Vec<IfsNode>> {
        let pairs: Vec<Result<[IfsNode; 2]>> = nodes
            .par_iter()
            .map(|n| Ok([self.child(n, 0)?, self.child(n, 1)?]))
            .collect();
        let mut out = Vec::with_capacity(2 * nodes.len());
        for p in pairs {
            out.extend(p?);
        }
        Ok(out)
    }

    /// The node for `sigma` recomputed from `I` by composing the maps
    /// innermost first. Used to cross-check the incremental bookkeeping.
    pub fn scratch_node(&self, sigma: SymbolSequence) -> Result<IfsNode> {
        let mut track = self.root()?.track;
        let mut reversed = false;
        for i in 0..sigma.len() {
            let a = sigma.symbol(i);
            for t in track.iter_mut() {
                *t = self.step(a, reversed, t)?;
            }
            reversed ^= a == 0;
        }
        let node = IfsNode {
            sigma,
            reversed,
            track,
        };
        self.validate(&node)?;
        Ok(node)
    }
}

/// `c_sigma` and `d_sigma` from the two endpoint derivative enclosures.
pub fn contraction_bounds(node: &IfsNode) -> Result<ContractionBounds> {
    let (l, r) = (node.deriv_left(), node.deriv_right());
    checked_bounds(node, l.hi().max(r.hi()), l.lo().min(r.lo()))
}

/// `c_sigma` and `d_sigma` piece by piece: between neighbouring tracked
/// points the rising product is largest at the right point and the falling
/// product at the left one.
pub fn factorwise_bounds(node: &IfsNode) -> Result<ContractionBounds> {
    let mut c = 0.0f64;
    let mut d = f64::INFINITY;
    for w in node.track.windows(2) {
        c = c.max(mul_up(w[1].rising.hi(), w[0].falling.hi()));
        d = d.min(mul_down(w[0].rising.lo(), w[1].falling.lo()));
    }
    checked_bounds(node, c, d)
}

fn checked_bounds(node: &IfsNode, c: f64, d: f64) -> Result<ContractionBounds> {
    if !(d > 0.0 && d <= c && c < 1.0) {
        return Err(Error::ContractionViolation {
            sigma: node.sigma.to_string(),
            d,
            c,
        });
    }
    Ok(ContractionBounds {
        c_sigma: c,
        d_sigma: d,
    })
}

/// Solve both partition equations for one generation.
pub fn bracket(bounds: &[ContractionBounds], tol: f64) -> Result<(f64, f64)> {
    let values: Vec<Interval> = bounds.iter().map(|b| b.as_interval()).collect();
    let r = solve(&PartitionSum::new(&values, Side::Lower)?, tol)?;
    let s = solve(&PartitionSum::new(&values, Side::Upper)?, tol)?;
    Ok((r, s))
}

#[derive(Debug)]
pub struct DimensionRun {
    pub rows: Vec<DimensionBounds>,
    /// Set when a rigor check stopped the run early; `rows` holds the
    /// generations completed before it.
    pub aborted: Option<Error>,
}

/// Settings of a [`dimension_run`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunParams {
    pub generations: u32,
    /// Pieces of `I` tracked per node.
    pub pieces: u32,
    pub inverse_tol: f64,
    pub partition_tol: f64,
    pub method: ContractionMethod,
}

/// Expand generation by generation up to `generations`, solving both
/// partition equations each time and handing every row to `on_row` as soon
/// as it is known.
pub fn dimension_run(
    ball: &FunctionBall,
    cert: &MonotonicityCertificate,
    params: RunParams,
    mut on_row: impl FnMut(&DimensionBounds),
) -> Result<DimensionRun> {
    let RunParams {
        generations,
        inverse_tol,
        partition_tol,
        method,
        pieces,
    } = params;
    if generations == 0 || generations > MAX_GENERATIONS {
        return Err(Error::Config(format!(
            "generations must lie in 1..={MAX_GENERATIONS}, got {generations}"
        )));
    }
    let maps = IfsMaps::new(ball, cert, inverse_tol)?.with_pieces(pieces)?;
    let mut nodes = vec![maps.root()?];
    let mut rows = Vec::new();
    for n in 1..=generations {
        let start = Instant::now();
        let step = maps.expand_generation(&nodes).and_then(|next| {
            let bounds: Vec<ContractionBounds> = next
                .par_iter()
                .map(|n| method.bounds(n))
                .collect::<Vec<_>>()
                .into_iter()
                .collect::<Result<_>>()?;
            let (r, s) = bracket(&bounds, partition_tol)?;
            Ok((next, r, s))
        });
        let (next, r_n, s_n) = match step {
            Ok(v) => v,
            Err(e) => {
                return Ok(DimensionRun {
                    rows,
                    aborted: Some(e),
                })
            }
        };
        nodes = next;
        let row = DimensionBounds {
            generation: n,
            r_n,
            s_n,
            node_count: nodes.len(),
            max_endpoint_width: nodes
                .par_iter()
                .map(IfsNode::max_endpoint_width)
                .reduce(|| 0.0, f64::max),
            wall_time: start.elapsed(),
        };
        on_row(&row);
        rows.push(row);
    }
    Ok(DimensionRun {
        rows,
        aborted: None,
    })
}
