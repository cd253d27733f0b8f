//! Rigorous bounds on the Hausdorff dimension of period-doubling attractors.
//!
//! The attractor is the limit set of the two-map iterated function system
//! `x -> x/alpha`, `x -> g^{-1}(x/alpha)` built from the renormalization
//! fixed point `g`. All bounds are computed in outward-rounded interval
//! arithmetic and hold whenever the supplied function ball contains `g`.

pub mod ball;
pub mod error;
pub mod hexfloat;
pub mod ifs;
pub mod interval;
pub mod inverse;
pub mod monotonicity;
pub mod partition;
pub mod profile;
pub mod renorm;
mod search;

pub use ball::{BallProvenance, FunctionBall, ProvenanceSource};
pub use error::{Error, Result};
pub use interval::Interval;

pub use monotonicity::MonotonicityCertificate;
pub use renorm::RenormConstants;

#[cfg(test)]
pub(crate) mod testutil;
