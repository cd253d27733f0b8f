use std::path::PathBuf;

use crate::interval::Interval;

/// Everything that can go wrong between loading a ball and printing a bound.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("division by an interval containing zero: {0}")]
    DivisionByZeroInterval(Interval),

    #[error("interval endpoint left the finite range")]
    Overflow,

    #[error("argument outside the function domain: {0}")]
    DomainError(String),

    #[error("evaluation argument {arg} exceeds the ball domain |x| <= {limit}")]
    DomainExceeded { arg: Interval, limit: f64 },

    #[error("{path}:{line}: field `{field}`: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        field: String,
        msg: String,
    },

    #[error("checksum mismatch: file says {expected}, content hashes to {actual}")]
    ChecksumMismatch { expected: String, actual: String },

    #[error("renormalization composition left the disk (inner value {inner} > {limit})")]
    CompositionDivergence { inner: f64, limit: f64 },

    #[error("Newton iteration did not converge after {iterations} steps (best residual {best_residual:e})")]
    NoConvergence {
        iterations: usize,
        best_residual: f64,
        best: Vec<f64>,
    },

    #[error("g(1) enclosure {0} contains zero")]
    SingularAlpha(Interval),

    #[error("sign undetermined on {subinterval} after depth {depth} (enclosure {enclosure})")]
    Inconclusive {
        subinterval: Interval,
        enclosure: Interval,
        depth: u32,
    },

    #[error("function is positive on {subinterval} (enclosure {enclosure})")]
    PositiveSignWitness {
        subinterval: Interval,
        enclosure: Interval,
    },

    #[error("inverse enclosure {x} cannot reach tolerance {tol:e}")]
    ToleranceUnreachable { x: Interval, tol: f64 },

    #[error("inverse query {y} outside the range of g on the certified domain")]
    RangeError { y: Interval },

    #[error("derivative enclosure {0} contains zero")]
    DerivativeContainsZero(Interval),

    #[error("endpoint order violated for node {sigma}: {left} vs {right}")]
    NodeOrderViolation {
        sigma: String,
        left: Interval,
        right: Interval,
    },

    #[error("contraction bounds out of (0,1) for node {sigma}: d = {d}, c = {c}")]
    ContractionViolation { sigma: String, d: f64, c: f64 },

    #[error("endpoint enclosure width {width:e} exceeds {limit:e} for node {sigma}")]
    WidthAbort {
        sigma: String,
        width: f64,
        limit: f64,
    },

    #[error("partition equation has no root in [0, 2]")]
    NoRoot,

    #[error("partition bisection stalled at width {0:e}")]
    ToleranceFloor(f64),

    #[error("certificate does not match the ball: {0}")]
    CertificateMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
