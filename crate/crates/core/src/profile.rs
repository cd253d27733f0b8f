//! Bundled per-degree settings.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeProfile {
    pub degree: u32,
    /// Analyticity scale in x; the ball lives in u = (|x|/rho)^degree.
    pub rho: f64,
    /// Number of retained u-coefficients minus one.
    pub truncation: usize,
    /// Assumed l1 radius of the ball around the polynomial center.
    pub radius: f64,
    /// Seed for Newton: g(x) ~ 1 + seed_x_coeff * |x|^degree.
    pub seed_x_coeff: f64,
    pub max_depth: u32,
    pub newton_tol: f64,
    pub max_iters: usize,
    pub inverse_tol: f64,
    pub partition_tol: f64,
    pub generations: u32,
    /// Pieces of `I` tracked per IFS node for the contraction bounds.
    pub pieces: u32,
    /// Evaluation is allowed for |x| <= rho * t_max.
    pub t_max: f64,
}

pub const SUPPORTED_DEGREES: [u32; 3] = [2, 3, 4];

pub fn profile(degree: u32) -> Result<DegreeProfile> {
    let (rho, truncation, seed_x_coeff, max_depth) = match degree {
        2 => (1.25, 20, -1.5, 24),
        3 => (1.10, 40, -1.4, 24),
        4 => (1.02, 40, -1.6, 30),
        d => return Err(Error::Config(format!("degree {d} not in {{2, 3, 4}}"))),
    };
    Ok(DegreeProfile {
        degree,
        rho,
        truncation,
        radius: 1e-9,
        seed_x_coeff,
        max_depth,
        newton_tol: 1e-12,
        max_iters: 60,
        inverse_tol: 1e-14,
        partition_tol: 1e-12,
        generations: 20,
        pieces: 4,
        t_max: 0.999,
    })
}
