//! Ising model solvers and Landau-Ginzburg field-theory numerics.
//!
//! Exact 1D transfer matrix, the 2D Onsager integral, the mean-field family
//! (ferro, antiferro, Bragg-Williams), Lee-Yang zeros of small chains,
//! Ornstein-Zernike correlations, RG flow and critical-exponent relations.

mod correlation;
mod lee_yang;
mod mean_field;
mod one_d;
mod onsager;
mod rg;

pub use correlation::{ornstein_zernike_momentum, ornstein_zernike_real_3d, CriticalExponents};
pub use correlation::exponents_from_scaling;
pub use lee_yang::{evaluate_polynomial, lee_yang_zeros, partition_polynomial, Geometry};
pub use mean_field::{
    antiferro_mean_field, bragg_williams_action, bragg_williams_free_energy,
    mean_field_magnetization, AntiferroState, MeanFieldSolution,
};
pub use one_d::{ising1d_enumerate_ln_z, ising1d_solve, Ising1dSolution, TransferMatrix1D};
pub use onsager::{onsager2d, onsager2d_lnz_2dquad, onsager2d_tc, Onsager2d};
pub use rg::{rg_exponents, rg_fixed_points, rg_flow, rg_flow_stationary_point, RgFixedPoints, RgLinearization, RgPoint};

use crate::{Error, Result};

/// Parameters of an Ising computation. `coordination` only matters for the
/// mean-field family, `n_sites` for the finite-chain operations.
#[derive(Debug, Clone, Copy)]
pub struct IsingParams {
    /// bond coupling epsilon
    pub eps: f64,
    /// external field h
    pub h: f64,
    /// temperature
    pub t: f64,
    /// coordination number c (mean-field only)
    pub coordination: u32,
}

impl IsingParams {
    pub fn new(eps: f64, h: f64, t: f64, coordination: u32) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::Invalid("temperature must be positive".into()));
        }
        if coordination == 0 {
            return Err(Error::Invalid("coordination number must be >= 1".into()));
        }
        Ok(IsingParams { eps, h, t, coordination })
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.t
    }

    /// mean-field critical temperature `Tc = c eps`
    pub fn tc_mean_field(&self) -> f64 {
        self.coordination as f64 * self.eps
    }
}
