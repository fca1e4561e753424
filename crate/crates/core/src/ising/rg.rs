//! One-loop RG flow of the Landau-Ginzburg couplings:
//! `dr~/dtau = 2 r~ - 3 r~ u~ + 3 u~`, `du~/dtau = (4-d) u~ - 9 u~^2`.

use super::correlation::{exponents_from_scaling, CriticalExponents};
use crate::numerics::rk4_advance;
use crate::{Error, Result};

/// A point of the dimensionless coupling flow.
#[derive(Debug, Clone, Copy)]
pub struct RgPoint {
    pub r: f64,
    pub u: f64,
    pub d: f64,
    pub tau: f64,
}

impl RgPoint {
    pub fn new(r: f64, u: f64, d: f64) -> Result<Self> {
        if !(d > 0.0 && d <= 4.0) {
            return Err(Error::Invalid(format!("dimension d = {d} outside (0, 4]")));
        }
        Ok(RgPoint { r, u, d, tau: 0.0 })
    }
}

fn rhs(d: f64, r: f64, u: f64) -> (f64, f64) {
    (2.0 * r - 3.0 * r * u + 3.0 * u, (4.0 - d) * u - 9.0 * u * u)
}

/// Integrate the flow from `start` to `tau_end`, sampling every step.
pub fn rg_flow(start: &RgPoint, tau_end: f64, step: f64) -> Result<Vec<RgPoint>> {
    if step <= 0.0 {
        return Err(Error::Invalid("step must be positive".into()));
    }
    let d = start.d;
    let n = ((tau_end - start.tau).abs() / step).ceil().max(1.0) as usize;
    let h = (tau_end - start.tau) / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    out.push(*start);
    let mut y = vec![start.r, start.u];
    let mut tau = start.tau;
    for _ in 0..n {
        y = rk4_advance(
            |_, y, dy| {
                let (fr, fu) = rhs(d, y[0], y[1]);
                dy[0] = fr;
                dy[1] = fu;
            },
            &y,
            tau,
            tau + h,
            h,
        )?;
        tau += h;
        out.push(RgPoint { r: y[0], u: y[1], d, tau });
    }
    Ok(out)
}

/// The two fixed points and the linearization at the nontrivial one.
#[derive(Debug, Clone, Copy)]
pub struct RgFixedPoints {
    pub gaussian: (f64, f64),
    /// `(r~_c, u~_c) = (-(4-d)/6, (4-d)/9)` (one-loop epsilon expansion)
    pub nontrivial: (f64, f64),
    pub linearization: RgLinearization,
}

/// Eigen-structure of the flow linearized at the nontrivial fixed point.
#[derive(Debug, Clone, Copy)]
pub struct RgLinearization {
    /// relevant (temperature-like) eigenvalue `2 - (4-d)/3`
    pub relevant: f64,
    /// irrelevant eigenvalue `-(4-d)`
    pub irrelevant: f64,
    /// correlation-length exponent estimate `nu = 1/relevant`
    pub nu: f64,
    /// one saddle direction grows, one decays (for d < 4)
    pub is_saddle: bool,
}

/// Fixed points of the one-loop flow in dimension `d`.
pub fn rg_fixed_points(d: f64) -> Result<RgFixedPoints> {
    if !(d > 0.0 && d <= 4.0) {
        return Err(Error::Invalid(format!("dimension d = {d} outside (0, 4]")));
    }
    let eps = 4.0 - d;
    let nontrivial = (-eps / 6.0, eps / 9.0);
    // Jacobian [[2 - 3u, 3 - 3r], [0, (4-d) - 18u]] is upper triangular
    let relevant = 2.0 - 3.0 * nontrivial.1;
    let irrelevant = eps - 18.0 * nontrivial.1;
    Ok(RgFixedPoints {
        gaussian: (0.0, 0.0),
        nontrivial,
        linearization: RgLinearization {
            relevant,
            irrelevant,
            nu: 1.0 / relevant,
            is_saddle: relevant > 0.0 && irrelevant < 0.0,
        },
    })
}

/// Exponent table at the nontrivial fixed point, from the linearized `nu`
/// with `eta = 0` at one loop.
pub fn rg_exponents(d: f64) -> Result<CriticalExponents> {
    let fp = rg_fixed_points(d)?;
    exponents_from_scaling(fp.linearization.nu, 0.0, d, false)
}

/// Exact stationary point of the truncated polynomial flow (Newton-refined);
/// differs from the epsilon-expansion closed form at `O((4-d)^2)`.
pub fn rg_flow_stationary_point(d: f64) -> (f64, f64) {
    let eps = 4.0 - d;
    let u = eps / 9.0; // exact root of the u equation
    let r = -3.0 * u / (2.0 - 3.0 * u);
    (r, u)
}
