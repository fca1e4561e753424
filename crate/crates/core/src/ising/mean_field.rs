//! Mean-field family: ferromagnet, antiferromagnet, Bragg-Williams action
//! and the exact-entropy variational free energy.

use super::IsingParams;
use crate::numerics::{find_root, Tolerance};
use crate::{Error, Result};

/// All real solutions of `m = tanh((h + c eps m)/T)` plus the selected
/// stable branch.
#[derive(Debug, Clone)]
pub struct MeanFieldSolution {
    pub solutions: Vec<f64>,
    /// branch selected by the sign of `h` (positive branch at `h = +0`)
    pub magnetization: f64,
    /// true when `h == 0` and `T < Tc` (both minima degenerate)
    pub symmetry_broken: bool,
    /// energy per site `-(1/2) c eps m^2 - h m`
    pub energy_per_site: f64,
    /// heat capacity per site at fixed h, from the implicit derivative
    pub heat_capacity: f64,
    pub tc: f64,
}

fn self_consistency(m: f64, h: f64, t: f64, tc: f64) -> f64 {
    m - ((h + tc * m) / t).tanh()
}

/// Solve the self-consistent magnetization equation on `[-1, 1]`.
pub fn mean_field_magnetization(params: &IsingParams) -> Result<MeanFieldSolution> {
    let tc = params.tc_mean_field();
    let (h, t) = (params.h, params.t);
    let tol = Tolerance {
        abs: 1e-14,
        rel: 1e-14,
        max_evals: 300,
    };
    // scan for sign changes on a fine grid, refine each bracket
    let grid = 4000;
    let mut solutions = Vec::new();
    let mut prev_m = -1.0 - 1e-9;
    let mut prev_f = self_consistency(prev_m, h, t, tc);
    for i in 0..=grid {
        let m = -1.0 - 1e-9 + (2.0 + 2e-9) * i as f64 / grid as f64;
        let f = self_consistency(m, h, t, tc);
        if f == 0.0 {
            solutions.push(m);
        } else if prev_f * f < 0.0 {
            let root = find_root(|x| self_consistency(x, h, t, tc), (prev_m, m), tol)?;
            solutions.push(root);
        }
        prev_m = m;
        prev_f = f;
    }
    solutions.dedup_by(|a, b| (*a - *b).abs() < 1e-10);
    // stable branch: sign of h selects; at h = 0 below Tc report +branch and flag
    let symmetry_broken = h == 0.0 && t < tc && solutions.len() > 1;
    let magnetization = if h > 0.0 || (h == 0.0 && t < tc) {
        solutions.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    } else if h < 0.0 {
        solutions.iter().cloned().fold(f64::INFINITY, f64::min)
    } else {
        0.0
    };
    let m = magnetization;
    // dm/dT at fixed h from implicit differentiation:
    // m = tanh(u), u = (h + Tc m)/T
    let sech2 = 1.0 - m * m;
    let denom = 1.0 - sech2 * tc / t;
    let dm_dt = if denom.abs() < 1e-12 {
        0.0
    } else {
        -sech2 * (h + tc * m) / (t * t) / denom
    };
    let c_eps = tc; // c * eps
    let energy_per_site = -0.5 * c_eps * m * m - h * m;
    let heat_capacity = (-c_eps * m - h) * dm_dt;
    Ok(MeanFieldSolution {
        solutions,
        magnetization,
        symmetry_broken,
        energy_per_site,
        heat_capacity,
        tc,
    })
}

/// Antiferromagnetic mean-field state.
#[derive(Debug, Clone, Copy)]
pub struct AntiferroState {
    /// uniform magnetization `M = (Ma + Mb)/2`
    pub magnetization: f64,
    /// staggered order parameter `Ms = (Ma - Mb)/2`
    pub staggered: f64,
    /// susceptibility `1/(Tc + T cosh^2((Tc/T) Ms))`
    pub chi: f64,
    pub tc: f64,
}

/// Solve the coupled sublattice equations
/// `Ma = tanh((h - Tc Mb)/T)`, `Mb = tanh((h - Tc Ma)/T)`.
pub fn antiferro_mean_field(params: &IsingParams) -> Result<AntiferroState> {
    let tc = params.tc_mean_field();
    let (h, t) = (params.h, params.t);
    // damped fixed-point iteration from a staggered start
    let mut ma = 0.9;
    let mut mb = -0.9;
    for _ in 0..20_000 {
        let na = ((h - tc * mb) / t).tanh();
        let nb = ((h - tc * ma) / t).tanh();
        let (pa, pb) = (ma, mb);
        ma = 0.5 * ma + 0.5 * na;
        mb = 0.5 * mb + 0.5 * nb;
        if (ma - pa).abs() + (mb - pb).abs() < 1e-15 {
            break;
        }
    }
    let staggered = 0.5 * (ma - mb);
    let magnetization = 0.5 * (ma + mb);
    let chi = 1.0 / (tc + t * ((tc / t) * staggered).cosh().powi(2));
    Ok(AntiferroState {
        magnetization,
        staggered: staggered.abs(),
        chi,
        tc,
    })
}

/// Bragg-Williams quartic action per site:
/// `A(M)/N = (1/2)(1 - beta c eps) M^2 + M^4/12 - beta h M`.
pub fn bragg_williams_action(m: f64, params: &IsingParams) -> f64 {
    let beta = params.beta();
    let tc = params.tc_mean_field();
    0.5 * (1.0 - beta * tc) * m * m + m.powi(4) / 12.0 - beta * params.h * m
}

/// Exact-entropy variational free energy per site (no field term):
/// `A(T,M)/N = T[(1+M)/2 ln((1+M)/2) + (1-M)/2 ln((1-M)/2)] - (1/2) c eps M^2`.
pub fn bragg_williams_free_energy(t: f64, m: f64, c_eps: f64) -> Result<f64> {
    if m.abs() >= 1.0 {
        return Err(Error::Domain(format!("need |M| < 1, got {m}")));
    }
    let p = 0.5 * (1.0 + m);
    let q = 0.5 * (1.0 - m);
    let entropy_term = p * p.ln() + q * q.ln();
    Ok(t * entropy_term - 0.5 * c_eps * m * m)
}
