//! Canonical-ensemble engine: partition functions from spectra and the
//! standard catalog of exactly solvable systems.
//!
//! Observables come from analytic ensemble sums (`E`, `Var(E)` as weighted
//! moments), never from numerical differentiation of `ln Z`.

use crate::numerics::{integrate, RandomStream, Tolerance};
use crate::{Error, Result};

/// Discrete energy levels with degeneracies.
#[derive(Debug, Clone)]
pub struct LevelSpectrum {
    pub levels: Vec<(f64, u64)>,
    pub label: Option<String>,
}

impl LevelSpectrum {
    pub fn new(levels: Vec<(f64, u64)>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::EmptyInput);
        }
        for &(e, g) in &levels {
            if !e.is_finite() {
                return Err(Error::Invalid("non-finite level energy".into()));
            }
            if g == 0 {
                return Err(Error::Invalid("degeneracy must be >= 1".into()));
            }
        }
        Ok(LevelSpectrum { levels, label: None })
    }

    /// Truncated harmonic oscillator: `E_n = (n + 1/2) omega`, `n < n_levels`.
    pub fn oscillator(omega: f64, n_levels: usize) -> Self {
        LevelSpectrum {
            levels: (0..n_levels)
                .map(|n| ((n as f64 + 0.5) * omega, 1))
                .collect(),
            label: Some("oscillator".into()),
        }
    }

    /// Spin-1/2 in a field: levels at +/- eps/2.
    pub fn two_level(eps: f64) -> Self {
        LevelSpectrum {
            levels: vec![(-0.5 * eps, 1), (0.5 * eps, 1)],
            label: Some("two-level".into()),
        }
    }

    /// Two coupled spins: singlet at -3 eps, triplet at +eps.
    pub fn two_spins(eps: f64) -> Self {
        LevelSpectrum {
            levels: vec![(-3.0 * eps, 1), (eps, 3)],
            label: Some("two-spins".into()),
        }
    }

    /// Parse the CSV spectrum format with header `energy,degeneracy`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut levels = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if i == 0 && line.to_lowercase().starts_with("energy") {
                continue;
            }
            let mut parts = line.split(',');
            let e: f64 = parts
                .next()
                .ok_or_else(|| Error::Invalid(format!("line {i}: missing energy")))?
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("line {i}: bad energy")))?;
            let g: u64 = parts
                .next()
                .map(|s| s.trim().parse())
                .transpose()
                .map_err(|_| Error::Invalid(format!("line {i}: bad degeneracy")))?
                .unwrap_or(1);
            levels.push((e, g));
        }
        LevelSpectrum::new(levels)
    }
}

/// Power-law density of states `g(eps) = c V eps^{alpha-1}` for `eps >= 0`.
#[derive(Debug, Clone, Copy)]
pub struct PowerLawDos {
    pub c: f64,
    pub alpha: f64,
    pub volume: f64,
}

impl PowerLawDos {
    pub fn new(c: f64, alpha: f64, volume: f64) -> Result<Self> {
        if c <= 0.0 || alpha <= 0.0 || volume <= 0.0 {
            return Err(Error::Invalid("PowerLawDos requires c, alpha, V > 0".into()));
        }
        Ok(PowerLawDos { c, alpha, volume })
    }

    /// `g(eps)` per the power law (zero below the band bottom).
    pub fn density(&self, eps: f64) -> f64 {
        if eps < 0.0 {
            0.0
        } else {
            self.c * self.volume * eps.powf(self.alpha - 1.0)
        }
    }

    /// Counting function `N(eps) = eps g(eps) / alpha`.
    pub fn counting(&self, eps: f64) -> f64 {
        if eps <= 0.0 {
            0.0
        } else {
            eps * self.density(eps) / self.alpha
        }
    }

    /// Non-relativistic particles in a 3D box: `alpha = 3/2`,
    /// `c = g_s (2m)^{3/2}/(4 pi^2)`.
    pub fn box3d(mass: f64, spin_degeneracy: f64, volume: f64) -> Self {
        PowerLawDos {
            c: spin_degeneracy * (2.0 * mass).powf(1.5) / (4.0 * std::f64::consts::PI.powi(2)),
            alpha: 1.5,
            volume,
        }
    }
}

/// Evaluation point: inverse temperature and optional control parameters.
#[derive(Debug, Clone)]
pub struct ThermoPoint {
    pub beta: f64,
    pub x: Vec<f64>,
}

impl ThermoPoint {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Invalid(format!("beta must be positive, got {beta}")));
        }
        Ok(ThermoPoint { beta, x: Vec::new() })
    }

    pub fn from_temperature(t: f64) -> Result<Self> {
        Self::new(1.0 / t)
    }

    pub fn temperature(&self) -> f64 {
        1.0 / self.beta
    }
}

/// Observables of a canonical state. `F = E - T S` holds exactly;
/// `Var(E) = T^2 C` by construction of the analytic sums.
#[derive(Debug, Clone, Copy)]
pub struct ThermoObservables {
    pub ln_z: f64,
    pub free_energy: f64,
    pub energy: f64,
    pub entropy: f64,
    pub heat_capacity: f64,
    pub var_energy: f64,
}

/// Canonical partition function and observables for a discrete spectrum.
///
/// The ground-state energy is factored out before exponentiation, so
/// arbitrarily shifted spectra are safe.
pub fn partition(spec: &LevelSpectrum, pt: &ThermoPoint) -> Result<ThermoObservables> {
    let beta = pt.beta;
    let e_min = spec
        .levels
        .iter()
        .map(|&(e, _)| e)
        .fold(f64::INFINITY, f64::min);
    let e_max = spec
        .levels
        .iter()
        .map(|&(e, _)| e)
        .fold(f64::NEG_INFINITY, f64::max);
    if beta * (e_max - e_min) > 700.0 {
        // terms beyond the exponent range vanish at double precision; error
        // only if their total weight could actually matter
        let dropped: f64 = spec
            .levels
            .iter()
            .filter(|&&(e, _)| beta * (e - e_min) > 700.0)
            .map(|&(_, g)| g as f64)
            .sum();
        if dropped * 1e-304 > 1e-30 {
            return Err(Error::OverflowGuard(format!(
                "beta * spectral width = {} with non-negligible truncated weight",
                beta * (e_max - e_min)
            )));
        }
    }
    let mut z = 0.0;
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for &(e, g) in &spec.levels {
        let w = g as f64 * (-beta * (e - e_min)).exp();
        z += w;
        m1 += w * e;
        m2 += w * e * e;
    }
    let ln_z = z.ln() - beta * e_min;
    let energy = m1 / z;
    let var_energy = (m2 / z - energy * energy).max(0.0);
    let heat_capacity = beta * beta * var_energy;
    let free_energy = -ln_z / beta;
    let entropy = beta * (energy - free_energy);
    Ok(ThermoObservables {
        ln_z,
        free_energy,
        energy,
        entropy,
        heat_capacity,
        var_energy,
    })
}

/// Occupation probabilities `p_r = g_r e^{-beta E_r} / Z` per level.
pub fn level_probabilities(spec: &LevelSpectrum, pt: &ThermoPoint) -> Vec<f64> {
    let beta = pt.beta;
    let e_min = spec
        .levels
        .iter()
        .map(|&(e, _)| e)
        .fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = spec
        .levels
        .iter()
        .map(|&(e, g)| g as f64 * (-beta * (e - e_min)).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / z).collect()
}

/// Closed-form harmonic oscillator: `Z = 1/(2 sinh(beta omega / 2))`.
pub fn oscillator_observables(omega: f64, pt: &ThermoPoint) -> Result<ThermoObservables> {
    if !(omega > 0.0) {
        return Err(Error::Invalid("omega must be positive".into()));
    }
    let x = pt.beta * omega;
    let ln_z = -(2.0 * (0.5 * x).sinh()).ln();
    let energy = 0.5 * omega / (0.5 * x).tanh();
    // C = (x/2)^2 / sinh^2(x/2) = x^2 e^x/(e^x - 1)^2
    let heat_capacity = (0.5 * x / (0.5 * x).sinh()).powi(2);
    Ok(closed_form(pt, ln_z, energy, heat_capacity))
}

/// Closed-form spin (levels 0 and omega): `Z = 1 + e^{-beta omega}`.
pub fn spin_observables(omega: f64, pt: &ThermoPoint) -> Result<ThermoObservables> {
    if !(omega > 0.0) {
        return Err(Error::Invalid("omega must be positive".into()));
    }
    let x = pt.beta * omega;
    let ln_z = (-x).exp().ln_1p();
    let f = 1.0 / (x.exp() + 1.0);
    let energy = omega * f;
    let heat_capacity = x * x * x.exp() * f * f;
    Ok(closed_form(pt, ln_z, energy, heat_capacity))
}

fn closed_form(pt: &ThermoPoint, ln_z: f64, energy: f64, heat_capacity: f64) -> ThermoObservables {
    let free_energy = -ln_z / pt.beta;
    ThermoObservables {
        ln_z,
        free_energy,
        energy,
        entropy: pt.beta * (energy - free_energy),
        heat_capacity,
        var_energy: heat_capacity / (pt.beta * pt.beta),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OccupationKind {
    Fermi,
    Bose,
}

/// Mean occupation, its variance `[1 -/+ f] f`, and the bunching parameter
/// `g2 = (<n^2> - <n>)/<n>^2` for a single mode at `x = beta omega`.
pub fn occupation_stats(kind: OccupationKind, x: f64) -> Result<(f64, f64, f64)> {
    match kind {
        OccupationKind::Bose => {
            if x <= 0.0 {
                return Err(Error::Domain(format!(
                    "Bose occupation needs beta*omega > 0, got {x}"
                )));
            }
            let n = 1.0 / x.exp_m1();
            let var = (1.0 + n) * n;
            // <n^2> - <n> = var + n^2 - n = 2 n^2 exactly
            Ok((n, var, 2.0))
        }
        OccupationKind::Fermi => {
            let n = 1.0 / (x.exp() + 1.0);
            let var = (1.0 - n) * n;
            Ok((n, var, 0.0))
        }
    }
}

/// Heat capacity per mode-constant of a spectral density `~ omega^{alpha-1}`
/// with cutoff `omega_c`:
/// `C = T^alpha F(omega_c/T)`, `F(nu) = int_0^nu e^x/(e^x-1)^2 x^{1+alpha} dx`.
pub fn debye_heat_capacity(alpha: f64, omega_c: f64, t: f64, tol: Tolerance) -> Result<f64> {
    if alpha <= 0.0 || omega_c <= 0.0 || t <= 0.0 {
        return Err(Error::Invalid("debye: alpha, omega_c, T must be > 0".into()));
    }
    let nu = omega_c / t;
    let f = integrate(
        |x: f64| {
            if x <= 0.0 {
                return 0.0;
            }
            if x < 1e-8 {
                return x.powf(alpha - 1.0);
            }
            let s = 0.5 * x / (0.5 * x).sinh();
            s * s * x.powf(alpha - 1.0)
        },
        0.0,
        nu.min(80.0),
        tol,
    )?;
    Ok(t.powf(alpha) * f)
}

/// Equipartition: each quadratic degree of freedom carries `T/2`.
pub fn classical_quadratic_energy(n_dof: usize, t: f64) -> f64 {
    0.5 * n_dof as f64 * t
}

/// Classical configuration-space model for the equipartition check.
pub struct PhaseSpaceModel<H, G>
where
    H: Fn(&[f64]) -> f64,
    G: Fn(&[f64], &mut [f64]),
{
    pub dim: usize,
    pub energy: H,
    pub gradient: G,
}

/// Monte Carlo estimate of `max_ij | <q_i dH/dq_j> - T delta_ij |` in the
/// canonical state, by random-walk Metropolis sampling.
pub fn generalized_equipartition_check<H, G>(
    model: &PhaseSpaceModel<H, G>,
    t: f64,
    n_samples: usize,
    stream: &mut RandomStream,
) -> f64
where
    H: Fn(&[f64]) -> f64,
    G: Fn(&[f64], &mut [f64]),
{
    let d = model.dim;
    let mut q = vec![0.0; d];
    let mut grad = vec![0.0; d];
    let mut e = (model.energy)(&q);
    let step = t.sqrt();
    let mut acc = vec![0.0; d * d];
    let burn = n_samples / 5;
    let mut kept = 0usize;
    for it in 0..n_samples + burn {
        let k = stream.below(d);
        let old = q[k];
        q[k] += step * (2.0 * stream.uniform() - 1.0);
        let e_new = (model.energy)(&q);
        if e_new <= e || stream.uniform() < ((e - e_new) / t).exp() {
            e = e_new;
        } else {
            q[k] = old;
        }
        if it >= burn {
            (model.gradient)(&q, &mut grad);
            for i in 0..d {
                for j in 0..d {
                    acc[i * d + j] += q[i] * grad[j];
                }
            }
            kept += 1;
        }
    }
    let mut max_resid = 0.0_f64;
    for i in 0..d {
        for j in 0..d {
            let mean = acc[i * d + j] / kept as f64;
            let target = if i == j { t } else { 0.0 };
            max_resid = max_resid.max((mean - target).abs());
        }
    }
    max_resid
}

/// Generalized force `y(X) = (1/beta) d ln Z/dX` from a caller-supplied
/// `ln Z(X)`, by Richardson-controlled central differences.
pub fn generalized_force<F>(ln_z: F, pt: &ThermoPoint, x: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let scale = x.abs().max(1.0);
    let h = 1e-4 * scale;
    let d1 = (ln_z(x + h) - ln_z(x - h)) / (2.0 * h);
    let d2 = (ln_z(x + 0.5 * h) - ln_z(x - 0.5 * h)) / h;
    let extrap = (4.0 * d2 - d1) / 3.0;
    let noise = (d2 - d1).abs();
    if noise > 0.5 * extrap.abs() && noise > 1e-10 / h {
        return Err(Error::Step(format!(
            "finite-difference noise dominates: d1={d1}, d2={d2}"
        )));
    }
    Ok(extrap / pt.beta)
}
