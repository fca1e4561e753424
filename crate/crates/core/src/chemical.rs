//! Chemical equilibrium with the Gibbs prescription.
//!
//! Boltzmann-form chemical potentials `mu = T ln(n/Z1)` turn the equilibrium
//! condition `sum_i nu_i mu_i = 0` into the law of mass action; the reaction
//! coordinate is found by bracketed root finding.

use crate::numerics::{find_root, Tolerance};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A species with its single-particle partition function `Z1` (evaluated by
/// the caller at the working `(T, V)`, possibly volume-carrying).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Species {
    pub name: String,
    pub z1: f64,
}

impl Species {
    pub fn new(name: impl Into<String>, z1: f64) -> Result<Self> {
        if !(z1 > 0.0) {
            return Err(Error::Invalid("Z1 must be positive".into()));
        }
        Ok(Species { name: name.into(), z1 })
    }

    /// Ideal-gas species: `Z1 = g0 (V/lambda_T^3) e^{-eps0/T}` with
    /// `lambda_T = sqrt(2 pi / (m T))`.
    pub fn ideal_gas(
        name: impl Into<String>,
        mass: f64,
        eps0: f64,
        g0: f64,
        t: f64,
        volume: f64,
    ) -> Result<Self> {
        let lambda3 = thermal_wavelength(mass, t).powi(3);
        Species::new(name, g0 * volume / lambda3 * (-eps0 / t).exp())
    }
}

/// `lambda_T = sqrt(2 pi/(m T))` (units `hbar = k_B = 1`).
pub fn thermal_wavelength(mass: f64, t: f64) -> f64 {
    (2.0 * std::f64::consts::PI / (mass * t)).sqrt()
}

/// A reaction: signed stoichiometric coefficients (products positive) and
/// initial particle counts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Reaction {
    pub species: Vec<Species>,
    /// name -> signed nu
    pub stoichiometry: BTreeMap<String, i64>,
    /// name -> initial count
    pub counts: BTreeMap<String, f64>,
}

impl Reaction {
    pub fn validate(&self) -> Result<()> {
        let mut pos = false;
        let mut neg = false;
        for sp in &self.species {
            let nu = *self
                .stoichiometry
                .get(&sp.name)
                .ok_or_else(|| Error::Invalid(format!("no stoichiometry for {}", sp.name)))?;
            pos |= nu > 0;
            neg |= nu < 0;
            let n0 = *self
                .counts
                .get(&sp.name)
                .ok_or_else(|| Error::Invalid(format!("no count for {}", sp.name)))?;
            if n0 < 0.0 {
                return Err(Error::Invalid("counts must be nonnegative".into()));
            }
        }
        if !(pos && neg) {
            return Err(Error::Invalid(
                "need at least one reactant and one product".into(),
            ));
        }
        Ok(())
    }
}

/// Equilibrium solution of a reaction.
#[derive(Debug, Clone)]
pub struct Equilibrium {
    /// continuous most-probable reaction coordinate
    pub coordinate: f64,
    /// equilibrium counts per species (continuous relaxation)
    pub counts: Vec<(String, f64)>,
    /// nearest integer counts, reported alongside
    pub rounded: Vec<(String, i64)>,
}

/// Solve `sum_i nu_i ln(n_i(x)/Z1_i) = 0` for the reaction coordinate.
///
/// The residual is monotone in `x`, so the root on the feasibility interval
/// (all counts positive) is unique.
pub fn equilibrium_coordinate(rx: &Reaction, tol: Tolerance) -> Result<Equilibrium> {
    rx.validate()?;
    let data: Vec<(f64, f64, f64)> = rx
        .species
        .iter()
        .map(|sp| {
            (
                rx.stoichiometry[&sp.name] as f64,
                rx.counts[&sp.name],
                sp.z1,
            )
        })
        .collect();
    // feasibility interval for x: n0 + nu x > 0 for every species
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for &(nu, n0, _) in &data {
        if nu > 0.0 {
            lo = lo.max(-n0 / nu);
        } else if nu < 0.0 {
            hi = hi.min(-n0 / nu);
        }
    }
    if !(lo < hi) {
        return Err(Error::Infeasible(format!("empty interval [{lo}, {hi}]")));
    }
    let width = hi - lo;
    let eps = (1e-14 * width.abs()).max(1e-300);
    let g = |x: f64| -> f64 {
        data.iter()
            .map(|&(nu, n0, z1)| {
                let n = (n0 + nu * x).max(1e-300);
                nu * (n / z1).ln()
            })
            .sum()
    };
    // g -> -inf at lo and +inf at hi; shrink endpoints inward until signs show
    let mut a = lo + eps;
    let mut b = hi - eps;
    let mut shrink = 0;
    while g(a) > 0.0 && shrink < 200 {
        a = lo + (a - lo) * 0.5;
        shrink += 1;
    }
    while g(b) < 0.0 && shrink < 400 {
        b = hi - (hi - b) * 0.5;
        shrink += 1;
    }
    let x = find_root(g, (a, b), tol)?;
    let counts: Vec<(String, f64)> = rx
        .species
        .iter()
        .map(|sp| {
            let nu = rx.stoichiometry[&sp.name] as f64;
            (sp.name.clone(), rx.counts[&sp.name] + nu * x)
        })
        .collect();
    let rounded = counts
        .iter()
        .map(|(n, v)| (n.clone(), v.round() as i64))
        .collect();
    Ok(Equilibrium { coordinate: x, counts, rounded })
}

/// Density product of a pair-creation equilibrium:
/// `n1 n2 = (V/lambda_T^3)^2 e^{-2 m c^2/T}`; for a symmetric initial state
/// each density is the square root.
pub fn pair_creation_density(mass: f64, rest_energy: f64, t: f64, volume: f64) -> Result<(f64, f64)> {
    if t <= 0.0 {
        return Err(Error::Invalid("temperature must be positive".into()));
    }
    let lambda3 = thermal_wavelength(mass, t).powi(3);
    let product = (volume / lambda3).powi(2) * (-2.0 * rest_energy / t).exp();
    Ok((product, product.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteKind {
    Fermi,
    Bose,
    Boltzmann,
}

/// Mean occupation of `M` equivalent sites with binding energy `eps` at
/// chemical potential `mu`.
pub fn site_occupation(kind: SiteKind, m: f64, eps: f64, mu: f64, t: f64) -> Result<f64> {
    let x = (eps - mu) / t;
    match kind {
        SiteKind::Fermi => Ok(m / (x.exp() + 1.0)),
        SiteKind::Bose => {
            if eps <= mu {
                return Err(Error::Domain(format!(
                    "Bose sites need eps > mu (got eps={eps}, mu={mu}): occupation diverges"
                )));
            }
            Ok((m - 1.0) / x.exp_m1())
        }
        SiteKind::Boltzmann => Ok(m * (-x).exp()),
    }
}

/// Chemical potential that produces mean occupation `n` on `M` sites.
pub fn site_mu(kind: SiteKind, m: f64, n: f64, eps: f64, t: f64) -> Result<f64> {
    match kind {
        SiteKind::Fermi => {
            if !(n > 0.0 && n < m) {
                return Err(Error::Domain(format!("Fermi sites need 0 < n < M, got n={n}")));
            }
            Ok(eps + t * (n / (m - n)).ln())
        }
        SiteKind::Bose => {
            if !(n > 0.0) {
                return Err(Error::Domain("Bose sites need n > 0".into()));
            }
            Ok(eps + t * (n / (m - 1.0 + n)).ln())
        }
        SiteKind::Boltzmann => {
            if !(n > 0.0) {
                return Err(Error::Domain("need n > 0".into()));
            }
            Ok(eps + t * (n / m).ln())
        }
    }
}
