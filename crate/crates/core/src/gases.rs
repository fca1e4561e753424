//! Grand-canonical ideal quantum gases with a power-law density of states.
//!
//! State equations in the form `N/V = c T^alpha F_alpha(z)`,
//! `E/V = c T^{alpha+1} F_{alpha+1}(z)`, `P = (1/alpha) E/V`, where
//! `F_alpha(z) = +/- Gamma(alpha) Li_alpha(+/- z)` and `z = e^{beta mu}`.

use crate::ensembles::PowerLawDos;
use crate::numerics::{find_root, integrate, Tolerance};
use crate::special::{fermi_polylog_exp, gamma, polylog, zeta};
use crate::{Error, Result};

pub use crate::special::polylog as li;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GasKind {
    Bose,
    Fermi,
    Boltzmann,
}

/// Intensive state of the gas at one `(T, mu)` point.
#[derive(Debug, Clone, Copy)]
pub struct GasState {
    pub n: f64,
    pub e: f64,
    pub pressure: f64,
    pub mu: f64,
    pub fugacity: f64,
    pub condensate_fraction: f64,
}

/// `F_alpha(z)` via the Gamma * polylog closed form.
///
/// For the Fermi branch the fugacity may be any positive number; the Bose
/// branch requires `0 <= z <= 1`.
pub fn f_integral(alpha: f64, z: f64, kind: GasKind) -> Result<f64> {
    if z < 0.0 {
        return Err(Error::Domain(format!("fugacity must be nonnegative, got {z}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    f_integral_ln(alpha, z.ln(), kind)
}

/// [`f_integral`] parameterised by `ln z = beta mu`, which stays finite for
/// degenerate Fermi systems where the fugacity itself overflows.
pub fn f_integral_ln(alpha: f64, ln_z: f64, kind: GasKind) -> Result<f64> {
    match kind {
        GasKind::Bose => {
            if ln_z > 0.0 {
                return Err(Error::Domain(format!("Bose fugacity e^{ln_z} > 1")));
            }
            Ok(gamma(alpha) * polylog(alpha, ln_z.exp())?)
        }
        GasKind::Fermi => Ok(gamma(alpha) * fermi_polylog_exp(alpha, ln_z)),
        GasKind::Boltzmann => Ok(gamma(alpha) * ln_z.exp()),
    }
}

/// `F_alpha(z)` by direct quadrature of
/// `int_0^inf x^{alpha-1} / (e^x/z -/+ 1) dx`; cross-validation route for
/// [`f_integral`].
pub fn f_integral_quadrature(alpha: f64, z: f64, kind: GasKind, tol: Tolerance) -> Result<f64> {
    if z < 0.0 {
        return Err(Error::Domain("fugacity must be nonnegative".into()));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let ln_z = z.ln();
    let sign = match kind {
        GasKind::Bose => {
            if z > 1.0 {
                return Err(Error::Domain(format!("Bose fugacity {z} > 1")));
            }
            -1.0
        }
        GasKind::Fermi => 1.0,
        GasKind::Boltzmann => 0.0,
    };
    let f = |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        let e = x - ln_z;
        let occ = if sign == 0.0 {
            (-e).exp()
        } else if e > 0.0 {
            let w = (-e).exp();
            w / (1.0 + sign * w)
        } else {
            1.0 / (e.exp() + sign)
        };
        x.powf(alpha - 1.0) * occ
    };
    if ln_z > 0.5 {
        let head = integrate(f, 0.0, ln_z, tol)?;
        let tail = integrate(f, ln_z, f64::INFINITY, tol)?;
        Ok(head + tail)
    } else {
        integrate(f, 0.0, f64::INFINITY, tol)
    }
}

/// Densities, pressure and fugacity for given `(T, mu)`.
pub fn state_equations(dos: &PowerLawDos, t: f64, mu: f64, kind: GasKind) -> Result<GasState> {
    if t <= 0.0 {
        return Err(Error::Invalid("temperature must be positive".into()));
    }
    if kind == GasKind::Bose && mu > 0.0 {
        return Err(Error::Domain(format!("Bose gas requires mu <= 0, got {mu}")));
    }
    let ln_z = mu / t;
    let n = dos.c * t.powf(dos.alpha) * f_integral_ln(dos.alpha, ln_z, kind)?;
    let e = dos.c * t.powf(dos.alpha + 1.0) * f_integral_ln(dos.alpha + 1.0, ln_z, kind)?;
    Ok(GasState {
        n,
        e,
        pressure: e / dos.alpha,
        mu,
        fugacity: ln_z.exp(),
        condensate_fraction: 0.0,
    })
}

/// Condensation temperature `T_c = (n / (c Gamma(alpha) zeta(alpha)))^{1/alpha}`.
pub fn bec_tc(dos: &PowerLawDos, n: f64) -> Result<f64> {
    if dos.alpha <= 1.0 {
        return Err(Error::NoCondensation(dos.alpha));
    }
    if n <= 0.0 {
        return Err(Error::Invalid("density must be positive".into()));
    }
    Ok((n / (dos.c * gamma(dos.alpha) * zeta(dos.alpha))).powf(1.0 / dos.alpha))
}

/// Chemical potential for a target density, with condensed-branch detection
/// for the Bose gas.
pub fn invert_mu(
    dos: &PowerLawDos,
    kind: GasKind,
    n_target: f64,
    t: f64,
    tol: Tolerance,
) -> Result<GasState> {
    if n_target <= 0.0 || t <= 0.0 {
        return Err(Error::Invalid("need n > 0 and T > 0".into()));
    }
    match kind {
        GasKind::Boltzmann => {
            let mu = t * (n_target / (dos.c * t.powf(dos.alpha) * gamma(dos.alpha))).ln();
            let mut st = state_equations(dos, t, mu, kind)?;
            st.n = n_target;
            Ok(st)
        }
        GasKind::Bose => {
            let n_max = if dos.alpha > 1.0 {
                dos.c * gamma(dos.alpha) * zeta(dos.alpha) * t.powf(dos.alpha)
            } else {
                f64::INFINITY
            };
            if n_target >= n_max {
                // condensed branch: mu = 0, the excess occupies the ground state
                let mut st = state_equations(dos, t, 0.0, kind)?;
                st.condensate_fraction = 1.0 - n_max / n_target;
                st.n = n_target;
                return Ok(st);
            }
            // solve n(mu) = n_target on mu < 0
            let mut lo = -t; // expand until bracketed
            while state_equations(dos, t, lo, kind)?.n > n_target {
                lo *= 4.0;
                if lo < -1e18 {
                    return Err(Error::NoBracket {
                        lo,
                        hi: 0.0,
                        flo: f64::NAN,
                        fhi: f64::NAN,
                    });
                }
            }
            let mu = find_root(
                |mu| state_equations(dos, t, mu, kind).map(|s| s.n).unwrap_or(f64::NAN) - n_target,
                (lo, 0.0),
                tol,
            )?;
            state_equations(dos, t, mu, kind)
        }
        GasKind::Fermi => {
            let ef = fermi_energy(dos, n_target);
            let mut lo = -t * 50.0 - ef;
            let mut hi = 2.0 * ef + 50.0 * t;
            while state_equations(dos, t, lo, kind)?.n > n_target {
                lo -= 50.0 * t;
            }
            while state_equations(dos, t, hi, kind)?.n < n_target {
                hi += 50.0 * t;
            }
            let mu = find_root(
                |mu| state_equations(dos, t, mu, kind).map(|s| s.n).unwrap_or(f64::NAN) - n_target,
                (lo, hi),
                tol,
            )?;
            state_equations(dos, t, mu, kind)
        }
    }
}

/// Zero-temperature Fermi level `eps_F = (alpha n / c)^{1/alpha}`.
pub fn fermi_energy(dos: &PowerLawDos, n: f64) -> f64 {
    (dos.alpha * n / dos.c).powf(1.0 / dos.alpha)
}

/// Sommerfeld second-order expansion vs exact quadrature at fixed density.
#[derive(Debug, Clone, Copy)]
pub struct SommerfeldResult {
    pub eps_f: f64,
    /// `mu = eps_F [1 - (alpha-1) pi^2/6 (T/eps_F)^2]`
    pub mu_expansion: f64,
    /// chemical potential from exact quadrature inversion
    pub mu_exact: f64,
    /// `E = E_0 [1 + (alpha+1) pi^2/6 (T/eps_F)^2]` per volume
    pub e_expansion: f64,
    pub e_exact: f64,
    pub p_expansion: f64,
    pub p_exact: f64,
    /// set when `T/eps_F >= 0.3`, outside the expansion's validity
    pub expansion_suspect: bool,
}

/// Low-temperature Fermi gas at fixed density `n`.
pub fn sommerfeld(dos: &PowerLawDos, n: f64, t: f64, tol: Tolerance) -> Result<SommerfeldResult> {
    let alpha = dos.alpha;
    let eps_f = fermi_energy(dos, n);
    let theta = t / eps_f;
    let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
    let mu_expansion = eps_f * (1.0 - (alpha - 1.0) * pi2_6 * theta * theta);
    let e0 = dos.c / (alpha + 1.0) * eps_f.powf(alpha + 1.0);
    let e_expansion = e0 * (1.0 + (alpha + 1.0) * pi2_6 * theta * theta);
    let exact = invert_mu(dos, GasKind::Fermi, n, t, tol)?;
    Ok(SommerfeldResult {
        eps_f,
        mu_expansion,
        mu_exact: exact.mu,
        e_expansion,
        e_exact: exact.e,
        p_expansion: e_expansion / alpha,
        p_exact: exact.pressure,
        expansion_suspect: theta >= 0.3,
    })
}

/// Second-order chemical-potential shift for a general smooth density of
/// states: `mu(T) = eps_F - (pi^2/6)(g'(eps_F)/g(eps_F)) T^2`.
pub fn sommerfeld_mu_general<G>(g: G, eps_f: f64, t: f64, dg_step: f64) -> f64
where
    G: Fn(f64) -> f64,
{
    let g0 = g(eps_f);
    let g1 = (g(eps_f + dg_step) - g(eps_f - dg_step)) / (2.0 * dg_step);
    eps_f - std::f64::consts::PI.powi(2) / 6.0 * g1 / g0 * t * t
}

/// Zero-temperature pressure of spinless fermions in 3D:
/// `P = (1/5)(6 pi^2)^{2/3} (1/m) n^{5/3}`.
pub fn fermi_pressure_t0_3d(mass: f64, n: f64) -> f64 {
    0.2 * (6.0 * std::f64::consts::PI.powi(2)).powf(2.0 / 3.0) / mass * n.powf(5.0 / 3.0)
}

/// Blackbody radiation summary at temperature `t` (units `c = 1` by default).
#[derive(Debug, Clone)]
pub struct Blackbody {
    pub t: f64,
    pub light_speed: f64,
    pub absorption: f64,
    /// total emitted flux, `sigma_eff T^4`
    pub total_flux: f64,
    /// numerically determined `sigma_eff = a/(4 pi^2 c^2) int nu^3/(e^nu - 1)`
    pub sigma_eff: f64,
    /// peak of the spectral flux in scaled frequency `nu* = omega*/T`
    pub peak_nu: f64,
    pub photon_density: f64,
    pub energy_density: f64,
    /// radiation pressure `P = (1/3) E/V`
    pub pressure: f64,
}

impl Blackbody {
    /// Spectral flux `J(omega) = a/(4 pi^2 c^2) omega^3/(e^{omega/T} - 1)`.
    pub fn spectral_flux(&self, omega: f64) -> f64 {
        let c2 = self.light_speed * self.light_speed;
        self.absorption / (4.0 * std::f64::consts::PI.powi(2) * c2) * omega.powi(3)
            / (omega / self.t).exp_m1()
    }
}

/// Planck spectrum observables by quadrature.
pub fn blackbody(t: f64, tol: Tolerance) -> Result<Blackbody> {
    blackbody_with(t, 1.0, 1.0, tol)
}

pub fn blackbody_with(t: f64, light_speed: f64, absorption: f64, tol: Tolerance) -> Result<Blackbody> {
    if t <= 0.0 {
        return Err(Error::Invalid("temperature must be positive".into()));
    }
    let pi = std::f64::consts::PI;
    let planck_integral = integrate(|nu: f64| nu.powi(3) / nu.exp_m1(), 0.0, f64::INFINITY, tol)?;
    let c2 = light_speed * light_speed;
    let c3 = c2 * light_speed;
    let sigma_eff = absorption / (4.0 * pi * pi * c2) * planck_integral;
    // peak of nu^3/(e^nu - 1): root of nu = 3(1 - e^{-nu})
    let peak_nu = find_root(
        |nu: f64| nu - 3.0 * (1.0 - (-nu).exp()),
        (1.0, 5.0),
        Tolerance::new(1e-13, 1e-13, 200)?,
    )?;
    let energy_density = 1.0 / (pi * pi * c3) * planck_integral * t.powi(4);
    let photon_density =
        1.0 / (pi * pi * c3) * integrate(|nu: f64| nu * nu / nu.exp_m1(), 0.0, f64::INFINITY, tol)?
            * t.powi(3);
    Ok(Blackbody {
        t,
        light_speed,
        absorption,
        total_flux: sigma_eff * t.powi(4),
        sigma_eff,
        peak_nu,
        photon_density,
        energy_density,
        pressure: energy_density / 3.0,
    })
}

/// Kinetic incident flux `J = n v / 4` and wall pressure `P = n m v^2 / 3`
/// for a mono-speed gas.
pub fn incident_flux(n: f64, v: f64, mass: f64) -> Result<(f64, f64)> {
    if n < 0.0 || v < 0.0 {
        return Err(Error::Invalid("density and speed must be nonnegative".into()));
    }
    Ok((0.25 * n * v, n * mass * v * v / 3.0))
}

/// Distribution-weighted flux `J = (1/4V) int F(v) v dv` for a speed
/// distribution `F(v)` normalised to the particle number in volume `V`.
pub fn incident_flux_distribution<F>(f: F, volume: f64, tol: Tolerance) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let j = integrate(|v: f64| f(v) * v, 0.0, f64::INFINITY, tol)?;
    Ok(0.25 * j / volume)
}
