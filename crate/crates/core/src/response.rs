//! Fluctuations and linear response for finite quantum systems.
//!
//! Spectral functions by exact diagonalization with Gaussian-broadened
//! deltas, the Kubo susceptibility with its principal-value dispersion
//! integral, fluctuation-dissipation checks, adiabatic curvature, and the
//! Drude / wall-formula closed forms.

use crate::linalg::{dagger, eigh, CMat};
use crate::{Error, Result};
use num_complex::Complex64;

const PI: f64 = std::f64::consts::PI;

/// State preparation for spectral sums.
#[derive(Debug, Clone)]
pub enum Preparation {
    Canonical { beta: f64 },
    /// Gaussian window of the stated width around `e`
    Microcanonical { e: f64, width: f64 },
    Custom(Vec<f64>),
}

/// A diagonalized system with observables and a delta-broadening scale.
pub struct PreparedSystem {
    pub h: CMat,
    pub preparation: Preparation,
    pub a: CMat,
    pub b: Option<CMat>,
    /// Gaussian broadening of the spectral deltas; default 5x the mean
    /// level spacing
    pub sigma: f64,
    /// keep the elastic `n = m` terms (identity test); FD checks drop them
    pub include_diagonal: bool,
}

impl PreparedSystem {
    pub fn new(h: CMat, preparation: Preparation, a: CMat) -> Result<Self> {
        let n = h.nrows();
        if a.nrows() != n {
            return Err(Error::Invalid("observable dimension mismatch".into()));
        }
        let (vals, _) = eigh(&h);
        let spacing = (vals[n - 1] - vals[0]) / (n as f64 - 1.0).max(1.0);
        Ok(PreparedSystem {
            h,
            preparation,
            a,
            b: None,
            sigma: 5.0 * spacing.max(1e-12),
            include_diagonal: true,
        })
    }

    pub fn with_b(mut self, b: CMat) -> Self {
        self.b = Some(b);
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn without_diagonal(mut self) -> Self {
        self.include_diagonal = false;
        self
    }

    fn occupations(&self, vals: &[f64]) -> Vec<f64> {
        let weights: Vec<f64> = match &self.preparation {
            Preparation::Canonical { beta } => {
                let e0 = vals[0];
                vals.iter().map(|&e| (-beta * (e - e0)).exp()).collect()
            }
            Preparation::Microcanonical { e, width } => vals
                .iter()
                .map(|&en| (-0.5 * ((en - e) / width).powi(2)).exp())
                .collect(),
            Preparation::Custom(p) => p.clone(),
        };
        let z: f64 = weights.iter().sum();
        weights.into_iter().map(|w| w / z).collect()
    }
}

/// `S~`, `C~`, `K~` on a symmetric frequency grid.
///
/// `s` is the non-symmetrised cross spectrum `S~^{AB}(omega)`;
/// `c = (S^{AB}(w) + S^{BA}(-w))/2` and `k = i (S^{AB}(w) - S^{BA}(-w))`
/// (so for `A = B` the `c` part is real even and `k` imaginary odd).
#[derive(Debug, Clone)]
pub struct SpectralTriple {
    pub omega: Vec<f64>,
    pub s: Vec<Complex64>,
    pub s_ba: Vec<Complex64>,
    pub c: Vec<Complex64>,
    pub k: Vec<Complex64>,
    pub sigma: f64,
}

impl SpectralTriple {
    /// index of the mirrored frequency `-omega[i]` on the symmetric grid
    fn mirror(&self, i: usize) -> usize {
        self.omega.len() - 1 - i
    }
}

/// Gaussian-broadened `2 pi delta_sigma`.
fn delta_broadened(x: f64, sigma: f64) -> f64 {
    (2.0 * PI).sqrt() / sigma * (-0.5 * (x / sigma).powi(2)).exp()
}

/// Spectral decomposition
/// `S~^{AB}(w) = sum_n p_n sum_m A_nm B_mn 2 pi delta(w - (E_m - E_n))`,
/// Gaussian-broadened, on a symmetric grid spanning 1.2x the spectral range.
pub fn spectral_functions(sys: &PreparedSystem, n_grid: usize) -> Result<SpectralTriple> {
    let n = sys.h.nrows();
    let (vals, vecs) = eigh(&sys.h);
    let p = sys.occupations(&vals);
    let a_eig = dagger(&vecs) * &sys.a * &vecs;
    let b_eig = match &sys.b {
        Some(b) => dagger(&vecs) * b * &vecs,
        None => a_eig.clone(),
    };
    let span = 1.2 * (vals[n - 1] - vals[0]).max(sys.sigma);
    let m_grid = if n_grid % 2 == 0 { n_grid + 1 } else { n_grid };
    let omega: Vec<f64> = (0..m_grid)
        .map(|i| -span + 2.0 * span * i as f64 / (m_grid - 1) as f64)
        .collect();
    let mut s_ab = vec![Complex64::new(0.0, 0.0); m_grid];
    let mut s_ba = vec![Complex64::new(0.0, 0.0); m_grid];
    for i in 0..n {
        for j in 0..n {
            if i == j && !sys.include_diagonal {
                continue;
            }
            let w_ij = vals[j] - vals[i]; // E_m - E_n with n = i, m = j
            let amp_ab = a_eig[(i, j)] * b_eig[(j, i)] * p[i];
            let amp_ba = b_eig[(i, j)] * a_eig[(j, i)] * p[i];
            if amp_ab.norm() < 1e-300 && amp_ba.norm() < 1e-300 {
                continue;
            }
            for (g, &w) in omega.iter().enumerate() {
                let d = delta_broadened(w - w_ij, sys.sigma);
                if d > 1e-250 {
                    s_ab[g] += amp_ab * d;
                    s_ba[g] += amp_ba * d;
                }
            }
        }
    }
    let m = m_grid;
    let mut c = vec![Complex64::new(0.0, 0.0); m];
    let mut k = vec![Complex64::new(0.0, 0.0); m];
    for g in 0..m {
        let gm = m - 1 - g;
        c[g] = 0.5 * (s_ab[g] + s_ba[gm]);
        k[g] = Complex64::new(0.0, 1.0) * (s_ab[g] - s_ba[gm]);
    }
    Ok(SpectralTriple {
        omega,
        s: s_ab,
        s_ba,
        c,
        k,
        sigma: sys.sigma,
    })
}

/// Kubo susceptibility from the response-kernel transform:
/// `chi(w) = K~(w)/2 + (i/2pi) PV int K~(w')/(w - w') dw'`,
/// plus the dissipation coefficient from both routes.
#[derive(Debug, Clone)]
pub struct KuboResult {
    pub omega: Vec<f64>,
    pub chi: Vec<Complex64>,
    /// `Im chi / omega`
    pub eta: Vec<f64>,
    /// FGR route `[S(w) - S(-w)]/(2w)`
    pub eta_fgr: Vec<f64>,
    /// DC limit of the dissipation coefficient
    pub eta_dc: f64,
}

pub fn kubo_susceptibility(triple: &SpectralTriple) -> Result<KuboResult> {
    let m = triple.omega.len();
    let dw = triple.omega[1] - triple.omega[0];
    if dw > 0.5 * triple.sigma {
        return Err(Error::Grid(format!(
            "grid spacing {dw} too coarse for broadening {}",
            triple.sigma
        )));
    }
    let mut chi = vec![Complex64::new(0.0, 0.0); m];
    let a = triple.omega[0];
    let b = triple.omega[m - 1];
    for g in 0..m {
        let w = triple.omega[g];
        let kw = triple.k[g];
        // PV by pole subtraction: int [K(w') - K(w)]/(w - w') + K(w) ln|(w-a)/(b-w)|
        let mut pv = Complex64::new(0.0, 0.0);
        for (g2, &w2) in triple.omega.iter().enumerate() {
            let trap = if g2 == 0 || g2 == m - 1 { 0.5 } else { 1.0 };
            if g2 != g {
                pv += (triple.k[g2] - kw) / (w - w2) * trap * dw;
            }
            // the g2 == g term of the subtracted integrand is -K'(w), a
            // removable point: approximate by the symmetric difference
            else if g > 0 && g + 1 < m {
                let deriv = (triple.k[g + 1] - triple.k[g - 1]) / (2.0 * dw);
                pv += -deriv * dw;
            }
        }
        if (w - a).abs() > 1e-14 && (b - w).abs() > 1e-14 {
            pv += kw * ((w - a).abs() / (b - w).abs()).ln();
        }
        chi[g] = kw / 2.0 + Complex64::new(0.0, 1.0 / (2.0 * PI)) * pv;
    }
    let eta: Vec<f64> = (0..m)
        .map(|g| {
            let w = triple.omega[g];
            if w.abs() < 1e-12 {
                f64::NAN
            } else {
                chi[g].im / w
            }
        })
        .collect();
    let eta_fgr: Vec<f64> = (0..m)
        .map(|g| {
            let w = triple.omega[g];
            if w.abs() < 1e-12 {
                f64::NAN
            } else {
                (triple.s[g].re - triple.s[triple.mirror(g)].re) / (2.0 * w)
            }
        })
        .collect();
    // DC limit: evaluate the FGR route just off zero
    let mid = m / 2;
    let off = ((triple.sigma / 4.0 / dw).round() as usize).max(1);
    let eta_dc = {
        let g = mid + off;
        (triple.s[g].re - triple.s[triple.mirror(g)].re) / (2.0 * triple.omega[g])
    };
    Ok(KuboResult {
        omega: triple.omega.clone(),
        chi,
        eta,
        eta_fgr,
        eta_dc,
    })
}

/// Fluctuation-dissipation summary for a canonical preparation.
#[derive(Debug, Clone)]
pub struct FdCheck {
    pub eta_dc: f64,
    /// noise intensity `nu_T = C~(0)`
    pub nu_t: f64,
    /// `2 T eta / nu_T`, unity when the FDT holds
    pub ratio: f64,
    /// max relative detailed-balance residual over the sampled band
    pub detailed_balance_residual: f64,
}

/// DC fluctuation-dissipation check `eta = nu_T/(2T)` on a canonical system;
/// elastic terms are excluded (they carry no transitions).
pub fn fd_check(sys: &PreparedSystem, n_grid: usize) -> Result<FdCheck> {
    let beta = match sys.preparation {
        Preparation::Canonical { beta } => beta,
        _ => {
            return Err(Error::Invalid(
                "fd_check needs a canonical preparation (see fd_check_microcanonical)".into(),
            ))
        }
    };
    let mut sys_nodiag = PreparedSystem {
        h: sys.h.clone(),
        preparation: sys.preparation.clone(),
        a: sys.a.clone(),
        b: None,
        sigma: sys.sigma,
        include_diagonal: false,
    };
    // subtract <A> so the elastic weight vanishes even in cross terms
    let (vals, vecs) = eigh(&sys.h);
    let p = sys_nodiag.occupations(&vals);
    let a_eig = dagger(&vecs) * &sys.a * &vecs;
    let mean: f64 = (0..vals.len()).map(|i| p[i] * a_eig[(i, i)].re).sum();
    let n = sys.h.nrows();
    sys_nodiag.a = &sys.a - CMat::identity(n, n) * Complex64::new(mean, 0.0);
    let triple = spectral_functions(&sys_nodiag, n_grid)?;
    let kubo = kubo_susceptibility(&triple)?;
    let mid = triple.omega.len() / 2;
    let nu_t = triple.c[mid].re;
    let eta_dc = kubo.eta_dc;
    let t = 1.0 / beta;
    // detailed balance residual where the spectrum is not negligible
    let max_s = triple.s.iter().map(|z| z.re).fold(0.0_f64, f64::max);
    let mut resid = 0.0_f64;
    for g in 0..triple.omega.len() {
        let s_pos = triple.s[g].re;
        if s_pos > 1e-3 * max_s {
            let s_neg = triple.s[triple.mirror(g)].re;
            let expected = (-beta * triple.omega[g]).exp() * s_pos;
            resid = resid.max((s_neg - expected).abs() / s_pos.max(1e-300));
        }
    }
    Ok(FdCheck {
        eta_dc,
        nu_t,
        ratio: 2.0 * t * eta_dc / nu_t,
        detailed_balance_residual: resid,
    })
}

/// Microcanonical FD route `eta = (1/2)(1/g) d/dE [g(E) nu_E]` by central
/// differences over preparations at `E +/- dE`, with a caller-supplied
/// smooth density of states `g(E)`.
pub fn fd_check_microcanonical<G>(
    h: &CMat,
    a: &CMat,
    g_of_e: G,
    e: f64,
    width: f64,
    de: f64,
    n_grid: usize,
) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let nu_at = |energy: f64| -> Result<f64> {
        let sys = PreparedSystem::new(
            h.clone(),
            Preparation::Microcanonical { e: energy, width },
            a.clone(),
        )?
        .without_diagonal();
        let triple = spectral_functions(&sys, n_grid)?;
        Ok(triple.c[triple.omega.len() / 2].re)
    };
    let up = g_of_e(e + de) * nu_at(e + de)?;
    let down = g_of_e(e - de) * nu_at(e - de)?;
    Ok(0.5 / g_of_e(e) * (up - down) / (2.0 * de))
}

/// Adiabatic curvature tensor
/// `B^{kj}_n = sum_{m != n} 2 Im[F^k_nm F^j_mn]/(E_m - E_n)^2` with
/// `F^k = -dH/dX_k` by Richardson-controlled central differences.
pub fn adiabatic_curvature<H>(
    h_of_x: H,
    n_params: usize,
    level: usize,
    x0: &[f64],
    step: f64,
) -> Result<Vec<f64>>
where
    H: Fn(&[f64]) -> CMat,
{
    let h0 = h_of_x(x0);
    let dim = h0.nrows();
    if level >= dim {
        return Err(Error::Invalid("level index out of range".into()));
    }
    let (vals, vecs) = eigh(&h0);
    let gap = (0..dim)
        .filter(|&m| m != level)
        .map(|m| (vals[m] - vals[level]).abs())
        .fold(f64::INFINITY, f64::min);
    if gap < 1e-9 {
        return Err(Error::Degeneracy(format!(
            "level {level} degenerate (gap {gap})"
        )));
    }
    // force operators in the eigenbasis
    let mut f_ops = Vec::with_capacity(n_params);
    for k in 0..n_params {
        let mut xp = x0.to_vec();
        let mut xm = x0.to_vec();
        xp[k] += step;
        xm[k] -= step;
        let d1 = (h_of_x(&xp) - h_of_x(&xm)) * Complex64::new(0.5 / step, 0.0);
        let mut xp2 = x0.to_vec();
        let mut xm2 = x0.to_vec();
        xp2[k] += 0.5 * step;
        xm2[k] -= 0.5 * step;
        let d2 = (h_of_x(&xp2) - h_of_x(&xm2)) * Complex64::new(1.0 / step, 0.0);
        let richardson = (d2 * Complex64::new(4.0, 0.0) - d1) * Complex64::new(1.0 / 3.0, 0.0);
        f_ops.push(dagger(&vecs) * (richardson * Complex64::new(-1.0, 0.0)) * &vecs);
    }
    let mut b = vec![0.0; n_params * n_params];
    for k in 0..n_params {
        for j in 0..n_params {
            let mut acc = 0.0;
            for m in 0..dim {
                if m == level {
                    continue;
                }
                let de = vals[m] - vals[level];
                acc += 2.0 * (f_ops[k][(level, m)] * f_ops[j][(m, level)]).im / (de * de);
            }
            b[k * n_params + j] = acc;
        }
    }
    Ok(b)
}

/// Drude conductance `G = M l/L` in units `e^2/(2 pi hbar)`.
pub fn drude_conductance(open_modes: u32, mean_free_path: f64, ring_length: f64) -> f64 {
    open_modes as f64 * mean_free_path / ring_length
}

/// Mean free path over ring length for a single stochastic scatterer of
/// transmission `g`: `l/L = g/(1 - g)`.
pub fn scatterer_ring(g: f64) -> Result<f64> {
    if !(g > 0.0 && g < 1.0) {
        return Err(Error::Domain(format!("transmission must be in (0,1), got {g}")));
    }
    Ok(g / (1.0 - g))
}

/// Wall-formula friction `eta = rho v_T A` (mass density times thermal
/// velocity times wall area).
pub fn wall_formula(mass_density: f64, v_thermal: f64, area: f64) -> f64 {
    mass_density * v_thermal * area
}

/// Many-body noise spectrum of a degenerate Fermi system:
/// `S^[N](w) = [(w/Delta)/(1 - e^{-w/T})] C~_{E_F}(w)`,
/// with the `T = 0` limit `(w/Delta) Theta(w)`.
pub fn fermion_many_body_noise<C>(c_single: C, delta: f64, t: f64, omega: &[f64]) -> Vec<f64>
where
    C: Fn(f64) -> f64,
{
    omega
        .iter()
        .map(|&w| {
            let occ_factor = if t <= 0.0 {
                if w > 0.0 {
                    w / delta
                } else {
                    0.0
                }
            } else if w.abs() < 1e-12 * t {
                t / delta
            } else {
                (w / delta) / (1.0 - (-w / t).exp())
            };
            occ_factor * c_single(w)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_hermitian;
    use crate::numerics::RandomStream;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag(vals: &[f64]) -> CMat {
        let n = vals.len();
        let mut m = CMat::zeros(n, n);
        for (i, &v) in vals.iter().enumerate() {
            m[(i, i)] = c64(v, 0.0);
        }
        m
    }

    #[test]
    fn identity_observable_elastic_line() {
        let h = diag(&[0.0, 1.0, 2.0]);
        let sys = PreparedSystem::new(
            h.clone(),
            Preparation::Canonical { beta: 1.0 },
            CMat::identity(3, 3),
        )
        .unwrap()
        .with_sigma(0.1);
        let triple = spectral_functions(&sys, 401).unwrap();
        let mid = triple.omega.len() / 2;
        // elastic peak: 2 pi delta_sigma(0)
        let expected = (2.0 * PI).sqrt() / sys.sigma;
        assert!((triple.s[mid].re - expected).abs() < 1e-10 * expected);
        // no weight away from zero
        let far = (mid + (4.5 * sys.sigma / (triple.omega[1] - triple.omega[0])) as usize)
            .min(triple.omega.len() - 1);
        assert!(triple.s[far].re < 1e-2 * expected);
    }

    #[test]
    fn detailed_balance_and_tanh_relation() {
        // canonical 40-level random system
        let mut stream = RandomStream::new(1234, 0);
        let h = random_hermitian(40, &mut stream) * c64(2.0, 0.0);
        let a = random_hermitian(40, &mut stream);
        let beta = 0.02;
        let spacing = {
            let (vals, _) = eigh(&h);
            (vals[39] - vals[0]) / 39.0
        };
        let sys = PreparedSystem::new(h, Preparation::Canonical { beta }, a)
            .unwrap()
            .with_sigma(3.0 * spacing)
            .without_diagonal();
        let triple = spectral_functions(&sys, 801).unwrap();
        let m = triple.omega.len();
        let max_s = triple.s.iter().map(|z| z.re).fold(0.0_f64, f64::max);
        let mut resid = 0.0_f64;
        let mut tanh_resid = 0.0_f64;
        for g in 0..m {
            let w = triple.omega[g];
            let s_pos = triple.s[g].re;
            if s_pos > 1e-2 * max_s {
                let s_neg = triple.s[m - 1 - g].re;
                resid = resid.max((s_neg - (-beta * w).exp() * s_pos).abs() / s_pos);
                // K~ = i 2 tanh(beta w/2) C~
                let k = triple.k[g];
                let expected = 2.0 * (0.5 * beta * w).tanh() * triple.c[g].re;
                if triple.c[g].re > 1e-2 * max_s {
                    tanh_resid = tanh_resid
                        .max((k.im - expected).abs() / triple.c[g].re.max(1e-300));
                }
            }
        }
        // broadening-controlled bound
        let bound = 3.0 * beta * sys.sigma;
        assert!(resid < bound, "detailed balance residual {resid} vs bound {bound}");
        assert!(tanh_resid < bound, "tanh relation residual {tanh_resid}");
    }

    #[test]
    fn kubo_ohmic_input_constant_eta() {
        // synthetic Ohmic K~ = i 2 eta0 w on a grid
        let eta0 = 0.7;
        let m = 801;
        let span = 4.0;
        let omega: Vec<f64> = (0..m)
            .map(|i| -span + 2.0 * span * i as f64 / (m - 1) as f64)
            .collect();
        // taper the kernel smoothly to zero at the edges so the PV integral
        // sees a decaying input
        let k: Vec<Complex64> = omega
            .iter()
            .map(|&w| c64(0.0, 2.0 * eta0 * w * (-(w / 2.0).powi(4)).exp()))
            .collect();
        let s = vec![c64(0.0, 0.0); m];
        let triple = SpectralTriple {
            omega: omega.clone(),
            s: s.clone(),
            s_ba: s.clone(),
            c: s.clone(),
            k,
            sigma: 0.5,
        };
        let kubo = kubo_susceptibility(&triple).unwrap();
        // near w = 0 the dissipation coefficient is eta0
        let mid = m / 2;
        for off in [2usize, 5, 10] {
            let eta = kubo.eta[mid + off];
            assert!((eta - eta0).abs() < 0.01 * eta0, "eta {eta}");
        }
    }

    #[test]
    fn kubo_two_routes_agree() {
        let mut stream = RandomStream::new(77, 0);
        let h = random_hermitian(16, &mut stream);
        let a = random_hermitian(16, &mut stream);
        let sys = PreparedSystem::new(h, Preparation::Canonical { beta: 0.3 }, a)
            .unwrap()
            .without_diagonal();
        let triple = spectral_functions(&sys, 1201).unwrap();
        let kubo = kubo_susceptibility(&triple).unwrap();
        let m = triple.omega.len();
        // compare where eta is well defined and the spectrum lives
        let max_eta = kubo
            .eta_fgr
            .iter()
            .filter(|v| v.is_finite())
            .fold(0.0_f64, |acc, &v| acc.max(v.abs()));
        for g in (m / 2 + 3..m - 10).step_by(37) {
            if kubo.eta_fgr[g].abs() > 1e-3 * max_eta {
                let d = (kubo.eta[g] - kubo.eta_fgr[g]).abs();
                assert!(
                    d < 1e-6 + 5e-3 * max_eta,
                    "two routes differ at g={g}: {} vs {}",
                    kubo.eta[g],
                    kubo.eta_fgr[g]
                );
            }
        }
    }

    #[test]
    fn fd_ratio_near_unity() {
        let mut stream = RandomStream::new(4321, 0);
        let h = random_hermitian(40, &mut stream) * c64(2.0, 0.0);
        let a = random_hermitian(40, &mut stream);
        let beta = 0.02;
        let spacing = {
            let (vals, _) = eigh(&h);
            (vals[39] - vals[0]) / 39.0
        };
        let sys = PreparedSystem::new(h, Preparation::Canonical { beta }, a)
            .unwrap()
            .with_sigma(3.0 * spacing);
        let check = fd_check(&sys, 801).unwrap();
        assert!(
            (check.ratio - 1.0).abs() < 0.05,
            "FD ratio {} (eta = {}, nu = {})",
            check.ratio,
            check.eta_dc,
            check.nu_t
        );
        assert!(check.detailed_balance_residual < 0.05);
    }

    #[test]
    fn fd_high_temperature_eta_vanishes() {
        // eta = nu_T/(2T) -> 0 at fixed nu as T -> inf
        let mut stream = RandomStream::new(9, 0);
        let h = random_hermitian(20, &mut stream);
        let a = random_hermitian(20, &mut stream);
        let sys_cold = PreparedSystem::new(
            h.clone(),
            Preparation::Canonical { beta: 0.2 },
            a.clone(),
        )
        .unwrap();
        let sys_hot =
            PreparedSystem::new(h, Preparation::Canonical { beta: 0.002 }, a).unwrap();
        let cold = fd_check(&sys_cold, 801).unwrap();
        let hot = fd_check(&sys_hot, 801).unwrap();
        // eta ~ nu/(2T): at fixed nu the dissipation vanishes as 1/T
        assert!(hot.eta_dc < 0.05 * cold.eta_dc, "{} vs {}", hot.eta_dc, cold.eta_dc);
    }

    #[test]
    fn microcanonical_fd_consistent_with_canonical() {
        // toy with constant g(E): eta = (1/2) d nu_E/dE on a 3-point grid
        let mut stream = RandomStream::new(55, 0);
        let h = random_hermitian(30, &mut stream) * c64(2.0, 0.0);
        let a = random_hermitian(30, &mut stream);
        let eta = fd_check_microcanonical(&h, &a, |_| 1.0, 0.0, 0.8, 0.3, 801).unwrap();
        // the derivative of a smooth positive function: just require finite
        // and the right order of magnitude vs the canonical eta at matching T
        assert!(eta.is_finite());
        let sys = PreparedSystem::new(h, Preparation::Canonical { beta: 0.4 }, a).unwrap();
        let canonical = fd_check(&sys, 801).unwrap();
        assert!(
            eta.abs() < 30.0 * canonical.eta_dc.abs().max(1e-6),
            "eta_mc = {eta}, eta_c = {}",
            canonical.eta_dc
        );
    }

    #[test]
    fn curvature_real_family_vanishes() {
        // real symmetric H(X): all matrix elements real -> B = 0
        let f = |x: &[f64]| {
            let mut m = CMat::zeros(3, 3);
            m[(0, 0)] = c64(x[0], 0.0);
            m[(1, 1)] = c64(-0.3, 0.0);
            m[(2, 2)] = c64(0.9 + x[1], 0.0);
            m[(0, 1)] = c64(0.4 + x[1], 0.0);
            m[(1, 0)] = c64(0.4 + x[1], 0.0);
            m[(1, 2)] = c64(0.2 * x[0], 0.0);
            m[(2, 1)] = c64(0.2 * x[0], 0.0);
            m
        };
        let b = adiabatic_curvature(f, 2, 0, &[0.5, -0.2], 1e-4).unwrap();
        for v in &b {
            assert!(v.abs() < 1e-10, "{v}");
        }
    }

    #[test]
    fn curvature_spin_half_monopole() {
        // H = X . sigma: lower level has |B| = 1/(2|X|^2); flux over a
        // sphere = 2 pi (Chern number -1 times -2 pi... sign by orientation)
        let f = |x: &[f64]| {
            let mut m = CMat::zeros(2, 2);
            m[(0, 0)] = c64(x[2], 0.0);
            m[(1, 1)] = c64(-x[2], 0.0);
            m[(0, 1)] = c64(x[0], -x[1]);
            m[(1, 0)] = c64(x[0], x[1]);
            m
        };
        let r: f64 = 1.3;
        // check the magnitude at a generic point
        let x0 = [0.7 * r, -0.3 * r, r * (1.0f64 - 0.49 - 0.09).sqrt()];
        let b = adiabatic_curvature(f, 3, 0, &x0, 1e-4).unwrap();
        // antisymmetry
        for k in 0..3 {
            for j in 0..3 {
                assert!(
                    (b[k * 3 + j] + b[j * 3 + k]).abs() < 1e-10,
                    "antisymmetry"
                );
            }
        }
        // radial field magnitude 1/(2 r^2): B_vec = (B^{12}, B^{20}, B^{01})
        let bv = [b[1 * 3 + 2], b[2 * 3 + 0], b[0 * 3 + 1]];
        let mag = (bv[0] * bv[0] + bv[1] * bv[1] + bv[2] * bv[2]).sqrt();
        assert!(
            (mag - 1.0 / (2.0 * r * r)).abs() < 1e-6,
            "|B| = {mag} vs {}",
            1.0 / (2.0 * r * r)
        );
        // flux through the sphere: |B| * 4 pi r^2 = 2 pi
        let flux = mag * 4.0 * PI * r * r;
        assert!((flux - 2.0 * PI).abs() < 1e-4);
    }

    #[test]
    fn drude_forms() {
        assert!((scatterer_ring(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((drude_conductance(1, 2.0, 2.0) - 1.0).abs() < 1e-15);
        assert!(scatterer_ring(1.0).is_err());
        // geometric series sum_{n} (2g-1)^{|n|} = g/(1-g) reproduced
        let g: f64 = 0.7;
        let q = 2.0 * g - 1.0;
        let mut series = 1.0;
        let mut qn = 1.0;
        for _ in 1..2000 {
            qn *= q;
            series += 2.0 * qn;
        }
        // series = (1+q)/(1-q) = 2g/(2-2g) = g/(1-g)
        assert!((series - scatterer_ring(g).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn wall_formula_dimensional_check() {
        // eta = rho v_T A: for an ideal gas, rho = n m, and the FD route
        // gives nu_T/(2T) = m^2 v_T^3 n A/(2T) = rho v_T A with v_T^2 = 2T/m
        let n = 2.0;
        let m = 1.5;
        let t = 0.8f64;
        let area = 0.3;
        let v_t = (2.0 * t / m).sqrt();
        let nu_t = m * m * v_t.powi(3) * n * area;
        assert!((wall_formula(n * m, v_t, area) - nu_t / (2.0 * t)).abs() < 1e-12);
    }

    #[test]
    fn forced_oscillator_velocity_sum_rule() {
        // integral of C~_vv over omega/(2 pi) equals T/m for the classical
        // Lorentzian chi of the damped oscillator
        let (m, eta0, omega0, t) = (1.3, 0.4, 2.0, 0.9);
        let tol = crate::numerics::Tolerance {
            abs: 1e-12,
            rel: 1e-9,
            max_evals: 2_000_000,
        };
        let integrand = |w: f64| {
            // classical FDT: C_xx = (2T/w) Im chi; C_vv = w^2 C_xx
            let chi_den = (m * (omega0 * omega0 - w * w)).powi(2) + (eta0 * w).powi(2);
            let im_chi = eta0 * w / chi_den;
            2.0 * t * w * im_chi
        };
        let integral = crate::numerics::integrate(integrand, 0.0, f64::INFINITY, tol).unwrap()
            * 2.0
            / (2.0 * PI);
        assert!(
            (integral - t / m).abs() < 0.01 * t / m,
            "{integral} vs {}",
            t / m
        );
    }

    #[test]
    fn many_body_noise_limits() {
        let delta = 0.1;
        let c_flat = |_w: f64| 2.0;
        // T = 0: negative frequencies cut off
        let s = fermion_many_body_noise(c_flat, delta, 0.0, &[-1.0, -0.1, 0.5]);
        assert_eq!(s[0], 0.0);
        assert_eq!(s[1], 0.0);
        assert!((s[2] - 0.5 / delta * 2.0).abs() < 1e-12);
        // w -> 0 at T > 0: effective particle number T/Delta
        let t = 0.7;
        let s = fermion_many_body_noise(c_flat, delta, t, &[1e-9]);
        assert!((s[0] - t / delta * 2.0).abs() < 1e-6);
    }

    #[test]
    fn many_body_noise_fock_enumeration() {
        // 6 orbitals, 3 fermions: exact Fock-space spectrum vs the formula
        let n_orb = 6;
        let delta = 1.0;
        let t = 1.5;
        let energies: Vec<f64> = (0..n_orb).map(|k| k as f64 * delta).collect();
        let mut stream = RandomStream::new(2024, 0);
        let a1 = random_hermitian(n_orb, &mut stream);
        // enumerate 3-particle Fock states
        let mut states = Vec::new();
        for mask in 0u32..(1 << n_orb) {
            if mask.count_ones() == 3 {
                states.push(mask);
            }
        }
        let dim = states.len();
        let index: std::collections::HashMap<u32, usize> =
            states.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        // many-body A = sum A_ij c_i^+ c_j with fermionic signs
        let mut a_mb = CMat::zeros(dim, dim);
        let mut h_mb = CMat::zeros(dim, dim);
        for (s_idx, &mask) in states.iter().enumerate() {
            let e: f64 = (0..n_orb)
                .filter(|&k| mask >> k & 1 == 1)
                .map(|k| energies[k])
                .sum();
            h_mb[(s_idx, s_idx)] = c64(e, 0.0);
            for i in 0..n_orb {
                for j in 0..n_orb {
                    // c_i^+ c_j |mask>
                    if mask >> j & 1 == 0 {
                        continue;
                    }
                    let after_j = mask & !(1 << j);
                    if after_j >> i & 1 == 1 {
                        continue;
                    }
                    let sign_j = ((mask & ((1 << j) - 1)).count_ones() % 2) as i32;
                    let sign_i = ((after_j & ((1 << i) - 1)).count_ones() % 2) as i32;
                    let sign = if (sign_i + sign_j) % 2 == 0 { 1.0 } else { -1.0 };
                    let target = after_j | (1 << i);
                    let t_idx = index[&target];
                    a_mb[(t_idx, s_idx)] += a1[(i, j)] * c64(sign, 0.0);
                }
            }
        }
        let sigma = 0.8;
        let sys_mb = PreparedSystem::new(h_mb, Preparation::Canonical { beta: 1.0 / t }, a_mb)
            .unwrap()
            .with_sigma(sigma)
            .without_diagonal();
        let triple = spectral_functions(&sys_mb, 801).unwrap();
        // single-particle C~_{E_F}(w): microcanonical-ish at the Fermi level;
        // for equally spaced levels and boxcar averaging, use the canonical
        // single-particle spectrum at the same broadening
        let h1 = diag(&energies);
        let sys1 = PreparedSystem::new(
            h1,
            Preparation::Custom(vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]),
            a1,
        )
        .unwrap()
        .with_sigma(sigma)
        .without_diagonal();
        let triple1 = spectral_functions(&sys1, 801).unwrap();
        // compare S^{[N]} against [(w/Delta)/(1-e^{-w/T})] C~_1(w) at a few
        // frequencies within the band
        for &w_target in &[1.0, 2.0] {
            let g = triple
                .omega
                .iter()
                .position(|&w| w >= w_target)
                .unwrap();
            let g1 = triple1
                .omega
                .iter()
                .position(|&w| w >= w_target)
                .unwrap();
            let c1 = triple1.c[g1].re;
            let formula = (w_target / delta) / (1.0 - (-w_target / t).exp()) * c1;
            let exact = triple.s[g].re;
            assert!(
                (exact - formula).abs() < 0.35 * exact.abs().max(0.1),
                "w={w_target}: exact {exact} vs formula {formula}"
            );
        }
    }

    #[test]
    fn reciprocity_conjugate_pair() {
        // S^{AB}(w) = conj(S^{BA}(w)) for every tested pair
        let mut stream = RandomStream::new(31415, 0);
        let h = random_hermitian(12, &mut stream);
        let a = random_hermitian(12, &mut stream);
        let b = random_hermitian(12, &mut stream);
        let sys = PreparedSystem::new(h, Preparation::Canonical { beta: 0.7 }, a)
            .unwrap()
            .with_b(b);
        let triple = spectral_functions(&sys, 601).unwrap();
        for g in (0..triple.omega.len()).step_by(17) {
            let d = (triple.s[g] - triple.s_ba[g].conj()).norm();
            assert!(d < 1e-12, "reciprocity broken at {g}: {d}");
        }
    }

    #[test]
    fn onsager_field_reversal() {
        // 3-level loop with a flux phase: S^{AB}(w; h) = S^{BA}(w; -h) for
        // observables even under time reversal (real symmetric matrices)
        let build = |phi: f64| {
            let mut m = CMat::zeros(3, 3);
            let hop = Complex64::from_polar(1.0, phi / 3.0);
            for i in 0..3 {
                let j = (i + 1) % 3;
                m[(i, j)] = hop;
                m[(j, i)] = hop.conj();
            }
            m
        };
        let mut stream = RandomStream::new(999, 0);
        // real symmetric observables
        let mut a = CMat::zeros(3, 3);
        let mut b = CMat::zeros(3, 3);
        for i in 0..3 {
            for j in i..3 {
                let (x, y) = (stream.gaussian(), stream.gaussian());
                a[(i, j)] = c64(x, 0.0);
                a[(j, i)] = c64(x, 0.0);
                b[(i, j)] = c64(y, 0.0);
                b[(j, i)] = c64(y, 0.0);
            }
        }
        let phi = 0.8;
        let sys_p = PreparedSystem::new(
            build(phi),
            Preparation::Canonical { beta: 0.9 },
            a.clone(),
        )
        .unwrap()
        .with_b(b.clone());
        let sys_m = PreparedSystem::new(build(-phi), Preparation::Canonical { beta: 0.9 }, a)
            .unwrap()
            .with_b(b);
        let tp = spectral_functions(&sys_p, 601).unwrap();
        let tm = spectral_functions(&sys_m, 601).unwrap();
        for g in (0..tp.omega.len()).step_by(13) {
            let d = (tp.s[g] - tm.s_ba[g]).norm();
            assert!(d < 1e-10, "Onsager reciprocity broken at {g}: {d}");
        }
    }

    #[test]
    fn eta_matrix_symmetric_b_antisymmetric() {
        // two-parameter family: eta^{kj} symmetric, B^{kj} antisymmetric
        let mut stream = RandomStream::new(2718, 0);
        let h = random_hermitian(10, &mut stream);
        let f1 = random_hermitian(10, &mut stream);
        let f2 = random_hermitian(10, &mut stream);
        let beta = 0.4;
        let triple_of = |a: &CMat, b: &CMat| {
            let sys = PreparedSystem::new(
                h.clone(),
                Preparation::Canonical { beta },
                a.clone(),
            )
            .unwrap()
            .with_b(b.clone())
            .without_diagonal();
            spectral_functions(&sys, 801).unwrap()
        };
        let t12 = triple_of(&f1, &f2);
        let t21 = triple_of(&f2, &f1);
        // eta^{kj} ~ lim Im K~^{kj}/(2w), B^{kj} ~ -int Re K~/(w^2):
        // symmetry/antisymmetry follows from K~^{12} vs K~^{21}
        let m = t12.omega.len();
        let mid = m / 2;
        for off in [3usize, 9, 21] {
            let k12 = t12.k[mid + off];
            let k21 = t21.k[mid + off];
            // Im parts equal (symmetric eta), Re parts opposite (antisym B)
            assert!((k12.im - k21.im).abs() < 1e-10, "eta symmetry");
            assert!((k12.re + k21.re).abs() < 1e-10, "B antisymmetry");
        }
    }
}
