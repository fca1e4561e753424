//! Quantum master equations for finite-dimensional systems.
//!
//! Generators provided: white-noise dephasing `-(nu/2)[W,[W,rho]]`, the
//! high-temperature Ohmic quantum Fokker-Planck form (knowingly not
//! Lindblad: positivity is monitored, not enforced), the general Lindblad
//! form, the secular approximation built from the `A_Omega` decomposition,
//! and the Pauli/Bloch reductions.

use crate::linalg::{
    anticommutator, commutator, dagger, eigh, frobenius, hermitian_deviation, hermitize, trace,
    CMat,
};
use crate::stochastic::RateMatrix;
use crate::{Error, Result};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Finite-dimensional density matrix with validity checks.
#[derive(Debug, Clone)]
pub struct DensityMatrix(pub CMat);

impl DensityMatrix {
    pub fn new(rho: CMat) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::Invalid("density matrix must be square".into()));
        }
        if hermitian_deviation(&rho) > 1e-12 {
            return Err(Error::Invalid("density matrix not Hermitian".into()));
        }
        if (trace(&rho).re - 1.0).abs() > 1e-12 || trace(&rho).im.abs() > 1e-12 {
            return Err(Error::Invalid("density matrix trace != 1".into()));
        }
        let (vals, _) = eigh(&rho);
        if vals.iter().any(|&v| v < -1e-10) {
            return Err(Error::Invalid(format!(
                "density matrix has negative eigenvalue {}",
                vals[0]
            )));
        }
        Ok(DensityMatrix(rho))
    }

    /// Pure state from a (not necessarily normalised) vector.
    pub fn pure(v: &[Complex64]) -> Self {
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let n = v.len();
        let mut rho = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                rho[(i, j)] = v[i] * v[j].conj() / norm2;
            }
        }
        DensityMatrix(rho)
    }

    /// Gibbs state `e^{-beta H}/Z`.
    pub fn gibbs(h: &CMat, beta: f64) -> Self {
        let (vals, vecs) = eigh(h);
        let e0 = vals[0];
        let weights: Vec<f64> = vals.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
        let z: f64 = weights.iter().sum();
        let n = h.nrows();
        let mut d = CMat::zeros(n, n);
        for (i, w) in weights.iter().enumerate() {
            d[(i, i)] = c(w / z, 0.0);
        }
        DensityMatrix(&vecs * d * dagger(&vecs))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn purity(&self) -> f64 {
        trace(&(&self.0 * &self.0)).re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigh(&self.0).0[0]
    }
}

/// Bath spectral models. `s_tilde(omega)` is the non-symmetrised power
/// spectrum; harmonic baths obey `S(-w) = e^{-beta w} S(w)` exactly.
#[derive(Clone)]
pub enum BathSpectrum {
    /// `C~(omega) = nu`, flat
    WhiteNoise { nu: f64 },
    /// harmonic Ohmic bath: `S(w) = 2 eta w/(1 - e^{-w/T})`, smooth cutoff
    OhmicHarmonic { eta: f64, t: f64, cutoff: f64 },
    /// spin Ohmic bath: `S(w) = 2 J/(1 + e^{-w/T})` with flat `J = nu`
    OhmicSpin { nu: f64, t: f64, cutoff: f64 },
    Custom {
        s_tilde: std::sync::Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl BathSpectrum {
    /// Non-symmetrised `S~(omega)`.
    pub fn s_tilde(&self, omega: f64) -> f64 {
        match self {
            BathSpectrum::WhiteNoise { nu } => *nu,
            BathSpectrum::OhmicHarmonic { eta, t, cutoff } => {
                let cut = (-(omega / cutoff).powi(2)).exp();
                let x = omega / t;
                let body = if x.abs() < 1e-12 {
                    2.0 * eta * t // limit of 2 eta w/(1 - e^{-w/T})
                } else {
                    2.0 * eta * omega / -(-x).exp_m1()
                };
                body * cut
            }
            BathSpectrum::OhmicSpin { nu, t, cutoff } => {
                let cut = (-(omega / cutoff).powi(2)).exp();
                2.0 * nu / (1.0 + (-(omega / t)).exp()) * cut
            }
            BathSpectrum::Custom { s_tilde } => s_tilde(omega),
        }
    }

    /// Symmetric part `C~ = (S(w) + S(-w))/2`.
    pub fn c_tilde(&self, omega: f64) -> f64 {
        0.5 * (self.s_tilde(omega) + self.s_tilde(-omega))
    }

    /// Antisymmetric part `S(w) - S(-w)` (equals `2 J(w)` for harmonic baths).
    pub fn asym(&self, omega: f64) -> f64 {
        self.s_tilde(omega) - self.s_tilde(-omega)
    }
}


/// A Markovian generator acting on density matrices.
pub trait Liouvillian {
    fn dim(&self) -> usize;
    fn apply(&self, rho: &CMat) -> CMat;

    /// Dense superoperator matrix in the column-stacking convention.
    fn superoperator(&self) -> CMat {
        let n = self.dim();
        let mut sup = CMat::zeros(n * n, n * n);
        for col in 0..n * n {
            let (i, j) = (col % n, col / n);
            let mut basis = CMat::zeros(n, n);
            basis[(i, j)] = c(1.0, 0.0);
            let out = self.apply(&basis);
            for row in 0..n * n {
                sup[(row, col)] = out[(row % n, row / n)];
            }
        }
        sup
    }

    /// Crude generator norm `max_col ||L e_col||`, for step control.
    fn norm_estimate(&self) -> f64 {
        let n = self.dim();
        let mut best = 0.0_f64;
        for k in 0..n.min(8) {
            let mut basis = CMat::zeros(n, n);
            basis[(k, k)] = c(1.0, 0.0);
            if k + 1 < n {
                basis[(k, k + 1)] = c(0.5, 0.2);
                basis[(k + 1, k)] = c(0.5, -0.2);
            }
            best = best.max(frobenius(&self.apply(&basis)));
        }
        best.max(1e-12)
    }
}

/// `d rho/dt = -i[H, rho] - (nu/2)[W, [W, rho]]`.
pub struct WhiteNoiseGenerator {
    pub h: CMat,
    pub w: CMat,
    pub nu: f64,
}

impl WhiteNoiseGenerator {
    pub fn new(h: CMat, w: CMat, nu: f64) -> Result<Self> {
        check_hermitian(&h, "H")?;
        check_hermitian(&w, "W")?;
        Ok(WhiteNoiseGenerator { h, w, nu })
    }
}

impl Liouvillian for WhiteNoiseGenerator {
    fn dim(&self) -> usize {
        self.h.nrows()
    }
    fn apply(&self, rho: &CMat) -> CMat {
        let unitary = commutator(&self.h, rho) * c(0.0, -1.0);
        let noise = commutator(&self.w, &commutator(&self.w, rho)) * c(-0.5 * self.nu, 0.0);
        unitary + noise
    }
}

/// High-temperature Ohmic quantum Fokker-Planck generator:
/// `d rho/dt = -i[H,rho] - (nu/2)[X,[X,rho]] - i (eta/2)[X, {P, rho}]`
/// with `X = W`, `P = i[H, W]`.
pub struct QuantumFokkerPlanck {
    pub h: CMat,
    pub x: CMat,
    pub p: CMat,
    pub nu: f64,
    pub eta: f64,
}

impl QuantumFokkerPlanck {
    pub fn new(h: CMat, w: CMat, nu: f64, eta: f64) -> Result<Self> {
        check_hermitian(&h, "H")?;
        check_hermitian(&w, "W")?;
        let p = commutator(&h, &w) * c(0.0, 1.0);
        Ok(QuantumFokkerPlanck { h, x: w, p, nu, eta })
    }

    /// Frobenius norm of the non-Lindblad remainder
    /// `(eta/(16 T)) [P, [P, .]]` with `T = nu/(2 eta)`, as a superoperator.
    pub fn lindblad_deviation_norm(&self) -> f64 {
        if self.eta == 0.0 {
            return 0.0;
        }
        let coeff = self.eta * self.eta / (8.0 * self.nu); // eta/(16 T)
        superop_frobenius(self.dim(), |basis| {
            commutator(&self.p, &commutator(&self.p, basis)) * c(coeff, 0.0)
        })
    }

    /// Frobenius norm of the friction superoperator `(eta/2)[X, {P, .}]`,
    /// the scale against which the Lindblad deviation is judged.
    pub fn friction_norm(&self) -> f64 {
        superop_frobenius(self.dim(), |basis| {
            commutator(&self.x, &anticommutator(&self.p, basis)) * c(0.5 * self.eta, 0.0)
        })
    }
}

impl Liouvillian for QuantumFokkerPlanck {
    fn dim(&self) -> usize {
        self.h.nrows()
    }
    fn apply(&self, rho: &CMat) -> CMat {
        let unitary = commutator(&self.h, rho) * c(0.0, -1.0);
        let noise = commutator(&self.x, &commutator(&self.x, rho)) * c(-0.5 * self.nu, 0.0);
        let friction =
            commutator(&self.x, &anticommutator(&self.p, rho)) * c(0.0, -0.5 * self.eta);
        unitary + noise + friction
    }
}

/// General Lindblad form
/// `d rho/dt = -i[H,rho] + sum_r W_r rho W_r^+ - (1/2){Gamma, rho}`,
/// `Gamma = sum_r W_r^+ W_r`.
pub struct LindbladGenerator {
    pub h: CMat,
    pub jumps: Vec<CMat>,
    gamma: CMat,
}

impl LindbladGenerator {
    pub fn new(h: CMat, jumps: Vec<CMat>) -> Result<Self> {
        check_hermitian(&h, "H")?;
        let n = h.nrows();
        let mut gamma = CMat::zeros(n, n);
        for w in &jumps {
            if w.nrows() != n || w.ncols() != n {
                return Err(Error::Invalid("jump operator dimension mismatch".into()));
            }
            gamma += dagger(w) * w;
        }
        Ok(LindbladGenerator { h, jumps, gamma })
    }
}

impl Liouvillian for LindbladGenerator {
    fn dim(&self) -> usize {
        self.h.nrows()
    }
    fn apply(&self, rho: &CMat) -> CMat {
        let mut out = commutator(&self.h, rho) * c(0.0, -1.0);
        out -= anticommutator(&self.gamma, rho) * c(0.5, 0.0);
        for w in &self.jumps {
            out += w * rho * dagger(w);
        }
        out
    }
}

/// Propagation record: the final state plus conservation monitors.
#[derive(Debug, Clone)]
pub struct Propagation {
    pub rho: DensityMatrix,
    /// max |tr rho - 1| seen along the evolution
    pub max_trace_drift: f64,
    /// min eigenvalue seen at the monitor checkpoints
    pub min_eigenvalue: f64,
    /// true when the positivity monitor tripped below `-1e-8` (non-fatal)
    pub positivity_warning: bool,
}

/// RK4 propagation with Hermiticity enforced by symmetrisation each step.
///
/// The default step is `0.01/||L||`; an explicit `step_override` replaces it
/// (RK4 stays stable up to `~2/||L||`).
pub fn propagate<L: Liouvillian + ?Sized>(
    gen: &L,
    rho0: &DensityMatrix,
    t: f64,
    step_override: Option<f64>,
) -> Result<Propagation> {
    if rho0.dim() != gen.dim() {
        return Err(Error::Invalid("state dimension mismatch".into()));
    }
    let step = step_override.unwrap_or_else(|| 0.01 / gen.norm_estimate());
    let nsteps = (t / step).ceil().max(1.0) as usize;
    let h = t / nsteps as f64;
    let mut rho = rho0.0.clone();
    let mut max_trace_drift = 0.0_f64;
    let mut min_eig = f64::INFINITY;
    let monitor_every = (nsteps / 32).max(1);
    for k in 0..nsteps {
        let k1 = gen.apply(&rho);
        let k2 = gen.apply(&(&rho + &k1 * c(0.5 * h, 0.0)));
        let k3 = gen.apply(&(&rho + &k2 * c(0.5 * h, 0.0)));
        let k4 = gen.apply(&(&rho + &k3 * c(h, 0.0)));
        rho += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(h / 6.0, 0.0);
        rho = hermitize(&rho);
        let tr = trace(&rho).re;
        max_trace_drift = max_trace_drift.max((tr - 1.0).abs());
        if !tr.is_finite() {
            return Err(Error::Step("trace diverged".into()));
        }
        if k % monitor_every == 0 || k == nsteps - 1 {
            let (vals, _) = eigh(&rho);
            min_eig = min_eig.min(vals[0]);
        }
    }
    let positivity_warning = min_eig < -1e-8;
    Ok(Propagation {
        rho: DensityMatrix(rho),
        max_trace_drift,
        min_eigenvalue: min_eig,
        positivity_warning,
    })
}

/// Secular (rotating-wave) generator from the `A_Omega` decomposition of a
/// coupling operator `W` against a bath spectrum.
///
/// Jump operators are `sqrt(C~(Omega)) |n> W_nm <m|` with
/// `Omega = -(E_n - E_m)`; Bohr frequencies closer than `1e-9 ||H||` are
/// merged into one `A_Omega`, while distinct frequencies closer than
/// `degeneracy_tol` abort with `Degeneracy` (the secular approximation
/// cannot resolve them).
pub fn secular_generator(
    h: &CMat,
    w: &CMat,
    bath: &BathSpectrum,
    degeneracy_tol: f64,
) -> Result<LindbladGenerator> {
    check_hermitian(h, "H")?;
    check_hermitian(w, "W")?;
    let n = h.nrows();
    let (vals, vecs) = eigh(h);
    let w_eig = dagger(&vecs) * w * &vecs;
    let h_norm = vals.iter().fold(0.0_f64, |a, &v| a.max(v.abs())).max(1e-300);
    let merge_tol = 1e-9 * h_norm;
    // collect Bohr frequencies of nonzero couplings
    let mut terms: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && w_eig[(i, j)].norm() > 1e-14 {
                terms.push((-(vals[i] - vals[j]), i, j));
            }
        }
    }
    terms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // group into A_Omega bins
    let mut bins: Vec<(f64, Vec<(usize, usize)>)> = Vec::new();
    for (omega, i, j) in terms {
        match bins.last_mut() {
            Some((o, list)) if (omega - *o).abs() <= merge_tol => list.push((i, j)),
            _ => bins.push((omega, vec![(i, j)])),
        }
    }
    for k in 1..bins.len() {
        let gap = bins[k].0 - bins[k - 1].0;
        if gap < degeneracy_tol {
            return Err(Error::Degeneracy(format!(
                "Bohr frequencies {} and {} closer than {degeneracy_tol}",
                bins[k - 1].0,
                bins[k].0
            )));
        }
    }
    // FGR rates take the full (detailed-balanced) spectrum, not its
    // symmetric part: w_{nm} = S~(-(E_n - E_m)) |W_nm|^2
    let mut jumps = Vec::new();
    for (omega, list) in &bins {
        let rate = bath.s_tilde(*omega);
        if rate <= 0.0 {
            continue;
        }
        let mut a = CMat::zeros(n, n);
        for &(i, j) in list {
            a[(i, j)] = w_eig[(i, j)];
        }
        jumps.push(&vecs * a * dagger(&vecs) * c(rate.sqrt(), 0.0));
    }
    // pure dephasing from the diagonal part at Omega = 0
    let mut diag = CMat::zeros(n, n);
    let mut has_diag = false;
    for i in 0..n {
        if w_eig[(i, i)].norm() > 1e-14 {
            diag[(i, i)] = w_eig[(i, i)];
            has_diag = true;
        }
    }
    if has_diag {
        let rate = bath.s_tilde(0.0);
        if rate > 0.0 {
            jumps.push(&vecs * diag * dagger(&vecs) * c(rate.sqrt(), 0.0));
        }
    }
    LindbladGenerator::new(h.clone(), jumps)
}

/// Pauli reduction: FGR rates `w_{nm} = S~(-(E_n - E_m)) |W_nm|^2` between
/// eigenstates (full detailed-balanced spectrum), plus the dephasing table
/// `gamma_{nm} = (Gamma_n + Gamma_m)/2 + (S~(0)/2)|W_nn - W_mm|^2`.
pub struct PauliReduction {
    pub energies: Vec<f64>,
    pub rates: RateMatrix,
    /// row-major `n x n` dephasing rates (zero on the diagonal)
    pub dephasing: Vec<f64>,
}

pub fn pauli_master(h: &CMat, w: &CMat, bath: &BathSpectrum) -> Result<PauliReduction> {
    check_hermitian(h, "H")?;
    check_hermitian(w, "W")?;
    let n = h.nrows();
    let (vals, vecs) = eigh(h);
    let w_eig = dagger(&vecs) * w * &vecs;
    let mut rates = Vec::new();
    for to in 0..n {
        for from in 0..n {
            if to != from {
                let omega = -(vals[to] - vals[from]);
                let r = bath.s_tilde(omega) * w_eig[(to, from)].norm_sqr();
                rates.push((to, from, r));
            }
        }
    }
    let rm = RateMatrix::from_rates(n, &rates)?;
    let mut dephasing = vec![0.0; n * n];
    let c0 = bath.s_tilde(0.0);
    for a in 0..n {
        for b in 0..n {
            if a != b {
                let gamma_a = -rm.rate(a, a);
                let gamma_b = -rm.rate(b, b);
                let diag = (w_eig[(a, a)] - w_eig[(b, b)]).norm_sqr();
                dephasing[a * n + b] = 0.5 * (gamma_a + gamma_b) + 0.5 * c0 * diag;
            }
        }
    }
    Ok(PauliReduction {
        energies: vals,
        rates: rm,
        dephasing,
    })
}

/// Bloch-vector state `(S_x, S_y, S_z)`.
pub type BlochVector = [f64; 3];

/// Bloch equations with longitudinal time `T1` and transverse time `T2`:
/// `dS_z/dt = -(S_z - S_eq)/T1`, and the transverse pair obeying
/// `S'' + (1/T2) S' + Omega^2 S = 0`, i.e. damped precession at
/// `Omega_eff = sqrt(Omega^2 - (1/(2 T2))^2)`.
///
/// Returns the state at `t` and warns (via the bool) when `T2 > 2 T1`.
pub fn bloch_evolve(
    omega: f64,
    t1: f64,
    t2: f64,
    s_eq: f64,
    s0: BlochVector,
    t: f64,
) -> Result<(BlochVector, bool)> {
    if t1 <= 0.0 || t2 <= 0.0 {
        return Err(Error::Invalid("T1, T2 must be positive".into()));
    }
    let unphysical = t2 > 2.0 * t1;
    let sz = s_eq + (s0[2] - s_eq) * (-t / t1).exp();
    // transverse: d/dt (Sx, Sy) = [[0, -Omega], [Omega, -gamma]] (Sx, Sy)
    // eigenvalues -gamma/2 +/- i Omega_eff
    let gamma = 1.0 / t2;
    let disc = omega * omega - 0.25 * gamma * gamma;
    let (sx, sy);
    if disc > 0.0 {
        let weff = disc.sqrt();
        let decay = (-0.5 * gamma * t).exp();
        let (cos_t, sin_t) = ((weff * t).cos(), (weff * t).sin());
        // solve the 2x2 linear system with matrix exponential in closed form:
        // exp(At) = e^{-g t/2} [cos(weff t) I + sin(weff t)/weff (A + g/2 I)]
        let a11 = 0.5 * gamma;
        let a12 = -omega;
        let a21 = omega;
        let a22 = -0.5 * gamma;
        sx = decay * ((cos_t + sin_t / weff * a11) * s0[0] + sin_t / weff * a12 * s0[1]);
        sy = decay * (sin_t / weff * a21 * s0[0] + (cos_t + sin_t / weff * a22) * s0[1]);
    } else {
        // overdamped
        let weff = (-disc).sqrt();
        let decay = (-0.5 * gamma * t).exp();
        let (ch, sh) = ((weff * t).cosh(), (weff * t).sinh());
        sx = decay * ((ch + sh / weff * (0.5 * gamma)) * s0[0] - sh / weff * omega * s0[1]);
        sy = decay * (sh / weff * omega * s0[0] + (ch - sh / weff * (0.5 * gamma)) * s0[1]);
    }
    Ok(([sx, sy, sz], unphysical))
}

fn superop_frobenius<F>(n: usize, apply: F) -> f64
where
    F: Fn(&CMat) -> CMat,
{
    let mut acc = 0.0;
    for col in 0..n * n {
        let (i, j) = (col % n, col / n);
        let mut basis = CMat::zeros(n, n);
        basis[(i, j)] = c(1.0, 0.0);
        let out = apply(&basis);
        acc += out.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    acc.sqrt()
}

fn check_hermitian(m: &CMat, name: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Invalid(format!("{name} must be square")));
    }
    if hermitian_deviation(m) > 1e-10 * frobenius(m).max(1.0) {
        return Err(Error::Invalid(format!("{name} must be Hermitian")));
    }
    Ok(())
}

/// Pauli matrices, truncated ladder operators and friends for model building.
pub mod ops {
    use super::{c, CMat};

    pub fn sigma_x() -> CMat {
        CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }
    pub fn sigma_y() -> CMat {
        CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
    }
    pub fn sigma_z() -> CMat {
        CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }
    pub fn sigma_minus() -> CMat {
        CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    /// annihilation operator on an `n`-level truncation
    pub fn lowering(n: usize) -> CMat {
        let mut a = CMat::zeros(n, n);
        for k in 1..n {
            a[(k - 1, k)] = c((k as f64).sqrt(), 0.0);
        }
        a
    }

    /// truncated position operator `(a + a^+)/sqrt(2 omega)` (mass = 1)
    pub fn position(n: usize, omega: f64) -> CMat {
        let a = lowering(n);
        (&a + super::dagger(&a)) * c(1.0 / (2.0 * omega).sqrt(), 0.0)
    }

    /// oscillator Hamiltonian `omega (n + 1/2)`
    pub fn oscillator(n: usize, omega: f64) -> CMat {
        let mut h = CMat::zeros(n, n);
        for k in 0..n {
            h[(k, k)] = c(omega * (k as f64 + 0.5), 0.0);
        }
        h
    }
}
