//! Classical stochastic dynamics: random walks, Langevin simulation,
//! 1D Fokker-Planck propagation and discrete rate equations.

use crate::numerics::RandomStream;
use crate::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Raw (no mean removal) autocovariance of a zero-mean record by FFT,
/// unbiased normalisation, first `max_lag + 1` lags.
fn raw_autocovariance(samples: &[f64], max_lag: usize) -> Vec<f64> {
    let n = samples.len();
    let m = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    let ifft = planner.plan_fft_inverse(m);
    let mut buf: Vec<Complex64> = samples
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(m)
        .collect();
    fft.process(&mut buf);
    for z in buf.iter_mut() {
        *z = Complex64::new(z.norm_sqr(), 0.0);
    }
    ifft.process(&mut buf);
    (0..=max_lag.min(n - 1))
        .map(|k| buf[k].re / m as f64 / (n - k) as f64)
        .collect()
}

/// Diffusion coefficient of a 1D hop process: `D = (1/2) sum_r r^2 w(r)`.
///
/// `rates` lists `(hop distance, rate)` pairs; a two-sided `+/-r` pair should
/// appear as two entries (or once with the summed rate).
pub fn random_walk_diffusion(rates: &[(f64, f64)]) -> Result<f64> {
    let mut d = 0.0;
    for &(r, w) in rates {
        if w < 0.0 {
            return Err(Error::Invalid("rates must be nonnegative".into()));
        }
        d += 0.5 * r * r * w;
    }
    if !d.is_finite() {
        return Err(Error::Invalid("sum r^2 w(r) must be finite".into()));
    }
    Ok(d)
}

/// Langevin parameters: `m dv/dt = -V'(x) - eta v + F(t)` with
/// `<F(t)F(t')> = nu delta(t - t')`; the implied temperature is `nu/(2 eta)`.
pub struct LangevinParams<F>
where
    F: Fn(f64) -> f64,
{
    pub mass: f64,
    pub eta: f64,
    pub nu: f64,
    /// force `-V'(x)`
    pub force: F,
    pub dt: f64,
}

impl<F: Fn(f64) -> f64> LangevinParams<F> {
    pub fn temperature(&self) -> f64 {
        self.nu / (2.0 * self.eta)
    }

    pub fn damping_time(&self) -> f64 {
        self.mass / self.eta
    }
}

/// Ensemble statistics of a Langevin run.
#[derive(Debug, Clone)]
pub struct LangevinStats {
    /// `<(1/2) m v^2>` over the ensemble and time
    pub mean_kinetic: f64,
    /// jackknife (over trajectories) sigma of `mean_kinetic`
    pub mean_kinetic_sigma: f64,
    /// decay rate fitted to the velocity autocorrelation (expect `eta/m`)
    pub vv_decay_rate: f64,
    /// time-averaged MSD at the lag grid, `(lag, msd)`
    pub msd: Vec<(f64, f64)>,
    /// diffusion coefficient from the MSD slope between `5 tau` and `15 tau`
    pub d_msd: f64,
    /// diffusion coefficient from `(1/2) C~_vv(0)`
    pub d_green_kubo: f64,
    /// stability flag: `dt` not small against `m/eta`
    pub dt_suspect: bool,
}

/// Langevin ensemble simulation.
///
/// The drag is integrated exactly per step (`v <- v e^{-eta dt/m}`), so the
/// deterministic `nu = 0` limit is machine-precision; the potential force is
/// first-order and the noise impulse per step is `sqrt(nu dt) * xi` with
/// standard normal `xi`, matching `<F F> = nu delta(t)`. Trajectories use
/// independent sub-streams split from `stream`, so results do not depend on
/// scheduling.
pub fn langevin_simulate<F>(
    params: &LangevinParams<F>,
    n_traj: usize,
    n_steps: usize,
    stream: &RandomStream,
) -> Result<LangevinStats>
where
    F: Fn(f64) -> f64,
{
    if n_traj == 0 || n_steps < 16 {
        return Err(Error::Invalid("need n_traj >= 1 and n_steps >= 16".into()));
    }
    let (m, eta, nu, dt) = (params.mass, params.eta, params.nu, params.dt);
    if m <= 0.0 || eta <= 0.0 || nu < 0.0 || dt <= 0.0 {
        return Err(Error::Invalid("m, eta, dt > 0 and nu >= 0 required".into()));
    }
    let tau = params.damping_time();
    let dt_suspect = dt > 0.1 * tau;
    let noise_scale = (nu * dt).sqrt() / m;
    let drag = (-dt / tau).exp();
    let t0 = params.temperature();

    // lag grid for the time-averaged MSD
    let total_t = n_steps as f64 * dt;
    let max_lag_steps = ((15.0 * tau) / dt).round() as usize;
    let max_lag_steps = max_lag_steps.min(n_steps / 2).max(2);
    let lag_grid: Vec<usize> = (1..=16)
        .map(|k| (k * max_lag_steps / 16).max(1))
        .collect();

    let mut kin_per_traj = Vec::with_capacity(n_traj);
    let mut msd_acc = vec![0.0; lag_grid.len()];
    let mut corr_acc: Vec<f64> = Vec::new();
    let mut corr_len = 0usize;

    for traj in 0..n_traj {
        let mut rng = stream.split(traj as u64);
        // start in equilibrium to avoid transients
        let mut v = if nu > 0.0 { (t0 / m).sqrt() * rng.gaussian() } else { 1.0 };
        let mut x = 0.0;
        let mut xs = Vec::with_capacity(n_steps);
        let mut vs = Vec::with_capacity(n_steps);
        let mut kin = 0.0;
        for _ in 0..n_steps {
            v = drag * v + (params.force)(x) / m * dt + noise_scale * rng.gaussian();
            x += v * dt;
            if !v.is_finite() || !x.is_finite() {
                return Err(Error::Step("Langevin trajectory diverged".into()));
            }
            xs.push(x);
            vs.push(v);
            kin += 0.5 * m * v * v;
        }
        kin_per_traj.push(kin / n_steps as f64);
        // time-averaged MSD over sliding windows
        for (i, &lag) in lag_grid.iter().enumerate() {
            let mut acc = 0.0;
            let mut count = 0usize;
            let stride = lag.max(1);
            let mut s = 0;
            while s + lag < xs.len() {
                let d = xs[s + lag] - xs[s];
                acc += d * d;
                count += 1;
                s += stride;
            }
            if count > 0 {
                msd_acc[i] += acc / count as f64;
            }
        }
        // velocity autocovariance (only for a subset, it dominates the cost);
        // the true velocity mean is zero, so no mean removal: subtracting the
        // per-trajectory sample mean would bias every lag by -C~(0)/T_traj
        if traj < 64 {
            let want = ((8.0 * tau / dt) as usize + 2).min(vs.len() - 1);
            let cov = raw_autocovariance(&vs, want);
            if corr_acc.is_empty() {
                corr_len = cov.len();
                corr_acc = vec![0.0; corr_len];
            }
            for i in 0..corr_len.min(cov.len()) {
                corr_acc[i] += cov[i];
            }
        }
    }

    let mean_kinetic = kin_per_traj.iter().sum::<f64>() / n_traj as f64;
    let var_kin = kin_per_traj
        .iter()
        .map(|k| (k - mean_kinetic).powi(2))
        .sum::<f64>()
        / (n_traj as f64 - 1.0).max(1.0);
    let mean_kinetic_sigma = (var_kin / n_traj as f64).sqrt();

    // fit ln C_vv(tau) between 0.2 and 1.5 damping times (skipping lag 0,
    // where the Euler discretisation leaves an O(dt) bump)
    let n_corr_traj = n_traj.min(64) as f64;
    let fit_start = ((0.2 * tau / dt) as usize).max(1);
    let fit_end = corr_len.min(((1.5 * tau) / dt) as usize).max(fit_start + 2);
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut n_fit = 0.0;
    for i in fit_start..fit_end {
        let c = corr_acc[i] / n_corr_traj;
        if c <= 0.0 {
            break;
        }
        let (xv, yv) = (i as f64 * dt, c.ln());
        sx += xv;
        sy += yv;
        sxx += xv * xv;
        sxy += xv * yv;
        n_fit += 1.0;
    }
    let vv_decay_rate = if n_fit > 1.0 {
        -(n_fit * sxy - sx * sy) / (n_fit * sxx - sx * sx)
    } else {
        f64::NAN
    };

    let msd: Vec<(f64, f64)> = lag_grid
        .iter()
        .zip(&msd_acc)
        .map(|(&lag, &acc)| (lag as f64 * dt, acc / n_traj as f64))
        .collect();
    // slope between the 1/3 and end points of the lag grid (transient-free)
    let i0 = lag_grid.len() / 3;
    let i1 = lag_grid.len() - 1;
    let d_msd = (msd[i1].1 - msd[i0].1) / (2.0 * (msd[i1].0 - msd[i0].0));

    // Green-Kubo: D = (1/2) C~_vv(0) ~ integral of the averaged covariance
    let mut d_gk = 0.0;
    for (i, c) in corr_acc.iter().enumerate() {
        let w = if i == 0 { 0.5 } else { 1.0 };
        d_gk += w * c / n_corr_traj * dt;
    }
    let _ = total_t;
    Ok(LangevinStats {
        mean_kinetic,
        mean_kinetic_sigma,
        vv_decay_rate,
        msd,
        d_msd,
        d_green_kubo: d_gk,
        dt_suspect,
    })
}

/// Deterministic limit check helper: velocity after time `t` with `nu = 0`.
pub fn langevin_deterministic_velocity(m: f64, eta: f64, v0: f64, t: f64) -> f64 {
    v0 * (-(eta / m) * t).exp()
}

/// 1D Fokker-Planck / Smoluchowski propagation on a uniform grid,
/// `d rho/dt = -d/dx [u rho - D d rho/dx]`, with Scharfetter-Gummel face
/// fluxes built from potential differences so the discrete stationary state
/// is the Gibbs profile exactly (when `u = -(D/T) V'`).
pub struct FokkerPlanck1d {
    pub x: Vec<f64>,
    pub dx: f64,
    pub diffusion: f64,
    /// drift velocity at the faces, from `-mu V'` midpoints
    face_drift: Vec<f64>,
}

impl FokkerPlanck1d {
    /// Build from a drift velocity field `u(x) = -mu V'(x)` evaluated at
    /// cell faces.
    pub fn new<U>(x_min: f64, x_max: f64, n_cells: usize, diffusion: f64, drift: U) -> Result<Self>
    where
        U: Fn(f64) -> f64,
    {
        if n_cells < 3 || x_max <= x_min {
            return Err(Error::Invalid("need n_cells >= 3 and x_max > x_min".into()));
        }
        if diffusion < 0.0 {
            return Err(Error::Invalid("diffusion must be nonnegative".into()));
        }
        let dx = (x_max - x_min) / n_cells as f64;
        let x: Vec<f64> = (0..n_cells)
            .map(|i| x_min + (i as f64 + 0.5) * dx)
            .collect();
        let face_drift: Vec<f64> = (0..=n_cells)
            .map(|i| drift(x_min + i as f64 * dx))
            .collect();
        Ok(FokkerPlanck1d { x, dx, diffusion, face_drift })
    }

    /// Explicit-Euler propagation of `rho0` to time `t` with step `dt`.
    ///
    /// Fails with `Stability` when `dt` violates the diffusive CFL condition.
    pub fn propagate(&self, rho0: &[f64], t: f64, dt: f64) -> Result<Vec<f64>> {
        let n = self.x.len();
        if rho0.len() != n {
            return Err(Error::Invalid("rho0 length mismatch".into()));
        }
        let d = self.diffusion;
        let dx = self.dx;
        let max_u = self
            .face_drift
            .iter()
            .fold(0.0_f64, |a, &u| a.max(u.abs()));
        let cfl = if d > 0.0 {
            0.5 * dx * dx / (2.0 * d + max_u * dx)
        } else if max_u > 0.0 {
            0.9 * dx / max_u
        } else {
            f64::INFINITY
        };
        if dt > cfl {
            return Err(Error::Stability(format!(
                "dt = {dt} exceeds the stable step {cfl:.3e}"
            )));
        }
        let steps = (t / dt).round().max(1.0) as usize;
        let mut rho = rho0.to_vec();
        let mut flux = vec![0.0; n + 1]; // zero-flux boundaries
        for _ in 0..steps {
            for i in 1..n {
                let u = self.face_drift[i];
                flux[i] = if d > 0.0 {
                    // Scharfetter-Gummel: F = (D/dx)[B(-w) rho_i - B(w) rho_{i+1}]
                    // with w = u dx / D and B the Bernoulli function
                    let w = u * dx / d;
                    let (bm, bp) = (bernoulli(-w), bernoulli(w));
                    d / dx * (bm * rho[i - 1] - bp * rho[i])
                } else {
                    // pure advection: upwind
                    if u >= 0.0 {
                        u * rho[i - 1]
                    } else {
                        u * rho[i]
                    }
                };
            }
            for i in 0..n {
                rho[i] -= dt / dx * (flux[i + 1] - flux[i]);
            }
        }
        Ok(rho)
    }

    /// Gibbs profile `exp(-V/T)` normalised on the grid, for comparisons.
    pub fn gibbs<V>(&self, potential: V, t: f64) -> Vec<f64>
    where
        V: Fn(f64) -> f64,
    {
        let mut g: Vec<f64> = self.x.iter().map(|&x| (-potential(x) / t).exp()).collect();
        let z: f64 = g.iter().sum::<f64>() * self.dx;
        for v in &mut g {
            *v /= z;
        }
        g
    }
}

/// `B(w) = w/(e^w - 1)`, the exponential-fitting weight.
fn bernoulli(w: f64) -> f64 {
    if w.abs() < 1e-10 {
        1.0 - 0.5 * w
    } else {
        w / w.exp_m1()
    }
}

/// Transition-rate matrix: `W[(n, m)]` is the rate `m -> n` for off-diagonal
/// entries; diagonals hold `-Gamma_n` so columns sum to zero.
#[derive(Debug, Clone)]
pub struct RateMatrix {
    pub n: usize,
    pub w: Vec<f64>, // row-major n x n
}

impl RateMatrix {
    /// Build from off-diagonal rates; diagonals are filled in.
    pub fn from_rates(n: usize, rates: &[(usize, usize, f64)]) -> Result<Self> {
        let mut w = vec![0.0; n * n];
        for &(to, from, rate) in rates {
            if to >= n || from >= n || to == from {
                return Err(Error::Invalid("bad rate index".into()));
            }
            if rate < 0.0 {
                return Err(Error::Invalid("rates must be nonnegative".into()));
            }
            w[to * n + from] += rate;
        }
        let mut m = RateMatrix { n, w };
        m.fill_diagonal();
        Ok(m)
    }

    /// Detailed-balance bath rates on a level ladder:
    /// `W_{nm} = w_eps + 2 w_beta/(1 + e^{(E_n - E_m)/T})` for every pair.
    pub fn thermal_bath(energies: &[f64], w_eps: f64, w_beta: f64, t: f64) -> Result<Self> {
        let n = energies.len();
        let mut rates = Vec::new();
        for to in 0..n {
            for from in 0..n {
                if to == from {
                    continue;
                }
                let de = energies[to] - energies[from];
                let r = w_eps + 2.0 * w_beta / (1.0 + (de / t).exp());
                rates.push((to, from, r));
            }
        }
        RateMatrix::from_rates(n, &rates)
    }

    fn fill_diagonal(&mut self) {
        let n = self.n;
        for from in 0..n {
            let mut gamma = 0.0;
            for to in 0..n {
                if to != from {
                    gamma += self.w[to * n + from];
                }
            }
            self.w[from * n + from] = -gamma;
        }
    }

    pub fn rate(&self, to: usize, from: usize) -> f64 {
        self.w[to * self.n + from]
    }

    /// Connected components of the transition graph (undirected closure).
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut stack = vec![s];
            let mut comp = Vec::new();
            seen[s] = true;
            while let Some(v) = stack.pop() {
                comp.push(v);
                for u in 0..n {
                    if u != v
                        && !seen[u]
                        && (self.rate(u, v) > 0.0 || self.rate(v, u) > 0.0)
                    {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Parse from CSV rows of off-diagonal rates `to,from,rate`.
    pub fn from_csv(n: usize, text: &str) -> Result<Self> {
        let mut rates = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.to_lowercase().starts_with("to") {
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(Error::Invalid(format!("line {i}: want to,from,rate")));
            }
            let to: usize = parts[0].parse().map_err(|_| Error::Invalid(format!("line {i}")))?;
            let from: usize = parts[1].parse().map_err(|_| Error::Invalid(format!("line {i}")))?;
            let rate: f64 = parts[2].parse().map_err(|_| Error::Invalid(format!("line {i}")))?;
            rates.push((to, from, rate));
        }
        RateMatrix::from_rates(n, &rates)
    }
}

/// Evolve `dp/dt = W p` to time `t` by RK4 with a step set by the fastest
/// rate. Probability is conserved to machine precision because the RK4
/// update inherits the zero column sums.
pub fn rate_evolve(w: &RateMatrix, p0: &[f64], t: f64) -> Result<Vec<f64>> {
    let n = w.n;
    if p0.len() != n {
        return Err(Error::Invalid("p0 length mismatch".into()));
    }
    let max_gamma = (0..n).map(|i| -w.w[i * n + i]).fold(0.0_f64, f64::max);
    let step = if max_gamma > 0.0 { 0.02 / max_gamma } else { t };
    crate::numerics::rk4_advance(
        |_, p, dp| {
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += w.w[i * n + j] * p[j];
                }
                dp[i] = acc;
            }
        },
        p0,
        0.0,
        t,
        step.min(t).max(1e-300),
    )
}

/// Stationary distribution from the null space of `W`.
///
/// Power iteration on the stochastic matrix `I + dt W`, with a dense
/// Gaussian-elimination fallback; errors with the component list when the
/// chain is disconnected.
pub fn rate_steady_state(w: &RateMatrix) -> Result<Vec<f64>> {
    let comps = w.components();
    if comps.len() != 1 {
        return Err(Error::SingularW(format!(
            "{} disconnected components: {:?}",
            comps.len(),
            comps
        )));
    }
    let n = w.n;
    let max_gamma = (0..n).map(|i| -w.w[i * n + i]).fold(0.0_f64, f64::max);
    if max_gamma == 0.0 {
        return Ok(vec![1.0 / n as f64; n]);
    }
    let dt = 0.5 / max_gamma;
    let mut p = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for _ in 0..200_000 {
        let mut delta = 0.0;
        for i in 0..n {
            let mut acc = p[i];
            for j in 0..n {
                acc += dt * w.w[i * n + j] * p[j];
            }
            next[i] = acc;
        }
        let s: f64 = next.iter().sum();
        for i in 0..n {
            next[i] /= s;
            delta += (next[i] - p[i]).abs();
        }
        std::mem::swap(&mut p, &mut next);
        if delta < 1e-15 {
            return Ok(p);
        }
    }
    // dense fallback: replace the last balance row by normalisation
    dense_null_space(w)
}

fn dense_null_space(w: &RateMatrix) -> Result<Vec<f64>> {
    let n = w.n;
    if n > 200 {
        return Err(Error::SingularW(
            "dense null-space fallback limited to n <= 200".into(),
        ));
    }
    let mut a = vec![0.0; n * (n + 1)];
    for i in 0..n - 1 {
        for j in 0..n {
            a[i * (n + 1) + j] = w.w[i * n + j];
        }
    }
    for j in 0..n {
        a[(n - 1) * (n + 1) + j] = 1.0;
    }
    a[(n - 1) * (n + 1) + n] = 1.0;
    // Gaussian elimination with partial pivoting
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * (n + 1) + col].abs() > a[piv * (n + 1) + col].abs() {
                piv = r;
            }
        }
        if a[piv * (n + 1) + col].abs() < 1e-14 {
            return Err(Error::SingularW("null space dimension != 1".into()));
        }
        if piv != col {
            for k in 0..=n {
                a.swap(col * (n + 1) + k, piv * (n + 1) + k);
            }
        }
        let d = a[col * (n + 1) + col];
        for r in 0..n {
            if r != col {
                let f = a[r * (n + 1) + col] / d;
                for k in col..=n {
                    a[r * (n + 1) + k] -= f * a[col * (n + 1) + k];
                }
            }
        }
    }
    Ok((0..n)
        .map(|i| a[i * (n + 1) + n] / a[i * (n + 1) + i])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hop_diffusion() {
        // nearest-neighbor hops at rate w, spacing a: D = w a^2
        let w = 0.7;
        let a = 1.3;
        let d = random_walk_diffusion(&[(a, w), (-a, w)]).unwrap();
        assert!((d - w * a * a).abs() < 1e-14);
        assert_eq!(random_walk_diffusion(&[]).unwrap(), 0.0);
        // +/-1 at rate 1, +/-2 at rate 0.25: D = (1/2)(2*1 + 2*4*0.25) = 2
        let d = random_walk_diffusion(&[(1.0, 1.0), (-1.0, 1.0), (2.0, 0.25), (-2.0, 0.25)])
            .unwrap();
        assert!((d - 2.0).abs() < 1e-14);
    }

    #[test]
    fn random_walk_msd_cross_check() {
        // simulate the two-scale hop process and compare the MSD slope
        let rates = [(1.0, 1.0), (-1.0, 1.0), (2.0, 0.25), (-2.0, 0.25)];
        let d_exact = random_walk_diffusion(&rates).unwrap();
        let total: f64 = rates.iter().map(|r| r.1).sum();
        let stream = RandomStream::new(20, 0);
        let t_end = 40.0;
        let n_traj = 4000;
        let mut sum_sq = 0.0;
        for k in 0..n_traj {
            let mut rng = stream.split(k as u64);
            let mut x = 0.0;
            let mut t = 0.0;
            loop {
                t += -rng.uniform().ln() / total;
                if t >= t_end {
                    break;
                }
                let mut pick = rng.uniform() * total;
                for &(dx, w) in &rates {
                    if pick < w {
                        x += dx;
                        break;
                    }
                    pick -= w;
                }
            }
            sum_sq += x * x;
        }
        let d_sim = sum_sq / n_traj as f64 / (2.0 * t_end);
        let sigma = d_exact * (2.0 / n_traj as f64).sqrt();
        assert!(
            (d_sim - d_exact).abs() < 4.0 * sigma,
            "{d_sim} vs {d_exact}"
        );
    }

    #[test]
    fn langevin_deterministic_decay() {
        // nu = 0: v(t) = v0 e^{-(eta/m) t} to 1e-6 at dt = 1e-4
        let (m, eta, dt) = (1.0, 1.0, 1e-4);
        let drag = (-eta / m * dt as f64).exp();
        let mut v = 1.0;
        let steps = 10_000; // t = 1
        for _ in 0..steps {
            v *= drag;
        }
        let v_exact = langevin_deterministic_velocity(m, eta, 1.0, 1.0);
        assert!((v - v_exact).abs() < 1e-6, "{v} vs {v_exact}");
        assert!((v_exact - (-1.0_f64).exp()).abs() < 1e-12);
        // the full simulator in the nu = 0 branch reproduces the same decay
        // through its time-averaged kinetic energy over [0, 1]
        let p = LangevinParams {
            mass: m,
            eta,
            nu: 0.0,
            force: |_| 0.0,
            dt,
        };
        let stream = RandomStream::new(1, 0);
        let stats = langevin_simulate(&p, 1, steps, &stream).unwrap();
        let expected = (1.0 - (-2.0_f64).exp()) / 4.0; // (1/2) m <v^2>, v0 = 1
        assert!(
            (stats.mean_kinetic - expected).abs() < 1e-4,
            "{} vs {expected}",
            stats.mean_kinetic
        );
    }

    #[test]
    fn green_kubo_via_autocorrelation_spectrum() {
        // D from the MSD slope and D = (1/2) C~_vv(0) estimated through the
        // shared correlation kernel agree within 10% at 1e4 steps x 1e3
        // trajectories (the per-trajectory mean removal biases the ensemble
        // covariance by -C~(0)/T_traj, kept small by the long records)
        let p = LangevinParams {
            mass: 1.0,
            eta: 1.0,
            nu: 2.0,
            force: |_| 0.0,
            dt: 0.02,
        };
        let stream = RandomStream::new(88, 0);
        let stats = langevin_simulate(&p, 1000, 10_000, &stream).unwrap();
        // ensemble-averaged covariance from the public estimator on a
        // subset of trajectories, integrated over 5 damping times
        let tau = p.damping_time();
        let mut avg: Vec<f64> = Vec::new();
        let n_used = 200;
        for k in 0..n_used {
            let mut rng = stream.split(k as u64);
            let drag = (-p.dt / tau as f64).exp();
            let ns = (p.nu * p.dt).sqrt() / p.mass;
            let mut v = (p.temperature() / p.mass).sqrt() * rng.gaussian();
            let vs: Vec<f64> = (0..10_000)
                .map(|_| {
                    v = drag * v + ns * rng.gaussian();
                    v
                })
                .collect();
            let spec = crate::numerics::autocorrelation_spectrum(&vs, p.dt).unwrap();
            let keep = (5.0 * tau / p.dt) as usize;
            if avg.is_empty() {
                avg = vec![0.0; keep];
            }
            for i in 0..keep {
                avg[i] += spec.corr[i] / n_used as f64;
            }
        }
        let mut d_gk = 0.0;
        for (i, c) in avg.iter().enumerate() {
            let w = if i == 0 { 0.5 } else { 1.0 };
            d_gk += w * c * p.dt;
        }
        assert!(
            ((d_gk - stats.d_msd) / stats.d_msd).abs() < 0.10,
            "GK {d_gk} vs MSD {}",
            stats.d_msd
        );
    }

    #[test]
    fn infinite_temperature_driving_heats() {
        // with a T_A = inf driving term on top of the bath rates, the steady
        // state sits above the bath's Gibbs energy
        let energies = [0.0, 0.7, 1.6];
        let t_bath = 0.6;
        let driven = RateMatrix::thermal_bath(&energies, 0.25, 0.4, t_bath).unwrap();
        let plain = RateMatrix::thermal_bath(&energies, 0.0, 0.4, t_bath).unwrap();
        let e_of = |p: &[f64]| -> f64 {
            p.iter().zip(&energies).map(|(p, e)| p * e).sum()
        };
        let e_driven = e_of(&rate_steady_state(&driven).unwrap());
        let e_gibbs = e_of(&rate_steady_state(&plain).unwrap());
        assert!(e_driven > e_gibbs + 1e-3, "{e_driven} vs {e_gibbs}");
    }

    #[test]
    fn langevin_equilibrium_and_einstein() {
        // eta = 1, nu = 2, m = 1 -> T = 1: <mv^2/2> = 0.5, D = T/eta = 1
        let p = LangevinParams {
            mass: 1.0,
            eta: 1.0,
            nu: 2.0,
            force: |_| 0.0,
            dt: 5e-3,
        };
        let stream = RandomStream::new(42, 0);
        let stats = langevin_simulate(&p, 400, 10_000, &stream).unwrap();
        assert!(
            (stats.mean_kinetic - 0.5).abs() < 3.0 * stats.mean_kinetic_sigma + 0.004,
            "kinetic {} +/- {}",
            stats.mean_kinetic,
            stats.mean_kinetic_sigma
        );
        assert!((stats.d_msd - 1.0).abs() < 0.05, "D_MSD = {}", stats.d_msd);
        // C_vv decay rate within 5% of eta/m
        assert!(
            (stats.vv_decay_rate - 1.0).abs() < 0.05,
            "rate {}",
            stats.vv_decay_rate
        );
        // Green-Kubo within 10%
        assert!(
            (stats.d_green_kubo - 1.0).abs() < 0.1,
            "GK {}",
            stats.d_green_kubo
        );
    }

    #[test]
    fn langevin_velocity_moments_maxwell() {
        let p = LangevinParams {
            mass: 2.0,
            eta: 1.5,
            nu: 3.0, // T = 1
            force: |_| 0.0,
            dt: 4e-3,
        };
        let stream = RandomStream::new(7, 0);
        // collect second and fourth moments by a small direct run
        let mut rng = stream.split(0);
        let (m, eta, nu, dt) = (p.mass, p.eta, p.nu, p.dt);
        let mut v: f64 = 0.0;
        let mut n = 0.0;
        let (mut m2, mut m4) = (0.0, 0.0);
        for _ in 0..400_000 {
            v += (-eta * v) / m * dt + (nu * dt).sqrt() / m * rng.gaussian();
            n += 1.0;
            m2 += v * v;
            m4 += v.powi(4);
        }
        m2 /= n;
        m4 /= n;
        let t = p.temperature();
        // Maxwell: <v^2> = T/m, <v^4> = 3 (T/m)^2; allow 3-sigma + O(dt) bias
        assert!((m2 - t / m).abs() < 0.02 * t / m, "m2 {m2}");
        assert!((m4 - 3.0 * (t / m).powi(2)).abs() < 0.06 * 3.0 * (t / m).powi(2), "m4 {m4}");
    }

    #[test]
    fn fokker_planck_free_diffusion_variance() {
        let d = 0.5;
        let fp = FokkerPlanck1d::new(-10.0, 10.0, 400, d, |_| 0.0).unwrap();
        let dx = fp.dx;
        // point initial condition at the center cell
        let mut rho0 = vec![0.0; fp.x.len()];
        let mid = fp.x.len() / 2;
        rho0[mid] = 1.0 / dx;
        let dt = 0.4 * dx * dx / (2.0 * d);
        let steps = 120.0 * dt;
        let rho = fp.propagate(&rho0, steps, dt).unwrap();
        let mean: f64 = fp.x.iter().zip(&rho).map(|(x, r)| x * r).sum::<f64>() * dx;
        let var: f64 = fp
            .x
            .iter()
            .zip(&rho)
            .map(|(x, r)| (x - mean) * (x - mean) * r)
            .sum::<f64>()
            * dx;
        let expected = 2.0 * d * steps + dx * dx / 12.0; // initial cell width
        assert!(
            ((var - expected) / expected).abs() < 0.01,
            "{var} vs {expected}"
        );
        // mass conserved
        let mass: f64 = rho.iter().sum::<f64>() * dx;
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fokker_planck_gibbs_stationary() {
        // harmonic V with mu = D/T: stationary state is the Gibbs profile
        let t = 0.7;
        let d = 0.35;
        let mu = d / t;
        let v = |x: f64| 0.5 * x * x;
        let fp = FokkerPlanck1d::new(-6.0, 6.0, 240, d, |x| -mu * x).unwrap();
        let gibbs = fp.gibbs(v, t);
        let dx = fp.dx;
        let rho0 = vec![1.0 / 12.0; fp.x.len()];
        let dt = 0.3 * dx * dx / (2.0 * d);
        let rho = fp.propagate(&rho0, 60.0, dt).unwrap();
        // KL divergence against Gibbs
        let mut kl = 0.0;
        for (r, g) in rho.iter().zip(&gibbs) {
            if *r > 1e-300 && *g > 1e-300 {
                kl += r * (r / g).ln() * dx;
            }
        }
        assert!(kl.abs() < 1e-6, "KL = {kl}");
    }

    #[test]
    fn fokker_planck_advection_translates() {
        let u = 1.0;
        let fp = FokkerPlanck1d::new(-10.0, 30.0, 800, 0.0, move |_| u).unwrap();
        let dx = fp.dx;
        let sigma: f64 = 1.0;
        let mut rho0: Vec<f64> = fp
            .x
            .iter()
            .map(|&x| (-0.5 * (x / sigma).powi(2)).exp())
            .collect();
        let z: f64 = rho0.iter().sum::<f64>() * dx;
        rho0.iter_mut().for_each(|r| *r /= z);
        let t_end = 10.0;
        let rho = fp.propagate(&rho0, t_end, 0.5 * dx / u).unwrap();
        let mean: f64 = fp.x.iter().zip(&rho).map(|(x, r)| x * r).sum::<f64>() * dx;
        assert!((mean - u * t_end).abs() < 0.01, "drifted to {mean}");
        // upwind scheme diffuses; profile stays normalised and single-peaked
        let mass: f64 = rho.iter().sum::<f64>() * dx;
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fokker_planck_orders() {
        // error first order in dt, second order in dx against a fine solution
        let d = 0.4;
        let t_end = 1.0;
        let run = |cells: usize, dt_frac: f64| -> Vec<f64> {
            let fp = FokkerPlanck1d::new(-8.0, 8.0, cells, d, |_| 0.0).unwrap();
            let rho0: Vec<f64> = fp
                .x
                .iter()
                .map(|&x| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt())
                .collect();
            let dt = dt_frac * fp.dx * fp.dx / (2.0 * d);
            fp.propagate(&rho0, t_end, dt).unwrap()
        };
        // dt order: same grid, halve dt
        let exact = |x: f64| {
            let s2 = 1.0 + 2.0 * d * t_end;
            (-0.5 * x * x / s2).exp() / (2.0 * std::f64::consts::PI * s2).sqrt()
        };
        let cells = 160;
        let fp = FokkerPlanck1d::new(-8.0, 8.0, cells, d, |_| 0.0).unwrap();
        let err = |rho: &[f64]| -> f64 {
            fp.x.iter()
                .zip(rho)
                .map(|(&x, &r)| (r - exact(x)).abs())
                .fold(0.0, f64::max)
        };
        let e_dx1 = err(&run(cells, 0.4));
        let fp2 = FokkerPlanck1d::new(-8.0, 8.0, 2 * cells, d, |_| 0.0).unwrap();
        let err2 = |rho: &[f64]| -> f64 {
            fp2.x
                .iter()
                .zip(rho)
                .map(|(&x, &r)| (r - exact(x)).abs())
                .fold(0.0, f64::max)
        };
        let e_dx2 = err2(&run(2 * cells, 0.4));
        // halving dx with dt ~ dx^2 reduces the error ~4x (both contributions
        // scale together for the explicit scheme)
        let ratio = e_dx1 / e_dx2;
        assert!(ratio > 3.0 && ratio < 5.5, "dx ratio {ratio}");
    }

    #[test]
    fn stability_guard_trips() {
        let fp = FokkerPlanck1d::new(-1.0, 1.0, 50, 1.0, |_| 0.0).unwrap();
        let rho0 = vec![0.5; 50];
        assert!(matches!(
            fp.propagate(&rho0, 1.0, 1.0),
            Err(Error::Stability(_))
        ));
    }

    #[test]
    fn rate_matrix_detailed_balance_gibbs() {
        let energies = [0.0, 0.4, 1.1, 1.7];
        let t = 0.8;
        let w = RateMatrix::thermal_bath(&energies, 0.0, 0.3, t).unwrap();
        let p = rate_steady_state(&w).unwrap();
        // Gibbs oracle
        let z: f64 = energies.iter().map(|e| (-e / t).exp()).sum();
        let mut kl = 0.0;
        for (i, &e) in energies.iter().enumerate() {
            let g = (-e / t).exp() / z;
            kl += p[i] * (p[i] / g).ln();
        }
        assert!(kl.abs() < 1e-10, "KL = {kl}");
    }

    #[test]
    fn two_level_bloch_like_relaxation() {
        // S_z = p+ - p-: dS/dt = (w+- - w-+) - (w+- + w-+) S
        let w_pm = 0.7; // rate -> + from -
        let w_mp = 0.4; // rate -> - from +
        let w = RateMatrix::from_rates(2, &[(0, 1, w_pm), (1, 0, w_mp)]).unwrap();
        let p0 = [1.0, 0.0];
        let t = 0.9;
        let p = rate_evolve(&w, &p0, t).unwrap();
        let s = p[0] - p[1];
        let s_eq = (w_pm - w_mp) / (w_pm + w_mp);
        let s_exact = s_eq + (1.0 - s_eq) * (-(w_pm + w_mp) * t).exp();
        assert!((s - s_exact).abs() < 1e-8, "{s} vs {s_exact}");
        let steady = rate_steady_state(&w).unwrap();
        assert!((steady[0] - steady[1] - s_eq).abs() < 1e-12);
    }

    #[test]
    fn symmetric_rates_uniform_steady_state() {
        let w = RateMatrix::from_rates(
            3,
            &[
                (0, 1, 0.5),
                (1, 0, 0.5),
                (1, 2, 0.5),
                (2, 1, 0.5),
                (0, 2, 0.5),
                (2, 0, 0.5),
            ],
        )
        .unwrap();
        let p = rate_steady_state(&w).unwrap();
        for v in p {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn probability_conserved_and_nonnegative() {
        let w = RateMatrix::thermal_bath(&[0.0, 0.5, 1.3], 0.1, 0.4, 1.0).unwrap();
        let p0 = [0.7, 0.2, 0.1];
        for t in [0.01, 0.1, 1.0, 10.0] {
            let p = rate_evolve(&w, &p0, t).unwrap();
            let sum: f64 = p.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            for v in &p {
                assert!(*v >= -1e-12);
            }
        }
    }

    #[test]
    fn disconnected_chain_reported() {
        let w = RateMatrix::from_rates(4, &[(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 2, 1.0)])
            .unwrap();
        match rate_steady_state(&w) {
            Err(Error::SingularW(msg)) => {
                assert!(msg.contains('2'), "{msg}")
            }
            other => panic!("expected SingularW, got {other:?}"),
        }
    }

    #[test]
    fn csv_rate_matrix() {
        let w = RateMatrix::from_csv(2, "to,from,rate\n0,1,0.5\n1,0,0.25\n").unwrap();
        assert_eq!(w.rate(0, 1), 0.5);
        assert_eq!(w.rate(1, 0), 0.25);
        assert_eq!(w.rate(0, 0), -0.25);
    }
}
