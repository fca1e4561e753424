//! Classical fixed-step fourth-order Runge-Kutta integration.

use crate::{Error, Result};

/// Advance `dy/dt = f(t, y)` from `t0` to `t1` with steps of size at most `step`.
///
/// `f(t, &y, &mut dydt)` writes the derivative in place.
pub fn rk4_advance<F>(mut f: F, y0: &[f64], t0: f64, t1: f64, step: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if step <= 0.0 {
        return Err(Error::Invalid("step must be positive".into()));
    }
    let n = y0.len();
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0.to_vec());
    }
    let nsteps = (span.abs() / step).ceil().max(1.0) as usize;
    let h = span / nsteps as f64;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut t = t0;
    for _ in 0..nsteps {
        f(t, &y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        f(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        f(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * k3[i];
        }
        f(t + h, &tmp, &mut k4);
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if !y[i].is_finite() {
                return Err(Error::Step(format!("state component {i} diverged at t={t}")));
            }
        }
        t += h;
    }
    Ok(y)
}
