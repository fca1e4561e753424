//! Autocorrelation and power-spectrum estimation (Wiener-Khinchin).

use crate::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Two-sided correlation data returned by [`autocorrelation_spectrum`].
#[derive(Debug, Clone)]
pub struct CorrelationSpectrum {
    /// Lag values `tau_k = k * dt`, `k = 0..n`.
    pub lags: Vec<f64>,
    /// Unbiased autocovariance `C(tau_k)` after mean removal.
    pub corr: Vec<f64>,
    /// Angular frequencies of the spectrum samples.
    pub omega: Vec<f64>,
    /// Power spectrum `C~(omega) = dt * sum_tau C(tau) e^{i omega tau}` over
    /// the symmetric lag window.
    pub spectrum: Vec<f64>,
}

/// Mean-removed unbiased autocovariance and its Fourier transform.
pub fn autocorrelation_spectrum(samples: &[f64], dt: f64) -> Result<CorrelationSpectrum> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::EmptyInput);
    }
    if dt <= 0.0 {
        return Err(Error::Invalid("dt must be positive".into()));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;

    // FFT-based autocovariance: zero-pad to 2n, |FFT|^2, inverse.
    let m = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    let ifft = planner.plan_fft_inverse(m);
    let mut buf: Vec<Complex64> = samples
        .iter()
        .map(|&x| Complex64::new(x - mean, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(m)
        .collect();
    fft.process(&mut buf);
    for z in buf.iter_mut() {
        *z = Complex64::new(z.norm_sqr(), 0.0);
    }
    ifft.process(&mut buf);
    let corr: Vec<f64> = (0..n)
        .map(|k| buf[k].re / m as f64 / (n - k) as f64)
        .collect();

    // symmetric extension [C0, C1..C_{n-1}, 0, C_{n-1}..C1] -> real even spectrum
    let me = 2 * n;
    let fft_e = planner.plan_fft_forward(me);
    let mut ext = vec![Complex64::new(0.0, 0.0); me];
    ext[0] = Complex64::new(corr[0], 0.0);
    for k in 1..n {
        ext[k] = Complex64::new(corr[k], 0.0);
        ext[me - k] = Complex64::new(corr[k], 0.0);
    }
    fft_e.process(&mut ext);
    let spectrum: Vec<f64> = ext.iter().map(|z| z.re * dt).collect();
    let omega: Vec<f64> = (0..me)
        .map(|j| 2.0 * std::f64::consts::PI * j as f64 / (me as f64 * dt))
        .collect();
    let lags = (0..n).map(|k| k as f64 * dt).collect();
    Ok(CorrelationSpectrum { lags, corr, omega, spectrum })
}

impl CorrelationSpectrum {
    /// `C~(omega = 0)`.
    pub fn at_zero(&self) -> f64 {
        self.spectrum[0]
    }
}
