//! Gamma, Riemann zeta and polylogarithm evaluation.
//!
//! `Li_s(z) = sum_{l>=1} z^l / l^s` drives every ideal quantum-gas state
//! equation. Evaluation strategy: direct series for `|z| <= 1/2`, the
//! expansion in `ln z` near the Bose endpoint `z -> 1`, and for the Fermi
//! branch a stable split quadrature with Sommerfeld asymptotics at large
//! `ln z`.

use crate::{Error, Result};

const PI: f64 = std::f64::consts::PI;

/// Lanczos g=7, n=9 coefficients.
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Gamma function for real argument (poles at non-positive integers).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS[0];
        let t = x + 7.5;
        for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// Riemann zeta for real `s != 1`.
///
/// Borwein's alternating-series acceleration for `s > 0`, the functional
/// equation for `s < 0`.
pub fn zeta(s: f64) -> f64 {
    if s == 1.0 {
        return f64::INFINITY;
    }
    if s < 0.0 {
        // zeta(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s) zeta(1-s)
        return 2.0_f64.powf(s) * PI.powf(s - 1.0) * (PI * s / 2.0).sin() * gamma(1.0 - s)
            * zeta(1.0 - s);
    }
    if s == 0.0 {
        return -0.5;
    }
    let n = 50usize;
    // Borwein d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!), here scaled
    // by 1/n which cancels in the final ratio
    let mut d = vec![0.0_f64; n + 1];
    let mut acc = 1.0_f64;
    d[0] = acc;
    let mut term = 1.0_f64;
    for i in 1..=n {
        term *= 4.0 * ((n + i - 1) as f64) * ((n - i + 1) as f64)
            / (((2 * i) as f64) * ((2 * i - 1) as f64));
        acc += term;
        d[i] = acc;
    }
    let dn = d[n];
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 0..n {
        sum += sign * (d[k] - dn) / ((k + 1) as f64).powf(s);
        sign = -sign;
    }
    -sum / (dn * (1.0 - 2.0_f64.powf(1.0 - s)))
}

/// Dirichlet eta(s) = (1 - 2^{1-s}) zeta(s).
fn eta(s: f64) -> f64 {
    (1.0 - 2.0_f64.powf(1.0 - s)) * zeta(s)
}

/// Polylogarithm `Li_s(z)` for real `z` in `[-1, 1]`.
///
/// The Bose branch needs `0 <= z <= 1`; negative arguments (Fermi with small
/// fugacity) converge by the alternating series.
pub fn polylog(s: f64, z: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&z) {
        return Err(Error::Domain(format!("polylog argument z={z} outside [-1, 1]")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == 1.0 {
        if s <= 1.0 {
            return Err(Error::Domain(format!("Li_s(1) diverges for s={s} <= 1")));
        }
        return Ok(zeta(s));
    }
    if (s - 1.0).abs() < 1e-14 {
        return Ok(-(1.0 - z).ln());
    }
    if z.abs() <= 0.5 {
        return Ok(series(s, z));
    }
    if z < 0.0 {
        if z == -1.0 {
            return Ok(-eta(s));
        }
        // the alternating series converges too slowly near -1
        return Ok(-fermi_polylog_exp(s, (-z).ln()));
    }
    Ok(robinson(s, -(z.ln())))
}

/// Direct defining series; geometric convergence for |z| <= 1/2 and still
/// adequate (alternating) for -1 < z < -1/2.
fn series(s: f64, z: f64) -> f64 {
    let mut sum = 0.0;
    let mut zk = 1.0;
    for k in 1..10_000 {
        zk *= z;
        let term = zk / (k as f64).powf(s);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Expansion of `Li_s(e^{-t})` in powers of `t`, valid for `0 < t < 2 pi`.
fn robinson(s: f64, t: f64) -> f64 {
    let k_int = s.round();
    if (s - k_int).abs() < 1e-9 && k_int >= 2.0 {
        return robinson_integer(k_int as usize, t);
    }
    let mut sum = gamma(1.0 - s) * t.powf(s - 1.0);
    let mut tk = 1.0;
    let mut fact = 1.0;
    for k in 0..60 {
        if k > 0 {
            tk *= -t;
            fact *= k as f64;
        }
        let term = zeta(s - k as f64) * tk / fact;
        sum += term;
        if k > 4 && term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Integer-order variant with the logarithmic term:
/// `Li_n(e^{-t}) = t^{n-1}/(n-1)! (H_{n-1} - ln t) + sum_{k != n-1} zeta(n-k) (-t)^k/k!`.
fn robinson_integer(n: usize, t: f64) -> f64 {
    let mut harmonic = 0.0;
    let mut fact_nm1 = 1.0;
    for j in 1..n {
        harmonic += 1.0 / j as f64;
        fact_nm1 *= j as f64;
    }
    let sign = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let mut sum = sign * t.powi(n as i32 - 1) / fact_nm1 * (harmonic - t.ln());
    let mut tk = 1.0;
    let mut fact = 1.0;
    for k in 0..60 {
        if k > 0 {
            tk *= -t;
            fact *= k as f64;
        }
        if k == n - 1 {
            continue;
        }
        let term = zeta(n as f64 - k as f64) * tk / fact;
        sum += term;
        if k > n + 4 && term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `-Li_s(-e^x)` for any real `x` (complete Fermi-Dirac integral over Gamma(s)).
pub fn fermi_polylog_exp(s: f64, x: f64) -> f64 {
    if x <= -std::f64::consts::LN_2 {
        return -series(s, -x.exp());
    }
    if x <= 35.0 {
        // 1/Gamma(s) int_0^inf t^{s-1}/(e^{t-x}+1) dt, split at the step
        let tol = crate::numerics::Tolerance {
            abs: 1e-14,
            rel: 1e-12,
            max_evals: 400_000,
        };
        let f = |t: f64| {
            if t <= 0.0 {
                return 0.0;
            }
            let e = t - x;
            let occ = if e > 0.0 {
                let w = (-e).exp();
                w / (1.0 + w)
            } else {
                1.0 / (1.0 + e.exp())
            };
            t.powf(s - 1.0) * occ
        };
        let split = x.max(0.5);
        let head = crate::numerics::integrate(f, 0.0, split, tol).expect("fermi head integral");
        let tail = crate::numerics::integrate(f, split, f64::INFINITY, tol)
            .expect("fermi tail integral");
        return (head + tail) / gamma(s);
    }
    // Sommerfeld asymptotics: x^s/Gamma(s+1) [1 + sum_j c_{2j} s(s-1)...(s-2j+1) x^{-2j}]
    let c = [
        2.0 * eta(2.0),
        2.0 * eta(4.0),
        2.0 * eta(6.0),
        2.0 * eta(8.0),
    ];
    let mut corr = 1.0;
    let mut falling = 1.0;
    for (j, cj) in c.iter().enumerate() {
        let j1 = (2 * j + 1) as f64;
        falling *= (s - (j1 - 1.0)) * (s - j1);
        corr += cj * falling * x.powi(-2 * (j as i32 + 1));
    }
    x.powf(s) / gamma(s + 1.0) * corr
}
