//! Lee-Yang zeros of the finite-chain Ising partition polynomial.
//!
//! With fugacity `z = e^{2 beta h}`, the partition function of `N` spins is
//! `Z = e^{-beta h N} sum_k c_k z^k` where `c_k` sums `e^{beta eps sum ss'}`
//! over configurations with `k` up spins. The circle theorem puts every root
//! of the polynomial on `|z| = 1` for ferromagnetic couplings.

use crate::linalg::polynomial_roots;
use crate::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Chain,
    Ring,
    /// all-to-all bonds
    Complete,
}

/// Exact polynomial coefficients `c_0..c_N` in the fugacity by enumeration
/// over the `2^N` spin configurations.
pub fn partition_polynomial(n: usize, beta_eps: f64, geometry: Geometry) -> Result<Vec<f64>> {
    if n == 0 || n > 20 {
        return Err(Error::Invalid("need 1 <= N <= 20 for exact enumeration".into()));
    }
    let bonds: Vec<(usize, usize)> = match geometry {
        Geometry::Chain => (0..n - 1).map(|i| (i, i + 1)).collect(),
        Geometry::Ring => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        Geometry::Complete => {
            let mut b = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    b.push((i, j));
                }
            }
            b
        }
    };
    let mut coeffs = vec![0.0_f64; n + 1];
    for state in 0u32..(1 << n) {
        let spin = |i: usize| -> f64 {
            if state >> i & 1 == 1 {
                1.0
            } else {
                -1.0
            }
        };
        let mut bond_sum = 0.0;
        for &(i, j) in &bonds {
            bond_sum += spin(i) * spin(j);
        }
        let k = state.count_ones() as usize;
        coeffs[k] += (beta_eps * bond_sum).exp();
    }
    Ok(coeffs)
}

/// Complex roots of the partition polynomial in the fugacity.
///
/// At `beta_eps == 0` the polynomial factorizes to `(1 + z)^N`, so the roots
/// are all exactly `-1` (a multiple root that iterative solvers would smear).
pub fn lee_yang_zeros(n: usize, beta_eps: f64, geometry: Geometry) -> Result<Vec<Complex64>> {
    if n > 14 {
        return Err(Error::Invalid("root finding is limited to N <= 14".into()));
    }
    if beta_eps == 0.0 {
        return Ok(vec![Complex64::new(-1.0, 0.0); n]);
    }
    let coeffs = partition_polynomial(n, beta_eps, geometry)?;
    Ok(polynomial_roots(&coeffs))
}

/// Evaluate the grand polynomial at a real fugacity; sanity route used by
/// tests against the direct transfer-matrix partition function.
pub fn evaluate_polynomial(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}
