//! Shared model builders for the benchmark suite.

use num_complex::Complex64;
use statmech::linalg::{random_hermitian, CMat};
use statmech::master::{ops, LindbladGenerator};
use statmech::numerics::RandomStream;

/// Thermal two-level Lindblad model used by the propagation benchmark.
pub fn thermal_two_level() -> LindbladGenerator {
    let omega = 1.0;
    let t_bath = 0.8;
    let h = ops::sigma_z() * Complex64::new(0.5 * omega, 0.0);
    let g_down: f64 = 0.3;
    let g_up = g_down * (-omega / t_bath).exp();
    LindbladGenerator::new(
        h,
        vec![
            ops::sigma_minus() * Complex64::new(g_down.sqrt(), 0.0),
            ops::sigma_minus().transpose() * Complex64::new(g_up.sqrt(), 0.0),
        ],
    )
    .expect("valid generator")
}

/// Seeded dense Hermitian matrix for diagonalization-heavy benchmarks.
pub fn seeded_hermitian(n: usize, seed: u64) -> CMat {
    let mut stream = RandomStream::new(seed, 0);
    random_hermitian(n, &mut stream)
}
