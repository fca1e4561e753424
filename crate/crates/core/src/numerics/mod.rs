//! Shared numerical kernels used by every physics module.

mod ode;
mod quad;
mod rng;
mod roots;
mod spectrum;

pub use ode::rk4_advance;
pub use quad::{gauss_legendre_nodes, integrate, integrate_2d, Upper};
pub use rng::RandomStream;
pub use roots::find_root;
pub use spectrum::{autocorrelation_spectrum, CorrelationSpectrum};

/// Convergence targets shared by the quadrature and root-finding kernels.
///
/// At least one of `abs`, `rel` must be strictly positive.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_evals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-12,
            rel: 1e-10,
            max_evals: 1_000_000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64, max_evals: usize) -> crate::Result<Self> {
        if !(abs > 0.0 || rel > 0.0) || abs < 0.0 || rel < 0.0 {
            return Err(crate::Error::Invalid(
                "at least one of abs, rel must be positive".into(),
            ));
        }
        if max_evals == 0 {
            return Err(crate::Error::Invalid("max_evals must be >= 1".into()));
        }
        Ok(Tolerance { abs, rel, max_evals })
    }

    /// Allowed absolute error for a result of magnitude `scale`.
    pub fn bound(&self, scale: f64) -> f64 {
        f64::max(self.abs, self.rel * scale.abs())
    }
}
