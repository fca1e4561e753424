use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("quadrature did not converge: estimate {estimate}, error {error}, {evals} evaluations")]
    NonConvergence {
        estimate: f64,
        error: f64,
        evals: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no sign change on bracket [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")]
    NoBracket { lo: f64, hi: f64, flo: f64, fhi: f64 },

    #[error("non-finite value during stepping: {0}")]
    Step(String),

    #[error("exponent range exceeded: {0}")]
    OverflowGuard(String),

    #[error("grid stability condition violated: {0}")]
    Stability(String),

    #[error("no feasible reaction coordinate: {0}")]
    Infeasible(String),

    #[error("rate matrix null space is not one-dimensional: {0}")]
    SingularW(String),

    #[error("Bohr frequencies collide within tolerance: {0}")]
    Degeneracy(String),

    #[error("frequency grid too coarse: {0}")]
    Grid(String),

    #[error("matrix is not unitary: deviation {0}")]
    Unitarity(f64),

    #[error("eigenphase unwrapping failed: {0}")]
    Branch(String),

    #[error("reverse kernel lacks mirrored support: {0}")]
    SupportMismatch(String),

    #[error("no condensation for density-of-states exponent alpha = {0} <= 1")]
    NoCondensation(f64),

    #[error("empty input")]
    EmptyInput,

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
