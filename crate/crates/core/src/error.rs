use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("{name} = {value} is out of domain: {rule}")]
    Domain {
        name: &'static str,
        value: f64,
        rule: &'static str,
    },

    #[error("Gamma function has a pole at x = {0}")]
    GammaPole(f64),

    /// Adaptive quadrature ran out of subdivisions. Carries the best estimate.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate:e}, error estimate {error_estimate:e})"
    )]
    Convergence {
        estimate: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("integrand is not finite at {at}")]
    NonFinite { at: f64 },

    /// Eigenvalue gap of the reduced density matrix collapsed.
    #[error("degenerate reduced density spectrum (gap {gap:e}) at Ωt = {t}")]
    Degenerate { gap: f64, t: f64 },

    #[error("geometric phase changed by {gap:e} rad under grid doubling from {grid} intervals")]
    GridConvergence { gap: f64, grid: usize },

    #[error("{0}")]
    Invalid(String),
}
