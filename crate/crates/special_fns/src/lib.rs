//! Dawson-type functions and their integrals.
//!
//! `D₋(u) = exp(u²) ∫_{-∞}^u exp(-v²) dv` and
//! `(D₋⊗D₋)(u) = exp(u²) ∫_{-∞}^u exp(-v²) D₋(v)² dv`
//! are the integrands of the mean and variance of the leaky integrate-and-fire
//! first-passage time.

mod dawson;
mod quad;
mod table;

pub use dawson::{dawson_minus, dawson_tensor, log_dawson_minus, passage_bound};
pub use quad::{gauss_kronrod, integrate_dminus, integrate_dtensor, Estimate, QuadratureSpec};
pub use table::{dawson_table, DawsonTable};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialFnError {
    #[error("non-finite argument {0}")]
    NonFinite(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate}, error {error})")]
    Convergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },
}

pub type Result<T> = std::result::Result<T, SpecialFnError>;

pub(crate) fn check_finite(u: f64) -> Result<()> {
    if u.is_finite() {
        Ok(())
    } else {
        Err(SpecialFnError::NonFinite(u))
    }
}
