//! Moment maps of the leaky integrate-and-fire neuron.
//!
//! Rates are in spikes per ms, `sigma` is the square root of the spike-count
//! variance rate (count variance ≈ σ²T over long windows), so a Poisson train
//! has `sigma = sqrt(mu)`.

mod params;
mod propagate;
mod siegert;

pub use params::{ExternalDrive, LifParams};
pub use propagate::{
    correlation_map, propagate_layer, synaptic_summary, CorrelationMap, DenseWeights, Identity, MomentState, SynapticSummary,
    TopologyWeights, Weights,
};
pub use siegert::{siegert, siegert_cv, siegert_mean, siegert_variance, SiegertOutput};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentError {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("degenerate input: sigma_hat = {0} must be positive")]
    Degenerate(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("argument out of range: {0}")]
    Argument(String),
    #[error(transparent)]
    Special(#[from] special_fns::SpecialFnError),
}

pub type Result<T> = std::result::Result<T, MomentError>;
