//! Mean-field reduction: every neuron in the packet shares (μ₊, σ₊), every
//! other neuron (μ₋, σ₋); pairs inside the packet share ρ₊, all other pairs ρ₋.

mod brute;
mod closed;
mod region;
mod step;

pub use brute::{brute_force_ab, meanfield_moments, region_sums, RegionSums};
pub use closed::{compute_ab, ClosedForm, CrossTermReading, AB};
pub use region::{check_synfire_condition, self_consistent_region, synfire_region, SelfConsistentRegion, SynfireRegion};
pub use step::{classify_attractor, iterate, meanfield_step, plateaued, Attractor, MeanFieldOptions, Trajectory, MAX_STEPS, PLATEAU_STEPS, PLATEAU_TOL};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeanFieldError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("invalid state: {0}")]
    State(String),
    #[error("degenerate state: both sigmas are zero")]
    Degenerate,
    #[error("argument error: {0}")]
    Argument(String),
    #[error(transparent)]
    Moment(#[from] moment_maps::MomentError),
}

pub type Result<T> = std::result::Result<T, MeanFieldError>;

/// Rates in spikes/ms; sigmas are square roots of count-variance rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldState {
    pub mu_in: f64,
    pub mu_out: f64,
    pub sigma_in: f64,
    pub sigma_out: f64,
    pub rho_in: f64,
    pub rho_out: f64,
}

impl MeanFieldState {
    /// Poisson layer at `rate` spikes/ms with the given pairwise correlations.
    pub fn poisson(rate: f64, rho_in: f64, rho_out: f64) -> Self {
        Self { mu_in: rate, mu_out: rate, sigma_in: rate.sqrt(), sigma_out: rate.sqrt(), rho_in, rho_out }
    }

    pub fn mu_in_hz(&self) -> f64 {
        self.mu_in * 1000.0
    }

    pub fn mu_out_hz(&self) -> f64 {
        self.mu_out * 1000.0
    }

    pub fn gap(&self) -> f64 {
        self.rho_in - self.rho_out
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.mu_in, self.mu_out, self.sigma_in, self.sigma_out, self.rho_in, self.rho_out]
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.as_array();
        if a.iter().any(|v| !v.is_finite()) {
            return Err(MeanFieldError::State("non-finite entry".into()));
        }
        if a[..4].iter().any(|&v| v < 0.0) {
            return Err(MeanFieldError::State("rates and sigmas must be non-negative".into()));
        }
        if self.rho_in.abs() > 1.0 || self.rho_out.abs() > 1.0 {
            return Err(MeanFieldError::State("correlations must lie in [-1, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldParams {
    pub n: usize,
    pub w: usize,
    pub lambda: f64,
    pub r: f64,
    pub g: f64,
    pub w0: f64,
}

impl MeanFieldParams {
    pub fn new(n: usize, w: usize, lambda: f64, r: f64, w0: f64) -> Self {
        Self { n, w, lambda, r, g: network::G, w0 }
    }
    pub fn n_e(&self) -> usize {
        4 * self.n / 5
    }
    pub fn k_e(&self) -> usize {
        (self.lambda * self.n_e() as f64).round() as usize
    }
    pub fn k_i(&self) -> usize {
        (self.lambda * (self.n / 5) as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(MeanFieldError::Params(m.into()));
        if self.n == 0 || self.n % 5 != 0 {
            return bad("N must be a positive multiple of 5");
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return bad("lambda must lie in (0, 1)");
        }
        if !(self.r > 0.0 && self.g > 0.0 && self.w0 > 0.0) {
            return bad("r, g and w0 must be positive");
        }
        if self.w == 0 || self.w > self.k_e() {
            return bad("packet size must satisfy 0 < W <= K_E");
        }
        Ok(())
    }
}
