use crate::{MomentError, Result};

/// Leaky integrate-and-fire constants (ms, mV).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifParams {
    pub tau_m: f64,
    pub v_th: f64,
    pub v_r: f64,
    pub t_ref: f64,
    pub dt: f64,
    /// Leak rate of the reduced first-passage integrals, 1/tau_m by convention.
    pub leak: f64,
}

impl Default for LifParams {
    fn default() -> Self {
        Self::new(20.0, 20.0, 0.0, 2.0, 0.1)
    }
}

impl LifParams {
    pub fn new(tau_m: f64, v_th: f64, v_r: f64, t_ref: f64, dt: f64) -> Self {
        Self { tau_m, v_th, v_r, t_ref, dt, leak: 1.0 / tau_m }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.tau_m > 0.0 && self.dt > 0.0 && self.t_ref > 0.0 && self.leak > 0.0;
        if !ok || ![self.tau_m, self.v_th, self.v_r, self.t_ref, self.dt, self.leak].iter().all(|v| v.is_finite()) {
            return Err(MomentError::Param("tau_m, dt, t_ref and leak must be positive and finite".into()));
        }
        if self.v_th <= self.v_r {
            return Err(MomentError::Param("V_th must exceed V_r".into()));
        }
        if self.dt > self.tau_m / 10.0 {
            return Err(MomentError::Param("dt must not exceed tau_m / 10".into()));
        }
        Ok(())
    }
}

/// Input that every neuron of a layer receives besides its synapses, as a
/// drift (mV/ms) and an independent white-noise variance rate (mV²/ms).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExternalDrive {
    pub mean: f64,
    pub variance: f64,
}

impl ExternalDrive {
    pub const ZERO: Self = Self { mean: 0.0, variance: 0.0 };

    /// Drive whose free membrane potential settles at `dc_mv` with stationary
    /// standard deviation `sd_mv` around it.
    pub fn from_potential(dc_mv: f64, sd_mv: f64, tau_m: f64) -> Self {
        Self { mean: dc_mv / tau_m, variance: 2.0 * sd_mv * sd_mv / tau_m }
    }

    pub fn is_zero(&self) -> bool {
        self.mean == 0.0 && self.variance == 0.0
    }
}
