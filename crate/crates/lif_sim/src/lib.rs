//! Spiking ground truth: correlated Poisson inputs and a time-stepped LIF
//! engine for feedforward chains and their weight-shared recurrent unfolding.

mod engine;
mod inputs;
mod raster;

pub use engine::{simulate_chain, simulate_chain_with, simulate_layer, simulate_recurrent, simulate_recurrent_with, SimOptions};
pub use inputs::{generate_inputs, InputSpec};
pub use moment_maps::{ExternalDrive, LifParams};
pub use raster::{read_raster, write_raster, Raster};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("raster parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Moment(#[from] moment_maps::MomentError),
}

pub type Result<T> = std::result::Result<T, SimError>;

/// Spike times are kept on a 1 µs grid so they survive a 3-decimal text
/// round trip exactly.
pub fn quantize_ms(t: f64) -> f64 {
    (t * 1000.0).round() / 1000.0
}

pub(crate) fn to_us(t: f64) -> u64 {
    (t * 1000.0).round() as u64
}

/// Spike trains of one layer over `[0, duration)` ms.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeData {
    pub duration: f64,
    pub trains: Vec<Vec<f64>>,
}

impl SpikeData {
    pub fn new(duration: f64, trains: Vec<Vec<f64>>) -> Result<Self> {
        let s = Self { duration, trains };
        s.validate()?;
        Ok(s)
    }

    pub fn silent(n: usize, duration: f64) -> Self {
        Self { duration, trains: vec![Vec::new(); n] }
    }

    pub fn n(&self) -> usize {
        self.trains.len()
    }

    pub fn total_spikes(&self) -> usize {
        self.trains.iter().map(Vec::len).sum()
    }

    /// Mean rate in Hz over the listed neurons.
    pub fn mean_rate_hz(&self, neurons: impl IntoIterator<Item = usize>) -> f64 {
        let (mut count, mut n) = (0usize, 0usize);
        for i in neurons {
            count += self.trains[i].len();
            n += 1;
        }
        if n == 0 {
            return 0.0;
        }
        1000.0 * count as f64 / (n as f64 * self.duration)
    }

    /// Times inside `[0, duration)` and strictly increasing per neuron.
    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(SimError::Argument("duration must be positive".into()));
        }
        for (i, tr) in self.trains.iter().enumerate() {
            if tr.iter().any(|&t| !(t >= 0.0 && t < self.duration)) {
                return Err(SimError::Argument(format!("neuron {i}: spike outside [0, {})", self.duration)));
            }
            if tr.windows(2).any(|w| w[1] <= w[0]) {
                return Err(SimError::Argument(format!("neuron {i}: spike times not strictly increasing")));
            }
        }
        Ok(())
    }

    /// Smallest inter-spike interval over all neurons.
    pub fn min_isi(&self) -> Option<f64> {
        self.trains.iter().flat_map(|tr| tr.windows(2).map(|w| w[1] - w[0])).reduce(f64::min)
    }
}
