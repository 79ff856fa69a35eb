//! Experiment orchestration: configuration, the parameter
//! sweeps over theory and spiking simulation, CSV output and manifests.

pub mod analysis;
pub mod config;
pub mod experiments;
pub mod model;
pub mod records;

pub use config::{ExperimentConfig, Profile, Sweep};
pub use experiments::{
    run_cv_evolution, run_lambda_sweep, run_meanfield_only, run_r_sweep, run_region_solve, run_rnn_vs_fnn, run_simulate, run_w_sweep, RegionReport,
    SimDetail, SweepResult,
};
pub use records::{write_manifest, Record, ResultSink, COLUMNS};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Network(#[from] network::NetworkError),
    #[error(transparent)]
    Sim(#[from] lif_sim::SimError),
    #[error(transparent)]
    Stats(#[from] spike_stats::StatsError),
}

impl HarnessError {
    /// Process exit status: 2 for configuration problems, 3 for numerical
    /// failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Network(_) => 2,
            HarnessError::Numerical(_) => 3,
            HarnessError::Sim(lif_sim::SimError::Params(_)) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
