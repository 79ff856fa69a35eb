//! Glue between a configuration and the theory and simulation crates.

use crate::{config::ExperimentConfig, HarnessError, Result};
use lif_sim::{generate_inputs, simulate_chain_with, simulate_recurrent_with, SimOptions};
use meanfield::{classify_attractor, iterate, Attractor, MeanFieldParams, MeanFieldState, Trajectory, MAX_STEPS};
use network::{build_feedforward, build_recurrent, TopologyConfig};
use spike_stats::{coefficient_of_variation, packet_aggregate, PacketStats};

/// One point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub w: usize,
    pub r: f64,
    pub lambda: f64,
}

impl Point {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self { w: cfg.network.w, r: cfg.network.r, lambda: cfg.network.lambda }
    }
}

/// Layer-0 state matching the generated inputs: Poisson trains at the
/// input rate with the input correlations.
pub fn initial_state(cfg: &ExperimentConfig) -> MeanFieldState {
    MeanFieldState::poisson(cfg.input.rate_hz / 1000.0, cfg.input.packet_correlation, cfg.input.background_correlation)
}

pub fn meanfield_params(cfg: &ExperimentConfig, pt: Point) -> MeanFieldParams {
    MeanFieldParams::new(cfg.network.n, pt.w, pt.lambda, pt.r, cfg.network.w0)
}

pub fn topology_config(cfg: &ExperimentConfig, pt: Point, seed: u64) -> TopologyConfig {
    TopologyConfig { n: cfg.network.n, w: pt.w, lambda: pt.lambda, r: pt.r, w0: cfg.network.w0, layers: cfg.network.layers, seed }
}

/// Whether the packet fits the excitatory in-degree at this point.
pub fn admissible(cfg: &ExperimentConfig, pt: Point) -> bool {
    let p = meanfield_params(cfg, pt);
    p.validate().is_ok()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryRun {
    /// Layers `0..=layers` of the chain.
    pub layers: Vec<MeanFieldState>,
    /// Label of the long-run iteration.
    pub label: Attractor,
    pub steady: Option<MeanFieldState>,
}

/// Iterates the chain for the configured depth, and further (up to
/// `MAX_STEPS`) to label the attractor.
pub fn run_theory(cfg: &ExperimentConfig, pt: Point) -> Result<TheoryRun> {
    let p = meanfield_params(cfg, pt);
    let depth = cfg.network.layers.max(MAX_STEPS);
    let traj: Trajectory = iterate(&initial_state(cfg), &p, &cfg.lif_params(), cfg.theory_drive(), &cfg.meanfield_options(), depth, false)
        .map_err(|e| HarnessError::Numerical(format!("mean-field iteration at W = {}, r = {}, lambda = {}: {e}", pt.w, pt.r, pt.lambda)))?;
    let label = classify_attractor(&traj.states, cfg.attractor.epsilon, cfg.attractor.delta);
    let steady = traj.plateau_at.map(|_| *traj.last());
    Ok(TheoryRun { layers: traj.states[..=cfg.network.layers].to_vec(), label, steady })
}

/// Measured statistics of one simulated layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStats {
    pub layer: usize,
    pub stats: PacketStats,
    /// Standard error of `stats.cv_mean`.
    pub cv_sem: f64,
}

fn seeds(seed: u64) -> (u64, u64, u64) {
    // Distinct streams for wiring, inputs and membrane noise.
    (seed, seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1), seed.wrapping_mul(0xBF58_476D_1CE4_E5B9).wrapping_add(2))
}

fn layer_stats(cfg: &ExperimentConfig, pt: Point, layer: usize, data: &lif_sim::SpikeData, seed: u64) -> Result<LayerStats> {
    let w = cfg.window_spec();
    let packet: Vec<usize> = (0..pt.w).collect();
    let stats = packet_aggregate(data, &packet, &w, cfg.window.pair_budget, seed ^ layer as u64)?;
    let cvs: Vec<f64> = data.trains.iter().filter_map(|tr| coefficient_of_variation(tr, data.duration, &w).ok()).collect();
    let cv_sem = if cvs.len() > 1 {
        let m = cvs.iter().sum::<f64>() / cvs.len() as f64;
        let var = cvs.iter().map(|c| (c - m).powi(2)).sum::<f64>() / (cvs.len() - 1) as f64;
        (var / cvs.len() as f64).sqrt()
    } else {
        f64::NAN
    };
    Ok(LayerStats { layer, stats, cv_sem })
}

/// Simulates the feedforward chain (or `steps` of the recurrent network
/// when `recurrent`), returning statistics of layers `1..=layers`.
pub fn run_sim(cfg: &ExperimentConfig, pt: Point, seed: u64, recurrent: bool) -> Result<Vec<LayerStats>> {
    let (topo_seed, input_seed, noise_seed) = seeds(seed);
    let tc = topology_config(cfg, pt, topo_seed);
    let topo = if recurrent { build_recurrent(&tc, cfg.network.layers)? } else { build_feedforward(&tc)? };
    let packet: Vec<usize> = (0..pt.w).collect();
    let inputs = generate_inputs(&cfg.input_spec(input_seed), cfg.network.n, &packet)?;
    let opts = SimOptions { ext: cfg.sim_drive(), seed: noise_seed };
    let lif = cfg.lif_params();
    let mut out = Vec::with_capacity(cfg.network.layers);
    let mut sink = |k: usize, data: &lif_sim::SpikeData| -> std::result::Result<(), lif_sim::SimError> {
        match layer_stats(cfg, pt, k, data, seed) {
            Ok(s) => {
                out.push(s);
                Ok(())
            }
            Err(e) => Err(lif_sim::SimError::Argument(format!("layer {k}: {e}"))),
        }
    };
    if recurrent {
        simulate_recurrent_with(&topo, &inputs, cfg.network.layers, &lif, &opts, &mut sink)?;
    } else {
        simulate_chain_with(&topo, &inputs, &lif, &opts, &mut sink)?;
    }
    Ok(out)
}

/// Label of a simulated chain from its last layer, with the thresholds of
/// the mean-field classifier. A finite noisy chain has no plateau to test.
pub fn sim_label(cfg: &ExperimentConfig, last: &PacketStats) -> Attractor {
    let (eps, delta) = (cfg.attractor.epsilon, cfg.attractor.delta);
    if !(last.rho_in > 1.0 - eps) {
        Attractor::Annihilation
    } else if last.rho_out.abs() < delta {
        Attractor::Synfire
    } else {
        Attractor::Invasion
    }
}
