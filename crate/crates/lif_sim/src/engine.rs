use crate::{to_us, ExternalDrive, LifParams, Result, SimError, SpikeData};
use network::NetworkTopology;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    /// Drive injected into every simulated neuron on top of its synapses.
    pub ext: ExternalDrive,
    pub seed: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { ext: ExternalDrive::ZERO, seed: 0 }
    }
}

struct Clock {
    dt_us: u64,
    n_steps: usize,
    duration_us: u64,
}

fn clock(p: &LifParams, duration: f64) -> Result<Clock> {
    p.validate()?;
    let dt_us = to_us(p.dt);
    if dt_us == 0 || (p.dt * 1000.0 - dt_us as f64).abs() > 1e-6 {
        return Err(SimError::Params(format!("dt = {} ms is not a whole number of microseconds", p.dt)));
    }
    let duration_us = to_us(duration);
    Ok(Clock { dt_us, n_steps: duration_us.div_ceil(dt_us) as usize, duration_us })
}

/// Integrates one layer given the spike trains of the layer below.
///
/// Exact exponential update per step: `V ← V·e^{−dt/τ} + drift + noise`,
/// then every presynaptic spike falling in the step is applied as an
/// instantaneous jump. A crossing of `v_th` is recorded at the end of the
/// step, followed by `v_r` clamping so that no ISI is shorter than `t_ref`.
/// Noise streams are keyed by (seed, layer, neuron).
pub fn simulate_layer(inputs: &SpikeData, t: &NetworkTopology, layer: usize, p: &LifParams, opts: &SimOptions) -> Result<SpikeData> {
    if layer >= t.n_layers() {
        return Err(SimError::Argument(format!("layer {layer} out of range")));
    }
    run_layer(inputs, t, layer, layer, p, opts)
}

fn run_layer(inputs: &SpikeData, t: &NetworkTopology, syn_layer: usize, stream: usize, p: &LifParams, opts: &SimOptions) -> Result<SpikeData> {
    if inputs.n() != t.n() {
        return Err(SimError::Argument(format!("{} input trains for {} neurons", inputs.n(), t.n())));
    }
    if !(opts.ext.variance >= 0.0) || !opts.ext.mean.is_finite() {
        return Err(SimError::Params("external drive must be finite with non-negative variance".into()));
    }
    let c = clock(p, inputs.duration)?;
    let steps: Vec<Vec<u32>> = inputs
        .trains
        .iter()
        .map(|tr| tr.iter().map(|&s| (to_us(s) / c.dt_us).min(c.n_steps as u64 - 1) as u32).collect())
        .collect();
    let syn = t.layer(syn_layer);
    let w_e = t.cfg.w0 * t.unit_excitatory();
    let w_i = t.cfg.w0 * t.unit_inhibitory();
    let k_e = t.k_e();

    let decay = (-p.dt / p.tau_m).exp();
    let drift = opts.ext.mean * p.tau_m * (1.0 - decay);
    let noise = (opts.ext.variance * p.tau_m / 2.0 * (1.0 - decay * decay)).sqrt();
    let hold_steps = ((p.t_ref / p.dt) - 1e-9).ceil() as usize;

    let trains: Vec<Vec<f64>> = (0..t.n())
        .into_par_iter()
        .map_init(
            || vec![0.0f64; c.n_steps],
            |buf, i| {
                buf.iter_mut().for_each(|x| *x = 0.0);
                for (slot, &src) in syn.row(i).iter().enumerate() {
                    let w = if slot < k_e { w_e } else { w_i };
                    for &k in &steps[src as usize] {
                        buf[k as usize] += w;
                    }
                }
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(((stream as u64) << 32) | i as u64);
                let mut v = p.v_r;
                let mut hold = 0usize;
                let mut out = Vec::new();
                for (k, &jump) in buf.iter().enumerate() {
                    if hold > 0 {
                        hold -= 1;
                        continue;
                    }
                    v = v * decay + drift + jump;
                    if noise > 0.0 {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        v += noise * z;
                    }
                    if v >= p.v_th {
                        let at = (k as u64 + 1) * c.dt_us;
                        if at < c.duration_us {
                            out.push(at as f64 / 1000.0);
                        }
                        v = p.v_r;
                        hold = hold_steps.saturating_sub(1);
                    }
                }
                out
            },
        )
        .collect();
    Ok(SpikeData { duration: inputs.duration, trains })
}

/// Runs every layer of a feedforward chain, handing each layer's output to
/// `sink` before computing the next one. Only the current layer is kept.
pub fn simulate_chain_with<F>(t: &NetworkTopology, inputs: &SpikeData, p: &LifParams, opts: &SimOptions, mut sink: F) -> Result<()>
where
    F: FnMut(usize, &SpikeData) -> Result<()>,
{
    let mut current = run_layer(inputs, t, 0, 0, p, opts)?;
    sink(1, &current)?;
    for k in 1..t.n_layers() {
        current = run_layer(&current, t, k, k, p, opts)?;
        sink(k + 1, &current)?;
    }
    Ok(())
}

/// All simulated layers; element `k` is layer `k + 1` (the input is layer 0).
pub fn simulate_chain(t: &NetworkTopology, inputs: &SpikeData, p: &LifParams, opts: &SimOptions) -> Result<Vec<SpikeData>> {
    let mut out = Vec::with_capacity(t.n_layers());
    simulate_chain_with(t, inputs, p, opts, |_, s| {
        out.push(s.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Recurrent network unfolded in time: one synapse realization applied at
/// every step. Step `s` uses the same noise stream as feedforward layer `s`.
pub fn simulate_recurrent_with<F>(t: &NetworkTopology, inputs: &SpikeData, steps: usize, p: &LifParams, opts: &SimOptions, mut sink: F) -> Result<()>
where
    F: FnMut(usize, &SpikeData) -> Result<()>,
{
    if !t.shared_weights {
        return Err(SimError::Argument("recurrent simulation needs a weight-shared topology".into()));
    }
    let mut current = inputs.clone();
    for s in 0..steps {
        current = run_layer(&current, t, 0, s, p, opts)?;
        sink(s + 1, &current)?;
    }
    Ok(())
}

pub fn simulate_recurrent(t: &NetworkTopology, inputs: &SpikeData, steps: usize, p: &LifParams, opts: &SimOptions) -> Result<Vec<SpikeData>> {
    let mut out = Vec::with_capacity(steps);
    simulate_recurrent_with(t, inputs, steps, p, opts, |_, s| {
        out.push(s.clone());
        Ok(())
    })?;
    Ok(out)
}
