//! Layer-to-layer connectivity for synfire-chain networks.
//!
//! Each layer has `N` neurons, the first `4N/5` excitatory. The packet is the
//! first `W` excitatory indices. Every neuron receives exactly `K_E`
//! excitatory and `K_I` inhibitory synapses from the previous layer; packet
//! neurons always receive the whole previous packet.

mod io;

pub use io::{read_topology, write_topology};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::ops::Range;
use std::sync::Arc;
use thiserror::Error;

/// Ratio of inhibitory to excitatory efficacy that offsets the 4:1 population ratio.
pub const G: f64 = 4.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("invalid topology: {0}")]
    Config(String),
    #[error("packet size W = {w} exceeds K_E = {k_e}")]
    PacketTooLarge { w: usize, k_e: usize },
    #[error("topology parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopologyConfig {
    pub n: usize,
    pub w: usize,
    pub lambda: f64,
    pub r: f64,
    pub w0: f64,
    pub layers: usize,
    pub seed: u64,
}

impl TopologyConfig {
    pub fn n_e(&self) -> usize {
        4 * self.n / 5
    }
    pub fn n_i(&self) -> usize {
        self.n / 5
    }
    pub fn k_e(&self) -> usize {
        (self.lambda * self.n_e() as f64).round() as usize
    }
    pub fn k_i(&self) -> usize {
        (self.lambda * self.n_i() as f64).round() as usize
    }

    /// Validates the configuration and returns any non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>, NetworkError> {
        let bad = |m: &str| Err(NetworkError::Config(m.to_string()));
        if self.n == 0 || self.n % 5 != 0 {
            return bad("N must be a positive multiple of 5");
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return bad("lambda must lie in (0, 1)");
        }
        if !(self.r > 0.0) || !self.r.is_finite() {
            return bad("r must be positive");
        }
        if !(self.w0 > 0.0) || !self.w0.is_finite() {
            return bad("w0 must be positive");
        }
        if self.layers == 0 {
            return bad("at least one layer is required");
        }
        if self.w == 0 {
            return bad("W must be positive");
        }
        let k_e = self.k_e();
        if self.w > k_e {
            return Err(NetworkError::PacketTooLarge { w: self.w, k_e });
        }
        if self.k_i() == 0 || k_e > self.n_e() || self.k_i() > self.n_i() {
            return bad("in-degrees do not fit the population sizes");
        }
        let mut warnings = Vec::new();
        for (name, exact) in [("K_E", self.lambda * self.n_e() as f64), ("K_I", self.lambda * self.n_i() as f64)] {
            if (exact - exact.round()).abs() > 1e-9 {
                warnings.push(format!("{name} = {exact} is not an integer; rounded to {}", exact.round()));
            }
        }
        Ok(warnings)
    }
}

/// Incoming synapses of one layer: row `i` lists `K_E` excitatory sources
/// followed by `K_I` inhibitory sources, each group sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerSynapses {
    k_e: usize,
    k_i: usize,
    sources: Vec<u32>,
}

impl LayerSynapses {
    pub fn from_rows(k_e: usize, k_i: usize, sources: Vec<u32>) -> Self {
        assert_eq!(sources.len() % (k_e + k_i), 0);
        Self { k_e, k_i, sources }
    }
    pub fn n_targets(&self) -> usize {
        self.sources.len() / self.degree()
    }
    pub fn degree(&self) -> usize {
        self.k_e + self.k_i
    }
    pub fn row(&self, i: usize) -> &[u32] {
        let d = self.degree();
        &self.sources[i * d..(i + 1) * d]
    }
    pub fn excitatory(&self, i: usize) -> &[u32] {
        &self.row(i)[..self.k_e]
    }
    pub fn inhibitory(&self, i: usize) -> &[u32] {
        &self.row(i)[self.k_e..]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkTopology {
    pub cfg: TopologyConfig,
    layers: Vec<Arc<LayerSynapses>>,
    pub shared_weights: bool,
}

impl NetworkTopology {
    pub fn n(&self) -> usize {
        self.cfg.n
    }
    pub fn k_e(&self) -> usize {
        self.cfg.k_e()
    }
    pub fn k_i(&self) -> usize {
        self.cfg.k_i()
    }
    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }
    pub fn layer(&self, k: usize) -> &LayerSynapses {
        &self.layers[k]
    }
    pub fn packet(&self) -> Range<usize> {
        0..self.cfg.w
    }
    pub fn excitatory(&self) -> Range<usize> {
        0..self.cfg.n_e()
    }
    pub fn inhibitory(&self) -> Range<usize> {
        self.cfg.n_e()..self.cfg.n
    }
    pub fn is_packet(&self, i: usize) -> bool {
        i < self.cfg.w
    }
    /// Excitatory weight in units of w0.
    pub fn unit_excitatory(&self) -> f64 {
        1.0
    }
    /// Inhibitory weight in units of w0, `-g r`.
    pub fn unit_inhibitory(&self) -> f64 {
        -G * self.cfg.r
    }
    /// Weight of synapse `slot` in a row, in units of w0.
    pub fn unit_weight(&self, slot: usize) -> f64 {
        if slot < self.k_e() {
            self.unit_excitatory()
        } else {
            self.unit_inhibitory()
        }
    }

    pub(crate) fn from_parts(cfg: TopologyConfig, layers: Vec<Arc<LayerSynapses>>, shared_weights: bool) -> Self {
        Self { cfg, layers, shared_weights }
    }
}

fn layer_rng(seed: u64, layer: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(layer as u64);
    rng
}

/// `k` of `0..m` without replacement, skipping `skip` when given.
fn sample_skipping(rng: &mut ChaCha8Rng, m: usize, k: usize, skip: Option<usize>) -> Vec<usize> {
    match skip {
        None => sample(rng, m, k).into_vec(),
        Some(x) => sample(rng, m - 1, k).into_iter().map(|s| if s >= x { s + 1 } else { s }).collect(),
    }
}

/// With `no_self` (recurrent mode) neuron `i` never lists itself; a packet
/// neuron then draws one extra background source to keep K_E.
fn sample_layer(cfg: &TopologyConfig, layer: usize, no_self: bool) -> LayerSynapses {
    let (n, w, n_e) = (cfg.n, cfg.w, cfg.n_e());
    let (k_e, k_i) = (cfg.k_e(), cfg.k_i());
    let mut rng = layer_rng(cfg.seed, layer);
    let mut sources = Vec::with_capacity(n * (k_e + k_i));
    for i in 0..n {
        let start = sources.len();
        if i < w && no_self {
            sources.extend((0..w as u32).filter(|&s| s as usize != i));
            sources.extend(sample(&mut rng, n_e - w, k_e - w + 1).into_iter().map(|s| (s + w) as u32));
        } else if i < w {
            sources.extend(0..w as u32);
            sources.extend(sample(&mut rng, n_e - w, k_e - w).into_iter().map(|s| (s + w) as u32));
        } else {
            let skip = (no_self && i < n_e).then_some(i);
            sources.extend(sample_skipping(&mut rng, n_e, k_e, skip).into_iter().map(|s| s as u32));
        }
        sources[start..].sort_unstable();
        let mid = sources.len();
        let skip = (no_self && i >= n_e).then(|| i - n_e);
        sources.extend(sample_skipping(&mut rng, n - n_e, k_i, skip).into_iter().map(|s| (s + n_e) as u32));
        sources[mid..].sort_unstable();
    }
    LayerSynapses { k_e, k_i, sources }
}

/// Builds `cfg.layers` independently sampled layers.
pub fn build_feedforward(cfg: &TopologyConfig) -> Result<NetworkTopology, NetworkError> {
    cfg.validate()?;
    let layers = (0..cfg.layers).map(|k| Arc::new(sample_layer(cfg, k, false))).collect();
    Ok(NetworkTopology::from_parts(*cfg, layers, false))
}

/// Unfolds a recurrent network in time: one synapse realization without
/// self-connections, shared by all `steps` layers.
pub fn build_recurrent(cfg: &TopologyConfig, steps: usize) -> Result<NetworkTopology, NetworkError> {
    let cfg = TopologyConfig { layers: steps, ..*cfg };
    cfg.validate()?;
    let shared = Arc::new(sample_layer(&cfg, 0, true));
    Ok(NetworkTopology::from_parts(cfg, vec![shared; steps], true))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeReport {
    /// Per layer: in-packet excitatory count of every packet neuron.
    pub packet_in_packet: Vec<Vec<usize>>,
    /// Per layer: in-packet excitatory count of every out-of-packet neuron.
    pub out_in_packet: Vec<Vec<usize>>,
    /// Per layer: excitatory sources outside the packet, averaged over all neurons.
    pub mean_background_excitatory: Vec<f64>,
    pub mean_inhibitory: Vec<f64>,
    pub totals_exact: bool,
}

impl DegreeReport {
    pub fn mean_out_in_packet(&self, layer: usize) -> f64 {
        let v = &self.out_in_packet[layer];
        v.iter().sum::<usize>() as f64 / v.len() as f64
    }
}

pub fn empirical_degree_report(t: &NetworkTopology) -> DegreeReport {
    let w = t.cfg.w as u32;
    let n_e = t.cfg.n_e() as u32;
    let mut report = DegreeReport {
        packet_in_packet: Vec::new(),
        out_in_packet: Vec::new(),
        mean_background_excitatory: Vec::new(),
        mean_inhibitory: Vec::new(),
        totals_exact: true,
    };
    for k in 0..t.n_layers() {
        let l = t.layer(k);
        let mut pin = Vec::new();
        let mut pout = Vec::new();
        let mut bg = 0usize;
        let mut inh = 0usize;
        for i in 0..t.n() {
            let exc = l.excitatory(i);
            let inn = l.inhibitory(i);
            let in_packet = exc.iter().filter(|&&s| s < w).count();
            let exc_ok = exc.len() == t.k_e() && exc.iter().all(|&s| s < n_e);
            let inh_ok = inn.len() == t.k_i() && inn.iter().all(|&s| s >= n_e && (s as usize) < t.n());
            report.totals_exact &= exc_ok && inh_ok;
            bg += exc.len() - in_packet;
            inh += inn.len();
            if t.is_packet(i) {
                pin.push(in_packet);
            } else {
                pout.push(in_packet);
            }
        }
        report.packet_in_packet.push(pin);
        report.out_in_packet.push(pout);
        report.mean_background_excitatory.push(bg as f64 / t.n() as f64);
        report.mean_inhibitory.push(inh as f64 / t.n() as f64);
    }
    report
}
