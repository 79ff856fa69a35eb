use crate::{HarnessError, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Scale presets applied before the config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// N = 2000, 20 layers, 20 s input, 3 seeds.
    Desk,
    /// N = 500, 10 layers, 5 s input, 1 seed.
    Fast,
}

impl FromStr for Profile {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Self::Desk),
            "fast" => Ok(Self::Fast),
            other => Err(HarnessError::Config(format!("unknown profile {other:?} (expected desk or fast)"))),
        }
    }
}

/// A swept axis: either an explicit list or `"start:stop:step"` with the
/// stop value included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RangeRepr", into = "RangeRepr")]
pub struct Sweep(pub Vec<f64>);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RangeRepr {
    List(Vec<f64>),
    Span(String),
}

impl TryFrom<RangeRepr> for Sweep {
    type Error = String;
    fn try_from(r: RangeRepr) -> std::result::Result<Self, String> {
        let values = match r {
            RangeRepr::List(v) => v,
            RangeRepr::Span(s) => parse_span(&s)?,
        };
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err("sweep must hold at least one finite value".into());
        }
        Ok(Sweep(values))
    }
}

impl From<Sweep> for RangeRepr {
    fn from(s: Sweep) -> Self {
        RangeRepr::List(s.0)
    }
}

fn parse_span(s: &str) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad range {s:?}: expected start:stop:step")))
        .collect::<std::result::Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(format!("bad range {s:?}: expected start:stop:step"));
    };
    if !(step > 0.0) || stop < start {
        return Err(format!("bad range {s:?}: need step > 0 and stop >= start"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

impl Sweep {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
    /// Values as packet sizes; fails on anything not a positive integer.
    pub fn sizes(&self) -> Result<Vec<usize>> {
        self.0
            .iter()
            .map(|&v| {
                if v >= 1.0 && v.fract().abs() < 1e-9 {
                    Ok(v.round() as usize)
                } else {
                    Err(HarnessError::Config(format!("packet size {v} is not a positive integer")))
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkSection {
    pub n: usize,
    pub w: usize,
    pub lambda: f64,
    pub r: f64,
    /// Unit synaptic weight in mV.
    pub w0: f64,
    pub layers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LifSection {
    pub tau_m: f64,
    pub v_th: f64,
    pub v_r: f64,
    pub t_ref: f64,
    pub dt: f64,
}

/// Background drive of every neuron, as the free-membrane mean and SD it
/// would produce on its own. The mean-field iteration and the spiking
/// chain are calibrated separately (see README).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveSection {
    pub theory_dc_mv: f64,
    pub theory_sd_mv: f64,
    pub sim_dc_mv: f64,
    pub sim_sd_mv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InputSection {
    pub rate_hz: f64,
    pub duration_ms: f64,
    pub packet_correlation: f64,
    pub background_correlation: f64,
    pub jitter_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowSection {
    pub t_ms: f64,
    pub stride_ms: f64,
    pub discard_ms: f64,
    pub pair_budget: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AttractorSection {
    pub epsilon: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormChoice {
    Corrected,
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadingChoice {
    KeSquared,
    LambdaNeSquared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TheorySection {
    pub form: FormChoice,
    pub reading: ReadingChoice,
    pub exact_weights: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// r grid of the r-sweep, for both theory and simulation.
    pub r: Sweep,
    /// Packet sizes of the theory W-sweep.
    pub theory_w: Sweep,
    /// Packet sizes of the simulated W-sweep.
    pub sim_w: Sweep,
    /// r values of the theory W-sweep (low, 1, high).
    pub theory_w_r: Sweep,
    /// r values of the simulated W-sweep (low, 1, high).
    pub sim_w_r: Sweep,
    pub lambda: Sweep,
    /// Inner packet sizes of the simulated λ-sweep; theory scans every W.
    pub lambda_sim_w: Sweep,
    pub cv_w: Sweep,
    pub cv_r: Sweep,
    /// Matched recurrent/feedforward pairs, one per seed starting at the
    /// first configured seed.
    pub rnn_runs: usize,
    pub rnn_w: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub run: RunSection,
    pub network: NetworkSection,
    pub lif: LifSection,
    pub drive: DriveSection,
    pub input: InputSection,
    pub window: WindowSection,
    pub attractor: AttractorSection,
    pub theory: TheorySection,
    pub sweep: SweepSection,
}

fn span(s: &str) -> Sweep {
    Sweep(parse_span(s).expect("valid built-in range"))
}

impl Default for RunSection {
    fn default() -> Self {
        Self { seeds: vec![1, 2, 3], output_dir: PathBuf::from("out"), workers: 1 }
    }
}

impl Default for NetworkSection {
    fn default() -> Self {
        Self { n: 2000, w: 32, lambda: 0.1, r: 1.0, w0: 0.65, layers: 20 }
    }
}

impl Default for LifSection {
    fn default() -> Self {
        Self { tau_m: 20.0, v_th: 20.0, v_r: 8.0, t_ref: 11.0, dt: 0.1 }
    }
}

impl Default for DriveSection {
    fn default() -> Self {
        Self { theory_dc_mv: 25.2, theory_sd_mv: 0.14, sim_dc_mv: 12.5, sim_sd_mv: 0.8 }
    }
}

impl Default for InputSection {
    fn default() -> Self {
        Self { rate_hz: 20.0, duration_ms: 20_000.0, packet_correlation: 0.98, background_correlation: 0.1, jitter_ms: 0.5 }
    }
}

impl Default for WindowSection {
    fn default() -> Self {
        Self { t_ms: 200.0, stride_ms: 50.0, discard_ms: 500.0, pair_budget: 5000 }
    }
}

impl Default for AttractorSection {
    fn default() -> Self {
        Self { epsilon: 0.3, delta: 0.3 }
    }
}

impl Default for TheorySection {
    fn default() -> Self {
        Self { form: FormChoice::Corrected, reading: ReadingChoice::KeSquared, exact_weights: false }
    }
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            r: Sweep(vec![0.8, 0.85, 0.9, 0.95, 0.975, 1.0, 1.025, 1.05, 1.1, 1.15, 1.2, 1.25, 1.3]),
            theory_w: span("10:90:1"),
            sim_w: span("10:150:10"),
            theory_w_r: Sweep(vec![0.975, 1.0, 1.025]),
            sim_w_r: Sweep(vec![0.95, 1.0, 1.05]),
            lambda: span("0.05:0.2:0.025"),
            lambda_sim_w: span("20:100:20"),
            cv_w: Sweep(vec![30.0, 45.0, 60.0]),
            cv_r: Sweep(vec![0.95, 1.0, 1.05]),
            rnn_runs: 10,
            rnn_w: 50,
        }
    }
}

#[allow(clippy::derivable_impls)]
impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            run: RunSection::default(),
            network: NetworkSection::default(),
            lif: LifSection::default(),
            drive: DriveSection::default(),
            input: InputSection::default(),
            window: WindowSection::default(),
            attractor: AttractorSection::default(),
            theory: TheorySection::default(),
            sweep: SweepSection::default(),
        }
    }
}

impl ExperimentConfig {
    /// Built-in defaults with a profile's scale settings applied.
    pub fn for_profile(profile: Profile) -> Self {
        let mut c = Self::default();
        match profile {
            Profile::Desk => {}
            Profile::Fast => {
                c.network.n = 500;
                c.network.layers = 10;
                c.input.duration_ms = 5000.0;
                c.run.seeds = vec![1];
                // K_E is 40 at N = 500.
                c.network.w = 16;
                c.sweep.theory_w = span("2:40:1");
                c.sweep.sim_w = span("5:40:5");
                c.sweep.lambda_sim_w = span("10:40:10");
                c.sweep.cv_w = Sweep(vec![10.0, 20.0, 30.0]);
                c.sweep.rnn_w = 15;
                c.sweep.rnn_runs = 3;
            }
        }
        c
    }

    /// Profile settings, overridden key by key by the TOML text.
    pub fn parse(text: &str, profile: Profile) -> Result<Self> {
        let file: toml::Table = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        let base = toml::Table::try_from(Self::for_profile(profile)).map_err(|e| HarnessError::Config(e.to_string()))?;
        let merged = merge(base, file);
        let cfg: Self = merged.try_into().map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, profile: Profile) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, profile)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical TOML rendering, excluding the output
    /// directory and worker count, which do not affect results.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.run.output_dir = PathBuf::new();
        c.run.workers = 1;
        let digest = Sha256::digest(c.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(HarnessError::Config(m));
        if self.run.seeds.is_empty() {
            return err("run.seeds must not be empty".into());
        }
        if self.run.workers == 0 {
            return err("run.workers must be at least 1".into());
        }
        if self.network.layers == 0 {
            return err("network.layers must be at least 1".into());
        }
        let n = &self.network;
        let topo = network::TopologyConfig { n: n.n, w: n.w, lambda: n.lambda, r: n.r, w0: n.w0, layers: n.layers, seed: 0 };
        topo.validate().map_err(|e| HarnessError::Config(format!("network: {e}")))?;
        self.lif_params().validate().map_err(|e| HarnessError::Config(format!("lif: {e}")))?;
        let d = &self.drive;
        if ![d.theory_dc_mv, d.theory_sd_mv, d.sim_dc_mv, d.sim_sd_mv].iter().all(|v| v.is_finite()) || d.theory_sd_mv < 0.0 || d.sim_sd_mv < 0.0 {
            return err("drive values must be finite with non-negative SDs".into());
        }
        self.input_spec(0).validate().map_err(|e| HarnessError::Config(format!("input: {e}")))?;
        let w = self.window_spec();
        w.validate().map_err(|e| HarnessError::Config(format!("window: {e}")))?;
        w.n_windows(self.input.duration_ms).map_err(|e| HarnessError::Config(format!("window: {e}")))?;
        if self.window.pair_budget == 0 {
            return err("window.pair_budget must be positive".into());
        }
        let a = &self.attractor;
        if !(a.epsilon > 0.0 && a.epsilon < 1.0 && a.delta > 0.0 && a.delta < 1.0) {
            return err("attractor.epsilon and attractor.delta must lie in (0, 1)".into());
        }
        let s = &self.sweep;
        for (name, sw) in [("theory_w", &s.theory_w), ("sim_w", &s.sim_w), ("lambda_sim_w", &s.lambda_sim_w), ("cv_w", &s.cv_w)] {
            sw.sizes().map_err(|e| HarnessError::Config(format!("sweep.{name}: {e}")))?;
        }
        for (name, sw) in [("r", &s.r), ("theory_w_r", &s.theory_w_r), ("sim_w_r", &s.sim_w_r), ("cv_r", &s.cv_r)] {
            if sw.values().iter().any(|&r| r <= 0.0) {
                return err(format!("sweep.{name}: r must be positive"));
            }
        }
        if s.lambda.values().iter().any(|&l| !(l > 0.0 && l < 1.0)) {
            return err("sweep.lambda: values must lie in (0, 1)".into());
        }
        if s.rnn_runs == 0 || s.rnn_w == 0 {
            return err("sweep.rnn_runs and sweep.rnn_w must be positive".into());
        }
        Ok(())
    }

    pub fn lif_params(&self) -> moment_maps::LifParams {
        let l = &self.lif;
        moment_maps::LifParams::new(l.tau_m, l.v_th, l.v_r, l.t_ref, l.dt)
    }

    pub fn theory_drive(&self) -> moment_maps::ExternalDrive {
        moment_maps::ExternalDrive::from_potential(self.drive.theory_dc_mv, self.drive.theory_sd_mv, self.lif.tau_m)
    }

    pub fn sim_drive(&self) -> moment_maps::ExternalDrive {
        moment_maps::ExternalDrive::from_potential(self.drive.sim_dc_mv, self.drive.sim_sd_mv, self.lif.tau_m)
    }

    pub fn input_spec(&self, seed: u64) -> lif_sim::InputSpec {
        let i = &self.input;
        lif_sim::InputSpec {
            rate_hz: i.rate_hz,
            duration_ms: i.duration_ms,
            packet_correlation: i.packet_correlation,
            background_correlation: i.background_correlation,
            jitter_ms: i.jitter_ms,
            seed,
        }
    }

    pub fn window_spec(&self) -> spike_stats::WindowSpec {
        spike_stats::WindowSpec { t_ms: self.window.t_ms, stride_ms: self.window.stride_ms, discard_ms: self.window.discard_ms }
    }

    pub fn meanfield_options(&self) -> meanfield::MeanFieldOptions {
        meanfield::MeanFieldOptions {
            form: match self.theory.form {
                FormChoice::Corrected => meanfield::ClosedForm::Corrected,
                FormChoice::Printed => meanfield::ClosedForm::Printed,
            },
            reading: match self.theory.reading {
                ReadingChoice::KeSquared => meanfield::CrossTermReading::KeSquared,
                ReadingChoice::LambdaNeSquared => meanfield::CrossTermReading::LambdaNeSquared,
            },
            exact_weights: self.theory.exact_weights,
        }
    }
}

/// Recursive table merge; scalar and array values of `over` replace those
/// of `base`.
fn merge(mut base: toml::Table, over: toml::Table) -> toml::Table {
    for (k, v) in over {
        match (base.remove(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => {
                base.insert(k, toml::Value::Table(merge(b, o)));
            }
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
    base
}
