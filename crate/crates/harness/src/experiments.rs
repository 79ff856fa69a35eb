//! Parameter sweeps. Every sweep is a list of independent
//! points run on a bounded worker pool; finished points go through an
//! optional [`ResultSink`] and are skipped when a run is resumed.

use crate::analysis::{window_edges, WindowEdges};
use crate::config::ExperimentConfig;
use crate::model::{admissible, meanfield_params, run_sim, run_theory, sim_label, LayerStats, Point, TheoryRun};
use crate::records::{point_key, Record, ResultSink};
use crate::{HarnessError, Result};
use meanfield::{self_consistent_region, synfire_region, Attractor, SelfConsistentRegion, SynfireRegion};
use rayon::prelude::*;
use std::time::Instant;

/// Spiking statistics of one freshly computed point; resumed points only
/// come back as CSV records.
#[derive(Debug, Clone, PartialEq)]
pub struct SimDetail {
    pub experiment: String,
    pub point: Point,
    pub seed: u64,
    pub layers: Vec<LayerStats>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub records: Vec<Record>,
    pub details: Vec<SimDetail>,
}

impl SweepResult {
    fn extend(&mut self, other: SweepResult) {
        self.records.extend(other.records);
        self.details.extend(other.details);
    }

    /// Rows of one experiment tag at one layer.
    pub fn rows<'a>(&'a self, experiment: &'a str, layer: usize) -> impl Iterator<Item = &'a Record> + 'a {
        self.records.iter().filter(move |r| r.experiment == experiment && r.layer == layer)
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Theory,
    Sim { seed: u64, recurrent: bool },
}

#[derive(Debug, Clone)]
struct Task {
    experiment: String,
    point: Point,
    kind: Kind,
    /// Emit only the deepest layer.
    last_only: bool,
}

fn theory_rows(t: &Task, run: &TheoryRun, wall_ms: f64) -> Vec<Record> {
    let layers: Vec<usize> = if t.last_only { vec![run.layers.len() - 1] } else { (0..run.layers.len()).collect() };
    layers
        .into_iter()
        .map(|k| {
            let s = &run.layers[k];
            Record {
                experiment: t.experiment.clone(),
                r: t.point.r,
                w: t.point.w,
                lambda: t.point.lambda,
                seed: None,
                layer: k,
                rho_in_theory: Some(s.rho_in),
                rho_out_theory: Some(s.rho_out),
                rho_in_sim: None,
                rho_out_sim: None,
                mu_out_hz: Some(s.mu_out_hz()),
                cv_mean: None,
                label: run.label.as_str().to_string(),
                wall_ms,
            }
        })
        .collect()
}

fn sim_rows(cfg: &ExperimentConfig, t: &Task, seed: u64, theory: Option<&TheoryRun>, sims: &[LayerStats], wall_ms: f64) -> Vec<Record> {
    let label = sims.last().map(|l| sim_label(cfg, &l.stats)).unwrap_or(Attractor::Indeterminate);
    let chosen: Vec<&LayerStats> = if t.last_only { sims.last().into_iter().collect() } else { sims.iter().collect() };
    chosen
        .into_iter()
        .map(|l| {
            let th = theory.and_then(|th| th.layers.get(l.layer));
            Record {
                experiment: t.experiment.clone(),
                r: t.point.r,
                w: t.point.w,
                lambda: t.point.lambda,
                seed: Some(seed),
                layer: l.layer,
                rho_in_theory: th.map(|s| s.rho_in),
                rho_out_theory: th.map(|s| s.rho_out),
                rho_in_sim: Some(l.stats.rho_in),
                rho_out_sim: Some(l.stats.rho_out),
                mu_out_hz: Some(l.stats.mu_out),
                cv_mean: Some(l.stats.cv_mean),
                label: label.as_str().to_string(),
                wall_ms,
            }
        })
        .collect()
}

fn run_task(cfg: &ExperimentConfig, t: &Task) -> Result<(Vec<Record>, Option<SimDetail>)> {
    let start = Instant::now();
    match t.kind {
        Kind::Theory => {
            let run = run_theory(cfg, t.point)?;
            Ok((theory_rows(t, &run, start.elapsed().as_secs_f64() * 1e3), None))
        }
        Kind::Sim { seed, recurrent } => {
            // The theory columns beside a simulation are a cheap extra; a
            // parameter set the iteration cannot handle leaves them empty.
            let theory = if recurrent { None } else { run_theory(cfg, t.point).ok() };
            let sims = run_sim(cfg, t.point, seed, recurrent)?;
            let rows = sim_rows(cfg, t, seed, theory.as_ref(), &sims, start.elapsed().as_secs_f64() * 1e3);
            let detail = SimDetail { experiment: t.experiment.clone(), point: t.point, seed, layers: sims };
            Ok((rows, Some(detail)))
        }
    }
}

fn run_tasks(cfg: &ExperimentConfig, sink: Option<&ResultSink>, tasks: Vec<Task>) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.run.workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("worker pool: {e}")))?;
    let outputs: Vec<(Vec<Record>, Option<SimDetail>)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| {
                let seed = match t.kind {
                    Kind::Theory => None,
                    Kind::Sim { seed, .. } => Some(seed),
                };
                let key = point_key(&t.experiment, t.point.r, t.point.w, t.point.lambda, seed);
                if let Some(sink) = sink {
                    if sink.is_done(&key) {
                        return Ok((sink.previous(&key), None));
                    }
                }
                let out = run_task(cfg, t)?;
                if let Some(sink) = sink {
                    sink.write_point(&out.0)?;
                }
                Ok(out)
            })
            .collect::<Result<_>>()
    })?;
    let mut res = SweepResult::default();
    for (rows, detail) in outputs {
        res.records.extend(rows);
        res.details.extend(detail);
    }
    Ok(res)
}

fn theory_task(experiment: &str, point: Point, last_only: bool) -> Task {
    Task { experiment: experiment.into(), point, kind: Kind::Theory, last_only }
}

fn sim_tasks(cfg: &ExperimentConfig, experiment: &str, point: Point, last_only: bool) -> Vec<Task> {
    cfg.run
        .seeds
        .iter()
        .map(|&seed| Task { experiment: experiment.into(), point, kind: Kind::Sim { seed, recurrent: false }, last_only })
        .collect()
}

fn point(w: usize, r: f64, lambda: f64) -> Point {
    Point { w, r, lambda }
}

/// Layer-wise CV of the chain at the configured point, plus the steady
/// (last-layer) CV over the `cv_w × cv_r` grid.
pub fn run_cv_evolution(cfg: &ExperimentConfig, sink: Option<&ResultSink>) -> Result<SweepResult> {
    let base = Point::from_config(cfg);
    let mut tasks = sim_tasks(cfg, "cv_evolution", base, false);
    for &w in &cfg.sweep.cv_w.sizes()? {
        for &r in cfg.sweep.cv_r.values() {
            let pt = point(w, r, base.lambda);
            if admissible(cfg, pt) {
                tasks.extend(sim_tasks(cfg, "cv_grid", pt, true));
            }
        }
    }
    run_tasks(cfg, sink, tasks)
}

/// Theory and simulation over the r grid at the configured W and λ.
pub fn run_r_sweep(cfg: &ExperimentConfig, sink: Option<&ResultSink>) -> Result<SweepResult> {
    let base = Point::from_config(cfg);
    let mut tasks = Vec::new();
    for &r in cfg.sweep.r.values() {
        let pt = Point { r, ..base };
        tasks.push(theory_task("r_sweep/theory", pt, false));
        tasks.extend(sim_tasks(cfg, "r_sweep/sim", pt, false));
    }
    run_tasks(cfg, sink, tasks)
}

/// Attractor labels over W: theory on its r grid, simulation on its own.
pub fn run_w_sweep(cfg: &ExperimentConfig, sink: Option<&ResultSink>) -> Result<SweepResult> {
    let lambda = cfg.network.lambda;
    let mut tasks = Vec::new();
    for &r in cfg.sweep.theory_w_r.values() {
        for &w in &cfg.sweep.theory_w.sizes()? {
            let pt = point(w, r, lambda);
            if admissible(cfg, pt) {
                tasks.push(theory_task("w_sweep/theory", pt, true));
            }
        }
    }
    for &r in cfg.sweep.sim_w_r.values() {
        for &w in &cfg.sweep.sim_w.sizes()? {
            let pt = point(w, r, lambda);
            if admissible(cfg, pt) {
                tasks.extend(sim_tasks(cfg, "w_sweep/sim", pt, true));
            }
        }
    }
    run_tasks(cfg, sink, tasks)
}

/// Theory scans every admissible W per λ; simulation the `lambda_sim_w`
/// grid. Only the deepest layer is recorded.
pub fn run_lambda_sweep(cfg: &ExperimentConfig, sink: Option<&ResultSink>) -> Result<SweepResult> {
    let mut res = run_lambda_theory(cfg, sink, "lambda_sweep/theory")?;
    let mut tasks = Vec::new();
    for &lambda in cfg.sweep.lambda.values() {
        for &w in &cfg.sweep.lambda_sim_w.sizes()? {
            let pt = point(w, cfg.network.r, lambda);
            if admissible(cfg, pt) {
                tasks.extend(sim_tasks(cfg, "lambda_sweep/sim", pt, true));
            }
        }
    }
    res.extend(run_tasks(cfg, sink, tasks)?);
    Ok(res)
}

fn run_lambda_theory(cfg: &ExperimentConfig, sink: Option<&ResultSink>, tag: &str) -> Result<SweepResult> {
    let mut tasks = Vec::new();
    for &lambda in cfg.sweep.lambda.values() {
        let k_e = meanfield_params(cfg, point(1, cfg.network.r, lambda)).k_e();
        for w in 1..=k_e {
            let pt = point(w, cfg.network.r, lambda);
            if admissible(cfg, pt) {
                tasks.push(theory_task(tag, pt, true));
            }
        }
    }
    run_tasks(cfg, sink, tasks)
}

/// Matched recurrent and feedforward runs at `rnn_w`: same seed, hence the
/// same inputs and noise streams.
pub fn run_rnn_vs_fnn(cfg: &ExperimentConfig, sink: Option<&ResultSink>) -> Result<SweepResult> {
    let pt = Point { w: cfg.sweep.rnn_w, ..Point::from_config(cfg) };
    if !admissible(cfg, pt) {
        return Err(HarnessError::Config(format!("sweep.rnn_w = {} does not fit the network", pt.w)));
    }
    let first = cfg.run.seeds[0];
    let mut tasks = Vec::new();
    for k in 0..cfg.sweep.rnn_runs as u64 {
        let seed = first + k;
        tasks.push(Task { experiment: "rnn_vs_fnn/fnn".into(), point: pt, kind: Kind::Sim { seed, recurrent: false }, last_only: false });
        tasks.push(Task { experiment: "rnn_vs_fnn/rnn".into(), point: pt, kind: Kind::Sim { seed, recurrent: true }, last_only: false });
    }
    run_tasks(cfg, sink, tasks)
}

/// Theory-only r-, W- and λ-sweeps.
pub fn run_meanfield_only(cfg: &ExperimentConfig, sink: Option<&ResultSink>) -> Result<SweepResult> {
    let base = Point::from_config(cfg);
    let mut tasks: Vec<Task> = cfg.sweep.r.values().iter().map(|&r| theory_task("meanfield/r_sweep", Point { r, ..base }, false)).collect();
    for &r in cfg.sweep.theory_w_r.values() {
        for &w in &cfg.sweep.theory_w.sizes()? {
            let pt = point(w, r, base.lambda);
            if admissible(cfg, pt) {
                tasks.push(theory_task("meanfield/w_sweep", pt, true));
            }
        }
    }
    let mut res = run_tasks(cfg, sink, tasks)?;
    res.extend(run_lambda_theory(cfg, sink, "meanfield/lambda_sweep")?);
    Ok(res)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionReport {
    /// Region computed from the steady state at the configured W.
    pub at_config: Option<SynfireRegion>,
    pub steady: Option<meanfield::MeanFieldState>,
    /// Packet sizes inside the region computed from their own steady state.
    pub self_consistent: SelfConsistentRegion,
    /// Theory labels over the W-sweep grid at the configured r.
    pub labels: Vec<(usize, Attractor)>,
    pub edges: WindowEdges,
}

impl RegionReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        match (&self.at_config, &self.steady) {
            (Some(reg), Some(st)) => {
                s += &format!("steady state: rho_in = {:.4}, rho_out = {:.4}, mu_out = {:.2} Hz\n", st.rho_in, st.rho_out, st.mu_out_hz());
                s += &format!("epsilon = {}, delta = {}, feasible = {}\n", reg.epsilon, reg.delta, reg.feasible);
                s += &format!("P = {:.6e}, Q = {:.6e}, R = {:.6e}\n", reg.p, reg.q, reg.r);
                s += &format!("tau interval = ({:.6}, {:.6})\n", reg.tau_lo, reg.tau_hi);
                s += &format!("W interval = ({:.3}, {:.3})\n", reg.w_lo, reg.w_hi);
                if let Some(d) = &reg.diagnostic {
                    s += &format!("diagnostic: {d}\n");
                }
            }
            _ => s += "no steady state at the configured W\n",
        }
        s += &format!("self-consistent members: {:?}\n", self.self_consistent.members);
        s += &format!("labelled window: W_a = {:?}, W_i = {:?}\n", self.edges.w_a, self.edges.w_i);
        s
    }
}

/// Analytic synfire region at the configured point, the self-consistent
/// region over the theory W grid, and the labelled window for comparison.
pub fn run_region_solve(cfg: &ExperimentConfig) -> Result<RegionReport> {
    let base = Point::from_config(cfg);
    let (eps, delta) = (cfg.attractor.epsilon, cfg.attractor.delta);
    let lif = cfg.lif_params();
    let opts = cfg.meanfield_options();
    let run = run_theory(cfg, base)?;
    let at_config = run.steady.map(|st| synfire_region(eps, delta, &meanfield_params(cfg, base), &st, opts.form));
    let sizes = cfg.sweep.theory_w.sizes()?;
    let (lo, hi) = (*sizes.iter().min().unwrap(), *sizes.iter().max().unwrap());
    let self_consistent = self_consistent_region(eps, delta, &meanfield_params(cfg, base), &lif, cfg.theory_drive(), &opts, &crate::model::initial_state(cfg), lo..=hi)
        .map_err(|e| HarnessError::Numerical(e.to_string()))?;
    let mut labels = Vec::new();
    for w in sizes {
        let pt = Point { w, ..base };
        if admissible(cfg, pt) {
            labels.push((w, run_theory(cfg, pt)?.label));
        }
    }
    let edges = window_edges(base.r, &labels);
    Ok(RegionReport { at_config, steady: run.steady, self_consistent, labels, edges })
}

/// Raw chain run at the configured point and first seed: per-layer rows
/// plus a raster of the input and every layer.
pub fn run_simulate(cfg: &ExperimentConfig, raster: &std::path::Path) -> Result<SweepResult> {
    use lif_sim::{generate_inputs, simulate_chain, write_raster, SimOptions};
    let pt = Point::from_config(cfg);
    let seed = cfg.run.seeds[0];
    let start = Instant::now();
    let tc = crate::model::topology_config(cfg, pt, seed);
    let topo = network::build_feedforward(&tc)?;
    let packet: Vec<usize> = (0..pt.w).collect();
    let inputs = generate_inputs(&cfg.input_spec(seed), cfg.network.n, &packet)?;
    let layers = simulate_chain(&topo, &inputs, &cfg.lif_params(), &SimOptions { ext: cfg.sim_drive(), seed })?;
    let mut all: Vec<(usize, &lif_sim::SpikeData)> = vec![(0, &inputs)];
    all.extend(layers.iter().enumerate().map(|(k, s)| (k + 1, s)));
    let header = format!("config_hash={} seed={seed}", cfg.hash());
    let file = std::fs::File::create(raster)?;
    write_raster(std::io::BufWriter::new(file), &header, &all)?;
    let mut stats = Vec::new();
    for (k, s) in layers.iter().enumerate() {
        let agg = spike_stats::packet_aggregate(s, &packet, &cfg.window_spec(), cfg.window.pair_budget, seed)?;
        stats.push(LayerStats { layer: k + 1, stats: agg, cv_sem: f64::NAN });
    }
    let task = Task { experiment: "simulate".into(), point: pt, kind: Kind::Sim { seed, recurrent: false }, last_only: false };
    let theory = run_theory(cfg, pt).ok();
    let rows = sim_rows(cfg, &task, seed, theory.as_ref(), &stats, start.elapsed().as_secs_f64() * 1e3);
    Ok(SweepResult { records: rows, details: vec![SimDetail { experiment: "simulate".into(), point: pt, seed, layers: stats }] })
}
