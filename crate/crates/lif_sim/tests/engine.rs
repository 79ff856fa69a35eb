mod common;

use lif_sim::*;
use moment_maps::siegert_mean;
use network::{build_feedforward, build_recurrent, TopologyConfig};

fn small(layers: usize, seed: u64) -> network::NetworkTopology {
    build_feedforward(&TopologyConfig { n: 200, w: 10, lambda: 0.1, r: 1.0, w0: 0.5, layers, seed }).unwrap()
}

fn poisson_inputs(n: usize, duration: f64, seed: u64) -> SpikeData {
    poisson_inputs_at(20.0, n, duration, seed)
}

fn poisson_inputs_at(rate_hz: f64, n: usize, duration: f64, seed: u64) -> SpikeData {
    let spec = InputSpec { rate_hz, duration_ms: duration, packet_correlation: 0.0, background_correlation: 0.0, seed, ..Default::default() };
    generate_inputs(&spec, n, &[0]).unwrap()
}

#[test]
fn silent_input_stays_silent() {
    let t = small(3, 1);
    let out = simulate_chain(&t, &SpikeData::silent(200, 1000.0), &LifParams::default(), &SimOptions::default()).unwrap();
    assert_eq!(out.len(), 3);
    assert!(out.iter().all(|s| s.total_spikes() == 0));
}

#[test]
fn saturating_drive_fires_at_refractory_ceiling() {
    let p = LifParams::default();
    let opts = SimOptions { ext: ExternalDrive { mean: 1e4, variance: 0.0 }, seed: 0 };
    let out = simulate_layer(&SpikeData::silent(200, 1000.0), &small(1, 2), 0, &p, &opts).unwrap();
    for tr in &out.trains {
        assert!(tr.windows(2).all(|w| (w[1] - w[0] - p.t_ref).abs() < 1e-9));
        assert_eq!(tr.len(), (1000.0 / p.t_ref) as usize);
    }
}

#[test]
fn refractory_discipline_and_ceiling_under_noise() {
    let p = LifParams::new(20.0, 20.0, 10.0, 3.0, 0.1);
    let opts = SimOptions { ext: ExternalDrive::from_potential(30.0, 8.0, 20.0), seed: 5 };
    let inputs = poisson_inputs(200, 2000.0, 3);
    let out = simulate_chain(&small(2, 3), &inputs, &p, &opts).unwrap();
    for s in &out {
        s.validate().unwrap();
        assert!(s.total_spikes() > 1000);
        assert!(s.min_isi().unwrap() >= p.t_ref - 1e-9);
        for tr in &s.trains {
            assert!(tr.len() as f64 <= s.duration / p.t_ref + 1.0);
        }
    }
}

#[test]
fn runs_are_deterministic_and_seeded() {
    let p = LifParams::default();
    let t = small(2, 4);
    let inputs = poisson_inputs(200, 1000.0, 9);
    let opts = SimOptions { ext: ExternalDrive::from_potential(15.0, 4.0, 20.0), seed: 11 };
    let a = simulate_chain(&t, &inputs, &p, &opts).unwrap();
    let b = simulate_chain(&t, &inputs, &p, &opts).unwrap();
    assert_eq!(a, b);
    let c = simulate_chain(&t, &inputs, &p, &SimOptions { seed: 12, ..opts }).unwrap();
    assert_ne!(a, c);
}

#[test]
fn one_layer_chain_is_simulate_layer() {
    let p = LifParams::default();
    let t = small(1, 6);
    let inputs = poisson_inputs(200, 1000.0, 1);
    let opts = SimOptions { ext: ExternalDrive::from_potential(12.0, 3.0, 20.0), seed: 2 };
    let chain = simulate_chain(&t, &inputs, &p, &opts).unwrap();
    assert_eq!(chain[0], simulate_layer(&inputs, &t, 0, &p, &opts).unwrap());
    assert!(simulate_layer(&inputs, &t, 1, &p, &opts).is_err());
}

#[test]
fn recurrent_unfolding_matches_feedforward() {
    let cfg = TopologyConfig { n: 200, w: 10, lambda: 0.1, r: 1.0, w0: 0.5, layers: 1, seed: 8 };
    let p = LifParams::default();
    let inputs = poisson_inputs(200, 1000.0, 4);
    let opts = SimOptions { ext: ExternalDrive::from_potential(14.0, 3.0, 20.0), seed: 3 };

    // One recurrent step is one feedforward layer over the same synapses.
    let rec = build_recurrent(&cfg, 1).unwrap();
    let one = simulate_recurrent(&rec, &inputs, 1, &p, &opts).unwrap();
    assert_eq!(one, simulate_chain(&rec, &inputs, &p, &opts).unwrap());
    assert_eq!(one[0], simulate_layer(&inputs, &rec, 0, &p, &opts).unwrap());

    let rec3 = build_recurrent(&cfg, 3).unwrap();
    assert_eq!(simulate_recurrent(&rec3, &inputs, 3, &p, &opts).unwrap(), simulate_chain(&rec3, &inputs, &p, &opts).unwrap());

    assert!(simulate_recurrent(&small(3, 8), &inputs, 3, &p, &opts).is_err());
}

#[test]
fn rejects_bad_arguments() {
    let t = small(1, 1);
    let opts = SimOptions::default();
    assert!(simulate_layer(&SpikeData::silent(100, 100.0), &t, 0, &LifParams::default(), &opts).is_err());
    let coarse = LifParams::new(20.0, 20.0, 0.0, 2.0, 5.0);
    assert!(simulate_layer(&SpikeData::silent(200, 100.0), &t, 0, &coarse, &opts).is_err());
    let odd = LifParams::new(20.0, 20.0, 0.0, 2.0, 0.00015);
    assert!(simulate_layer(&SpikeData::silent(200, 100.0), &t, 0, &odd, &opts).is_err());
    let bad = SimOptions { ext: ExternalDrive { mean: 0.0, variance: -1.0 }, seed: 0 };
    assert!(simulate_layer(&SpikeData::silent(200, 100.0), &t, 0, &LifParams::default(), &bad).is_err());
}

/// Independent Poisson bombardment through small weights against the
/// diffusion-limit rate. Every neuron sees K_E excitatory inputs of w0 and
/// K_I inhibitory inputs of -g r w0 at the same rate.
#[test]
fn poisson_bombardment_matches_siegert_rate() {
    let (n, w0, r) = (10_000, 0.075, 0.5);
    let cfg = TopologyConfig { n, w: 10, lambda: 0.1, r, w0, layers: 1, seed: 21 };
    let t = build_feedforward(&cfg).unwrap();
    let (k_e, k_i) = (t.k_e() as f64, t.k_i() as f64);
    let nu = 0.08;
    let g = network::G;
    let syn_mean = w0 * nu * (k_e - g * r * k_i);
    let syn_var = w0 * w0 * nu * (k_e + (g * r).powi(2) * k_i);
    let inputs = poisson_inputs_at(1e3 * nu, n, 2200.0, 17);
    let p = LifParams::new(20.0, 20.0, 10.0, 2.0, 0.02);
    for free_mean in [16.0, 19.0, 22.0] {
        let dc = free_mean / p.tau_m - syn_mean;
        let opts = SimOptions { ext: ExternalDrive { mean: dc, variance: 0.0 }, seed: 1 };
        let out = simulate_layer(&inputs, &t, 0, &p, &opts).unwrap();
        // Discard the first 200 ms of relaxation from v_r.
        let spikes: usize = out.trains.iter().map(|tr| tr.iter().filter(|&&s| s >= 200.0).count()).sum();
        let sim = spikes as f64 / (n as f64 * 2000.0);
        let theory = siegert_mean(free_mean / p.tau_m, syn_var.sqrt(), &p).unwrap();
        let rel = (sim - theory).abs() / theory;
        assert!(rel < 0.05, "free mean {free_mean}: sim {:.3} Hz vs siegert {:.3} Hz", sim * 1e3, theory * 1e3);
    }
}
