use crate::{quantize_ms, Result, SimError, SpikeData};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputSpec {
    pub rate_hz: f64,
    pub duration_ms: f64,
    /// Target pairwise count correlation inside the packet.
    pub packet_correlation: f64,
    /// Target pairwise count correlation among all other neurons.
    pub background_correlation: f64,
    /// SD of the Gaussian jitter applied to every packet spike.
    pub jitter_ms: f64,
    pub seed: u64,
}

impl Default for InputSpec {
    fn default() -> Self {
        Self { rate_hz: 20.0, duration_ms: 20_000.0, packet_correlation: 0.98, background_correlation: 0.1, jitter_ms: 0.5, seed: 0 }
    }
}

impl InputSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SimError::Argument(m));
        if !(self.rate_hz > 0.0 && self.rate_hz.is_finite()) {
            return bad(format!("rate must be positive, got {}", self.rate_hz));
        }
        if !(self.duration_ms > 0.0 && self.duration_ms.is_finite()) {
            return bad(format!("duration must be positive, got {}", self.duration_ms));
        }
        for (name, c) in [("packet", self.packet_correlation), ("background", self.background_correlation)] {
            if !(0.0..1.0).contains(&c) {
                return bad(format!("{name} correlation {c} is not attainable; it must lie in [0, 1)"));
            }
        }
        if !(self.jitter_ms >= 0.0 && self.jitter_ms.is_finite()) {
            return bad("jitter must be non-negative".into());
        }
        Ok(())
    }
}

fn poisson_train(rate_per_ms: f64, duration: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let exp = Exp::new(rate_per_ms).expect("positive rate");
    let mut out = Vec::with_capacity((rate_per_ms * duration * 1.2) as usize + 8);
    let mut t = exp.sample(rng);
    while t < duration {
        out.push(t);
        t += exp.sample(rng);
    }
    out
}

/// Sorts, moves the times onto the µs grid, wraps them into
/// `[0, duration)` and drops exact duplicates.
fn finish(mut tr: Vec<f64>, duration: f64) -> Vec<f64> {
    for t in tr.iter_mut() {
        let mut q = quantize_ms(t.rem_euclid(duration));
        if q >= duration {
            q = quantize_ms(q - duration);
        }
        *t = q;
    }
    tr.sort_by(f64::total_cmp);
    tr.dedup();
    tr
}

/// Copies of a common mother process of rate `rate/p`, each spike kept with
/// probability `p`. Two copies then have count correlation `p` on every
/// window.
fn thinned_group(
    members: &[usize],
    p: f64,
    jitter: f64,
    rate_per_ms: f64,
    duration: f64,
    mother: &mut ChaCha8Rng,
    seed: u64,
    trains: &mut [Vec<f64>],
) {
    let normal = Normal::new(0.0, jitter.max(f64::MIN_POSITIVE)).expect("finite jitter");
    let shared = if p > 0.0 { poisson_train(rate_per_ms / p, duration, mother) } else { Vec::new() };
    for &i in members {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1 + i as u64);
        let mut tr = if p > 0.0 {
            shared.iter().copied().filter(|_| rng.random::<f64>() < p).collect()
        } else {
            poisson_train(rate_per_ms, duration, &mut rng)
        };
        if jitter > 0.0 {
            for t in tr.iter_mut() {
                *t += normal.sample(&mut rng);
            }
        }
        trains[i] = finish(tr, duration);
    }
}

/// Layer-0 input: the packet neurons are thinned, jittered copies of one
/// mother process; all other neurons are thinned copies of an independent
/// second mother. Every train has marginal rate `spec.rate_hz`.
pub fn generate_inputs(spec: &InputSpec, n: usize, packet: &[usize]) -> Result<SpikeData> {
    spec.validate()?;
    let mut inside = vec![false; n];
    for &i in packet {
        if i >= n {
            return Err(SimError::Argument(format!("packet index {i} out of range for {n} neurons")));
        }
        inside[i] = true;
    }
    let pin: Vec<usize> = (0..n).filter(|&i| inside[i]).collect();
    let pout: Vec<usize> = (0..n).filter(|&i| !inside[i]).collect();
    let rate = spec.rate_hz / 1000.0;
    let duration = spec.duration_ms;
    let mut trains = vec![Vec::new(); n];
    let mut mother = ChaCha8Rng::seed_from_u64(spec.seed);
    mother.set_stream(0);
    thinned_group(&pin, spec.packet_correlation, spec.jitter_ms, rate, duration, &mut mother, spec.seed, &mut trains);
    thinned_group(&pout, spec.background_correlation, 0.0, rate, duration, &mut mother, spec.seed, &mut trains);
    Ok(SpikeData { duration, trains })
}
