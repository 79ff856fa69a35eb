use crate::{Result, StatsError, WindowSpec};
use lif_sim::SpikeData;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Packet and background summaries of one layer. Rates in Hz; sigmas in
/// √(spikes/ms), the unit the moment maps use.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketStats {
    pub mu_in: f64,
    pub mu_out: f64,
    pub sigma_in: f64,
    pub sigma_out: f64,
    pub rho_in: f64,
    /// `a₁·ρ(out, out) + a₂·ρ(in, out)`.
    pub rho_out: f64,
    pub rho_out_out: f64,
    pub rho_in_out: f64,
    /// Mean CV over neurons that fired in the analysis interval.
    pub cv_mean: f64,
    pub n_pairs_sampled: usize,
    /// Neurons left out of the correlation averages for lack of count
    /// variance (silent or perfectly regular at this window).
    pub n_excluded: usize,
}

struct Neuron {
    rate_hz: f64,
    sigma: f64,
    cv: Option<f64>,
    /// Centered counts scaled to unit norm; `None` if constant.
    z: Option<Vec<f64>>,
}

fn describe(counts: Vec<f64>, w: &WindowSpec) -> Neuron {
    let n = counts.len() as f64;
    let m = counts.iter().sum::<f64>() / n;
    let ss: f64 = counts.iter().map(|c| (c - m) * (c - m)).sum();
    let var = ss / (n - 1.0);
    let rate_per_ms = m / w.t_ms;
    let z = (ss > 0.0).then(|| {
        let s = ss.sqrt();
        counts.iter().map(|c| (c - m) / s).collect()
    });
    Neuron {
        rate_hz: 1000.0 * rate_per_ms,
        sigma: (var / w.t_ms).sqrt(),
        cv: (m > 0.0).then(|| (var / m).sqrt()),
        z,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().clamp(-1.0, 1.0)
}

/// Mean correlation over pairs drawn from `a × b` (distinct neurons): all
/// pairs when there are at most `budget`, otherwise `budget` random ones.
fn mean_pair_corr(a: &[usize], b: &[usize], same: bool, cells: &[Neuron], budget: usize, rng: &mut ChaCha8Rng) -> Option<(f64, usize)> {
    let a: Vec<&[f64]> = a.iter().filter_map(|&i| cells[i].z.as_deref()).collect();
    let b: Vec<&[f64]> = b.iter().filter_map(|&i| cells[i].z.as_deref()).collect();
    let total = if same { a.len() * a.len().saturating_sub(1) / 2 } else { a.len() * b.len() };
    if total == 0 {
        return None;
    }
    let mut sum = 0.0;
    if total <= budget {
        for (x, za) in a.iter().enumerate() {
            if same {
                for zb in &a[x + 1..] {
                    sum += dot(za, zb);
                }
            } else {
                for zb in &b {
                    sum += dot(za, zb);
                }
            }
        }
        return Some((sum / total as f64, total));
    }
    for _ in 0..budget {
        let (x, y) = if same {
            let x = rng.random_range(0..a.len());
            let mut y = rng.random_range(0..a.len() - 1);
            if y >= x {
                y += 1;
            }
            (a[x], a[y])
        } else {
            (a[rng.random_range(0..a.len())], b[rng.random_range(0..b.len())])
        };
        sum += dot(x, y);
    }
    Some((sum / budget as f64, budget))
}

/// Class means of rate and σ (silent neurons count as zero), mean pairwise
/// correlations within the packet, outside it and across it. Pair samples
/// are seeded by `seed`. Neurons without count variance are left out of
/// the correlations; a class left with no pair at all reports 0, visible
/// through `n_excluded` and `n_pairs_sampled`.
pub fn packet_aggregate(data: &SpikeData, packet: &[usize], w: &WindowSpec, pair_budget: usize, seed: u64) -> Result<PacketStats> {
    let n = data.n();
    let mut inside = vec![false; n];
    for &i in packet {
        if i >= n {
            return Err(StatsError::Argument(format!("packet index {i} out of range")));
        }
        inside[i] = true;
    }
    let pin: Vec<usize> = (0..n).filter(|&i| inside[i]).collect();
    let pout: Vec<usize> = (0..n).filter(|&i| !inside[i]).collect();
    if pin.is_empty() || pout.is_empty() {
        return Err(StatsError::Argument("packet and its complement must both be non-empty".into()));
    }
    let cells: Vec<Neuron> = data.trains.iter().map(|tr| w.counts(tr, data.duration).map(|c| describe(c, w))).collect::<Result<_>>()?;
    let mean = |ids: &[usize], f: &dyn Fn(&Neuron) -> f64| ids.iter().map(|&i| f(&cells[i])).sum::<f64>() / ids.len() as f64;
    let cvs: Vec<f64> = cells.iter().filter_map(|c| c.cv).collect();
    let cv_mean = if cvs.is_empty() { 0.0 } else { cvs.iter().sum::<f64>() / cvs.len() as f64 };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // A class without two variance-carrying neurons reports 0.
    let (rho_in, n_in) = mean_pair_corr(&pin, &pin, true, &cells, pair_budget, &mut rng).unwrap_or((0.0, 0));
    let (rho_oo, n_oo) = mean_pair_corr(&pout, &pout, true, &cells, pair_budget, &mut rng).unwrap_or((0.0, 0));
    let (rho_io, n_io) = mean_pair_corr(&pin, &pout, false, &cells, pair_budget, &mut rng).unwrap_or((0.0, 0));
    let (nf, wf) = (n as f64, pin.len() as f64);
    let den = nf * nf - wf * wf;
    let a1 = (nf - wf) * (nf - wf) / den;
    let a2 = 2.0 * wf * (nf - wf) / den;
    Ok(PacketStats {
        mu_in: mean(&pin, &|c| c.rate_hz),
        mu_out: mean(&pout, &|c| c.rate_hz),
        sigma_in: mean(&pin, &|c| c.sigma),
        sigma_out: mean(&pout, &|c| c.sigma),
        rho_in,
        rho_out: a1 * rho_oo + a2 * rho_io,
        rho_out_out: rho_oo,
        rho_in_out: rho_io,
        cv_mean,
        n_pairs_sampled: n_in + n_oo + n_io,
        n_excluded: cells.iter().filter(|c| c.z.is_none()).count(),
    })
}
