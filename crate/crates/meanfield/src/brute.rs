use crate::{MeanFieldError, MeanFieldState, Result, AB};
use network::NetworkTopology;

/// Per-neuron sigma vector and dense correlation matrix (row-major) holding
/// the mean-field constants: σ₊ and ρ₊ inside the packet `0..w`, σ₋ and ρ₋
/// elsewhere, unit diagonal.
pub fn meanfield_moments(s: &MeanFieldState, n: usize, w: usize) -> (Vec<f64>, Vec<f64>) {
    let sigma = (0..n).map(|p| if p < w { s.sigma_in } else { s.sigma_out }).collect();
    let mut rho = vec![s.rho_out; n * n];
    for p in 0..n {
        for q in 0..n {
            if p == q {
                rho[p * n + q] = 1.0;
            } else if p < w && q < w {
                rho[p * n + q] = s.rho_in;
            }
        }
    }
    (sigma, rho)
}

fn weighted_row(t: &NetworkTopology, layer: usize, i: usize, sigma: &[f64]) -> Vec<(usize, f64)> {
    t.layer(layer)
        .row(i)
        .iter()
        .enumerate()
        .map(|(slot, &p)| (p as usize, t.unit_weight(slot) * sigma[p as usize]))
        .collect()
}

/// Returns (mean over i≠j of aᵢᵀρaⱼ, mean over i of aᵢᵀρaᵢ) for the target
/// class. The off-diagonal sum is taken through the class sum vector, which
/// is exact algebra on the same double sum.
fn class_sums(t: &NetworkTopology, layer: usize, targets: &[usize], sigma: &[f64], rho: &[f64]) -> (f64, f64) {
    let n = sigma.len();
    let mut total = vec![0.0; n];
    let mut self_sum = 0.0;
    for &i in targets {
        let row = weighted_row(t, layer, i, sigma);
        for &(p, ap) in &row {
            total[p] += ap;
            let rp = &rho[p * n..(p + 1) * n];
            let mut acc = 0.0;
            for &(q, aq) in &row {
                acc += aq * rp[q];
            }
            self_sum += ap * acc;
        }
    }
    let support: Vec<usize> = (0..n).filter(|&p| total[p] != 0.0).collect();
    let mut all = 0.0;
    for &p in &support {
        let rp = &rho[p * n..(p + 1) * n];
        let mut acc = 0.0;
        for &q in &support {
            acc += total[q] * rp[q];
        }
        all += total[p] * acc;
    }
    let m = targets.len() as f64;
    let a = if targets.len() > 1 { (all - self_sum) / (m * (m - 1.0)) } else { f64::NAN };
    (a, self_sum / m)
}

/// Exact averaged double sums on a sampled layer, weights in units of w0.
///
/// `sigma` and `rho` describe the source layer; `packet` lists the target
/// neurons treated as in-packet. With a single-neuron class the pair average
/// is undefined and reported as NaN.
pub fn brute_force_ab(t: &NetworkTopology, layer: usize, sigma: &[f64], rho: &[f64], packet: &[usize]) -> Result<AB> {
    let n = t.n();
    if packet.is_empty() {
        return Err(MeanFieldError::Argument("empty packet".into()));
    }
    if sigma.len() != n || rho.len() != n * n {
        return Err(MeanFieldError::Argument(format!(
            "expected sigma of length {n} and rho of length {}, got {} and {}",
            n * n,
            sigma.len(),
            rho.len()
        )));
    }
    if layer >= t.n_layers() {
        return Err(MeanFieldError::Argument(format!("layer {layer} out of range")));
    }
    let mut inside = vec![false; n];
    for &i in packet {
        if i >= n {
            return Err(MeanFieldError::Argument(format!("packet index {i} out of range")));
        }
        inside[i] = true;
    }
    let pin: Vec<usize> = (0..n).filter(|&i| inside[i]).collect();
    let pout: Vec<usize> = (0..n).filter(|&i| !inside[i]).collect();
    let (a_in, b_in) = class_sums(t, layer, &pin, sigma, rho);
    let (a_out, b_out) = if pout.is_empty() { (f64::NAN, f64::NAN) } else { class_sums(t, layer, &pout, sigma, rho) };
    Ok(AB { a_in, b_in, a_out, b_out })
}

/// Partial sums of `Σ_{p,q} w_ip σ_p w_jq σ_q ρ_pq` split by source class:
/// three diagonal intervals (p = q) and seven off-diagonal blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSums {
    pub sums: [f64; 10],
    pub counts: [usize; 10],
}

impl RegionSums {
    pub const NAMES: [&'static str; 10] = [
        "diag_packet",
        "diag_background",
        "diag_inhibitory",
        "packet_packet",
        "packet_background",
        "background_packet",
        "background_background",
        "excitatory_inhibitory",
        "inhibitory_excitatory",
        "inhibitory_inhibitory",
    ];

    pub fn get(&self, name: &str) -> Option<(usize, f64)> {
        Self::NAMES.iter().position(|&n| n == name).map(|k| (self.counts[k], self.sums[k]))
    }

    pub fn total(&self) -> f64 {
        self.sums.iter().sum()
    }
}

/// Region bookkeeping for one target pair `(i, j)` (`i == j` gives the
/// variance sum) under mean-field constants.
pub fn region_sums(t: &NetworkTopology, layer: usize, s: &MeanFieldState, i: usize, j: usize) -> Result<RegionSums> {
    let n = t.n();
    if i >= n || j >= n || layer >= t.n_layers() {
        return Err(MeanFieldError::Argument("index out of range".into()));
    }
    let w = t.cfg.w;
    let n_e = t.cfg.n_e();
    // 0 packet, 1 background excitatory, 2 inhibitory
    let class = |p: usize| if p < w { 0 } else if p < n_e { 1 } else { 2 };
    let sigma = |p: usize| if p < w { s.sigma_in } else { s.sigma_out };
    let mut out = RegionSums { sums: [0.0; 10], counts: [0; 10] };
    let syn = t.layer(layer);
    for (sp, &p) in syn.row(i).iter().enumerate() {
        let p = p as usize;
        let ap = t.unit_weight(sp) * sigma(p);
        for (sq, &q) in syn.row(j).iter().enumerate() {
            let q = q as usize;
            let aq = t.unit_weight(sq) * sigma(q);
            let (cp, cq) = (class(p), class(q));
            let (region, rho) = if p == q {
                (cp, 1.0)
            } else {
                match (cp, cq) {
                    (0, 0) => (3, s.rho_in),
                    (0, 1) => (4, s.rho_out),
                    (1, 0) => (5, s.rho_out),
                    (1, 1) => (6, s.rho_out),
                    (2, 2) => (9, s.rho_out),
                    (_, 2) => (7, s.rho_out),
                    _ => (8, s.rho_out),
                }
            };
            out.sums[region] += ap * aq * rho;
            out.counts[region] += 1;
        }
    }
    Ok(out)
}
