use crate::{siegert, ExternalDrive, LifParams, MomentError, Result};
use network::NetworkTopology;
use rayon::prelude::*;

/// Per-neuron first and second moments of one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentState {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Row-major `n × n` correlation matrix.
    pub rho: Vec<f64>,
}

impl MomentState {
    pub fn new(mu: Vec<f64>, sigma: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        let s = Self { mu, sigma, rho };
        s.validate()?;
        Ok(s)
    }

    /// Independent neurons with the given moments.
    pub fn uncorrelated(mu: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        let n = mu.len();
        let mut rho = vec![0.0; n * n];
        for i in 0..n {
            rho[i * n + i] = 1.0;
        }
        Self::new(mu, sigma, rho)
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn rho(&self, i: usize, j: usize) -> f64 {
        self.rho[i * self.len() + j]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.mu.len();
        if self.sigma.len() != n || self.rho.len() != n * n {
            return Err(MomentError::Dimension(format!(
                "mu {n}, sigma {}, rho {} entries",
                self.sigma.len(),
                self.rho.len()
            )));
        }
        if self.mu.iter().chain(&self.sigma).any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(MomentError::Argument("rates and sigmas must be finite and non-negative".into()));
        }
        for i in 0..n {
            if self.rho[i * n + i] != 1.0 {
                return Err(MomentError::Argument(format!("rho[{i}][{i}] must be 1")));
            }
            for j in 0..i {
                let (a, b) = (self.rho[i * n + j], self.rho[j * n + i]);
                if a != b || !(a.abs() <= 1.0) {
                    return Err(MomentError::Argument(format!("rho[{i}][{j}] invalid")));
                }
            }
        }
        Ok(())
    }
}

/// Summed input statistics of each neuron of the next layer.
#[derive(Debug, Clone, PartialEq)]
pub struct SynapticSummary {
    pub mu_hat: Vec<f64>,
    pub sigma_hat: Vec<f64>,
    pub rho_hat: Vec<f64>,
    /// Entries whose raw ratio fell outside [-1, 1] and were clamped.
    pub clamped: usize,
}

/// Sparse weight rows in mV: `row(i)` lists `(source, weight)`.
pub trait Weights: Sync {
    fn n_targets(&self) -> usize;
    fn n_sources(&self) -> usize;
    fn row(&self, i: usize) -> Vec<(usize, f64)>;
}

/// Dense `targets × sources` weight matrix in mV.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseWeights {
    pub n_sources: usize,
    pub rows: Vec<Vec<f64>>,
}

impl Weights for DenseWeights {
    fn n_targets(&self) -> usize {
        self.rows.len()
    }
    fn n_sources(&self) -> usize {
        self.n_sources
    }
    fn row(&self, i: usize) -> Vec<(usize, f64)> {
        self.rows[i].iter().enumerate().filter(|(_, w)| **w != 0.0).map(|(j, &w)| (j, w)).collect()
    }
}

/// Layer `k` of a topology with weights scaled to mV by `w0`.
pub struct TopologyWeights<'a> {
    pub topology: &'a NetworkTopology,
    pub layer: usize,
}

impl Weights for TopologyWeights<'_> {
    fn n_targets(&self) -> usize {
        self.topology.n()
    }
    fn n_sources(&self) -> usize {
        self.topology.n()
    }
    fn row(&self, i: usize) -> Vec<(usize, f64)> {
        let t = self.topology;
        let w0 = t.cfg.w0;
        t.layer(self.layer)
            .row(i)
            .iter()
            .enumerate()
            .map(|(slot, &s)| (s as usize, w0 * t.unit_weight(slot)))
            .collect()
    }
}

/// `μ̂_i = Σ_j w_ij μ_j`, `σ̂_i² = Σ_{j,l} w_ij σ_j ρ_jl w_il σ_l` and the
/// input correlation `ρ̂_ij`, with an optional independent external drive.
pub fn synaptic_summary<W: Weights + ?Sized>(prev: &MomentState, weights: &W, ext: ExternalDrive) -> Result<SynapticSummary> {
    let n_src = prev.len();
    if weights.n_sources() != n_src {
        return Err(MomentError::Dimension(format!(
            "weights expect {} sources, state has {n_src}",
            weights.n_sources()
        )));
    }
    let n = weights.n_targets();
    // a_i = w_i ∘ σ as sparse rows; v_i = ρ a_i as dense rows.
    let a: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| weights.row(i).into_iter().map(|(j, w)| (j, w * prev.sigma[j])).collect())
        .collect();
    let v: Vec<Vec<f64>> = a
        .par_iter()
        .map(|ai| {
            let mut out = vec![0.0; n_src];
            for &(p, x) in ai {
                let row = &prev.rho[p * n_src..(p + 1) * n_src];
                for (o, r) in out.iter_mut().zip(row) {
                    *o += x * r;
                }
            }
            out
        })
        .collect();
    let mu_hat: Vec<f64> = (0..n)
        .map(|i| weights.row(i).iter().map(|&(j, w)| w * prev.mu[j]).sum::<f64>() + ext.mean)
        .collect();
    let cov = |i: usize, j: usize| a[i].iter().map(|&(p, x)| x * v[j][p]).sum::<f64>();
    let var: Vec<f64> = (0..n)
        .map(|i| {
            let c = cov(i, i);
            if c < 0.0 && c > -1e-12 {
                0.0
            } else {
                c
            }
        })
        .collect();
    if var.iter().any(|&c| c < 0.0) {
        return Err(MomentError::Argument("negative input variance: correlation matrix is not positive semidefinite".into()));
    }
    let total_var: Vec<f64> = var.iter().map(|c| c + ext.variance).collect();
    let sigma_hat: Vec<f64> = total_var.iter().map(|c| c.sqrt()).collect();
    let rows: Vec<(Vec<f64>, usize)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; n];
            let mut clamped = 0;
            for (j, slot) in row.iter_mut().enumerate() {
                if i == j {
                    *slot = 1.0;
                } else if j < i {
                    continue;
                } else if total_var[i] > 0.0 && total_var[j] > 0.0 {
                    // sqrt of the product keeps identical rows at exactly 1.
                    let r = cov(i, j) / (total_var[i] * total_var[j]).sqrt();
                    if r.abs() > 1.0 {
                        clamped += 1;
                    }
                    *slot = r.clamp(-1.0, 1.0);
                }
            }
            (row, clamped)
        })
        .collect();
    let mut rho_hat = vec![0.0; n * n];
    let mut clamped = 0;
    for (i, (row, c)) in rows.into_iter().enumerate() {
        clamped += c;
        for j in i..n {
            rho_hat[i * n + j] = row[j];
            rho_hat[j * n + i] = row[j];
        }
    }
    Ok(SynapticSummary { mu_hat, sigma_hat, rho_hat, clamped })
}

/// Maps input correlation to output correlation. Must be increasing and fix 0 and 1.
pub trait CorrelationMap: Sync {
    fn apply(&self, rho_hat: f64) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl CorrelationMap for Identity {
    fn apply(&self, rho_hat: f64) -> f64 {
        rho_hat
    }
}

/// Identity correlation map with argument checking.
pub fn correlation_map(rho_hat: f64) -> Result<f64> {
    if !(rho_hat.abs() <= 1.0 + 1e-9) {
        return Err(MomentError::Argument(format!("correlation {rho_hat} outside [-1, 1]")));
    }
    Ok(Identity.apply(rho_hat.clamp(-1.0, 1.0)))
}

/// One layer of the full moment iteration.
pub fn propagate_layer<W: Weights + ?Sized>(
    prev: &MomentState,
    weights: &W,
    p: &LifParams,
    ext: ExternalDrive,
    phi: &dyn CorrelationMap,
) -> Result<MomentState> {
    prev.validate()?;
    let s = synaptic_summary(prev, weights, ext)?;
    let outs = s
        .mu_hat
        .iter()
        .zip(&s.sigma_hat)
        .map(|(&m, &sd)| siegert(m, sd, p))
        .collect::<Result<Vec<_>>>()?;
    let n = outs.len();
    let mut rho = s.rho_hat;
    for i in 0..n {
        for j in 0..n {
            let x = &mut rho[i * n + j];
            *x = if i == j { 1.0 } else { phi.apply(*x).clamp(-1.0, 1.0) };
        }
    }
    MomentState::new(outs.iter().map(|o| o.rate).collect(), outs.iter().map(|o| o.sigma).collect(), rho)
}
