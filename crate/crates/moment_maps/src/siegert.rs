use crate::{LifParams, MomentError, Result};
use special_fns::{dawson_table, passage_bound};

/// Output statistics of an LIF neuron under white-noise drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiegertOutput {
    /// Firing rate, spikes per ms.
    pub rate: f64,
    /// Coefficient of variation of the inter-spike interval.
    pub cv: f64,
    /// `cv * sqrt(rate)`: square root of the count-variance rate.
    pub sigma: f64,
}

impl SiegertOutput {
    const SILENT: Self = Self { rate: 0.0, cv: 0.0, sigma: 0.0 };
}

/// Reduced threshold and reset bounds. The drive has drift `mu_hat` (mV/ms)
/// and noise `sigma_hat` (mV/√ms); with L = 1/τ the bound
/// `(ξL − μ̂)/(σ̂√L)` equals `(ξ − τμ̂)/(√τ σ̂)`.
fn bounds(mu_hat: f64, sigma_hat: f64, p: &LifParams) -> Result<(f64, f64)> {
    let z = sigma_hat * p.leak.sqrt();
    let a = passage_bound(p.v_r, mu_hat, z, p.leak)?;
    let b = passage_bound(p.v_th, mu_hat, z, p.leak)?;
    Ok((a, b))
}

fn moments(mu_hat: f64, sigma_hat: f64, p: &LifParams) -> Result<SiegertOutput> {
    if !(sigma_hat > 0.0) {
        return Err(MomentError::Degenerate(sigma_hat));
    }
    if !mu_hat.is_finite() || !sigma_hat.is_finite() {
        return Err(MomentError::Argument("drive must be finite".into()));
    }
    let (a, b) = bounds(mu_hat, sigma_hat, p)?;
    let table = dawson_table();
    let mean_isi = p.t_ref + 2.0 / p.leak * table.int_dminus(a, b);
    let rate = 1.0 / mean_isi;
    if !(rate > 0.0) {
        return Ok(SiegertOutput { rate: 0.0, cv: 1.0, sigma: 0.0 });
    }
    let cv = if b > table.upper_edge() {
        // Deep sub-threshold: escape is a rare Poisson-like event.
        1.0
    } else {
        let var = 8.0 / (p.leak * p.leak) * table.int_dtensor(a, b);
        var.max(0.0).sqrt() / mean_isi
    };
    Ok(SiegertOutput { rate, cv, sigma: cv * rate.sqrt() })
}

/// Mean map S₁: firing rate (spikes/ms) for drive `(mu_hat, sigma_hat)`.
pub fn siegert_mean(mu_hat: f64, sigma_hat: f64, p: &LifParams) -> Result<f64> {
    moments(mu_hat, sigma_hat, p).map(|o| o.rate)
}

/// S₂: coefficient of variation of the inter-spike interval.
pub fn siegert_cv(mu_hat: f64, sigma_hat: f64, p: &LifParams) -> Result<f64> {
    moments(mu_hat, sigma_hat, p).map(|o| o.cv)
}

/// σ = S₂·√S₁, the square root of the count-variance rate.
pub fn siegert_variance(mu_hat: f64, sigma_hat: f64, p: &LifParams) -> Result<f64> {
    moments(mu_hat, sigma_hat, p).map(|o| o.sigma)
}

/// All output moments, with the noiseless limit handled deterministically:
/// silent below threshold, otherwise regular firing after the free passage
/// time from reset to threshold.
pub fn siegert(mu_hat: f64, sigma_hat: f64, p: &LifParams) -> Result<SiegertOutput> {
    if sigma_hat > 0.0 {
        return moments(mu_hat, sigma_hat, p);
    }
    if sigma_hat < 0.0 || !mu_hat.is_finite() {
        return Err(MomentError::Argument(format!("invalid drive ({mu_hat}, {sigma_hat})")));
    }
    let y = mu_hat / p.leak;
    if y <= p.v_th {
        return Ok(SiegertOutput::SILENT);
    }
    let passage = ((y - p.v_r) / (y - p.v_th)).ln() / p.leak;
    Ok(SiegertOutput { rate: 1.0 / (p.t_ref + passage), cv: 0.0, sigma: 0.0 })
}
