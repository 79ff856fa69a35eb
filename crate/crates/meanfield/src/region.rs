use crate::step::{iterate, MAX_STEPS};
use crate::{ClosedForm, MeanFieldOptions, MeanFieldParams, MeanFieldState, Result};
use moment_maps::{ExternalDrive, LifParams};
use std::ops::RangeInclusive;

/// Sufficient condition on (ε, δ, λ) for a synfire attractor in a balanced
/// network. Strict inequality.
pub fn check_synfire_condition(epsilon: f64, delta: f64, lambda: f64) -> bool {
    epsilon > lambda * (1.0 - delta) / delta
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynfireRegion {
    pub epsilon: f64,
    pub delta: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub w_lo: f64,
    pub w_hi: f64,
    pub feasible: bool,
    pub diagnostic: Option<String>,
}

impl SynfireRegion {
    pub fn contains(&self, w: f64) -> bool {
        self.feasible && w >= self.w_lo && w <= self.w_hi
    }
}

/// Positive root of λQ·S² + R·S − τP = 0, the larger one if both are.
fn solve_size(lambda: f64, q: f64, r: f64, p: f64, tau: f64) -> Option<f64> {
    let a = lambda * q;
    let disc = r * r + 4.0 * a * tau * p;
    if disc < 0.0 {
        return None;
    }
    let s = (-r + disc.sqrt()) / (2.0 * a);
    (s > 0.0).then_some(s)
}

/// Packet-size interval guaranteed to be synfire for the steady state
/// `steady`, obtained at r = 1. With the corrected closed form the cross
/// term in R vanishes at r = 1, matching the A/B expressions used by the
/// iteration.
pub fn synfire_region(epsilon: f64, delta: f64, params: &MeanFieldParams, steady: &MeanFieldState, form: ClosedForm) -> SynfireRegion {
    let lam = params.lambda;
    let ke = params.k_e() as f64;
    let (sp, sm, rp, rm) = (steady.sigma_in, steady.sigma_out, steady.rho_in, steady.rho_out);
    let c = match form {
        ClosedForm::Printed => 1.0,
        ClosedForm::Corrected => 1.0 - params.r,
    };
    let p = 5.0 * ke * sm * sm * (1.0 - rm);
    let q = sp * sp * (rp - rm) + (sp - sm).powi(2) * rm;
    let r = 2.0 * c * ke * sm * (sp - sm) * rm + sp * sp * (1.0 - rp) - sm * sm * (1.0 - rm);
    let tau_lo = (1.0 - lam) / epsilon - 1.0;
    let tau_hi = (delta - lam) / (lam * (1.0 - delta));
    let mut out = SynfireRegion {
        epsilon,
        delta,
        p,
        q,
        r,
        tau_lo,
        tau_hi,
        w_lo: 0.0,
        w_hi: 0.0,
        feasible: false,
        diagnostic: None,
    };
    if !check_synfire_condition(epsilon, delta, lam) || !(tau_lo < tau_hi) {
        out.diagnostic = Some("synfire condition fails".into());
        return out;
    }
    if !(q > 0.0) {
        out.diagnostic = Some(format!("Q = {q} is not positive"));
        return out;
    }
    if !(p > 0.0) {
        out.diagnostic = Some(format!("P = {p} is not positive"));
        return out;
    }
    match (solve_size(lam, q, r, p, tau_lo), solve_size(lam, q, r, p, tau_hi)) {
        (Some(lo), Some(hi)) => {
            out.w_lo = lo.min(hi);
            out.w_hi = lo.max(hi);
            out.feasible = true;
        }
        _ => out.diagnostic = Some("no positive root for the interval endpoints".into()),
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfConsistentRegion {
    /// For every W scanned: the steady state (if one was reached) and the
    /// region computed from it.
    pub scanned: Vec<(usize, Option<MeanFieldState>, Option<SynfireRegion>)>,
    /// Packet sizes lying inside the region computed from their own steady
    /// state.
    pub members: Vec<usize>,
}

/// Scans `sizes`, computing the steady state at each W and keeping those W
/// that fall inside the region derived from that same steady state.
#[allow(clippy::too_many_arguments)]
pub fn self_consistent_region(
    epsilon: f64,
    delta: f64,
    template: &MeanFieldParams,
    lif: &LifParams,
    ext: ExternalDrive,
    opts: &MeanFieldOptions,
    initial: &MeanFieldState,
    sizes: RangeInclusive<usize>,
) -> Result<SelfConsistentRegion> {
    let mut scanned = Vec::new();
    let mut members = Vec::new();
    for w in sizes {
        let p = MeanFieldParams { w, ..*template };
        if w == 0 || w > p.k_e() {
            continue;
        }
        let traj = iterate(initial, &p, lif, ext, opts, MAX_STEPS, true)?;
        if traj.plateau_at.is_none() {
            scanned.push((w, None, None));
            continue;
        }
        let steady = *traj.last();
        let reg = synfire_region(epsilon, delta, &p, &steady, opts.form);
        if reg.contains(w as f64) {
            members.push(w);
        }
        scanned.push((w, Some(steady), Some(reg)));
    }
    Ok(SelfConsistentRegion { scanned, members })
}
