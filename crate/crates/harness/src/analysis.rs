//! Summaries of sweep records: window edges, peak gaps, maxima over W and
//! the CV-constancy test.

use crate::experiments::SimDetail;
use crate::records::Record;
use meanfield::Attractor;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::collections::BTreeMap;

/// Empirical window at one r. `w_a` is the first scanned W above the
/// largest annihilating W (or the smallest scanned W if none annihilates);
/// `w_i` the smallest invading W above `w_a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowEdges {
    pub r: f64,
    pub w_a: Option<usize>,
    pub w_i: Option<usize>,
}

impl WindowEdges {
    /// True when at least one scanned W inside `[w_a, w_i)` exists, i.e.
    /// both edges are found and `w_a < w_i`.
    pub fn nonempty(&self) -> bool {
        matches!((self.w_a, self.w_i), (Some(a), Some(i)) if a < i)
    }
}

pub fn window_edges(r: f64, labels: &[(usize, Attractor)]) -> WindowEdges {
    let mut sorted = labels.to_vec();
    sorted.sort_by_key(|p| p.0);
    let last_a = sorted.iter().rposition(|p| p.1 == Attractor::Annihilation);
    let start = match last_a {
        Some(k) => k + 1,
        None => 0,
    };
    let w_a = sorted.get(start).map(|p| p.0);
    let w_i = sorted[start.min(sorted.len())..].iter().find(|p| p.1 == Attractor::Invasion).map(|p| p.0);
    WindowEdges { r, w_a, w_i }
}

pub fn parse_label(s: &str) -> Attractor {
    match s {
        "synfire" => Attractor::Synfire,
        "invasion" => Attractor::Invasion,
        "annihilation" => Attractor::Annihilation,
        _ => Attractor::Indeterminate,
    }
}

/// Seed-averaged values of one experiment tag at one layer, grouped by
/// (r, W, λ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Averaged {
    pub r: f64,
    pub w: usize,
    pub lambda: f64,
    pub rho_in: f64,
    pub rho_out: f64,
    pub mu_out_hz: f64,
    pub cv_mean: f64,
    pub n: usize,
    /// Label of a theory row; simulation rows are relabelled from the
    /// averaged correlations.
    pub label: Attractor,
}

impl Averaged {
    pub fn gap(&self) -> f64 {
        self.rho_in - self.rho_out
    }
}

/// Averages rows over seeds. Theory rows use the theory columns and keep
/// their label; rows with simulation columns use those and are labelled by
/// `(epsilon, delta)`.
pub fn average(records: &[Record], experiment: &str, layer: Option<usize>, epsilon: f64, delta: f64) -> Vec<Averaged> {
    let mut groups: BTreeMap<(u64, usize, u64), Vec<&Record>> = BTreeMap::new();
    for rec in records.iter().filter(|r| r.experiment == experiment) {
        groups.entry((rec.r.to_bits(), rec.w, rec.lambda.to_bits())).or_default().push(rec);
    }
    let mut out = Vec::new();
    for rows in groups.values() {
        let deepest = rows.iter().map(|r| r.layer).max().unwrap_or(0);
        let at = layer.unwrap_or(deepest);
        let rows: Vec<&&Record> = rows.iter().filter(|r| r.layer == at).collect();
        if rows.is_empty() {
            continue;
        }
        let sim = rows[0].rho_in_sim.is_some();
        let pick = |f: &dyn Fn(&Record) -> Option<f64>| {
            let v: Vec<f64> = rows.iter().filter_map(|r| f(r)).collect();
            if v.is_empty() {
                f64::NAN
            } else {
                v.iter().sum::<f64>() / v.len() as f64
            }
        };
        let (rho_in, rho_out) = if sim {
            (pick(&|r| r.rho_in_sim), pick(&|r| r.rho_out_sim))
        } else {
            (pick(&|r| r.rho_in_theory), pick(&|r| r.rho_out_theory))
        };
        let label = if sim {
            if !(rho_in > 1.0 - epsilon) {
                Attractor::Annihilation
            } else if rho_out.abs() < delta {
                Attractor::Synfire
            } else {
                Attractor::Invasion
            }
        } else {
            parse_label(&rows[0].label)
        };
        out.push(Averaged {
            r: rows[0].r,
            w: rows[0].w,
            lambda: rows[0].lambda,
            rho_in,
            rho_out,
            mu_out_hz: pick(&|r| r.mu_out_hz),
            cv_mean: pick(&|r| r.cv_mean),
            n: rows.len(),
            label,
        });
    }
    out
}

/// Window edges for every r present in the averaged rows.
pub fn windows_by_r(rows: &[Averaged]) -> Vec<WindowEdges> {
    let mut by_r: BTreeMap<u64, Vec<(usize, Attractor)>> = BTreeMap::new();
    for a in rows {
        by_r.entry(a.r.to_bits()).or_default().push((a.w, a.label));
    }
    let mut out: Vec<WindowEdges> = by_r.into_iter().map(|(r, labels)| window_edges(f64::from_bits(r), &labels)).collect();
    out.sort_by(|a, b| a.r.total_cmp(&b.r));
    out
}

/// Per λ: the largest gap over W, the W reaching it and μ_out there.
pub fn max_gap_by_lambda(rows: &[Averaged]) -> Vec<(f64, f64, usize, f64)> {
    let mut by: BTreeMap<u64, Averaged> = BTreeMap::new();
    for a in rows {
        let e = by.entry(a.lambda.to_bits()).or_insert(*a);
        if a.gap() > e.gap() {
            *e = *a;
        }
    }
    let mut out: Vec<(f64, f64, usize, f64)> = by.values().map(|a| (a.lambda, a.gap(), a.w, a.mu_out_hz)).collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Number of strict increases in a sequence meant to be non-increasing,
/// ignoring rises no larger than `tolerance`.
pub fn inversions(values: &[f64], tolerance: f64) -> usize {
    values.windows(2).filter(|w| w[1] > w[0] + tolerance).count()
}

/// Chi-square test of "the mean CV is the same in every layer". Returns
/// the statistic, the degrees of freedom and the p-value. Layers without
/// a usable standard error are skipped.
pub fn cv_constancy(detail: &SimDetail) -> Option<(f64, usize, f64)> {
    let pts: Vec<(f64, f64)> = detail
        .layers
        .iter()
        .filter(|l| l.cv_sem.is_finite() && l.cv_sem > 0.0)
        .map(|l| (l.stats.cv_mean, l.cv_sem))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let wsum: f64 = pts.iter().map(|(_, s)| 1.0 / (s * s)).sum();
    let mean = pts.iter().map(|(c, s)| c / (s * s)).sum::<f64>() / wsum;
    let chi2: f64 = pts.iter().map(|(c, s)| ((c - mean) / s).powi(2)).sum();
    let df = pts.len() - 1;
    let p = 1.0 - ChiSquared::new(df as f64).ok()?.cdf(chi2);
    Some((chi2, df, p))
}

/// Per seed: |ρ̃_in − ρ_in| and |ρ̃_out − ρ_out| at the deepest layer of
/// matched recurrent and feedforward runs.
pub fn rnn_fnn_differences(records: &[Record]) -> Vec<(u64, f64, f64)> {
    let deepest = records.iter().filter(|r| r.experiment.starts_with("rnn_vs_fnn/")).map(|r| r.layer).max().unwrap_or(0);
    let find = |tag: &str, seed: u64| records.iter().find(|r| r.experiment == tag && r.seed == Some(seed) && r.layer == deepest);
    let mut seeds: Vec<u64> = records.iter().filter(|r| r.experiment == "rnn_vs_fnn/fnn").filter_map(|r| r.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    seeds
        .into_iter()
        .filter_map(|s| {
            let (f, r) = (find("rnn_vs_fnn/fnn", s)?, find("rnn_vs_fnn/rnn", s)?);
            Some((s, (r.rho_in_sim? - f.rho_in_sim?).abs(), (r.rho_out_sim? - f.rho_out_sim?).abs()))
        })
        .collect()
}
