//! Estimators from spike trains to rates, count-variance rates, CVs and
//! window-count correlations, plus their packet/background aggregates.

mod aggregate;

pub use aggregate::{packet_aggregate, PacketStats};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("zero firing rate, CV undefined")]
    ZeroRate,
    #[error("zero count variance, correlation undefined")]
    ZeroVariance,
    #[error("invalid argument: {0}")]
    Argument(String),
}

pub type Result<T> = std::result::Result<T, StatsError>;

/// Sliding windows of length `t_ms` every `stride_ms`, starting after
/// `discard_ms`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub t_ms: f64,
    pub stride_ms: f64,
    pub discard_ms: f64,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self { t_ms: 200.0, stride_ms: 50.0, discard_ms: 500.0 }
    }
}

/// Window lengths used for the large-window limit of the correlation.
pub const LIMIT_WINDOWS: [f64; 4] = [50.0, 100.0, 200.0, 400.0];
/// Largest |ρ_400 − ρ_200| still accepted as a plateau.
pub const PLATEAU_TOLERANCE: f64 = 0.05;

impl WindowSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.t_ms > 0.0 && self.stride_ms > 0.0 && self.discard_ms >= 0.0;
        if !ok || ![self.t_ms, self.stride_ms, self.discard_ms].iter().all(|v| v.is_finite()) {
            return Err(StatsError::Argument(format!("invalid window {self:?}")));
        }
        Ok(())
    }

    /// Number of windows fitting in a recording, after checking that at
    /// least ten window lengths remain past the transient.
    pub fn n_windows(&self, duration: f64) -> Result<usize> {
        self.validate()?;
        let span = duration - self.discard_ms;
        if span < 10.0 * self.t_ms {
            return Err(StatsError::InsufficientData(format!(
                "{span} ms after the transient, need at least {} ms",
                10.0 * self.t_ms
            )));
        }
        Ok(((span - self.t_ms) / self.stride_ms).floor() as usize + 1)
    }

    /// Spike counts per window; `train` must be sorted.
    pub fn counts(&self, train: &[f64], duration: f64) -> Result<Vec<f64>> {
        let n = self.n_windows(duration)?;
        Ok((0..n)
            .map(|j| {
                let a = self.discard_ms + j as f64 * self.stride_ms;
                let b = a + self.t_ms;
                (train.partition_point(|&t| t < b) - train.partition_point(|&t| t < a)) as f64
            })
            .collect())
    }
}

/// Spikes per second over the whole recording.
pub fn firing_rate(train: &[f64], duration: f64) -> f64 {
    if duration > 0.0 {
        1000.0 * train.len() as f64 / duration
    } else {
        0.0
    }
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Unbiased variance of the window counts divided by the window length, in
/// spikes²/s. Equals the rate for a Poisson train.
pub fn count_variance_rate(train: &[f64], duration: f64, w: &WindowSpec) -> Result<f64> {
    let c = w.counts(train, duration)?;
    Ok(mean_var(&c).1 / w.t_ms * 1000.0)
}

/// √(variance rate / rate), with the rate taken from the same windows: the
/// σ/√μ form of the ISI coefficient of variation, 1 for Poisson trains.
pub fn coefficient_of_variation(train: &[f64], duration: f64, w: &WindowSpec) -> Result<f64> {
    let c = w.counts(train, duration)?;
    let (m, v) = mean_var(&c);
    if m <= 0.0 {
        return Err(StatsError::ZeroRate);
    }
    Ok((v / m).sqrt())
}

pub(crate) fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Pearson correlation of the paired window counts of two trains.
pub fn shift_correlation(x: &[f64], y: &[f64], duration: f64, w: &WindowSpec) -> Result<f64> {
    pearson(&w.counts(x, duration)?, &w.counts(y, duration)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationLimit {
    /// Value at the largest window.
    pub value: f64,
    pub by_window: Vec<(f64, f64)>,
    /// False when the two largest windows disagree by more than
    /// `PLATEAU_TOLERANCE`.
    pub plateau: bool,
}

/// ρ_T over `LIMIT_WINDOWS`, standing in for the T → ∞ limit.
pub fn correlation_limit(x: &[f64], y: &[f64], duration: f64, stride_ms: f64, discard_ms: f64) -> Result<CorrelationLimit> {
    let mut by_window = Vec::with_capacity(LIMIT_WINDOWS.len());
    for t in LIMIT_WINDOWS {
        let w = WindowSpec { t_ms: t, stride_ms, discard_ms };
        by_window.push((t, shift_correlation(x, y, duration, &w)?));
    }
    let k = by_window.len();
    let value = by_window[k - 1].1;
    let plateau = (by_window[k - 1].1 - by_window[k - 2].1).abs() <= PLATEAU_TOLERANCE;
    Ok(CorrelationLimit { value, by_window, plateau })
}
