use crate::closed::ab_unchecked;
use crate::{ClosedForm, CrossTermReading, MeanFieldParams, MeanFieldState, Result, AB};
use moment_maps::{siegert, ExternalDrive, LifParams};

/// Relative change below which a step counts as stationary.
pub const PLATEAU_TOL: f64 = 1e-4;
/// Consecutive stationary steps required.
pub const PLATEAU_STEPS: usize = 3;
/// Hard cap on iterated steps.
pub const MAX_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldOptions {
    pub form: ClosedForm,
    pub reading: CrossTermReading,
    /// Use the finite-size weights a₁, a₂ for the out-of-packet
    /// correlation instead of a₁ = 1, a₂ = 0.
    pub exact_weights: bool,
}

impl Default for MeanFieldOptions {
    fn default() -> Self {
        Self { form: ClosedForm::Corrected, reading: CrossTermReading::KeSquared, exact_weights: false }
    }
}

fn clamp_rho(x: f64, clamped: &mut bool) -> f64 {
    if x > 1.0 {
        *clamped = true;
        1.0
    } else if x < -1.0 {
        *clamped = true;
        -1.0
    } else {
        x
    }
}

/// One step with diagnostics: the A/B values used and whether a correlation
/// had to be clamped into [-1, 1].
pub(crate) fn step_detailed(
    s: &MeanFieldState,
    p: &MeanFieldParams,
    lif: &LifParams,
    ext: ExternalDrive,
    opts: &MeanFieldOptions,
) -> Result<(MeanFieldState, AB, bool)> {
    s.validate()?;
    p.validate()?;
    let ab = ab_unchecked(s, p, opts.form, opts.reading);
    let w = p.w as f64;
    let ke = p.k_e() as f64;
    let base = ke * (1.0 - p.r) * s.mu_out;
    let mu_hat_in = p.w0 * (w * (s.mu_in - s.mu_out) + base) + ext.mean;
    let mu_hat_out = p.w0 * (p.lambda * w * (s.mu_in - s.mu_out) + base) + ext.mean;
    let w2 = p.w0 * p.w0;
    let var_in = w2 * ab.b_in.max(0.0) + ext.variance;
    let var_out = w2 * ab.b_out.max(0.0) + ext.variance;

    let mut clamped = false;
    let rho_in = if var_in > 0.0 { clamp_rho(w2 * ab.a_in / var_in, &mut clamped) } else { 0.0 };
    let rho_out = if var_out > 0.0 {
        let x = if opts.exact_weights {
            let (n, w) = (p.n as f64, w);
            let den = n * n - w * w;
            let a1 = (n - w) * (n - w) / den;
            let a2 = 2.0 * w * (n - w) / den;
            let mixed = if var_in > 0.0 { w2 * ab.a_out / (var_in * var_out).sqrt() } else { 0.0 };
            a1 * w2 * ab.a_out / var_out + a2 * mixed
        } else {
            w2 * ab.a_out / var_out
        };
        clamp_rho(x, &mut clamped)
    } else {
        0.0
    };
    let o_in = siegert(mu_hat_in, var_in.sqrt(), lif)?;
    let o_out = siegert(mu_hat_out, var_out.sqrt(), lif)?;
    let next = MeanFieldState {
        mu_in: o_in.rate,
        mu_out: o_out.rate,
        sigma_in: o_in.sigma,
        sigma_out: o_out.sigma,
        rho_in,
        rho_out,
    };
    Ok((next, ab, clamped))
}

/// Advances the six mean-field variables by one layer. `ext` is the
/// external drive every neuron of the next layer receives on top of its
/// synaptic input.
pub fn meanfield_step(
    s: &MeanFieldState,
    p: &MeanFieldParams,
    lif: &LifParams,
    ext: ExternalDrive,
    opts: &MeanFieldOptions,
) -> Result<MeanFieldState> {
    step_detailed(s, p, lif, ext, opts).map(|(n, _, _)| n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `states[0]` is the initial layer.
    pub states: Vec<MeanFieldState>,
    /// Index of the first state at which the plateau criterion held.
    pub plateau_at: Option<usize>,
    /// Number of steps in which a correlation was clamped.
    pub clamped_steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &MeanFieldState {
        self.states.last().expect("trajectory holds the initial state")
    }
}

fn stationary(a: &MeanFieldState, b: &MeanFieldState) -> bool {
    a.as_array()
        .iter()
        .zip(b.as_array())
        .all(|(&x, y)| (y - x).abs() <= PLATEAU_TOL * x.abs().max(y.abs()).max(1e-6))
}

/// True when the last `PLATEAU_STEPS` steps of the trajectory were all
/// stationary.
pub fn plateaued(states: &[MeanFieldState]) -> bool {
    if states.len() < PLATEAU_STEPS + 1 {
        return false;
    }
    let tail = &states[states.len() - PLATEAU_STEPS - 1..];
    tail.windows(2).all(|w| stationary(&w[0], &w[1]))
}

/// Iterates `steps` layers. With `stop_at_plateau` the run ends as soon as
/// the plateau criterion holds.
pub fn iterate(
    s0: &MeanFieldState,
    p: &MeanFieldParams,
    lif: &LifParams,
    ext: ExternalDrive,
    opts: &MeanFieldOptions,
    steps: usize,
    stop_at_plateau: bool,
) -> Result<Trajectory> {
    let mut states = vec![*s0];
    let mut plateau_at = None;
    let mut clamped_steps = 0;
    for _ in 0..steps {
        let (next, _, clamped) = step_detailed(states.last().unwrap(), p, lif, ext, opts)?;
        clamped_steps += clamped as usize;
        states.push(next);
        if plateau_at.is_none() && plateaued(&states) {
            plateau_at = Some(states.len() - 1);
            if stop_at_plateau {
                break;
            }
        }
    }
    Ok(Trajectory { states, plateau_at, clamped_steps })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Attractor {
    Synfire,
    Invasion,
    Annihilation,
    Indeterminate,
}

impl Attractor {
    pub fn as_str(&self) -> &'static str {
        match self {
            Attractor::Synfire => "synfire",
            Attractor::Invasion => "invasion",
            Attractor::Annihilation => "annihilation",
            Attractor::Indeterminate => "indeterminate",
        }
    }
}

impl std::fmt::Display for Attractor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Labels the final state of a trajectory. Trajectories that have not
/// settled are indeterminate.
pub fn classify_attractor(states: &[MeanFieldState], epsilon: f64, delta: f64) -> Attractor {
    if !plateaued(states) {
        return Attractor::Indeterminate;
    }
    let last = states[states.len() - 1];
    if last.rho_in <= 1.0 - epsilon {
        Attractor::Annihilation
    } else if last.rho_out.abs() < delta {
        Attractor::Synfire
    } else if last.rho_out >= delta {
        Attractor::Invasion
    } else {
        Attractor::Indeterminate
    }
}
