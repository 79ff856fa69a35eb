use crate::quad::{gauss_kronrod, QuadratureSpec};
use crate::{check_finite, Result, SpecialFnError};
use libm::erfc;

const SQRT_PI: f64 = 1.772_453_850_905_516;
const HALF_SQRT_PI: f64 = 0.886_226_925_452_758;
/// Below -ASYMPTOTIC_CUT the complementary error function underflows, so an
/// asymptotic series is used instead.
const ASYMPTOTIC_CUT: f64 = 25.0;

/// `erfcx(x) * x * sqrt(pi)` for large positive x.
fn scaled_tail_series(x: f64) -> f64 {
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..12 {
        term *= -((2 * n - 1) as f64) * inv;
        sum += term;
    }
    sum
}

pub(crate) fn dminus_unchecked(u: f64) -> f64 {
    if u >= 0.0 {
        (u * u).exp() * HALF_SQRT_PI * (2.0 - erfc(u))
    } else {
        let x = -u;
        if x < ASYMPTOTIC_CUT {
            HALF_SQRT_PI * (x * x).exp() * erfc(x)
        } else {
            scaled_tail_series(x) / (2.0 * x)
        }
    }
}

/// `D₋(u) = exp(u²) ∫_{-∞}^u exp(-v²) dv = (√π/2) erfcx(-u)`.
///
/// Overflows to infinity for `u` above about 26.6; use [`log_dawson_minus`] there.
pub fn dawson_minus(u: f64) -> Result<f64> {
    check_finite(u)?;
    Ok(dminus_unchecked(u))
}

pub(crate) fn log_dminus_unchecked(u: f64) -> f64 {
    if u > ASYMPTOTIC_CUT {
        u * u + SQRT_PI.ln() + (-0.5 * erfc(u)).ln_1p()
    } else {
        dminus_unchecked(u).ln()
    }
}

/// `ln D₋(u)`, finite for every finite `u`.
pub fn log_dawson_minus(u: f64) -> Result<f64> {
    check_finite(u)?;
    Ok(log_dminus_unchecked(u))
}

/// `(ξL - y) / z`, the reduced integration bound of the first-passage integrals.
pub fn passage_bound(xi: f64, y: f64, z: f64, leak: f64) -> Result<f64> {
    for v in [xi, y, z, leak] {
        check_finite(v)?;
    }
    if z <= 0.0 {
        return Err(SpecialFnError::Domain(format!("z must be positive, got {z}")));
    }
    Ok((xi * leak - y) / z)
}

fn tail_length(u: f64) -> f64 {
    // exp(2ut - t²) is below 1e-28 past this point.
    if u < -1.0 {
        (32.0 / -u).min(8.0)
    } else {
        8.0
    }
}

/// `D₋⊗D₋(u)` with an explicit tolerance for the defining integral.
pub(crate) fn tensor_with(u: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_finite(u)?;
    if u <= 0.0 {
        // exp(u²) ∫_{-∞}^u e^{-v²} D² dv with v = u - t keeps every factor bounded.
        let f = |t: f64| {
            let d = dminus_unchecked(u - t);
            (2.0 * u * t - t * t).exp() * d * d
        };
        let mut total = 0.0;
        let mut lo = 0.0;
        let cut = tail_length(u);
        // Split so that the steep head near t = 0 is resolved early.
        for hi in [cut / 64.0, cut / 8.0, cut] {
            total += gauss_kronrod(f, lo, hi, spec)?.value;
            lo = hi;
        }
        Ok(total)
    } else {
        let at_zero = tensor_with(0.0, spec)?;
        let f = |v: f64| (2.0 * log_dminus_unchecked(v) - v * v).exp();
        let inner = gauss_kronrod(f, 0.0, u, spec)?.value;
        Ok((u * u).exp() * (at_zero + inner))
    }
}

/// `(D₋⊗D₋)(u) = exp(u²) ∫_{-∞}^u exp(-v²) D₋(v)² dv`.
///
/// Overflows to infinity for `u` above about 18.8.
pub fn dawson_tensor(u: f64) -> Result<f64> {
    let spec = QuadratureSpec {
        relative_tolerance: 1e-12,
        ..QuadratureSpec::default()
    };
    tensor_with(u, &spec)
}
