use crate::{MeanFieldError, MeanFieldParams, MeanFieldState, Result};

/// Which version of the closed-form expressions to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClosedForm {
    /// The expressions as printed. The E/packet cross term inside the ρ₋
    /// bracket carries coefficient 1.
    Printed,
    /// Same expressions with the cross term carrying `(1 − r)`, which is
    /// what the block sums give once the inhibitory rows are included.
    /// Identical to `Printed` except for that one term.
    #[default]
    Corrected,
}

/// How to read the quadratic background coefficient in B₋.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossTermReading {
    /// `K_E²` with the rounded integer in-degree, as in the other three.
    #[default]
    KeSquared,
    /// `λ²N_E²` literally, without rounding.
    LambdaNeSquared,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AB {
    pub a_in: f64,
    pub b_in: f64,
    pub a_out: f64,
    pub b_out: f64,
}

/// Closed-form averaged double sums, weights in units of w0. Meaningful for
/// states with ρ₊ ≥ ρ₋; far outside that region the approximations can
/// make B negative.
pub fn compute_ab(s: &MeanFieldState, p: &MeanFieldParams, form: ClosedForm, reading: CrossTermReading) -> Result<AB> {
    s.validate()?;
    p.validate()?;
    if s.sigma_in == 0.0 && s.sigma_out == 0.0 {
        return Err(MeanFieldError::Degenerate);
    }
    Ok(ab_unchecked(s, p, form, reading))
}

pub(crate) fn ab_unchecked(s: &MeanFieldState, p: &MeanFieldParams, form: ClosedForm, reading: CrossTermReading) -> AB {
    let (sp, sm, rp, rm) = (s.sigma_in, s.sigma_out, s.rho_in, s.rho_out);
    let w = p.w as f64;
    let ke = p.k_e() as f64;
    let lam = p.lambda;
    let r = p.r;
    let c = match form {
        ClosedForm::Printed => 1.0,
        ClosedForm::Corrected => 1.0 - r,
    };
    let sp2 = sp * sp;
    let sm2 = sm * sm;
    let d = sp - sm;
    let quad = (r - 1.0).powi(2) * ke * ke * sm2;
    let quad_out = match reading {
        CrossTermReading::KeSquared => quad,
        CrossTermReading::LambdaNeSquared => {
            let lne = lam * p.n_e() as f64;
            (r - 1.0).powi(2) * lne * lne * sm2
        }
    };
    let inh = 4.0 * r * r * ke * sm2 * (1.0 - rm);

    let a_in = w * sp2 * (1.0 - rp)
        + lam * (ke - w) * sm2 * (1.0 - rm)
        + lam * inh
        + rm * (quad + 2.0 * c * ke * w * sm * d + w * w * d * d)
        + w * w * sp2 * (rp - rm);
    let b_in = w * sp2 * (1.0 - rp)
        + (ke - w) * sm2 * (1.0 - rm)
        + inh
        + rm * (quad + 2.0 * c * ke * w * sm * d + w * w * d * d)
        + w * w * sp2 * (rp - rm);
    let lw = lam * w;
    let a_out = lam * lw * sp2 * (1.0 - rp)
        + lam * (ke - lw) * sm2 * (1.0 - rm)
        + lam * inh
        + rm * (quad + 2.0 * c * ke * lw * sm * d + lw * lw * d * d)
        + lw * lw * sp2 * (rp - rm);
    let b_out = lw * sp2 * (1.0 - rp)
        + (ke - lw) * sm2 * (1.0 - rm)
        + inh
        + rm * (quad_out + 2.0 * c * ke * lw * sm * d + lw * lw * d * d)
        + lw * lw * sp2 * (rp - rm);
    AB { a_in, b_in, a_out, b_out }
}
