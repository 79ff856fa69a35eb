use crate::{check_finite, dawson, Result, SpecialFnError};

/// Tolerances for the adaptive Gauss-Kronrod integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-9,
            absolute_tolerance: 1e-300,
            max_subdivisions: 500,
        }
    }
}

impl QuadratureSpec {
    pub fn new(relative_tolerance: f64, absolute_tolerance: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            relative_tolerance,
            absolute_tolerance,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0) || !(self.absolute_tolerance > 0.0) {
            return Err(SpecialFnError::Domain("tolerances must be positive".into()));
        }
        if self.max_subdivisions < 1 {
            return Err(SpecialFnError::Domain("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
pub(crate) fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Estimate {
        value: kron * h,
        error: ((kron - gauss) * h).abs(),
    }
}

/// Globally adaptive Gauss-Kronrod quadrature of `f` over `[a, b]`.
///
/// Swapping the bounds negates the result exactly.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_finite(a)?;
    check_finite(b)?;
    spec.validate()?;
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    if a > b {
        let e = gauss_kronrod(f, b, a, spec)?;
        return Ok(Estimate {
            value: -e.value,
            error: e.error,
        });
    }
    let first = gk15(&f, a, b);
    let mut panels = vec![(a, b, first)];
    let mut subdivisions = 0;
    loop {
        let total: f64 = panels.iter().map(|p| p.2.value).sum();
        let err: f64 = panels.iter().map(|p| p.2.error).sum();
        if !total.is_finite() {
            return Err(SpecialFnError::Domain("integrand is not finite on the interval".into()));
        }
        if err <= spec.absolute_tolerance.max(spec.relative_tolerance * total.abs()) {
            return Ok(Estimate { value: total, error: err });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(SpecialFnError::Convergence {
                estimate: total,
                error: err,
                subdivisions,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.error.total_cmp(&y.1 .2.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval cannot be split further in floating point.
            return Err(SpecialFnError::Convergence {
                estimate: total,
                error: err,
                subdivisions,
            });
        }
        panels.push((lo, mid, gk15(&f, lo, mid)));
        panels.push((mid, hi, gk15(&f, mid, hi)));
        subdivisions += 1;
    }
}

/// Signed integral of `D₋` over `[a, b]`.
pub fn integrate_dminus(a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    gauss_kronrod(dawson::dminus_unchecked, a, b, spec).map(|e| e.value)
}

/// Signed integral of `D₋⊗D₋` over `[a, b]`, evaluating the inner integral adaptively at each node.
pub fn integrate_dtensor(a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_finite(a)?;
    check_finite(b)?;
    let inner = QuadratureSpec {
        relative_tolerance: (spec.relative_tolerance * 0.1).max(1e-14),
        ..*spec
    };
    let failure = std::cell::Cell::new(None);
    let f = |u: f64| match dawson::tensor_with(u, &inner) {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let out = gauss_kronrod(f, a, b, spec);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    out.map(|e| e.value)
}
