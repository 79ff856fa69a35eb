use crate::dawson::{dminus_unchecked, log_dminus_unchecked, tensor_with};
use crate::quad::{gauss_kronrod, gk15, QuadratureSpec};
use once_cell::sync::Lazy;

const U_MIN: f64 = -30.0;
const U_MAX: f64 = 8.0;
const PER_UNIT: usize = 1024;
const SERIES_TERMS: usize = 9;

/// Dense cumulative tables of `∫D₋` and `∫D₋⊗D₋` with cubic Hermite interpolation.
///
/// Inside `[-30, 8]` the nodes carry exact derivative values, so interpolation
/// error stays below 1e-8 relative. Left of the table an asymptotic series in
/// `1/u` is used; right of it the integrand is integrated adaptively.
pub struct DawsonTable {
    h: f64,
    f1: Vec<f64>,
    d1: Vec<f64>,
    f2: Vec<f64>,
    d2: Vec<f64>,
    // Coefficients of D₋(-x) = Σ dk x^{-(2k+1)} and D₋⊗D₋(-x) = Σ tk x^{-(2k+3)}.
    dk: [f64; SERIES_TERMS],
    tk: [f64; SERIES_TERMS],
}

static TABLE: Lazy<DawsonTable> = Lazy::new(DawsonTable::build);

/// Shared, lazily built table.
pub fn dawson_table() -> &'static DawsonTable {
    &TABLE
}

impl DawsonTable {
    fn build() -> Self {
        let n = ((U_MAX - U_MIN) as usize) * PER_UNIT;
        let h = (U_MAX - U_MIN) / n as f64;
        let tight = QuadratureSpec {
            relative_tolerance: 1e-13,
            ..QuadratureSpec::default()
        };
        let mut f1 = Vec::with_capacity(n + 1);
        let mut d1 = Vec::with_capacity(n + 1);
        let mut f2 = Vec::with_capacity(n + 1);
        let mut d2 = Vec::with_capacity(n + 1);
        let mut tensor = tensor_with(U_MIN, &tight).expect("tensor at table start");
        let mut c1 = 0.0;
        let mut c2 = 0.0;
        for i in 0..=n {
            let u = U_MIN + i as f64 * h;
            f1.push(c1);
            d1.push(dminus_unchecked(u));
            f2.push(c2);
            d2.push(tensor);
            if i == n {
                break;
            }
            // Tensor value a distance s to the right of u, from the value at u.
            let advance = |s: f64| {
                if s == 0.0 {
                    return tensor;
                }
                let end = u + s;
                let g = |v: f64| (2.0 * log_dminus_unchecked(v) + end * end - v * v).exp();
                (s * (2.0 * u + s)).exp() * tensor + gk15(&g, u, end).value
            };
            c1 += gk15(&dminus_unchecked, u, u + h).value;
            c2 += gk15(&|v: f64| advance(v - u), u, u + h).value;
            tensor = advance(h);
        }
        let mut dk = [0.0; SERIES_TERMS];
        dk[0] = 0.5;
        for k in 1..SERIES_TERMS {
            dk[k] = -dk[k - 1] * (2 * k - 1) as f64 / 2.0;
        }
        let mut tk = [0.0; SERIES_TERMS];
        for m in 0..SERIES_TERMS {
            let em: f64 = (0..=m).map(|i| dk[i] * dk[m - i]).sum();
            let prev = if m == 0 { 0.0 } else { tk[m - 1] };
            tk[m] = 0.5 * (em - (2 * m + 1) as f64 * prev);
        }
        Self { h, f1, d1, f2, d2, dk, tk }
    }

    fn hermite(&self, f: &[f64], d: &[f64], u: f64) -> f64 {
        let pos = (u - U_MIN) / self.h;
        let i = (pos.floor() as usize).min(f.len() - 2);
        let t = pos - i as f64;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * f[i] + h10 * self.h * d[i] + h01 * f[i + 1] + h11 * self.h * d[i + 1]
    }

    /// Antiderivative of D₋(-x) in x, up to a constant.
    fn series1(&self, x: f64) -> f64 {
        let inv2 = 1.0 / (x * x);
        let mut p = 1.0;
        let mut s = self.dk[0] * x.ln();
        for k in 1..SERIES_TERMS {
            p *= inv2;
            s -= self.dk[k] * p / (2 * k) as f64;
        }
        s
    }

    /// Antiderivative of D₋⊗D₋(-x) in x, up to a constant.
    fn series2(&self, x: f64) -> f64 {
        let inv2 = 1.0 / (x * x);
        let mut p = 1.0;
        let mut s = 0.0;
        for k in 0..SERIES_TERMS {
            p *= inv2;
            s -= self.tk[k] * p / (2 * k + 2) as f64;
        }
        s
    }

    /// Primitive of D₋ normalised to vanish at the left table edge.
    pub fn primitive_dminus(&self, u: f64) -> f64 {
        if u < U_MIN {
            -(self.series1(-u) - self.series1(-U_MIN))
        } else if u <= U_MAX {
            self.hermite(&self.f1, &self.d1, u)
        } else {
            let tail = gauss_kronrod(dminus_unchecked, U_MAX, u, &QuadratureSpec::default())
                .map(|e| e.value)
                .unwrap_or(f64::INFINITY);
            self.f1[self.f1.len() - 1] + tail
        }
    }

    /// Primitive of D₋⊗D₋ normalised to vanish at the left table edge.
    pub fn primitive_dtensor(&self, u: f64) -> f64 {
        if u < U_MIN {
            -(self.series2(-u) - self.series2(-U_MIN))
        } else if u <= U_MAX {
            self.hermite(&self.f2, &self.d2, u)
        } else {
            let spec = QuadratureSpec::default();
            let tail = gauss_kronrod(|v| tensor_with(v, &spec).unwrap_or(f64::INFINITY), U_MAX, u, &spec)
                .map(|e| e.value)
                .unwrap_or(f64::INFINITY);
            self.f2[self.f2.len() - 1] + tail
        }
    }

    /// `∫_a^b D₋(u) du`.
    pub fn int_dminus(&self, a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        self.primitive_dminus(b) - self.primitive_dminus(a)
    }

    /// `∫_a^b D₋⊗D₋(u) du`.
    pub fn int_dtensor(&self, a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        self.primitive_dtensor(b) - self.primitive_dtensor(a)
    }

    pub fn upper_edge(&self) -> f64 {
        U_MAX
    }
}
