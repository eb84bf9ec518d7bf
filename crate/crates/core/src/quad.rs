//! Adaptive Gauss-Kronrod (7/15) quadrature on real intervals and complex polylines.

use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TimfError};

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
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadMethod {
    GaussKronrod15,
}

/// Tolerances for adaptive panel refinement, plus an optional complex polyline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub method: QuadMethod,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
    /// Nodes of a polyline for contour integrals; unused on real intervals.
    #[serde(default)]
    pub contour: Vec<Complex64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            method: QuadMethod::GaussKronrod15,
            abs_tol: 1e-12,
            rel_tol: 1e-11,
            max_panels: 20_000,
            contour: Vec::new(),
        }
    }
}

/// Integral value and error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub panels: usize,
}

fn gk15(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Adaptive integral of `f` over `[a, b]`, always splitting the panel with the largest error.
pub fn integrate(f: impl Fn(f64) -> Complex64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    integrate_from(&f, &[a, b], spec)
}

/// Like [`integrate`] with an initial partition, useful when the integrand has known features.
pub fn integrate_from(f: &impl Fn(f64) -> Complex64, breaks: &[f64], spec: &QuadratureSpec) -> Result<QuadResult> {
    let mut heap = BinaryHeap::new();
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for w in breaks.windows(2) {
        let (v, e) = gk15(f, w[0], w[1]);
        value += v;
        error += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, error: e });
    }
    let mut panels = heap.len();
    loop {
        if !(value.is_finite() && error.is_finite()) {
            return Err(TimfError::QuadratureFailure { estimate: f64::INFINITY, tolerance: spec.abs_tol });
        }
        if error <= spec.abs_tol.max(spec.rel_tol * value.norm()) {
            break;
        }
        if panels >= spec.max_panels {
            return Err(TimfError::QuadratureFailure {
                estimate: error,
                tolerance: spec.abs_tol.max(spec.rel_tol * value.norm()),
            });
        }
        let p = heap.pop().unwrap();
        let m = 0.5 * (p.a + p.b);
        if !(m > p.a && m < p.b) {
            return Err(TimfError::QuadratureFailure { estimate: error, tolerance: spec.abs_tol });
        }
        let (v1, e1) = gk15(f, p.a, m);
        let (v2, e2) = gk15(f, m, p.b);
        value += v1 + v2 - p.value;
        error += e1 + e2 - p.error;
        heap.push(Panel { a: p.a, b: m, value: v1, error: e1 });
        heap.push(Panel { a: m, b: p.b, value: v2, error: e2 });
        panels += 1;
    }
    // Re-sum to shed accumulated cancellation in the running totals.
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(QuadResult { value, error, panels })
}

/// Contour integral of `f` along the polyline `spec.contour`.
pub fn integrate_contour(f: impl Fn(Complex64) -> Complex64, spec: &QuadratureSpec) -> Result<QuadResult> {
    let mut total = QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0, panels: 0 };
    for w in spec.contour.windows(2) {
        let (p, q) = (w[0], w[1]);
        let d = q - p;
        let r = integrate(|t| f(p + d * t) * d, 0.0, 1.0, spec)?;
        total.value += r.value;
        total.error += r.error;
        total.panels += r.panels;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r =
            integrate(|x| Complex64::new(x.powi(5) - 3.0 * x * x, 0.0), 0.0, 2.0, &QuadratureSpec::default()).unwrap();
        assert!((r.value.re - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn lorentzian_normalization() {
        let spec = QuadratureSpec::default();
        let r =
            integrate(|t| Complex64::new(1.0 / (1.0 + t * t) / std::f64::consts::PI, 0.0), -1e3, 1e3, &spec).unwrap();
        assert!((r.value.re - (1.0 - 2.0 * (1e-3f64).atan() / std::f64::consts::PI)).abs() < 1e-10);
    }

    #[test]
    fn contour_around_pole() {
        let spec = QuadratureSpec {
            contour: vec![
                Complex64::new(1.0, -1.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(-1.0, 1.0),
                Complex64::new(-1.0, -1.0),
                Complex64::new(1.0, -1.0),
            ],
            ..Default::default()
        };
        let r = integrate_contour(|z| 1.0 / z, &spec).unwrap();
        assert!((r.value - Complex64::new(0.0, std::f64::consts::TAU)).norm() < 1e-10);
    }

    #[test]
    fn panel_cap_reports_failure() {
        let spec = QuadratureSpec { max_panels: 3, ..Default::default() };
        let r = integrate(|x| Complex64::new(1.0 / x.abs().sqrt(), 0.0), -1.0, 2.0, &spec);
        assert!(matches!(r, Err(TimfError::QuadratureFailure { .. })));
        // A node on the singularity.
        let r = integrate(|x| Complex64::new(1.0 / x.abs().sqrt(), 0.0), -1.0, 1.0, &QuadratureSpec::default());
        assert!(matches!(r, Err(TimfError::QuadratureFailure { .. })));
    }
}
