//! Equal-scale case `A1 = A2 = theta`: symmetric and symmetry-breaking sectors, threshold
//! behaviour and cut diagnostics.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ModelFree;
use crate::error::{Result, TimfError};
use crate::grid::{GridField, GridSpec};
use crate::poly::{discriminant, BiPoly, CPoly, DiscriminantConvention, Poly, RationalFunction, Var};
use crate::roots::{all_roots, RootOptions};

type C = Complex64;

/// Amplitude condition at `A1 = A2` split as `quadratic^2 * cubic`.
#[derive(Clone, Debug, PartialEq)]
pub struct EqualThetaFactors {
    /// Symmetry-breaking factor, appearing squared.
    pub quadratic: BiPoly,
    /// Symmetric factor.
    pub cubic: BiPoly,
}

impl EqualThetaFactors {
    /// Splits a condition with a squared factor: the square part is `gcd(P, dP/dD)`.
    pub fn split(condition: &BiPoly) -> Result<Self> {
        let g = condition.prs_gcd(&condition.derivative());
        if g.degree() != Some(2) {
            return Err(TimfError::Exact(format!(
                "expected a squared quadratic factor, gcd has degree {:?}",
                g.degree()
            )));
        }
        let cubic = condition
            .exact_div_poly(&g.mul_poly(&g))
            .ok_or_else(|| TimfError::Exact("squared factor does not divide the condition".into()))?;
        Ok(EqualThetaFactors { quadratic: g, cubic })
    }

    /// Factors at unit parameters, i.e. in units `z / theta` and `D theta`.
    pub fn unit() -> Result<&'static EqualThetaFactors> {
        static CELL: OnceLock<std::result::Result<EqualThetaFactors, TimfError>> = OnceLock::new();
        CELL.get_or_init(|| EqualThetaFactors::split(&ModelFree::unit()?.condition)).as_ref().map_err(Clone::clone)
    }
}

/// Roots of the two factors at one energy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualThetaRoots {
    pub breaking: Vec<C>,
    pub symmetric: Vec<C>,
}

/// Amplitudes at energy `z` when `A1 = A2 = theta`, both in physical units. Fewer roots are
/// returned where a factor loses degree.
pub fn equal_theta_solve(z: C, theta: f64) -> Result<EqualThetaRoots> {
    let f = EqualThetaFactors::unit()?;
    let zs = z / theta;
    let solve = |p: &BiPoly| -> Result<Vec<C>> {
        let q = trim_small(p.eval_inner_c64(zs));
        if q.degree().unwrap_or(0) == 0 {
            return Ok(Vec::new());
        }
        Ok(all_roots(&q, &RootOptions::default())?.roots.into_iter().map(|d| d / theta).collect())
    };
    Ok(EqualThetaRoots { breaking: solve(&f.quadratic)?, symmetric: solve(&f.cubic)? })
}

/// Drops leading coefficients at rounding level relative to the others.
fn trim_small(p: CPoly) -> CPoly {
    let scale = p.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut c = p.coeffs().to_vec();
    while c.last().is_some_and(|l| l.norm() <= 1e-14 * scale) {
        c.pop();
    }
    CPoly::new(p.variable(), c)
}

/// Symmetric-sector equation `2 theta x^3 + 2 z x + z = 0` for `x` in units of the width.
pub fn symmetric_cubic(z: C, theta: f64) -> CPoly {
    CPoly::new(Var::X, vec![z, 2.0 * z, C::new(0.0, 0.0), C::new(2.0 * theta, 0.0)])
}

/// Factor of the unit-parameter x-resultant left after removing the symmetric cubic.
pub fn breaking_quartic() -> Result<BiPoly> {
    let m = ModelFree::unit()?;
    let z = |c: &[i64]| crate::poly::qpoly(Var::Z, c);
    let cubic: BiPoly = Poly::new(Var::X, vec![z(&[0, 1]), z(&[0, 2]), z(&[]), z(&[2])]);
    m.rx.exact_div_poly(&cubic)
        .ok_or_else(|| TimfError::Exact("symmetric cubic does not divide the x-resultant".into()))
}

/// Partner of a symmetry-breaking root at unit parameters: `x y = z - x - y`.
pub fn breaking_partner(x: C, z: C) -> Result<C> {
    if (x + 1.0).norm() < 1e-13 {
        return Err(TimfError::DenominatorVanishes);
    }
    Ok((z - x) / (x + 1.0))
}

/// Discriminant of the symmetric factor, divided by the squared leading power.
pub fn cubic_discriminant() -> Result<RationalFunction> {
    discriminant(&EqualThetaFactors::unit()?.cubic, DiscriminantConvention::Monic)
}

/// Leading-order behaviour of the three symmetric branches near the two-body threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPrediction {
    pub z: C,
    /// `D = -2 - j 3 2^(2/3) z^(1/3)` for the three cube roots of unity `j`.
    pub d: [C; 3],
    /// `x = j (-z/2)^(1/3)`.
    pub x: [C; 3],
}

/// Validity window of [`threshold_expansions`].
pub const THRESHOLD_WINDOW: f64 = 0.01;

/// Principal cube root.
pub fn cbrt(z: C) -> C {
    if z.norm() == 0.0 {
        return z;
    }
    C::from_polar(z.norm().cbrt(), z.arg() / 3.0)
}

/// Predicted symmetric amplitudes and momenta at unit parameters for `|z| <= 0.01`.
pub fn threshold_expansions(z: C) -> Result<ThresholdPrediction> {
    if z.norm() > THRESHOLD_WINDOW {
        return Err(TimfError::OutsideWindow { distance: z.norm(), window: THRESHOLD_WINDOW });
    }
    let j = [C::new(1.0, 0.0), C::new(-0.5, 0.75f64.sqrt()), C::new(-0.5, -(0.75f64.sqrt()))];
    let k = 3.0 * 2f64.powf(2.0 / 3.0);
    let zc = cbrt(z);
    let xc = cbrt(-z / 2.0);
    Ok(ThresholdPrediction { z, d: j.map(|j| -2.0 - j * k * zc), x: j.map(|j| j * xc) })
}

/// The two amplitudes near the double root at `z = -27/16`:
/// `16 - 256/9 e +- 8192/243 (-e^3)^(1/2)` with `e = z + 27/16`.
pub fn double_root_expansion(z: C) -> [C; 2] {
    let e = z + 27.0 / 16.0;
    let base = 16.0 - 256.0 / 9.0 * e;
    let r = 8192.0 / 243.0 * (-(e * e * e)).sqrt();
    [base + r, base - r]
}

/// Outcome of the symmetry-breaking sweep over real energies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppendixReport {
    pub samples: usize,
    /// Pairs `(z, x, y)` with both real parts positive.
    pub violations: Vec<(f64, C, C)>,
}

/// Checks every symmetry-breaking pair at the given real energies for `Re x > 0` and `Re y > 0`.
pub fn appendix_sweep(zs: &[f64]) -> Result<AppendixReport> {
    let q = breaking_quartic()?;
    let opts = RootOptions::default();
    let mut violations = Vec::new();
    for &zr in zs {
        let z = C::new(zr, 0.0);
        let p = trim_small(q.eval_inner_c64(z));
        if p.degree().unwrap_or(0) == 0 {
            continue;
        }
        for x in all_roots(&p, &opts)?.roots {
            if x.re <= 0.0 {
                continue;
            }
            let y = breaking_partner(x, z)?;
            if y.re > 0.0 {
                violations.push((zr, x, y));
            }
        }
    }
    Ok(AppendixReport { samples: zs.len(), violations })
}

/// Which roots enter a real-part product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    /// Three roots of the symmetric cubic.
    Symmetric,
    /// Four roots of the symmetry-breaking quartic.
    Breaking,
}

/// Product of the real parts of the sector's `x` roots at unit parameters, over a grid.
pub fn rex_product_grid(spec: &GridSpec, sector: Sector) -> Result<GridField> {
    let opts = RootOptions::default();
    match sector {
        Sector::Symmetric => GridField::sample(spec, "product_re_x_symmetric", |z| {
            let p = trim_small(symmetric_cubic(z, 1.0));
            product_re(&p, &opts)
        }),
        Sector::Breaking => {
            let q = breaking_quartic()?;
            GridField::sample(spec, "product_re_x_breaking", |z| product_re(&trim_small(q.eval_inner_c64(z)), &opts))
        }
    }
}

fn product_re(p: &CPoly, opts: &RootOptions) -> Result<f64> {
    if p.coeffs().iter().all(|c| c.norm() == 0.0) {
        return Ok(0.0);
    }
    // An exact zero root carries Re x = 0.
    if p.coeff(0).norm() == 0.0 {
        return Ok(0.0);
    }
    Ok(all_roots(p, opts)?.roots.iter().map(|r| r.re).product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_free::{
        breaking_inverse, breaking_quartic_reference, cubic_discriminant_reference, equal_theta_reference,
    };
    use crate::poly::{q, ToComplex};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn split_matches_closed_form() {
        let f = EqualThetaFactors::unit().unwrap();
        let (quad, cubic) = equal_theta_reference(&q(1));
        assert!(f.quadratic.proportional(&quad));
        assert!(f.cubic.proportional(&cubic));
    }

    #[test]
    fn threshold_and_double_root() {
        let r = equal_theta_solve(c(0.0, 0.0), 1.0).unwrap();
        for d in &r.symmetric {
            assert!((d + 2.0).norm() < 1e-4);
        }
        for d in &r.breaking {
            assert!((d - 2.0).norm() < 1e-6);
        }
        let r = equal_theta_solve(c(-27.0 / 16.0, 0.0), 1.0).unwrap();
        let near16 = r.symmetric.iter().filter(|d| (*d - 16.0).norm() < 1e-5).count();
        assert_eq!(near16, 2);
        assert!(r.symmetric.iter().any(|d| (d + 0.2).norm() < 1e-10));
    }

    #[test]
    fn breaking_inverse_holds() {
        for z in [c(1.0 / 3.0, 0.0), c(0.3, 0.7), c(-2.0, 0.1)] {
            for d in equal_theta_solve(z, 1.0).unwrap().breaking {
                assert!((breaking_inverse(d) - z).norm() < 1e-10);
            }
        }
        // D = 1 lies on the breaking sector at z = 1/3.
        let f = EqualThetaFactors::unit().unwrap();
        let v = f.quadratic.eval_inner_c64(c(1.0 / 3.0, 0.0)).eval(&c(1.0, 0.0));
        assert!(v.norm() < 1e-13);
    }

    #[test]
    fn quartic_matches_closed_form() {
        assert!(breaking_quartic().unwrap().proportional(&breaking_quartic_reference()));
    }

    #[test]
    fn discriminant_matches_closed_form() {
        let d = cubic_discriminant().unwrap();
        assert!(d.proportional(&cubic_discriminant_reference()));
        assert!(d.eval(&crate::poly::qr(-27, 16)).unwrap().to_c64().norm() == 0.0);
    }

    #[test]
    fn expansions_near_threshold() {
        let z = c(1e-6, 0.0);
        let pred = threshold_expansions(z).unwrap();
        let roots = equal_theta_solve(z, 1.0).unwrap().symmetric;
        for d in roots {
            let best = pred.d.iter().map(|p| (p - d).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 0.05 * (d + 2.0).norm());
        }
        assert!(threshold_expansions(c(0.1, 0.0)).is_err());
    }

    #[test]
    fn symmetric_grid_cut_through_origin() {
        let spec = GridSpec { re_min: -1.0, re_max: 1.0, im_min: -1.0, im_max: 1.0, n_re: 21, n_im: 21 };
        let g = rex_product_grid(&spec, Sector::Symmetric).unwrap();
        assert_eq!(g.at(10, 10), 0.0);
        assert!(crate::grid::distance_to_contour(&g.contour, [0.0, 0.0]) <= 0.1 * 2f64.sqrt());
        // Conjugate rows agree.
        for i in 0..21 {
            assert!((g.at(i, 3) - g.at(i, 17)).abs() <= 1e-10 * g.at(i, 3).abs().max(1.0));
        }
    }

    #[test]
    fn appendix_has_no_physical_pair() {
        let zs: Vec<f64> = (0..601).map(|k| -3.0 + 0.01 * k as f64).collect();
        assert!(appendix_sweep(&zs).unwrap().violations.is_empty());
    }
}
