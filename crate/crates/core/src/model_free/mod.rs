//! Two free particles with Lorentzian source packets.
//!
//! Pseudo-momenta `x = -i w1`, `y = -i w2` turn the stationarity conditions into two
//! polynomial equations. Everything polynomial here (the x- and y-resultants, the solvent
//! `y(x)`, the relation linear in `D`, the degree-7 amplitude condition) is derived by exact
//! elimination when a [`ModelFree`] is built.

mod reference;
mod sectors;

pub use reference::*;
pub use sectors::*;

use num_bigint::BigInt;
use num_complex::Complex64;

use crate::branch::TimfModel;
use crate::elim::{normalize_by_constant, primitive_normalize, PolySystem};
use crate::error::{Result, TimfError};
use crate::params::ModelFreeParams;
use crate::poly::{interpolate, mc, mi, mv, BiPoly, CPoly, GaussRational, Multi, Poly, QPoly, Ring, Var};

type C = Complex64;

const POLE_TOL: f64 = 1e-14;

/// One-body integral `J = (-w - i g) / (w (w - K + i g) (w + K + i g))` of a Lorentzian packet
/// centred at `K` with width `g`.
pub fn lorentz_j(omega: C, k: f64, gamma: f64) -> Result<C> {
    let ig = C::new(0.0, gamma);
    let den = omega * (omega - k + ig) * (omega + k + ig);
    if den.norm() < POLE_TOL {
        return Err(TimfError::PoleHit { magnitude: den.norm() });
    }
    Ok((-omega - ig) / den)
}

/// Stationarity equations, amplitude relation and solvent with the given coefficients.
/// Coefficients may themselves be symbolic (e.g. `mv(Var::A1)`).
pub fn free_system(a1: &Multi, a2: &Multi, g1: &Multi, g2: &Multi) -> PolySystem {
    let (x, y, z, d) = (mv(Var::X), mv(Var::Y), mv(Var::Z), mv(Var::D));
    let x2 = &x * &x;
    let y2 = &y * &y;
    let e1 = mi(2) * a1 * &x2 * &y + a1 * g2 * &x2 - a2 * g2 * &y2 + mi(2) * &y * &z + g2 * &z;
    let e2 = mi(2) * a2 * &y2 * &x + a2 * g1 * &y2 - a1 * g1 * &x2 + mi(2) * &x * &z + g1 * &z;
    let amplitude = a1 * a2 * &x * (&x + g1) * &y * (&y + g2) * &d + &z + a1 * &x2 + a2 * &y2;
    let y_num = -(g2 * (a1 * &x2 * &x + mi(2) * &x * &z + g1 * &z));
    let y_den = (mi(2) * &x + g1) * (a1 * &x2 + &z);
    PolySystem { e1, e2, amplitude, y_num, y_den }
}

/// The first model with its derived elimination polynomials.
#[derive(Clone, Debug)]
pub struct ModelFree {
    pub params: ModelFreeParams,
    pub system: PolySystem,
    /// x-resultant, degree 7 in `x` with coefficients in `z`.
    pub rx: BiPoly,
    /// y-resultant, degree 7 in `y`.
    pub ry: BiPoly,
    /// Relation `lin_d(x, z) D + lin_0(x, z) = 0` after substituting the solvent.
    pub lin_d: BiPoly,
    pub lin_0: BiPoly,
    /// Amplitude condition in `D` over `z`, normalized to the constant coefficient 256.
    pub condition: BiPoly,
}

impl ModelFree {
    pub fn new(params: ModelFreeParams) -> Result<Self> {
        params.validate()?;
        params.require_centred()?;
        let [a1, a2, g1, g2] = params.exact();
        let system = free_system(&mc(&a1), &mc(&a2), &mc(&g1), &mc(&g2));
        let rx = primitive_normalize(&system.x_resultant::<crate::poly::QPoly>(&[Var::Z])?, &[Var::X, Var::Z])?;
        let ry = primitive_normalize(&system.y_resultant::<crate::poly::QPoly>(&[Var::Z])?, &[Var::Y, Var::Z])?;
        let lin = system.amplitude_in_x().coeffs_in(Var::D);
        let nest = |m: &Multi| -> BiPoly { m.nest(&[Var::X, Var::Z]) };
        let lin_0 = nest(lin.first().unwrap_or(&Multi::zero()));
        let lin_d = nest(lin.get(1).unwrap_or(&Multi::zero()));
        let raw: BiPoly = system.amplitude_resultant(&[Var::Z])?;
        let condition = normalize_by_constant(&raw, &Poly::constant(Var::Z, GaussRational::from_i64(256)))?;
        Ok(ModelFree { params, system, rx, ry, lin_d, lin_0, condition })
    }

    pub fn unit() -> Result<Self> {
        ModelFree::new(ModelFreeParams::unit())
    }

    /// Left-hand sides of the two stationarity equations.
    pub fn system_residual(&self, x: C, y: C, z: C) -> (C, C) {
        self.residual(x, y, z).0
    }

    /// Amplitude condition at `z` in scaled form: coefficients of `Dbar = z D`.
    pub fn scaled_condition_at(&self, z: C) -> CPoly {
        let p = self.condition.eval_inner_c64(z);
        let mut zk = C::new(1.0, 0.0);
        let coeffs = p
            .coeffs()
            .iter()
            .map(|c| {
                let v = c / zk;
                zk *= z;
                v
            })
            .collect();
        CPoly::new(Var::D, coeffs)
    }
}

/// Amplitude condition in the scaled variables `Dbar = z D`, `z1 = A1 / z`, `z2 = A2 / z`, as a
/// polynomial in `Dbar` over `z1` over `z2`, normalized to the constant coefficient 256.
///
/// By the scaling invariance of the model it is enough to work at `z = 1` with unit widths.
/// The normalized condition is computed exactly on a grid of integer `(A1, A2)` and
/// interpolated; the result is then checked against direct elimination at points off the grid.
pub fn scaled_amplitude_condition() -> Result<Poly<BiPoly>> {
    const NODES: usize = SCALED_DEGREE_BOUND + 1;
    let at = |u: i64, v: i64| -> Result<Vec<GaussRational>> {
        let (one, z) = (mi(1), GaussRational::one());
        let sys = free_system(&mi(u), &mi(v), &one, &one).subs(Var::Z, &z);
        let raw: QPoly = sys.amplitude_resultant(&[])?;
        let cond = normalize_by_constant(&raw, &GaussRational::from_i64(256))?;
        Ok((0..=7).map(|k| cond.coeff(k)).collect())
    };
    let nodes: Vec<BigInt> = (1..=NODES as i64).map(BigInt::from).collect();
    // values[k][i][j]: coefficient of Dbar^k at A1 = nodes[i], A2 = nodes[j].
    let mut values = vec![vec![vec![GaussRational::zero(); NODES]; NODES]; 8];
    for (i, a1) in (1..=NODES as i64).enumerate() {
        for (j, a2) in (1..=NODES as i64).enumerate() {
            for (k, c) in at(a1, a2)?.into_iter().enumerate() {
                values[k][i][j] = c;
            }
        }
    }
    let mut out = Multi::zero();
    for (k, grid) in values.iter().enumerate() {
        // Interpolate in A2 for each A1 node, then in A1 for each A2 power.
        let rows: Vec<Vec<GaussRational>> = grid.iter().map(|r| interpolate(&nodes, r)).collect();
        for b in 0..NODES {
            let col: Vec<GaussRational> = rows.iter().map(|r| r[b].clone()).collect();
            for (a, c) in interpolate(&nodes, &col).into_iter().enumerate() {
                out = out + mc(&c) * mv(Var::A1).pow(a as u32) * mv(Var::A2).pow(b as u32) * mv(Var::D).pow(k as u32);
            }
        }
    }
    let cond: Poly<BiPoly> = out.nest(&[Var::D, Var::A1, Var::A2]);
    for (u, v) in [(13, 17), (-3, 19), (23, -7)] {
        let direct = at(u, v)?;
        let (qu, qv) = (GaussRational::from_i64(u), GaussRational::from_i64(v));
        for (k, c) in direct.iter().enumerate() {
            if cond.coeff(k).eval_inner(&qv).eval(&qu) != *c {
                return Err(TimfError::Exact("interpolated scaled condition fails an off-grid check".into()));
            }
        }
    }
    Ok(cond)
}

/// Per-variable degree bound used when interpolating the scaled condition.
pub const SCALED_DEGREE_BOUND: usize = 8;

/// Evaluates a condition returned by [`scaled_amplitude_condition`] at numeric `(z1, z2)`.
pub fn eval_scaled_condition(cond: &Poly<BiPoly>, z1: C, z2: C) -> CPoly {
    CPoly::new(Var::D, cond.coeffs().iter().map(|c| c.eval_inner_c64(z2).eval(&z1)).collect())
}

impl TimfModel for ModelFree {
    fn masses(&self) -> (f64, f64) {
        (self.params.a1, self.params.a2)
    }

    fn x_family(&self, z: C) -> CPoly {
        self.rx.eval_inner_c64(z)
    }

    fn y_family(&self, z: C) -> CPoly {
        self.ry.eval_inner_c64(z)
    }

    fn d_family(&self, z: C) -> CPoly {
        self.condition.eval_inner_c64(z)
    }

    fn residual(&self, x: C, y: C, z: C) -> ((C, C), f64) {
        let p = &self.params;
        let (a1, a2, g1, g2) = (p.a1, p.a2, p.gamma1, p.gamma2);
        let t1 = [2.0 * a1 * x * x * y, a1 * g2 * x * x, -a2 * g2 * y * y, 2.0 * y * z, g2 * z];
        let t2 = [2.0 * a2 * y * y * x, a2 * g1 * y * y, -a1 * g1 * x * x, 2.0 * x * z, g1 * z];
        let scale = t1.iter().chain(&t2).map(|t| t.norm()).sum::<f64>();
        ((t1.iter().sum(), t2.iter().sum()), scale)
    }

    /// Fails with [`TimfError::DenominatorVanishes`] on the poles `x = -g1/2` and `a1 x^2 = -z`.
    fn y_of_x(&self, x: C, z: C) -> Result<C> {
        let p = &self.params;
        solvent(x, z, p.a1, p.gamma1, p.gamma2)
    }

    fn x_of_y(&self, y: C, z: C) -> Result<C> {
        let p = &self.params;
        solvent(y, z, p.a2, p.gamma2, p.gamma1)
    }

    /// `D = (a1 w1^2 + a2 w2^2 - z) J1 J2 / (a1 a2)` with `w1 = i x`, `w2 = i y`.
    fn amplitude(&self, x: C, y: C, z: C) -> Result<C> {
        let p = &self.params;
        let (w1, w2) = (C::i() * x, C::i() * y);
        let j1 = lorentz_j(w1, p.k1, p.gamma1)?;
        let j2 = lorentz_j(w2, p.k2, p.gamma2)?;
        Ok((p.a1 * w1 * w1 + p.a2 * w2 * w2 - z) * j1 * j2 / (p.a1 * p.a2))
    }

    fn amplitude_of_x(&self, x: C, z: C) -> Result<C> {
        linear_amplitude(&self.lin_d, &self.lin_0, x, z)
    }
}

/// `y = -g2 (a1 x^3 + 2 x z + g1 z) / ((2 x + g1)(a1 x^2 + z))`, or its mirror image.
fn solvent(x: C, z: C, a1: f64, g1: f64, g2: f64) -> Result<C> {
    let den = (2.0 * x + g1) * (a1 * x * x + z);
    let num = -g2 * (a1 * x * x * x + 2.0 * x * z + g1 * z);
    if den.norm() <= 1e-13 * (num.norm() + 1.0) {
        return Err(TimfError::DenominatorVanishes);
    }
    Ok(num / den)
}

/// Solves `lin_d(x, z) D + lin_0(x, z) = 0`.
pub(crate) fn linear_amplitude(lin_d: &BiPoly, lin_0: &BiPoly, x: C, z: C) -> Result<C> {
    let cd = lin_d.eval_inner_c64(z).eval(&x);
    let c0 = lin_0.eval_inner_c64(z).eval(&x);
    let scale = lin_d.eval_inner_c64(z).coeffs().iter().rev().fold(0.0, |acc, c| acc * x.norm() + c.norm());
    if cd.norm() <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
        return Err(TimfError::LinearCoefficientZero);
    }
    Ok(-c0 / cd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ToComplex;
    use crate::roots::{all_roots, RootOptions};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn lorentz_j_centred() {
        let j = lorentz_j(C::i(), 0.0, 1.0).unwrap();
        assert!((j - c(0.5, 0.0)).norm() < 1e-15);
        let w = c(0.3, 0.7);
        let j = lorentz_j(w, 0.0, 1e-9).unwrap();
        assert!((j + 1.0 / (w * w)).norm() < 1e-7);
        assert!(matches!(lorentz_j(c(0.0, 0.0), 0.0, 1.0), Err(TimfError::PoleHit { .. })));
    }

    #[test]
    fn resultant_has_degree_seven() {
        let m = ModelFree::unit().unwrap();
        assert_eq!(m.rx.degree(), Some(7));
        assert_eq!(m.ry.degree(), Some(7));
        assert_eq!(m.condition.degree(), Some(7));
        assert_eq!(m.rx.lead().unwrap().to_float().coeffs()[0].re, 2.0);
        // Degree 4 in z.
        assert_eq!(m.condition.coeffs().iter().filter_map(|c| c.degree()).max(), Some(4));
        assert_eq!(m.condition.coeff(0).coeffs()[0].to_c64().re, 256.0);
    }

    #[test]
    fn derived_forms_match_closed_forms() {
        use crate::poly::Nested;
        assert_eq!(scaled_amplitude_condition().unwrap().to_multi(), scaled_condition_reference());
        for p in [ModelFreeParams::unit(), ModelFreeParams::new(2.0, 1.0 / 3.0, 0.5, 3.0)] {
            let m = ModelFree::new(p).unwrap();
            assert_eq!(m.condition, unscaled_condition_reference(&p));
            assert!(m.rx.proportional(&x_resultant_reference(&p)));
            let (lhs, rhs) = linear_relation_reference(&p);
            assert_eq!(m.lin_d.mul_poly(&rhs), m.lin_0.neg_poly().mul_poly(&lhs));
        }
        let p = ModelFreeParams::new(2.0, 1.0 / 3.0, 0.5, 3.0);
        let mirrored = ModelFreeParams::new(1.0 / 3.0, 2.0, 3.0, 0.5);
        assert_eq!(ModelFree::new(p).unwrap().ry.coeffs(), ModelFree::new(mirrored).unwrap().rx.coeffs());
    }

    #[test]
    fn symmetric_point_below_threshold() {
        let m = ModelFree::unit().unwrap();
        // Real root of 2 x^3 - 2 x - 1.
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 2.0 * mid.powi(3) - 2.0 * mid - 1.0 > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let x = c(lo, 0.0);
        let (r1, r2) = m.system_residual(x, x, c(-1.0, 0.0));
        assert!(r1.norm() < 1e-12 && r2.norm() < 1e-12);
        assert!((m.y_of_x(x, c(-1.0, 0.0)).unwrap() - x).norm() < 1e-12);
        let (r1, r2) = m.system_residual(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!((r1.norm(), r2.norm()), (0.0, 0.0));
    }

    #[test]
    fn solvent_at_origin() {
        let p = ModelFreeParams::new(1.5, 0.5, 2.0, 3.0);
        let m = ModelFree::new(p).unwrap();
        let y = m.y_of_x(c(0.0, 0.0), c(0.4, 0.2)).unwrap();
        assert!((y + 3.0).norm() < 1e-14);
        assert!(matches!(m.y_of_x(c(-1.0, 0.0), c(0.3, 0.0)), Err(TimfError::DenominatorVanishes)));
    }

    #[test]
    fn elimination_identity_and_amplitude_routes() {
        let p = ModelFreeParams::new(2.0, 1.0 / 3.0, 0.5, 3.0);
        let m = ModelFree::new(p).unwrap();
        for z in [c(2.0, 1.0), c(1.0, 1.0), c(-0.7, 0.3), c(0.2, -4.0)] {
            let pts = m.branch_points(z, &RootOptions::default()).unwrap();
            assert_eq!(pts.len(), 7);
            let droots = all_roots(&m.d_family(z), &RootOptions::default()).unwrap().roots;
            for bp in &pts {
                assert!(bp.residual < 1e-10, "residual {} at {z}", bp.residual);
                let d19 = m.amplitude(bp.x, bp.y, z).unwrap();
                assert!((d19 - bp.d).norm() <= 1e-8 * bp.d.norm(), "{d19} vs {}", bp.d);
                let dist = droots.iter().map(|r| (r - bp.d).norm()).fold(f64::INFINITY, f64::min);
                assert!(dist <= 1e-7 * bp.d.norm().max(1.0));
            }
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let m = ModelFree::new(ModelFreeParams::new(2.0, 1.0 / 3.0, 0.5, 3.0)).unwrap();
        let z = c(0.4, 0.9);
        let a = all_roots(&m.d_family(z), &RootOptions::default()).unwrap().roots;
        let b = all_roots(&m.d_family(z.conj()), &RootOptions::default()).unwrap().roots;
        for r in &a {
            assert!(b.iter().any(|s| (s - r.conj()).norm() < 1e-9));
        }
    }
}
