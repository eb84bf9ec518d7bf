//! Particle 1 bound by a rank-one attractive potential, particle 2 free, Lorentzian packets.
//!
//! The potential dresses the first one-body integral, `I1 -> I1 / (1 - lambda I1)`, adds a
//! bound state at `eta0 < 0` and with it a one-body threshold at `z = eta0`. The amplitude
//! condition is again of degree 7 in `D`, now of degree 5 in `z`.

mod reference;
mod threshold;

pub use reference::*;
pub use threshold::*;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::branch::TimfModel;
use crate::elim::{normalize_by_constant, primitive_normalize, PolySystem};
use crate::error::{Result, TimfError};
use crate::params::ModelBoundParams;
use crate::poly::{mc, mi, mv, resultant_multi, BiPoly, CPoly, GaussRational, Multi, Nested, Poly, QPoly, Var};

type C = Complex64;

const POLE_TOL: f64 = 1e-12;

/// One root of the bound-state condition `(eta0 + lambda)^2 + A1 eta0 = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub eta0: f64,
    /// `omega0 = i x0`, purely imaginary.
    pub omega0: C,
    pub x0: f64,
    /// `x0 > 0`, the retarded sheet.
    pub physical: bool,
}

/// Both roots of the bound-state condition, the physical one first.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundStates {
    pub physical: BoundState,
    pub unphysical: BoundState,
}

/// Solves `lambda = a1 x0 (x0 + gamma1)` for the two pseudo-momenta and maps them to energies.
pub fn bound_state(p: &ModelBoundParams) -> Result<BoundStates> {
    p.validate()?;
    if p.lambda <= 0.0 {
        return Err(TimfError::InvalidParams("a bound state needs lambda > 0".into()));
    }
    let (a1, g1) = (p.a1, p.gamma1);
    let disc = g1 * g1 + 4.0 * p.lambda / a1;
    if disc < 0.0 {
        return Err(TimfError::ComplexRoots);
    }
    let s = disc.sqrt();
    let make = |x0: f64| BoundState { eta0: -a1 * x0 * x0, omega0: C::new(0.0, x0), x0, physical: x0 > 0.0 };
    Ok(BoundStates { physical: make(0.5 * (s - g1)), unphysical: make(-0.5 * (s + g1)) })
}

/// Pseudo-momentum of a one-body energy on the retarded sheet: `x = sqrt(-eta / a)`, `Re x >= 0`.
pub fn pseudo_momentum(eta: C, a: f64) -> C {
    (-eta / a).sqrt()
}

/// Dressed one-body integral `I1 / (1 - lambda I1)` with `I1 = 1 / (a1 x (x + gamma1))`.
pub fn script_i1(eta1: C, p: &ModelBoundParams) -> Result<C> {
    let x = pseudo_momentum(eta1, p.a1);
    let den0 = p.a1 * x * (x + p.gamma1);
    if den0.norm() < POLE_TOL {
        return Err(TimfError::PoleHit { magnitude: den0.norm() });
    }
    let i1 = 1.0 / den0;
    let nu = 1.0 - p.lambda * i1;
    if nu.norm() < POLE_TOL {
        return Err(TimfError::BoundStatePole { magnitude: nu.norm() });
    }
    Ok(i1 / nu)
}

/// Stationarity equations, amplitude relation and solvent for symbolic or exact coefficients
/// `A1, A2, gamma1, gamma2, lambda`.
pub fn bound_system(big_a1: &Multi, big_a2: &Multi, g1: &Multi, g2: &Multi, lambda: &Multi) -> PolySystem {
    let (x, y, z, d) = (mv(Var::X), mv(Var::Y), mv(Var::Z), mv(Var::D));
    let (a1, a2, l) = (big_a1, big_a2, lambda);
    let (x2, y2) = (&x * &x, &y * &y);
    let g11 = g1 * g1;
    let g22 = g2 * g2;
    let e1 =
        a1 * &g22 * &x2 + mi(2) * a1 * g2 * &x2 * &y - a2 * &g11 * &y2 + &g11 * &g22 * &z + mi(2) * &g11 * g2 * &y * &z;
    let e2 = mi(2) * g1 * &g22 * l * &x + a2 * &g11 * &y2 + mi(2) * a2 * g1 * &x * &y2 - a1 * &g22 * &x2
        + &g11 * &g22 * &z
        + mi(2) * g1 * &g22 * &x * &z;
    let amplitude = (a1 * a2 * &x * &y * (&x + g1) * (&y + g2) - a2 * &g11 * l * &y * (&y + g2)) * &d
        + a1 * &g22 * &x2
        + a2 * &g11 * &y2
        + &g11 * &g22 * &z;
    let y_num = -(g2 * ((l * &g11 + a1 * &x2) * &x + (g1 + mi(2) * &x) * &g11 * &z));
    let y_den = (g1 + mi(2) * &x) * (a1 * &x2 + &g11 * &z);
    PolySystem { e1, e2, amplitude, y_num, y_den }
}

fn exact_system(p: &ModelBoundParams) -> PolySystem {
    let [a1, a2, g1, g2, l] = p.exact();
    let big1 = a1.mul(&g1).mul(&g1);
    let big2 = a2.mul(&g2).mul(&g2);
    bound_system(&mc(&big1), &mc(&big2), &mc(&g1), &mc(&g2), &mc(&l))
}

use crate::poly::Ring;

/// The second model with its derived elimination polynomials.
#[derive(Clone, Debug)]
pub struct ModelBound {
    pub params: ModelBoundParams,
    pub system: PolySystem,
    pub rx: BiPoly,
    pub ry: BiPoly,
    /// `lin_d(x, z) D + lin_0(x, z) = 0` after substituting the solvent.
    pub lin_d: BiPoly,
    pub lin_0: BiPoly,
    /// Amplitude condition in `D` over `z`, normalized to the constant coefficient `256 z`.
    pub condition: BiPoly,
}

impl ModelBound {
    pub fn new(params: ModelBoundParams) -> Result<Self> {
        params.validate()?;
        let system = exact_system(&params);
        let rx = primitive_normalize(&system.x_resultant::<QPoly>(&[Var::Z])?, &[Var::X, Var::Z])?;
        let ry = primitive_normalize(&system.y_resultant::<QPoly>(&[Var::Z])?, &[Var::Y, Var::Z])?;
        let lin = system.amplitude_in_x().coeffs_in(Var::D);
        let nest = |m: &Multi| -> BiPoly { m.nest(&[Var::X, Var::Z]) };
        let lin_0 = nest(lin.first().unwrap_or(&Multi::zero()));
        let lin_d = nest(lin.get(1).unwrap_or(&Multi::zero()));
        let raw = resultant_multi(&rx.to_multi(), &system.amplitude_in_x(), Var::X)?;
        let raw: BiPoly = raw.nest(&[Var::D, Var::Z]);
        let condition =
            normalize_by_constant(&raw, &Poly::new(Var::Z, vec![GaussRational::zero(), GaussRational::from_i64(256)]))?;
        Ok(ModelBound { params, system, rx, ry, lin_d, lin_0, condition })
    }

    pub fn reference() -> Result<Self> {
        ModelBound::new(ModelBoundParams::reference())
    }

    pub fn bound_states(&self) -> Result<BoundStates> {
        bound_state(&self.params)
    }

    /// Left-hand sides of the two stationarity equations.
    pub fn system_residual(&self, x: C, y: C, z: C) -> (C, C) {
        self.residual(x, y, z).0
    }

    /// `Res_D(P, dP/dD)` as a polynomial in `z`, with unit content and positive leading coefficient.
    pub fn discriminant_resultant(&self) -> Result<QPoly> {
        let p = self.condition.to_multi();
        let dp: BiPoly = self.condition.derivative();
        let r = resultant_multi(&p, &dp.to_multi(), Var::D)?;
        let r: QPoly = r.nest(&[Var::Z]);
        primitive_normalize(&r, &[Var::Z])
    }

    /// The two sides of the subtraction relation
    /// `a2 y^2 (y + g2) / (2 y + g2) = x (a1 x (x + g1) - lambda) / (2 x + g1)`.
    pub fn subtraction_sides(&self, x: C, y: C) -> (C, C) {
        let p = &self.params;
        let lhs = p.a2 * y * y * (y + p.gamma2) / (2.0 * y + p.gamma2);
        let rhs = x * (p.a1 * x * (x + p.gamma1) - p.lambda) / (2.0 * x + p.gamma1);
        (lhs, rhs)
    }

    /// Per-particle mismatches `2 a_i w_i I_i / (dI_i / dw_i)`, each equal to
    /// `z - eta1 - eta2` at a solution.
    pub fn mismatches(&self, x: C, y: C) -> [C; 2] {
        let (l, r) = self.subtraction_sides(x, y);
        [2.0 * r, 2.0 * l]
    }
}

impl TimfModel for ModelBound {
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
        let (a1, a2, g1, g2, l) = (p.big_a1(), p.big_a2(), p.gamma1, p.gamma2, p.lambda);
        let t1 = [
            a1 * g2 * g2 * x * x,
            2.0 * a1 * g2 * x * x * y,
            -a2 * g1 * g1 * y * y,
            g1 * g1 * g2 * g2 * z,
            2.0 * g1 * g1 * g2 * y * z,
        ];
        let t2 = [
            2.0 * g1 * g2 * g2 * l * x,
            a2 * g1 * g1 * y * y,
            2.0 * a2 * g1 * x * y * y,
            -a1 * g2 * g2 * x * x,
            g1 * g1 * g2 * g2 * z,
            2.0 * g1 * g2 * g2 * x * z,
        ];
        let scale = t1.iter().chain(&t2).map(|t| t.norm()).sum::<f64>();
        ((t1.iter().sum(), t2.iter().sum()), scale)
    }

    /// `y / g2 = -((lambda g1^2 + A1 x^2) x + (g1 + 2 x) g1^2 z) / ((g1 + 2 x)(A1 x^2 + g1^2 z))`.
    fn y_of_x(&self, x: C, z: C) -> Result<C> {
        let p = &self.params;
        let (a1, g1, g2, l) = (p.big_a1(), p.gamma1, p.gamma2, p.lambda);
        let num = -g2 * ((l * g1 * g1 + a1 * x * x) * x + (g1 + 2.0 * x) * g1 * g1 * z);
        let den = (g1 + 2.0 * x) * (a1 * x * x + g1 * g1 * z);
        if den.norm() <= 1e-13 * (num.norm() + 1.0) {
            return Err(TimfError::DenominatorVanishes);
        }
        Ok(num / den)
    }

    /// `x^2` from the first equation substituted into the second, which is then linear in `x`.
    fn x_of_y(&self, y: C, z: C) -> Result<C> {
        let p = &self.params;
        let (a1, a2, g1, g2, l) = (p.big_a1(), p.big_a2(), p.gamma1, p.gamma2, p.lambda);
        let alpha = a1 * g2 * (g2 + 2.0 * y);
        let beta = -a2 * g1 * g1 * y * y + g1 * g1 * g2 * g2 * z + 2.0 * g1 * g1 * g2 * y * z;
        let den = 2.0 * g1 * (g2 * g2 * l + a2 * y * y + g2 * g2 * z) * alpha;
        let num = -(a1 * g2 * g2 * beta + (a2 * g1 * g1 * y * y + g1 * g1 * g2 * g2 * z) * alpha);
        if den.norm() <= 1e-13 * (num.norm() + 1.0) {
            return Err(TimfError::DenominatorVanishes);
        }
        Ok(num / den)
    }

    /// `D = -(a1 x^2 + a2 y^2 + z) / ((a1 x (x + g1) - lambda) a2 y (y + g2))`.
    fn amplitude(&self, x: C, y: C, z: C) -> Result<C> {
        let p = &self.params;
        let nu = p.a1 * x * (x + p.gamma1) - p.lambda;
        let i2 = p.a2 * y * (y + p.gamma2);
        if nu.norm() < POLE_TOL {
            return Err(TimfError::BoundStatePole { magnitude: nu.norm() });
        }
        if i2.norm() < POLE_TOL {
            return Err(TimfError::PoleHit { magnitude: i2.norm() });
        }
        Ok(-(p.a1 * x * x + p.a2 * y * y + z) / (nu * i2))
    }

    fn amplitude_of_x(&self, x: C, z: C) -> Result<C> {
        crate::model_free::linear_amplitude(&self.lin_d, &self.lin_0, x, z)
    }
}
