//! Exact resolvent matrix elements `<chi|(z - H)^-1|chi>` for both models, a direct
//! self-consistent iteration of the mean-field equations, and the closest-branch validation.
//!
//! Both exact values reduce to one-dimensional integrals: the inner integral over the second
//! particle has the closed form [`one_body_g`], the outer one runs over the spectrum of the first.

mod fixed_point;
mod validate;

pub use fixed_point::*;
pub use validate::*;

use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Result, TimfError};
use crate::model_bound::bound_state;
use crate::model_free::lorentz_j;
use crate::params::{ModelBoundParams, ModelFreeParams};
use crate::quad::{integrate_from, QuadratureSpec};

type C = Complex64;

/// `|Im z|` below this counts as real.
pub const REAL_AXIS_TOL: f64 = 1e-12;
/// Closer than this to a threshold, the bound-model contour is pinched.
pub const PINCH_TOL: f64 = 1e-8;

/// One-body matrix element `int dp chi^2(p) / (zeta - a p^2)` for a Lorentzian packet, on the
/// sheet `Im w > 0` of `zeta = a w^2`.
pub fn one_body_g(zeta: C, a: f64, k: f64, gamma: f64) -> Result<C> {
    if zeta.im.abs() < REAL_AXIS_TOL && zeta.re >= 0.0 {
        return Err(TimfError::BranchAmbiguity);
    }
    let w = C::i() * (-zeta / a).sqrt();
    Ok(-lorentz_j(w, k, gamma)? / a)
}

/// Exact amplitude of the first model: `int dp1 chi1^2(p1) G2(z - a1 p1^2)`, with
/// `p1 = K1 + gamma1 tan(theta)` so that `chi1^2 dp1 = dtheta / pi`.
pub fn exact_d_free(z: C, p: &ModelFreeParams, qs: &QuadratureSpec) -> Result<C> {
    p.validate()?;
    if z.im.abs() < REAL_AXIS_TOL && z.re >= 0.0 {
        return Err(TimfError::BranchAmbiguity);
    }
    let mut breaks = vec![-FRAC_PI_2, FRAC_PI_2];
    if z.re > 0.0 {
        // Where z - a1 p1^2 passes closest to the cut.
        let q = (z.re / p.a1).sqrt();
        breaks.extend([q, -q].map(|p1| ((p1 - p.k1) / p.gamma1).atan()));
    }
    breaks.push(((0.0 - p.k1) / p.gamma1).atan());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let err = RefCell::new(None);
    let f = |t: f64| {
        let p1 = p.k1 + p.gamma1 * t.tan();
        match one_body_g(z - p.a1 * p1 * p1, p.a2, p.k2, p.gamma2) {
            Ok(g) => g / PI,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                C::new(0.0, 0.0)
            }
        }
    };
    let r = integrate_from(&f, &breaks, qs)?;
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(r.value)
}

/// Dressed one-body matrix element `<chi1|(eta - h1)^-1|chi1> = -1 / (a1 x (x + gamma1) - lambda)`.
pub fn dressed_one_body(eta: C, p: &ModelBoundParams) -> C {
    let x = (-eta / p.a1).sqrt();
    -1.0 / (p.a1 * x * (x + p.gamma1) - p.lambda)
}

/// Weight of the bound state in `chi1`, `2 x0 / (2 x0 + gamma1)`, and its energy.
pub fn bound_state_weight(p: &ModelBoundParams) -> Result<(f64, f64)> {
    let b = bound_state(p)?.physical;
    Ok((2.0 * b.x0 / (2.0 * b.x0 + p.gamma1), b.eta0))
}

/// Exact amplitude of the second model from the spectral decomposition of the dressed first
/// particle: the bound-state pole plus the discontinuity across the cut `[0, inf)`,
/// `D = w0 G2(z - eta0) + int de rho(e) G2(z - e)`, `rho = -Im g1(e + i0) / pi`.
///
/// The cut integral runs over `e = a1 k^2`, `k = gamma1 tan(theta)`.
pub fn exact_d_bound(z: C, p: &ModelBoundParams, qs: &QuadratureSpec) -> Result<C> {
    p.validate()?;
    let pole = if p.lambda > 0.0 { Some(bound_state_weight(p)?) } else { None };
    let lowest = pole.map_or(0.0, |(_, e0)| e0);
    let distance = pole.map_or(f64::INFINITY, |(_, e0)| (z - e0).norm()).min(z.norm());
    if distance < PINCH_TOL {
        return Err(TimfError::ContourPinch { distance });
    }
    if z.im.abs() < REAL_AXIS_TOL && z.re >= lowest {
        return Err(TimfError::BranchAmbiguity);
    }
    let (a1, g1) = (p.a1, p.gamma1);
    let err = RefCell::new(None);
    let f = |t: f64| {
        let k = g1 * t.tan();
        let e = a1 * k * k;
        // de = 2 a1 k dk, dk = gamma1 sec^2 dtheta
        let jac = 2.0 * a1 * k * g1 / t.cos().powi(2);
        // Just above the cut x = sqrt(-(e + i0) / a1) = -i k.
        let x = C::new(0.0, -k);
        let g = -1.0 / (a1 * x * (x + g1) - p.lambda);
        let rho = -g.im / PI;
        match one_body_g(z - e, p.a2, 0.0, p.gamma2) {
            Ok(v) => v * rho * jac,
            Err(er) => {
                err.borrow_mut().get_or_insert(er);
                C::new(0.0, 0.0)
            }
        }
    };
    let mut breaks = vec![0.0, FRAC_PI_2];
    if z.re > 0.0 {
        breaks.insert(1, ((z.re / a1).sqrt() / g1).atan());
    }
    let cut = integrate_from(&f, &breaks, qs)?.value;
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    let bound = match pole {
        Some((w0, e0)) => w0 * one_body_g(z - e0, p.a2, 0.0, p.gamma2)?,
        None => C::new(0.0, 0.0),
    };
    Ok(bound + cut)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn tight() -> QuadratureSpec {
        QuadratureSpec { abs_tol: 1e-11, rel_tol: 1e-10, ..Default::default() }
    }

    /// `(1/pi^2) int int dt1 dt2 / (z - A1 tan^2 t1 - A2 tan^2 t2)` by nested adaptive quadrature.
    fn brute_force_2d(z: C, p: &ModelFreeParams) -> C {
        let qs = tight();
        let inner = |t1: f64| {
            let e1 = p.big_a1() * t1.tan().powi(2);
            integrate(|t2| 1.0 / (z - e1 - p.big_a2() * t2.tan().powi(2)), -FRAC_PI_2, FRAC_PI_2, &qs).unwrap().value
        };
        integrate(inner, -FRAC_PI_2, FRAC_PI_2, &qs).unwrap().value / (PI * PI)
    }

    /// Direct quadrature of `int dp chi^2 / (zeta - a p^2)` for a packet centred at `k`.
    fn g_by_quadrature(zeta: C, a: f64, k: f64, gamma: f64) -> C {
        let f = |t: f64| {
            let p = k + gamma * t.tan();
            1.0 / (zeta - a * p * p) / PI
        };
        integrate(f, -FRAC_PI_2, FRAC_PI_2, &tight()).unwrap().value
    }

    #[test]
    fn one_body_closed_form_with_offset_centre() {
        for (zeta, k, g) in [(c(-1.0, 0.5), 1.0, 1.0), (c(2.0, 1.0), 0.7, 0.4), (c(-3.0, -0.2), 0.0, 2.0)] {
            let a = 1.3;
            let exact = one_body_g(zeta, a, k, g).unwrap();
            let quad = g_by_quadrature(zeta, a, k, g);
            assert!((exact - quad).norm() < 1e-8, "{zeta}: {exact} vs {quad}");
        }
        assert!(matches!(one_body_g(c(1.0, 0.0), 1.0, 0.0, 1.0), Err(TimfError::BranchAmbiguity)));
    }

    #[test]
    fn free_matches_brute_force() {
        let qs = QuadratureSpec::default();
        let unit = ModelFreeParams::unit();
        let cases = [
            (c(-1.0, 0.0), unit),
            (c(-0.3, 0.7), unit),
            (c(1.5, 1.0), unit),
            (c(-2.0, 0.2), ModelFreeParams::new(2.0, 0.5, 1.0, 1.5)),
            (c(0.5, 2.0), ModelFreeParams::new(1.0, 3.0, 0.5, 1.0)),
        ];
        for (z, p) in cases {
            let a = exact_d_free(z, &p, &qs).unwrap();
            let b = brute_force_2d(z, &p);
            assert!((a - b).norm() < 1e-6, "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn free_real_below_spectrum_and_signs() {
        let qs = QuadratureSpec::default();
        let p = ModelFreeParams::unit();
        for z in [-0.5, -2.0, -10.0] {
            let d = exact_d_free(c(z, 0.0), &p, &qs).unwrap();
            assert!(d.im.abs() < 1e-8 && d.re < 0.0);
        }
        for e in [0.1, 1.0, 5.0] {
            assert!(exact_d_free(c(e, 1e-6), &p, &qs).unwrap().im < 0.0);
        }
        assert!(matches!(exact_d_free(c(0.0, 0.0), &p, &qs), Err(TimfError::BranchAmbiguity)));
        // z D -> 1, slowly: the packets have no finite kinetic energy, so the rate is |z|^-1/2.
        let dev = |z: f64| (c(z, 0.0) * exact_d_free(c(z, 0.0), &p, &qs).unwrap() - 1.0).norm();
        let ratio = dev(-1e4) / dev(-1e6);
        assert!(dev(-1e6) < 5e-3 && (ratio - 10.0).abs() < 1.0, "{ratio}");
    }

    #[test]
    fn free_schwarz_reflection() {
        let qs = QuadratureSpec::default();
        let p = ModelFreeParams::new(1.0, 2.0, 0.5, 1.0);
        for z in [c(-1.0, 0.3), c(0.7, 0.05), c(3.0, 2.0)] {
            let up = exact_d_free(z, &p, &qs).unwrap();
            let down = exact_d_free(z.conj(), &p, &qs).unwrap();
            assert!((up - down.conj()).norm() < 1e-8);
        }
    }

    #[test]
    fn bound_state_weight_and_spectral_sum() {
        let p = ModelBoundParams::reference();
        let (w0, e0) = bound_state_weight(&p).unwrap();
        assert!((w0 - 2.0 / 3.0).abs() < 1e-15 && e0 == -1.0);
        // The spectral weights of the normalized packet add up to one.
        let cont = integrate(
            |t: f64| {
                let k = t.tan();
                let x = C::new(0.0, -k);
                let g = -1.0 / (x * (x + 1.0) - 2.0);
                C::new(-g.im / PI * 2.0 * k / t.cos().powi(2), 0.0)
            },
            0.0,
            FRAC_PI_2,
            &tight(),
        )
        .unwrap()
        .value;
        assert!((cont.re + w0 - 1.0).abs() < 1e-9);
        // Residue at the pole.
        let h = 1e-6;
        let r = dressed_one_body(c(e0 + h, 0.0), &p) * h;
        assert!((r.re - w0).abs() < 1e-5);
    }

    /// Rank-one identity: `<chi1|R|chi1>` over particle 1 is `A0 / (1 + lambda A0)` with
    /// `A0(p2) = int dp1 chi1^2 / (z - a1 p1^2 - a2 p2^2)`, itself by quadrature.
    fn rank_one_2d(z: C, p: &ModelBoundParams) -> C {
        let qs = tight();
        let outer = |t2: f64| {
            let e2 = p.big_a2() * t2.tan().powi(2);
            let a0 = integrate(|t1| 1.0 / (z - e2 - p.big_a1() * t1.tan().powi(2)) / PI, -FRAC_PI_2, FRAC_PI_2, &qs)
                .unwrap()
                .value;
            a0 / (1.0 + p.lambda * a0) / PI
        };
        integrate(outer, -FRAC_PI_2, FRAC_PI_2, &qs).unwrap().value
    }

    #[test]
    fn bound_matches_rank_one_identity() {
        let qs = QuadratureSpec::default();
        let p = ModelBoundParams::reference();
        for z in [c(-6.0, 0.0), c(-1.0, 0.2), c(0.5, 1.0)] {
            let a = exact_d_bound(z, &p, &qs).unwrap();
            let b = rank_one_2d(z, &p);
            assert!((a - b).norm() < 1e-6, "{z}: {a} vs {b}");
        }
        let d = exact_d_bound(c(-6.0, 0.0), &p, &qs).unwrap();
        assert!(d.im.abs() < 1e-12);
    }

    #[test]
    fn bound_without_potential_is_free() {
        let qs = QuadratureSpec::default();
        let p = ModelBoundParams { lambda: 0.0, ..ModelBoundParams::reference() };
        for z in [c(-1.0, 0.2), c(-6.0, 0.0), c(2.0, 0.5)] {
            let a = exact_d_bound(z, &p, &qs).unwrap();
            let b = exact_d_free(z, &p.free(), &qs).unwrap();
            assert!((a - b).norm() < 1e-8, "{z}: {a} vs {b}");
        }
        let weak = ModelBoundParams { lambda: 1e-10, ..p };
        let z = c(-1.0, 0.2);
        let a = exact_d_bound(z, &weak, &qs).unwrap();
        assert!((a - exact_d_free(z, &p.free(), &qs).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn bound_thresholds_are_reported() {
        let qs = QuadratureSpec::default();
        let p = ModelBoundParams::reference();
        assert!(matches!(exact_d_bound(c(-1.0, 1e-10), &p, &qs), Err(TimfError::ContourPinch { .. })));
        assert!(matches!(exact_d_bound(c(-0.5, 0.0), &p, &qs), Err(TimfError::BranchAmbiguity)));
        let d = exact_d_bound(c(-0.5, 1e-3), &p, &qs).unwrap();
        assert!(d.im < 0.0);
    }
}
