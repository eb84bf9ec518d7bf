//! Hand-written closed forms of the first model's elimination polynomials, kept only to audit
//! the derived ones.

use crate::params::ModelFreeParams;
use crate::poly::{mc, mi, mv, BiPoly, GaussRational, Multi, RationalFunction, Ring, Var};

fn xz(m: &Multi) -> BiPoly {
    m.nest(&[Var::X, Var::Z])
}

fn dz(m: &Multi) -> BiPoly {
    m.nest(&[Var::D, Var::Z])
}

/// Degree-7 x-resultant in closed form.
pub fn x_resultant_reference(p: &ModelFreeParams) -> BiPoly {
    let [a1, a2, g1, g2] = p.exact();
    let (a1, a2, g1, g2) = (mc(&a1), mc(&a2), mc(&g1), mc(&g2));
    let (x, z) = (mv(Var::X), mv(Var::Z));
    let b1 = &a1 * &g1 * &g1;
    let b2 = &a2 * &g2 * &g2;
    let m = mi(2) * a1.pow(3) * &g1 * x.pow(7)
        - a1.pow(2) * (mi(4) * &z - &b1 + &b2) * x.pow(6)
        - &a1 * &z * (mi(8) * &z - &b1 + mi(4) * &b2) * x.pow(4)
        - mi(2) * &a1 * &g1 * &z * (mi(3) * &z + &b2) * x.pow(3)
        - z.pow(2) * (mi(4) * &z + &b1 + mi(4) * &b2) * x.pow(2)
        - mi(4) * z.pow(2) * &g1 * (&z + &b2) * &x
        - g1.pow(2) * z.pow(2) * (&z + &b2);
    xz(&m)
}

/// Relation linear in `D` after elimination of `y`, as `(lhs, rhs)` with `lhs D = rhs`.
pub fn linear_relation_reference(p: &ModelFreeParams) -> (BiPoly, BiPoly) {
    let [a1, a2, g1, g2] = p.exact();
    let (a1, a2, g1, g2) = (mc(&a1), mc(&a2), mc(&g1), mc(&g2));
    let (x, z) = (mv(Var::X), mv(Var::Z));
    let b1 = &a1 * &g1 * &g1;
    let b2 = &a2 * &g2 * &g2;
    let lhs =
        a1.pow(2) * &a2 * g2.pow(2) * x.pow(3) * (&g1 + &x).pow(2) * (&a1 * x.pow(3) + &g1 * &z + mi(2) * &x * &z);
    let rhs = mi(4) * a1.pow(3) * x.pow(7) * (&x + &g1)
        + a1.pow(2) * (&b1 + &b2 + mi(12) * &z) * x.pow(6)
        + mi(12) * a1.pow(2) * &g1 * &z * x.pow(5)
        + &a1 * &z * (mi(3) * &b1 + mi(4) * &b2 + mi(12) * &z) * x.pow(4)
        + mi(2) * &a1 * &g1 * &z * (&b2 + mi(6) * &z) * x.pow(3)
        + z.pow(2) * (mi(3) * &b1 + mi(4) * &b2 + mi(4) * &z) * x.pow(2)
        + mi(4) * &g1 * z.pow(2) * (&b2 + &z) * &x
        + g1.pow(2) * z.pow(2) * (&b2 + &z);
    (xz(&lhs), xz(&rhs))
}

/// Scaled amplitude condition with `Var::D` standing for `Dbar` and `Var::A1`, `Var::A2` for
/// `z1`, `z2`.
pub fn scaled_condition_reference() -> Multi {
    let (d, u, v) = (mv(Var::D), mv(Var::A1), mv(Var::A2));
    let u2 = u.pow(2);
    let v2 = v.pow(2);
    let s = &u + &v;
    let c7 = &u2 * &v2 * (&u + mi(1)) * (&v + mi(1)) * (&s + mi(1));
    let c6 = mi(-4) * &u * &v * (&u + mi(1)) * (&v + mi(1)) * (&u * &v - mi(4) * &u - mi(4) * &v - mi(4));
    let c5 = mi(-4)
        * (mi(3) * u.pow(3) * &v2
            + mi(3) * &u2 * v.pow(3)
            + (mi(20) * u.pow(3) * &v + mi(58) * &u2 * &v2 + mi(20) * &u * v.pow(3))
            + (mi(16) * u.pow(3) + mi(88) * &u2 * &v + mi(88) * &u * &v2 + mi(16) * v.pow(3))
            + (mi(32) * &u2 + mi(84) * &u * &v + mi(32) * &v2)
            + mi(16) * &s);
    let c4 = mi(16)
        * (mi(3) * &u2 * &v2
            + mi(39) * (&u2 * &v + &u * &v2)
            + (mi(32) * &u2 + mi(91) * &u * &v + mi(32) * &v2)
            + mi(48) * &s
            + mi(16));
    let c3 = mi(16)
        * (mi(3) * &u2 * &v + mi(3) * &u * &v2 - (mi(8) * &u2 + mi(91) * &u * &v + mi(8) * &v2) - mi(88) * &s - mi(64));
    let c2 = mi(192) * (-(&u * &v) + mi(4) * &s + mi(8));
    let c1 = mi(-64) * (&s + mi(16));
    [c1, c2, c3, c4, c5, c6, c7].iter().enumerate().fold(mi(256), |acc, (k, c)| acc + c * d.pow(k as u32 + 1))
}

/// The scaled condition rewritten in `D` and `z` for given parameters: every term
/// `z1^i z2^j Dbar^k` becomes `A1^i A2^j z^(k-i-j) D^k`.
pub fn unscaled_condition_reference(p: &ModelFreeParams) -> BiPoly {
    let [a1, a2, g1, g2] = p.exact();
    let big = [a1.mul(&g1).mul(&g1), a2.mul(&g2).mul(&g2)];
    let mut out = Multi::zero();
    for (e, c) in scaled_condition_reference().terms() {
        let (i, j, k) = (e[Var::A1.index()], e[Var::A2.index()], e[Var::D.index()]);
        let coef = c.mul(&big[0].pow(i)).mul(&big[1].pow(j));
        let zp = k - i - j;
        out = out + mc(&coef) * mv(Var::Z).pow(zp) * mv(Var::D).pow(k);
    }
    dz(&out)
}

/// Quadratic and cubic factors of the amplitude condition when both `A` equal `theta`.
pub fn equal_theta_reference(theta: &GaussRational) -> (BiPoly, BiPoly) {
    let (d, z, t) = (mv(Var::D), mv(Var::Z), mc(theta));
    let quad = mi(4) - mi(4) * (&t + &z) * &d + &t * (&t + &z) * d.pow(2);
    let cubic = mi(16)
        + mi(8) * (mi(3) * &t - mi(4) * &z) * &d
        + mi(4) * (mi(3) * t.pow(2) + mi(10) * &t * &z + mi(4) * z.pow(2)) * d.pow(2)
        + t.pow(2) * (mi(2) * &t + &z) * d.pow(3);
    (dz(&quad), dz(&cubic))
}

/// Quartic factor of the x-resultant carrying the symmetry-breaking solutions at unit
/// parameters.
pub fn breaking_quartic_reference() -> BiPoly {
    let (x, z) = (mv(Var::X), mv(Var::Z));
    let zz = &z * (mi(1) + &z);
    xz(&(x.pow(4) - mi(2) * x.pow(3) * &z - x.pow(2) * &z - mi(2) * &x * &zz - zz))
}

/// `256 z^2 (27 + 16 z)^3 / (2 + z)^4`.
pub fn cubic_discriminant_reference() -> RationalFunction {
    let z = |c: &[i64]| crate::poly::qpoly(Var::Z, c);
    let num = z(&[0, 0, 256]).mul_poly(&z(&[27, 16]).pow_poly(3));
    RationalFunction::new(num, z(&[2, 1]).pow_poly(4))
}

/// Breaking-sector inverse function `z = (D - 2)^2 / (D (4 - D))` in units of `theta`.
pub fn breaking_inverse(d: num_complex::Complex64) -> num_complex::Complex64 {
    (d - 2.0) * (d - 2.0) / (d * (4.0 - d))
}
