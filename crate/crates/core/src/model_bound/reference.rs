//! Hand-written closed forms for the second model, kept only to audit the derived ones.

use crate::params::ModelBoundParams;
use crate::poly::{mc, mi, mv, qpoly, BiPoly, Multi, QPoly, Ring, Var};

/// Full amplitude condition at `a1 = gamma1 = gamma2 = 1`, `a2 = lambda = 2`, in `D` over `z`.
/// It is one quarter of the condition normalized to `256 z`.
pub fn reference_condition() -> BiPoly {
    let (d, z) = (mv(Var::D), mv(Var::Z));
    let zp = |c: &[i64]| c.iter().enumerate().fold(Multi::zero(), |acc, (k, &v)| acc + mi(v) * z.pow(k as u32));
    let m = mi(3)
        * zp(&[1, 1])
        * zp(&[4, 1])
        * (mi(27) * zp(&[3, 1]) * zp(&[6, 1]) * &d + mi(12) * zp(&[-108, -9, 14, 2]))
        * d.pow(6)
        - mi(4) * zp(&[-2808, 477, 5984, 3480, 690, 44]) * d.pow(5)
        + mi(8) * zp(&[-584, 1760, 3323, 1387, 200, 8]) * d.pow(4)
        - mi(8) * zp(&[-140, 1195, 1471, 420, 32]) * d.pow(3)
        + mi(32) * zp(&[-4, 107, 82, 12]) * d.pow(2)
        - mi(16) * &z * zp(&[43, 16]) * &d
        + mi(64) * &z;
    m.nest(&[Var::D, Var::Z])
}

fn scales(p: &ModelBoundParams) -> (Multi, Multi, Multi) {
    let [a1, a2, g1, g2, l] = p.exact();
    (mc(&a1.mul(&g1).mul(&g1)), mc(&a2.mul(&g2).mul(&g2)), mc(&l))
}

fn in_z(m: Multi) -> QPoly {
    m.nest(&[Var::Z])
}

/// Coefficients of `D^7` and `D^6` for unit widths.
pub fn condition_head_reference(p: &ModelBoundParams) -> (QPoly, QPoly) {
    let (a1, a2, l) = scales(p);
    let z = mv(Var::Z);
    let f = (&z + &l).pow(2) + &a1 * &z;
    let c7 = a2.pow(2) * (&a1 + mi(4) * &l).pow(2) * &f * ((&z + &l + &a2).pow(2) + &a1 * (&z + &a2));
    let inner = &a1 * a2.pow(2)
        + mi(5) * &a1 * &a2 * &l
        + mi(8) * a2.pow(2) * &l
        + mi(12) * &a2 * l.pow(2)
        + mi(4) * l.pow(3)
        + (mi(-3) * &a1 * &a2 - mi(4) * a2.pow(2) + mi(4) * &a1 * &l + mi(4) * &a2 * &l + mi(4) * l.pow(2)) * &z
        - mi(4) * (&a1 + mi(2) * &a2 + &l) * z.pow(2)
        - mi(4) * z.pow(3);
    let c6 = mi(-4) * &a2 * (&a1 + mi(4) * &l) * &f * inner;
    (in_z(c7), in_z(c6))
}

/// Coefficients of `D^1` and `D^0` for unit widths.
pub fn condition_tail_reference(p: &ModelBoundParams) -> (QPoly, QPoly) {
    let (a1, a2, l) = scales(p);
    let z = mv(Var::Z);
    let c1 = mi(-64) * &z * (&a1 + &a2 + mi(20) * &l + mi(16) * &z);
    (in_z(c1), in_z(mi(256) * z))
}

/// `z (1+z)^2 (2+z) (3+z) (4+z)^2 (6+z) (32+7z)^2`.
pub fn resultant_linear_part() -> QPoly {
    let l = |a: i64, b: i64| qpoly(Var::Z, &[a, b]);
    [l(0, 1), l(1, 1).pow_poly(2), l(2, 1), l(3, 1), l(4, 1).pow_poly(2), l(6, 1), l(32, 7).pow_poly(2)]
        .iter()
        .fold(qpoly(Var::Z, &[1]), |acc, f| acc.mul_poly(f))
}

/// Degree-12 factor that enters the resultant cubed.
pub fn resultant_dodecic() -> QPoly {
    qpoly(
        Var::Z,
        &[
            2426112, 17293824, 54026784, 121209152, 233641545, 328920768, 307812074, 191171112, 79534245, 21923392,
            3826944, 380928, 16384,
        ],
    )
}
