//! Exact and floating polynomial arithmetic, resultants and discriminants.

mod dense;
mod interp;
mod json;
mod multi;
mod resultant;
mod ring;

pub use dense::{BiPoly, CPoly, Poly, QPoly, Var};
pub use interp::{bareiss_int, determinant_multi, interpolate, resultant_multi};
pub use json::JsonCoeff;
pub use multi::{mc, mi, mv, Monomial, Multi, Nested};
pub use resultant::{
    bareiss_det, discriminant, discriminant_scalar, poly_eval, resultant, sylvester, AnyPoly, DiscriminantConvention,
    RationalFunction, Scalar,
};
pub use ring::{q, qr, Field, GaussRational, Ring, ToComplex};

/// Three-level nesting, e.g. x over D over z.
pub type TriPoly = Poly<Poly<Poly<GaussRational>>>;

/// Integer coefficients, lowest power first, as an exact polynomial in `var`.
pub fn qpoly(var: Var, coeffs: &[i64]) -> QPoly {
    Poly::new(var, coeffs.iter().map(|&c| q(c)).collect())
}

/// Float polynomial from real coefficients, lowest power first.
pub fn cpoly(var: Var, coeffs: &[f64]) -> CPoly {
    Poly::new(var, coeffs.iter().map(|&c| num_complex::Complex64::new(c, 0.0)).collect())
}
