//! Sylvester resultants, discriminants and mode-tagged evaluation.

use num_complex::Complex64;

use super::dense::{Poly, QPoly, Var};
use super::ring::{GaussRational, Ring, ToComplex};
use crate::error::{Result, TimfError};

/// Determinant by fraction-free Bareiss elimination with row pivoting.
pub fn bareiss_det<R: Ring>(mut m: Vec<Vec<R>>) -> R {
    let n = m.len();
    if n == 0 {
        return R::one();
    }
    let mut negate = false;
    let mut prev = R::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return R::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.exact_div(&prev).expect("Bareiss division is exact in an integral domain");
            }
            m[i][k] = R::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        det.neg()
    } else {
        det
    }
}

/// Sylvester matrix of `p` and `q` in their (shared) outer variable.
pub fn sylvester<R: Ring>(p: &Poly<R>, q: &Poly<R>) -> Vec<Vec<R>> {
    let m = p.degree().unwrap_or(0);
    let n = q.degree().unwrap_or(0);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for (shift, src, deg) in (0..n).map(|s| (s, p, m)).chain((0..m).map(|s| (s, q, n))) {
        let mut row = vec![R::zero(); size];
        for (k, c) in src.coeffs().iter().enumerate() {
            row[shift + deg - k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Resultant of `p` and `q` with respect to `var`, which must be the outer variable of both.
pub fn resultant<R: Ring>(p: &Poly<R>, q: &Poly<R>, var: Var) -> Result<R> {
    for f in [p, q] {
        if f.variable() != var && f.degree().unwrap_or(0) > 0 {
            return Err(TimfError::VariableMismatch { expected: var, found: f.variable() });
        }
        if f.degree().unwrap_or(0) == 0 {
            return Err(TimfError::DegreeZero { var });
        }
    }
    Ok(bareiss_det(sylvester(p, q)))
}

/// Quotient of two exact polynomials in one variable, kept in lowest terms.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction {
    pub num: QPoly,
    pub den: QPoly,
}

impl RationalFunction {
    pub fn new(num: QPoly, den: QPoly) -> Self {
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.degree().unwrap_or(0) > 0 {
            (num.exact_div_poly(&g).unwrap(), den.exact_div_poly(&g).unwrap())
        } else {
            (num, den)
        };
        if let Some(l) = den.lead().cloned() {
            let inv = super::ring::Field::inv(&l).unwrap();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RationalFunction { num, den }
    }

    pub fn eval_c64(&self, v: Complex64) -> Complex64 {
        self.num.eval_c64(v) / self.den.eval_c64(v)
    }

    pub fn eval(&self, v: &GaussRational) -> Option<GaussRational> {
        super::ring::Field::div(&self.num.eval(v), &self.den.eval(v))
    }

    /// Ratio to `other` is a nonzero constant.
    pub fn proportional(&self, other: &RationalFunction) -> bool {
        let a = self.num.mul_poly(&other.den);
        let b = other.num.mul_poly(&self.den);
        !a.is_zero() && a.proportional(&b)
    }
}

/// Discriminant conventions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiscriminantConvention {
    /// `(-1)^{n(n-1)/2} Res(p, p') / lc`, a polynomial in the coefficients.
    Standard,
    /// The standard discriminant of `p / lc`, i.e. the standard one divided by `lc^{2n-2}`.
    /// This is the convention under which discriminants of amplitude conditions are
    /// rational functions of `z` with poles where the degree drops.
    Monic,
}

/// Discriminant of a polynomial in `D` whose coefficients are polynomials in `z`.
pub fn discriminant(p: &Poly<QPoly>, conv: DiscriminantConvention) -> Result<RationalFunction> {
    let n = p.degree().unwrap_or(0);
    if n < 2 {
        return Err(TimfError::DegreeTooLow { degree: n, min: 2 });
    }
    let inner = p.coeffs().iter().map(|c| c.variable()).next().unwrap_or(Var::Z);
    let lc = p.lead().unwrap().clone().with_var(inner);
    let res = resultant(p, &p.derivative(), p.variable())?.with_var(inner);
    let sign = if (n * (n - 1) / 2) % 2 == 1 { -1 } else { 1 };
    let std = res
        .exact_div_poly(&lc)
        .ok_or_else(|| TimfError::Exact("leading coefficient does not divide Res(p, p')".into()))?
        .scale(&GaussRational::from_i64(sign));
    Ok(match conv {
        DiscriminantConvention::Standard => RationalFunction::new(std, Poly::constant(inner, GaussRational::one())),
        DiscriminantConvention::Monic => RationalFunction::new(std, lc.pow_poly(2 * n as u32 - 2)),
    })
}

impl<R: Ring> Poly<R> {
    pub fn pow_poly(&self, e: u32) -> Self {
        (0..e).fold(Poly::constant(self.variable(), R::one()), |acc, _| acc.mul_poly(self))
    }
}

/// Discriminant of a univariate polynomial with exact scalar coefficients.
pub fn discriminant_scalar(p: &QPoly) -> Result<GaussRational> {
    let n = p.degree().unwrap_or(0);
    if n < 2 {
        return Err(TimfError::DegreeTooLow { degree: n, min: 2 });
    }
    let res = resultant(p, &p.derivative(), p.variable())?;
    let sign = if (n * (n - 1) / 2) % 2 == 1 { -1 } else { 1 };
    res.exact_div(p.lead().unwrap())
        .map(|v| v.mul(&GaussRational::from_i64(sign)))
        .ok_or_else(|| TimfError::Exact("division by zero leading coefficient".into()))
}

/// Polynomial in either coefficient mode.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyPoly {
    Exact(QPoly),
    Float(Poly<Complex64>),
}

/// Scalar in either mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(GaussRational),
    Float(Complex64),
}

impl Scalar {
    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(v) => v.to_c64(),
            Scalar::Float(v) => *v,
        }
    }
}

/// Horner evaluation. A floating value is accepted by an exact polynomial only when it is
/// finite (every finite double is an exact dyadic rational); exact values are never
/// rounded into floating polynomials.
pub fn poly_eval(p: &AnyPoly, v: &Scalar) -> Result<Scalar> {
    match (p, v) {
        (AnyPoly::Exact(p), Scalar::Exact(v)) => Ok(Scalar::Exact(p.eval(v))),
        (AnyPoly::Exact(p), Scalar::Float(v)) => {
            let v = GaussRational::from_c64(*v).ok_or(TimfError::ModeMismatch)?;
            Ok(Scalar::Exact(p.eval(&v)))
        }
        (AnyPoly::Float(p), Scalar::Float(v)) => Ok(Scalar::Float(p.eval(v))),
        (AnyPoly::Float(_), Scalar::Exact(_)) => Err(TimfError::ModeMismatch),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ring::{q, qr};

    fn px(c: &[i64]) -> QPoly {
        Poly::new(Var::X, c.iter().map(|&v| q(v)).collect())
    }

    #[test]
    fn linear_resultant() {
        let r = resultant(&px(&[-2, 1]), &px(&[-5, 1]), Var::X).unwrap();
        assert!(r == q(3) || r == q(-3));
    }

    #[test]
    fn resultant_with_parameter() {
        // x^2 - z and x - 1 give 1 - z.
        let z = |c: &[i64]| Poly::new(Var::Z, c.iter().map(|&v| q(v)).collect());
        let p: Poly<QPoly> = Poly::new(Var::X, vec![z(&[0, -1]), z(&[]), z(&[1])]);
        let l: Poly<QPoly> = Poly::new(Var::X, vec![z(&[-1]), z(&[1])]);
        let r = resultant(&p, &l, Var::X).unwrap();
        assert_eq!(r.with_var(Var::Z), z(&[1, -1]));
    }

    #[test]
    fn degree_zero_is_rejected() {
        assert_eq!(resultant(&px(&[3]), &px(&[1, 1]), Var::X), Err(TimfError::DegreeZero { var: Var::X }));
    }

    #[test]
    fn quadratic_discriminant() {
        // x^2 + 3x + 1 -> 9 - 4 = 5
        assert_eq!(discriminant_scalar(&px(&[1, 3, 1])).unwrap(), q(5));
        assert_eq!(discriminant_scalar(&px(&[2, 0, 1])).unwrap(), q(-8));
    }

    #[test]
    fn cubic_discriminant_matches_formula() {
        // x^3 + p x + q: -4p^3 - 27q^2
        assert_eq!(discriminant_scalar(&px(&[2, -3, 0, 1])).unwrap(), q(-4 * -27 - 27 * 4));
    }

    #[test]
    fn exact_eval_accepts_finite_float() {
        let p = AnyPoly::Exact(Poly::new(Var::X, vec![q(1), q(0), q(1)]));
        let v = poly_eval(&p, &Scalar::Float(Complex64::new(0.0, 1.0))).unwrap();
        assert_eq!(v, Scalar::Exact(q(0)));
        let f = AnyPoly::Float(Poly::new(Var::X, vec![Complex64::new(1.0, 0.0)]));
        assert_eq!(poly_eval(&f, &Scalar::Exact(qr(1, 3))), Err(TimfError::ModeMismatch));
    }
}
