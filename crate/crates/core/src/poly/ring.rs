//! Coefficient rings: exact Gaussian rationals and double-precision complex numbers.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Commutative ring with exact division where it exists.
///
/// Method names mirror the arithmetic operators; they take references so that
/// nested polynomial rings never clone more than they have to.
pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `Some(q)` with `q * rhs == self`, or `None` when `rhs` does not divide `self`.
    fn exact_div(&self, rhs: &Self) -> Option<Self>;
    fn from_i64(v: i64) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// Rings in which every nonzero element is invertible.
pub trait Field: Ring {
    fn inv(&self) -> Option<Self>;

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul(&r))
    }
}

/// Scalars that can be turned into a double-precision complex value.
pub trait ToComplex {
    fn to_c64(&self) -> Complex64;
}

/// Exact complex rational `re + i im`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussRational { re, im: BigRational::zero() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Exact conversion of a finite double. `None` for NaN or infinities.
    pub fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Self::real)
    }

    pub fn from_c64(v: Complex64) -> Option<Self> {
        Some(GaussRational { re: BigRational::from_float(v.re)?, im: BigRational::from_float(v.im)? })
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRational { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        GaussRational { re: &self.re * k, im: &self.im * k }
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Ratio of huge integers: scale both down before converting.
        let n = r.numer().bits() as i64;
        let d = r.denom().bits() as i64;
        let shift = (n.max(d) - 1000).max(0) as u64;
        let nn = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let dd = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        nn / dd
    })
}

impl ToComplex for GaussRational {
    fn to_c64(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }
}

impl ToComplex for Complex64 {
    fn to_c64(&self) -> Complex64 {
        *self
    }
}

impl fmt::Debug for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "({} - {}i)", self.re, -self.im.clone())
        } else {
            write!(f, "({} + {}i)", self.re, self.im)
        }
    }
}

impl Ring for GaussRational {
    fn zero() -> Self {
        GaussRational { re: BigRational::zero(), im: BigRational::zero() }
    }
    fn one() -> Self {
        GaussRational { re: BigRational::one(), im: BigRational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        GaussRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
    fn sub(&self, rhs: &Self) -> Self {
        GaussRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
    fn mul(&self, rhs: &Self) -> Self {
        // Real fast path: every coefficient in the eliminations is real.
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussRational::real(&self.re * &rhs.re);
        }
        GaussRational { re: &self.re * &rhs.re - &self.im * &rhs.im, im: &self.re * &rhs.im + &self.im * &rhs.re }
    }
    fn neg(&self) -> Self {
        GaussRational { re: -self.re.clone(), im: -self.im.clone() }
    }
    fn exact_div(&self, rhs: &Self) -> Option<Self> {
        Field::div(self, rhs)
    }
    fn from_i64(v: i64) -> Self {
        GaussRational::real(BigRational::from_integer(BigInt::from(v)))
    }
}

impl Field for GaussRational {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(GaussRational::real(self.re.recip()));
        }
        let n = self.norm_sqr();
        Some(GaussRational { re: &self.re / &n, im: -(&self.im / &n) })
    }
}

impl Ring for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn exact_div(&self, rhs: &Self) -> Option<Self> {
        Field::div(self, rhs)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
}

impl Field for Complex64 {
    fn inv(&self) -> Option<Self> {
        if Ring::is_zero(self) {
            None
        } else {
            Some(Complex64::new(1.0, 0.0) / self)
        }
    }
}

/// Shorthand for an exact integer-valued coefficient.
pub fn q(v: i64) -> GaussRational {
    GaussRational::from_i64(v)
}

/// Shorthand for an exact rational coefficient `num/den`.
pub fn qr(num: i64, den: i64) -> GaussRational {
    GaussRational::from_ratio(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_division_is_exact() {
        let a = GaussRational::new(BigRational::from_integer(3.into()), BigRational::from_integer(4.into()));
        let b = GaussRational::new(BigRational::from_integer(1.into()), BigRational::from_integer((-2).into()));
        let c = Ring::exact_div(&a, &b).unwrap();
        assert_eq!(c.mul(&b), a);
    }

    #[test]
    fn huge_ratio_converts_to_float() {
        let big = BigInt::from(10).pow(400);
        let r = BigRational::new(big.clone() * 3, big);
        let v = GaussRational::real(r).to_c64();
        assert!((v.re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn from_f64_is_exact_dyadic() {
        let v = GaussRational::from_f64(0.1).unwrap();
        assert_eq!(v.to_c64().re, 0.1);
        assert!(GaussRational::from_f64(f64::NAN).is_none());
    }

    #[test]
    fn pow_matches_repeated_product() {
        let x = qr(-3, 2);
        assert_eq!(x.pow(3), qr(-27, 8));
        assert_eq!(x.pow(0), q(1));
    }
}
