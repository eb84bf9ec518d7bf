//! Physical parameters of the two models.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TimfError};
use crate::poly::GaussRational;

/// Closest simple fraction to `v` (denominator up to 10^9) when it reproduces `v` to
/// rounding level, otherwise the exact binary value. Lets decimal input like `0.1`
/// or `0.333...` enter exact derivations as `1/10` and `1/3`.
pub fn rationalize(v: f64) -> GaussRational {
    if v == 0.0 || !v.is_finite() {
        return GaussRational::from_f64(if v.is_finite() { v } else { 0.0 }).unwrap();
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut x = v.abs();
    for _ in 0..40 {
        let a = x.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let approx = h1.to_f64().unwrap() / k1.to_f64().unwrap();
        if (approx - v.abs()).abs() <= 2.0 * f64::EPSILON * v.abs() {
            let r = BigRational::new(h1.clone(), k1.clone());
            return GaussRational::real(if v < 0.0 { -r } else { r });
        }
        if k1 > BigInt::from(1_000_000_000i64) || x == a {
            break;
        }
        x = 1.0 / (x - a);
    }
    GaussRational::from_f64(v).unwrap()
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(TimfError::InvalidParams(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Two free particles with Lorentzian source packets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFreeParams {
    pub a1: f64,
    pub a2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    #[serde(rename = "K1", default)]
    pub k1: f64,
    #[serde(rename = "K2", default)]
    pub k2: f64,
}

impl Default for ModelFreeParams {
    fn default() -> Self {
        ModelFreeParams::unit()
    }
}

impl ModelFreeParams {
    pub fn unit() -> Self {
        ModelFreeParams { a1: 1.0, a2: 1.0, gamma1: 1.0, gamma2: 1.0, k1: 0.0, k2: 0.0 }
    }

    pub fn new(a1: f64, a2: f64, gamma1: f64, gamma2: f64) -> Self {
        ModelFreeParams { a1, a2, gamma1, gamma2, k1: 0.0, k2: 0.0 }
    }

    pub fn big_a1(&self) -> f64 {
        self.a1 * self.gamma1 * self.gamma1
    }

    pub fn big_a2(&self) -> f64 {
        self.a2 * self.gamma2 * self.gamma2
    }

    /// Common scale when both `A` agree.
    pub fn theta(&self) -> Option<f64> {
        let (p, q) = (self.big_a1(), self.big_a2());
        ((p - q).abs() <= 1e-14 * p.max(q)).then_some(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("a1", self.a1)?;
        positive("a2", self.a2)?;
        positive("gamma1", self.gamma1)?;
        positive("gamma2", self.gamma2)?;
        if !(self.k1.is_finite() && self.k2.is_finite()) {
            return Err(TimfError::InvalidParams("packet centers must be finite".into()));
        }
        Ok(())
    }

    /// Polynomial conditions exist only for centred packets.
    pub fn require_centred(&self) -> Result<()> {
        if self.k1 != 0.0 || self.k2 != 0.0 {
            return Err(TimfError::InvalidParams("polynomial conditions need K1 = K2 = 0".into()));
        }
        Ok(())
    }

    /// `[a1, a2, gamma1, gamma2]` as exact rationals.
    pub fn exact(&self) -> [GaussRational; 4] {
        [rationalize(self.a1), rationalize(self.a2), rationalize(self.gamma1), rationalize(self.gamma2)]
    }
}

/// Particle 1 bound by a rank-one attractive potential of strength `lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelBoundParams {
    pub a1: f64,
    pub a2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub lambda: f64,
}

impl Default for ModelBoundParams {
    fn default() -> Self {
        ModelBoundParams::reference()
    }
}

impl ModelBoundParams {
    /// `a1 = gamma1 = gamma2 = 1`, `a2 = lambda = 2`.
    pub fn reference() -> Self {
        ModelBoundParams { a1: 1.0, a2: 2.0, gamma1: 1.0, gamma2: 1.0, lambda: 2.0 }
    }

    pub fn big_a1(&self) -> f64 {
        self.a1 * self.gamma1 * self.gamma1
    }

    pub fn big_a2(&self) -> f64 {
        self.a2 * self.gamma2 * self.gamma2
    }

    /// Same particles with the potential switched off.
    pub fn free(&self) -> ModelFreeParams {
        ModelFreeParams::new(self.a1, self.a2, self.gamma1, self.gamma2)
    }

    /// Validation allows `lambda = 0` (no potential); the bound state needs `lambda > 0`.
    pub fn validate(&self) -> Result<()> {
        self.free().validate()?;
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(TimfError::InvalidParams(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        Ok(())
    }

    /// `[a1, a2, gamma1, gamma2, lambda]` as exact rationals.
    pub fn exact(&self) -> [GaussRational; 5] {
        [
            rationalize(self.a1),
            rationalize(self.a2),
            rationalize(self.gamma1),
            rationalize(self.gamma2),
            rationalize(self.lambda),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qr;

    #[test]
    fn rationalize_simple_fractions() {
        assert_eq!(rationalize(0.5), qr(1, 2));
        assert_eq!(rationalize(1.0 / 3.0), qr(1, 3));
        assert_eq!(rationalize(-0.1), qr(-1, 10));
        assert_eq!(rationalize(3.0), qr(3, 1));
        assert_eq!(rationalize(-27.0 / 16.0), qr(-27, 16));
    }

    #[test]
    fn rationalize_falls_back_to_binary_value() {
        let v = std::f64::consts::PI;
        let r = rationalize(v);
        assert!((crate::poly::ToComplex::to_c64(&r).re - v).abs() <= 2.0 * f64::EPSILON * v);
    }

    #[test]
    fn validation() {
        assert!(ModelFreeParams::unit().validate().is_ok());
        assert!(ModelFreeParams::new(-1.0, 1.0, 1.0, 1.0).validate().is_err());
        assert!(ModelBoundParams { lambda: -1.0, ..ModelBoundParams::reference() }.validate().is_err());
        assert_eq!(ModelFreeParams::unit().theta(), Some(1.0));
    }
}
