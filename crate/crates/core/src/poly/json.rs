//! JSON form `{variable, coefficients}`; exact coefficients are `[re_num, re_den, im_num, im_den]`
//! with arbitrary-size integers, float ones `[re, im]`. Nested polynomials nest objects.

use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::{json, Number, Value};

use super::dense::{Poly, Var};
use super::ring::{GaussRational, Ring};
use crate::error::{Result, TimfError};

pub trait JsonCoeff: Ring {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

fn bad(msg: &str) -> TimfError {
    TimfError::Serialization(msg.to_string())
}

fn int_value(i: &BigInt) -> Value {
    Value::Number(Number::from_str(&i.to_string()).expect("integers are valid JSON numbers"))
}

fn int_from(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => BigInt::from_str(&n.to_string()).map_err(|_| bad("expected integer")),
        _ => Err(bad("expected integer")),
    }
}

fn ratio_from(n: &Value, d: &Value) -> Result<BigRational> {
    let d = int_from(d)?;
    if d == BigInt::from(0) {
        return Err(bad("zero denominator"));
    }
    Ok(BigRational::new(int_from(n)?, d))
}

impl JsonCoeff for GaussRational {
    fn to_json(&self) -> Value {
        json!([
            int_value(self.re.numer()),
            int_value(self.re.denom()),
            int_value(self.im.numer()),
            int_value(self.im.denom())
        ])
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v.as_array().map(|a| a.as_slice()) {
            Some([rn, rd, im, id]) => Ok(GaussRational::new(ratio_from(rn, rd)?, ratio_from(im, id)?)),
            _ => Err(bad("exact coefficient must be [re_num, re_den, im_num, im_den]")),
        }
    }
}

impl JsonCoeff for Complex64 {
    fn to_json(&self) -> Value {
        json!([self.re, self.im])
    }
    fn from_json(v: &Value) -> Result<Self> {
        let get = |x: &Value| x.as_f64().ok_or_else(|| bad("float coefficient must be numeric"));
        match v.as_array().map(|a| a.as_slice()) {
            Some([re, im]) => Ok(Complex64::new(get(re)?, get(im)?)),
            _ => Err(bad("float coefficient must be [re, im]")),
        }
    }
}

impl<R: JsonCoeff> JsonCoeff for Poly<R> {
    fn to_json(&self) -> Value {
        json!({
            "variable": self.variable(),
            "coefficients": self.coeffs().iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }
    fn from_json(v: &Value) -> Result<Self> {
        let var: Var = serde_json::from_value(v.get("variable").cloned().ok_or_else(|| bad("missing variable"))?)
            .map_err(|e| bad(&e.to_string()))?;
        let coeffs = v
            .get("coefficients")
            .and_then(|c| c.as_array())
            .ok_or_else(|| bad("missing coefficients"))?
            .iter()
            .map(R::from_json)
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::new(var, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ring::qr;

    #[test]
    fn exact_roundtrip_with_big_integers() {
        let big = GaussRational::real(BigRational::from_integer(BigInt::from(10).pow(40)));
        let p = Poly::new(Var::D, vec![qr(-3, 7), big]);
        let v = p.to_json();
        assert_eq!(v["variable"], "D");
        assert_eq!(v["coefficients"][0], json!([-3, 7, 0, 1]));
        assert_eq!(Poly::<GaussRational>::from_json(&v).unwrap(), p);
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.contains("10000000000000000000000000000000000000000"));
    }

    #[test]
    fn float_and_nested_roundtrip() {
        let inner = Poly::new(Var::Z, vec![Complex64::new(1.5, -2.0)]);
        let p = Poly::new(Var::X, vec![inner.clone(), inner]);
        let v = p.to_json();
        assert_eq!(Poly::<Poly<Complex64>>::from_json(&v).unwrap(), p);
    }
}
