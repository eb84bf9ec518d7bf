//! Shared elimination pipeline: two stationarity equations in `(x, y)`, a relation linear in
//! the amplitude, and the rational solvent `y = N(x) / M(x)`.

use crate::error::{Result, TimfError};
use crate::poly::{resultant, resultant_multi, Multi, Nested, Poly, Ring, Var};

/// Polynomial form of a two-particle mean-field system.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem {
    pub e1: Multi,
    pub e2: Multi,
    /// Linear in `D`: `c(x, y, z) D + r(x, y, z)`.
    pub amplitude: Multi,
    /// Solvent `y = y_num / y_den` in terms of `x` and `z`.
    pub y_num: Multi,
    pub y_den: Multi,
}

impl PolySystem {
    /// Fixes one variable to a constant.
    pub fn subs(&self, v: Var, val: &crate::poly::GaussRational) -> PolySystem {
        PolySystem {
            e1: self.e1.subs(v, val),
            e2: self.e2.subs(v, val),
            amplitude: self.amplitude.subs(v, val),
            y_num: self.y_num.subs(v, val),
            y_den: self.y_den.subs(v, val),
        }
    }

    /// The amplitude relation with `y` replaced by the solvent, denominators cleared.
    pub fn amplitude_in_x(&self) -> Multi {
        let parts = self.amplitude.coeffs_in(Var::Y);
        let k = parts.len().saturating_sub(1) as u32;
        parts
            .iter()
            .enumerate()
            .fold(Multi::zero(), |acc, (j, c)| acc + c * &self.y_num.pow(j as u32) * self.y_den.pow(k - j as u32))
    }

    /// `Res_y(e1, e2)`, a polynomial in `x` over the ring spanned by `inner`.
    pub fn x_resultant<R: Nested>(&self, inner: &[Var]) -> Result<Poly<R>> {
        let order: Vec<Var> = [Var::Y, Var::X].iter().chain(inner).copied().collect();
        let e1: Poly<Poly<R>> = self.e1.nest(&order);
        let e2: Poly<Poly<R>> = self.e2.nest(&order);
        Ok(resultant(&e1, &e2, Var::Y)?.with_var(Var::X))
    }

    /// `Res_x(e1, e2)`, a polynomial in `y`.
    pub fn y_resultant<R: Nested>(&self, inner: &[Var]) -> Result<Poly<R>> {
        let order: Vec<Var> = [Var::X, Var::Y].iter().chain(inner).copied().collect();
        let e1: Poly<Poly<R>> = self.e1.nest(&order);
        let e2: Poly<Poly<R>> = self.e2.nest(&order);
        Ok(resultant(&e1, &e2, Var::X)?.with_var(Var::Y))
    }

    /// Raw resultant in `x` of the x-resultant and the amplitude relation, a polynomial in `D`.
    /// It carries extraneous factors free of `D`; see [`normalize_by_constant`].
    pub fn amplitude_resultant<R: Nested>(&self, inner: &[Var]) -> Result<Poly<R>> {
        let rx: Poly<R> = self.x_resultant(inner)?;
        let raw = resultant_multi(&rx.to_multi(), &self.amplitude_in_x(), Var::X)?;
        let order: Vec<Var> = [Var::D].iter().chain(inner).copied().collect();
        Ok(raw.nest(&order))
    }
}

/// Divides `raw` by the factor that turns its lowest coefficient into `expected`.
/// Fails unless that factor divides every coefficient exactly.
pub fn normalize_by_constant<R: Ring>(raw: &Poly<R>, expected: &R) -> Result<Poly<R>> {
    let c0 = raw.coeff(0);
    let e = c0
        .exact_div(expected)
        .ok_or_else(|| TimfError::Exact("lowest coefficient does not contain the expected factor".into()))?;
    raw.div_scalar(&e).ok_or_else(|| TimfError::Exact("normalizing factor does not divide every coefficient".into()))
}

/// Rescales `p` (nested in `order`, outermost first) to integer coefficients with unit content and a positive
/// leading term, where terms are ranked lexicographically by their exponents in `order`.
pub fn primitive_normalize<R: Nested>(p: &Poly<R>, order: &[Var]) -> Result<Poly<R>> {
    use num_integer::Integer;
    use num_rational::BigRational;
    use num_traits::{One, Signed, Zero};
    let m = p.to_multi();
    if m.is_zero() {
        return Ok(p.clone());
    }
    let mut num = num_bigint::BigInt::zero();
    let mut den = num_bigint::BigInt::one();
    let mut lead: Option<(Vec<u32>, BigRational)> = None;
    for (e, c) in m.terms() {
        if !c.is_real() {
            return Err(TimfError::Exact("primitive normalization needs real coefficients".into()));
        }
        num = num.gcd(c.re.numer());
        den = den.lcm(c.re.denom());
        let key: Vec<u32> = order.iter().map(|v| e[v.index()]).collect();
        if lead.as_ref().is_none_or(|(k, _)| key > *k) {
            lead = Some((key, c.re.clone()));
        }
    }
    let mut content = BigRational::new(num, den);
    if lead.is_some_and(|(_, c)| c.is_negative()) {
        content = -content;
    }
    let inv = crate::poly::GaussRational::real(content.recip());
    Ok(m.scale(&inv).nest(order))
}
