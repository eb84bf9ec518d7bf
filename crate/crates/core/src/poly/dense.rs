//! Dense univariate polynomials over any [`Ring`]; nesting gives multivariate rings.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ring::{Field, GaussRational, Ring, ToComplex};

/// Variable tag carried by every polynomial.
///
/// `A1`, `A2` and `Lambda` only appear when model parameters are kept symbolic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "y")]
    Y,
    #[serde(rename = "D")]
    D,
    #[serde(rename = "z")]
    Z,
    /// Reciprocal amplitude `d = 1/D`.
    #[serde(rename = "d")]
    Dr,
    #[serde(rename = "A1")]
    A1,
    #[serde(rename = "A2")]
    A2,
    #[serde(rename = "lambda")]
    Lambda,
}

impl Var {
    pub const ALL: [Var; 8] = [Var::X, Var::Y, Var::D, Var::Z, Var::Dr, Var::A1, Var::A2, Var::Lambda];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::D => "D",
            Var::Z => "z",
            Var::Dr => "d",
            Var::A1 => "A1",
            Var::A2 => "A2",
            Var::Lambda => "lambda",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Dense polynomial, `coeffs[k]` multiplies `var^k`. Trailing zeros are always trimmed,
/// so the zero polynomial has no coefficients.
#[derive(Clone)]
pub struct Poly<R> {
    var: Var,
    coeffs: Vec<R>,
}

/// Exact polynomial with Gaussian-rational coefficients.
pub type QPoly = Poly<GaussRational>;
/// Polynomial in an outer variable with coefficients polynomial in an inner one.
pub type BiPoly = Poly<Poly<GaussRational>>;
/// Floating-point polynomial.
pub type CPoly = Poly<Complex64>;

impl<R: Ring> Poly<R> {
    pub fn new(var: Var, mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { var, coeffs }
    }

    pub fn zero_in(var: Var) -> Self {
        Poly { var, coeffs: Vec::new() }
    }

    pub fn constant(var: Var, c: R) -> Self {
        Poly::new(var, vec![c])
    }

    /// The polynomial `var`.
    pub fn var(var: Var) -> Self {
        Poly::new(var, vec![R::zero(), R::one()])
    }

    pub fn monomial(var: Var, c: R, k: usize) -> Self {
        let mut coeffs = vec![R::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(var, coeffs)
    }

    pub fn variable(&self) -> Var {
        self.var
    }

    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> R {
        self.coeffs.get(k).cloned().unwrap_or_else(R::zero)
    }

    pub fn lead(&self) -> Option<&R> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &R) -> Self {
        Poly::new(self.var, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Poly<S> {
        Poly::new(self.var, self.coeffs.iter().map(f).collect())
    }

    /// Horner evaluation with the coefficients lifted into the value ring.
    pub fn eval_with<S: Ring>(&self, v: &S, lift: impl Fn(&R) -> S) -> S {
        self.coeffs.iter().rev().fold(S::zero(), |acc, c| acc.mul(v).add(&lift(c)))
    }

    pub fn eval(&self, v: &R) -> R {
        self.eval_with(v, |c| c.clone())
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.mul(&R::from_i64(k as i64))).collect();
        Poly::new(self.var, coeffs)
    }

    /// Multiplies by `var^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut coeffs = vec![R::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { var: self.var, coeffs }
    }

    /// Exact division of every coefficient by `c`.
    pub fn div_scalar(&self, c: &R) -> Option<Self> {
        let coeffs = self.coeffs.iter().map(|a| a.exact_div(c)).collect::<Option<Vec<_>>>()?;
        Some(Poly::new(self.var, coeffs))
    }

    /// Coefficients in reverse order: `var^deg p(1/var)`.
    pub fn reversed(&self) -> Self {
        Poly::new(self.var, self.coeffs.iter().rev().cloned().collect())
    }

    /// Pseudo-remainder: `lc(q)^e p = s q + r` with `deg r < deg q`. Returns `r`.
    pub fn pseudo_rem(&self, q: &Self) -> Self {
        let dq = q.degree().expect("pseudo_rem by zero polynomial");
        let lq = q.lead().unwrap().clone();
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < dq {
                break;
            }
            let lr = r.lead().unwrap().clone();
            r = r.scale(&lq).sub_poly(&q.scale(&lr).shift(dr - dq));
        }
        r
    }

    /// `p` and `q` differ by a nonzero scalar factor from the coefficient ring.
    pub fn proportional(&self, q: &Self) -> bool {
        match (self.lead(), q.lead()) {
            (None, None) => true,
            (Some(a), Some(b)) => self.degree() == q.degree() && self.scale(b) == q.scale(a),
            _ => false,
        }
    }

    pub fn add_poly(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|k| match (self.coeffs.get(k), rhs.coeffs.get(k)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly::new(self.var, coeffs)
    }

    pub fn sub_poly(&self, rhs: &Self) -> Self {
        self.add_poly(&rhs.neg_poly())
    }

    pub fn neg_poly(&self) -> Self {
        Poly { var: self.var, coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn mul_poly(&self, rhs: &Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::zero_in(self.var);
        }
        let mut out = vec![R::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        Poly::new(self.var, out)
    }

    /// Long division that only succeeds when it is exact in the coefficient ring.
    pub fn exact_div_poly(&self, q: &Self) -> Option<Self> {
        let dq = q.degree()?;
        if self.coeffs.is_empty() {
            return Some(Poly::zero_in(self.var));
        }
        if dq == 0 {
            return self.div_scalar(&q.coeffs[0]);
        }
        let lq = q.lead().unwrap();
        let mut r = self.clone();
        let dp = r.degree()?;
        if dp < dq {
            return None;
        }
        let mut quot = vec![R::zero(); dp - dq + 1];
        while let Some(dr) = r.degree() {
            if dr < dq {
                return None;
            }
            let t = r.lead().unwrap().exact_div(lq)?;
            r = r.sub_poly(&q.scale(&t).shift(dr - dq));
            quot[dr - dq] = t;
        }
        Some(Poly::new(self.var, quot))
    }

    /// Composition `self(g)`, with `g` in any variable.
    pub fn compose(&self, g: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero_in(g.var), |acc, c| acc.mul_poly(g).add_poly(&Poly::constant(g.var, c.clone())))
    }
}

impl<R: Field> Poly<R> {
    pub fn div_rem(&self, q: &Self) -> (Self, Self) {
        let dq = q.degree().expect("division by zero polynomial");
        let inv = q.lead().unwrap().inv().unwrap();
        let mut r = self.clone();
        let mut quot = vec![R::zero(); self.coeffs.len().saturating_sub(dq)];
        while let Some(dr) = r.degree() {
            if dr < dq {
                break;
            }
            let t = r.lead().unwrap().mul(&inv);
            r = r.sub_poly(&q.scale(&t).shift(dr - dq));
            // Guard against floating leads that refuse to cancel exactly.
            if r.degree() == Some(dr) {
                r.coeffs.pop();
                r = Poly::new(r.var, r.coeffs);
            }
            quot[dr - dq] = t;
        }
        (Poly::new(self.var, quot), r)
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            Some(l) => self.scale(&l.inv().unwrap()),
            None => self.clone(),
        }
    }

    /// Monic greatest common divisor; zero when both inputs are zero.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while b.degree().is_some() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl<R: Ring + ToComplex> Poly<R> {
    pub fn to_float(&self) -> CPoly {
        Poly::new(self.var, self.coeffs.iter().map(|c| c.to_c64()).collect())
    }

    pub fn eval_c64(&self, v: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * v + c.to_c64())
    }
}

impl<R: Ring + ToComplex> Poly<Poly<R>> {
    /// Evaluates every inner coefficient at `v`, leaving a float polynomial in the outer variable.
    pub fn eval_inner_c64(&self, v: Complex64) -> CPoly {
        Poly::new(self.var, self.coeffs.iter().map(|c| c.eval_c64(v)).collect())
    }
}

impl<R: Ring> Poly<Poly<R>> {
    /// Evaluates every inner coefficient at `v` within the coefficient ring.
    pub fn eval_inner(&self, v: &R) -> Poly<R> {
        Poly::new(self.var, self.coeffs.iter().map(|c| c.eval(v)).collect())
    }

    /// Exchanges outer and inner variables.
    pub fn transpose(&self) -> Poly<Poly<R>> {
        let inner_var = self.coeffs.iter().map(|c| c.var).next().unwrap_or(Var::Z);
        let n = self.coeffs.iter().map(|c| c.coeffs.len()).max().unwrap_or(0);
        let coeffs = (0..n).map(|j| Poly::new(self.var, self.coeffs.iter().map(|c| c.coeff(j)).collect())).collect();
        Poly::new(inner_var, coeffs)
    }
}

impl<F: Field> Poly<Poly<F>> {
    /// Greatest common divisor of all coefficients, as a monic polynomial in the inner variable.
    pub fn content(&self) -> Poly<F> {
        let inner = self.coeffs.first().map(|c| c.var).unwrap_or(Var::Z);
        self.coeffs.iter().fold(Poly::zero_in(inner), |g, c| g.gcd(c))
    }

    /// Removes the content in the inner variable.
    pub fn primitive_part(&self) -> Self {
        let c = self.content();
        if c.degree().is_none() {
            return self.clone();
        }
        self.map(|a| a.exact_div_poly(&c).expect("content divides every coefficient"))
    }

    /// Primitive part of the gcd over `F[t][v]`, by a primitive pseudo-remainder sequence.
    /// A constant result means the inputs are coprime.
    pub fn prs_gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while b.degree().is_some() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = if r.degree().is_some() { r.primitive_part() } else { r };
        }
        a
    }
}

impl<R: Ring> Ring for Poly<R> {
    fn zero() -> Self {
        // Variable of a bare ring zero is irrelevant; arithmetic adopts the other operand's tag.
        Poly::zero_in(Var::Z)
    }
    fn one() -> Self {
        Poly::constant(Var::Z, R::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, rhs: &Self) -> Self {
        let var = if self.coeffs.len() > 1 { self.var } else { rhs.var };
        self.add_poly(rhs).with_var(var)
    }
    fn sub(&self, rhs: &Self) -> Self {
        let var = if self.coeffs.len() > 1 { self.var } else { rhs.var };
        self.sub_poly(rhs).with_var(var)
    }
    fn mul(&self, rhs: &Self) -> Self {
        let var = if self.coeffs.len() > 1 { self.var } else { rhs.var };
        self.mul_poly(rhs).with_var(var)
    }
    fn neg(&self) -> Self {
        self.neg_poly()
    }
    fn exact_div(&self, rhs: &Self) -> Option<Self> {
        let var = if self.coeffs.len() > 1 { self.var } else { rhs.var };
        self.with_var_of(rhs).exact_div_poly(rhs).map(|p| p.with_var(var))
    }
    fn from_i64(v: i64) -> Self {
        Poly::constant(Var::Z, R::from_i64(v))
    }
}

// Constants compare equal whatever their tag.
impl<R: PartialEq> PartialEq for Poly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && (self.var == other.var || self.coeffs.len() <= 1)
    }
}

impl<R: Ring> Poly<R> {
    fn with_var_of(&self, other: &Self) -> Self {
        Poly { var: other.var, coeffs: self.coeffs.clone() }
    }
}

impl<R: Ring + fmt::Display> fmt::Display for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*{}", self.var)?,
                _ => write!(f, "({c})*{}^{k}", self.var)?,
            }
        }
        Ok(())
    }
}

impl<R: Ring> fmt::Debug for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]{:?}", self.var, self.coeffs)
    }
}
