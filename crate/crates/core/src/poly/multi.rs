//! Sparse multivariate polynomials used to write equations down and to
//! reshuffle nested dense representations between variable orders.

use std::collections::BTreeMap;

use super::dense::{Poly, Var};
use super::ring::{GaussRational, Ring};

const NV: usize = Var::ALL.len();

/// Exponent vector indexed by [`Var::index`].
pub type Monomial = [u32; NV];

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Multi {
    terms: BTreeMap<Monomial, GaussRational>,
}

impl Multi {
    pub fn zero() -> Self {
        Multi::default()
    }

    pub fn constant(c: GaussRational) -> Self {
        let mut m = Multi::zero();
        m.push([0; NV], c);
        m
    }

    pub fn int(v: i64) -> Self {
        Multi::constant(GaussRational::from_i64(v))
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; NV];
        e[v.index()] = 1;
        let mut m = Multi::zero();
        m.push(e, GaussRational::one());
        m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussRational)> {
        self.terms.iter()
    }

    pub fn push(&mut self, e: Monomial, c: GaussRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(GaussRational::zero);
        *entry = entry.add(&c);
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, rhs: &Multi) -> Multi {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.push(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Multi) -> Multi {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Multi {
        Multi { terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect() }
    }

    pub fn scale(&self, k: &GaussRational) -> Multi {
        let mut out = Multi::zero();
        for (e, c) in &self.terms {
            out.push(*e, c.mul(k));
        }
        out
    }

    pub fn mul(&self, rhs: &Multi) -> Multi {
        let mut out = Multi::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let mut e = *ea;
                for k in 0..NV {
                    e[k] += eb[k];
                }
                out.push(e, ca.mul(cb));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Multi {
        (0..n).fold(Multi::int(1), |acc, _| acc.mul(self))
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|e| e[v.index()]).max().unwrap_or(0)
    }

    /// Substitutes a constant for one variable.
    pub fn subs(&self, v: Var, val: &GaussRational) -> Multi {
        let mut out = Multi::zero();
        for (e, c) in &self.terms {
            let mut e2 = *e;
            let k = e2[v.index()];
            e2[v.index()] = 0;
            out.push(e2, c.mul(&val.pow(k)));
        }
        out
    }

    /// Substitutes a polynomial for one variable.
    pub fn subs_poly(&self, v: Var, val: &Multi) -> Multi {
        let mut out = Multi::zero();
        for (e, c) in &self.terms {
            let mut e2 = *e;
            let k = e2[v.index()];
            e2[v.index()] = 0;
            let mut t = Multi::zero();
            t.push(e2, c.clone());
            out = out.add(&t.mul(&val.pow(k)));
        }
        out
    }

    /// Nested dense form with `order[0]` outermost. Every variable present must be listed.
    pub fn nest<N: Nested>(&self, order: &[Var]) -> N {
        N::from_multi(self, order)
    }

    /// Coefficients with respect to `v`, lowest power first.
    pub fn coeffs_in(&self, v: Var) -> Vec<Multi> {
        let mut parts = vec![Multi::zero(); self.degree_in(v) as usize + 1];
        if self.is_zero() {
            return Vec::new();
        }
        for (e, c) in &self.terms {
            let mut e2 = *e;
            let k = e2[v.index()] as usize;
            e2[v.index()] = 0;
            parts[k].push(e2, c.clone());
        }
        parts
    }

    fn times_power(&self, v: Var, k: u32) -> Multi {
        Multi {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = *e;
                    e2[v.index()] += k;
                    (e2, c.clone())
                })
                .collect(),
        }
    }
}

/// Dense nestings of exact polynomials that convert to and from [`Multi`].
pub trait Nested: Ring {
    fn from_multi(m: &Multi, order: &[Var]) -> Self;
    fn to_multi(&self) -> Multi;
}

impl Nested for GaussRational {
    fn from_multi(m: &Multi, order: &[Var]) -> Self {
        assert!(order.is_empty(), "too many variables for nesting depth");
        match m.terms.len() {
            0 => GaussRational::zero(),
            1 => {
                let (e, c) = m.terms.iter().next().unwrap();
                assert!(e.iter().all(|&k| k == 0), "variable missing from nesting order");
                c.clone()
            }
            _ => panic!("variable missing from nesting order"),
        }
    }
    fn to_multi(&self) -> Multi {
        Multi::constant(self.clone())
    }
}

impl<R: Nested> Nested for Poly<R> {
    fn from_multi(m: &Multi, order: &[Var]) -> Self {
        let (v, rest) = order.split_first().expect("nesting order shorter than depth");
        Poly::new(*v, m.coeffs_in(*v).iter().map(|p| R::from_multi(p, rest)).collect())
    }
    fn to_multi(&self) -> Multi {
        let v = self.variable();
        self.coeffs()
            .iter()
            .enumerate()
            .fold(Multi::zero(), |acc, (k, c)| acc.add(&c.to_multi().times_power(v, k as u32)))
    }
}

/// Polynomial expression builder: `x^2 * 3` is `var(X).pow(2).scale(&q(3))`.
pub fn mv(v: Var) -> Multi {
    Multi::var(v)
}

/// Integer constant as a [`Multi`].
pub fn mi(v: i64) -> Multi {
    Multi::int(v)
}

/// Exact constant as a [`Multi`].
pub fn mc(c: &GaussRational) -> Multi {
    Multi::constant(c.clone())
}

impl std::ops::Add for &Multi {
    type Output = Multi;
    fn add(self, rhs: &Multi) -> Multi {
        Multi::add(self, rhs)
    }
}

impl std::ops::Sub for &Multi {
    type Output = Multi;
    fn sub(self, rhs: &Multi) -> Multi {
        Multi::sub(self, rhs)
    }
}

impl std::ops::Mul for &Multi {
    type Output = Multi;
    fn mul(self, rhs: &Multi) -> Multi {
        Multi::mul(self, rhs)
    }
}

impl std::ops::Neg for &Multi {
    type Output = Multi;
    fn neg(self) -> Multi {
        Multi::neg(self)
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl std::ops::$tr for Multi {
            type Output = Multi;
            fn $f(self, rhs: Multi) -> Multi {
                std::ops::$tr::$f(&self, &rhs)
            }
        }
        impl std::ops::$tr<&Multi> for Multi {
            type Output = Multi;
            fn $f(self, rhs: &Multi) -> Multi {
                std::ops::$tr::$f(&self, rhs)
            }
        }
        impl std::ops::$tr<Multi> for &Multi {
            type Output = Multi;
            fn $f(self, rhs: Multi) -> Multi {
                std::ops::$tr::$f(self, &rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl std::ops::Neg for Multi {
    type Output = Multi;
    fn neg(self) -> Multi {
        Multi::neg(&self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ring::q;

    #[test]
    fn nest_roundtrip_reorders() {
        let x = mv(Var::X);
        let z = mv(Var::Z);
        let m = &x.pow(2) * &z + &z.pow(3) - mi(4);
        let xz: Poly<Poly<GaussRational>> = m.nest(&[Var::X, Var::Z]);
        assert_eq!(xz.degree(), Some(2));
        let zx: Poly<Poly<GaussRational>> = m.nest(&[Var::Z, Var::X]);
        assert_eq!(zx.degree(), Some(3));
        assert_eq!(xz.to_multi(), m);
        assert_eq!(zx.to_multi(), m);
    }

    #[test]
    fn substitution() {
        let x = mv(Var::X);
        let m = &x.pow(2) + &mi(1);
        assert_eq!(m.subs(Var::X, &q(3)), mi(10));
        let y = mv(Var::Y);
        let s = m.subs_poly(Var::X, &(&y + &mi(1)));
        assert_eq!(s, &y.pow(2) + &(&y.scale(&q(2)) + &mi(2)));
    }
}
