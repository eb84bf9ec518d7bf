//! Resultants of sparse multivariate polynomials by evaluation at integer points and
//! tensor-product interpolation.
//!
//! The Sylvester matrix is formed symbolically, every entry is evaluated exactly on a grid
//! large enough for the degree bounds of the determinant, each numeric determinant is taken
//! with fraction-free integer elimination, and the results are interpolated back.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::dense::Var;
use super::multi::{Monomial, Multi};
use super::resultant::bareiss_det;
use super::ring::{GaussRational, Ring};
use crate::error::{Result, TimfError};

/// `Res_var(p, q)` as a polynomial in the remaining variables.
pub fn resultant_multi(p: &Multi, q: &Multi, var: Var) -> Result<Multi> {
    let cp = p.coeffs_in(var);
    let cq = q.coeffs_in(var);
    let (m, n) = (cp.len().saturating_sub(1), cq.len().saturating_sub(1));
    if m == 0 || n == 0 {
        return Err(TimfError::DegreeZero { var });
    }
    let size = m + n;
    let mut mat = vec![vec![Multi::zero(); size]; size];
    for s in 0..n {
        for (k, c) in cp.iter().enumerate() {
            mat[s][s + m - k] = c.clone();
        }
    }
    for s in 0..m {
        for (k, c) in cq.iter().enumerate() {
            mat[n + s][s + n - k] = c.clone();
        }
    }
    determinant_multi(&mat)
}

/// Determinant of a matrix of sparse polynomials.
pub fn determinant_multi(mat: &[Vec<Multi>]) -> Result<Multi> {
    let size = mat.len();
    // Variables that occur, with the smaller of the row-sum and column-sum degree bounds.
    let mut vars: Vec<(Var, usize)> = Vec::new();
    for v in Var::ALL {
        let deg = |i: usize, j: usize| mat[i][j].degree_in(v) as usize;
        let rows: usize = (0..size).map(|i| (0..size).map(|j| deg(i, j)).max().unwrap_or(0)).sum();
        let cols: usize = (0..size).map(|j| (0..size).map(|i| deg(i, j)).max().unwrap_or(0)).sum();
        let b = rows.min(cols);
        if b > 0 {
            vars.push((v, b));
        }
    }
    let nodes: Vec<Vec<BigInt>> = vars.iter().map(|&(_, b)| sample_points(b + 1)).collect();
    let dims: Vec<usize> = vars.iter().map(|&(_, b)| b + 1).collect();
    let total: usize = dims.iter().product();
    let mut values = Vec::with_capacity(total);
    for flat in 0..total {
        let idx = unflatten(flat, &dims);
        let point: Vec<(Var, BigRational)> = vars
            .iter()
            .zip(&idx)
            .map(|(&(v, _), &i)| (v, BigRational::from_integer(nodes_at(&nodes, &vars, v)[i].clone())))
            .collect();
        let num: Vec<Vec<GaussRational>> =
            mat.iter().map(|row| row.iter().map(|e| eval_at(e, &point)).collect()).collect();
        values.push(det_exact(num)?);
    }
    // Interpolate one axis at a time; afterwards the array holds monomial coefficients.
    for (axis, pts) in nodes.iter().enumerate() {
        let stride: usize = dims[axis + 1..].iter().product();
        for flat in 0..total {
            if unflatten(flat, &dims)[axis] != 0 {
                continue;
            }
            let fiber: Vec<GaussRational> = (0..dims[axis]).map(|i| values[flat + i * stride].clone()).collect();
            for (i, c) in interpolate(pts, &fiber).into_iter().enumerate() {
                values[flat + i * stride] = c;
            }
        }
    }
    let mut out = Multi::zero();
    for (flat, c) in values.into_iter().enumerate() {
        let idx = unflatten(flat, &dims);
        let mut e: Monomial = [0; Var::ALL.len()];
        for (&(v, _), &i) in vars.iter().zip(&idx) {
            e[v.index()] = i as u32;
        }
        out.push(e, c);
    }
    Ok(out)
}

fn nodes_at<'a>(nodes: &'a [Vec<BigInt>], vars: &[(Var, usize)], v: Var) -> &'a [BigInt] {
    let k = vars.iter().position(|&(w, _)| w == v).unwrap();
    &nodes[k]
}

/// `0, 1, -1, 2, -2, ...`
fn sample_points(n: usize) -> Vec<BigInt> {
    (0..n as i64).map(|k| BigInt::from(if k % 2 == 1 { (k + 1) / 2 } else { -k / 2 })).collect()
}

fn unflatten(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; dims.len()];
    for a in (0..dims.len()).rev() {
        idx[a] = flat % dims[a];
        flat /= dims[a];
    }
    idx
}

fn eval_at(m: &Multi, point: &[(Var, BigRational)]) -> GaussRational {
    let mut acc = GaussRational::zero();
    for (e, c) in m.terms() {
        let mut t = BigRational::one();
        for (v, val) in point {
            let k = e[v.index()];
            if k > 0 {
                t *= num_traits::pow(val.clone(), k as usize);
            }
        }
        acc = acc.add(&c.scale(&t));
    }
    acc
}

/// Determinant of an exact matrix; real matrices are cleared to integers row by row.
fn det_exact(m: Vec<Vec<GaussRational>>) -> Result<GaussRational> {
    if !m.iter().flatten().all(|c| c.is_real()) {
        return Ok(bareiss_det(m));
    }
    let mut scale = BigInt::one();
    let mut ints = Vec::with_capacity(m.len());
    for row in &m {
        let l = row.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.re.denom()));
        scale *= &l;
        ints.push(row.iter().map(|c| (&c.re * BigRational::from_integer(l.clone())).to_integer()).collect::<Vec<_>>());
    }
    let d = bareiss_int(ints);
    Ok(GaussRational::real(BigRational::new(d, scale)))
}

/// Fraction-free determinant over the integers.
pub fn bareiss_int(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Monomial coefficients of the polynomial through `(t_i, v_i)`, via Newton divided differences.
pub fn interpolate(t: &[BigInt], v: &[GaussRational]) -> Vec<GaussRational> {
    let n = t.len();
    let tr: Vec<GaussRational> = t.iter().map(|x| GaussRational::real(BigRational::from_integer(x.clone()))).collect();
    let mut dd = v.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let den = tr[i].sub(&tr[i - j]);
            dd[i] = dd[i].sub(&dd[i - 1]).exact_div(&den).expect("distinct nodes");
        }
    }
    // Horner expansion of the Newton form.
    let mut coeffs = vec![GaussRational::zero(); n];
    for i in (0..n).rev() {
        // coeffs <- coeffs * (x - t_i) + dd_i
        let mut next = vec![GaussRational::zero(); n];
        for k in 0..n {
            if coeffs[k].is_zero() {
                continue;
            }
            if k + 1 < n {
                next[k + 1] = next[k + 1].add(&coeffs[k]);
            }
            next[k] = next[k].sub(&coeffs[k].mul(&tr[i]));
        }
        next[0] = next[0].add(&dd[i]);
        coeffs = next;
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{mi, mv, resultant, BiPoly, Nested};

    #[test]
    fn interpolation_recovers_cubic() {
        let t = sample_points(4);
        let f = |x: &BigInt| {
            let x = GaussRational::real(BigRational::from_integer(x.clone()));
            x.mul(&x).mul(&x).sub(&GaussRational::from_i64(2).mul(&x)).add(&GaussRational::from_ratio(1, 3))
        };
        let v: Vec<_> = t.iter().map(f).collect();
        let c = interpolate(&t, &v);
        assert_eq!(
            c,
            vec![
                GaussRational::from_ratio(1, 3),
                GaussRational::from_i64(-2),
                GaussRational::zero(),
                GaussRational::one()
            ]
        );
    }

    #[test]
    fn agrees_with_symbolic_bareiss() {
        let (x, y, z) = (mv(Var::X), mv(Var::Y), mv(Var::Z));
        let p = &x * &x * &y + &z * &x - mi(3) * &y.pow(2) + &z;
        let q = mi(2) * &x.pow(3) - &y * &z * &x + &z.pow(2) - mi(1);
        let fast = resultant_multi(&p, &q, Var::X).unwrap();
        let order = [Var::X, Var::Y, Var::Z];
        let pp: crate::poly::Poly<BiPoly> = p.nest(&order);
        let qq: crate::poly::Poly<BiPoly> = q.nest(&order);
        let slow = resultant(&pp, &qq, Var::X).unwrap();
        assert_eq!(fast, slow.to_multi());
    }
}
