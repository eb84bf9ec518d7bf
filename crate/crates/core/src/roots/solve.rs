use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TimfError};
use crate::poly::CPoly;

const EPS: f64 = f64::EPSILON;

/// Tolerances and seed for [`all_roots`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootOptions {
    /// Bound on `|p(r)| / sum_k |c_k| |r|^k`.
    pub tau_resid: f64,
    pub max_iter: usize,
    /// Seed for the perturbation of the starting circles.
    pub seed: u64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { tau_resid: 1e-10, max_iter: 800, seed: 0x5eed }
    }
}

/// All roots of one polynomial with their residuals.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub poly: CPoly,
    pub roots: Vec<Complex64>,
    /// `|p(root)|`.
    pub residuals: Vec<f64>,
    /// Cluster label per root; equal labels mark one multiple root.
    pub labels: Vec<usize>,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Residual relative to the coefficient scale at each root.
    pub fn relative_residuals(&self) -> Vec<f64> {
        let c = self.poly.coeffs();
        self.roots
            .iter()
            .zip(&self.residuals)
            .map(|(r, res)| res / abs_scale(c, r.norm()).max(f64::MIN_POSITIVE))
            .collect()
    }
}

pub(crate) fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// `sum_k |c_k| r^k`, the natural size of rounding errors in `p(z)` at `|z| = r`.
pub(crate) fn abs_scale(c: &[Complex64], r: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * r + a.norm())
}

/// Starting points on circles whose radii come from the upper convex hull of `log|c_k|`.
fn initial_guesses(c: &[Complex64], rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let n = c.len() - 1;
    let pts: Vec<(usize, f64)> =
        c.iter().enumerate().filter(|(_, a)| a.norm() > 0.0).map(|(k, a)| (k, a.norm().ln())).collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (k1, l1) = hull[hull.len() - 2];
            let (k2, l2) = hull[hull.len() - 1];
            // Drop the middle point unless it lies strictly above the chord.
            if (l2 - l1) * (p.0 - k1) as f64 <= (p.1 - l1) * (k2 - k1) as f64 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let offset = rng.random::<f64>() * std::f64::consts::TAU;
    let mut out = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (k0, l0) = w[0];
        let (k1, l1) = w[1];
        let m = k1 - k0;
        let radius = ((l0 - l1) / m as f64).exp();
        for j in 0..m {
            let jitter = 1.0 + 0.05 * (rng.random::<f64>() - 0.5);
            let ang = std::f64::consts::TAU * (j as f64 / m as f64) + offset + 0.7 * out.len() as f64 / n as f64;
            out.push(Complex64::from_polar(radius * jitter, ang));
        }
    }
    out
}

/// All roots by Aberth-Ehrlich simultaneous iteration followed by Newton polishing.
///
/// Exact zero roots (vanishing low coefficients) are returned as exact zeros.
pub fn all_roots(p: &CPoly, opts: &RootOptions) -> Result<RootSet> {
    let deg = p.degree().unwrap_or(0);
    if deg == 0 {
        return Err(TimfError::DegreeTooLow { degree: deg, min: 1 });
    }
    let all = p.coeffs();
    let zeros = all.iter().take_while(|a| a.norm() == 0.0).count();
    let c = &all[zeros..];
    let n = c.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if n > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (deg as u64).wrapping_mul(0x9e37_79b9));
        let mut z = initial_guesses(c, &mut rng);
        let mut done = vec![false; n];
        for _ in 0..opts.max_iter {
            let mut all_done = true;
            for i in 0..n {
                if done[i] {
                    continue;
                }
                let (pv, dp) = horner(c, z[i]);
                let noise = 4.0 * EPS * n as f64 * abs_scale(c, z[i].norm());
                if pv.norm() <= noise {
                    done[i] = true;
                    continue;
                }
                let ratio = pv / dp;
                let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
                let w = ratio / (1.0 - ratio * s);
                if !w.is_finite() {
                    continue;
                }
                z[i] -= w;
                if w.norm() <= 2.0 * EPS * z[i].norm() {
                    done[i] = true;
                } else {
                    all_done = false;
                }
            }
            if all_done {
                break;
            }
        }
        for r in z.iter_mut() {
            *r = newton_polish(c, *r, 4);
        }
        roots.extend(z);
    }
    let residuals: Vec<f64> = roots.iter().map(|r| horner(all, *r).0.norm()).collect();
    let labels = (0..roots.len()).collect();
    let rs = RootSet { poly: p.clone(), roots, residuals, labels };
    let worst = rs.relative_residuals().into_iter().fold(0.0, f64::max);
    if worst.is_nan() || worst > opts.tau_resid {
        return Err(TimfError::NoConvergence { iterations: opts.max_iter, worst_residual: worst });
    }
    Ok(rs)
}

/// Newton steps that are only kept while they reduce the residual.
pub(crate) fn newton_polish(c: &[Complex64], mut r: Complex64, steps: usize) -> Complex64 {
    let mut res = horner(c, r).0.norm();
    for _ in 0..steps {
        let (pv, dp) = horner(c, r);
        if dp.norm() == 0.0 {
            break;
        }
        let cand = r - pv / dp;
        let cres = horner(c, cand).0.norm();
        if cand.is_finite() && cres < res {
            r = cand;
            res = cres;
        } else {
            break;
        }
    }
    r
}
