//! Damped self-consistent iteration of the mean-field energies, independent of elimination.
//!
//! With `m_j(eta_j) = I_j / (dI_j / deta_j)` each equation reads `eta_i = z - eta_j - m_j(eta_j)`.
//! Iterates stay on the retarded sheet: `x = sqrt(-eta / a)` with `Re x > 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::branch::TimfModel;
use crate::error::{Result, TimfError};
use crate::model_bound::ModelBound;
use crate::model_free::ModelFree;
use crate::roots::{all_roots, RootOptions};

type C = Complex64;

/// Iterates closer than this to a one-body singularity are rejected.
pub const SPECTRUM_TOL: f64 = 1e-12;
/// Entries kept in the trace of a failed run.
const TRACE_LEN: usize = 64;

/// The per-particle mismatch functions of a model.
pub trait SelfConsistent: TimfModel {
    /// `m_j` as a function of the pseudo-momentum `x_j`.
    fn mismatch_of(&self, particle: usize, x: C) -> C;
    /// Energies at which particle `j`'s dressed propagator has a pole.
    fn poles(&self, _particle: usize) -> Vec<f64> {
        Vec::new()
    }
}

/// `m = 2 a x^2 (x + g) / (2 x + g)` for a free particle.
fn free_mismatch(a: f64, g: f64, x: C) -> C {
    2.0 * a * x * x * (x + g) / (2.0 * x + g)
}

impl SelfConsistent for ModelFree {
    fn mismatch_of(&self, particle: usize, x: C) -> C {
        let p = &self.params;
        match particle {
            0 => free_mismatch(p.a1, p.gamma1, x),
            _ => free_mismatch(p.a2, p.gamma2, x),
        }
    }
}

impl SelfConsistent for ModelBound {
    /// Particle 1 is dressed: `m1 = 2 x (a1 x (x + g1) - lambda) / (2 x + g1)`.
    fn mismatch_of(&self, particle: usize, x: C) -> C {
        let p = &self.params;
        match particle {
            0 => 2.0 * x * (p.a1 * x * (x + p.gamma1) - p.lambda) / (2.0 * x + p.gamma1),
            _ => free_mismatch(p.a2, p.gamma2, x),
        }
    }

    fn poles(&self, particle: usize) -> Vec<f64> {
        match (particle, self.bound_states()) {
            (0, Ok(b)) => vec![b.physical.eta0],
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointOptions {
    /// `eta <- (1 - damping) eta + damping rhs`, in `(0, 1]`.
    pub damping: f64,
    pub max_iter: usize,
    /// Convergence when `|delta eta| <= step_tol * max(1, |eta|)` for both particles.
    pub step_tol: f64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions { damping: 0.5, max_iter: 20_000, step_tol: 1e-12 }
    }
}

/// A converged solution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub z: C,
    pub eta1: C,
    pub eta2: C,
    pub x: C,
    pub y: C,
    pub d: C,
    pub iterations: usize,
    /// Relative residual of the x-resultant at `x`.
    pub x_residual: f64,
    /// Relative residual of the y-resultant at `y`.
    pub y_residual: f64,
    /// Distance from `x` to the nearest root of the x-resultant.
    pub root_distance: f64,
}

/// Pseudo-momentum on the retarded sheet.
fn momentum(eta: C, a: f64) -> C {
    (-eta / a).sqrt()
}

fn relative_residual(p: &crate::poly::CPoly, r: C) -> f64 {
    let c = p.coeffs();
    let (mut v, mut s) = (C::new(0.0, 0.0), 0.0);
    for k in (0..c.len()).rev() {
        v = v * r + c[k];
        s = s * r.norm() + c[k].norm();
    }
    v.norm() / s.max(f64::MIN_POSITIVE)
}

fn hits_spectrum<M: SelfConsistent + ?Sized>(m: &M, eta: [C; 2]) -> bool {
    (0..2).any(|j| {
        let on_cut = eta[j].im.abs() <= SPECTRUM_TOL && eta[j].re >= -SPECTRUM_TOL;
        on_cut || m.poles(j).iter().any(|&e| (eta[j] - e).norm() <= SPECTRUM_TOL)
    })
}

/// Iterates the two mean-field equations from `init` until the energies stop moving.
pub fn timf_fixed_point<M: SelfConsistent + ?Sized>(
    m: &M,
    z: C,
    init: (C, C),
    opts: &FixedPointOptions,
) -> Result<FixedPoint> {
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(TimfError::InvalidParams(format!("damping must lie in (0, 1], got {}", opts.damping)));
    }
    let (a1, a2) = m.masses();
    let mut eta = [init.0, init.1];
    if hits_spectrum(m, eta) {
        return Err(TimfError::SpectrumHit);
    }
    let mut trace = Vec::with_capacity(TRACE_LEN);
    let mut step = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let x = [momentum(eta[0], a1), momentum(eta[1], a2)];
        let rhs = [z - eta[1] - m.mismatch_of(1, x[1]), z - eta[0] - m.mismatch_of(0, x[0])];
        let next = [0, 1].map(|i| eta[i] + opts.damping * (rhs[i] - eta[i]));
        if !(next[0].is_finite() && next[1].is_finite()) || hits_spectrum(m, next) {
            return Err(TimfError::SpectrumHit);
        }
        step = (0..2).map(|i| (next[i] - eta[i]).norm() / eta[i].norm().max(1.0)).fold(0.0, f64::max);
        eta = next;
        if trace.len() == TRACE_LEN {
            trace.remove(0);
        }
        trace.push((eta[0], eta[1]));
        if step <= opts.step_tol {
            return finish(m, z, eta, it);
        }
    }
    Err(TimfError::MaxIterations { iterations: opts.max_iter, last_step: step, trace })
}

fn finish<M: SelfConsistent + ?Sized>(m: &M, z: C, eta: [C; 2], iterations: usize) -> Result<FixedPoint> {
    let (a1, a2) = m.masses();
    let (x, y) = (momentum(eta[0], a1), momentum(eta[1], a2));
    let d = m.amplitude(x, y, z)?;
    let px = m.x_family(z);
    let roots = all_roots(&px, &RootOptions::default())?.roots;
    let root_distance = roots.iter().map(|r| (r - x).norm()).fold(f64::INFINITY, f64::min);
    Ok(FixedPoint {
        z,
        eta1: eta[0],
        eta2: eta[1],
        x,
        y,
        d,
        iterations,
        x_residual: relative_residual(&px, x),
        y_residual: relative_residual(&m.y_family(z), y),
        root_distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::classify;
    use crate::roots::TrackOptions;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn free_symmetric_real_solution() {
        let m = ModelFree::unit().unwrap();
        let f =
            timf_fixed_point(&m, c(-2.0, 0.0), (c(-1.0, 0.0), c(-1.0, 0.0)), &FixedPointOptions::default()).unwrap();
        // x = y solves x^3 - 2x - 1 = 0: the golden ratio.
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((f.x - golden).norm() < 1e-10 && (f.y - golden).norm() < 1e-10, "{f:?}");
        assert!(f.x_residual < 1e-8 && f.y_residual < 1e-8 && f.root_distance < 1e-8);
        assert!(f.d.im.abs() < 1e-12 && f.d.re < 0.0);
    }

    #[test]
    fn bound_reaches_the_physical_branch() {
        let m = ModelBound::reference().unwrap();
        let z = c(-1.0, 1.0);
        let f = timf_fixed_point(&m, z, (c(-1.0, 0.1), c(-0.1, 0.1)), &FixedPointOptions::default()).unwrap();
        assert!(f.x_residual < 1e-8 && f.root_distance < 1e-8, "{f:?}");
        let pts = m.branch_points(z, &TrackOptions::default().roots).unwrap();
        let near = pts.iter().min_by(|a, b| (a.d - f.d).norm().total_cmp(&(b.d - f.d).norm())).unwrap();
        assert!((near.d - f.d).norm() < 1e-8 && (near.x - f.x).norm() < 1e-8);
        assert!(classify(near, None).physical, "{near:?}");
    }

    #[test]
    fn damping_does_not_move_the_fixed_point() {
        let m = ModelFree::new(crate::params::ModelFreeParams::new(1.0, 2.0, 1.0, 0.5)).unwrap();
        let z = c(-1.5, 0.4);
        let init = (c(-1.0, 0.1), c(-1.0, 0.1));
        let slow = timf_fixed_point(&m, z, init, &FixedPointOptions { damping: 0.3, ..Default::default() }).unwrap();
        let fast = timf_fixed_point(&m, z, init, &FixedPointOptions { damping: 0.8, ..Default::default() }).unwrap();
        assert!((slow.eta1 - fast.eta1).norm() < 1e-10 && (slow.eta2 - fast.eta2).norm() < 1e-10);
    }

    #[test]
    fn failures_are_reported() {
        let m = ModelFree::unit().unwrap();
        let z = c(-2.0, 0.0);
        let r = timf_fixed_point(&m, z, (c(1.0, 0.0), c(-1.0, 0.0)), &FixedPointOptions::default());
        assert!(matches!(r, Err(TimfError::SpectrumHit)));
        let r = timf_fixed_point(
            &m,
            z,
            (c(-1.0, 0.0), c(-1.0, 0.0)),
            &FixedPointOptions { max_iter: 3, ..Default::default() },
        );
        match r {
            Err(TimfError::MaxIterations { iterations, trace, .. }) => assert!(iterations == 3 && trace.len() == 3),
            other => panic!("{other:?}"),
        }
        let b = ModelBound::reference().unwrap();
        assert!(matches!(
            timf_fixed_point(&b, z, (c(-1.0, 0.0), c(-1.0, 0.0)), &FixedPointOptions::default()),
            Err(TimfError::SpectrumHit)
        ));
        assert!(timf_fixed_point(
            &m,
            z,
            (c(-1.0, 0.0), c(-1.0, 0.0)),
            &FixedPointOptions { damping: 0.0, ..Default::default() }
        )
        .is_err());
    }
}
