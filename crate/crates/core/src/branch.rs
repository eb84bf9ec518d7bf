//! Solution branches common to both models and their physicality tests.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TimfError};
use crate::poly::CPoly;
use crate::roots::{all_roots, assign, linear_path, track, RootOptions, TrackOptions};

/// Physicality flags of one solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchFlags {
    pub re_x_pos: bool,
    pub re_y_pos: bool,
    pub im_d_neg: bool,
    /// `x = y` within tolerance.
    pub symmetric: bool,
}

/// One self-consistent solution at energy `z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub z: Complex64,
    pub x: Complex64,
    pub y: Complex64,
    pub eta1: Complex64,
    pub eta2: Complex64,
    pub d: Complex64,
    pub flags: BranchFlags,
    /// `max(|r1|, |r2|)` relative to the size of the terms of each equation.
    pub residual: f64,
}

/// Outcome of [`classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhysicalityReport {
    pub re_x_pos: bool,
    pub re_y_pos: bool,
    /// Checked only when `Im z > 0`.
    pub im_d_neg: Option<bool>,
    /// Checked only for real negative `z`.
    pub re_d_neg: Option<bool>,
    /// Branch-level `D -> 0` test, when available.
    pub decays: Option<bool>,
    pub physical: bool,
}

/// Operations shared by both models.
pub trait TimfModel: Sync {
    /// Inverse-mass coefficients `(a1, a2)`.
    fn masses(&self) -> (f64, f64);
    /// Degree-7 x-resultant evaluated at `z`.
    fn x_family(&self, z: Complex64) -> CPoly;
    /// Degree-7 y-resultant evaluated at `z`.
    fn y_family(&self, z: Complex64) -> CPoly;
    /// Degree-7 amplitude condition evaluated at `z`.
    fn d_family(&self, z: Complex64) -> CPoly;
    /// Left-hand sides of the two stationarity equations, with the size of their terms.
    fn residual(&self, x: Complex64, y: Complex64, z: Complex64) -> ((Complex64, Complex64), f64);
    fn y_of_x(&self, x: Complex64, z: Complex64) -> Result<Complex64>;
    fn x_of_y(&self, y: Complex64, z: Complex64) -> Result<Complex64>;
    /// Amplitude from the saddle-point value of the functional.
    fn amplitude(&self, x: Complex64, y: Complex64, z: Complex64) -> Result<Complex64>;
    /// Amplitude from the relation linear in `D` after elimination of `y`.
    fn amplitude_of_x(&self, x: Complex64, z: Complex64) -> Result<Complex64>;

    /// Every solution at `z`, one per root of the x-resultant.
    fn branch_points(&self, z: Complex64, opts: &RootOptions) -> Result<Vec<BranchPoint>> {
        let xs = all_roots(&self.x_family(z), opts)?.roots;
        let mut ys_side: Option<Vec<Complex64>> = None;
        xs.iter()
            .map(|&x| {
                let y = match self.y_of_x(x, z) {
                    Ok(y) => y,
                    Err(TimfError::DenominatorVanishes) => {
                        // Pole of the solvent: pick the y-side root that completes the pair.
                        if ys_side.is_none() {
                            ys_side = Some(all_roots(&self.y_family(z), opts)?.roots);
                        }
                        let cands = ys_side.as_ref().unwrap();
                        *cands
                            .iter()
                            .min_by(|a, b| {
                                let ra = self.residual(x, **a, z).0;
                                let rb = self.residual(x, **b, z).0;
                                (ra.0.norm() + ra.1.norm()).total_cmp(&(rb.0.norm() + rb.1.norm()))
                            })
                            .unwrap()
                    }
                    Err(e) => return Err(e),
                };
                self.point(x, y, z)
            })
            .collect()
    }

    /// Builds the branch point for a solved pair.
    fn point(&self, x: Complex64, y: Complex64, z: Complex64) -> Result<BranchPoint> {
        let (a1, a2) = self.masses();
        let d = match self.amplitude_of_x(x, z) {
            Ok(d) => d,
            Err(_) => self.amplitude(x, y, z)?,
        };
        let ((r1, r2), scale) = self.residual(x, y, z);
        let sym = (x - y).norm() <= 1e-8 * x.norm().max(1.0);
        Ok(BranchPoint {
            z,
            x,
            y,
            eta1: -a1 * x * x,
            eta2: -a2 * y * y,
            d,
            flags: BranchFlags { re_x_pos: x.re > 0.0, re_y_pos: y.re > 0.0, im_d_neg: d.im < 0.0, symmetric: sym },
            residual: r1.norm().max(r2.norm()) / scale.max(f64::MIN_POSITIVE),
        })
    }
}

/// Applies the sheet conditions to one solution; `decays` is the branch-level limit test.
pub fn classify(bp: &BranchPoint, decays: Option<bool>) -> PhysicalityReport {
    let im_d_neg = (bp.z.im > 0.0).then_some(bp.d.im < 0.0);
    let re_d_neg = (bp.z.im == 0.0 && bp.z.re < 0.0).then_some(bp.d.re < 0.0);
    let physical = bp.x.re > 0.0
        && bp.y.re > 0.0
        && im_d_neg.unwrap_or(true)
        && re_d_neg.unwrap_or(true)
        && decays.unwrap_or(true);
    PhysicalityReport { re_x_pos: bp.x.re > 0.0, re_y_pos: bp.y.re > 0.0, im_d_neg, re_d_neg, decays, physical }
}

/// Settings of the branch-level decay test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayProbe {
    /// Branches are followed horizontally to `Re z = +-reach`.
    pub reach: f64,
    pub steps: usize,
    /// A branch decays when `|z D - 1| < tol` at both ends.
    pub tol: f64,
}

impl Default for DecayProbe {
    fn default() -> Self {
        DecayProbe { reach: 1000.0, steps: 800, tol: 0.5 }
    }
}

/// For each amplitude root at `z` (in solver order of `d_family(z)`), whether the branch
/// behaves as `1/z` at both horizontal ends. Returns the roots and the flags.
pub fn decay_flags<M: TimfModel + ?Sized>(
    model: &M,
    z: Complex64,
    probe: &DecayProbe,
    opts: &TrackOptions,
) -> Result<(Vec<Complex64>, Vec<bool>)> {
    let d0 = all_roots(&model.d_family(z), &opts.roots)?.roots;
    let mut ok = vec![true; d0.len()];
    for end in [-probe.reach, probe.reach] {
        let target = Complex64::new(end, z.im);
        let path = stretched_path(z, target, probe.steps);
        let tr = track(&path, |w| model.d_family(w), Some(&d0), opts)?;
        for (k, t) in tr.trajectories.iter().enumerate() {
            if (target * t.last() - 1.0).norm() >= probe.tol {
                ok[k] = false;
            }
        }
    }
    Ok((d0, ok))
}

/// Path from `a` to `b` with samples denser near `a`: uniform in `asinh` of the real offset.
pub fn stretched_path(a: Complex64, b: Complex64, steps: usize) -> Vec<Complex64> {
    let span = b.re - a.re;
    let s = span.abs().asinh();
    linear_path(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), steps)
        .into_iter()
        .map(|t| {
            let off = (t.re * s).sinh() * span.signum();
            Complex64::new(a.re + off, a.im + (b.im - a.im) * t.re)
        })
        .collect()
}

/// Decay flags transferred from amplitude roots to branch points by closest amplitude.
pub fn decay_for_points(points: &[BranchPoint], d_roots: &[Complex64], flags: &[bool]) -> Vec<bool> {
    let ds: Vec<Complex64> = points.iter().map(|p| p.d).collect();
    let (perm, _, _) = assign(&ds, d_roots);
    perm.iter().map(|&j| flags[j]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stretched_path_hits_both_ends() {
        let a = Complex64::new(-1.0, 0.2);
        let b = Complex64::new(1000.0, 0.2);
        let p = stretched_path(a, b, 50);
        assert!((p[0] - a).norm() < 1e-12);
        assert!((p[49] - b).norm() < 1e-9);
        assert!(p.windows(2).all(|w| w[1].re > w[0].re));
    }
}
