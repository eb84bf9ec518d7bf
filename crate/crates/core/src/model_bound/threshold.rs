//! Behaviour of the second model near its thresholds, at the reference parameters
//! `a1 = gamma1 = gamma2 = 1`, `a2 = lambda = 2` unless a model is passed in.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ModelBound;
use crate::branch::{stretched_path, DecayProbe, TimfModel};
use crate::error::{Result, TimfError};
use crate::poly::{CPoly, Var};
use crate::roots::{all_roots, assign, linear_path, track, TrackOptions};

type C = Complex64;

/// Half-width of the expansion windows around `z = -1` and `z = -4`.
pub const LOCAL_WINDOW: f64 = 0.05;
/// Relative bisection tolerance on `Im z` for the border curve.
pub const BORDER_TOL: f64 = 1e-6;
/// Largest `Im z` searched for the border.
pub const BORDER_CAP: f64 = 4.0;

/// Leading-order predictions near the physical one-body threshold `z = -1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalThreshold {
    pub z: C,
    /// `Z = z + 1`.
    pub offset: C,
    /// Reciprocal amplitudes `d = +-3 sqrt(-Z) / sqrt 2`.
    pub d: [C; 2],
    /// `y` through fifth order in `Z' = sqrt(Z / 2)`, for `Z'` and `-Z'`.
    pub y: [C; 2],
    /// `x = 1 + 2 y^2`.
    pub x: [C; 2],
}

fn window(z: C, centre: f64) -> Result<C> {
    let off = z - centre;
    if off.norm() > LOCAL_WINDOW {
        return Err(TimfError::OutsideWindow { distance: off.norm(), window: LOCAL_WINDOW });
    }
    Ok(off)
}

/// `y = i Z' - (i/3) Z'^3 - (2/3) Z'^4 + (13 i / 18) Z'^5`, truncated after `order`.
pub fn y_series(zp: C, order: u32) -> C {
    let i = C::i();
    let terms = [(1, i), (3, -i / 3.0), (4, C::new(-2.0 / 3.0, 0.0)), (5, i * 13.0 / 18.0)];
    terms.iter().filter(|(k, _)| *k <= order).map(|&(k, c)| c * zp.powu(k)).sum()
}

pub fn local_threshold(z: C) -> Result<LocalThreshold> {
    let big = window(z, -1.0)?;
    let d0 = 3.0 * (-big).sqrt() / 2f64.sqrt();
    let zp = (big / 2.0).sqrt();
    let y = [y_series(zp, 5), y_series(-zp, 5)];
    Ok(LocalThreshold { z, offset: big, d: [d0, -d0], y, x: [1.0 + 2.0 * y[0] * y[0], 1.0 + 2.0 * y[1] * y[1]] })
}

/// `d = +-3 (-4 - z)^(1/2) / (2 sqrt 2)` near the unphysical threshold `z = -4`.
pub fn unphysical_threshold(z: C) -> Result<[C; 2]> {
    let off = window(z, -4.0)?;
    let d0 = 3.0 * (-off).sqrt() / (2.0 * 2f64.sqrt());
    Ok([d0, -d0])
}

/// `|v| ~ prefactor * t^exponent` by least squares in log-log.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub prefactor: f64,
}

pub fn fit_power(t: &[f64], v: &[f64]) -> PowerFit {
    let n = t.len() as f64;
    let lx: Vec<f64> = t.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = v.iter().map(|x| x.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let exponent = sxy / sxx;
    PowerFit { exponent, prefactor: (my - exponent * mx).exp() }
}

/// Log-spaced offsets `10^lo ..= 10^hi`.
pub fn log_offsets(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / (n - 1) as f64)).collect()
}

/// Reciprocal amplitudes `d = 1/D`, all seven, at `z`.
pub fn reciprocal_roots(m: &ModelBound, z: C, opts: &TrackOptions) -> Result<Vec<C>> {
    let mut c = m.d_family(z).coeffs().to_vec();
    c.resize(8, C::new(0.0, 0.0));
    c.reverse();
    Ok(all_roots(&CPoly::new(Var::Dr, c), &opts.roots)?.roots)
}

/// Fits the two smallest reciprocal roots at `z = centre - t` against `t`.
pub fn reciprocal_fit(m: &ModelBound, centre: f64, offsets: &[f64], opts: &TrackOptions) -> Result<PowerFit> {
    let mut v = Vec::with_capacity(offsets.len());
    for &t in offsets {
        let mut d = reciprocal_roots(m, C::new(centre - t, 0.0), opts)?;
        d.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        v.push(0.5 * (d[0].norm() + d[1].norm()));
    }
    Ok(fit_power(offsets, &v))
}

/// Largest `|z + 1|` for [`threshold_pair`]; a real branch point of the y-resultant lies at
/// `z = -1.2156`.
pub const PAIR_WINDOW: f64 = 0.2;

/// The two `y` roots that vanish at `z = -1`, continued from the real pair `+-sqrt(-Z/2)` below
/// the threshold along a half circle around it (upper half plane unless `Im z < 0`).
pub fn threshold_pair(m: &ModelBound, z: C, opts: &TrackOptions) -> Result<[C; 2]> {
    let off = z + 1.0;
    let r = off.norm();
    if r > PAIR_WINDOW {
        return Err(TimfError::OutsideWindow { distance: r, window: PAIR_WINDOW });
    }
    let phi1 = off.arg();
    let phi0 = if phi1 < 0.0 { -std::f64::consts::PI } else { std::f64::consts::PI };
    let steps = 200;
    let path: Vec<C> =
        (0..steps).map(|k| -1.0 + C::from_polar(r, phi0 + (phi1 - phi0) * k as f64 / (steps - 1) as f64)).collect();
    pair_along(m, &path, opts)
}

fn pair_along(m: &ModelBound, path: &[C], opts: &TrackOptions) -> Result<[C; 2]> {
    let z0 = path[0];
    let s = ((-(z0 + 1.0)) / 2.0).sqrt();
    let roots = all_roots(&m.y_family(z0), &opts.roots)?.roots;
    let pick =
        |t: C| (0..roots.len()).min_by(|&a, &b| (roots[a] - t).norm().total_cmp(&(roots[b] - t).norm())).unwrap();
    let ids = [pick(s), pick(-s)];
    let tr = track(path, |w| m.y_family(w), Some(&roots), opts)?;
    Ok([tr.trajectories[ids[0]].last(), tr.trajectories[ids[1]].last()])
}

/// One point of the border above which a near-threshold root reaches `Re y > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorderPoint {
    pub re_z: f64,
    pub im_z: f64,
    /// `sqrt((2/9) (Re z + 1)^5)`.
    pub leading_order: f64,
}

/// For each `Re z` in `(-1, 0)`, the smallest `Im z > 0` at which one of the two roots of
/// [`threshold_pair`] has `Re y > 0`.
///
/// The border is marched in `Re z` from the threshold. Between stations the pair is carried at half
/// the last border height, so it never leaves the region under the curve: a branch point of the
/// y-resultant sits just above the real axis near `z = -0.41`, and continuing along the axis
/// itself would swap one root of the pair with a neighbour.
pub fn border_curve(m: &ModelBound, re_z: &[f64], opts: &TrackOptions) -> Result<Vec<BorderPoint>> {
    const START: f64 = 1e-6;
    const MAX_STRIDE: f64 = 0.01;
    for &re in re_z {
        if !(re > -1.0 + START && re < 0.0) {
            return Err(TimfError::InvalidParams(format!("border needs -1 < Re z < 0, got {re}")));
        }
    }
    let mut order: Vec<usize> = (0..re_z.len()).collect();
    order.sort_by(|&a, &b| re_z[a].total_cmp(&re_z[b]));
    let mut here = C::new(-1.0 + START, 0.0);
    let mut pair = threshold_pair(m, here, opts)?;
    let mut found = vec![0.0; re_z.len()];
    for &k in &order {
        let target = re_z[k];
        let n = ((target - here.re) / MAX_STRIDE).ceil().max(1.0) as usize;
        let stations: Vec<f64> = (1..=n).map(|s| here.re + (target - here.re) * s as f64 / n as f64).collect();
        for re in stations {
            let base = C::new(re, here.im);
            pair = continue_pair(m, &linear_path(here, base, 40), pair, opts)?;
            let im = border_at(m, base, pair, opts)?;
            let next = C::new(re, 0.5 * im);
            pair = continue_pair(m, &linear_path(base, next, 40), pair, opts)?;
            here = next;
        }
        found[k] = 2.0 * here.im;
    }
    Ok(re_z
        .iter()
        .zip(found)
        .map(|(&re, im)| BorderPoint { re_z: re, im_z: im, leading_order: (2.0 / 9.0 * (re + 1.0).powi(5)).sqrt() })
        .collect())
}

/// Bisects in `Im z` on the vertical through `base`, where the pair is known.
fn border_at(m: &ModelBound, base: C, pair: [C; 2], opts: &TrackOptions) -> Result<f64> {
    let above = |im: f64| -> Result<bool> {
        let path = linear_path(base, C::new(base.re, im), 60);
        let [a, b] = continue_pair(m, &path, pair, opts)?;
        Ok(a.re.max(b.re) > 0.0)
    };
    let (mut lo, mut hi);
    if pair[0].re.max(pair[1].re) > 0.0 {
        // Already above: walk down towards the axis.
        hi = base.im;
        lo = 0.5 * hi;
        while above(lo)? {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-300 {
                return Ok(0.0);
            }
        }
    } else {
        lo = base.im;
        hi = if base.im > 0.0 { 1.5 * base.im } else { 1e-14 };
        while !above(hi)? {
            lo = hi;
            hi *= 1.5;
            if hi > BORDER_CAP {
                return Err(TimfError::BracketFailure { re_z: base.re, cap: BORDER_CAP });
            }
        }
    }
    while hi - lo > BORDER_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if above(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// The pair of [`threshold_pair`] carried along the real axis above the threshold, at each
/// `Z = z + 1` in `(0, 1)`.
pub fn pair_on_axis(m: &ModelBound, big: &[f64], opts: &TrackOptions) -> Result<Vec<[C; 2]>> {
    const START: f64 = 1e-6;
    let mut order: Vec<usize> = (0..big.len()).collect();
    order.sort_by(|&a, &b| big[a].total_cmp(&big[b]));
    let mut here = C::new(-1.0 + START, 0.0);
    let mut pair = threshold_pair(m, here, opts)?;
    let mut out = vec![pair; big.len()];
    for &k in &order {
        if !(big[k] >= START && big[k] < 1.0) {
            return Err(TimfError::InvalidParams(format!("axis pair needs 0 < Z < 1, got {}", big[k])));
        }
        let next = C::new(-1.0 + big[k], 0.0);
        let n = (((next.re - here.re) / 0.001).ceil() as usize).max(2);
        pair = continue_pair(m, &linear_path(here, next, n), pair, opts)?;
        here = next;
        out[k] = pair;
    }
    Ok(out)
}

/// Continues two labelled `y` roots along `path`.
fn continue_pair(m: &ModelBound, path: &[C], pair: [C; 2], opts: &TrackOptions) -> Result<[C; 2]> {
    let roots = all_roots(&m.y_family(path[0]), &opts.roots)?.roots;
    let (perm, _, _) = assign(&pair, &roots);
    let tr = track(path, |w| m.y_family(w), Some(&roots), opts)?;
    Ok([tr.trajectories[perm[0]].last(), tr.trajectories[perm[1]].last()])
}

/// Amplitude branches followed along a horizontal line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineBranch {
    pub id: usize,
    pub start: C,
    pub end: C,
    pub max_im_d: f64,
    pub decays_left: bool,
    pub decays_right: bool,
}

impl LineBranch {
    pub fn physical(&self) -> bool {
        self.max_im_d < 0.0 && self.decays_left && self.decays_right
    }
}

/// Tracks the seven amplitude roots along `z = t + i im`, `t` from `t0` to `t1`, then follows each
/// from both ends out to `Re z = -+probe.reach` to test `z D -> 1`.
pub fn line_branches<M: TimfModel + ?Sized>(
    m: &M,
    im: f64,
    t0: f64,
    t1: f64,
    steps: usize,
    probe: &DecayProbe,
    opts: &TrackOptions,
) -> Result<Vec<LineBranch>> {
    let path = linear_path(C::new(t0, im), C::new(t1, im), steps);
    let main = track(&path, |w| m.d_family(w), None, opts)?;
    let starts: Vec<C> = main.trajectories.iter().map(|t| t.roots[0]).collect();
    let ends: Vec<C> = main.trajectories.iter().map(|t| t.last()).collect();
    let decays = |from: C, seed: &[C], to: f64| -> Result<Vec<bool>> {
        let target = C::new(to, im);
        let tr = track(&stretched_path(from, target, probe.steps), |w| m.d_family(w), Some(seed), opts)?;
        // Seeds come back in the order given.
        Ok(tr.trajectories.iter().map(|t| (target * t.last() - 1.0).norm() < probe.tol).collect())
    };
    let left = decays(path[0], &starts, -probe.reach)?;
    let right = decays(*path.last().unwrap(), &ends, probe.reach)?;
    Ok(main
        .trajectories
        .iter()
        .enumerate()
        .map(|(k, t)| LineBranch {
            id: t.id,
            start: t.roots[0],
            end: t.last(),
            max_im_d: t.roots.iter().map(|d| d.im).fold(f64::NEG_INFINITY, f64::max),
            decays_left: left[k],
            decays_right: right[k],
        })
        .collect())
}

/// The finite physical amplitude near `z = -1`, reached by continuation down from `-1 + 0.5 i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteBranch {
    /// `(Im z, D)` along the descent, ending at the requested `Im z`.
    pub samples: Vec<(f64, C)>,
    pub d: C,
    /// The other physical branch at the same point, which diverges as `Im z -> 0`.
    pub diverging: Option<C>,
}

/// Physical here means the line criterion: `Im D < 0` along the whole descent and `z D -> 1` at both
/// horizontal ends from the starting point.
pub fn finite_physical_branch(
    m: &ModelBound,
    im_end: f64,
    probe: &DecayProbe,
    opts: &TrackOptions,
) -> Result<FiniteBranch> {
    let z0 = C::new(-1.0, 0.5);
    let (d0, decays) = crate::branch::decay_flags(m, z0, probe, opts)?;
    let ims = log_offsets(im_end.log10(), 0.5f64.log10(), 300);
    let path: Vec<C> = ims.iter().rev().map(|&im| C::new(-1.0, im)).collect();
    let tr = track(&path, |w| m.d_family(w), Some(&d0), opts)?;
    let mut cands: Vec<usize> =
        (0..d0.len()).filter(|&k| decays[k] && tr.trajectories[k].roots.iter().all(|d| d.im < 0.0)).collect();
    cands.sort_by(|&a, &b| tr.trajectories[a].last().norm().total_cmp(&tr.trajectories[b].last().norm()));
    let Some(&best) = cands.first() else {
        return Err(TimfError::InvalidParams("no physical branch at z = -1 + 0.5i".into()));
    };
    let t = &tr.trajectories[best];
    let samples = t.z.iter().zip(&t.roots).map(|(z, d)| (z.im, *d)).collect();
    Ok(FiniteBranch { samples, d: t.last(), diverging: cands.get(1).map(|&k| tr.trajectories[k].last()) })
}

/// One sample of the approach to the one-body threshold from below.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproachSample {
    pub z: C,
    pub x: C,
    pub y: C,
    pub eta1: C,
    pub eta2: C,
    /// Per-particle mismatches; both equal `z - eta1 - eta2` at a solution.
    pub mismatch: [C; 2],
    /// Relative residual of the subtraction relation.
    pub subtraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproachReport {
    pub eta0: f64,
    pub samples: Vec<ApproachSample>,
    /// Largest relative difference between the two mismatches and `z - eta1 - eta2`.
    pub mismatch_spread: f64,
    pub max_subtraction: f64,
}

/// Follows the physical branch (`x -> x0`, `y -> 0+`) along real `z = eta0 - t` for the given
/// offsets, largest first.
pub fn approach_bound_state(m: &ModelBound, offsets: &[f64], opts: &TrackOptions) -> Result<ApproachReport> {
    let eta0 = m.bound_states()?.physical.eta0;
    let x0 = m.bound_states()?.physical.x0;
    let mut ts: Vec<f64> = offsets.to_vec();
    ts.sort_by(|a, b| b.total_cmp(a));
    let zs: Vec<C> = ts.iter().map(|&t| C::new(eta0 - t, 0.0)).collect();
    // Densify between the requested samples; keep their indices.
    let mut path = Vec::new();
    let mut keep = Vec::new();
    for w in 0..zs.len() {
        if w > 0 {
            let seg = log_segment(ts[w - 1], ts[w], 40);
            path.extend(seg.iter().map(|&t| C::new(eta0 - t, 0.0)));
        }
        keep.push(path.len());
        path.push(zs[w]);
    }
    // Tracked in y: the x roots of the two pairs with y -> +-0 merge, while the y roots stay apart.
    let ys0 = all_roots(&m.y_family(path[0]), &opts.roots)?.roots;
    let ys = (-(path[0] - eta0) / m.params.a2).sqrt();
    let score =
        |y: C| -> f64 { (y - ys).norm() + m.x_of_y(y, path[0]).map(|x| (x - x0).norm()).unwrap_or(f64::INFINITY) };
    let start = (0..ys0.len())
        .filter(|&k| ys0[k].re > 0.0)
        .min_by(|&a, &b| score(ys0[a]).total_cmp(&score(ys0[b])))
        .ok_or(TimfError::InvalidParams("no branch with Re y > 0 below the bound state".into()))?;
    let tr = track(&path, |w| m.y_family(w), Some(&ys0), opts)?;
    let t = &tr.trajectories[start];
    let mut samples = Vec::new();
    let (mut spread, mut worst) = (0.0f64, 0.0f64);
    for &k in &keep {
        let (z, y) = (path[k], t.roots[k]);
        let x = m.x_of_y(y, z)?;
        let bp = m.point(x, y, z)?;
        let mismatch = m.mismatches(x, y);
        let total = z - bp.eta1 - bp.eta2;
        let (l, r) = m.subtraction_sides(x, y);
        let sub = (l - r).norm() / (l.norm() + r.norm()).max(f64::MIN_POSITIVE);
        for mm in mismatch {
            spread = spread.max((mm - total).norm() / total.norm().max(f64::MIN_POSITIVE));
        }
        worst = worst.max(sub);
        samples.push(ApproachSample { z, x, y, eta1: bp.eta1, eta2: bp.eta2, mismatch, subtraction: sub });
    }
    Ok(ApproachReport { eta0, samples, mismatch_spread: spread, max_subtraction: worst })
}

fn log_segment(a: f64, b: f64, n: usize) -> Vec<f64> {
    (1..n).map(|k| (a.ln() + (b.ln() - a.ln()) * k as f64 / n as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn windows() {
        assert!(local_threshold(c(-1.2, 0.0)).is_err());
        assert!(unphysical_threshold(c(-3.9, 0.0)).is_err());
        let lt = local_threshold(c(-1.0 - 1e-4, 0.0)).unwrap();
        assert!((lt.d[0].re - 3e-2 / 2f64.sqrt()).abs() < 1e-12 && lt.d[0].im == 0.0);
        assert!((lt.y[0] - c(-(5e-5f64).sqrt(), 0.0)).norm() < 1e-5);
    }

    #[test]
    fn power_fit_exact() {
        let t = log_offsets(-6.0, -2.0, 9);
        let v: Vec<f64> = t.iter().map(|x| 2.5 * x.powf(0.5)).collect();
        let f = fit_power(&t, &v);
        assert!((f.exponent - 0.5).abs() < 1e-12 && (f.prefactor - 2.5).abs() < 1e-10);
    }

    #[test]
    fn diverging_pair_near_thresholds() {
        let m = ModelBound::reference().unwrap();
        let opts = TrackOptions::default();
        let t = log_offsets(-8.0, -4.0, 9);
        let f = reciprocal_fit(&m, -1.0, &t, &opts).unwrap();
        assert!((f.exponent - 0.5).abs() < 0.02, "{f:?}");
        assert!((f.prefactor / (3.0 / 2f64.sqrt()) - 1.0).abs() < 0.05, "{f:?}");
        let f = reciprocal_fit(&m, -4.0, &t, &opts).unwrap();
        assert!((f.prefactor / (3.0 / (2.0 * 2f64.sqrt())) - 1.0).abs() < 0.05, "{f:?}");
    }

    #[test]
    fn y_expansion_above_threshold() {
        let m = ModelBound::reference().unwrap();
        let opts = TrackOptions::default();
        for big in [1e-4, 1e-3] {
            let z = c(-1.0 + big, 0.0);
            let pair = threshold_pair(&m, z, &opts).unwrap();
            let zp = c((big / 2.0).sqrt(), 0.0);
            for y in pair {
                assert!(y.re < 0.0);
                let rem = (y - y_series(zp, 4)).norm().min((y - y_series(-zp, 4)).norm());
                assert!(rem <= 2.0 * zp.norm().powi(5), "Z = {big}: remainder {rem}");
            }
        }
        // Below the threshold the pair is real.
        let pair = threshold_pair(&m, c(-1.0 - 1e-4, 0.0), &opts).unwrap();
        for y in pair {
            assert!(y.im.abs() < 1e-12 && (y.re.abs() - (5e-5f64).sqrt()).abs() < 1e-5);
        }
    }

    #[test]
    fn border_follows_leading_order() {
        let m = ModelBound::reference().unwrap();
        let b = border_curve(&m, &[-0.99, -0.97, -0.95], &TrackOptions::default()).unwrap();
        for p in &b {
            let r = p.im_z.powi(2) / p.leading_order.powi(2);
            assert!((r - 1.0).abs() < 0.1, "{p:?}");
        }
    }

    #[test]
    fn two_physical_branches_on_the_line() {
        let m = ModelBound::reference().unwrap();
        let br = line_branches(&m, 0.2, -7.5, 4.0, 1151, &DecayProbe::default(), &TrackOptions::default()).unwrap();
        assert_eq!(br.len(), 7);
        assert_eq!(br.iter().filter(|b| b.physical()).count(), 2, "{br:#?}");
    }

    #[test]
    fn finite_branch_near_threshold() {
        let m = ModelBound::reference().unwrap();
        let f = finite_physical_branch(&m, 0.01, &DecayProbe::default(), &TrackOptions::default()).unwrap();
        assert!((f.d - c(0.31, -0.21)).norm() < 0.05, "{}", f.d);
        assert!(f.diverging.unwrap().norm() > 5.0 * f.d.norm());
    }

    #[test]
    fn approach_to_bound_state() {
        let m = ModelBound::reference().unwrap();
        let r = approach_bound_state(&m, &log_offsets(-6.0, -1.0, 6), &TrackOptions::default()).unwrap();
        let last = r.samples.iter().find(|s| (s.z.re + 1.0 + 1e-4).abs() < 1e-12).unwrap();
        assert!(last.eta2.norm() <= 1e-3 && (last.eta1 + 1.0).norm() <= 1e-2, "{last:?}");
        assert!(last.x.re > 0.0 && last.y.re > 0.0);
        assert!(r.mismatch_spread < 1e-8 && r.max_subtraction < 1e-8, "{r:?}");
        let end = r.samples.last().unwrap();
        assert!(end.mismatch[0].norm() < 1e-5);
    }
}
