use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::solve::{all_roots, RootOptions};
use crate::error::{Result, TimfError};
use crate::poly::CPoly;

/// Settings for [`track`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackOptions {
    pub roots: RootOptions,
    /// How many times one path segment may be halved.
    pub max_halvings: u32,
    /// Halve when the closest pair of new roots is nearer than this multiple of the largest step.
    pub separation_factor: f64,
    /// Error out on tied matchings instead of recording a collision.
    pub fail_on_ambiguity: bool,
    /// Relative gap between best and second-best matching cost treated as a tie.
    pub tie_tol: f64,
    /// `|lead| <= lead_tol * max|c_k|` counts as a degree drop.
    pub lead_tol: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            roots: RootOptions::default(),
            max_halvings: 12,
            separation_factor: 3.0,
            fail_on_ambiguity: false,
            tie_tol: 1e-9,
            lead_tol: 1e-13,
        }
    }
}

/// One labelled root followed along the path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchTrajectory {
    pub id: usize,
    pub z: Vec<Complex64>,
    pub roots: Vec<Complex64>,
    /// Index of each sample in the input path.
    pub step: Vec<usize>,
    /// `|root_k - root_{k-1}|`, zero for the first sample.
    pub continuity: Vec<f64>,
}

impl BranchTrajectory {
    pub fn last(&self) -> Complex64 {
        *self.roots.last().unwrap()
    }
}

/// Two branches met (or nearly met) between path samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub z: Complex64,
    pub branches: [usize; 2],
    pub separation: f64,
    /// Index of the path segment end where the event was recorded.
    pub step_index: usize,
    /// The best and second-best matchings tied.
    pub tied: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackResult {
    pub trajectories: Vec<BranchTrajectory>,
    pub collisions: Vec<CollisionEvent>,
    /// Root solves performed, including halved substeps.
    pub solves: usize,
}

impl TrackResult {
    /// Roots of every branch at path sample `k`.
    pub fn roots_at(&self, k: usize) -> Vec<Complex64> {
        self.trajectories.iter().map(|t| t.roots[k]).collect()
    }
}

/// Minimal-total-distance matching of `prev` onto `next`.
///
/// Returns `perm` with `next[perm[i]]` assigned to `prev[i]`, the best cost and the
/// second-best cost (infinite when not computed). `next` may be longer than `prev`.
pub fn assign(prev: &[Complex64], next: &[Complex64]) -> (Vec<usize>, f64, f64) {
    let n = prev.len();
    let m = next.len();
    assert!(m >= n, "cannot match {n} roots onto {m}");
    let cost: Vec<Vec<f64>> = prev.iter().map(|a| next.iter().map(|b| (a - b).norm()).collect()).collect();
    if n > 8 {
        return greedy(&cost);
    }
    // Coincident targets are used in index order, so swapping them never counts as a second
    // matching.
    let first_of: Vec<usize> = (0..m).map(|j| (0..j).find(|&k| coincident(next[k], next[j])).unwrap_or(j)).collect();
    struct S<'a> {
        cost: &'a [Vec<f64>],
        first_of: &'a [usize],
        used: Vec<bool>,
        cur: Vec<usize>,
        best: (f64, Vec<usize>),
        second: f64,
    }
    fn dfs(s: &mut S, i: usize, acc: f64) {
        let n = s.cost.len();
        if acc >= s.second {
            return;
        }
        if i == n {
            if acc < s.best.0 {
                s.second = s.best.0;
                s.best = (acc, s.cur.clone());
            } else {
                s.second = acc;
            }
            return;
        }
        for j in 0..s.used.len() {
            let blocked = (s.first_of[j]..j).any(|k| s.first_of[k] == s.first_of[j] && !s.used[k]);
            if !s.used[j] && !blocked {
                s.used[j] = true;
                s.cur.push(j);
                let c = s.cost[i][j];
                dfs(s, i + 1, acc + c);
                s.cur.pop();
                s.used[j] = false;
            }
        }
    }
    let (g, gc, _) = greedy(&cost);
    let mut s = S {
        cost: &cost,
        first_of: &first_of,
        used: vec![false; m],
        cur: Vec::new(),
        best: (f64::INFINITY, g),
        second: f64::INFINITY,
    };
    // The greedy matching is a valid upper bound but must be rediscovered to count as best.
    let _ = gc;
    dfs(&mut s, 0, 0.0);
    (s.best.1, s.best.0, s.second)
}

fn greedy(cost: &[Vec<f64>]) -> (Vec<usize>, f64, f64) {
    let n = cost.len();
    let m = cost.first().map_or(0, Vec::len);
    let mut pairs: Vec<(f64, usize, usize)> =
        (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| (cost[i][j], i, j)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut perm = vec![usize::MAX; n];
    let mut taken = vec![false; m];
    let mut total = 0.0;
    for (c, i, j) in pairs {
        if perm[i] == usize::MAX && !taken[j] {
            perm[i] = j;
            taken[j] = true;
            total += c;
        }
    }
    (perm, total, f64::INFINITY)
}

struct Tracker<'a, F> {
    family: &'a F,
    opts: &'a TrackOptions,
    degree: usize,
    solves: usize,
    step_solves: usize,
    collisions: Vec<CollisionEvent>,
}

impl<F: Fn(Complex64) -> CPoly> Tracker<'_, F> {
    fn solve(&mut self, z: Complex64) -> Result<Vec<Complex64>> {
        let p = (self.family)(z);
        let scale = p.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        let lead_ok =
            p.degree() == Some(self.degree) && p.lead().map(|l| l.norm() > self.opts.lead_tol * scale).unwrap_or(false);
        if !lead_ok {
            return Err(TimfError::DegreeDrop { z });
        }
        self.solves += 1;
        self.step_solves += 1;
        Ok(all_roots(&p, &self.opts.roots)?.roots)
    }

    fn advance(
        &mut self,
        za: Complex64,
        zb: Complex64,
        prev: &[Complex64],
        depth: u32,
        step: usize,
    ) -> Result<Vec<Complex64>> {
        let found = self.solve(zb)?;
        let (perm, best, second) = assign(prev, &found);
        let next: Vec<Complex64> = perm.iter().map(|&j| found[j]).collect();
        let moved: Vec<f64> = prev.iter().zip(&next).map(|(a, b)| (a - b).norm()).collect();
        let (mut sep, mut pair, crowded) = crowding(&next, &moved, self.opts.separation_factor);
        let cost_tie = second - best <= self.opts.tie_tol * best.max(f64::MIN_POSITIVE);
        // Two labels that were apart now sit on one root: which continues where is undecidable.
        let met = meeting(prev, &next);
        if let Some((d, p)) = met {
            (sep, pair) = (d, p);
        }
        let tied = cost_tie || met.is_some();
        if (crowded || cost_tie) && depth < self.opts.max_halvings && za != zb && self.step_solves < STEP_BUDGET {
            let mid = (za + zb) * 0.5;
            let m = self.advance(za, mid, prev, depth + 1, step)?;
            return self.advance(mid, zb, &m, depth + 1, step);
        }
        if tied && self.opts.fail_on_ambiguity {
            return Err(TimfError::AssignmentAmbiguous { z: zb });
        }
        if crowded || tied {
            let ev = CollisionEvent { z: zb, branches: pair, separation: sep, step_index: step, tied };
            // Within one segment keep only the tightest approach of a pair.
            match self.collisions.last_mut() {
                Some(l) if l.branches == ev.branches && l.step_index == step => {
                    if ev.separation <= l.separation {
                        *l = ev;
                    }
                }
                _ => self.collisions.push(ev),
            }
        }
        Ok(next)
    }
}

const COINCIDENT_TOL: f64 = 1e-6;

fn coincident(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= COINCIDENT_TOL * a.norm().max(b.norm()).max(1.0)
}

/// A pair coincident in `next` but not in `prev`.
fn meeting(prev: &[Complex64], next: &[Complex64]) -> Option<(f64, [usize; 2])> {
    for i in 0..next.len() {
        for j in i + 1..next.len() {
            if coincident(next[i], next[j]) && !coincident(prev[i], prev[j]) {
                return Some(((next[i] - next[j]).norm(), [i, j]));
            }
        }
    }
    None
}
/// Solves allowed while subdividing one path step.
const STEP_BUDGET: usize = 512;

/// The pair whose separation is smallest relative to its own step, and whether that separation
/// is below `factor` times the step. Without a crowded pair, the closest pair is reported.
fn crowding(r: &[Complex64], moved: &[f64], factor: f64) -> (f64, [usize; 2], bool) {
    let mut closest = (f64::INFINITY, [0, 0]);
    let mut worst = (f64::INFINITY, f64::INFINITY, [0, 0]);
    for i in 0..r.len() {
        for j in i + 1..r.len() {
            let d = (r[i] - r[j]).norm();
            if d < closest.0 {
                closest = (d, [i, j]);
            }
            // Numerically coincident roots (a multiple factor) cannot be told apart by halving;
            // either labelling gives the same values.
            if coincident(r[i], r[j]) {
                continue;
            }
            let step = moved[i].max(moved[j]);
            let ratio = if step > 0.0 { d / step } else { f64::INFINITY };
            if ratio < worst.0 {
                worst = (ratio, d, [i, j]);
            }
        }
    }
    if worst.0 < factor {
        (worst.1, worst.2, true)
    } else {
        (closest.0, closest.1, false)
    }
}

/// Follows every root of `family(z)` along `path`, keeping labels by minimal-cost matching and
/// halving steps where roots crowd together.
///
/// `seed` gives the initial labelling at `path[0]`; when `None`, the roots found there are used
/// in solver order.
pub fn track<F: Fn(Complex64) -> CPoly>(
    path: &[Complex64],
    family: F,
    seed: Option<&[Complex64]>,
    opts: &TrackOptions,
) -> Result<TrackResult> {
    let Some(&z0) = path.first() else {
        return Ok(TrackResult { trajectories: Vec::new(), collisions: Vec::new(), solves: 0 });
    };
    let degree = family(z0).degree().unwrap_or(0);
    let mut tr = Tracker { family: &family, opts, degree, solves: 0, step_solves: 0, collisions: Vec::new() };
    let first = tr.solve(z0)?;
    let start = match seed {
        Some(s) => {
            if s.len() != degree {
                return Err(TimfError::SeedMismatch { expected: degree, found: s.len() });
            }
            let (perm, _, _) = assign(s, &first);
            perm.iter().map(|&j| first[j]).collect()
        }
        None => first,
    };
    let mut trajectories: Vec<BranchTrajectory> = start
        .iter()
        .enumerate()
        .map(|(id, r)| BranchTrajectory { id, z: vec![z0], roots: vec![*r], step: vec![0], continuity: vec![0.0] })
        .collect();
    let mut cur = start;
    for k in 1..path.len() {
        tr.step_solves = 0;
        let next = tr.advance(path[k - 1], path[k], &cur, 0, k)?;
        for (t, (a, b)) in trajectories.iter_mut().zip(cur.iter().zip(&next)) {
            t.z.push(path[k]);
            t.roots.push(*b);
            t.step.push(k);
            t.continuity.push((a - b).norm());
        }
        cur = next;
    }
    Ok(TrackResult { trajectories, collisions: tr.collisions, solves: tr.solves })
}

/// Tracks the roots `d = 1/D` of the reversed polynomials, which stay finite where the
/// leading coefficient of `family` vanishes.
pub fn track_reciprocal<F: Fn(Complex64) -> CPoly>(
    path: &[Complex64],
    family: F,
    seed: Option<&[Complex64]>,
    opts: &TrackOptions,
) -> Result<TrackResult> {
    let n = path.first().map(|&z| family(z).coeffs().len()).unwrap_or(0);
    let rev = |z: Complex64| {
        let p = family(z);
        // Keep the full degree even when the leading coefficient vanishes.
        let mut c: Vec<Complex64> = p.coeffs().to_vec();
        c.resize(n, Complex64::new(0.0, 0.0));
        c.reverse();
        CPoly::new(crate::poly::Var::Dr, c)
    };
    track(path, rev, seed, opts)
}

/// Evenly spaced path between two points, `steps` samples including both ends.
pub fn linear_path(a: Complex64, b: Complex64, steps: usize) -> Vec<Complex64> {
    if steps < 2 {
        return vec![a];
    }
    (0..steps).map(|k| a + (b - a) * (k as f64 / (steps - 1) as f64)).collect()
}

/// Writes `branch_id,re_z,im_z,re_root,im_root,step_index` rows.
pub fn write_trajectories_csv<W: Write>(w: W, trajectories: &[BranchTrajectory]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let err = |e: csv::Error| TimfError::Serialization(e.to_string());
    wr.write_record(["branch_id", "re_z", "im_z", "re_root", "im_root", "step_index"]).map_err(err)?;
    for t in trajectories {
        for k in 0..t.roots.len() {
            wr.write_record(&[
                t.id.to_string(),
                t.z[k].re.to_string(),
                t.z[k].im.to_string(),
                t.roots[k].re.to_string(),
                t.roots[k].im.to_string(),
                t.step[k].to_string(),
            ])
            .map_err(err)?;
        }
    }
    wr.flush().map_err(|e| TimfError::Serialization(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{cpoly, Var};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn assignment_is_optimal() {
        let prev = [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)];
        let next = [c(2.1, 0.0), c(-0.1, 0.0), c(0.9, 0.0)];
        let (perm, cost, second) = assign(&prev, &next);
        assert_eq!(perm, vec![1, 2, 0]);
        assert!((cost - 0.3).abs() < 1e-12);
        assert!(second > cost);
    }

    #[test]
    fn assignment_onto_a_larger_set() {
        let prev = [c(0.0, 1.0), c(0.0, -1.0)];
        let next = [c(0.0, -1.1), c(3.0, 0.0), c(0.1, 1.0), c(-2.0, 0.0)];
        assert_eq!(assign(&prev, &next).0, vec![2, 0]);
    }

    #[test]
    fn square_root_monodromy() {
        let path: Vec<Complex64> =
            (0..=64).map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 64.0)).collect();
        let fam = |z: Complex64| CPoly::new(Var::X, vec![-z, c(0.0, 0.0), c(1.0, 0.0)]);
        let r = track(&path, fam, Some(&[c(1.0, 0.0), c(-1.0, 0.0)]), &TrackOptions::default()).unwrap();
        assert!((r.trajectories[0].last() - c(-1.0, 0.0)).norm() < 1e-9);
        assert!((r.trajectories[1].last() - c(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn degree_drop_is_reported() {
        let path = linear_path(c(-1.0, 0.0), c(1.0, 0.0), 5);
        let fam = |z: Complex64| CPoly::new(Var::X, vec![c(1.0, 0.0), c(1.0, 0.0), z]);
        match track(&path, fam, None, &TrackOptions::default()) {
            Err(TimfError::DegreeDrop { z }) => assert!(z.norm() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reciprocal_tracking_crosses_degree_drop() {
        let path = linear_path(c(-1.0, 0.0), c(1.0, 0.0), 5);
        let fam = |z: Complex64| CPoly::new(Var::X, vec![c(1.0, 0.0), c(1.0, 0.0), z]);
        let r = track_reciprocal(&path, fam, None, &TrackOptions::default()).unwrap();
        // At z = 0 one reciprocal root passes through zero.
        let at0 = r.roots_at(2);
        assert!(at0.iter().any(|d| d.norm() < 1e-12));
    }

    #[test]
    fn tied_collision_recorded_or_rejected() {
        // (x - z)(x + z): the two roots meet at z = 0.
        let path = linear_path(c(-1.0, 0.0), c(1.0, 0.0), 3);
        let fam = |z: Complex64| CPoly::new(Var::X, vec![-z * z, c(0.0, 0.0), c(1.0, 0.0)]);
        let r = track(&path, fam, None, &TrackOptions::default()).unwrap();
        assert!(r.collisions.iter().any(|e| e.z.norm() < 1e-12 && e.tied));
        let strict = TrackOptions { fail_on_ambiguity: true, ..Default::default() };
        assert!(matches!(track(&path, fam, None, &strict), Err(TimfError::AssignmentAmbiguous { .. })));
    }

    #[test]
    fn csv_has_fixed_header() {
        let fam = |z: Complex64| CPoly::new(Var::X, vec![-z, c(1.0, 0.0)]);
        let r = track(&[c(1.0, 0.0), c(2.0, 0.0)], fam, None, &TrackOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_trajectories_csv(&mut buf, &r.trajectories).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("branch_id,re_z,im_z,re_root,im_root,step_index\n0,1,0,1,0,0\n"));
        let _ = cpoly(Var::X, &[1.0]);
    }
}
