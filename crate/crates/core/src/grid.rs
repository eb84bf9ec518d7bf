//! Scalar diagnostics sampled on a rectangle of the complex energy plane, with the zero
//! level set extracted by marching squares.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TimfError};

/// Rectangle `[re_min, re_max] x [im_min, im_max]` sampled on `n_re x n_im` nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_re < 2 || self.n_im < 2 {
            return Err(TimfError::InvalidParams("grid needs at least 2 nodes per axis".into()));
        }
        if !(self.re_max > self.re_min && self.im_max > self.im_min) {
            return Err(TimfError::InvalidParams("grid bounds must be increasing".into()));
        }
        Ok(())
    }

    pub fn re_axis(&self) -> Vec<f64> {
        axis(self.re_min, self.re_max, self.n_re)
    }

    pub fn im_axis(&self) -> Vec<f64> {
        axis(self.im_min, self.im_max, self.n_im)
    }
}

fn axis(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Sampled values, `values[j][i]` at `re[i] + i im[j]`, and the zero contour as polylines of
/// `[re, im]` points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub quantity: String,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub contour: Vec<Vec<[f64; 2]>>,
}

impl GridField {
    /// Samples `f` on every node, rows in parallel.
    pub fn sample(spec: &GridSpec, quantity: &str, f: impl Fn(Complex64) -> Result<f64> + Sync) -> Result<GridField> {
        spec.validate()?;
        let re = spec.re_axis();
        let im = spec.im_axis();
        let values = im
            .par_iter()
            .map(|&y| re.iter().map(|&x| f(Complex64::new(x, y))).collect::<Result<Vec<f64>>>())
            .collect::<Result<Vec<_>>>()?;
        let contour = zero_contour(&re, &im, &values);
        Ok(GridField { quantity: quantity.to_string(), re, im, values, contour })
    }

    /// Value at node `(i, j)`.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j][i]
    }
}

/// Zero level set of a sampled field, joined into polylines.
pub fn zero_contour(re: &[f64], im: &[f64], v: &[Vec<f64>]) -> Vec<Vec<[f64; 2]>> {
    let mut segs: Vec<([f64; 2], [f64; 2])> = Vec::new();
    let cross = |p: ([f64; 2], f64), q: ([f64; 2], f64)| {
        // Same orientation from both cells sharing the edge, so the points agree bit for bit.
        let (p, q) = if (p.0[0], p.0[1]) <= (q.0[0], q.0[1]) { (p, q) } else { (q, p) };
        let t = if p.1 == q.1 { 0.5 } else { p.1 / (p.1 - q.1) };
        [p.0[0] + t * (q.0[0] - p.0[0]), p.0[1] + t * (q.0[1] - p.0[1])]
    };
    for j in 0..im.len().saturating_sub(1) {
        for i in 0..re.len().saturating_sub(1) {
            // Corners counter-clockwise from the lower left.
            let c = [
                ([re[i], im[j]], v[j][i]),
                ([re[i + 1], im[j]], v[j][i + 1]),
                ([re[i + 1], im[j + 1]], v[j + 1][i + 1]),
                ([re[i], im[j + 1]], v[j + 1][i]),
            ];
            if c.iter().any(|p| !p.1.is_finite()) {
                continue;
            }
            let mut pts = Vec::with_capacity(4);
            for k in 0..4 {
                let (p, q) = (c[k], c[(k + 1) % 4]);
                if (p.1 >= 0.0) != (q.1 >= 0.0) {
                    pts.push(cross(p, q));
                }
            }
            match pts.len() {
                2 => segs.push((pts[0], pts[1])),
                4 => {
                    // Saddle: decide the pairing by the cell mean.
                    let mean = c.iter().map(|p| p.1).sum::<f64>() / 4.0;
                    if (mean >= 0.0) == (c[0].1 >= 0.0) {
                        segs.push((pts[0], pts[3]));
                        segs.push((pts[1], pts[2]));
                    } else {
                        segs.push((pts[0], pts[1]));
                        segs.push((pts[2], pts[3]));
                    }
                }
                _ => {}
            }
        }
    }
    join_segments(segs)
}

fn key(p: [f64; 2]) -> (i64, i64) {
    ((p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64)
}

fn join_segments(mut segs: Vec<([f64; 2], [f64; 2])>) -> Vec<Vec<[f64; 2]>> {
    // A node sitting on the level set yields zero-length pieces.
    segs.retain(|s| key(s.0) != key(s.1));
    let mut ends: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (k, s) in segs.iter().enumerate() {
        ends.entry(key(s.0)).or_default().push(k);
        ends.entry(key(s.1)).or_default().push(k);
    }
    let mut used = vec![false; segs.len()];
    let mut lines = Vec::new();
    let next_from = |p: [f64; 2], used: &[bool]| ends.get(&key(p)).and_then(|v| v.iter().copied().find(|&k| !used[k]));
    for start in 0..segs.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut line = vec![segs[start].0, segs[start].1];
        // Grow forward, then backward.
        for forward in [true, false] {
            loop {
                let tip = if forward { *line.last().unwrap() } else { line[0] };
                let Some(k) = next_from(tip, &used) else { break };
                used[k] = true;
                let s = segs[k];
                let other = if key(s.0) == key(tip) { s.1 } else { s.0 };
                if forward {
                    line.push(other);
                } else {
                    line.insert(0, other);
                }
            }
        }
        lines.push(line);
    }
    lines
}

/// Distance from `p` to the nearest contour vertex or segment.
pub fn distance_to_contour(contour: &[Vec<[f64; 2]>], p: [f64; 2]) -> f64 {
    let seg = |a: [f64; 2], b: [f64; 2]| {
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let l2 = dx * dx + dy * dy;
        let t = if l2 == 0.0 { 0.0 } else { (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / l2).clamp(0.0, 1.0) };
        ((a[0] + t * dx - p[0]).powi(2) + (a[1] + t * dy - p[1]).powi(2)).sqrt()
    };
    contour
        .iter()
        .flat_map(|l| l.windows(2).map(|w| seg(w[0], w[1])).chain(l.first().map(|&a| seg(a, a))))
        .fold(f64::INFINITY, f64::min)
}
