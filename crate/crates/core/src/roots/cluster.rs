use num_complex::Complex64;

use super::solve::{abs_scale, horner, newton_polish, RootSet};

/// One group of roots that behave as a single multiple root.
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    /// Refined value of the multiple root.
    pub center: Complex64,
    /// Indices into the root set.
    pub members: Vec<usize>,
    /// Largest distance of a refined member from the center.
    pub radius: f64,
    /// Largest distance of an unrefined member from the center.
    pub raw_radius: f64,
}

impl Cluster {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }
}

/// Single-linkage grouping of roots closer than `tau_cluster * max(1, |root|)`.
///
/// Pairs farther apart, but within `merge_radius * max(1, |root|)`, are also grouped when the
/// polynomial and its first `m - 1` derivatives vanish to rounding level at the group's
/// refined center, i.e. when the roots cannot be told apart from an `m`-fold root.
/// Members of a multiple root are moved onto the refined center.
pub fn multiplicity_cluster(rs: &RootSet, tau_cluster: f64, merge_radius: f64) -> (RootSet, Vec<Cluster>) {
    let n = rs.roots.len();
    let close = |i: usize, j: usize, tol: f64| {
        let scale = rs.roots[i].norm().max(rs.roots[j].norm()).max(1.0);
        (rs.roots[i] - rs.roots[j]).norm() <= tol * scale
    };
    let groups = link(n, |i, j| close(i, j, tau_cluster));
    let mut groups: Vec<Vec<usize>> = groups;
    if merge_radius > tau_cluster {
        // Try looser groups; keep them only when they pass the multiple-root test.
        let loose = link(n, |i, j| close(i, j, merge_radius));
        for g in loose {
            if g.len() < 2 || groups.iter().any(|t| t == &g) {
                continue;
            }
            if refine_multiple(rs.poly.coeffs(), &rs.roots, &g).is_some() {
                groups.retain(|t| !t.iter().any(|i| g.contains(i)));
                groups.push(g);
            }
        }
    }
    groups.sort();
    let mut out = rs.clone();
    let mut clusters = Vec::new();
    for (label, g) in groups.iter().enumerate() {
        let raw_center = mean(&rs.roots, g);
        let center = if g.len() > 1 {
            refine_multiple(rs.poly.coeffs(), &rs.roots, g).unwrap_or(raw_center)
        } else {
            rs.roots[g[0]]
        };
        let raw_radius = g.iter().map(|&i| (rs.roots[i] - center).norm()).fold(0.0, f64::max);
        for &i in g {
            out.labels[i] = label;
            if g.len() > 1 {
                out.roots[i] = center;
                out.residuals[i] = horner(rs.poly.coeffs(), center).0.norm();
            }
        }
        let radius = g.iter().map(|&i| (out.roots[i] - center).norm()).fold(0.0, f64::max);
        clusters.push(Cluster { center, members: g.clone(), radius, raw_radius });
    }
    (out, clusters)
}

fn mean(roots: &[Complex64], g: &[usize]) -> Complex64 {
    g.iter().map(|&i| roots[i]).sum::<Complex64>() / g.len() as f64
}

fn link(n: usize, near: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if near(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_of[r] == usize::MAX {
            root_of[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_of[r]].push(i);
    }
    groups
}

fn derivative(c: &[Complex64]) -> Vec<Complex64> {
    c.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect()
}

/// Center of an `m`-fold root refined by Newton on the `(m-1)`-th derivative, or `None`
/// when lower derivatives do not vanish there to rounding level.
fn refine_multiple(c: &[Complex64], roots: &[Complex64], g: &[usize]) -> Option<Complex64> {
    let m = g.len();
    let mut ders = vec![c.to_vec()];
    for _ in 1..m {
        let d = derivative(ders.last().unwrap());
        ders.push(d);
    }
    let start = mean(roots, g);
    let target = &ders[m - 1];
    let center = if target.len() > 1 { newton_polish(target, start, 60) } else { start };
    let n = (c.len() - 1) as f64;
    for d in &ders[..m] {
        let noise = 16.0 * n * f64::EPSILON * abs_scale(d, center.norm());
        if horner(d, center).0.norm() > noise {
            return None;
        }
    }
    Some(center)
}
