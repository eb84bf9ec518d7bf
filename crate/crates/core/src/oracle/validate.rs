//! Closest-branch comparison of the mean-field branches with the exact amplitude.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branch::{classify, decay_flags, decay_for_points, DecayProbe, PhysicalityReport, TimfModel};
use crate::error::Result;
use crate::roots::TrackOptions;

type C = Complex64;

/// Cells that must pass out of the 16 of [`validation_grid`].
pub const REQUIRED_CELLS: usize = 14;

/// `Re z` in `{-3, -4/3, 1/3, 2}` times `Im z` in `{0.2, 0.5, 1, 2}`, row by row in `Im z`.
pub fn validation_grid() -> Vec<C> {
    let re: Vec<f64> = (0..4).map(|k| -3.0 + 5.0 * k as f64 / 3.0).collect();
    [0.2, 0.5, 1.0, 2.0].iter().flat_map(|&im| re.iter().map(move |&r| C::new(r, im))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub id: usize,
    #[serde(rename = "D")]
    pub d: C,
    pub x: C,
    pub y: C,
    /// `|D - exact|`.
    pub distance: f64,
    pub flags: PhysicalityReport,
}

/// Comparison at one energy. `error` is set instead of the other fields when a step failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationRecord {
    pub z: C,
    pub exact: Option<C>,
    pub branches: Vec<BranchRecord>,
    /// Ids of the branches passing every sheet condition.
    pub physical: Vec<usize>,
    pub closest: Option<usize>,
    /// Exactly one physical branch and it is the closest.
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub records: Vec<ValidationRecord>,
    pub passed: usize,
    pub required: usize,
    pub pass: bool,
}

/// Compares every branch at `z` with `exact(z)`.
pub fn validate_point<M, F>(m: &M, z: C, exact: &F, probe: &DecayProbe, opts: &TrackOptions) -> ValidationRecord
where
    M: TimfModel + ?Sized,
    F: Fn(C) -> Result<C> + ?Sized,
{
    let run = || -> Result<(C, Vec<BranchRecord>)> {
        let ex = exact(z)?;
        let points = m.branch_points(z, &opts.roots)?;
        let (d_roots, flags) = decay_flags(m, z, probe, opts)?;
        let decays = decay_for_points(&points, &d_roots, &flags);
        let branches = points
            .iter()
            .zip(decays)
            .enumerate()
            .map(|(id, (p, dec))| BranchRecord {
                id,
                d: p.d,
                x: p.x,
                y: p.y,
                distance: (p.d - ex).norm(),
                flags: classify(p, Some(dec)),
            })
            .collect();
        Ok((ex, branches))
    };
    match run() {
        Ok((ex, branches)) => {
            let physical: Vec<usize> = branches.iter().filter(|b| b.flags.physical).map(|b| b.id).collect();
            let closest = branches.iter().min_by(|a, b| a.distance.total_cmp(&b.distance)).map(|b| b.id);
            let pass = physical.len() == 1 && closest == Some(physical[0]);
            ValidationRecord { z, exact: Some(ex), branches, physical, closest, pass, error: None }
        }
        Err(e) => ValidationRecord {
            z,
            exact: None,
            branches: Vec::new(),
            physical: Vec::new(),
            closest: None,
            pass: false,
            error: Some(e.to_string()),
        },
    }
}

/// Runs [`validate_point`] over `zs` in parallel; records come back in input order.
pub fn validate_sweep<M, F>(
    m: &M,
    zs: &[C],
    exact: &F,
    required: usize,
    probe: &DecayProbe,
    opts: &TrackOptions,
) -> ValidationReport
where
    M: TimfModel + ?Sized,
    F: Fn(C) -> Result<C> + Sync + ?Sized,
{
    let records: Vec<ValidationRecord> = zs.par_iter().map(|&z| validate_point(m, z, exact, probe, opts)).collect();
    let passed = records.iter().filter(|r| r.pass).count();
    ValidationReport { records, passed, required, pass: passed >= required }
}
