//! Run configuration: one TOML file, then `--set` overrides, then dedicated flags.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use timf_core::branch::DecayProbe;
use timf_core::grid::GridSpec;
use timf_core::model_free::Sector;
use timf_core::params::{ModelBoundParams, ModelFreeParams};
use timf_core::quad::QuadratureSpec;
use timf_core::roots::{RootOptions, TrackOptions};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    #[default]
    Free,
    Bound,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    #[default]
    Float,
}

/// Parameter table. Missing entries take the model's reference values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamTable {
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    #[serde(rename = "K1")]
    pub k1: Option<f64>,
    #[serde(rename = "K2")]
    pub k2: Option<f64>,
    pub lambda: Option<f64>,
}

/// Straight path from `start` to `end`, both `[re, im]`, with `steps` samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathScan {
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridScan {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
    #[serde(default = "symmetric")]
    pub sector: Sector,
}

fn symmetric() -> Sector {
    Sector::Symmetric
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateScan {
    /// Energies as `[re, im]`; the built-in 4x4 sweep when absent.
    pub points: Option<Vec<[f64; 2]>>,
    /// Cells that must pass; defaults to all but two of the built-in sweep.
    pub required: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub tau_resid: f64,
    pub tau_cluster: f64,
    pub max_iter: usize,
    pub max_halvings: u32,
    pub separation_factor: f64,
    pub quad_abs: f64,
    pub quad_rel: f64,
    pub decay_reach: f64,
    pub decay_steps: usize,
    pub decay_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let r = RootOptions::default();
        let t = TrackOptions::default();
        let q = QuadratureSpec::default();
        let d = DecayProbe::default();
        Tolerances {
            tau_resid: r.tau_resid,
            tau_cluster: 1e-6,
            max_iter: r.max_iter,
            max_halvings: t.max_halvings,
            separation_factor: t.separation_factor,
            quad_abs: q.abs_tol,
            quad_rel: q.rel_tol,
            decay_reach: d.reach,
            decay_steps: d.steps,
            decay_tol: d.tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelTag,
    #[serde(default)]
    pub mode: Mode,
    /// Not part of the hash, so the same run written elsewhere is byte-identical.
    #[serde(default = "default_out", skip_serializing)]
    pub out_dir: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub params: ParamTable,
    pub path: Option<PathScan>,
    pub grid: Option<GridScan>,
    #[serde(default)]
    pub validate: ValidateScan,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_out() -> PathBuf {
    PathBuf::from("timf-out")
}

fn default_seed() -> u64 {
    RootOptions::default().seed
}

/// Command-line overrides, applied after the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    /// `key.path=value`, value parsed as TOML and taken as a string when that fails.
    pub set: Vec<String>,
    pub model: Option<ModelTag>,
    pub mode: Option<Mode>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tau_resid: Option<f64>,
    pub tau_cluster: Option<f64>,
}

impl RunConfig {
    pub fn load(file: Option<&Path>, ov: &Overrides) -> Result<RunConfig, CliError> {
        let text = match file {
            Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
            None => String::new(),
        };
        let origin = file.map_or("<flags>".to_string(), |p| p.display().to_string());
        // Parse the file alone first so diagnostics point at its lines.
        toml::from_str::<RunConfig>(&text).map_err(|e| CliError::Config(format!("{origin}: {e}")))?;
        let mut table: toml::Table = toml::from_str(&text).map_err(|e| CliError::Config(format!("{origin}: {e}")))?;
        for s in &ov.set {
            apply_set(&mut table, s)?;
        }
        let mut put = |k: &str, v: toml::Value| {
            table.insert(k.to_string(), v);
        };
        if let Some(m) = ov.model {
            put("model", toml::Value::try_from(m).expect("enum serializes"));
        }
        if let Some(m) = ov.mode {
            put("mode", toml::Value::try_from(m).expect("enum serializes"));
        }
        if let Some(o) = &ov.out_dir {
            put("out_dir", toml::Value::String(o.display().to_string()));
        }
        if let Some(s) = ov.seed {
            let s = i64::try_from(s).map_err(|_| CliError::Config("seed must fit in i64".into()))?;
            put("seed", toml::Value::Integer(s));
        }
        for (k, v) in [("tau_resid", ov.tau_resid), ("tau_cluster", ov.tau_cluster)] {
            if let Some(v) = v {
                let tol = table.entry("tolerances").or_insert_with(|| toml::Value::Table(toml::Table::new()));
                let Some(tol) = tol.as_table_mut() else {
                    return Err(CliError::Config("tolerances must be a table".into()));
                };
                tol.insert(k.to_string(), toml::Value::Float(v));
            }
        }
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(format!("after overrides: {e}")))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        let positive = [
            ("tau_resid", t.tau_resid),
            ("tau_cluster", t.tau_cluster),
            ("separation_factor", t.separation_factor),
            ("quad_abs", t.quad_abs),
            ("quad_rel", t.quad_rel),
            ("decay_reach", t.decay_reach),
            ("decay_tol", t.decay_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("tolerances.{name} must be positive, got {v}")));
            }
        }
        if t.max_iter == 0 || t.decay_steps < 2 {
            return Err(CliError::Config("tolerances.max_iter must be positive and decay_steps at least 2".into()));
        }
        if let Some(p) = &self.path {
            if p.steps < 2 {
                return Err(CliError::Config(format!("path.steps must be at least 2, got {}", p.steps)));
            }
            if !p.start.iter().chain(&p.end).all(|v| v.is_finite()) {
                return Err(CliError::Config("path end points must be finite".into()));
            }
        }
        if let Some(g) = &self.grid {
            if g.n_re < 8 || g.n_im < 8 {
                return Err(CliError::Config(format!(
                    "grid resolution must be at least 8x8, got {}x{}",
                    g.n_re, g.n_im
                )));
            }
            self.grid_spec().unwrap().validate().map_err(|e| CliError::Config(format!("grid: {e}")))?;
        }
        if self.model == ModelTag::Free && self.params.lambda.is_some() {
            return Err(CliError::Config("params.lambda applies to the bound model only".into()));
        }
        if self.model == ModelTag::Bound && (self.params.k1.is_some() || self.params.k2.is_some()) {
            return Err(CliError::Config("params.K1/K2 apply to the free model only".into()));
        }
        Ok(())
    }

    pub fn free_params(&self) -> ModelFreeParams {
        let d = ModelFreeParams::unit();
        let p = &self.params;
        ModelFreeParams {
            a1: p.a1.unwrap_or(d.a1),
            a2: p.a2.unwrap_or(d.a2),
            gamma1: p.gamma1.unwrap_or(d.gamma1),
            gamma2: p.gamma2.unwrap_or(d.gamma2),
            k1: p.k1.unwrap_or(d.k1),
            k2: p.k2.unwrap_or(d.k2),
        }
    }

    pub fn bound_params(&self) -> ModelBoundParams {
        let d = ModelBoundParams::reference();
        let p = &self.params;
        ModelBoundParams {
            a1: p.a1.unwrap_or(d.a1),
            a2: p.a2.unwrap_or(d.a2),
            gamma1: p.gamma1.unwrap_or(d.gamma1),
            gamma2: p.gamma2.unwrap_or(d.gamma2),
            lambda: p.lambda.unwrap_or(d.lambda),
        }
    }

    pub fn path_points(&self) -> Option<Vec<Complex64>> {
        let p = self.path?;
        let a = Complex64::new(p.start[0], p.start[1]);
        let b = Complex64::new(p.end[0], p.end[1]);
        if a == b {
            return Some(vec![a]);
        }
        Some(timf_core::roots::linear_path(a, b, p.steps))
    }

    pub fn grid_spec(&self) -> Option<GridSpec> {
        self.grid.map(|g| GridSpec {
            re_min: g.re_min,
            re_max: g.re_max,
            im_min: g.im_min,
            im_max: g.im_max,
            n_re: g.n_re,
            n_im: g.n_im,
        })
    }

    pub fn root_options(&self) -> RootOptions {
        RootOptions { tau_resid: self.tolerances.tau_resid, max_iter: self.tolerances.max_iter, seed: self.seed }
    }

    pub fn track_options(&self) -> TrackOptions {
        TrackOptions {
            roots: self.root_options(),
            max_halvings: self.tolerances.max_halvings,
            separation_factor: self.tolerances.separation_factor,
            ..TrackOptions::default()
        }
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec {
            abs_tol: self.tolerances.quad_abs,
            rel_tol: self.tolerances.quad_rel,
            ..QuadratureSpec::default()
        }
    }

    pub fn decay_probe(&self) -> DecayProbe {
        DecayProbe {
            reach: self.tolerances.decay_reach,
            steps: self.tolerances.decay_steps,
            tol: self.tolerances.decay_tol,
        }
    }

    /// sha256 of the canonical JSON form (output directory excluded).
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

fn apply_set(table: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let Some((key, raw)) = spec.split_once('=') else {
        return Err(CliError::Config(format!("--set expects key=value, got `{spec}`")));
    };
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("--set: bad key `{key}`")));
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let slot = cur.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = slot.as_table_mut().ok_or_else(|| CliError::Config(format!("--set: `{p}` is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str, ov: &Overrides) -> Result<RunConfig, CliError> {
        let f = std::env::temp_dir().join(format!("timf-cfg-{}.toml", std::process::id()));
        std::fs::write(&f, text).unwrap();
        let r = RunConfig::load(Some(&f), ov);
        std::fs::remove_file(&f).ok();
        r
    }

    #[test]
    fn empty_config_takes_defaults() {
        let c = RunConfig::load(None, &Overrides::default()).unwrap();
        assert_eq!(c.model, ModelTag::Free);
        assert_eq!(c.seed, RootOptions::default().seed);
        assert_eq!(c.free_params(), ModelFreeParams::unit());
    }

    #[test]
    fn flags_win_over_file() {
        let ov = Overrides {
            seed: Some(7),
            set: vec!["path.steps=9".into()],
            tau_resid: Some(1e-9),
            ..Overrides::default()
        };
        let c = load("seed = 3\n[path]\nstart = [0.0, 1.0]\nend = [1.0, 1.0]\nsteps = 4\n", &ov).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.path.unwrap().steps, 9);
        assert_eq!(c.tolerances.tau_resid, 1e-9);
    }

    #[test]
    fn unknown_field_reports_line() {
        let err = load("model = \"free\"\n\n[params]\na3 = 1.0\n", &Overrides::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 4") && msg.contains("a3"), "{msg}");
    }

    #[test]
    fn invariants_are_checked() {
        let small = "[grid]\nre_min = -1.0\nre_max = 1.0\nim_min = -1.0\nim_max = 1.0\nn_re = 4\nn_im = 8\n";
        assert!(load(small, &Overrides::default()).is_err());
        assert!(load("[path]\nstart = [0.0, 1.0]\nend = [1.0, 1.0]\nsteps = 1\n", &Overrides::default()).is_err());
        assert!(load("[tolerances]\ntau_resid = -1.0\n", &Overrides::default()).is_err());
        assert!(load("model = \"free\"\n[params]\nlambda = 2.0\n", &Overrides::default()).is_err());
    }

    #[test]
    fn hash_ignores_output_directory() {
        let a = RunConfig::load(None, &Overrides { out_dir: Some("a".into()), ..Overrides::default() }).unwrap();
        let b = RunConfig::load(None, &Overrides { out_dir: Some("b".into()), ..Overrides::default() }).unwrap();
        let c = RunConfig::load(None, &Overrides { seed: Some(1), ..Overrides::default() }).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn identical_path_collapses() {
        let c = load("[path]\nstart = [0.5, 1.0]\nend = [0.5, 1.0]\nsteps = 2\n", &Overrides::default()).unwrap();
        assert_eq!(c.path_points().unwrap().len(), 1);
    }
}
