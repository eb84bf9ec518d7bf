//! Output files. JSON files open with a header object; CSV files start with one `#` line
//! carrying the same fields, and every run leaves `manifest.json` listing what it wrote.

use std::fs;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};
use timf_core::roots::{write_trajectories_csv, BranchTrajectory};

use crate::config::{RunConfig, Tolerances};
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct Header {
    pub schema_version: u32,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Header {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        Header {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config_hash: cfg.hash(),
            seed: cfg.seed,
            tolerances: cfg.tolerances,
        }
    }

    fn csv_line(&self) -> String {
        let t = serde_json::to_value(self.tolerances).expect("tolerances serialize");
        let tol: Vec<String> = t.as_object().unwrap().iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(
            "# schema_version={} command={} config_hash={} seed={} {}\n",
            self.schema_version,
            self.command,
            self.config_hash,
            self.seed,
            tol.join(" ")
        )
    }
}

pub struct Writer {
    dir: PathBuf,
    header: Header,
    config: Value,
    written: Vec<String>,
}

impl Writer {
    pub fn new(command: &str, cfg: &RunConfig) -> Result<Self, CliError> {
        fs::create_dir_all(&cfg.out_dir)?;
        Ok(Writer {
            dir: cfg.out_dir.clone(),
            header: Header::new(command, cfg),
            config: serde_json::to_value(cfg).expect("config serializes"),
            written: Vec::new(),
        })
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        fs::write(self.dir.join(name), bytes)?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, result: &T) -> Result<(), CliError> {
        let mut doc = serde_json::to_value(&self.header).expect("header serializes");
        let obj = doc.as_object_mut().unwrap();
        obj.insert("config".into(), self.config.clone());
        obj.insert("result".into(), serde_json::to_value(result).map_err(|e| CliError::Numerical(e.to_string()))?);
        let mut text = serde_json::to_string_pretty(&doc).expect("value serializes");
        text.push('\n');
        self.put(name, text.as_bytes())
    }

    pub fn trajectories(&mut self, name: &str, t: &[BranchTrajectory]) -> Result<(), CliError> {
        let mut buf = self.header.csv_line().into_bytes();
        write_trajectories_csv(&mut buf, t)?;
        self.put(name, &buf)
    }

    pub fn finish(mut self) -> Result<Vec<String>, CliError> {
        let files = self.written.clone();
        let manifest = json!({ "files": files });
        self.json("manifest.json", &manifest)?;
        Ok(self.written)
    }
}
