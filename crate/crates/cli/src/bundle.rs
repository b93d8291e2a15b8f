//! Output bundles: results JSON, CSV tables, a summary and a provenance
//! record, written to a temporary directory and renamed into place.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use twpa::constants;
use twpa::io::{write_columns, DeviceConfig};

use crate::error::{CliError, CliResult};

pub const PROVENANCE_FILE: &str = "provenance.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Bundle {
    command: &'static str,
    seed: u64,
    config_hash: Option<String>,
    inputs: BTreeMap<String, String>,
    files: BTreeMap<String, Vec<u8>>,
    results: Value,
    summary: Vec<String>,
}

impl Bundle {
    pub fn new(command: &'static str, seed: u64) -> Self {
        Self {
            command,
            seed,
            config_hash: None,
            inputs: BTreeMap::new(),
            files: BTreeMap::new(),
            results: Value::Null,
            summary: Vec::new(),
        }
    }

    /// Records the canonical text of the device configuration and its hash.
    pub fn device(&mut self, config: &DeviceConfig) {
        let text = config.to_toml();
        self.config_hash = Some(sha256_hex(text.as_bytes()));
        self.files.insert("device.toml".into(), text.into_bytes());
    }

    /// Records the hash of an input data file under its file name.
    pub fn input(&mut self, path: &Path, bytes: &[u8]) {
        let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into());
        self.inputs.insert(name, sha256_hex(bytes));
    }

    pub fn csv(&mut self, name: &str, header: &[&str], columns: &[&[f64]]) -> CliResult<()> {
        let mut buf = Vec::new();
        write_columns(&mut buf, header, columns)?;
        self.files.insert(name.into(), buf);
        Ok(())
    }

    pub fn file(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.insert(name.into(), bytes);
    }

    pub fn results<T: Serialize>(&mut self, value: &T) {
        self.results = serde_json::to_value(value).expect("results serialize");
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.summary.push(text.into());
    }

    pub fn summary(&self) -> &[String] {
        &self.summary
    }

    fn provenance(&self) -> Value {
        let constants: BTreeMap<&str, Value> = constants::table()
            .into_iter()
            .map(|(name, value, unit)| (name, json!({ "value": value, "unit": unit })))
            .collect();
        json!({
            "tool": "twpa",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "seed": self.seed,
            "config_sha256": self.config_hash,
            "inputs_sha256": self.inputs,
            "constants": constants,
            "photon_convention": "photon numbers include the vacuum half photon; efficiency = 1/n",
        })
    }

    /// Writes the bundle to `out`. An existing directory is replaced only if
    /// it is empty or holds an earlier bundle.
    pub fn write(&self, out: &Path) -> CliResult<()> {
        if out.exists() {
            let is_bundle = out.join(PROVENANCE_FILE).is_file();
            let empty = fs::read_dir(out).map(|mut d| d.next().is_none()).unwrap_or(false);
            if !out.is_dir() || !(is_bundle || empty) {
                return Err(CliError::Input(format!(
                    "refusing to overwrite {}: not an earlier output bundle",
                    out.display()
                )));
            }
        }
        let parent = match out.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
        let tmp = tempfile::Builder::new()
            .prefix(".twpa-bundle-")
            .tempdir_in(parent)
            .map_err(|e| io_error(parent, e))?;

        let mut files = self.files.clone();
        files.insert("results.json".into(), pretty(&self.results));
        files.insert(PROVENANCE_FILE.into(), pretty(&self.provenance()));
        let mut summary = self.summary.join("\n");
        summary.push('\n');
        files.insert("summary.txt".into(), summary.into_bytes());
        for (name, bytes) in &files {
            let path = tmp.path().join(name);
            fs::write(&path, bytes).map_err(|e| io_error(&path, e))?;
        }

        if out.exists() {
            fs::remove_dir_all(out).map_err(|e| io_error(out, e))?;
        }
        let staged = tmp.keep();
        fs::rename(&staged, out).map_err(|e| {
            let _ = fs::remove_dir_all(&staged);
            io_error(out, e)
        })
    }
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s.into_bytes()
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}
