//! Run manifest and series emission: every run writes a manifest recording
//! the resolved configuration, versions, wall time, per-check outcomes, and
//! a digest of every output file. CSV output uses shortest-representation
//! float formatting, which round-trips exactly.

use qlrr::error::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// Fully resolved configuration; feeding it back through --config
    /// reproduces the run bit for bit on the same build.
    pub config: BTreeMap<String, String>,
    pub versions: BTreeMap<String, String>,
    pub seed: u64,
    pub units: String,
    pub wall_time_seconds: f64,
    pub checks: Vec<CheckRecord>,
    pub outputs: Vec<OutputRecord>,
    pub exit_code: i32,
    pub error: Option<String>,
}

pub struct Emitter {
    pub out_dir: PathBuf,
    pub outputs: Vec<OutputRecord>,
}

impl Emitter {
    pub fn new(out_dir: &Path) -> Result<Self> {
        fs::create_dir_all(out_dir)
            .map_err(|e| Error::Input(format!("cannot create {}: {e}", out_dir.display())))?;
        Ok(Emitter {
            out_dir: out_dir.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    fn record(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        fs::write(path, bytes)
            .map_err(|e| Error::Input(format!("write {}: {e}", path.display())))?;
        let digest = Sha256::digest(bytes);
        self.outputs.push(OutputRecord {
            path: path.display().to_string(),
            sha256: format!("{digest:x}"),
        });
        Ok(())
    }

    /// CSV with one header line and full-precision values. Rows must be
    /// rectangular; NaN or infinity anywhere is a numeric failure.
    pub fn emit_series(&mut self, name: &str, columns: &[&str], rows: &[Vec<f64>]) -> Result<PathBuf> {
        let mut text = String::new();
        text.push_str(&columns.join(","));
        text.push('\n');
        for row in rows {
            if row.len() != columns.len() {
                return Err(Error::Input(format!(
                    "ragged row in {name}: {} values for {} columns",
                    row.len(),
                    columns.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numeric(format!(
                    "non-finite value in output series {name}"
                )));
            }
            let mut first = true;
            for v in row {
                if !first {
                    text.push(',');
                }
                first = false;
                text.push_str(&format!("{v}"));
            }
            text.push('\n');
        }
        let path = self.out_dir.join(name);
        self.record(&path, text.as_bytes())?;
        Ok(path)
    }

    pub fn emit_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let text = serde_json::to_string_pretty(value)
            .map_err(|e| Error::Input(format!("serialize {name}: {e}")))?;
        let path = self.out_dir.join(name);
        self.record(&path, text.as_bytes())?;
        Ok(path)
    }

    pub fn emit_manifest(&mut self, manifest: &RunManifest) -> Result<()> {
        let text = serde_json::to_string_pretty(manifest)
            .map_err(|e| Error::Input(format!("serialize manifest: {e}")))?;
        let path = self.out_dir.join("manifest.json");
        fs::write(&path, text)
            .map_err(|e| Error::Input(format!("write {}: {e}", path.display())))?;
        Ok(())
    }

    /// Echo the resolved configuration as a TOML file usable with --config.
    pub fn emit_config_echo(&mut self, command: &str, echo: &BTreeMap<String, String>) -> Result<()> {
        let mut text = format!("[{command}]\n");
        for (k, v) in echo {
            text.push_str(&format!("{k} = \"{v}\"\n"));
        }
        let path = self.out_dir.join("config_echo.toml");
        self.record(&path, text.as_bytes())?;
        Ok(())
    }
}

pub fn versions() -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("qlrr".into(), env!("CARGO_PKG_VERSION").into());
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_series_is_header_only() {
        let dir = std::env::temp_dir().join(format!("qlrr-manifest-test-{}", std::process::id()));
        let mut em = Emitter::new(&dir).unwrap();
        let path = em.emit_series("empty.csv", &["a", "b"], &[]).unwrap();
        assert_eq!(fs::read_to_string(path).unwrap(), "a,b\n");
        fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn non_finite_values_are_numeric_errors() {
        let dir = std::env::temp_dir().join(format!("qlrr-manifest-nan-{}", std::process::id()));
        let mut em = Emitter::new(&dir).unwrap();
        let err = em.emit_series("bad.csv", &["a"], &[vec![f64::NAN]]);
        assert!(matches!(err, Err(Error::Numeric(_))));
        let err = em.emit_series("bad.csv", &["a"], &[vec![f64::INFINITY]]);
        assert!(matches!(err, Err(Error::Numeric(_))));
        fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn csv_floats_round_trip() {
        let dir = std::env::temp_dir().join(format!("qlrr-manifest-rt-{}", std::process::id()));
        let mut em = Emitter::new(&dir).unwrap();
        let values = vec![1.0 / 3.0, 6.25e-24, -0.1, f64::MIN_POSITIVE];
        let path = em
            .emit_series("rt.csv", &["v"], &values.iter().map(|v| vec![*v]).collect::<Vec<_>>())
            .unwrap();
        let text = fs::read_to_string(path).unwrap();
        for (line, v) in text.lines().skip(1).zip(&values) {
            assert_eq!(line.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        fs::remove_dir_all(dir).ok();
    }
}
