//! CSV output and run manifests.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::Resolved;
use crate::error::CliError;

/// 17 significant digits: round-trips every `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvOut {
    pub name: String,
    writer: csv::Writer<BufWriter<File>>,
    path: PathBuf,
}

impl CsvOut {
    pub fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self, CliError> {
        let path = dir.join(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut writer = csv::Writer::from_writer(BufWriter::new(file));
        writer.write_record(header)?;
        Ok(Self {
            name: name.to_string(),
            writer,
            path,
        })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), CliError> {
        self.writer.flush().map_err(|e| CliError::io(&self.path, e))
    }

    /// Flush and return the file name.
    pub fn finish(mut self) -> Result<String, CliError> {
        self.flush()?;
        Ok(self.name)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Timings {
    pub started_unix_ms: u128,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub resolved: Resolved,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub exit_code: u8,
    pub timings: Timings,
}

pub const MANIFEST: &str = "manifest.json";

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let path = dir.join(MANIFEST);
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::numerical(e.to_string()))?;
        std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read manifest {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("manifest {}: {e}", path.display())))
    }
}
