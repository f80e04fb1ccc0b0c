//! Run manifests and the error type shared by the commands.

use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Why a command stopped. `Usage` covers bad flags, missing inputs and
/// invalid data (exit code 2); `Internal` everything else (exit code 1).
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Internal(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Internal(_) => 1,
        }
    }

    /// Single line, suitable for scripts.
    pub fn reason(&self) -> String {
        let (Failure::Usage(r) | Failure::Internal(r)) = self;
        r.replace('\n', " ")
    }
}

impl From<pgee::Error> for Failure {
    fn from(e: pgee::Error) -> Self {
        match &e {
            pgee::Error::Io { source, .. } if source.kind() == ErrorKind::NotFound => {
                Failure::Usage(e.to_string())
            }
            pgee::Error::Io { .. } | pgee::Error::Serialize(_) => Failure::Internal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

pub type Outcome<T = ()> = Result<T, Failure>;

pub fn internal(context: impl std::fmt::Display, e: impl std::fmt::Display) -> Failure {
    Failure::Internal(format!("{context}: {e}"))
}

/// Checks an input exists before anything is read, so the reason names the
/// role (`labels: not found`) rather than the path.
pub fn require_file(role: &str, path: &Path) -> Outcome {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("{role}: not found")))
    }
}

pub fn create_dir(dir: &Path) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| internal(dir.display(), e))
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Outcome {
    fs::write(path, contents).map_err(|e| internal(path.display(), e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(|e| internal(path.display(), e))?;
    write_file(path, text + "\n")
}

#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub role: String,
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

pub fn hash_file(role: &str, path: &Path, shown: &str) -> Outcome<FileRecord> {
    let data = fs::read(path).map_err(|e| internal(path.display(), e))?;
    let digest = Sha256::digest(&data);
    Ok(FileRecord {
        role: role.to_string(),
        path: shown.to_string(),
        bytes: data.len() as u64,
        sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
    })
}

/// Everything needed to replay a run. Outputs are listed by file name only so
/// that two runs into different directories give the same manifest.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: &'static str,
    pub pgee_version: &'static str,
    pub cli_version: &'static str,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<FileRecord>,
    /// Wall-clock seconds per stage; absent for commands whose manifest must
    /// be byte-identical across runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<serde_json::Value>,
    pub summary: serde_json::Value,
}

impl Manifest {
    pub fn new(command: &'static str, seed: Option<u64>, config: serde_json::Value) -> Self {
        Manifest {
            command,
            pgee_version: pgee::VERSION,
            cli_version: env!("CARGO_PKG_VERSION"),
            seed,
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
            timing: None,
            summary: serde_json::Value::Null,
        }
    }

    pub fn input(&mut self, role: &str, path: &Path) -> Outcome {
        let rec = hash_file(role, path, &path.display().to_string())?;
        self.inputs.push(rec);
        Ok(())
    }

    pub fn output(&mut self, role: &str, dir: &Path, name: &str) -> Outcome {
        let rec = hash_file(role, &dir.join(name), name)?;
        self.outputs.push(rec);
        Ok(())
    }

    pub fn save(&self, dir: &Path) -> Outcome<PathBuf> {
        let path = dir.join("manifest.json");
        write_json(&path, self)?;
        Ok(path)
    }
}
