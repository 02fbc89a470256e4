//! Run metadata and all-or-nothing output files.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Everything needed to reproduce a run. Output paths are left out so the same
/// command writing to a different file yields identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub tradeopt_version: &'static str,
    pub command: &'static str,
    pub seed: Option<u64>,
    pub config: Value,
    pub config_sha256: String,
}

impl RunMeta {
    pub fn new(command: &'static str, seed: Option<u64>, config: Value) -> Self {
        let canonical = serde_json::to_vec(&json!({ "command": command, "seed": seed, "config": config }))
            .expect("config serializes");
        RunMeta {
            tradeopt_version: tradeopt_core::VERSION,
            command,
            seed,
            config_sha256: sha256_hex(&canonical),
            config,
        }
    }

    /// JSON document embedding the metadata next to the result.
    pub fn wrap<T: Serialize>(&self, result: &T) -> Result<Vec<u8>> {
        let doc = json!({ "meta": self, "result": result });
        let mut bytes = serde_json::to_vec_pretty(&doc)?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        Ok(bytes)
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Sends a result to `out` or stdout.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// CSV payload plus a `<out>.meta.json` sidecar; to stdout the metadata goes to stderr.
pub fn emit_csv(out: Option<&Path>, csv: &[u8], meta: &RunMeta) -> Result<()> {
    match out {
        Some(path) => {
            let meta_bytes = meta.to_json()?;
            write_atomic(path, csv)?;
            write_atomic(&sidecar(path), &meta_bytes)
        }
        None => {
            emit(None, csv)?;
            eprintln!("{}", String::from_utf8_lossy(&meta.to_json()?).trim_end());
            Ok(())
        }
    }
}
