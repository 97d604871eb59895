//! Report envelopes, config hashing, and atomic output.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use kakeya_core::Result;

/// Every report carries the crate version, the hash of the resolved
/// configuration, and the master seed, so identical runs are byte-identical
/// and diffable.
#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    pub version: &'static str,
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub report: T,
}

pub fn config_hash<C: Serialize>(config: &C) -> String {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    let digest = Sha256::digest(&bytes);
    hex::encode(&digest[..16])
}

pub fn envelope<T: Serialize, C: Serialize>(config: &C, seed: Option<u64>, report: T) -> Envelope<T> {
    Envelope {
        version: env!("CARGO_PKG_VERSION"),
        config_hash: config_hash(config),
        seed,
        report,
    }
}

/// Write to `path` atomically (temp file + rename), or to stdout when no
/// path is given.
pub fn emit(path: Option<&PathBuf>, content: &str) -> Result<()> {
    match path {
        None => {
            print!("{content}");
            std::io::stdout().flush()?;
            Ok(())
        }
        Some(path) => write_atomic(path, content),
    }
}

pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(content.as_bytes())?;
        file.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}
