//! Run manifests: everything needed to repeat a CLI run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::io::{read_text, IoError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// All parameters as parsed, including defaults.
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    /// SHA-256 of each input file, keyed by flag name.
    pub inputs: BTreeMap<String, InputDigest>,
    /// RFC 3339 UTC time the run started.
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl RunManifest {
    pub fn new(command: &str, params: serde_json::Value, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_owned(),
            params,
            seed,
            version: VERSION.to_owned(),
            inputs: BTreeMap::new(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn add_input(&mut self, flag: &str, path: &Path) -> Result<(), IoError> {
        let text = read_text(path)?;
        self.inputs.insert(
            flag.to_owned(),
            InputDigest {
                path: path.display().to_string(),
                sha256: sha256_hex(text.as_bytes()),
            },
        );
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `out.json` → `out.json.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}
