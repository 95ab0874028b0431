//! Reading and writing the JSON documents and CSV traces used by the CLI.
//!
//! Every structured document is JSON. Graphs may also be read from DIMACS
//! edge lists (`p edge n m` header, 1-indexed `e u v` lines); a file is taken
//! as DIMACS when its first non-blank character is not `{`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::first_moment::TrialRecord;
use crate::graph::Graph;
use crate::nibble::TrajectoryRow;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_owned(),
        source,
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| IoError::Parse {
        path: path.to_owned(),
        msg: e.to_string(),
    })
}

/// A graph from a JSON graph document or a DIMACS edge list.
pub fn read_graph(path: &Path) -> Result<Graph, IoError> {
    let text = read_text(path)?;
    let parsed = if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        Graph::from_dimacs(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|msg| IoError::Parse {
        path: path.to_owned(),
        msg,
    })
}

/// Pretty-printed JSON with a trailing newline. Floats use the shortest
/// representation that parses back to the same value.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Write {
        path: path.to_owned(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    write_text(path, &to_json(value))
}

/// Per-vertex color restriction for the solver: `restrict[v] ⊆ L(v)`.
pub type Restriction = Vec<Vec<usize>>;

/// An abstract list label: an integer or a string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Str(String),
}

/// Trace CSV with columns `step,min_pv,max_pv,min_Q,max_deg,removed,retries`.
pub fn trajectory_csv<T: Scalar>(rows: &[TrajectoryRow<T>]) -> String {
    let mut out = String::from("step,min_pv,max_pv,min_Q,max_deg,removed,retries\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.step, r.min_pv, r.max_pv, r.min_q, r.max_deg, r.removed, r.retries
        )
        .unwrap();
    }
    out
}

/// Per-trial CSV with columns `trial,seed,count,error`; missing fields are
/// left empty.
pub fn trials_csv(rows: &[TrialRecord]) -> String {
    let mut out = String::from("trial,seed,count,error\n");
    for r in rows {
        let count = r.count.map(|c| c.to_string()).unwrap_or_default();
        let error = r.error.as_deref().unwrap_or("").replace(',', ";");
        writeln!(out, "{},{},{},{}", r.trial, r.seed, count, error).unwrap();
    }
    out
}
