//! Per-iteration records of the global placement loop.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{PlaceError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub k: usize,
    /// Exact HPWL of the movable cells.
    pub hpwl: f64,
    /// Weighted-average wirelength at the current smoothing.
    pub wa: f64,
    pub energy: f64,
    pub tau: f64,
    pub lambda: f64,
    pub gamma: f64,
    /// Step accepted by the line search.
    pub alpha: f64,
}

/// Writes one JSON object per line.
pub fn write_jsonl(records: &[IterationTrace], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| PlaceError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).expect("trace record serializes");
        writeln!(out, "{line}").map_err(|e| PlaceError::io(path, e))?;
    }
    out.flush().map_err(|e| PlaceError::io(path, e))
}

pub fn read_jsonl(path: &Path) -> Result<Vec<IterationTrace>> {
    let text = std::fs::read_to_string(path).map_err(|e| PlaceError::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| PlaceError::Syntax {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}
