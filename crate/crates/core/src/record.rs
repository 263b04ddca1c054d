//! Experiment records and their JSON Lines stream.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simsys::{critical_delta, similarity_dimension, Family, SimilaritySystem};

const RECHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub id: String,
    pub version: String,
    pub family: String,
    pub lambda: Option<f64>,
    pub depth: usize,
    pub dim: usize,
    pub s: f64,
    pub delta: f64,
    pub delta_c: f64,
    pub resolution: usize,
    pub operation: String,
    #[serde(default)]
    pub outputs: BTreeMap<String, f64>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    pub wall_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
}

impl ExperimentRecord {
    /// Recomputes `s` and `δ_c` from the family tag and checks the stored values.
    pub fn validate(&self) -> Result<()> {
        if self.version.is_empty() {
            return Err(Error::RecordMismatch(format!("{}: missing version tag", self.id)));
        }
        let expected_s = match Family::from_tag(&self.family, self.lambda) {
            Ok(Family::Custom) | Err(_) => None,
            Ok(family) => {
                let sys = SimilaritySystem::for_family(family, self.dim)?;
                Some(similarity_dimension(&sys, 1e-13)?)
            }
        };
        if let Some(s) = expected_s {
            if (s - self.s).abs() > RECHECK_TOL {
                return Err(Error::RecordMismatch(format!("{}: stored s {} but recomputed {s}", self.id, self.s)));
            }
        }
        let dc = critical_delta(self.s, self.dim);
        if (dc - self.delta_c).abs() > RECHECK_TOL {
            return Err(Error::RecordMismatch(format!(
                "{}: stored delta_c {} but recomputed {dc}",
                self.id, self.delta_c
            )));
        }
        Ok(())
    }

    /// Equality ignoring wall time.
    pub fn same_result(&self, other: &Self) -> bool {
        Self { wall_time: 0.0, ..self.clone() } == Self { wall_time: 0.0, ..other.clone() }
    }
}

pub fn write_record<W: Write>(record: &ExperimentRecord, mut out: W) -> std::io::Result<()> {
    let line = serde_json::to_string(record).map_err(std::io::Error::other)?;
    writeln!(out, "{line}")?;
    out.flush()
}

/// Reads and validates a record stream. A truncated final line (from an
/// interrupted writer) is ignored.
pub fn read_records<R: BufRead>(input: R) -> Result<Vec<ExperimentRecord>> {
    let lines: Vec<String> = input
        .lines()
        .collect::<std::io::Result<_>>()
        .map_err(|e| Error::Parse { line: 0, message: e.to_string() })?;
    let last = lines.len();
    let mut out = Vec::new();
    for (k, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<ExperimentRecord>(line) {
            Ok(r) => {
                r.validate()?;
                out.push(r);
            }
            Err(e) if k + 1 == last && e.is_eof() => break,
            Err(e) => {
                return Err(Error::Parse {
                    line: k + 1,
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(out)
}

/// FNV-1a hash of the experiment id, mixed into the top-level seed.
pub fn expand_seed(seed: u64, id: &str) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for b in seed.to_le_bytes().iter().chain(id.as_bytes()) {
        h ^= *b as u64;
        h = h.wrapping_mul(PRIME);
    }
    h
}
