//! Report envelope shared by every subcommand.
//!
//! A run prints exactly one report to standard output (JSON by default)
//! and exits with a semantic code. Reports embed a `sha256` digest of every
//! input file so a stored report pins the exact inputs it was produced
//! from. The `timing_ms` field is always the last line of either rendering,
//! so byte-level comparisons can strip it and compare the rest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Success, including "the property holds" and "the operator decomposed".
pub const EXIT_OK: i32 = 0;
/// A queried property is false (check-d / check-dw).
pub const EXIT_PROPERTY_FALSE: i32 = 2;
/// Decomposition failed because facet transports disagree on the point map.
pub const EXIT_PHI_DISAGREEMENT: i32 = 3;
/// The operator is not a surjective isometry for the relevant norm.
pub const EXIT_NOT_ISOMETRY: i32 = 4;
/// A star-property counterexample was found.
pub const EXIT_ST_FALSIFIED: i32 = 5;
/// Command-line usage error (unknown command, missing required flag).
pub const EXIT_USAGE: i32 = 64;
/// An input file could not be read, parsed, or validated.
pub const EXIT_DATA: i32 = 65;
/// Internal inconsistency: a witness failed to replay, or a state that is
/// unreachable for well-formed inputs was reached.
pub const EXIT_INTERNAL: i32 = 70;

/// A failure that aborts the run before a report exists. The message goes
/// to standard error; nothing is printed to standard output.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<tset_core::io::IoError> for Failure {
    fn from(e: tset_core::io::IoError) -> Self {
        Failure::Data(e.to_string())
    }
}

/// One input file: its bytes plus the digest recorded in the report.
pub struct InputFile {
    pub path: PathBuf,
    pub text: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn read_input(path: &Path) -> Result<InputFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Data(format!("cannot read {}: {e}", path.display())))?;
    Ok(InputFile {
        path: path.to_path_buf(),
        sha256: sha256_hex(text.as_bytes()),
        text,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

/// The envelope. Field order is the JSON order; `timing_ms` stays last.
#[derive(Debug, Serialize)]
pub struct Report {
    pub format: u32,
    pub command: String,
    pub argv: Vec<String>,
    pub inputs: BTreeMap<String, InputRecord>,
    pub seed: u64,
    pub samples: usize,
    pub verdict: String,
    pub exit_code: i32,
    pub detail: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_verified: Option<bool>,
    pub timing_ms: u128,
}

impl Report {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => tset_core::io::to_json_string(self),
            OutputFormat::Text => self.render_text(),
        }
    }

    fn render_text(&self) -> String {
        let mut lines = Vec::new();
        lines.push(format!("command: {}", self.command));
        lines.push(format!("argv: {}", self.argv.join(" ")));
        for (flag, rec) in &self.inputs {
            lines.push(format!("input {flag}: {} sha256={}", rec.path, rec.sha256));
        }
        lines.push(format!("seed: {}", self.seed));
        lines.push(format!("samples: {}", self.samples));
        lines.push(format!("verdict: {}", self.verdict));
        lines.push(format!("exit-code: {}", self.exit_code));
        lines.push(format!(
            "detail: {}",
            serde_json::to_string(&self.detail).expect("detail serializes")
        ));
        if let Some(v) = self.witness_verified {
            lines.push(format!("witness-verified: {v}"));
        }
        lines.push(format!("timing-ms: {}", self.timing_ms));
        lines.push(String::new());
        lines.join("\n")
    }
}
