//! Artifact emission: deterministic JSON/CSV with provenance (tool version
//! and a hash of the effective configuration) embedded in every file.

use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of the canonical JSON serialisation of the effective config,
/// with the artifact destination and encoding excluded: the hash identifies
/// the computation, and the same run written to two paths or two formats is
/// the same run.
pub fn config_hash(config: &RunConfig) -> String {
    let mut hashed = config.clone();
    hashed.out = None;
    hashed.format = None;
    let canonical = serde_json::to_string(&hashed).expect("config serialises");
    let digest = Sha256::digest(canonical.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Wrap a JSON payload with provenance fields and serialise it (sorted keys,
/// so byte-identical across runs).
pub fn json_artifact(config: &RunConfig, payload: serde_json::Value) -> String {
    let document = serde_json::json!({
        "version": TOOL_VERSION,
        "config_hash": config_hash(config),
        "result": payload,
    });
    let mut text = serde_json::to_string_pretty(&document).expect("document serialises");
    text.push('\n');
    text
}

/// CSV with provenance comment lines.
pub fn csv_artifact(config: &RunConfig, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut text = String::new();
    text.push_str(&format!("# version={TOOL_VERSION}\n"));
    text.push_str(&format!("# config_hash={}\n", config_hash(config)));
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

/// Shortest-roundtrip float formatting (deterministic).
pub fn fmt_f64(value: f64) -> String {
    let mut buffer = ryu_like(value);
    if buffer == "-0" {
        buffer = "0".into();
    }
    buffer
}

fn ryu_like(value: f64) -> String {
    // `{}` on f64 is Rust's shortest-roundtrip formatting.
    format!("{value}")
}

/// Write to the configured path, or stdout when none is set.
pub fn emit(out: Option<&str>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let path = Path::new(path);
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)
                        .map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
                }
            }
            std::fs::write(path, content)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => {
            let stdout = std::io::stdout();
            let mut handle = stdout.lock();
            handle
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
