use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use entwit::operator::MatrixJson;
use entwit::WitnessState;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliResult;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Checksum of a state's matrix in the JSON matrix format.
pub fn state_checksum(state: &WitnessState) -> String {
    let rho = state.density();
    let j = MatrixJson::from_matrix(rho.register(), rho.matrix());
    sha256_hex(&serde_json::to_vec(&j).expect("matrix serializes"))
}

pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report serializes");
    out.push(b'\n');
    out
}

/// CSV whose first line is `# config: <resolved config as JSON>`.
pub fn csv_bytes<C: Serialize>(config: &C, body: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> Vec<u8> {
    let mut out = Vec::new();
    writeln!(out, "# config: {}", serde_json::to_string(config).expect("config serializes")).unwrap();
    body(&mut out).unwrap();
    out
}

pub fn write(dir: &Path, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, bytes)?;
    Ok(path)
}
