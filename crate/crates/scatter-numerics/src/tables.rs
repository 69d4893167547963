//! Flat little-endian binary tables with JSON sidecars.
//!
//! A table `name.bin` holds raw `f64` values (complex tables interleave
//! re/im). Its sidecar `name.json` describes the axes; the SHA-256 of the
//! binary payload is returned so callers can record it in a manifest.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::C64;

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("table {path} has {bytes} bytes, not a multiple of {unit}")]
    Truncated { path: PathBuf, bytes: usize, unit: usize },
    #[error("sidecar json for {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> TableError + '_ {
    move |source| TableError::Io { path: path.to_path_buf(), source }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn f64_bytes(values: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len() * 8);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn c64_bytes(values: &[C64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len() * 16);
    for v in values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

fn write_with_sidecar<M: Serialize>(path: &Path, bytes: &[u8], meta: &M) -> Result<String, TableError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
    }
    fs::write(path, bytes).map_err(io_err(path))?;
    let side = path.with_extension("json");
    let json = serde_json::to_vec_pretty(meta).map_err(|source| TableError::Json { path: side.clone(), source })?;
    fs::write(&side, json).map_err(io_err(&side))?;
    Ok(sha256_hex(bytes))
}

/// Writes a real table plus sidecar; returns the payload checksum.
pub fn write_f64<M: Serialize>(path: &Path, values: &[f64], meta: &M) -> Result<String, TableError> {
    write_with_sidecar(path, &f64_bytes(values), meta)
}

/// Writes a complex table (interleaved re, im) plus sidecar; returns the checksum.
pub fn write_c64<M: Serialize>(path: &Path, values: &[C64], meta: &M) -> Result<String, TableError> {
    write_with_sidecar(path, &c64_bytes(values), meta)
}

pub fn read_f64(path: &Path) -> Result<Vec<f64>, TableError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    if bytes.len() % 8 != 0 {
        return Err(TableError::Truncated { path: path.to_path_buf(), bytes: bytes.len(), unit: 8 });
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect())
}

pub fn read_c64(path: &Path) -> Result<Vec<C64>, TableError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    if bytes.len() % 16 != 0 {
        return Err(TableError::Truncated { path: path.to_path_buf(), bytes: bytes.len(), unit: 16 });
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            C64::new(
                f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
            )
        })
        .collect())
}

pub fn read_sidecar(path: &Path) -> Result<serde_json::Value, TableError> {
    let side = path.with_extension("json");
    let bytes = fs::read(&side).map_err(io_err(&side))?;
    serde_json::from_slice(&bytes).map_err(|source| TableError::Json { path: side, source })
}

/// Checksum of a file on disk.
pub fn file_sha256(path: &Path) -> Result<String, TableError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    Ok(sha256_hex(&bytes))
}
