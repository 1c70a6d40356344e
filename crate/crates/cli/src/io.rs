//! Matrix, vector and image persistence.
//!
//! Binary format: 8-byte magic `L0RECOV1`, two 64-bit little-endian unsigned
//! dimensions (rows, cols), then row-major IEEE-754 doubles, little-endian.
//! Vectors are stored as n x 1 matrices. CSV holds one matrix row per line
//! with `.` as the decimal separator; a vector is one value per line. Images
//! are exported as 8-bit binary PGM (P5) with linear scaling from [0, max].

use std::fs;
use std::path::Path;

use l0recov_core::{DenseMatrix, SignalVector};

use crate::error::CliError;

pub const MAGIC: &[u8; 8] = b"L0RECOV1";

fn io_err(path: &Path, what: impl std::fmt::Display) -> CliError {
    CliError::io(format!("{}: {what}", path.display()))
}

/// Serializes a matrix to the binary format.
pub fn write_matrix_bin(path: &Path, a: &DenseMatrix) -> Result<(), CliError> {
    let mut bytes = Vec::with_capacity(24 + 8 * a.entries().len());
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&(a.rows() as u64).to_le_bytes());
    bytes.extend_from_slice(&(a.cols() as u64).to_le_bytes());
    for v in a.entries() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

/// Serializes a vector as an n x 1 matrix in the binary format.
pub fn write_vector_bin(path: &Path, v: &[f64]) -> Result<(), CliError> {
    let m = DenseMatrix::from_entries(v.len(), 1, v.to_vec())
        .map_err(|e| io_err(path, e))?;
    write_matrix_bin(path, &m)
}

/// Reads a matrix from the binary format, reporting the byte offset of any
/// structural problem.
pub fn read_matrix_bin(path: &Path) -> Result<DenseMatrix, CliError> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    if bytes.len() < 8 || &bytes[..8] != MAGIC {
        return Err(io_err(path, "bad magic at byte offset 0 (expected L0RECOV1)"));
    }
    if bytes.len() < 24 {
        return Err(io_err(
            path,
            format!("truncated header at byte offset {} (need 24 bytes)", bytes.len()),
        ));
    }
    let rows = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let cols = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
    let expected = 24 + 8 * rows.saturating_mul(cols);
    if bytes.len() != expected {
        return Err(io_err(
            path,
            format!(
                "payload for {rows}x{cols} doubles ends at byte offset {} but file has {} bytes",
                expected,
                bytes.len()
            ),
        ));
    }
    let entries: Vec<f64> = bytes[24..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DenseMatrix::from_entries(rows, cols, entries).map_err(|e| io_err(path, e))
}

/// Reads a vector stored as an n x 1 (or 1 x n) binary matrix.
pub fn read_vector_bin(path: &Path) -> Result<Vec<f64>, CliError> {
    let m = read_matrix_bin(path)?;
    if m.rows() != 1 && m.cols() != 1 {
        return Err(io_err(
            path,
            format!("expected a vector but found a {}x{} matrix", m.rows(), m.cols()),
        ));
    }
    Ok(m.entries().to_vec())
}

/// Writes a matrix as CSV, one row per line.
pub fn write_matrix_csv(path: &Path, a: &DenseMatrix) -> Result<(), CliError> {
    let mut out = String::new();
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Reads a CSV matrix; every line must have the same number of fields.
pub fn read_matrix_csv(path: &Path) -> Result<DenseMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut entries = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        match cols {
            None => cols = Some(fields.len()),
            Some(c) if c != fields.len() => {
                return Err(io_err(
                    path,
                    format!("line {}: expected {c} fields, found {}", lineno + 1, fields.len()),
                ))
            }
            _ => {}
        }
        for f in fields {
            let v: f64 = f.trim().parse().map_err(|_| {
                io_err(path, format!("line {}: unparseable number '{f}'", lineno + 1))
            })?;
            entries.push(v);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| io_err(path, "empty CSV matrix"))?;
    DenseMatrix::from_entries(rows, cols, entries).map_err(|e| io_err(path, e))
}

/// Reads a CSV vector (one value per line, or a single-column matrix).
pub fn read_vector_csv(path: &Path) -> Result<Vec<f64>, CliError> {
    let m = read_matrix_csv(path)?;
    if m.cols() != 1 && m.rows() != 1 {
        return Err(io_err(
            path,
            format!("expected a vector but found a {}x{} CSV matrix", m.rows(), m.cols()),
        ));
    }
    Ok(m.entries().to_vec())
}

/// Dispatches on the `.csv` extension, otherwise binary.
pub fn read_matrix_auto(path: &Path) -> Result<DenseMatrix, CliError> {
    if path.extension().is_some_and(|e| e == "csv") {
        read_matrix_csv(path)
    } else {
        read_matrix_bin(path)
    }
}

/// Dispatches on the `.csv` extension, otherwise binary.
pub fn read_vector_auto(path: &Path) -> Result<Vec<f64>, CliError> {
    if path.extension().is_some_and(|e| e == "csv") {
        read_vector_csv(path)
    } else {
        read_vector_bin(path)
    }
}

/// Writes a square image as 8-bit binary PGM, scaling [0, max] to [0, 255].
pub fn write_pgm(path: &Path, pixels: &[f64], side: usize) -> Result<(), CliError> {
    if pixels.len() != side * side {
        return Err(io_err(
            path,
            format!("image length {} does not match side {side}", pixels.len()),
        ));
    }
    let max = pixels.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut bytes = format!("P5\n{side} {side}\n255\n").into_bytes();
    for &p in pixels {
        let level = if max > 0.0 {
            (p.abs() / max * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            0
        };
        bytes.push(level);
    }
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

/// Round-trip helper: a [`SignalVector`] to and from the vector formats.
pub fn write_signal_bin(path: &Path, x: &SignalVector) -> Result<(), CliError> {
    write_vector_bin(path, x.as_slice())
}
