//! Delimited text for rotation paths: one sample per line,
//! `axis_x, axis_y, axis_z, angle`. Commas and/or whitespace separate
//! fields; blank lines and lines starting with `#` are skipped.

use std::io::Write;
use std::path::Path;

use super::{BallPoint, RotationPath, SpinError};

pub fn parse_path(text: &str, tolerance: f64) -> Result<RotationPath, SpinError> {
    let mut samples = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() != 4 {
            return Err(SpinError::Parse {
                line: i + 1,
                message: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let mut values = [0.0; 4];
        for (slot, field) in values.iter_mut().zip(&fields) {
            *slot = field.parse().map_err(|_| SpinError::Parse {
                line: i + 1,
                message: format!("`{field}` is not a number"),
            })?;
        }
        let point = BallPoint::new([values[0], values[1], values[2]], values[3]).map_err(|e| {
            SpinError::Parse {
                line: i + 1,
                message: e.to_string(),
            }
        })?;
        samples.push(point);
    }
    RotationPath::new(samples, tolerance)
}

pub fn read_path_file(path: &Path, tolerance: f64) -> Result<RotationPath, SpinError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpinError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_path(&text, tolerance)
}

/// Writes samples with shortest round-trip float formatting.
pub fn write_path<W: Write>(path: &RotationPath, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# axis_x,axis_y,axis_z,angle")?;
    for s in path.samples() {
        let [x, y, z] = s.axis();
        writeln!(out, "{x},{y},{z},{}", s.angle())?;
    }
    Ok(())
}
