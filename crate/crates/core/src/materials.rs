//! Materials database in CSV form:
//!
//! ```text
//! name,n,M_eV,cauchy_B_m2,kerr_K_m_per_V2,n2_m2_per_W,lambda_ref_m
//! glassA,1.5,6.667,5.0e-15,1.0e-16,1.0e-20,5.0e-7
//! ```
//!
//! Lines starting with `#` are comments. An empty `M_eV` defaults to `10/n`;
//! either Kerr column may be empty but not both. Every row is calibrated on
//! load, and errors name the offending line.

use std::collections::HashSet;
use std::path::Path;

use crate::calibration::{calibrate, CalibrationRecord, Measurements};
use crate::error::{Error, Result};
use crate::medium::Medium;

pub const HEADER: [&str; 7] = [
    "name",
    "n",
    "M_eV",
    "cauchy_B_m2",
    "kerr_K_m_per_V2",
    "n2_m2_per_W",
    "lambda_ref_m",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub medium: Medium,
    pub record: CalibrationRecord,
}

/// Reads and parses a database file. An unreadable file is reported as a
/// parse error on line 0.
pub fn load_materials(path: impl AsRef<Path>) -> Result<Vec<Material>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_materials(&text)
}

pub fn parse_materials(text: &str) -> Result<Vec<Material>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let Some((header_line, header)) = lines.next() else {
        return Ok(Vec::new());
    };
    if header.split(',').map(str::trim).ne(HEADER.iter().copied()) {
        return Err(Error::Parse {
            line: header_line,
            message: format!("expected header {}", HEADER.join(",")),
        });
    }
    let mut names = HashSet::new();
    let mut out = Vec::new();
    for (line, text) in lines {
        let at = |e: Error| Error::Parse {
            line,
            message: e.to_string(),
        };
        let row: Vec<&str> = text.split(',').map(str::trim).collect();
        if row.len() != HEADER.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} columns, found {}", HEADER.len(), row.len()),
            });
        }
        let name = row[0].to_string();
        if name.is_empty() {
            return Err(at(Error::Validation("empty material name".into())));
        }
        let required = |i: usize| number(row[i], HEADER[i]).and_then(|v| v.ok_or_else(|| empty(HEADER[i])));
        let n = required(1).map_err(at)?;
        let m_scale = number(row[2], HEADER[2]).map_err(at)?.unwrap_or(10.0 / n);
        let measurements = Measurements {
            material: name.clone(),
            n,
            m_scale,
            b_m2: required(3).map_err(at)?,
            c_m4: None,
            k_m_per_v2: number(row[4], HEADER[4]).map_err(at)?,
            n2_m2_per_w: number(row[5], HEADER[5]).map_err(at)?,
            lambda_ref_m: required(6).map_err(at)?,
        };
        if !names.insert(name.clone()) {
            return Err(at(Error::Validation(format!("duplicate material '{name}'"))));
        }
        let record = calibrate(&measurements).map_err(at)?;
        let medium = record.medium().map_err(at)?;
        out.push(Material { medium, record });
    }
    Ok(out)
}

fn number(cell: &str, column: &str) -> Result<Option<f64>> {
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse::<f64>()
        .map(Some)
        .map_err(|_| Error::Validation(format!("{column}: '{cell}' is not a number")))
}

fn empty(column: &str) -> Error {
    Error::Validation(format!("{column} is required"))
}
