//! `.lar.json` documents: vertex rows plus 1-based cell tables.
//!
//! ```json
//! {
//!   "dim": 3,
//!   "V": [[0, 0, 0], [1, 0, 0]],
//!   "cells": {"1": [[1, 2]]},
//!   "metadata": {"exterior_column": 4}
//! }
//! ```
//!
//! Output is deterministic: one row per line, numbers with 17 significant
//! digits, so a saved document reloads and saves to the same bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::error::{io_err, LarError, Result};
use crate::lar::{CellTable, Complex, Geometry};

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct LarDocument {
    pub dim: usize,
    #[serde(rename = "V")]
    pub vertices: Vec<Vec<f64>>,
    #[serde(default)]
    pub cells: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default)]
    pub metadata: Option<Value>,
}

impl LarDocument {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_complex(complex: &Complex, metadata: Option<Value>) -> Self {
        let g = &complex.geometry;
        let cells = complex
            .tables
            .iter()
            .map(|(p, t)| (p.to_string(), t.cells.iter().map(|c| c.iter().map(|v| v + 1).collect()).collect()))
            .collect();
        LarDocument { dim: g.dim(), vertices: g.points().map(|p| p.to_vec()).collect(), cells, metadata }
    }

    pub fn to_complex(&self) -> Result<Complex> {
        if !(2..=3).contains(&self.dim) {
            return Err(LarError::Unsupported(format!("document dimension {}", self.dim)));
        }
        let mut coords = Vec::with_capacity(self.vertices.len() * self.dim);
        for (i, row) in self.vertices.iter().enumerate() {
            if row.len() != self.dim {
                return Err(LarError::Parse(format!("vertex {} has {} coordinates, expected {}", i + 1, row.len(), self.dim)));
            }
            coords.extend_from_slice(row);
        }
        let mut complex = Complex::new(Geometry::new(self.dim, coords)?);
        for (key, rows) in &self.cells {
            let p: usize = key.parse().map_err(|_| LarError::Parse(format!("cell key {key:?} is not a dimension")))?;
            if p == 0 || p > self.dim {
                return Err(LarError::Parse(format!("cell key {key:?} outside 1..={}", self.dim)));
            }
            let mut cells = Vec::with_capacity(rows.len());
            for row in rows {
                let mut c = Vec::with_capacity(row.len());
                for &v in row {
                    if v == 0 || v > self.vertices.len() {
                        return Err(LarError::IndexOutOfRange { index: v, len: self.vertices.len() });
                    }
                    c.push(v - 1);
                }
                cells.push(c);
            }
            complex = complex.with_table(CellTable::new(p, cells));
        }
        complex.validate()?;
        Ok(complex)
    }

    /// Deterministic pretty text, ending with a newline.
    pub fn to_json_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{{\n  \"dim\": {},\n  \"V\": [", self.dim);
        for (i, row) in self.vertices.iter().enumerate() {
            let nums: Vec<String> = row.iter().map(|&x| format_number(x)).collect();
            let sep = if i + 1 < self.vertices.len() { "," } else { "" };
            let _ = writeln!(s, "    [{}]{}", nums.join(", "), sep);
        }
        s.push_str("  ],\n  \"cells\": {");
        let n = self.cells.len();
        for (k, (key, rows)) in self.cells.iter().enumerate() {
            let _ = write!(s, "\n    \"{}\": [", key);
            for (i, row) in rows.iter().enumerate() {
                let ids: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                let sep = if i + 1 < rows.len() { "," } else { "" };
                let _ = write!(s, "\n      [{}]{}", ids.join(", "), sep);
            }
            if !rows.is_empty() {
                s.push_str("\n    ");
            }
            s.push(']');
            if k + 1 < n {
                s.push(',');
            }
        }
        if n > 0 {
            s.push_str("\n  ");
        }
        s.push('}');
        if let Some(m) = &self.metadata {
            let _ = write!(s, ",\n  \"metadata\": {}", serde_json::to_string(m).expect("values serialize"));
        }
        s.push_str("\n}\n");
        s
    }
}

/// `%.17g`: 17 significant digits, trailing zeros dropped, exponent form
/// outside [1e-4, 1e17).
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn load_document(path: impl AsRef<Path>) -> Result<LarDocument> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    LarDocument::parse(&text)
}

pub fn save_document(doc: &LarDocument, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, doc.to_json_string()).map_err(io_err(path))
}

pub fn load_lar(path: impl AsRef<Path>) -> Result<Complex> {
    load_document(path)?.to_complex()
}

pub fn save_lar(complex: &Complex, path: impl AsRef<Path>) -> Result<()> {
    save_document(&LarDocument::from_complex(complex, None), path)
}
