//! File formats: LAR JSON, Matrix Market operators, OBJ meshes and
//! exploded views.

pub mod explode;
pub mod lar_json;
pub mod mtx;
pub mod obj;

use std::path::Path;

use serde_json::json;

pub use explode::{explode, ExplodedCell};
pub use lar_json::{load_document, load_lar, save_document, save_lar, LarDocument};
pub use mtx::{read_mtx, write_mtx};
pub use obj::{export_exploded_obj, export_obj, import_obj, parse_obj};

use crate::error::{io_err, LarError, Result};
use crate::lar::{ChainComplexResult, Complex};

/// File name of ∂ₚ inside an operator directory.
pub fn operator_file(p: usize) -> String {
    format!("d{p}.mtx")
}

/// Document for an arranged complex. The metadata records the 1-based
/// column of the exterior cell in the top operator.
pub fn result_document(result: &ChainComplexResult) -> LarDocument {
    let mut complex = Complex::new(result.geometry.clone());
    for t in &result.tables {
        complex = complex.with_table(t.clone());
    }
    let meta = json!({ "exterior_column": result.exterior.map(|x| x + 1) });
    LarDocument::from_complex(&complex, Some(meta))
}

/// Writes the document and, when a directory is given, every operator.
pub fn save_result(result: &ChainComplexResult, path: impl AsRef<Path>, operators: Option<&Path>) -> Result<()> {
    save_document(&result_document(result), path)?;
    if let Some(dir) = operators {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        for (p, op) in result.boundaries.iter().enumerate() {
            write_mtx(op, dir.join(operator_file(p + 1)))?;
        }
    }
    Ok(())
}

/// Reloads what [`save_result`] wrote.
pub fn load_result(path: impl AsRef<Path>, operators: &Path) -> Result<ChainComplexResult> {
    let doc = load_document(path)?;
    let complex = doc.to_complex()?;
    let d = doc.dim;
    let mut tables = Vec::with_capacity(d);
    let mut boundaries = Vec::with_capacity(d);
    for p in 1..=d {
        tables.push(complex.table(p).cloned().ok_or(LarError::MissingTable(p))?);
        boundaries.push(read_mtx(operators.join(operator_file(p)))?);
    }
    let exterior = doc
        .metadata
        .as_ref()
        .and_then(|m| m.get("exterior_column"))
        .and_then(|v| v.as_u64())
        .filter(|&c| c >= 1)
        .map(|c| c as usize - 1);
    Ok(ChainComplexResult { geometry: complex.geometry, tables, boundaries, exterior })
}
