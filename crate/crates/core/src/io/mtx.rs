//! Matrix Market coordinate files for signed operators (1-based).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{io_err, LarError, Result};
use crate::sparse::SignedSparseMatrix;

const BANNER: &str = "%%MatrixMarket matrix coordinate integer general";

/// Text form with entries in column-major order.
pub fn to_mtx_string(m: &SignedSparseMatrix) -> String {
    let mut s = String::with_capacity(16 * (m.nnz() + 2));
    let _ = writeln!(s, "{BANNER}");
    let _ = writeln!(s, "{} {} {}", m.nrows(), m.ncols(), m.nnz());
    for (i, j, v) in m.triplets() {
        let _ = writeln!(s, "{} {} {}", i + 1, j + 1, v);
    }
    s
}

pub fn parse_mtx(text: &str) -> Result<SignedSparseMatrix> {
    let mut lines = text.lines();
    let banner = lines.next().ok_or_else(|| LarError::Parse("empty matrix file".into()))?;
    let words: Vec<String> = banner.split_whitespace().map(|w| w.to_ascii_lowercase()).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" || words[2] != "coordinate" {
        return Err(LarError::Parse(format!("unsupported banner {banner:?}")));
    }
    if words[3] != "integer" || words[4] != "general" {
        return Err(LarError::Unsupported(format!("{} {} matrices", words[3], words[4])));
    }
    let mut body = lines.map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('%'));
    let header = body.next().ok_or_else(|| LarError::Parse("missing size line".into()))?;
    let size: Vec<usize> = header
        .split_whitespace()
        .map(|w| w.parse().map_err(|_| LarError::Parse(format!("bad size line {header:?}"))))
        .collect::<Result<_>>()?;
    let [nrows, ncols, nnz] = size[..] else {
        return Err(LarError::Parse(format!("bad size line {header:?}")));
    };
    let (mut rows, mut cols, mut vals) = (Vec::with_capacity(nnz), Vec::with_capacity(nnz), Vec::with_capacity(nnz));
    for line in body {
        let w: Vec<&str> = line.split_whitespace().collect();
        let bad = || LarError::Parse(format!("bad entry {line:?}"));
        if w.len() != 3 {
            return Err(bad());
        }
        let i: usize = w[0].parse().map_err(|_| bad())?;
        let j: usize = w[1].parse().map_err(|_| bad())?;
        let v: i64 = w[2].parse().map_err(|_| bad())?;
        if i == 0 || j == 0 || i > nrows || j > ncols {
            return Err(LarError::IndexOutOfRange { index: i.max(j), len: nrows.max(ncols) });
        }
        let v = i8::try_from(v).map_err(|_| LarError::Overflow { row: i - 1, col: j - 1, value: v })?;
        rows.push(i - 1);
        cols.push(j - 1);
        vals.push(v);
    }
    if rows.len() != nnz {
        return Err(LarError::Parse(format!("size line announces {nnz} entries, found {}", rows.len())));
    }
    SignedSparseMatrix::from_triplets(&rows, &cols, &vals, (nrows, ncols))
}

pub fn write_mtx(m: &SignedSparseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_mtx_string(m)).map_err(io_err(path))
}

pub fn read_mtx(path: impl AsRef<Path>) -> Result<SignedSparseMatrix> {
    let path = path.as_ref();
    parse_mtx(&std::fs::read_to_string(path).map_err(io_err(path))?)
}
