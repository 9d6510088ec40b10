//! Signed boundary operators built from cell tables, and incidence products.

use crate::error::{LarError, Result};
use crate::lar::{characteristic_matrix, CellTable};
use crate::sparse::SignedSparseMatrix;

/// ∂₁ as an `nverts × nedges` matrix: −1 at the first listed vertex of each
/// edge, +1 at the second.
pub fn boundary_1(edges: &CellTable, nverts: usize) -> Result<SignedSparseMatrix> {
    let mut rows = Vec::with_capacity(2 * edges.len());
    let mut cols = Vec::with_capacity(2 * edges.len());
    let mut vals = Vec::with_capacity(2 * edges.len());
    for (j, e) in edges.cells.iter().enumerate() {
        if e.len() != 2 || e[0] == e[1] {
            return Err(LarError::Degenerate { cell: j, reason: format!("edge {:?}", e) });
        }
        for (&v, s) in e.iter().zip([-1i8, 1]) {
            if v >= nverts {
                return Err(LarError::IndexOutOfRange { index: v, len: nverts });
            }
            rows.push(v);
            cols.push(j);
            vals.push(s);
        }
    }
    SignedSparseMatrix::from_triplets(&rows, &cols, &vals, (nverts, edges.len()))
}

/// ∂₂ from per-face lists of signed edges. Every face must be a cycle, i.e.
/// its image under ∂₁ must vanish.
pub fn boundary_2_from_cycles(face_cycles: &[Vec<(usize, i8)>], d1: &SignedSparseMatrix) -> Result<SignedSparseMatrix> {
    let d2 = SignedSparseMatrix::from_columns(d1.ncols(), face_cycles.to_vec())?;
    for j in 0..d2.ncols() {
        let image = d1.apply(&d2.column_chain(j, 2))?;
        if !image.is_empty() {
            return Err(LarError::NotClosed { nonzeros: image.support_len() });
        }
    }
    Ok(d2)
}

/// δ_{p−1} = ∂ₚᵀ.
pub fn coboundary(p_boundary: &SignedSparseMatrix) -> SignedSparseMatrix {
    p_boundary.transpose()
}

/// Incidence between p-cells and q-cells: `Mp · Mqᵀ` with entries below
/// `threshold` dropped and the survivors set to 1.
///
/// Entry (i, j) of the raw product counts the vertices shared by cell i
/// and cell j; the result flags the pairs that share at least `threshold`.
pub fn incidence(mp: &SignedSparseMatrix, mq: &SignedSparseMatrix, threshold: usize) -> Result<SignedSparseMatrix> {
    if mp.ncols() != mq.ncols() {
        return Err(LarError::DimensionMismatch(format!(
            "characteristic matrices over {} and {} vertices",
            mp.ncols(),
            mq.ncols()
        )));
    }
    let counts = shared_vertex_counts(mp, mq)?;
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    for (j, col) in counts.iter().enumerate() {
        for &(i, c) in col {
            if c >= threshold as u32 {
                rows.push(i);
                cols.push(j);
            }
        }
    }
    let vals = vec![1i8; rows.len()];
    SignedSparseMatrix::from_triplets(&rows, &cols, &vals, (mp.nrows(), mq.nrows()))
}

/// Raw `Mp · Mqᵀ` counts, column by column. Counts can exceed the 8-bit
/// range for large cells, so they are kept wide here.
pub fn shared_vertex_counts(mp: &SignedSparseMatrix, mq: &SignedSparseMatrix) -> Result<Vec<Vec<(usize, u32)>>> {
    if mp.ncols() != mq.ncols() {
        return Err(LarError::DimensionMismatch("vertex counts differ".into()));
    }
    // column v of Mp lists the p-cells containing v
    let by_vertex = mp;
    let mut acc = vec![0u32; mp.nrows()];
    let mut out = Vec::with_capacity(mq.nrows());
    let mq_rows = mq.transpose();
    for j in 0..mq.nrows() {
        let mut touched = Vec::new();
        for (v, _) in mq_rows.column(j) {
            for (i, _) in by_vertex.column(v) {
                if acc[i] == 0 {
                    touched.push(i);
                }
                acc[i] += 1;
            }
        }
        touched.sort_unstable();
        out.push(touched.iter().map(|&i| (i, std::mem::take(&mut acc[i]))).collect());
    }
    Ok(out)
}

/// Convenience wrapper: incidence between two cell tables.
pub fn table_incidence(p: &CellTable, q: &CellTable, nverts: usize, threshold: usize) -> Result<SignedSparseMatrix> {
    incidence(&characteristic_matrix(p, nverts)?, &characteristic_matrix(q, nverts)?, threshold)
}
