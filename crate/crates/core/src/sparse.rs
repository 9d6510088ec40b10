//! Signed sparse matrices in compressed-sparse-column form.
//!
//! Every operator of a chain complex, as well as the binary characteristic
//! matrices, is stored as a [`SignedSparseMatrix`] whose entries are 8-bit
//! signed integers. Products accumulate in `i32` and are narrowed back only
//! after pruning, so an entry that does not fit is reported instead of
//! wrapping.

use crate::error::{LarError, Result};

/// Compressed-sparse-column matrix with `i8` values.
///
/// Invariants: `col_ptr[0] == 0`, `col_ptr` is nondecreasing and ends at
/// `row_idx.len()`, rows are strictly increasing inside a column and no
/// stored value is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedSparseMatrix {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    vals: Vec<i8>,
}

/// A sparse p-chain: signed combination of p-cells.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chain {
    pub dim: usize,
    pub length: usize,
    entries: Vec<(usize, i32)>,
}

impl Chain {
    /// Builds a chain, summing repeated cells and dropping zero coefficients.
    pub fn new(dim: usize, length: usize, entries: impl IntoIterator<Item = (usize, i32)>) -> Result<Self> {
        let mut entries: Vec<(usize, i32)> = entries.into_iter().collect();
        for &(i, _) in &entries {
            if i >= length {
                return Err(LarError::IndexOutOfRange { index: i, len: length });
            }
        }
        entries.sort_unstable_by_key(|e| e.0);
        let mut out: Vec<(usize, i32)> = Vec::with_capacity(entries.len());
        for (i, c) in entries {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 += c,
                _ => out.push((i, c)),
            }
        }
        out.retain(|e| e.1 != 0);
        Ok(Chain { dim, length, entries: out })
    }

    pub fn zero(dim: usize, length: usize) -> Self {
        Chain { dim, length, entries: Vec::new() }
    }

    pub fn singleton(dim: usize, length: usize, cell: usize, coeff: i32) -> Result<Self> {
        Self::new(dim, length, [(cell, coeff)])
    }

    /// Sorted `(cell, coefficient)` pairs with nonzero coefficients.
    pub fn entries(&self) -> &[(usize, i32)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn coeff(&self, cell: usize) -> i32 {
        self.entries
            .binary_search_by_key(&cell, |e| e.0)
            .map(|k| self.entries[k].1)
            .unwrap_or(0)
    }

    pub fn negated(&self) -> Chain {
        Chain {
            dim: self.dim,
            length: self.length,
            entries: self.entries.iter().map(|&(i, c)| (i, -c)).collect(),
        }
    }

    pub fn add(&self, other: &Chain) -> Result<Chain> {
        if self.length != other.length {
            return Err(LarError::LengthMismatch {
                what: "chain lengths",
                left: self.length,
                right: other.length,
            });
        }
        Chain::new(
            self.dim,
            self.length,
            self.entries.iter().chain(other.entries.iter()).copied(),
        )
    }
}

impl SignedSparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SignedSparseMatrix {
            nrows,
            ncols,
            col_ptr: vec![0; ncols + 1],
            row_idx: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        SignedSparseMatrix {
            nrows: n,
            ncols: n,
            col_ptr: (0..=n).collect(),
            row_idx: (0..n).collect(),
            vals: vec![1; n],
        }
    }

    /// Builds a matrix from coordinate triplets. Duplicates are summed and
    /// zero sums pruned.
    pub fn from_triplets(rows: &[usize], cols: &[usize], vals: &[i8], shape: (usize, usize)) -> Result<Self> {
        if rows.len() != cols.len() {
            return Err(LarError::LengthMismatch { what: "rows/cols", left: rows.len(), right: cols.len() });
        }
        if rows.len() != vals.len() {
            return Err(LarError::LengthMismatch { what: "rows/vals", left: rows.len(), right: vals.len() });
        }
        let (nrows, ncols) = shape;
        let mut columns: Vec<Vec<(usize, i32)>> = vec![Vec::new(); ncols];
        for ((&r, &c), &v) in rows.iter().zip(cols).zip(vals) {
            if r >= nrows {
                return Err(LarError::IndexOutOfRange { index: r, len: nrows });
            }
            if c >= ncols {
                return Err(LarError::IndexOutOfRange { index: c, len: ncols });
            }
            columns[c].push((r, v as i32));
        }
        Self::from_wide_columns(nrows, columns)
    }

    /// Builds a matrix from per-column entry lists (any order, duplicates summed).
    pub fn from_columns(nrows: usize, columns: Vec<Vec<(usize, i8)>>) -> Result<Self> {
        let wide = columns
            .into_iter()
            .map(|c| c.into_iter().map(|(r, v)| (r, v as i32)).collect())
            .collect();
        for col in &wide {
            for &(r, _) in col as &Vec<(usize, i32)> {
                if r >= nrows {
                    return Err(LarError::IndexOutOfRange { index: r, len: nrows });
                }
            }
        }
        Self::from_wide_columns(nrows, wide)
    }

    fn from_wide_columns(nrows: usize, columns: Vec<Vec<(usize, i32)>>) -> Result<Self> {
        let ncols = columns.len();
        let mut col_ptr = Vec::with_capacity(ncols + 1);
        let mut row_idx = Vec::new();
        let mut vals = Vec::new();
        col_ptr.push(0);
        for (j, mut col) in columns.into_iter().enumerate() {
            col.sort_unstable_by_key(|e| e.0);
            let mut k = 0;
            while k < col.len() {
                let r = col[k].0;
                let mut sum = 0i64;
                while k < col.len() && col[k].0 == r {
                    sum += col[k].1 as i64;
                    k += 1;
                }
                if sum != 0 {
                    let v = i8::try_from(sum).map_err(|_| LarError::Overflow { row: r, col: j, value: sum })?;
                    row_idx.push(r);
                    vals.push(v);
                }
            }
            col_ptr.push(row_idx.len());
        }
        Ok(SignedSparseMatrix { nrows, ncols, col_ptr, row_idx, vals })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_idx(&self) -> &[usize] {
        &self.row_idx
    }

    pub fn vals(&self) -> &[i8] {
        &self.vals
    }

    /// Rows and values of column `j`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, i8)> + '_ {
        let span = self.col_ptr[j]..self.col_ptr[j + 1];
        self.row_idx[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn column_nnz(&self, j: usize) -> usize {
        self.col_ptr[j + 1] - self.col_ptr[j]
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        let span = self.col_ptr[j]..self.col_ptr[j + 1];
        match self.row_idx[span.clone()].binary_search(&i) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => 0,
        }
    }

    /// All stored entries as `(row, col, value)` in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, i8)> + '_ {
        (0..self.ncols).flat_map(move |j| self.column(j).map(move |(i, v)| (i, j, v)))
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }

    /// Number of stored entries per row.
    pub fn row_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.nrows];
        for &r in &self.row_idx {
            counts[r] += 1;
        }
        counts
    }

    pub fn transpose(&self) -> SignedSparseMatrix {
        let counts = self.row_counts();
        let mut col_ptr = Vec::with_capacity(self.nrows + 1);
        col_ptr.push(0);
        for c in &counts {
            col_ptr.push(col_ptr.last().unwrap() + c);
        }
        let mut next = col_ptr.clone();
        let mut row_idx = vec![0; self.nnz()];
        let mut vals = vec![0; self.nnz()];
        // columns are visited in increasing order, so rows of the result stay sorted
        for j in 0..self.ncols {
            for (i, v) in self.column(j) {
                let slot = next[i];
                row_idx[slot] = j;
                vals[slot] = v;
                next[i] += 1;
            }
        }
        SignedSparseMatrix { nrows: self.ncols, ncols: self.nrows, col_ptr, row_idx, vals }
    }

    /// Exact integer product `self * rhs`.
    pub fn multiply(&self, rhs: &SignedSparseMatrix) -> Result<SignedSparseMatrix> {
        if self.ncols != rhs.nrows {
            return Err(LarError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows, self.ncols, rhs.nrows, rhs.ncols
            )));
        }
        let mut acc = vec![0i32; self.nrows];
        let mut mark = vec![usize::MAX; self.nrows];
        let mut touched = Vec::new();
        let mut col_ptr = Vec::with_capacity(rhs.ncols + 1);
        let mut row_idx = Vec::new();
        let mut vals = Vec::new();
        col_ptr.push(0);
        for j in 0..rhs.ncols {
            touched.clear();
            for (k, b) in rhs.column(j) {
                for (i, a) in self.column(k) {
                    if mark[i] != j {
                        mark[i] = j;
                        acc[i] = 0;
                        touched.push(i);
                    }
                    acc[i] += a as i32 * b as i32;
                }
            }
            touched.sort_unstable();
            for &i in &touched {
                let v = acc[i];
                if v != 0 {
                    let v8 = i8::try_from(v).map_err(|_| LarError::Overflow { row: i, col: j, value: v as i64 })?;
                    row_idx.push(i);
                    vals.push(v8);
                }
            }
            col_ptr.push(row_idx.len());
        }
        Ok(SignedSparseMatrix { nrows: self.nrows, ncols: rhs.ncols, col_ptr, row_idx, vals })
    }

    /// Matrix-chain product. The result has dimension `c.dim - 1`, which is
    /// the natural reading when `self` is a boundary operator.
    pub fn apply(&self, c: &Chain) -> Result<Chain> {
        if c.length != self.ncols {
            return Err(LarError::DimensionMismatch(format!(
                "chain of length {} against matrix with {} columns",
                c.length, self.ncols
            )));
        }
        let mut out: Vec<(usize, i32)> = Vec::new();
        for &(j, coeff) in c.entries() {
            for (i, v) in self.column(j) {
                out.push((i, coeff * v as i32));
            }
        }
        Chain::new(c.dim.saturating_sub(1), self.nrows, out)
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> SignedSparseMatrix {
        let mut col_ptr = Vec::with_capacity(cols.len() + 1);
        let mut row_idx = Vec::new();
        let mut vals = Vec::new();
        col_ptr.push(0);
        for &j in cols {
            for (i, v) in self.column(j) {
                row_idx.push(i);
                vals.push(v);
            }
            col_ptr.push(row_idx.len());
        }
        SignedSparseMatrix { nrows: self.nrows, ncols: cols.len(), col_ptr, row_idx, vals }
    }

    /// Column `j` as a chain of dimension `dim`.
    pub fn column_chain(&self, j: usize, dim: usize) -> Chain {
        Chain {
            dim,
            length: self.nrows,
            entries: self.column(j).map(|(i, v)| (i, v as i32)).collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<i32>> {
        let mut d = vec![vec![0; self.ncols]; self.nrows];
        for (i, j, v) in self.triplets() {
            d[i][j] = v as i32;
        }
        d
    }

    /// Checks the structural invariants of the CSC layout.
    pub fn is_canonical(&self) -> bool {
        if self.col_ptr.len() != self.ncols + 1 || self.col_ptr[0] != 0 {
            return false;
        }
        if *self.col_ptr.last().unwrap() != self.row_idx.len() || self.row_idx.len() != self.vals.len() {
            return false;
        }
        for j in 0..self.ncols {
            if self.col_ptr[j] > self.col_ptr[j + 1] {
                return false;
            }
            let rows = &self.row_idx[self.col_ptr[j]..self.col_ptr[j + 1]];
            if rows.windows(2).any(|w| w[0] >= w[1]) || rows.iter().any(|&r| r >= self.nrows) {
                return false;
            }
        }
        self.vals.iter().all(|&v| v != 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense_product(a: &[Vec<i32>], b: &[Vec<i32>]) -> Vec<Vec<i32>> {
        let n = a.len();
        let m = b.first().map_or(0, |r| r.len());
        let inner = b.len();
        let mut out = vec![vec![0; m]; n];
        for i in 0..n {
            for j in 0..m {
                for k in 0..inner {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        out
    }

    #[test]
    fn singleton_and_cancellation() {
        let m = SignedSparseMatrix::from_triplets(&[0], &[0], &[1], (1, 1)).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 0), 1);
        let z = SignedSparseMatrix::from_triplets(&[0, 0], &[0, 0], &[1, -1], (1, 1)).unwrap();
        assert!(z.is_zero());
        assert!(z.is_canonical());
    }

    #[test]
    fn triplet_errors() {
        assert!(matches!(
            SignedSparseMatrix::from_triplets(&[2], &[0], &[1], (2, 2)),
            Err(LarError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            SignedSparseMatrix::from_triplets(&[0, 1], &[0], &[1], (2, 2)),
            Err(LarError::LengthMismatch { .. })
        ));
        assert!(matches!(
            SignedSparseMatrix::from_triplets(&[0; 200], &[0; 200], &[1; 200], (1, 1)),
            Err(LarError::Overflow { .. })
        ));
    }

    #[test]
    fn transpose_row_vector() {
        let m = SignedSparseMatrix::from_triplets(&[0, 0], &[0, 1], &[-1, 1], (1, 2)).unwrap();
        let t = m.transpose();
        assert_eq!(t.shape(), (2, 1));
        assert_eq!(t.to_dense(), vec![vec![-1], vec![1]]);
    }

    #[test]
    fn identity_product() {
        let m = SignedSparseMatrix::from_triplets(&[0, 2, 1], &[0, 1, 2], &[1, -1, 1], (3, 3)).unwrap();
        assert_eq!(SignedSparseMatrix::identity(3).multiply(&m).unwrap(), m);
        assert_eq!(m.multiply(&SignedSparseMatrix::identity(3)).unwrap(), m);
    }

    #[test]
    fn multiply_shape_mismatch() {
        let a = SignedSparseMatrix::zeros(2, 3);
        let b = SignedSparseMatrix::zeros(2, 3);
        assert!(matches!(a.multiply(&b), Err(LarError::DimensionMismatch(_))));
    }

    #[test]
    fn product_overflow_is_reported() {
        // 1x130 row of ones times its transpose is 130
        let n = 130;
        let a = SignedSparseMatrix::from_triplets(&vec![0; n], &(0..n).collect::<Vec<_>>(), &vec![1; n], (1, n)).unwrap();
        assert!(matches!(a.multiply(&a.transpose()), Err(LarError::Overflow { .. })));
    }

    #[test]
    fn apply_single_edge() {
        let d1 = SignedSparseMatrix::from_triplets(&[0, 1], &[0, 0], &[-1, 1], (2, 1)).unwrap();
        let c = Chain::singleton(1, 1, 0, 1).unwrap();
        let b = d1.apply(&c).unwrap();
        assert_eq!(b.dim, 0);
        assert_eq!(b.entries(), &[(0, -1), (1, 1)]);
        assert!(d1.apply(&Chain::zero(1, 3)).is_err());
    }

    #[test]
    fn chain_sums_and_prunes() {
        let c = Chain::new(1, 4, [(2, 1), (0, 1), (2, -1)]).unwrap();
        assert_eq!(c.entries(), &[(0, 1)]);
        assert!(Chain::new(1, 2, [(5, 1)]).is_err());
    }

    fn small_matrix(max: usize) -> impl Strategy<Value = (usize, usize, Vec<(usize, usize, i8)>)> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            let entries = proptest::collection::vec((0..r, 0..c, prop_oneof![Just(-1i8), Just(1i8)]), 0..(r * c + 1));
            (Just(r), Just(c), entries)
        })
    }

    fn build(r: usize, c: usize, e: &[(usize, usize, i8)]) -> SignedSparseMatrix {
        // keep the first occurrence so that every entry stays in {-1, +1}
        let mut seen = std::collections::HashSet::new();
        let e: Vec<_> = e.iter().filter(|t| seen.insert((t.0, t.1))).collect();
        let rows: Vec<usize> = e.iter().map(|t| t.0).collect();
        let cols: Vec<usize> = e.iter().map(|t| t.1).collect();
        let vals: Vec<i8> = e.iter().map(|t| t.2).collect();
        SignedSparseMatrix::from_triplets(&rows, &cols, &vals, (r, c)).unwrap()
    }

    proptest! {
        #[test]
        fn transpose_is_involution((r, c, e) in small_matrix(10)) {
            let m = build(r, c, &e);
            prop_assert!(m.is_canonical());
            let t = m.transpose();
            prop_assert!(t.is_canonical());
            for (i, j, v) in m.triplets() {
                prop_assert_eq!(t.get(j, i), v);
            }
            prop_assert_eq!(t.transpose(), m);
        }

        #[test]
        fn multiply_matches_dense((r, k, e1) in small_matrix(10), c in 1usize..=10, seed in any::<u64>()) {
            let a = build(r, k, &e1);
            // derive B (k x c) from the seed so its inner dimension matches
            let mut s = seed;
            let mut e2 = Vec::new();
            for i in 0..k {
                for j in 0..c {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    match s >> 62 {
                        0 => e2.push((i, j, 1i8)),
                        1 => e2.push((i, j, -1i8)),
                        _ => {}
                    }
                }
            }
            let b = build(k, c, &e2);
            let dense = dense_product(&a.to_dense(), &b.to_dense());
            match a.multiply(&b) {
                Ok(p) => {
                    prop_assert!(p.is_canonical());
                    prop_assert_eq!(p.to_dense(), dense);
                }
                Err(LarError::Overflow { .. }) => {
                    prop_assert!(dense.iter().flatten().any(|&v| !(-128..=127).contains(&v)));
                }
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }

    #[test]
    fn random_8x8_against_dense() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let mut ea = Vec::new();
            let mut eb = Vec::new();
            for i in 0..8 {
                for j in 0..8 {
                    let x: u8 = rng.random_range(0..3);
                    if x > 0 {
                        ea.push((i, j, if x == 1 { 1 } else { -1 }));
                    }
                    let y: u8 = rng.random_range(0..3);
                    if y > 0 {
                        eb.push((i, j, if y == 1 { 1 } else { -1 }));
                    }
                }
            }
            let a = build(8, 8, &ea);
            let b = build(8, 8, &eb);
            assert_eq!(a.multiply(&b).unwrap().to_dense(), dense_product(&a.to_dense(), &b.to_dense()));
        }
    }
}
