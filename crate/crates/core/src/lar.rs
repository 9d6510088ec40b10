//! The LAR data model: vertex geometry plus per-dimension cell tables.
//!
//! A cell table stores each cell as the sorted list of its vertex indices,
//! i.e. the rows of the characteristic matrix Mₚ. Orientation lives in the
//! boundary operators, never in the tables.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{LarError, Result};
use crate::sparse::SignedSparseMatrix;

/// Vertex coordinates, `dim` reals per point, stored flat.
#[derive(Clone, Debug, PartialEq)]
pub struct Geometry {
    dim: usize,
    coords: Vec<f64>,
}

impl Geometry {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(LarError::DimensionMismatch(format!("unsupported embedding dimension {dim}")));
        }
        if coords.len() % dim != 0 {
            return Err(LarError::LengthMismatch { what: "coordinates per point", left: coords.len(), right: dim });
        }
        if let Some(bad) = coords.iter().position(|x| !x.is_finite()) {
            return Err(LarError::Parse(format!("non-finite coordinate at position {bad}")));
        }
        Ok(Geometry { dim, coords })
    }

    pub fn empty(dim: usize) -> Self {
        Geometry { dim, coords: Vec::new() }
    }

    pub fn from_points<const D: usize>(points: &[[f64; D]]) -> Result<Self> {
        Self::new(D, points.iter().flatten().copied().collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn point2(&self, i: usize) -> [f64; 2] {
        let p = self.point(i);
        [p[0], p[1]]
    }

    pub fn point3(&self, i: usize) -> [f64; 3] {
        let p = self.point(i);
        match self.dim {
            3 => [p[0], p[1], p[2]],
            2 => [p[0], p[1], 0.0],
            _ => [p[0], 0.0, 0.0],
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn push(&mut self, p: &[f64]) -> usize {
        debug_assert_eq!(p.len(), self.dim);
        self.coords.extend_from_slice(p);
        self.len() - 1
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks(self.dim)
    }

    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for p in self.points() {
            for (a, b) in c.iter_mut().zip(p) {
                *a += b;
            }
        }
        let n = self.len().max(1) as f64;
        c.iter_mut().for_each(|a| *a /= n);
        c
    }

    /// Geometry restricted to the given vertices, in that order.
    pub fn select(&self, verts: &[usize]) -> Geometry {
        let mut coords = Vec::with_capacity(verts.len() * self.dim);
        for &v in verts {
            coords.extend_from_slice(self.point(v));
        }
        Geometry { dim: self.dim, coords }
    }
}

/// Cells of one dimension, each a list of vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellTable {
    pub dim: usize,
    pub cells: Vec<Vec<usize>>,
}

impl CellTable {
    pub fn new(dim: usize, cells: Vec<Vec<usize>>) -> Self {
        CellTable { dim, cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.cells.iter()
    }

    /// Checks vertex ranges and the `p+1` distinct-vertex minimum.
    pub fn validate(&self, nverts: usize) -> Result<()> {
        for (k, cell) in self.cells.iter().enumerate() {
            for &v in cell {
                if v >= nverts {
                    return Err(LarError::IndexOutOfRange { index: v, len: nverts });
                }
            }
            let distinct: HashSet<_> = cell.iter().collect();
            if distinct.len() < self.dim + 1 {
                return Err(LarError::Degenerate {
                    cell: k,
                    reason: format!("{}-cell with {} distinct vertices", self.dim, distinct.len()),
                });
            }
        }
        Ok(())
    }
}

/// A cellular complex: geometry and cell tables for dimensions 1..=d.
#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub geometry: Geometry,
    pub tables: BTreeMap<usize, CellTable>,
}

impl Complex {
    pub fn new(geometry: Geometry) -> Self {
        Complex { geometry, tables: BTreeMap::new() }
    }

    pub fn with_table(mut self, table: CellTable) -> Self {
        self.tables.insert(table.dim, table);
        self
    }

    pub fn table(&self, p: usize) -> Option<&CellTable> {
        self.tables.get(&p)
    }

    /// Number of p-cells; vertices are implicit.
    pub fn count(&self, p: usize) -> Option<usize> {
        if p == 0 {
            Some(self.geometry.len())
        } else {
            self.tables.get(&p).map(|t| t.len())
        }
    }

    pub fn validate(&self) -> Result<()> {
        for t in self.tables.values() {
            t.validate(self.geometry.len())?;
        }
        Ok(())
    }
}

/// Output of an arrangement: the whole chain complex.
///
/// `boundaries[p-1]` is ∂ₚ. When `exterior` is set, the top operator keeps
/// the exterior cycle as that column, so every top-minus-one cell has
/// exactly two incidences. `tables[p-1]` holds p-cells, interior ones only
/// for the top dimension.
#[derive(Clone, Debug)]
pub struct ChainComplexResult {
    pub geometry: Geometry,
    pub tables: Vec<CellTable>,
    pub boundaries: Vec<SignedSparseMatrix>,
    pub exterior: Option<usize>,
}

impl ChainComplexResult {
    pub fn dim(&self) -> usize {
        self.boundaries.len()
    }

    /// Counts per dimension `[χ₀, …, χ_d]` over interior cells.
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![self.geometry.len()];
        c.extend(self.tables.iter().map(|t| t.len()));
        c
    }

    /// Top boundary operator without the exterior column.
    pub fn interior_boundary(&self) -> SignedSparseMatrix {
        let top = self.boundaries.last().expect("result has at least one operator");
        match self.exterior {
            Some(x) => {
                let cols: Vec<usize> = (0..top.ncols()).filter(|&j| j != x).collect();
                top.select_columns(&cols)
            }
            None => top.clone(),
        }
    }

    /// Euler characteristic with interior cells only.
    pub fn euler_interior(&self) -> i64 {
        alternating_sum(&self.counts())
    }

    /// Euler characteristic counting the exterior cell as a top cell.
    pub fn euler_with_exterior(&self) -> i64 {
        let mut c = self.counts();
        if self.exterior.is_some() {
            *c.last_mut().unwrap() += 1;
        }
        alternating_sum(&c)
    }
}

fn alternating_sum(counts: &[usize]) -> i64 {
    counts
        .iter()
        .enumerate()
        .map(|(p, &n)| if p % 2 == 0 { n as i64 } else { -(n as i64) })
        .sum()
}

/// Binary cells-by-vertices matrix Mₚ.
pub fn characteristic_matrix(table: &CellTable, nverts: usize) -> Result<SignedSparseMatrix> {
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    for (k, cell) in table.cells.iter().enumerate() {
        let mut vs = cell.clone();
        vs.sort_unstable();
        vs.dedup();
        for v in vs {
            if v >= nverts {
                return Err(LarError::IndexOutOfRange { index: v, len: nverts });
            }
            rows.push(k);
            cols.push(v);
        }
    }
    let vals = vec![1i8; rows.len()];
    SignedSparseMatrix::from_triplets(&rows, &cols, &vals, (table.len(), nverts))
}

/// Sorts every cell and removes duplicate cells, keeping first occurrences.
/// Returns the table and the old → new cell index map.
pub fn canonicalize(table: &CellTable) -> (CellTable, Vec<usize>) {
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut cells = Vec::new();
    let mut map = Vec::with_capacity(table.len());
    for cell in &table.cells {
        let mut c = cell.clone();
        c.sort_unstable();
        c.dedup();
        let idx = *seen.entry(c.clone()).or_insert_with(|| {
            cells.push(c);
            cells.len() - 1
        });
        map.push(idx);
    }
    (CellTable::new(table.dim, cells), map)
}

/// Alternating sum Σ (−1)ᵖ χₚ over the complex's cell counts.
pub fn euler_characteristic(complex: &Complex) -> Result<i64> {
    let top = complex.tables.keys().next_back().copied().unwrap_or(0);
    let mut counts = Vec::with_capacity(top + 1);
    for p in 0..=top {
        counts.push(complex.count(p).ok_or(LarError::MissingTable(p))?);
    }
    Ok(alternating_sum(&counts))
}

/// Vertex sets of the top cells recovered from a boundary matrix: for each
/// column, the union of the vertex lists of the rows it touches.
pub fn cells_from_boundary(boundary: &SignedSparseMatrix, lower: &CellTable) -> Result<CellTable> {
    if boundary.nrows() != lower.len() {
        return Err(LarError::DimensionMismatch(format!(
            "boundary has {} rows but the lower table has {} cells",
            boundary.nrows(),
            lower.len()
        )));
    }
    let cells = (0..boundary.ncols())
        .map(|j| {
            let mut vs: Vec<usize> = boundary.column(j).flat_map(|(i, _)| lower.cells[i].iter().copied()).collect();
            vs.sort_unstable();
            vs.dedup();
            vs
        })
        .collect();
    Ok(CellTable::new(lower.dim + 1, cells))
}

/// One line of a [`ValidationReport`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of [`validate_chain_complex`]; failures are entries, not errors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Checks operator shapes, ∂ₚ₋₁∂ₚ = 0 and the two-incidence rule of the top
/// operator.
pub fn validate_operators(geometry_len: usize, boundaries: &[SignedSparseMatrix], exterior: Option<usize>) -> ValidationReport {
    let mut report = ValidationReport::default();
    if let Some(d1) = boundaries.first() {
        report.push(
            "shape ∂1",
            d1.nrows() == geometry_len,
            format!("{}x{}, {} vertices", d1.nrows(), d1.ncols(), geometry_len),
        );
    }
    for p in 1..boundaries.len() {
        let (lo, hi) = (&boundaries[p - 1], &boundaries[p]);
        let shape_ok = lo.ncols() == hi.nrows();
        report.push(
            format!("shape ∂{}", p + 1),
            shape_ok,
            format!("{}x{} after {}x{}", hi.nrows(), hi.ncols(), lo.nrows(), lo.ncols()),
        );
        if !shape_ok {
            continue;
        }
        let name = format!("∂{}∂{} = 0", p, p + 1);
        match lo.multiply(hi) {
            Ok(prod) if prod.is_zero() => report.push(name, true, "empty product"),
            Ok(prod) => {
                let mut cols: Vec<usize> = prod.triplets().map(|t| t.1).collect();
                cols.dedup();
                report.push(name, false, format!("{} nonzeros, first in column {}", prod.nnz(), cols[0]))
            }
            Err(e) => report.push(name, false, e.to_string()),
        }
    }
    for (p, op) in boundaries.iter().enumerate() {
        if let Some(bad) = op.vals().iter().position(|&v| v != 1 && v != -1) {
            report.push(format!("entries ∂{}", p + 1), false, format!("value {} stored", op.vals()[bad]));
        }
    }
    if let (Some(top), Some(_)) = (boundaries.last(), exterior) {
        let d = boundaries.len();
        let mut plus = vec![0usize; top.nrows()];
        let mut minus = vec![0usize; top.nrows()];
        for (i, _, v) in top.triplets() {
            if v > 0 {
                plus[i] += 1;
            } else {
                minus[i] += 1;
            }
        }
        let bad: Vec<usize> = (0..top.nrows()).filter(|&i| plus[i] != 1 || minus[i] != 1).collect();
        report.push(
            format!("row degree ∂{d}"),
            bad.is_empty(),
            if bad.is_empty() {
                format!("every row has one +1 and one -1 ({} nonzeros)", top.nnz())
            } else {
                format!("{} rows violate, first row {}", bad.len(), bad[0])
            },
        );
    }
    report
}

pub fn validate_chain_complex(result: &ChainComplexResult) -> ValidationReport {
    let mut report = validate_operators(result.geometry.len(), &result.boundaries, result.exterior);
    for (p, t) in result.tables.iter().enumerate() {
        let op = &result.boundaries[p];
        let expected = if p + 1 == result.boundaries.len() && result.exterior.is_some() { t.len() + 1 } else { t.len() };
        report.push(
            format!("cells {}", p + 1),
            op.ncols() == expected,
            format!("{} cells, operator has {} columns", t.len(), op.ncols()),
        );
        if op.ncols() != expected {
            continue;
        }
        let lower = if p == 0 {
            CellTable::new(0, (0..result.geometry.len()).map(|v| vec![v]).collect())
        } else {
            result.tables[p - 1].clone()
        };
        let cols: Vec<usize> = (0..op.ncols()).filter(|&j| expected == t.len() || Some(j) != result.exterior).collect();
        let name = format!("cells {} match ∂{}", p + 1, p + 1);
        match cells_from_boundary(&op.select_columns(&cols), &lower) {
            Ok(derived) => {
                let bad = derived.cells.iter().zip(&t.cells).position(|(a, b)| {
                    let mut b = b.clone();
                    b.sort_unstable();
                    b.dedup();
                    *a != b
                });
                report.push(name, bad.is_none(), bad.map_or("vertex sets agree".into(), |j| format!("first mismatch at cell {j}")));
            }
            Err(e) => report.push(name, false, e.to_string()),
        }
    }
    report
}
