//! Exploded views: every top cell pushed away from the complex centroid.

use crate::lar::{ChainComplexResult, Geometry};

/// Translated copy of one top cell's vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplodedCell {
    /// Column of the cell in the top operator.
    pub column: usize,
    /// Global vertex ids, in the order of `geometry`.
    pub vertices: Vec<usize>,
    pub geometry: Geometry,
}

impl ExplodedCell {
    /// Local index of a global vertex.
    pub fn local(&self, v: usize) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }
}

/// Moves each interior top cell by `(scale − 1)·(cell centroid − complex
/// centroid)`; the cells keep their shape.
pub fn explode(result: &ChainComplexResult, scale: f64) -> Vec<ExplodedCell> {
    let g = &result.geometry;
    let center = g.centroid();
    let Some(top) = result.tables.last() else { return Vec::new() };
    let columns = (0..result.boundaries.last().map_or(0, |b| b.ncols())).filter(|&j| Some(j) != result.exterior);
    top.cells
        .iter()
        .zip(columns)
        .map(|(cell, column)| {
            let mut vertices = cell.clone();
            vertices.sort_unstable();
            vertices.dedup();
            let local = g.select(&vertices);
            let shift: Vec<f64> = local.centroid().iter().zip(&center).map(|(c, o)| (scale - 1.0) * (c - o)).collect();
            let mut geometry = Geometry::empty(g.dim());
            for p in local.points() {
                let q: Vec<f64> = p.iter().zip(&shift).map(|(a, s)| a + s).collect();
                geometry.push(&q);
            }
            ExplodedCell { column, vertices, geometry }
        })
        .collect()
}
