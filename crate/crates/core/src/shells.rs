//! Containment poset of isolated boundary shells.
//!
//! When the skeleton has several connected components, gift wrapping
//! yields one exterior cycle per component. Each such shell is located by
//! classifying one of its vertices against the cells of the other
//! components; a shell lying inside a cell becomes a cavity of that cell
//! (its cycle is added to the cell's column) and the shells lying in no
//! cell are summed into the single exterior column.

use crate::error::{LarError, Result};
use crate::geom::{dot3, sub3, winding_number, P2, P3};
use crate::sparse::{Chain, SignedSparseMatrix};
use crate::tgw::{CellExtraction, Skeleton};

/// Containment forest over component shells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShellPoset {
    /// Exterior cycle index of each component.
    pub shells: Vec<usize>,
    /// Component whose cell contains the shell, if any.
    pub parent: Vec<Option<usize>>,
    /// Cycle index of the innermost containing cell, if any.
    pub container: Vec<Option<usize>>,
    /// Number of ancestors; even depths are solid roots, odd depths cavities
    /// of a parent cell.
    pub depth: Vec<usize>,
}

/// Boundary operator after folding shells, with the exterior as last column.
#[derive(Clone, Debug)]
pub struct FoldedCells {
    pub boundary: SignedSparseMatrix,
    /// Column of the exterior cycle, `None` when there are no cells at all.
    pub exterior: Option<usize>,
    /// Cycle indices (into the extraction) of the interior columns, in order.
    pub cells: Vec<usize>,
    pub poset: ShellPoset,
}

/// Classifies point-against-cycle for the skeleton's dimension.
pub struct CycleClassifier<'a> {
    skeleton: &'a Skeleton,
}

/// Ray directions tried in order when a ray grazes an edge.
const RAYS: [P3; 4] = [
    [0.573_462_344_6, 0.615_381_239_0, 0.540_841_628_1],
    [-0.312_215_672_0, 0.832_950_421_3, 0.456_803_194_7],
    [0.707_106_781_2, -0.123_456_789_0, 0.696_214_011_4],
    [-0.444_444_444_4, -0.555_555_555_5, 0.702_882_913_6],
];

impl<'a> CycleClassifier<'a> {
    pub fn new(skeleton: &'a Skeleton) -> Self {
        CycleClassifier { skeleton }
    }

    fn edge_points3(&self, e: usize) -> (P3, P3) {
        let mut t = [0.0; 3];
        let mut h = [0.0; 3];
        for (v, s) in self.skeleton.d1.column(e) {
            if s < 0 {
                t = self.skeleton.geometry.point3(v);
            } else {
                h = self.skeleton.geometry.point3(v);
            }
        }
        (t, h)
    }

    /// Winding number of the cycle around `p`; nonzero means inside.
    pub fn winding(&self, cycle: &Chain, p: &[f64], eps: f64) -> Result<i32> {
        match self.skeleton.dim() {
            2 => {
                let directed: Vec<(P2, P2)> = cycle
                    .entries()
                    .iter()
                    .map(|&(e, c)| {
                        let (a, b) = self.edge_points3(e);
                        let (a, b) = ([a[0], a[1]], [b[0], b[1]]);
                        if c > 0 {
                            (a, b)
                        } else {
                            (b, a)
                        }
                    })
                    .collect();
                let q = [p[0], p[1]];
                if directed.iter().any(|&(a, b)| crate::geom::point_segment_distance(q, a, b) <= eps) {
                    return Err(LarError::Ambiguous(format!("point {:?} on a planar cycle", q)));
                }
                Ok(winding_number(q, &directed))
            }
            _ => {
                let q = [p[0], p[1], p[2]];
                for ray in RAYS {
                    if let Some(w) = self.ray_winding(cycle, q, ray, eps) {
                        return Ok(w);
                    }
                }
                Err(LarError::Ambiguous(format!("every ray from {:?} grazes the shell", q)))
            }
        }
    }

    /// Signed crossing count of a ray against an oriented 2-cycle; `None`
    /// when the ray passes within `eps` of a face boundary or the point is on
    /// a face.
    fn ray_winding(&self, cycle: &Chain, p: P3, ray: P3, eps: f64) -> Option<i32> {
        let d2 = self.skeleton.d2.as_ref()?;
        let mut w = 0;
        for &(f, c) in cycle.entries() {
            let area = self.skeleton.face_vector_area(f);
            let an = dot3(area, area).sqrt();
            if an == 0.0 {
                continue;
            }
            let n = [area[0] / an, area[1] / an, area[2] / an];
            let (p0, _) = self.edge_points3(d2.column(f).next()?.0);
            let dist = dot3(sub3(p, p0), n);
            let rn = dot3(ray, n);
            if rn.abs() < 1e-12 {
                continue;
            }
            let t = -dist / rn;
            if t.abs() <= eps {
                // the point lies on the face plane: only a problem when inside the face
                if self.face_contains(f, p, n, eps)? != 0 {
                    return None;
                }
                continue;
            }
            if t < 0.0 {
                continue;
            }
            let q = [p[0] + t * ray[0], p[1] + t * ray[1], p[2] + t * ray[2]];
            let inside = self.face_contains(f, q, n, eps)?;
            if inside != 0 {
                w += c * if rn > 0.0 { 1 } else { -1 };
            }
        }
        Some(w)
    }

    /// Winding of the face's own boundary around an in-plane point, via the
    /// projection that drops the dominant normal axis. `None` when `q` is
    /// within `eps` of the face boundary.
    fn face_contains(&self, f: usize, q: P3, n: P3, eps: f64) -> Option<i32> {
        let d2 = self.skeleton.d2.as_ref()?;
        let k = (0..3).max_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs())).unwrap();
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let proj = |p: P3| -> P2 { [p[i], p[j]] };
        let mut directed = Vec::new();
        for (e, s) in d2.column(f) {
            let (a, b) = self.edge_points3(e);
            let seg = if s > 0 { (a, b) } else { (b, a) };
            let closest = closest_on_segment(q, seg.0, seg.1);
            if dot3(sub3(q, closest), sub3(q, closest)).sqrt() <= eps {
                return None;
            }
            directed.push((proj(seg.0), proj(seg.1)));
        }
        Some(winding_number(proj(q), &directed))
    }
}

fn closest_on_segment(p: P3, a: P3, b: P3) -> P3 {
    let ab = sub3(b, a);
    let l2 = dot3(ab, ab);
    let t = if l2 > 0.0 { (dot3(sub3(p, a), ab) / l2).clamp(0.0, 1.0) } else { 0.0 };
    [a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]]
}

/// Vertices touched by a cycle, in first-appearance order.
fn cycle_vertices(skeleton: &Skeleton, cycle: &Chain) -> Vec<usize> {
    let mut out = Vec::new();
    for &(p, _) in cycle.entries() {
        let verts: Vec<usize> = match &skeleton.faces {
            Some(faces) => faces.cells[p].clone(),
            None => skeleton.edges.cells[p].clone(),
        };
        for v in verts {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        if out.len() > 8 {
            break;
        }
    }
    out
}

/// Builds the containment poset of the extraction's component shells.
pub fn shell_poset(extraction: &CellExtraction, skeleton: &Skeleton, eps: f64) -> Result<ShellPoset> {
    let ncomp = extraction.n_components();
    let shells = extraction.exteriors.clone();
    let mut parent = vec![None; ncomp];
    let mut container = vec![None; ncomp];
    if ncomp > 1 {
        let classifier = CycleClassifier::new(skeleton);
        for k in 0..ncomp {
            let shell = &extraction.cycles[shells[k]];
            let candidates = cycle_vertices(skeleton, shell);
            let mut best: Option<(f64, usize)> = None;
            for m in (0..ncomp).filter(|&m| m != k) {
                let outer = &extraction.cycles[shells[m]];
                let located = locate(&classifier, outer, skeleton, &candidates, eps)?;
                if located == 0 {
                    continue;
                }
                for (j, cycle) in extraction.cycles.iter().enumerate() {
                    if extraction.component[j] != m || j == shells[m] {
                        continue;
                    }
                    if locate(&classifier, cycle, skeleton, &candidates, eps)? != 0 {
                        let vol = extraction.measures[j];
                        if best.is_none_or(|(v, _)| vol < v) {
                            best = Some((vol, j));
                        }
                    }
                }
            }
            if let Some((_, j)) = best {
                container[k] = Some(j);
                parent[k] = Some(extraction.component[j]);
            }
        }
    }
    let mut depth = vec![0; ncomp];
    for k in 0..ncomp {
        let mut d = 0;
        let mut cur = parent[k];
        while let Some(p) = cur {
            d += 1;
            if d > ncomp {
                return Err(LarError::Ambiguous("cyclic shell containment".into()));
            }
            cur = parent[p];
        }
        depth[k] = d;
    }
    Ok(ShellPoset { shells, parent, container, depth })
}

fn locate(classifier: &CycleClassifier, cycle: &Chain, skeleton: &Skeleton, candidates: &[usize], eps: f64) -> Result<i32> {
    let mut last = None;
    for &v in candidates {
        match classifier.winding(cycle, skeleton.geometry.point(v), eps) {
            Ok(w) => return Ok(w),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| LarError::Ambiguous("shell without vertices".into())))
}

/// Folds nested shells into their containing cells and sums the root shells
/// into one exterior column, placed last.
pub fn fold_shells(extraction: &CellExtraction, skeleton: &Skeleton, eps: f64) -> Result<FoldedCells> {
    let poset = shell_poset(extraction, skeleton, eps)?;
    let n = extraction.n_petals;
    let is_shell: Vec<bool> = (0..extraction.cycles.len()).map(|j| poset.shells.contains(&j)).collect();
    let cells: Vec<usize> = (0..extraction.cycles.len()).filter(|&j| !is_shell[j]).collect();
    let mut columns: Vec<Chain> = cells.iter().map(|&j| extraction.cycles[j].clone()).collect();
    let mut exterior = Chain::zero(skeleton.dim() - 1, n);
    for (k, &s) in poset.shells.iter().enumerate() {
        let shell = &extraction.cycles[s];
        match poset.container[k] {
            Some(j) => {
                let col = cells.iter().position(|&c| c == j).expect("container is an interior cell");
                columns[col] = columns[col].add(shell)?;
            }
            None => exterior = exterior.add(shell)?,
        }
    }
    let has_exterior = !exterior.is_empty();
    if has_exterior {
        columns.push(exterior);
    }
    let cols = columns
        .iter()
        .map(|c| c.entries().iter().map(|&(i, v)| (i, v as i8)).collect())
        .collect();
    let boundary = SignedSparseMatrix::from_columns(n, cols)?;
    let exterior = has_exterior.then(|| boundary.ncols() - 1);
    Ok(FoldedCells { boundary, exterior, cells, poset })
}
