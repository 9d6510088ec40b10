//! Arrangement of polygonal faces in space.
//!
//! The input complexes are assembled into one soup of faces. Every face σ
//! is cut by the faces that may touch it (found through per-axis interval
//! trees): their traces on σ's plane become segments of a planar
//! arrangement computed in σ's own frame and restricted to σ. The lifted
//! fragments are glued into one 2-skeleton, whose 3-cells come out of
//! spatial gift wrapping.

pub mod frame;
pub mod index;

use std::collections::{BTreeMap, HashMap};

use log::debug;
use rayon::prelude::*;

pub use frame::{face_frame, FaceFrame};
pub use index::{Aabb, CandidateIndex, IntervalTree};

use crate::arrange2d::{merge_vertices, planar_arrangement, restrict_to_region, SegmentSoup, DEFAULT_EPS};
use crate::error::{LarError, Result};
use crate::geom::{classify_against_segments, dot2, PointClass, P2, P3};
use crate::lar::{cells_from_boundary, CellTable, ChainComplexResult, Complex, Geometry};
use crate::shells::fold_shells;
use crate::sparse::SignedSparseMatrix;
use crate::tgw::{extract_all_cells, extract_all_cells_parallel, signed_measure, Skeleton};

pub use crate::shells::{shell_poset, ShellPoset};

/// Faces of several complexes stored together, not yet a complex.
#[derive(Clone, Debug)]
pub struct FacetSoup {
    pub geometry: Geometry,
    pub faces: CellTable,
    pub edges: CellTable,
    /// Edges bounding each face.
    pub face_edges: Vec<Vec<usize>>,
    /// Input complex of each face.
    pub provenance: Vec<usize>,
}

impl FacetSoup {
    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn face_points(&self, f: usize) -> Vec<P3> {
        self.faces.cells[f].iter().map(|&v| self.geometry.point3(v)).collect()
    }

    pub fn frames(&self) -> Result<Vec<FaceFrame>> {
        (0..self.n_faces())
            .map(|f| {
                face_frame(&self.face_points(f)).map_err(|e| match e {
                    LarError::Degenerate { reason, .. } => LarError::Degenerate { cell: f, reason },
                    other => other,
                })
            })
            .collect()
    }

    /// Boundary segments of face `f` in a frame, dropping the local z.
    pub fn local_segments(&self, f: usize, frame: &FaceFrame) -> Vec<(P2, P2)> {
        self.face_edges[f]
            .iter()
            .map(|&e| {
                let c = &self.edges.cells[e];
                let a = frame.to_local(self.geometry.point3(c[0]));
                let b = frame.to_local(self.geometry.point3(c[1]));
                ([a[0], a[1]], [b[0], b[1]])
            })
            .collect()
    }
}

/// Concatenates the inputs' geometry and face/edge tables. Edges are
/// derived per face when an input has no edge table: the face vertices are
/// taken as a convex polygon in their plane.
pub fn assemble(inputs: &[Complex]) -> Result<FacetSoup> {
    let mut geometry = Geometry::empty(3);
    let mut faces = Vec::new();
    let mut edges = Vec::new();
    let mut provenance = Vec::new();
    for (k, c) in inputs.iter().enumerate() {
        if c.geometry.dim() != 3 {
            return Err(LarError::DimensionMismatch(format!("input {k} has {}D geometry", c.geometry.dim())));
        }
        c.validate()?;
        let fv = c.table(2).ok_or(LarError::MissingTable(2))?;
        let ev = match c.table(1) {
            Some(t) => t.cells.clone(),
            None => derive_edges(&c.geometry, fv)?,
        };
        let off = geometry.len();
        for p in c.geometry.points() {
            geometry.push(p);
        }
        faces.extend(fv.cells.iter().map(|f| f.iter().map(|v| v + off).collect::<Vec<_>>()));
        edges.extend(ev.iter().map(|e| vec![e[0] + off, e[1] + off]));
        provenance.extend(std::iter::repeat_n(k, fv.len()));
    }
    let faces = CellTable::new(2, faces);
    let edges = CellTable::new(1, edges);
    let face_edges = face_edge_lists(&faces, &edges, geometry.len())?;
    Ok(FacetSoup { geometry, faces, edges, face_edges, provenance })
}

/// Ring edges of each face, ordering its vertices by angle around the
/// centroid in the face plane.
fn derive_edges(geometry: &Geometry, fv: &CellTable) -> Result<Vec<Vec<usize>>> {
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for (f, face) in fv.cells.iter().enumerate() {
        let pts: Vec<P3> = face.iter().map(|&v| geometry.point3(v)).collect();
        let frame = face_frame(&pts).map_err(|_| LarError::Degenerate { cell: f, reason: "face vertices are collinear".into() })?;
        let mut ring: Vec<(f64, usize)> = face
            .iter()
            .zip(&pts)
            .map(|(&v, &p)| {
                let q = frame.to_local(p);
                (q[1].atan2(q[0]), v)
            })
            .collect();
        ring.sort_by(|a, b| a.0.total_cmp(&b.0));
        for k in 0..ring.len() {
            let (a, b) = (ring[k].1, ring[(k + 1) % ring.len()].1);
            let key = (a.min(b), a.max(b));
            seen.entry(key).or_insert_with(|| {
                out.push(vec![key.0, key.1]);
                out.len() - 1
            });
        }
    }
    Ok(out)
}

/// For each face, the edges with both ends among its vertices. Every
/// vertex must then have even degree, i.e. the edges close up.
fn face_edge_lists(faces: &CellTable, edges: &CellTable, nverts: usize) -> Result<Vec<Vec<usize>>> {
    let mut by_vertex: Vec<Vec<usize>> = vec![Vec::new(); nverts];
    for (k, e) in edges.cells.iter().enumerate() {
        by_vertex[e[0]].push(k);
        by_vertex[e[1]].push(k);
    }
    let mut mark = vec![usize::MAX; nverts];
    let mut out = Vec::with_capacity(faces.len());
    for (f, face) in faces.cells.iter().enumerate() {
        for &v in face {
            mark[v] = f;
        }
        let mut list: Vec<usize> = face
            .iter()
            .flat_map(|&v| by_vertex[v].iter().copied())
            .filter(|&k| edges.cells[k].iter().all(|&w| mark[w] == f))
            .collect();
        list.sort_unstable();
        list.dedup();
        for &v in face {
            let deg = list.iter().filter(|&&k| edges.cells[k].contains(&v)).count();
            if deg == 0 || deg % 2 == 1 {
                return Err(LarError::Degenerate { cell: f, reason: format!("face boundary is open at vertex {v}") });
            }
        }
        out.push(list);
    }
    Ok(out)
}

/// Candidate index over the soup's face boxes, padded by `eps`.
pub fn build_index(soup: &FacetSoup, eps: f64) -> CandidateIndex {
    let boxes = (0..soup.n_faces())
        .map(|f| Aabb::of_points(soup.faces.cells[f].iter().map(|&v| soup.geometry.point(v))).inflated(eps))
        .collect();
    CandidateIndex::new(boxes)
}

/// Pieces of one input face: a planar 2-complex lifted back to space.
#[derive(Clone, Debug)]
pub struct FaceFragment {
    pub source: usize,
    pub geometry: Geometry,
    pub edges: CellTable,
    /// Each piece as signed local edges (one or more closed cycles).
    pub faces: Vec<Vec<(usize, i8)>>,
}

/// Traces of the candidate faces on σ's plane, as segments in σ's frame.
fn trace_segments(soup: &FacetSoup, frames: &[FaceFrame], sigma: usize, candidates: &[usize], eps: f64) -> Vec<(P2, P2)> {
    let frame = &frames[sigma];
    let mut segs = Vec::new();
    for &tau in candidates {
        let local: Vec<(P3, P3)> = soup.face_edges[tau]
            .iter()
            .map(|&e| {
                let c = &soup.edges.cells[e];
                (frame.to_local(soup.geometry.point3(c[0])), frame.to_local(soup.geometry.point3(c[1])))
            })
            .collect();
        if local.iter().all(|(a, b)| a[2].abs() <= eps && b[2].abs() <= eps) {
            segs.extend(local.iter().map(|(a, b)| ([a[0], a[1]], [b[0], b[1]])));
            continue;
        }
        let mut pts: Vec<P2> = Vec::new();
        for (a, b) in &local {
            let side = |z: f64| if z.abs() <= eps { 0 } else if z > 0.0 { 1 } else { -1 };
            let (sa, sb) = (side(a[2]), side(b[2]));
            if sa == 0 {
                pts.push([a[0], a[1]]);
            }
            if sb == 0 {
                pts.push([b[0], b[1]]);
            }
            if sa * sb < 0 {
                let t = a[2] / (a[2] - b[2]);
                pts.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            }
        }
        if pts.len() < 2 {
            continue;
        }
        // all points lie on one line; order them along it
        let (mut dir, mut best) = ([1.0, 0.0], -1.0);
        for p in &pts[1..] {
            let d = [p[0] - pts[0][0], p[1] - pts[0][1]];
            let l = dot2(d, d);
            if l > best {
                best = l;
                dir = d;
            }
        }
        if best <= eps * eps {
            continue;
        }
        pts.sort_by(|p, q| dot2(*p, dir).total_cmp(&dot2(*q, dir)));
        pts.dedup_by(|q, p| (q[0] - p[0]).abs() <= eps && (q[1] - p[1]).abs() <= eps);
        let tau_frame = &frames[tau];
        let tau_segs = soup.local_segments(tau, tau_frame);
        for w in pts.windows(2) {
            let m = [0.5 * (w[0][0] + w[1][0]), 0.5 * (w[0][1] + w[1][1]), 0.0];
            let q = tau_frame.to_local(frame.to_world(m));
            if classify_against_segments([q[0], q[1]], &tau_segs, eps) != PointClass::Outside {
                segs.push((w[0], w[1]));
            }
        }
    }
    segs
}

/// Splits face `sigma` by its candidates and lifts the pieces to space.
pub fn fragment_face(soup: &FacetSoup, frames: &[FaceFrame], sigma: usize, candidates: &[usize], eps: f64) -> Result<FaceFragment> {
    let frame = &frames[sigma];
    let boundary = soup.local_segments(sigma, frame);
    let mut segs = boundary.clone();
    segs.extend(trace_segments(soup, frames, sigma, candidates, eps));
    let planar = SegmentSoup::from_segments(&segs)?;
    let arr = restrict_to_region(&planar_arrangement(&planar, eps)?, &boundary, eps)?;
    if arr.n_faces() == 0 {
        return Err(LarError::Degenerate { cell: sigma, reason: "no piece of the face survives fragmentation".into() });
    }
    let mut geometry = Geometry::empty(3);
    for v in 0..arr.geometry.len() {
        let p = arr.geometry.point2(v);
        geometry.push(&frame.to_world([p[0], p[1], 0.0]));
    }
    let faces = arr.interior_columns().map(|j| arr.d2.column(j).collect()).collect();
    Ok(FaceFragment { source: sigma, geometry, edges: arr.edges, faces })
}

/// Glues fragments into one 2-skeleton: coincident vertices are merged,
/// edges and faces deduplicated (faces by their vertex set, first copy
/// kept) and ∂₁, ∂₂ built.
pub fn skeleton_merge(fragments: &[FaceFragment], eps: f64) -> Result<Skeleton> {
    let mut all = Geometry::empty(3);
    let mut offsets = Vec::with_capacity(fragments.len());
    for frag in fragments {
        offsets.push(all.len());
        for p in frag.geometry.points() {
            all.push(p);
        }
    }
    let (geometry, _, map) = merge_vertices(&all, &[], eps);
    let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut face_ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut faces: Vec<Vec<usize>> = Vec::new();
    let mut columns: Vec<Vec<(usize, i8)>> = Vec::new();
    for (frag, &off) in fragments.iter().zip(&offsets) {
        let local: Vec<Option<(usize, i8)>> = frag
            .edges
            .cells
            .iter()
            .map(|e| {
                let (a, b) = (map[e[0] + off], map[e[1] + off]);
                if a == b {
                    return None;
                }
                let key = (a.min(b), a.max(b));
                let id = *edge_ids.entry(key).or_insert_with(|| {
                    edges.push(vec![key.0, key.1]);
                    edges.len() - 1
                });
                Some((id, if a < b { 1 } else { -1 }))
            })
            .collect();
        for piece in &frag.faces {
            let mut acc: BTreeMap<usize, i32> = BTreeMap::new();
            for &(e, s) in piece {
                if let Some((id, o)) = local[e] {
                    *acc.entry(id).or_default() += (s * o) as i32;
                }
            }
            acc.retain(|_, c| *c != 0);
            if acc.is_empty() {
                continue;
            }
            let mut verts: Vec<usize> = acc.keys().flat_map(|&e| edges[e].iter().copied()).collect();
            verts.sort_unstable();
            verts.dedup();
            if face_ids.contains_key(&verts) {
                continue;
            }
            if let Some((&e, &c)) = acc.iter().find(|(_, c)| c.abs() > 1) {
                return Err(LarError::Degenerate { cell: e, reason: format!("edge used {c} times by one face") });
            }
            face_ids.insert(verts.clone(), faces.len());
            faces.push(verts);
            columns.push(acc.into_iter().map(|(e, c)| (e, c as i8)).collect());
        }
    }
    let edges = CellTable::new(1, edges);
    let d2 = SignedSparseMatrix::from_columns(edges.len(), columns)?;
    let skeleton = Skeleton::spatial(geometry, edges, CellTable::new(2, faces), d2)?;
    let rim = skeleton.d1.multiply(skeleton.d2.as_ref().expect("spatial"))?;
    if !rim.is_zero() {
        return Err(LarError::NotClosed { nonzeros: rim.nnz() });
    }
    Ok(skeleton)
}

/// 3-cells of a closed 2-skeleton. The exterior column is last.
pub fn space_arrangement(skeleton: Skeleton, eps: f64) -> Result<ChainComplexResult> {
    cells_of(skeleton, eps, false)
}

/// [`space_arrangement`] with concurrent cycle extraction; same output.
pub fn space_arrangement_parallel(skeleton: Skeleton, eps: f64) -> Result<ChainComplexResult> {
    cells_of(skeleton, eps, true)
}

fn cells_of(skeleton: Skeleton, eps: f64, parallel: bool) -> Result<ChainComplexResult> {
    let extraction = if parallel { extract_all_cells_parallel(&skeleton)? } else { extract_all_cells(&skeleton)? };
    let folded = fold_shells(&extraction, &skeleton, eps)?;
    let faces = skeleton.faces.clone().expect("spatial skeleton");
    let interior: Vec<usize> = (0..folded.boundary.ncols()).filter(|&j| Some(j) != folded.exterior).collect();
    let cells = cells_from_boundary(&folded.boundary.select_columns(&interior), &faces)?;
    let d2 = skeleton.d2.clone().expect("spatial skeleton");
    Ok(ChainComplexResult {
        geometry: skeleton.geometry,
        tables: vec![skeleton.edges, faces, cells],
        boundaries: vec![skeleton.d1, d2, folded.boundary],
        exterior: folded.exterior,
    })
}

/// Knobs of [`merge`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MergeOptions {
    pub eps: f64,
    /// Worker threads for face fragmentation; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for MergeOptions {
    fn default() -> Self {
        MergeOptions { eps: DEFAULT_EPS, threads: None }
    }
}

/// Full pipeline from input complexes to the arranged chain complex.
pub fn merge(inputs: &[Complex], opts: &MergeOptions) -> Result<ChainComplexResult> {
    let soup = assemble(inputs)?;
    let skeleton = merged_skeleton(&soup, opts)?;
    space_arrangement(skeleton, opts.eps)
}

/// Fragments every face of the soup and glues the pieces.
pub fn merged_skeleton(soup: &FacetSoup, opts: &MergeOptions) -> Result<Skeleton> {
    let eps = opts.eps;
    let index = build_index(soup, eps);
    let frames = soup.frames()?;
    let run = || -> Result<Vec<FaceFragment>> {
        (0..soup.n_faces())
            .into_par_iter()
            .map(|f| fragment_face(soup, &frames, f, &index.query(f), eps))
            .collect()
    };
    let fragments = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| LarError::Unsupported(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    debug!("{} faces fragmented into {} pieces", soup.n_faces(), fragments.iter().map(|f| f.faces.len()).sum::<usize>());
    skeleton_merge(&fragments, eps)
}

/// Signed volume of every column of the top operator, exterior included.
pub fn cell_volumes(result: &ChainComplexResult) -> Result<Vec<f64>> {
    if result.dim() != 3 {
        return Err(LarError::DimensionMismatch(format!("volumes need a 3-complex, got {}", result.dim())));
    }
    let skeleton = Skeleton::spatial(
        result.geometry.clone(),
        result.tables[0].clone(),
        result.tables[1].clone(),
        result.boundaries[1].clone(),
    )?;
    let top = &result.boundaries[2];
    (0..top.ncols()).map(|j| signed_measure(&top.column_chain(j, 2), &skeleton)).collect()
}
