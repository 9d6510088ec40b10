//! Regularized arrangement of line segments in the plane.
//!
//! The pipeline fragments the segments at every pairwise intersection,
//! identifies vertices closer than `eps`, discards bridges (dangling edges
//! and trees) and extracts the faces with planar gift wrapping. Isolated
//! components nested inside a face become holes of that face.

use std::collections::HashMap;

use log::warn;

use crate::error::{LarError, Result};
use crate::geom::{classify_against_segments, cross2, dot2, interior_point, point_segment_distance, sub2, PointClass, P2};
use crate::lar::{canonicalize, cells_from_boundary, CellTable, Geometry};
use crate::operators::boundary_1;
use crate::shells::{fold_shells, CycleClassifier};
use crate::sparse::{Chain, SignedSparseMatrix};
use crate::tgw::{extract_all_cells, Skeleton};

/// Default model-unit tolerance for vertex identification.
pub const DEFAULT_EPS: f64 = 1e-8;

/// Planar segments, not necessarily forming a complex.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentSoup {
    pub geometry: Geometry,
    pub edges: CellTable,
}

impl SegmentSoup {
    pub fn new(geometry: Geometry, edges: CellTable) -> Result<Self> {
        if geometry.dim() != 2 {
            return Err(LarError::DimensionMismatch(format!("segment soup needs 2D geometry, got {}D", geometry.dim())));
        }
        edges.validate(geometry.len())?;
        Ok(SegmentSoup { geometry, edges })
    }

    /// Soup from explicit endpoint pairs.
    pub fn from_segments(segments: &[(P2, P2)]) -> Result<Self> {
        let mut pts = Vec::with_capacity(2 * segments.len());
        for (a, b) in segments {
            pts.push(*a);
            pts.push(*b);
        }
        let edges = (0..segments.len()).map(|k| vec![2 * k, 2 * k + 1]).collect();
        Self::new(Geometry::from_points(&pts)?, CellTable::new(1, edges))
    }

    pub fn segment(&self, k: usize) -> (P2, P2) {
        let e = &self.edges.cells[k];
        (self.geometry.point2(e[0]), self.geometry.point2(e[1]))
    }
}

/// Planar arrangement: vertices W, edges EW, ∂₁, ∂₂ and faces FW.
///
/// `d2` keeps the exterior cycle as its last column when `exterior` is set;
/// `faces` lists interior faces only, in column order.
#[derive(Clone, Debug)]
pub struct PlanarArrangement {
    pub geometry: Geometry,
    pub edges: CellTable,
    pub d1: SignedSparseMatrix,
    pub d2: SignedSparseMatrix,
    pub faces: CellTable,
    pub exterior: Option<usize>,
}

impl PlanarArrangement {
    fn empty() -> Self {
        PlanarArrangement {
            geometry: Geometry::empty(2),
            edges: CellTable::new(1, Vec::new()),
            d1: SignedSparseMatrix::zeros(0, 0),
            d2: SignedSparseMatrix::zeros(0, 0),
            faces: CellTable::new(2, Vec::new()),
            exterior: None,
        }
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    /// V − E + F with the exterior face counted.
    pub fn euler_with_exterior(&self) -> i64 {
        self.geometry.len() as i64 - self.edges.len() as i64 + self.d2.ncols() as i64
    }

    /// Number of connected components of the edge graph.
    pub fn n_components(&self) -> usize {
        let mut dsu = Dsu::new(self.geometry.len());
        for e in &self.edges.cells {
            dsu.union(e[0], e[1]);
        }
        let mut roots: Vec<usize> = self.edges.cells.iter().map(|e| dsu.find(e[0])).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// Face `j` (interior or exterior) as a chain of edges.
    pub fn face_chain(&self, j: usize) -> Chain {
        self.d2.column_chain(j, 1)
    }

    /// Directed boundary segments of face `j`.
    pub fn face_segments(&self, j: usize) -> Vec<(P2, P2)> {
        self.d2
            .column(j)
            .map(|(e, s)| {
                let (a, b) = (self.geometry.point2(self.edges.cells[e][0]), self.geometry.point2(self.edges.cells[e][1]));
                if s > 0 {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect()
    }

    /// Signed area of face `j`.
    pub fn face_area(&self, j: usize) -> f64 {
        crate::geom::signed_area(&self.face_segments(j))
    }

    /// Interior face columns (every column but the exterior).
    pub fn interior_columns(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.d2.ncols()).filter(move |&j| Some(j) != self.exterior)
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[a.max(b)] = a.min(b);
        }
    }
}

/// Splits every segment at its intersections with the others (crossings,
/// T-junctions and collinear overlaps), then merges coincident vertices and
/// duplicate fragments.
pub fn fragment_segments(soup: &SegmentSoup, eps: f64) -> SegmentSoup {
    let n = soup.edges.len();
    let segs: Vec<(P2, P2)> = (0..n).map(|k| soup.segment(k)).collect();
    let mut params: Vec<Vec<f64>> = vec![vec![0.0, 1.0]; n];
    let boxes: Vec<[f64; 4]> = segs
        .iter()
        .map(|(a, b)| [a[0].min(b[0]) - eps, a[1].min(b[1]) - eps, a[0].max(b[0]) + eps, a[1].max(b[1]) + eps])
        .collect();
    // sweep along x over the boxes
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| boxes[i][0].total_cmp(&boxes[j][0]).then(i.cmp(&j)));
    for (oi, &i) in order.iter().enumerate() {
        for &j in &order[oi + 1..] {
            if boxes[j][0] > boxes[i][2] {
                break;
            }
            if boxes[j][1] > boxes[i][3] || boxes[i][1] > boxes[j][3] {
                continue;
            }
            let (ti, tj) = segment_hits(segs[i], segs[j], eps);
            params[i].extend(ti);
            params[j].extend(tj);
        }
    }
    let mut pts: Vec<P2> = Vec::new();
    let mut edges = Vec::new();
    for (k, (a, b)) in segs.iter().enumerate() {
        let ts = &mut params[k];
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let base = pts.len();
        for &t in ts.iter() {
            pts.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
        for q in 0..ts.len() - 1 {
            edges.push(vec![base + q, base + q + 1]);
        }
    }
    let geometry = Geometry::from_points(&pts).expect("finite fragment points");
    let (geometry, tables, _) = merge_vertices(&geometry, &[CellTable::new(1, edges)], eps);
    let (edges, _) = canonicalize(&tables[0]);
    let (geometry, edges) = compact(&geometry, &edges);
    SegmentSoup { geometry, edges }
}

/// Parameters at which `s` and `r` touch, on each of them.
fn segment_hits(s: (P2, P2), r: (P2, P2), eps: f64) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = s;
    let (c, d) = r;
    let u = sub2(b, a);
    let v = sub2(d, c);
    let (lu, lv) = (dot2(u, u).sqrt(), dot2(v, v).sqrt());
    let mut ts = Vec::new();
    let mut us = Vec::new();
    if lu == 0.0 || lv == 0.0 {
        return (ts, us);
    }
    let denom = cross2(u, v);
    if denom.abs() > 1e-12 * lu * lv {
        let w = sub2(c, a);
        let t = cross2(w, v) / denom;
        let q = cross2(w, u) / denom;
        let (tol_t, tol_q) = (eps / lu, eps / lv);
        if t >= -tol_t && t <= 1.0 + tol_t && q >= -tol_q && q <= 1.0 + tol_q {
            ts.push(t.clamp(0.0, 1.0));
            us.push(q.clamp(0.0, 1.0));
        }
    }
    // endpoints lying on the other segment: T-junctions and collinear overlaps
    for p in [c, d] {
        if point_segment_distance(p, a, b) <= eps {
            ts.push((dot2(sub2(p, a), u) / (lu * lu)).clamp(0.0, 1.0));
        }
    }
    for p in [a, b] {
        if point_segment_distance(p, c, d) <= eps {
            us.push((dot2(sub2(p, c), v) / (lv * lv)).clamp(0.0, 1.0));
        }
    }
    (ts, us)
}

/// Identifies vertices within `eps` (max norm) of an earlier vertex, using
/// a bucket grid of cell size `eps`. Returns the merged geometry, the
/// re-indexed tables (cells that collapse below p+1 distinct vertices are
/// dropped) and the old → new vertex map.
pub fn merge_vertices(geometry: &Geometry, tables: &[CellTable], eps: f64) -> (Geometry, Vec<CellTable>, Vec<usize>) {
    let dim = geometry.dim();
    let mut buckets: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    let mut out = Geometry::empty(dim);
    let mut map = Vec::with_capacity(geometry.len());
    let key = |p: &[f64]| -> [i64; 3] {
        let mut k = [0i64; 3];
        for (d, x) in p.iter().enumerate() {
            k[d] = (x / eps).floor() as i64;
        }
        k
    };
    for p in geometry.points() {
        let k = key(p);
        let mut found = None;
        'search: for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                for dz in -1..=1i64 {
                    if (dim < 3 && dz != 0) || (dim < 2 && dy != 0) {
                        continue;
                    }
                    if let Some(list) = buckets.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        for &r in list {
                            let q = out.point(r);
                            if p.iter().zip(q).all(|(a, b)| (a - b).abs() <= eps) {
                                found = Some(r);
                                break 'search;
                            }
                        }
                    }
                }
            }
        }
        let r = match found {
            Some(r) => r,
            None => {
                let r = out.push(p);
                buckets.entry(k).or_default().push(r);
                r
            }
        };
        map.push(r);
    }
    let tables = tables
        .iter()
        .map(|t| {
            let cells = t
                .cells
                .iter()
                .filter_map(|c| {
                    let mut mapped: Vec<usize> = Vec::with_capacity(c.len());
                    for &v in c {
                        let m = map[v];
                        if !mapped.contains(&m) {
                            mapped.push(m);
                        }
                    }
                    (mapped.len() > t.dim).then_some(mapped)
                })
                .collect();
            CellTable::new(t.dim, cells)
        })
        .collect();
    (out, tables, map)
}

/// Drops vertices no edge uses, keeping the relative order of the rest.
fn compact(geometry: &Geometry, edges: &CellTable) -> (Geometry, CellTable) {
    let mut used = vec![false; geometry.len()];
    for e in &edges.cells {
        for &v in e {
            used[v] = true;
        }
    }
    let mut remap = vec![usize::MAX; geometry.len()];
    let mut keep = Vec::new();
    for v in 0..geometry.len() {
        if used[v] {
            remap[v] = keep.len();
            keep.push(v);
        }
    }
    let cells = edges.cells.iter().map(|e| e.iter().map(|&v| remap[v]).collect()).collect();
    (geometry.select(&keep), CellTable::new(1, cells))
}

/// Keeps the edges that lie on some cycle, i.e. removes every bridge. What
/// is left is a union of biconnected blocks with at least two edges.
pub fn biconnected_filter(nverts: usize, edges: &CellTable) -> CellTable {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nverts];
    for (k, e) in edges.cells.iter().enumerate() {
        adj[e[0]].push((e[1], k));
        adj[e[1]].push((e[0], k));
    }
    let mut disc = vec![usize::MAX; nverts];
    let mut low = vec![0usize; nverts];
    let mut bridge = vec![false; edges.len()];
    let mut time = 0;
    for root in 0..nverts {
        if disc[root] != usize::MAX {
            continue;
        }
        // (vertex, edge used to enter, next adjacency position)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        disc[root] = time;
        low[root] = time;
        time += 1;
        while let Some(&mut (v, via, ref mut pos)) = stack.last_mut() {
            if *pos < adj[v].len() {
                let (w, k) = adj[v][*pos];
                *pos += 1;
                if k == via {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, k, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(u, _, _)) = stack.last() {
                    low[u] = low[u].min(low[v]);
                    if low[v] > disc[u] {
                        bridge[via] = true;
                    }
                }
            }
        }
    }
    CellTable::new(1, edges.cells.iter().zip(&bridge).filter(|(_, &b)| !b).map(|(e, _)| e.clone()).collect())
}

/// Full planar pipeline: fragment, merge, filter and extract faces.
pub fn planar_arrangement(soup: &SegmentSoup, eps: f64) -> Result<PlanarArrangement> {
    let frag = fragment_segments(soup, eps);
    let kept = biconnected_filter(frag.geometry.len(), &frag.edges);
    if kept.is_empty() {
        warn!("no edge survives the biconnected filter; returning an empty arrangement");
        return Ok(PlanarArrangement::empty());
    }
    let (geometry, edges) = compact(&frag.geometry, &kept);
    arrange_graph(geometry, edges, eps)
}

/// Faces of an already fragmented, bridgeless planar graph.
pub fn arrange_graph(geometry: Geometry, edges: CellTable, eps: f64) -> Result<PlanarArrangement> {
    let skeleton = Skeleton::planar(geometry, edges)?;
    let extraction = extract_all_cells(&skeleton)?;
    let folded = fold_shells(&extraction, &skeleton, eps)?;
    let interior: Vec<usize> = (0..folded.boundary.ncols()).filter(|&j| Some(j) != folded.exterior).collect();
    let faces = cells_from_boundary(&folded.boundary.select_columns(&interior), &skeleton.edges)?;
    Ok(PlanarArrangement {
        geometry: skeleton.geometry,
        edges: skeleton.edges,
        d1: skeleton.d1,
        d2: folded.boundary,
        faces,
        exterior: folded.exterior,
    })
}

/// Classifies a point against a closed edge chain of the arrangement.
pub fn classify_point(point: P2, cycle: &Chain, arr: &PlanarArrangement, eps: f64) -> Result<PointClass> {
    let rim = arr.d1.apply(cycle)?;
    if !rim.is_empty() {
        return Err(LarError::NotClosed { nonzeros: rim.support_len() });
    }
    let skeleton = Skeleton {
        geometry: arr.geometry.clone(),
        edges: arr.edges.clone(),
        d1: arr.d1.clone(),
        faces: None,
        d2: None,
    };
    match CycleClassifier::new(&skeleton).winding(cycle, &point, eps) {
        Ok(0) => Ok(PointClass::Outside),
        Ok(_) => Ok(PointClass::Inside),
        Err(LarError::Ambiguous(_)) => Ok(PointClass::On),
        Err(e) => Err(e),
    }
}

/// Keeps the faces lying inside the region bounded by `sigma` (closed
/// rings, holes allowed, even-odd rule). Points within `eps` of σ's
/// boundary count as inside. Edges and vertices not used by a kept face
/// are dropped and the exterior column is rebuilt from the kept faces.
pub fn restrict_to_face(arr: &PlanarArrangement, sigma: &[Vec<P2>], eps: f64) -> Result<PlanarArrangement> {
    let mut boundary = Vec::new();
    for ring in sigma {
        if ring.len() < 3 {
            return Err(LarError::NotClosed { nonzeros: ring.len() });
        }
        for k in 0..ring.len() {
            boundary.push((ring[k], ring[(k + 1) % ring.len()]));
        }
    }
    restrict_to_region(arr, &boundary, eps)
}

/// [`restrict_to_face`] with the region given by its boundary segments.
pub fn restrict_to_region(arr: &PlanarArrangement, boundary: &[(P2, P2)], eps: f64) -> Result<PlanarArrangement> {
    let mut keep_cols = Vec::new();
    for j in arr.interior_columns() {
        let segs = arr.face_segments(j);
        let p = interior_point(&segs).ok_or_else(|| LarError::Degenerate { cell: j, reason: "face without interior".into() })?;
        if classify_against_segments(p, boundary, eps) != PointClass::Outside {
            keep_cols.push(j);
        }
    }
    Ok(select_faces(arr, &keep_cols))
}

/// Sub-arrangement made of the given interior face columns.
pub(crate) fn select_faces(arr: &PlanarArrangement, cols: &[usize]) -> PlanarArrangement {
    if cols.is_empty() {
        return PlanarArrangement::empty();
    }
    let mut edge_map = vec![usize::MAX; arr.edges.len()];
    let mut kept_edges = Vec::new();
    for &j in cols {
        for (e, _) in arr.d2.column(j) {
            if edge_map[e] == usize::MAX {
                edge_map[e] = 0;
                kept_edges.push(e);
            }
        }
    }
    kept_edges.sort_unstable();
    for (k, &e) in kept_edges.iter().enumerate() {
        edge_map[e] = k;
    }
    let table = CellTable::new(1, kept_edges.iter().map(|&e| arr.edges.cells[e].clone()).collect());
    let (geometry, edges) = compact(&arr.geometry, &table);
    let d1 = boundary_1(&edges, geometry.len()).expect("edges stay valid");
    let mut columns: Vec<Vec<(usize, i8)>> = cols
        .iter()
        .map(|&j| arr.d2.column(j).map(|(e, s)| (edge_map[e], s)).collect())
        .collect();
    let total: Vec<(usize, i8)> = columns.iter().flatten().map(|&(e, s)| (e, -s)).collect();
    columns.push(total);
    let d2 = SignedSparseMatrix::from_columns(edges.len(), columns).expect("summed cycles stay in range");
    let interior: Vec<usize> = (0..cols.len()).collect();
    let faces = cells_from_boundary(&d2.select_columns(&interior), &edges).expect("shapes agree");
    let exterior = Some(d2.ncols() - 1);
    PlanarArrangement { geometry, edges, d1, d2, faces, exterior }
}
