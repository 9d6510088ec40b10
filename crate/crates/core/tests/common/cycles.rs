//! Exhaustive cycle enumeration on skeletons with at most a handful of
//! petals (edges in 2D, faces in 3D).
//!
//! Every chain with coefficients in {−1, 0, 1} is tried. The nonzero cycles
//! whose support contains no smaller cycle's support are the minimal
//! cycles. A minimal cycle bounds a cell when it has positive measure and
//! no other part of the skeleton lies inside it; it is the exterior when it
//! has negative measure and everything else lies inside its negation.

use std::collections::BTreeSet;

use larkit::lar::{CellTable, Geometry};
use larkit::operators::boundary_1;
use larkit::tgw::{extract_all_cells, Skeleton};
use larkit::SignedSparseMatrix;
use num_rational::Rational64;
use num_traits::Zero;

pub type SparseCycle = Vec<(usize, i32)>;

#[derive(Clone, Debug)]
pub struct SmallSkeleton {
    pub name: &'static str,
    pub points: Vec<Vec<f64>>,
    pub edges: Vec<[usize; 2]>,
    /// Face boundaries as vertex rings (3D only).
    pub rings: Vec<Vec<usize>>,
}

impl SmallSkeleton {
    pub fn planar(name: &'static str, points: &[[f64; 2]], edges: &[[usize; 2]]) -> Self {
        SmallSkeleton { name, points: points.iter().map(|p| p.to_vec()).collect(), edges: edges.to_vec(), rings: vec![] }
    }

    /// Edges are read off the rings, stored in order of first appearance and
    /// with the direction of that appearance.
    pub fn spatial(name: &'static str, points: &[[f64; 3]], rings: &[&[usize]]) -> Self {
        let mut edges: Vec<[usize; 2]> = Vec::new();
        for ring in rings {
            for k in 0..ring.len() {
                let (a, b) = (ring[k], ring[(k + 1) % ring.len()]);
                if !edges.iter().any(|e| *e == [a, b] || *e == [b, a]) {
                    edges.push([a, b]);
                }
            }
        }
        SmallSkeleton {
            name,
            points: points.iter().map(|p| p.to_vec()).collect(),
            edges,
            rings: rings.iter().map(|r| r.to_vec()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn n_petals(&self) -> usize {
        if self.dim() == 2 { self.edges.len() } else { self.rings.len() }
    }

    fn ring_edge_signs(&self, f: usize) -> Vec<(usize, i32)> {
        let ring = &self.rings[f];
        (0..ring.len())
            .map(|k| {
                let (a, b) = (ring[k], ring[(k + 1) % ring.len()]);
                let e = self.edges.iter().position(|e| *e == [a, b] || *e == [b, a]).unwrap();
                (e, if self.edges[e] == [a, b] { 1 } else { -1 })
            })
            .collect()
    }

    /// Hinges × petals incidence with the tail −1 / head +1 edge convention
    /// and ring-traversal face orientation.
    pub fn dense_boundary(&self) -> Vec<Vec<i32>> {
        if self.dim() == 2 {
            let mut m = vec![vec![0; self.edges.len()]; self.points.len()];
            for (e, &[a, b]) in self.edges.iter().enumerate() {
                m[a][e] -= 1;
                m[b][e] += 1;
            }
            m
        } else {
            let mut m = vec![vec![0; self.rings.len()]; self.edges.len()];
            for f in 0..self.rings.len() {
                for (e, s) in self.ring_edge_signs(f) {
                    m[e][f] += s;
                }
            }
            m
        }
    }

    pub fn to_skeleton(&self) -> Skeleton {
        let coords: Vec<f64> = self.points.iter().flatten().copied().collect();
        let geometry = Geometry::new(self.dim(), coords).unwrap();
        let edges = CellTable::new(1, self.edges.iter().map(|e| e.to_vec()).collect());
        if self.dim() == 2 {
            return Skeleton::planar(geometry, edges).unwrap();
        }
        let columns: Vec<Vec<(usize, i8)>> =
            (0..self.rings.len()).map(|f| self.ring_edge_signs(f).into_iter().map(|(e, s)| (e, s as i8)).collect()).collect();
        let d2 = SignedSparseMatrix::from_columns(self.edges.len(), columns).unwrap();
        let d1 = boundary_1(&edges, geometry.len()).unwrap();
        assert!(d1.multiply(&d2).unwrap().is_zero(), "{}: rings do not close", self.name);
        Skeleton::spatial(geometry, edges, CellTable::new(2, self.rings.clone()), d2).unwrap()
    }

    fn p2(&self, v: usize) -> [f64; 2] {
        [self.points[v][0], self.points[v][1]]
    }

    fn p3(&self, v: usize) -> [f64; 3] {
        [self.points[v][0], self.points[v][1], self.points[v][2]]
    }

    /// Signed area or volume of a chain.
    pub fn measure(&self, c: &[(usize, i32)]) -> f64 {
        if self.dim() == 2 {
            c.iter()
                .map(|&(e, k)| {
                    let (a, b) = (self.p2(self.edges[e][0]), self.p2(self.edges[e][1]));
                    k as f64 * 0.5 * (a[0] * b[1] - a[1] * b[0])
                })
                .sum()
        } else {
            c.iter()
                .map(|&(f, k)| {
                    let ring = &self.rings[f];
                    let p0 = self.p3(ring[0]);
                    let vol: f64 = (1..ring.len() - 1).map(|i| det3(p0, self.p3(ring[i]), self.p3(ring[i + 1]))).sum();
                    k as f64 * vol / 6.0
                })
                .sum()
        }
    }

    /// Winding number of a closed chain around a point off the chain.
    pub fn winding(&self, c: &[(usize, i32)], x: &[f64]) -> i32 {
        if self.dim() == 2 {
            let turn: f64 = c
                .iter()
                .map(|&(e, k)| {
                    let (a, b) = (self.p2(self.edges[e][0]), self.p2(self.edges[e][1]));
                    let (u, v) = ([a[0] - x[0], a[1] - x[1]], [b[0] - x[0], b[1] - x[1]]);
                    k as f64 * (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1])
                })
                .sum();
            (turn / std::f64::consts::TAU).round() as i32
        } else {
            // signed crossings of a ray in a generic direction
            let d = [0.314_159_265, 0.271_828_182, 0.914_213_562];
            let o = [x[0], x[1], x[2]];
            let mut w = 0;
            for &(f, k) in c {
                let ring = &self.rings[f];
                let p0 = self.p3(ring[0]);
                for i in 1..ring.len() - 1 {
                    let (p1, p2) = (self.p3(ring[i]), self.p3(ring[i + 1]));
                    if let Some(s) = ray_hits(o, d, p0, p1, p2) {
                        w += k * s;
                    }
                }
            }
            w
        }
    }

    /// Points that lie on the skeleton but off the chain's closure.
    pub fn samples_off(&self, c: &[(usize, i32)]) -> Vec<Vec<f64>> {
        let support: BTreeSet<usize> = c.iter().map(|&(p, _)| p).collect();
        let (on_edges, on_verts): (BTreeSet<usize>, BTreeSet<usize>) = if self.dim() == 2 {
            (support.clone(), support.iter().flat_map(|&e| self.edges[e]).collect())
        } else {
            let es: BTreeSet<usize> = support.iter().flat_map(|&f| self.ring_edge_signs(f).into_iter().map(|(e, _)| e)).collect();
            let vs = support.iter().flat_map(|&f| self.rings[f].iter().copied()).collect();
            (es, vs)
        };
        let mut out = Vec::new();
        for v in 0..self.points.len() {
            if !on_verts.contains(&v) {
                out.push(self.points[v].clone());
            }
        }
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            if !on_edges.contains(&e) {
                out.push(self.points[a].iter().zip(&self.points[b]).map(|(x, y)| 0.5 * (x + y)).collect());
            }
        }
        for (f, ring) in self.rings.iter().enumerate() {
            if !support.contains(&f) {
                let n = ring.len() as f64;
                out.push((0..3).map(|k| ring.iter().map(|&v| self.points[v][k]).sum::<f64>() / n).collect());
            }
        }
        out
    }
}

fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

fn ray_hits(o: [f64; 3], d: [f64; 3], a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> Option<i32> {
    let sub = |x: [f64; 3], y: [f64; 3]| [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
    let cross = |x: [f64; 3], y: [f64; 3]| [x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]];
    let dot = |x: [f64; 3], y: [f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    let (e1, e2) = (sub(b, a), sub(c, a));
    let pv = cross(d, e2);
    let det = dot(e1, pv);
    if det.abs() < 1e-14 {
        return None;
    }
    let tv = sub(o, a);
    let u = dot(tv, pv) / det;
    let qv = cross(tv, e1);
    let v = dot(d, qv) / det;
    let t = dot(e2, qv) / det;
    if u < 0.0 || v < 0.0 || u + v > 1.0 || t <= 0.0 {
        return None;
    }
    Some(if dot(cross(e1, e2), d) > 0.0 { 1 } else { -1 })
}

/// All nonzero {−1,0,1}-cycles whose support is inclusion-minimal.
pub fn minimal_cycles(s: &SmallSkeleton) -> Vec<SparseCycle> {
    let bd = s.dense_boundary();
    let n = s.n_petals();
    assert!(n <= 10, "{}: too many petals to enumerate", s.name);
    let mut cycles: Vec<SparseCycle> = Vec::new();
    let total = 3usize.pow(n as u32);
    for code in 1..total {
        let mut c = Vec::new();
        let mut x = code;
        for p in 0..n {
            let digit = [0, 1, -1][x % 3];
            x /= 3;
            if digit != 0 {
                c.push((p, digit));
            }
        }
        if !c.is_empty() && bd.iter().all(|row| c.iter().map(|&(p, k)| row[p] * k).sum::<i32>() == 0) {
            cycles.push(c);
        }
    }
    let supports: Vec<BTreeSet<usize>> = cycles.iter().map(|c| c.iter().map(|&(p, _)| p).collect()).collect();
    cycles
        .iter()
        .enumerate()
        .filter(|(i, _)| !supports.iter().any(|t| t.len() < supports[*i].len() && t.is_subset(&supports[*i])))
        .map(|(_, c)| c.clone())
        .collect()
}

/// Cells the skeleton bounds, by the emptiness rule, and the exterior.
pub fn oracle_cells(s: &SmallSkeleton) -> (BTreeSet<SparseCycle>, BTreeSet<SparseCycle>) {
    let mut interior = BTreeSet::new();
    let mut exterior = BTreeSet::new();
    for c in minimal_cycles(s) {
        let m = s.measure(&c);
        let samples = s.samples_off(&c);
        if m > 1e-12 && samples.iter().all(|x| s.winding(&c, x) == 0) {
            interior.insert(c);
        } else if m < -1e-12 && samples.iter().all(|x| s.winding(&c, x) == -1) {
            exterior.insert(c);
        }
    }
    (interior, exterior)
}

fn rank(rows: &[Vec<i32>]) -> usize {
    let mut m: Vec<Vec<Rational64>> = rows.iter().map(|r| r.iter().map(|&x| Rational64::from_integer(x as i64)).collect()).collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..ncols {
        let Some(pivot) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, pivot);
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col] / m[r][col];
                for j in 0..ncols {
                    let sub = f * m[r][j];
                    m[i][j] -= sub;
                }
            }
        }
        r += 1;
    }
    r
}

/// Smallest total support of a basis of the cycle space, found greedily
/// over the minimal cycles (a matroid, so greedy is optimal).
pub fn minimum_basis_weight(s: &SmallSkeleton) -> usize {
    let n = s.n_petals();
    let mut candidates = minimal_cycles(s);
    candidates.sort_by_key(|c| c.len());
    let mut basis: Vec<Vec<i32>> = Vec::new();
    let mut weight = 0;
    for c in candidates {
        let mut dense = vec![0; n];
        for &(p, k) in &c {
            dense[p] = k;
        }
        basis.push(dense);
        if rank(&basis) == basis.len() {
            weight += c.len();
        } else {
            basis.pop();
        }
    }
    weight
}

pub fn planar_fixtures() -> Vec<SmallSkeleton> {
    let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    vec![
        SmallSkeleton::planar("triangle", &[[0.0, 0.0], [2.0, 0.0], [0.5, 1.5]], &[[0, 1], [2, 1], [2, 0]]),
        SmallSkeleton::planar("square with diagonal", &sq, &[[0, 1], [1, 2], [3, 2], [3, 0], [0, 2]]),
        SmallSkeleton::planar(
            "house",
            &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 1.6]],
            &[[0, 1], [1, 2], [2, 3], [3, 0], [2, 4], [4, 3]],
        ),
        SmallSkeleton::planar(
            "square with spokes",
            &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]],
            &[[0, 1], [1, 2], [2, 3], [3, 0], [4, 0], [1, 4], [4, 2], [3, 4]],
        ),
        SmallSkeleton::planar(
            "triangle with inner vertex",
            &[[0.0, 0.0], [3.0, 0.0], [1.0, 2.5], [1.2, 0.8]],
            &[[0, 1], [1, 2], [2, 0], [3, 0], [3, 1], [2, 3]],
        ),
        SmallSkeleton::planar(
            "hexagon with two chords",
            &[[2.0, 0.0], [1.0, 1.7], [-1.0, 1.7], [-2.0, 0.0], [-1.0, -1.7], [1.0, -1.7]],
            &[[0, 1], [1, 2], [2, 3], [3, 4], [4, 5], [5, 0], [0, 2], [3, 5]],
        ),
        SmallSkeleton::planar(
            "non-convex pentagon with chord",
            &[[0.0, 0.0], [4.0, 0.0], [4.0, 3.0], [2.0, 1.0], [0.0, 3.0]],
            &[[0, 1], [1, 2], [2, 3], [3, 4], [4, 0], [3, 0]],
        ),
    ]
}

pub fn spatial_fixtures() -> Vec<SmallSkeleton> {
    let cube = [
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [1.0, 0.0, 1.0],
        [1.0, 1.0, 1.0],
        [0.0, 1.0, 1.0],
    ];
    let pyramid = [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [2.0, 2.0, 0.0], [0.0, 2.0, 0.0], [1.0, 1.0, 1.5]];
    let tet = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let bipyramid = [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.5, 1.8, 0.0], [0.8, 0.6, 1.2], [0.8, 0.6, -1.0]];
    let prism = [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.7, 1.5, 0.0], [0.0, 0.0, 1.3], [2.0, 0.0, 1.3], [0.7, 1.5, 1.3]];
    let octa = [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, -1.0]];
    vec![
        SmallSkeleton::spatial("tetrahedron", &tet, &[&[0, 2, 1], &[0, 1, 3], &[1, 2, 3], &[0, 3, 2]]),
        SmallSkeleton::spatial(
            "cube with mixed ring orientations",
            &cube,
            &[&[0, 1, 2, 3], &[4, 5, 6, 7], &[0, 1, 5, 4], &[2, 3, 7, 6], &[1, 2, 6, 5], &[0, 4, 7, 3]],
        ),
        SmallSkeleton::spatial("square pyramid", &pyramid, &[&[0, 3, 2, 1], &[0, 1, 4], &[1, 2, 4], &[2, 3, 4], &[3, 0, 4]]),
        SmallSkeleton::spatial(
            "triangular prism",
            &prism,
            &[&[0, 2, 1], &[3, 4, 5], &[0, 1, 4, 3], &[1, 2, 5, 4], &[2, 0, 3, 5]],
        ),
        SmallSkeleton::spatial(
            "bipyramid with shared triangle",
            &bipyramid,
            &[&[0, 1, 3], &[1, 2, 3], &[2, 0, 3], &[1, 0, 4], &[2, 1, 4], &[0, 2, 4], &[0, 1, 2]],
        ),
        SmallSkeleton::spatial(
            "tetrahedron split through an edge midpoint",
            &[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.5, 0.5, 0.0]],
            &[&[0, 1, 4], &[0, 4, 2], &[1, 4, 3], &[4, 2, 3], &[0, 1, 3], &[0, 3, 2], &[0, 4, 3]],
        ),
        SmallSkeleton::spatial(
            "pyramid split through the apex",
            &pyramid,
            &[&[0, 1, 2], &[0, 2, 3], &[0, 1, 4], &[1, 2, 4], &[2, 3, 4], &[3, 0, 4], &[0, 2, 4]],
        ),
        SmallSkeleton::spatial(
            "octahedron",
            &octa,
            &[&[0, 2, 4], &[2, 1, 4], &[1, 3, 4], &[3, 0, 4], &[2, 0, 5], &[1, 2, 5], &[3, 1, 5], &[0, 3, 5]],
        ),
    ]
}

/// Compares the cycles extracted by gift wrapping with the oracle: same
/// interior cells, same exterior, all minimal, and a basis of least weight.
pub fn check_against_tgw(s: &SmallSkeleton) -> Result<(), String> {
    let (want_in, want_ext) = oracle_cells(s);
    let ex = extract_all_cells(&s.to_skeleton()).map_err(|e| format!("{}: {e}", s.name))?;
    let mut got_in = BTreeSet::new();
    let mut got_ext = BTreeSet::new();
    for (k, c) in ex.cycles.iter().enumerate() {
        let entries = c.entries().to_vec();
        if ex.exteriors.contains(&k) {
            got_ext.insert(entries);
        } else {
            got_in.insert(entries);
        }
    }
    if want_in.is_empty() {
        return Err(format!("{}: oracle found no cells", s.name));
    }
    if got_in != want_in {
        return Err(format!("{}: interior cycles {got_in:?}, oracle {want_in:?}", s.name));
    }
    if got_ext != want_ext {
        return Err(format!("{}: exterior {got_ext:?}, oracle {want_ext:?}", s.name));
    }
    let minimal: BTreeSet<SparseCycle> = minimal_cycles(s).into_iter().collect();
    if !got_in.iter().chain(&got_ext).all(|c| minimal.contains(c)) {
        return Err(format!("{}: a non-minimal cycle was extracted", s.name));
    }
    let weight: usize = got_in.iter().map(|c| c.len()).sum();
    let best = minimum_basis_weight(s);
    if weight != best {
        return Err(format!("{}: basis weight {weight}, minimum {best}", s.name));
    }
    Ok(())
}
