//! Topological gift wrapping.
//!
//! Each top cell of an arrangement is recovered as a minimal (d−1)-cycle of
//! the (d−1)-skeleton. Starting from one oriented (d−1)-cell, the chain is
//! grown across every open hinge of its boundary by taking the petal that
//! is adjacent in the angular order around that hinge, signed so that the
//! hinge cancels. The walk stops when the boundary of the chain vanishes.
//!
//! Hinges are vertices and petals are edges in the plane; in space hinges
//! are edges and petals are faces. Petals around a hinge are ordered by the
//! angle of the direction pointing from the hinge into the petal, measured
//! counter-clockwise (in space: right-handed about the hinge direction).
//! With that ordering the rule is the same in both dimensions: a hinge
//! carrying coefficient −1 in the current boundary continues with the next
//! petal, one carrying +1 continues with the previous one.

use std::sync::atomic::{AtomicBool, Ordering};

use log::warn;
use rayon::prelude::*;

use crate::error::{LarError, Result};
use crate::geom::{cross3, dot3, normalize3, scale3, sub3, P3};
use crate::lar::{CellTable, Geometry};
use crate::operators::boundary_1;
use crate::sparse::{Chain, SignedSparseMatrix};

/// A (d−1)-skeleton ready for cell extraction.
///
/// For `d = 2` only the edges and ∂₁ are present; for `d = 3` the faces
/// and ∂₂ are set as well.
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub geometry: Geometry,
    pub edges: CellTable,
    pub d1: SignedSparseMatrix,
    pub faces: Option<CellTable>,
    pub d2: Option<SignedSparseMatrix>,
}

impl Skeleton {
    pub fn planar(geometry: Geometry, edges: CellTable) -> Result<Self> {
        if geometry.dim() != 2 {
            return Err(LarError::DimensionMismatch(format!("planar skeleton needs 2D geometry, got {}D", geometry.dim())));
        }
        let d1 = boundary_1(&edges, geometry.len())?;
        Ok(Skeleton { geometry, edges, d1, faces: None, d2: None })
    }

    pub fn spatial(geometry: Geometry, edges: CellTable, faces: CellTable, d2: SignedSparseMatrix) -> Result<Self> {
        if geometry.dim() != 3 {
            return Err(LarError::DimensionMismatch(format!("spatial skeleton needs 3D geometry, got {}D", geometry.dim())));
        }
        let d1 = boundary_1(&edges, geometry.len())?;
        if d2.nrows() != edges.len() || d2.ncols() != faces.len() {
            return Err(LarError::DimensionMismatch(format!(
                "∂2 is {}x{} for {} edges and {} faces",
                d2.nrows(),
                d2.ncols(),
                edges.len(),
                faces.len()
            )));
        }
        Ok(Skeleton { geometry, edges, d1, faces: Some(faces), d2: Some(d2) })
    }

    /// Dimension `d` of the cells to extract.
    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }

    /// ∂_{d−1}: hinges × petals.
    pub fn petal_boundary(&self) -> &SignedSparseMatrix {
        self.d2.as_ref().unwrap_or(&self.d1)
    }

    /// δ_{d−2}: petals × hinges.
    pub fn coboundary(&self) -> SignedSparseMatrix {
        self.petal_boundary().transpose()
    }

    pub fn n_petals(&self) -> usize {
        self.petal_boundary().ncols()
    }

    pub fn n_hinges(&self) -> usize {
        self.petal_boundary().nrows()
    }

    fn edge_ends(&self, e: usize) -> (usize, usize) {
        let mut tail = 0;
        let mut head = 0;
        for (v, s) in self.d1.column(e) {
            if s < 0 {
                tail = v;
            } else {
                head = v;
            }
        }
        (tail, head)
    }

    /// Vector area of face `f` (its normal scaled by its area), oriented by
    /// the face's ∂₂ column.
    pub fn face_vector_area(&self, f: usize) -> P3 {
        let d2 = self.d2.as_ref().expect("face data requires a spatial skeleton");
        let mut a = [0.0; 3];
        for (e, s) in d2.column(f) {
            let (t, h) = self.edge_ends(e);
            let c = cross3(self.geometry.point3(t), self.geometry.point3(h));
            for k in 0..3 {
                a[k] += 0.5 * s as f64 * c[k];
            }
        }
        a
    }

    fn face_normals(&self) -> Result<Vec<P3>> {
        (0..self.n_petals())
            .map(|f| {
                normalize3(self.face_vector_area(f))
                    .ok_or_else(|| LarError::Degenerate { cell: f, reason: "face with zero area".into() })
            })
            .collect()
    }
}

/// One petal of a fan: a (d−1)-cell with its incidence sign at the hinge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Petal {
    pub cell: usize,
    pub incidence: i8,
    pub angle: f64,
}

/// Petals around a hinge in increasing angle.
#[derive(Clone, Debug, PartialEq)]
pub struct PetalFan {
    pub hinge: usize,
    pub petals: Vec<Petal>,
}

/// Orthonormal `(v, w)` spanning the plane orthogonal to unit `u`, with
/// `w = u × v`. `v` comes from the coordinate axis least aligned with `u`.
pub fn hinge_frame(u: P3) -> (P3, P3) {
    let k = (0..3).min_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs())).unwrap();
    let mut axis = [0.0; 3];
    axis[k] = 1.0;
    let v = normalize3(sub3(axis, scale3(u, dot3(axis, u)))).expect("axis not parallel to hinge");
    (v, cross3(u, v))
}

fn wrap_angle(a: f64) -> f64 {
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

struct FanBuilder<'a> {
    skeleton: &'a Skeleton,
    by_hinge: SignedSparseMatrix,
    normals: Option<Vec<P3>>,
}

impl<'a> FanBuilder<'a> {
    fn new(skeleton: &'a Skeleton) -> Result<Self> {
        let normals = if skeleton.dim() == 3 { Some(skeleton.face_normals()?) } else { None };
        // columns of δ are hinges, listing their petals with incidence signs
        Ok(FanBuilder { skeleton, by_hinge: skeleton.coboundary(), normals })
    }

    fn fan(&self, hinge: usize) -> Result<PetalFan> {
        let hinge_cols = &self.by_hinge;
        let sk = self.skeleton;
        let mut petals: Vec<Petal> = Vec::new();
        match &self.normals {
            None => {
                let v = sk.geometry.point2(hinge);
                for (e, a) in hinge_cols.column(hinge) {
                    let (t, h) = sk.edge_ends(e);
                    let other = sk.geometry.point2(if t == hinge { h } else { t });
                    let angle = wrap_angle((other[1] - v[1]).atan2(other[0] - v[0]));
                    petals.push(Petal { cell: e, incidence: a, angle });
                }
            }
            Some(normals) => {
                let (t, h) = sk.edge_ends(hinge);
                let u = normalize3(sub3(sk.geometry.point3(h), sk.geometry.point3(t)))
                    .ok_or_else(|| LarError::Degenerate { cell: hinge, reason: "zero-length hinge".into() })?;
                let (v, w) = hinge_frame(u);
                for (f, a) in hinge_cols.column(hinge) {
                    // direction from the hinge into the face: left of the traversal a·u
                    let d = scale3(cross3(normals[f], u), a as f64);
                    let angle = wrap_angle(dot3(d, w).atan2(dot3(d, v)));
                    petals.push(Petal { cell: f, incidence: a, angle });
                }
            }
        }
        petals.sort_by(|p, q| p.angle.total_cmp(&q.angle).then(p.cell.cmp(&q.cell)));
        if petals.windows(2).any(|w| (w[1].angle - w[0].angle).abs() < 1e-12) {
            warn!("hinge {hinge}: coincident petals, ordered by cell index");
        }
        if petals.len() < 2 {
            return Err(LarError::OpenHinge { hinge, petals: petals.len() });
        }
        Ok(PetalFan { hinge, petals })
    }

    fn all(&self) -> Result<Vec<Option<PetalFan>>> {
        (0..self.skeleton.n_hinges())
            .map(|h| if self.by_hinge.column_nnz(h) == 0 { Ok(None) } else { self.fan(h).map(Some) })
            .collect()
    }
}

/// Cyclically ordered petals around `hinge`.
pub fn petal_fan(skeleton: &Skeleton, hinge: usize) -> Result<PetalFan> {
    if hinge >= skeleton.n_hinges() {
        return Err(LarError::IndexOutOfRange { index: hinge, len: skeleton.n_hinges() });
    }
    FanBuilder::new(skeleton)?.fan(hinge)
}

/// The petal that continues the oriented cell `current = (cell, sign)`
/// across the fan's hinge, signed so the hinge cancels.
pub fn next_petal(fan: &PetalFan, current: (usize, i8)) -> Result<(usize, i8)> {
    let (cell, sign) = current;
    let pos = fan
        .petals
        .iter()
        .position(|p| p.cell == cell)
        .ok_or(LarError::NotInFan { hinge: fan.hinge, cell })?;
    let n = fan.petals.len();
    let k = sign * fan.petals[pos].incidence;
    let next = if k < 0 { (pos + 1) % n } else { (pos + n - 1) % n };
    let g = fan.petals[next];
    Ok((g.cell, -k * g.incidence))
}

/// Per-petal record of which orientations already belong to a cycle.
#[derive(Clone, Debug)]
pub struct UsageLedger {
    plus: Vec<bool>,
    minus: Vec<bool>,
}

impl UsageLedger {
    pub fn new(n: usize) -> Self {
        UsageLedger { plus: vec![false; n], minus: vec![false; n] }
    }

    pub fn is_used(&self, cell: usize, sign: i8) -> bool {
        if sign > 0 {
            self.plus[cell]
        } else {
            self.minus[cell]
        }
    }

    /// Marks an orientation; returns false if it was already taken.
    pub fn claim(&mut self, cell: usize, sign: i8) -> bool {
        let slot = if sign > 0 { &mut self.plus[cell] } else { &mut self.minus[cell] };
        !std::mem::replace(slot, true)
    }

    pub fn is_full(&self) -> bool {
        self.plus.iter().chain(&self.minus).all(|&b| b)
    }

    /// First unused orientation in `(cell, +1), (cell, −1)` order.
    pub fn next_seed(&self, from: usize) -> Option<(usize, i8)> {
        (from..self.plus.len()).find_map(|c| {
            if !self.plus[c] {
                Some((c, 1))
            } else if !self.minus[c] {
                Some((c, -1))
            } else {
                None
            }
        })
    }
}

/// Precomputed fans for a skeleton.
pub struct Wrapper<'a> {
    skeleton: &'a Skeleton,
    fans: Vec<Option<PetalFan>>,
}

impl<'a> Wrapper<'a> {
    pub fn new(skeleton: &'a Skeleton) -> Result<Self> {
        let fans = FanBuilder::new(skeleton)?.all()?;
        Ok(Wrapper { skeleton, fans })
    }

    pub fn fan(&self, hinge: usize) -> Option<&PetalFan> {
        self.fans[hinge].as_ref()
    }

    /// Grows the cycle containing `seed`. Does not touch any ledger.
    pub fn cycle_from(&self, seed: (usize, i8)) -> Result<Chain> {
        let bd = self.skeleton.petal_boundary();
        let n = bd.ncols();
        if seed.0 >= n {
            return Err(LarError::IndexOutOfRange { index: seed.0, len: n });
        }
        let mut coeff = vec![0i8; 0];
        coeff.resize(n, 0);
        let mut members = vec![seed];
        coeff[seed.0] = seed.1;
        let mut k = 0;
        while k < members.len() {
            let (f, s) = members[k];
            k += 1;
            for (h, _) in bd.column(f) {
                let fan = self.fans[h].as_ref().ok_or(LarError::OpenHinge { hinge: h, petals: 0 })?;
                let (g, t) = next_petal(fan, (f, s))?;
                match coeff[g] {
                    0 => {
                        coeff[g] = t;
                        members.push((g, t));
                    }
                    c if c == t => {}
                    _ => {
                        return Err(LarError::Wrapping {
                            cell: g,
                            reason: format!("reached with both orientations from hinge {h}"),
                        })
                    }
                }
            }
            if members.len() > n {
                return Err(LarError::Wrapping { cell: f, reason: "cycle outgrew the skeleton".into() });
            }
        }
        let chain = Chain::new(self.skeleton.dim() - 1, n, members.iter().map(|&(f, s)| (f, s as i32)))?;
        let rim = bd.apply(&chain)?;
        if !rim.is_empty() {
            return Err(LarError::NotClosed { nonzeros: rim.support_len() });
        }
        Ok(chain)
    }

    /// Extracts the cycle through `seed` and claims its orientations.
    pub fn extract_cycle(&self, seed: (usize, i8), ledger: &mut UsageLedger) -> Result<Chain> {
        if ledger.is_used(seed.0, seed.1) {
            return Err(LarError::Wrapping { cell: seed.0, reason: "seed orientation already consumed".into() });
        }
        let chain = self.cycle_from(seed)?;
        for &(f, c) in chain.entries() {
            if !ledger.claim(f, c as i8) {
                return Err(LarError::Wrapping { cell: f, reason: "orientation consumed by two cycles".into() });
            }
        }
        Ok(chain)
    }
}

/// Convenience: extract the cycle through `seed` on a fresh skeleton view.
pub fn extract_cycle(skeleton: &Skeleton, seed: (usize, i8), ledger: &mut UsageLedger) -> Result<Chain> {
    Wrapper::new(skeleton)?.extract_cycle(seed, ledger)
}

/// All cycles of a skeleton together with their measures and components.
#[derive(Clone, Debug)]
pub struct CellExtraction {
    /// Cycles in seed order (lowest unused oriented petal first).
    pub cycles: Vec<Chain>,
    /// Signed area or volume of each cycle.
    pub measures: Vec<f64>,
    /// Connected component (through shared hinges) of each cycle.
    pub component: Vec<usize>,
    /// For each component, the index of its exterior cycle.
    pub exteriors: Vec<usize>,
    pub n_petals: usize,
}

impl CellExtraction {
    /// Every cycle as a column, exterior ones included.
    pub fn boundary(&self) -> SignedSparseMatrix {
        let cols = self
            .cycles
            .iter()
            .map(|c| c.entries().iter().map(|&(i, v)| (i, v as i8)).collect())
            .collect();
        SignedSparseMatrix::from_columns(self.n_petals, cols).expect("cycle entries are in range")
    }

    /// The exterior cycle when the skeleton is connected.
    pub fn exterior(&self) -> Option<usize> {
        (self.exteriors.len() == 1).then(|| self.exteriors[0])
    }

    pub fn n_components(&self) -> usize {
        self.exteriors.len()
    }

    /// Total number of petal incidences; twice the petal count on a valid run.
    pub fn total_support(&self) -> usize {
        self.cycles.iter().map(|c| c.support_len()).sum()
    }
}

/// Signed area (2D shoelace) or signed volume (3D divergence theorem) of a
/// closed (d−1)-chain.
pub fn signed_measure(cycle: &Chain, skeleton: &Skeleton) -> Result<f64> {
    let bd = skeleton.petal_boundary();
    let rim = bd.apply(cycle)?;
    if !rim.is_empty() {
        return Err(LarError::NotClosed { nonzeros: rim.support_len() });
    }
    Ok(measure_unchecked(cycle, skeleton))
}

fn measure_unchecked(cycle: &Chain, skeleton: &Skeleton) -> f64 {
    let g = &skeleton.geometry;
    match skeleton.dim() {
        2 => {
            0.5 * cycle
                .entries()
                .iter()
                .map(|&(e, c)| {
                    let (t, h) = skeleton.edge_ends(e);
                    let (a, b) = (g.point2(t), g.point2(h));
                    c as f64 * (a[0] * b[1] - a[1] * b[0])
                })
                .sum::<f64>()
        }
        _ => {
            let faces = skeleton.faces.as_ref().expect("spatial skeleton");
            cycle
                .entries()
                .iter()
                .map(|&(f, c)| {
                    let p0 = g.point3(faces.cells[f][0]);
                    c as f64 * dot3(p0, skeleton.face_vector_area(f)) / 3.0
                })
                .sum()
        }
    }
}

fn petal_components(skeleton: &Skeleton) -> Vec<usize> {
    let bd = skeleton.petal_boundary();
    let n = bd.ncols();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let by_hinge = bd.transpose();
    for h in 0..by_hinge.ncols() {
        let mut it = by_hinge.column(h).map(|(f, _)| f);
        if let Some(first) = it.next() {
            for f in it {
                let (a, b) = (find(&mut parent, first), find(&mut parent, f));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut comp = vec![0; n];
    for f in 0..n {
        let r = find(&mut parent, f);
        if label[r] == usize::MAX {
            label[r] = next;
            next += 1;
        }
        comp[f] = label[r];
    }
    comp
}

fn finish(skeleton: &Skeleton, cycles: Vec<Chain>) -> Result<CellExtraction> {
    let measures: Vec<f64> = cycles.iter().map(|c| measure_unchecked(c, skeleton)).collect();
    let petal_comp = petal_components(skeleton);
    let component: Vec<usize> = cycles.iter().map(|c| petal_comp[c.entries()[0].0]).collect();
    let ncomp = component.iter().map(|&c| c + 1).max().unwrap_or(0);
    let mut exteriors = vec![usize::MAX; ncomp];
    let mut negatives = vec![0usize; ncomp];
    for (k, (&m, &c)) in measures.iter().zip(&component).enumerate() {
        if m < 0.0 {
            negatives[c] += 1;
        }
        if exteriors[c] == usize::MAX || m < measures[exteriors[c]] {
            exteriors[c] = k;
        }
    }
    for (c, &n) in negatives.iter().enumerate() {
        if n != 1 {
            warn!("component {c} has {n} negatively oriented cycles");
        }
    }
    Ok(CellExtraction { cycles, measures, component, exteriors, n_petals: skeleton.n_petals() })
}

/// Extracts every cell of the skeleton as a minimal cycle, seeding from the
/// lowest unused oriented petal, and flags one exterior cycle per connected
/// component (the one with the most negative measure).
pub fn extract_all_cells(skeleton: &Skeleton) -> Result<CellExtraction> {
    let wrapper = Wrapper::new(skeleton)?;
    let n = skeleton.n_petals();
    let mut ledger = UsageLedger::new(n);
    let mut cycles = Vec::new();
    let mut from = 0;
    while let Some(seed) = ledger.next_seed(from) {
        from = seed.0;
        cycles.push(wrapper.extract_cycle(seed, &mut ledger)?);
    }
    if !ledger.is_full() {
        return Err(LarError::Wrapping { cell: from, reason: "usage ledger left incomplete".into() });
    }
    finish(skeleton, cycles)
}

fn seed_key(cell: usize, sign: i32) -> usize {
    2 * cell + usize::from(sign < 0)
}

/// Same result as [`extract_all_cells`], with cycles grown concurrently.
/// Orientations are claimed through atomic flags; a cycle is kept by the
/// thread that claims its lowest oriented petal, and cycles are returned in
/// the sequential seed order.
pub fn extract_all_cells_parallel(skeleton: &Skeleton) -> Result<CellExtraction> {
    let wrapper = Wrapper::new(skeleton)?;
    let n = skeleton.n_petals();
    let claimed: Vec<AtomicBool> = (0..2 * n).map(|_| AtomicBool::new(false)).collect();
    let owner: Vec<AtomicBool> = (0..2 * n).map(|_| AtomicBool::new(false)).collect();
    let found: Vec<Result<Option<(usize, Chain)>>> = (0..2 * n)
        .into_par_iter()
        .map(|key| {
            if claimed[key].load(Ordering::Acquire) {
                return Ok(None);
            }
            let seed = (key / 2, if key % 2 == 0 { 1i8 } else { -1 });
            let chain = wrapper.cycle_from(seed)?;
            let rep = chain.entries().iter().map(|&(f, c)| seed_key(f, c)).min().unwrap();
            for &(f, c) in chain.entries() {
                claimed[seed_key(f, c)].store(true, Ordering::Release);
            }
            if owner[rep].swap(true, Ordering::AcqRel) {
                Ok(None)
            } else {
                Ok(Some((rep, chain)))
            }
        })
        .collect();
    let mut cycles: Vec<(usize, Chain)> = Vec::new();
    for r in found {
        if let Some(c) = r? {
            cycles.push(c);
        }
    }
    cycles.sort_by_key(|c| c.0);
    let mut ledger = UsageLedger::new(n);
    for (_, c) in &cycles {
        for &(f, s) in c.entries() {
            if !ledger.claim(f, s as i8) {
                return Err(LarError::Wrapping { cell: f, reason: "orientation consumed by two cycles".into() });
            }
        }
    }
    if !ledger.is_full() {
        return Err(LarError::Wrapping { cell: 0, reason: "usage ledger left incomplete".into() });
    }
    finish(skeleton, cycles.into_iter().map(|c| c.1).collect())
}
