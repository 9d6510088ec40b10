//! Exact structural checks shared by the integration suites. Each returns a
//! short description on success and the first violation otherwise.

use std::collections::BTreeMap;

use larkit::arrange2d::{arrange_graph, PlanarArrangement};
use larkit::arrange3d::cell_volumes;
use larkit::lar::{CellTable, Geometry};
use larkit::tgw::CellExtraction;
use larkit::{ChainComplexResult, SignedSparseMatrix};

pub type Check = Result<String, String>;

pub fn products_vanish(boundaries: &[SignedSparseMatrix]) -> Check {
    for p in 1..boundaries.len() {
        let prod = boundaries[p - 1].multiply(&boundaries[p]).map_err(|e| e.to_string())?;
        if !prod.is_zero() {
            return Err(format!("∂{}∂{} has {} nonzeros", p, p + 1, prod.nnz()));
        }
    }
    Ok(format!("{} products vanish", boundaries.len().saturating_sub(1)))
}

/// Every row holds exactly one +1 and one −1.
pub fn opposite_pairs(top: &SignedSparseMatrix) -> Check {
    let mut seen = vec![(0usize, 0usize); top.nrows()];
    for (i, _, v) in top.triplets() {
        match v {
            1 => seen[i].0 += 1,
            -1 => seen[i].1 += 1,
            _ => return Err(format!("row {i} stores {v}")),
        }
    }
    match seen.iter().position(|&s| s != (1, 1)) {
        Some(i) => Err(format!("row {i} has {:?} (+, −) entries", seen[i])),
        None => Ok(format!("{} nonzeros in opposite pairs", top.nnz())),
    }
}

/// Each petal appears in exactly two extracted cycles, once per sign.
pub fn petals_used_twice(ex: &CellExtraction) -> Check {
    let mut uses = vec![(0usize, 0usize); ex.n_petals];
    for c in &ex.cycles {
        for &(p, k) in c.entries() {
            match k {
                1 => uses[p].0 += 1,
                -1 => uses[p].1 += 1,
                _ => return Err(format!("petal {p} has coefficient {k}")),
            }
        }
    }
    match uses.iter().position(|&u| u != (1, 1)) {
        Some(p) => Err(format!("petal {p} used {:?} (+, −)", uses[p])),
        None => Ok(format!("{} petals used twice", ex.n_petals)),
    }
}

fn edge_components(nverts: usize, edges: &CellTable) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..nverts).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in &edges.cells {
        let (a, b) = (find(&mut parent, e[0]), find(&mut parent, e[1]));
        parent[a.max(b)] = a.min(b);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, e) in edges.cells.iter().enumerate() {
        let r = find(&mut parent, e[0]);
        groups.entry(r).or_default().push(k);
    }
    groups.into_values().collect()
}

/// V − E + F = 2 for every connected component arranged on its own
/// (exterior face counted), and V − E + F = 1 + C for the whole.
pub fn planar_euler(arr: &PlanarArrangement, eps: f64) -> Check {
    let comps = edge_components(arr.geometry.len(), &arr.edges);
    let whole = arr.geometry.len() as i64 - arr.edges.len() as i64 + arr.n_faces() as i64 + 1;
    if whole != 1 + comps.len() as i64 {
        return Err(format!("V − E + F = {whole} with {} components", comps.len()));
    }
    for (c, group) in comps.iter().enumerate() {
        let mut local: BTreeMap<usize, usize> = BTreeMap::new();
        let mut cells = Vec::new();
        for &e in group {
            let cell: Vec<usize> = arr.edges.cells[e]
                .iter()
                .map(|&v| {
                    let n = local.len();
                    *local.entry(v).or_insert(n)
                })
                .collect();
            cells.push(cell);
        }
        let mut order = vec![0; local.len()];
        for (&v, &k) in &local {
            order[k] = v;
        }
        let geometry: Geometry = arr.geometry.select(&order);
        let sub = arrange_graph(geometry, CellTable::new(1, cells), eps).map_err(|e| e.to_string())?;
        let chi = sub.geometry.len() as i64 - sub.edges.len() as i64 + sub.n_faces() as i64 + 1;
        if chi != 2 {
            return Err(format!("component {c}: V − E + F = {chi}"));
        }
    }
    Ok(format!("{} components, each with V − E + F = 2", comps.len()))
}

/// Interior volumes sum to the volume enclosed by the exterior shell.
pub fn volume_conserved(result: &ChainComplexResult, rel: f64) -> Result<(f64, f64), String> {
    let vols = cell_volumes(result).map_err(|e| e.to_string())?;
    let ext = result.exterior.ok_or("no exterior cell")?;
    let interior: f64 = vols.iter().enumerate().filter(|&(j, _)| j != ext).map(|(_, v)| v).sum();
    let enclosed = -vols[ext];
    if (interior - enclosed).abs() <= rel * enclosed.abs() {
        Ok((interior, enclosed))
    } else {
        Err(format!("interior sum {interior} against enclosed {enclosed}"))
    }
}
