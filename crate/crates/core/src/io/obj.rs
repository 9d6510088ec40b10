//! Wavefront OBJ polygon meshes.
//!
//! Import reads `v` and `f` records (1-based or negative relative indices,
//! `v/vt/vn` references) into V, EV and FV. Export writes one group per top
//! cell; faces with holes are triangulated.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use log::warn;

use crate::error::{io_err, LarError, Result};
use crate::geom::{cross2, sub2, P2, P3};
use crate::io::explode::ExplodedCell;
use crate::io::lar_json::format_number;
use crate::lar::{CellTable, ChainComplexResult, Complex, Geometry};

const FREE_FORM: [&str; 11] = ["cstype", "deg", "bmat", "step", "curv", "curv2", "surf", "parm", "trim", "hole", "scrv"];

pub fn parse_obj(text: &str) -> Result<Complex> {
    let mut coords: Vec<f64> = Vec::new();
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut words = line.split_whitespace();
        let Some(tag) = words.next() else { continue };
        let at = |msg: String| LarError::Parse(format!("line {}: {msg}", ln + 1));
        match tag {
            "v" => {
                let xs: Vec<f64> = words
                    .map(|w| w.parse::<f64>().map_err(|_| at(format!("bad coordinate {w:?}"))))
                    .collect::<Result<_>>()?;
                if xs.len() < 3 {
                    return Err(at("vertex needs three coordinates".into()));
                }
                coords.extend_from_slice(&xs[..3]);
            }
            "f" => {
                let nverts = coords.len() / 3;
                let mut face = Vec::new();
                for w in words {
                    let first = w.split('/').next().unwrap_or("");
                    let k: i64 = first.parse().map_err(|_| at(format!("bad index {w:?}")))?;
                    let idx = match k {
                        k if k > 0 => k - 1,
                        k if k < 0 => nverts as i64 + k,
                        _ => return Err(at("index 0".into())),
                    };
                    if idx < 0 || idx as usize >= nverts {
                        return Err(LarError::IndexOutOfRange { index: k.unsigned_abs() as usize, len: nverts });
                    }
                    face.push(idx as usize);
                }
                if face.len() < 3 {
                    return Err(at("face needs three vertices".into()));
                }
                faces.push(face);
            }
            t if FREE_FORM.contains(&t) => return Err(LarError::Unsupported(format!("free-form OBJ record {t:?} on line {}", ln + 1))),
            "vt" | "vn" | "vp" | "g" | "o" | "s" | "usemtl" | "mtllib" | "l" | "p" => {}
            other => warn!("ignoring OBJ record {other:?} on line {}", ln + 1),
        }
    }
    let mut seen = HashMap::new();
    let mut edges = Vec::new();
    for f in &faces {
        for k in 0..f.len() {
            let (a, b) = (f[k], f[(k + 1) % f.len()]);
            let key = (a.min(b), a.max(b));
            seen.entry(key).or_insert_with(|| {
                edges.push(vec![key.0, key.1]);
            });
        }
    }
    Ok(Complex::new(Geometry::new(3, coords)?).with_table(CellTable::new(1, edges)).with_table(CellTable::new(2, faces)))
}

pub fn import_obj(path: impl AsRef<Path>) -> Result<Complex> {
    let path = path.as_ref();
    parse_obj(&std::fs::read_to_string(path).map_err(io_err(path))?)
}

/// Closed vertex loops of an oriented edge chain.
fn loops(result: &ChainComplexResult, chain: &[(usize, i8)]) -> Vec<Vec<usize>> {
    let edges = &result.tables[0];
    let mut out_edges: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut order = Vec::new();
    for &(e, s) in chain {
        let (t, h) = if s > 0 { (edges.cells[e][0], edges.cells[e][1]) } else { (edges.cells[e][1], edges.cells[e][0]) };
        out_edges.entry(t).or_default().push(h);
        order.push(t);
    }
    let mut result_loops = Vec::new();
    for start in order {
        while out_edges.get(&start).is_some_and(|v| !v.is_empty()) {
            let mut ring = vec![start];
            let mut cur = out_edges.get_mut(&start).unwrap().remove(0);
            while cur != start {
                ring.push(cur);
                match out_edges.get_mut(&cur).filter(|v| !v.is_empty()) {
                    Some(next) => cur = next.remove(0),
                    None => break,
                }
            }
            result_loops.push(ring);
        }
    }
    result_loops
}

/// Polygons (vertex id lists) of the boundary of top column `j`, oriented
/// outwards; faces with holes come out as triangles.
fn cell_polygons(result: &ChainComplexResult, j: usize) -> Vec<Vec<usize>> {
    let top = result.boundaries.last().expect("operators present");
    let pieces: Vec<Vec<(usize, i8)>> = if result.dim() == 3 {
        let d2 = &result.boundaries[1];
        top.column(j).map(|(f, c)| d2.column(f).map(|(e, s)| (e, s * c)).collect()).collect()
    } else {
        vec![top.column(j).collect()]
    };
    let mut polys = Vec::new();
    for piece in pieces {
        let rings = loops(result, &piece);
        if rings.len() == 1 {
            polys.push(rings.into_iter().next().unwrap());
        } else {
            polys.extend(triangulate_rings(&result.geometry, &rings).into_iter().map(|t| t.to_vec()));
        }
    }
    polys
}

fn point3(g: &Geometry, v: usize) -> P3 {
    let p = g.point(v);
    [p[0], p[1], if p.len() > 2 { p[2] } else { 0.0 }]
}

/// Triangles covering the region bounded by `rings` (one outer ring, the
/// rest holes), oriented like the outer ring.
fn triangulate_rings(g: &Geometry, rings: &[Vec<usize>]) -> Vec<[usize; 3]> {
    // Newell normal of the outer ring decides the projection
    let area2 = |ring: &[usize], drop: usize| -> f64 {
        let (i, j) = ((drop + 1) % 3, (drop + 2) % 3);
        (0..ring.len())
            .map(|k| {
                let (a, b) = (point3(g, ring[k]), point3(g, ring[(k + 1) % ring.len()]));
                a[i] * b[j] - a[j] * b[i]
            })
            .sum::<f64>()
    };
    let outer_k = (0..rings.len())
        .max_by(|&a, &b| {
            let na = (0..3).map(|d| area2(&rings[a], d).abs()).fold(0.0, f64::max);
            let nb = (0..3).map(|d| area2(&rings[b], d).abs()).fold(0.0, f64::max);
            na.total_cmp(&nb)
        })
        .unwrap();
    let drop = (0..3).max_by(|&a, &b| area2(&rings[outer_k], a).abs().total_cmp(&area2(&rings[outer_k], b).abs())).unwrap();
    let flip = area2(&rings[outer_k], drop) < 0.0;
    let (i, j) = ((drop + 1) % 3, (drop + 2) % 3);
    let mut ids: Vec<usize> = Vec::new();
    let mut pts: Vec<P2> = Vec::new();
    let local = |v: usize, ids: &mut Vec<usize>, pts: &mut Vec<P2>| -> usize {
        let p = point3(g, v);
        ids.push(v);
        pts.push([p[i], if flip { -p[j] } else { p[j] }]);
        ids.len() - 1
    };
    let mut outer: Vec<usize> = rings[outer_k].iter().map(|&v| local(v, &mut ids, &mut pts)).collect();
    let mut holes: Vec<Vec<usize>> = Vec::new();
    for (k, r) in rings.iter().enumerate() {
        if k != outer_k {
            holes.push(r.iter().map(|&v| local(v, &mut ids, &mut pts)).collect());
        }
    }
    if ring_area(&pts, &outer) < 0.0 {
        outer.reverse();
    }
    for h in holes.iter_mut() {
        if ring_area(&pts, h) > 0.0 {
            h.reverse();
        }
    }
    let ring = bridge_holes(&pts, outer, holes);
    ear_clip(&pts, ring).into_iter().map(|t| [ids[t[0]], ids[t[1]], ids[t[2]]]).collect()
}

fn ring_area(pts: &[P2], ring: &[usize]) -> f64 {
    0.5 * (0..ring.len()).map(|k| cross2(pts[ring[k]], pts[ring[(k + 1) % ring.len()]])).sum::<f64>()
}

fn segments_cross(a: P2, b: P2, c: P2, d: P2) -> bool {
    let o = |p: P2, q: P2, r: P2| cross2(sub2(q, p), sub2(r, p));
    let (d1, d2, d3, d4) = (o(a, b, c), o(a, b, d), o(c, d, a), o(c, d, b));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Joins every hole to the outer ring through a visible vertex pair,
/// giving one weakly simple ring.
fn bridge_holes(pts: &[P2], mut ring: Vec<usize>, mut holes: Vec<Vec<usize>>) -> Vec<usize> {
    let max_x = |h: &Vec<usize>| h.iter().map(|&v| pts[v][0]).fold(f64::MIN, f64::max);
    holes.sort_by(|a, b| max_x(b).total_cmp(&max_x(a)));
    for k in 0..holes.len() {
        let hole = holes[k].clone();
        let m = (0..hole.len()).max_by(|&a, &b| pts[hole[a]][0].total_cmp(&pts[hole[b]][0])).unwrap();
        let pm = pts[hole[m]];
        let mut cands: Vec<usize> = (0..ring.len()).collect();
        let dist = |v: usize| {
            let d = sub2(pts[ring[v]], pm);
            d[0] * d[0] + d[1] * d[1]
        };
        cands.sort_by(|&a, &b| dist(a).total_cmp(&dist(b)));
        let blocked = |pv: P2| {
            let mut segs: Vec<(P2, P2)> = (0..ring.len()).map(|s| (pts[ring[s]], pts[ring[(s + 1) % ring.len()]])).collect();
            for h in &holes[k..] {
                segs.extend((0..h.len()).map(|s| (pts[h[s]], pts[h[(s + 1) % h.len()]])));
            }
            segs.iter().any(|&(a, b)| segments_cross(pm, pv, a, b))
        };
        let v = cands.iter().copied().find(|&v| !blocked(pts[ring[v]])).unwrap_or(cands[0]);
        let mut spliced = ring[..=v].to_vec();
        spliced.extend((0..=hole.len()).map(|s| hole[(m + s) % hole.len()]));
        spliced.push(ring[v]);
        spliced.extend_from_slice(&ring[v + 1..]);
        ring = spliced;
    }
    ring
}

fn in_triangle(p: P2, a: P2, b: P2, c: P2) -> bool {
    let o = |p: P2, q: P2, r: P2| cross2(sub2(q, p), sub2(r, p));
    o(a, b, p) >= 0.0 && o(b, c, p) >= 0.0 && o(c, a, p) >= 0.0
}

/// Ear clipping of a counter-clockwise, weakly simple ring.
fn ear_clip(pts: &[P2], mut ring: Vec<usize>) -> Vec<[usize; 3]> {
    let mut tris = Vec::new();
    while ring.len() > 3 {
        let n = ring.len();
        let mut clipped = false;
        for k in 0..n {
            let (a, b, c) = (ring[(k + n - 1) % n], ring[k], ring[(k + 1) % n]);
            let (pa, pb, pc) = (pts[a], pts[b], pts[c]);
            if cross2(sub2(pb, pa), sub2(pc, pb)) <= 0.0 {
                continue;
            }
            let blocked = ring.iter().any(|&q| {
                let pq = pts[q];
                pq != pa && pq != pb && pq != pc && in_triangle(pq, pa, pb, pc)
            });
            if !blocked {
                tris.push([a, b, c]);
                ring.remove(k);
                clipped = true;
                break;
            }
        }
        if !clipped {
            // numerically stuck: drop a flat vertex, or cut the first corner
            let n = ring.len();
            let k = (0..n)
                .find(|&k| cross2(sub2(pts[ring[k]], pts[ring[(k + n - 1) % n]]), sub2(pts[ring[(k + 1) % n]], pts[ring[k]])) == 0.0)
                .unwrap_or(0);
            let (a, b, c) = (ring[(k + n - 1) % n], ring[k], ring[(k + 1) % n]);
            if cross2(sub2(pts[b], pts[a]), sub2(pts[c], pts[b])) != 0.0 {
                tris.push([a, b, c]);
            }
            ring.remove(k);
        }
    }
    if ring.len() == 3 && cross2(sub2(pts[ring[1]], pts[ring[0]]), sub2(pts[ring[2]], pts[ring[1]])) != 0.0 {
        tris.push([ring[0], ring[1], ring[2]]);
    }
    tris
}

fn write_vertex(s: &mut String, p: &[f64]) {
    let z = if p.len() > 2 { p[2] } else { 0.0 };
    let _ = writeln!(s, "v {} {} {}", format_number(p[0]), format_number(p[1]), format_number(z));
}

fn interior_columns(result: &ChainComplexResult) -> Vec<usize> {
    let n = result.boundaries.last().map_or(0, |b| b.ncols());
    (0..n).filter(|&j| Some(j) != result.exterior).collect()
}

/// OBJ text with shared vertices and one group per interior top cell.
pub fn obj_string(result: &ChainComplexResult) -> String {
    let mut s = String::new();
    for p in result.geometry.points() {
        write_vertex(&mut s, p);
    }
    for (k, j) in interior_columns(result).into_iter().enumerate() {
        let _ = writeln!(s, "g cell{}", k + 1);
        for poly in cell_polygons(result, j) {
            let ids: Vec<String> = poly.iter().map(|v| (v + 1).to_string()).collect();
            let _ = writeln!(s, "f {}", ids.join(" "));
        }
    }
    s
}

/// OBJ text of exploded cells: each group carries its own vertex block.
pub fn exploded_obj_string(result: &ChainComplexResult, cells: &[ExplodedCell]) -> String {
    let mut s = String::new();
    let mut base = 0;
    for (k, cell) in cells.iter().enumerate() {
        let _ = writeln!(s, "g cell{}", k + 1);
        for p in cell.geometry.points() {
            write_vertex(&mut s, p);
        }
        for poly in cell_polygons(result, cell.column) {
            let ids: Vec<String> =
                poly.iter().map(|&v| (base + cell.local(v).expect("face vertex belongs to its cell") + 1).to_string()).collect();
            let _ = writeln!(s, "f {}", ids.join(" "));
        }
        base += cell.geometry.len();
    }
    s
}

pub fn export_obj(result: &ChainComplexResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, obj_string(result)).map_err(io_err(path))
}

pub fn export_exploded_obj(result: &ChainComplexResult, cells: &[ExplodedCell], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, exploded_obj_string(result, cells)).map_err(io_err(path))
}
