//! Brute-force planar arrangement in exact rational arithmetic.
//!
//! Every pair of segments is intersected exactly, each segment is split at
//! all points found on it, duplicate pieces collapse, bridges are removed
//! by a reachability test per edge, and bounded faces follow from Euler's
//! formula for plane graphs: F = E − V + C.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;
pub type Pt = (Q, Q);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactCounts {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub components: usize,
}

pub fn q(x: f64) -> Q {
    Q::from_float(x).expect("finite coordinate")
}

pub fn exact_point(p: [f64; 2]) -> Pt {
    (q(p[0]), q(p[1]))
}

fn sub(a: &Pt, b: &Pt) -> Pt {
    (&a.0 - &b.0, &a.1 - &b.1)
}

fn cross(a: &Pt, b: &Pt) -> Q {
    &a.0 * &b.1 - &a.1 * &b.0
}

fn dot(a: &Pt, b: &Pt) -> Q {
    &a.0 * &b.0 + &a.1 * &b.1
}

fn in_unit(t: &Q) -> bool {
    !t.is_negative() && *t <= Q::one()
}

fn along(p: &Pt, r: &Pt, t: &Q) -> Pt {
    (&p.0 + &r.0 * t, &p.1 + &r.1 * t)
}

/// Pieces of every segment after splitting at all mutual contacts, as
/// endpoint pairs ordered lexicographically, duplicates removed.
pub fn split_segments(segments: &[([f64; 2], [f64; 2])]) -> BTreeSet<(Pt, Pt)> {
    let segs: Vec<(Pt, Pt)> =
        segments.iter().map(|(a, b)| (exact_point(*a), exact_point(*b))).filter(|(a, b)| a != b).collect();
    let mut pieces = BTreeSet::new();
    for (i, (p, p_end)) in segs.iter().enumerate() {
        let r = sub(p_end, p);
        let rr = dot(&r, &r);
        let mut ts = vec![Q::zero(), Q::one()];
        for (j, (a, b)) in segs.iter().enumerate() {
            if i == j {
                continue;
            }
            let s = sub(b, a);
            let ap = sub(a, p);
            let denom = cross(&r, &s);
            if !denom.is_zero() {
                let t = cross(&ap, &s) / &denom;
                let u = cross(&ap, &r) / &denom;
                if in_unit(&t) && in_unit(&u) {
                    ts.push(t);
                }
            } else if cross(&ap, &r).is_zero() {
                for e in [a, b] {
                    let t = dot(&sub(e, p), &r) / &rr;
                    if in_unit(&t) {
                        ts.push(t);
                    }
                }
            }
        }
        ts.sort();
        ts.dedup();
        for w in ts.windows(2) {
            let (x, y) = (along(p, &r, &w[0]), along(p, &r, &w[1]));
            pieces.insert(if x < y { (x, y) } else { (y, x) });
        }
    }
    pieces
}

fn reachable(n: usize, edges: &[(usize, usize)], skip: usize, from: usize, to: usize) -> bool {
    let mut adj = vec![Vec::new(); n];
    for (k, &(a, b)) in edges.iter().enumerate() {
        if k != skip {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(v) = queue.pop_front() {
        if v == to {
            return true;
        }
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    false
}

pub fn count_components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut adj = vec![Vec::new(); n];
    let mut used = vec![false; n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
        used[a] = true;
        used[b] = true;
    }
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if !used[s] || seen[s] {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

/// Split pieces with all bridges removed.
pub fn bridgeless_pieces(segments: &[([f64; 2], [f64; 2])]) -> Vec<(Pt, Pt)> {
    let pieces: Vec<(Pt, Pt)> = split_segments(segments).into_iter().collect();
    let mut ids: BTreeMap<Pt, usize> = BTreeMap::new();
    let mut edges = Vec::new();
    for (a, b) in &pieces {
        let n = ids.len();
        let ia = *ids.entry(a.clone()).or_insert(n);
        let n = ids.len();
        let ib = *ids.entry(b.clone()).or_insert(n);
        edges.push((ia, ib));
    }
    let n = ids.len();
    (0..edges.len())
        .filter(|&k| reachable(n, &edges, k, edges[k].0, edges[k].1))
        .map(|k| pieces[k].clone())
        .collect()
}

pub fn arrangement_counts(segments: &[([f64; 2], [f64; 2])]) -> ExactCounts {
    let kept = bridgeless_pieces(segments);
    let mut ids: BTreeMap<Pt, usize> = BTreeMap::new();
    let mut edges = Vec::new();
    for (a, b) in &kept {
        let n = ids.len();
        let ia = *ids.entry(a.clone()).or_insert(n);
        let n = ids.len();
        let ib = *ids.entry(b.clone()).or_insert(n);
        edges.push((ia, ib));
    }
    let vertices = ids.len();
    let components = count_components(vertices, &edges);
    ExactCounts { vertices, edges: edges.len(), faces: edges.len() + components - vertices, components }
}

/// True when the two closed segments meet anywhere other than at a shared
/// endpoint.
pub fn interiors_meet(s: &(Pt, Pt), t: &(Pt, Pt)) -> bool {
    let (p, p_end) = s;
    let (a, b) = t;
    let r = sub(p_end, p);
    let v = sub(b, a);
    let ap = sub(a, p);
    let denom = cross(&r, &v);
    if !denom.is_zero() {
        let tt = cross(&ap, &v) / &denom;
        let u = cross(&ap, &r) / &denom;
        if !(in_unit(&tt) && in_unit(&u)) {
            return false;
        }
        let x = along(p, &r, &tt);
        let shared = (x == *p || x == *p_end) && (x == *a || x == *b);
        return !shared;
    }
    if !cross(&ap, &r).is_zero() {
        return false;
    }
    // collinear: overlap of positive length
    let rr = dot(&r, &r);
    let t0 = dot(&sub(a, p), &r) / &rr;
    let t1 = dot(&sub(b, p), &r) / &rr;
    let (lo, hi) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
    let lo = if lo.is_negative() { Q::zero() } else { lo };
    let hi = if hi > Q::one() { Q::one() } else { hi };
    lo < hi
}
