//! Small vector helpers and planar predicates shared by the arrangement code.

pub type P2 = [f64; 2];
pub type P3 = [f64; 3];

pub fn sub3(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add3(a: P3, b: P3) -> P3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale3(a: P3, s: f64) -> P3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn dot3(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: P3, b: P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm3(a: P3) -> f64 {
    dot3(a, a).sqrt()
}

pub fn normalize3(a: P3) -> Option<P3> {
    let n = norm3(a);
    (n > 0.0 && n.is_finite()).then(|| scale3(a, 1.0 / n))
}

pub fn sub2(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn cross2(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn dot2(a: P2, b: P2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Distance from `p` to the closed segment `a b`.
pub fn point_segment_distance(p: P2, a: P2, b: P2) -> f64 {
    let ab = sub2(b, a);
    let len2 = dot2(ab, ab);
    let t = if len2 > 0.0 { (dot2(sub2(p, a), ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
    dot2(sub2(p, q), sub2(p, q)).sqrt()
}

/// Position of a point relative to a region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointClass {
    Inside,
    Outside,
    On,
}

/// Even-odd classification against a set of segments bounding a region
/// (outer rings and holes alike), with an `eps` band counted as `On`.
pub fn classify_against_segments(p: P2, segments: &[(P2, P2)], eps: f64) -> PointClass {
    let mut inside = false;
    for &(a, b) in segments {
        if point_segment_distance(p, a, b) <= eps {
            return PointClass::On;
        }
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if x > p[0] {
                inside = !inside;
            }
        }
    }
    if inside {
        PointClass::Inside
    } else {
        PointClass::Outside
    }
}

/// Signed winding number of a closed set of directed segments around `p`.
pub fn winding_number(p: P2, directed: &[(P2, P2)]) -> i32 {
    let mut w = 0;
    for &(a, b) in directed {
        if a[1] <= p[1] {
            if b[1] > p[1] && cross2(sub2(b, a), sub2(p, a)) > 0.0 {
                w += 1;
            }
        } else if b[1] <= p[1] && cross2(sub2(b, a), sub2(p, a)) < 0.0 {
            w -= 1;
        }
    }
    w
}

/// A point strictly inside the region bounded (even-odd) by `segments`.
///
/// Scans a horizontal line through the widest gap between distinct vertex
/// heights and returns the middle of the widest interior interval, which
/// works for non-convex regions with holes.
pub fn interior_point(segments: &[(P2, P2)]) -> Option<P2> {
    let mut ys: Vec<f64> = segments.iter().flat_map(|(a, b)| [a[1], b[1]]).collect();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    if ys.len() < 2 {
        return None;
    }
    let mut gaps: Vec<(f64, f64)> = ys.windows(2).map(|w| (w[1] - w[0], 0.5 * (w[0] + w[1]))).collect();
    gaps.sort_by(|a, b| b.0.total_cmp(&a.0));
    for &(_, y) in gaps.iter().take(4) {
        let mut xs: Vec<f64> = segments
            .iter()
            .filter(|(a, b)| (a[1] > y) != (b[1] > y))
            .map(|(a, b)| a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]))
            .collect();
        xs.sort_by(f64::total_cmp);
        let best = xs
            .chunks_exact(2)
            .map(|c| (c[1] - c[0], 0.5 * (c[0] + c[1])))
            .max_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((w, x)) = best {
            if w > 0.0 {
                return Some([x, y]);
            }
        }
    }
    None
}

/// Shoelace area of directed segments (positive for counter-clockwise).
pub fn signed_area(directed: &[(P2, P2)]) -> f64 {
    0.5 * directed.iter().map(|(a, b)| cross2(*a, *b)).sum::<f64>()
}
