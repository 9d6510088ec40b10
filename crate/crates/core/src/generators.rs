//! Deterministic test complexes: cuboidal grids, rigid placement and
//! random segment soups.

use std::f64::consts::FRAC_PI_6;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arrange2d::SegmentSoup;
use crate::error::{LarError, Result};
use crate::geom::P2;
use crate::lar::{CellTable, Complex, Geometry};

/// Cell counts per axis and edge length of the cubes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub shape: [usize; 3],
    pub size: f64,
}

impl GridSpec {
    pub fn new(shape: [usize; 3]) -> Self {
        GridSpec { shape, size: 1.0 }
    }

    pub fn cube(n: usize) -> Self {
        Self::new([n, n, n])
    }
}

/// Grid of axis-aligned cubes with V, EV, FV and CV. Vertices run in
/// lexicographic order of their (i, j, k) lattice index, z fastest; every
/// cell lists its vertices in increasing order.
pub fn cuboidal_grid(spec: &GridSpec) -> Result<Complex> {
    let [nx, ny, nz] = spec.shape;
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(LarError::Degenerate { cell: 0, reason: format!("grid shape {:?}", spec.shape) });
    }
    let id = |i: usize, j: usize, k: usize| (i * (ny + 1) + j) * (nz + 1) + k;
    let mut coords = Vec::with_capacity(3 * (nx + 1) * (ny + 1) * (nz + 1));
    for i in 0..=nx {
        for j in 0..=ny {
            for k in 0..=nz {
                coords.extend([i as f64 * spec.size, j as f64 * spec.size, k as f64 * spec.size]);
            }
        }
    }
    let mut ev = Vec::new();
    let mut fv = Vec::new();
    let mut cv = Vec::new();
    for i in 0..=nx {
        for j in 0..=ny {
            for k in 0..=nz {
                if i < nx {
                    ev.push(vec![id(i, j, k), id(i + 1, j, k)]);
                }
                if j < ny {
                    ev.push(vec![id(i, j, k), id(i, j + 1, k)]);
                }
                if k < nz {
                    ev.push(vec![id(i, j, k), id(i, j, k + 1)]);
                }
            }
        }
    }
    for i in 0..=nx {
        for j in 0..ny {
            for k in 0..nz {
                fv.push(vec![id(i, j, k), id(i, j, k + 1), id(i, j + 1, k), id(i, j + 1, k + 1)]);
            }
        }
    }
    for i in 0..nx {
        for j in 0..=ny {
            for k in 0..nz {
                fv.push(vec![id(i, j, k), id(i, j, k + 1), id(i + 1, j, k), id(i + 1, j, k + 1)]);
            }
        }
    }
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..=nz {
                fv.push(vec![id(i, j, k), id(i, j + 1, k), id(i + 1, j, k), id(i + 1, j + 1, k)]);
            }
        }
    }
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                let mut c = Vec::with_capacity(8);
                for (di, dj, dk) in [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1), (1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1)] {
                    c.push(id(i + di, j + dj, k + dk));
                }
                cv.push(c);
            }
        }
    }
    Ok(Complex::new(Geometry::new(3, coords)?)
        .with_table(CellTable::new(1, ev))
        .with_table(CellTable::new(2, fv))
        .with_table(CellTable::new(3, cv)))
}

/// Rotates about x, then y, then z (angles in radians), then translates.
pub fn transform(geometry: &Geometry, rotation: [f64; 3], translation: [f64; 3]) -> Geometry {
    let [rx, ry, rz] = rotation;
    let (sx, cx) = rx.sin_cos();
    let (sy, cy) = ry.sin_cos();
    let (sz, cz) = rz.sin_cos();
    let mut out = Geometry::empty(3);
    for p in geometry.points() {
        let (x, y, z) = (p[0], p[1], p[2]);
        let (y, z) = (cx * y - sx * z, sx * y + cx * z);
        let (x, z) = (cy * x + sy * z, -sy * x + cy * z);
        let (x, y) = (cz * x - sz * y, sz * x + cz * y);
        out.push(&[x + translation[0], y + translation[1], z + translation[2]]);
    }
    out
}

/// Translates the geometry so its vertex centroid is the origin.
pub fn centered(geometry: &Geometry) -> Geometry {
    let c = geometry.centroid();
    let mut out = Geometry::empty(geometry.dim());
    for p in geometry.points() {
        let q: Vec<f64> = p.iter().zip(&c).map(|(a, b)| a - b).collect();
        out.push(&q);
    }
    out
}

/// Two centered n×n×n grids, the second turned by π/6 about x and then
/// about z.
pub fn rotated_grid_pair(n: usize) -> Result<[Complex; 2]> {
    let grid = cuboidal_grid(&GridSpec::cube(n))?;
    let base = centered(&grid.geometry);
    let turned = transform(&base, [FRAC_PI_6, 0.0, FRAC_PI_6], [0.0; 3]);
    let mut a = grid.clone();
    a.geometry = base;
    let mut b = grid;
    b.geometry = turned;
    Ok([a, b])
}

/// `n` segments with endpoints uniform in `[xmin, xmax] × [ymin, ymax]`.
pub fn random_segments(n: usize, bbox: [f64; 4], seed: u64) -> Result<SegmentSoup> {
    if n == 0 {
        return Err(LarError::Degenerate { cell: 0, reason: "no segments requested".into() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let [x0, y0, x1, y1] = bbox;
    let mut point = || -> P2 { [rng.random_range(x0..=x1), rng.random_range(y0..=y1)] };
    let segs: Vec<(P2, P2)> = (0..n).map(|_| (point(), point())).collect();
    SegmentSoup::from_segments(&segs)
}
