use std::f64::consts::PI;

use larkit::arrange2d::SegmentSoup;
use larkit::generators::{centered, cuboidal_grid, random_segments, rotated_grid_pair, transform, GridSpec};
use larkit::io::{load_document, load_lar};
use larkit::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/data");

/// Two unit cubes listed as vertices and faces only.
pub fn offset_cubes_input() -> Complex {
    load_lar(format!("{DATA}/offset_cubes.lar.json")).unwrap()
}

/// Published result: vertices, faces, cells and the cells × faces
/// coboundary matrix.
pub fn offset_cubes_expected() -> (Complex, Vec<Vec<i32>>) {
    let doc = load_document(format!("{DATA}/offset_cubes_expected.lar.json")).unwrap();
    let delta: Vec<Vec<i32>> = serde_json::from_value(doc.metadata.clone().unwrap()["delta2"].clone()).unwrap();
    (doc.to_complex().unwrap(), delta)
}

pub fn rubik() -> [Complex; 2] {
    rotated_grid_pair(3).unwrap()
}

pub fn big_grids() -> [Complex; 2] {
    rotated_grid_pair(10).unwrap()
}

/// Two centered grids with shapes up to 3×3×3, the second turned by
/// random angles and shifted by up to half a cell.
pub fn random_grid_pair(seed: u64) -> ([usize; 3], [usize; 3], [Complex; 2]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shape = || [rng.random_range(1..=3), rng.random_range(1..=3), rng.random_range(1..=3)];
    let (sa, sb) = (shape(), shape());
    let mut a = cuboidal_grid(&GridSpec::new(sa)).unwrap();
    a.geometry = centered(&a.geometry);
    let mut b = cuboidal_grid(&GridSpec::new(sb)).unwrap();
    let angles = [rng.random_range(0.0..PI), rng.random_range(0.0..PI), rng.random_range(0.0..PI)];
    let shift = [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)];
    b.geometry = transform(&centered(&b.geometry), angles, shift);
    (sa, sb, [a, b])
}

/// Soup number `seed` of the property suite: 5 to 50 segments in the unit
/// square.
pub fn property_soup(seed: u64) -> SegmentSoup {
    random_segments(5 + (seed % 46) as usize, [0.0, 0.0, 1.0, 1.0], seed).unwrap()
}

pub fn soup_segments(soup: &SegmentSoup) -> Vec<([f64; 2], [f64; 2])> {
    (0..soup.edges.len()).map(|k| soup.segment(k)).collect()
}

/// Segments with small integer endpoints, rich in shared endpoints,
/// T-junctions and collinear overlaps.
pub fn lattice_segments(n: usize, seed: u64) -> Vec<([f64; 2], [f64; 2])> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut out = Vec::new();
    while out.len() < n {
        let a = [rng.random_range(0..4) as f64, rng.random_range(0..4) as f64];
        let b = [rng.random_range(0..4) as f64, rng.random_range(0..4) as f64];
        if a != b {
            out.push((a, b));
        }
    }
    out
}
