//! Rigid maps taking a face's supporting plane to z = 0.

use nalgebra::{Matrix3, Matrix4, SymmetricEigen, Vector3};

use crate::error::{LarError, Result};
use crate::geom::P3;

/// Rigid map `p ↦ R (p − origin)` with the plane normal as third row of R.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaceFrame {
    pub origin: P3,
    pub rotation: Matrix3<f64>,
}

impl FaceFrame {
    pub fn to_local(&self, p: P3) -> P3 {
        let q = self.rotation * Vector3::new(p[0] - self.origin[0], p[1] - self.origin[1], p[2] - self.origin[2]);
        [q[0], q[1], q[2]]
    }

    pub fn to_world(&self, q: P3) -> P3 {
        let p = self.rotation.transpose() * Vector3::new(q[0], q[1], q[2]);
        [p[0] + self.origin[0], p[1] + self.origin[1], p[2] + self.origin[2]]
    }

    pub fn normal(&self) -> P3 {
        let r = self.rotation.row(2);
        [r[0], r[1], r[2]]
    }

    /// Homogeneous 4×4 matrix of the map.
    pub fn affine(&self) -> Matrix4<f64> {
        let o = Vector3::from(self.origin);
        let mut m = self.rotation.to_homogeneous();
        let t = -(self.rotation * o);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&t);
        m
    }

    /// Homogeneous 4×4 matrix of the inverse map.
    pub fn inverse_affine(&self) -> Matrix4<f64> {
        let mut m = self.rotation.transpose().to_homogeneous();
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&Vector3::from(self.origin));
        m
    }
}

/// Total-least-squares plane through `points`, as a rigid frame.
///
/// The normal is the eigenvector of the smallest eigenvalue of the
/// scatter matrix, signed so that its largest component is positive; the
/// first in-plane axis is the direction of largest spread.
pub fn face_frame(points: &[P3]) -> Result<FaceFrame> {
    if points.len() < 3 {
        return Err(LarError::Degenerate { cell: 0, reason: format!("{} points do not span a plane", points.len()) });
    }
    let n = points.len() as f64;
    let mut c = [0.0; 3];
    for p in points {
        for k in 0..3 {
            c[k] += p[k] / n;
        }
    }
    let mut scatter = Matrix3::zeros();
    for p in points {
        let d = Vector3::new(p[0] - c[0], p[1] - c[1], p[2] - c[2]);
        scatter += d * d.transpose();
    }
    let eig = SymmetricEigen::new(scatter);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let (big, mid) = (eig.eigenvalues[order[0]], eig.eigenvalues[order[1]]);
    if big <= 0.0 || mid <= 1e-20 * big {
        return Err(LarError::Degenerate { cell: 0, reason: "collinear face vertices".into() });
    }
    let mut normal: Vector3<f64> = eig.eigenvectors.column(order[2]).into();
    let k = normal.iamax();
    if normal[k] < 0.0 {
        normal = -normal;
    }
    let mut u: Vector3<f64> = eig.eigenvectors.column(order[0]).into();
    u -= normal * normal.dot(&u);
    u = u.normalize();
    let k = u.iamax();
    if u[k] < 0.0 {
        u = -u;
    }
    let v = normal.cross(&u);
    let rotation = Matrix3::from_rows(&[u.transpose(), v.transpose(), normal.transpose()]);
    Ok(FaceFrame { origin: c, rotation })
}
