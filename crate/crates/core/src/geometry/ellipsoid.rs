//! Ellipsoids `{x : (x − c)ᵀ A (x − c) ≤ 1}` with `A` symmetric positive definite.

use crate::error::{Error, Result};
use crate::util::{unit_ball_volume, Matrix, Vector};

#[derive(Clone, Debug, PartialEq)]
pub struct Ellipsoid {
    center: Vector,
    shape: Matrix,
    inverse: Matrix,
}

impl Ellipsoid {
    pub fn new(center: Vector, shape: Matrix) -> Result<Self> {
        let n = center.len();
        if n < 2 {
            return Err(Error::InvalidBody("dimension must be at least 2".into()));
        }
        if shape.nrows() != n || shape.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: shape.nrows() });
        }
        let asym = (&shape - shape.transpose()).amax();
        if !(asym <= 1e-12 * shape.amax().max(1.0)) {
            return Err(Error::InvalidBody("shape matrix is not symmetric".into()));
        }
        let shape = (&shape + shape.transpose()) * 0.5;
        let eig = shape.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidBody("shape matrix is not positive definite".into()));
        }
        let inverse = &eig.eigenvectors
            * Matrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l))
            * eig.eigenvectors.transpose();
        Ok(Ellipsoid { center, shape, inverse: symmetrize(inverse) })
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidBody("radius must be positive".into()));
        }
        let n = center.len();
        Ellipsoid::new(center, Matrix::identity(n, n) / (radius * radius))
    }

    /// Ellipsoid with the given semi-axes along the coordinate axes.
    pub fn axis_aligned(center: Vector, semi_axes: &[f64]) -> Result<Self> {
        let diag = Vector::from_iterator(semi_axes.len(), semi_axes.iter().map(|a| 1.0 / (a * a)));
        Ellipsoid::new(center, Matrix::from_diagonal(&diag))
    }

    /// Image of the unit ball under `x ↦ T x + t`.
    pub fn from_map(t_mat: &Matrix, t: &Vector) -> Result<Self> {
        let inv = t_mat.clone().try_inverse().ok_or(Error::SingularMap(0.0))?;
        Ellipsoid::new(t.clone(), symmetrize(inv.transpose() * inv))
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn shape(&self) -> &Matrix {
        &self.shape
    }

    pub fn shape_inverse(&self) -> &Matrix {
        &self.inverse
    }

    /// Symmetric square root of `A⁻¹`, so the body is `c + A^{-1/2} B`.
    pub fn root_inverse(&self) -> Matrix {
        let eig = self.shape.clone().symmetric_eigen();
        &eig.eigenvectors
            * Matrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()))
            * eig.eigenvectors.transpose()
    }

    /// Semi-axis lengths in increasing order.
    pub fn semi_axes(&self) -> Vec<f64> {
        let mut axes: Vec<f64> = self
            .shape
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|l| 1.0 / l.sqrt())
            .collect();
        axes.sort_by(f64::total_cmp);
        axes
    }

    /// `det A`; the volume is `|B| det(A)^{-1/2}`.
    pub fn shape_determinant(&self) -> f64 {
        self.shape.clone().symmetric_eigen().eigenvalues.iter().product()
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) / self.shape_determinant().sqrt()
    }

    /// Radius if the ellipsoid is a ball.
    pub fn as_ball_radius(&self) -> Option<f64> {
        let axes = self.semi_axes();
        let (lo, hi) = (axes[0], axes[axes.len() - 1]);
        (hi - lo <= 1e-12 * hi).then_some(0.5 * (lo + hi))
    }

    pub fn support(&self, u: &Vector) -> f64 {
        u.dot(&(&self.inverse * u)).max(0.0).sqrt() + self.center.dot(u)
    }

    /// Point of the boundary with outward normal direction `u`.
    pub fn boundary_point(&self, u: &Vector) -> Vector {
        let w = &self.inverse * u;
        &self.center + &w / u.dot(&w).sqrt()
    }

    pub fn gauge(&self, x: &Vector) -> f64 {
        let d = x - &self.center;
        d.dot(&(&self.shape * &d))
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.gauge(x) <= 1.0 + tol
    }

    /// Range of `λ` with `x + λ d` inside the ellipsoid.
    pub fn chord(&self, x: &Vector, d: &Vector) -> (f64, f64) {
        let y = x - &self.center;
        let ad = &self.shape * d;
        let a = d.dot(&ad);
        let b = y.dot(&ad);
        let c = y.dot(&(&self.shape * &y)) - 1.0;
        let disc = (b * b - a * c).max(0.0).sqrt();
        ((-b - disc) / a, (-b + disc) / a)
    }

    /// Radial function about the origin.
    pub fn radial(&self, u: &Vector) -> Result<f64> {
        if self.gauge(&Vector::zeros(self.dim())) >= 1.0 {
            return Err(Error::OriginNotInterior);
        }
        Ok(self.chord(&Vector::zeros(self.dim()), u).1)
    }

    pub fn translate(&self, t: &Vector) -> Self {
        Ellipsoid {
            center: &self.center + t,
            shape: self.shape.clone(),
            inverse: self.inverse.clone(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Ellipsoid {
            center: &self.center * factor,
            shape: &self.shape / (factor * factor),
            inverse: &self.inverse * (factor * factor),
        }
    }

    /// Image under `x ↦ T x + t`: center `T c + t`, shape `T⁻ᵀ A T⁻¹`.
    pub fn affine_image(&self, t_mat: &Matrix, t: &Vector) -> Result<Self> {
        let inv = t_mat.clone().try_inverse().ok_or(Error::SingularMap(0.0))?;
        Ellipsoid::new(
            t_mat * &self.center + t,
            symmetrize(inv.transpose() * &self.shape * inv),
        )
    }

    /// Polar body about the origin.
    pub fn polar(&self) -> Result<Self> {
        let c = &self.center;
        if self.gauge(&Vector::zeros(self.dim())) >= 1.0 - 1e-14 {
            return Err(Error::OriginNotInterior);
        }
        if c.amax() == 0.0 {
            return Ellipsoid::new(c.clone(), self.inverse.clone());
        }
        let m = symmetrize(&self.inverse - c * c.transpose());
        let m_inv = m.clone().try_inverse().ok_or(Error::OriginNotInterior)?;
        let mc = &m_inv * c;
        let scale = 1.0 + c.dot(&mc);
        Ellipsoid::new(-mc, symmetrize(m / scale))
    }
}

pub(crate) fn symmetrize(m: Matrix) -> Matrix {
    (&m + m.transpose()) * 0.5
}

impl serde::Serialize for Ellipsoid {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let n = self.dim();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| self.shape[(i, j)]).collect()).collect();
        let mut s = serializer.serialize_struct("Ellipsoid", 3)?;
        s.serialize_field("center", self.center.as_slice())?;
        s.serialize_field("shape", &rows)?;
        s.serialize_field("semi_axes", &self.semi_axes())?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_vec(xs.to_vec())
    }

    #[test]
    fn support_and_radial_closed_forms() {
        let e = Ellipsoid::new(v(&[0.0, 0.0]), Matrix::from_diagonal(&v(&[0.25, 1.0]))).unwrap();
        assert!((e.support(&v(&[1.0, 0.0])) - 2.0).abs() < 1e-15);
        assert!((e.radial(&v(&[0.0, 1.0])).unwrap() - 1.0).abs() < 1e-15);
        assert!((e.volume() - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn rejects_indefinite_shape() {
        let r = Ellipsoid::new(v(&[0.0, 0.0]), Matrix::from_diagonal(&v(&[1.0, -1.0])));
        assert!(matches!(r, Err(Error::InvalidBody(_))));
    }

    #[test]
    fn off_center_polar_has_reciprocal_support() {
        let e = Ellipsoid::new(
            v(&[0.3, -0.2]),
            Matrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.5]),
        )
        .unwrap();
        let p = e.polar().unwrap();
        for k in 0..16 {
            let t = k as f64 * PI / 8.0;
            let u = v(&[t.cos(), t.sin()]);
            let lhs = e.support(&u);
            let rhs = 1.0 / p.radial(&u).unwrap();
            assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
        }
        let back = p.polar().unwrap();
        assert!((back.center() - e.center()).amax() < 1e-12);
        assert!((back.shape() - e.shape()).amax() < 1e-12);
    }

    #[test]
    fn affine_image_of_ball() {
        let b = Ellipsoid::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let img = b
            .affine_image(&Matrix::from_diagonal(&v(&[2.0, 1.0])), &v(&[0.0, 0.0]))
            .unwrap();
        assert!((img.shape() - Matrix::from_diagonal(&v(&[0.25, 1.0]))).amax() < 1e-15);
    }
}

