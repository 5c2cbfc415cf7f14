use crate::error::{Error, Result};
use crate::util::{Matrix, Vector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Invertible affine map `x ↦ T x + t`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    matrix: Matrix,
    translation: Vector,
    det_abs: f64,
}

impl AffineMap {
    pub fn new(matrix: Matrix, translation: Vector) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::InvalidInput("map matrix must be square".into()));
        }
        if translation.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: translation.len() });
        }
        let det = matrix.determinant();
        let scale = matrix.amax().powi(n as i32);
        if !(det.abs() > 1e-14 * scale) || !det.is_finite() {
            return Err(Error::SingularMap(det));
        }
        Ok(AffineMap { matrix, translation, det_abs: det.abs() })
    }

    pub fn linear(matrix: Matrix) -> Result<Self> {
        let n = matrix.nrows();
        Self::new(matrix, Vector::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        AffineMap { matrix: Matrix::identity(n, n), translation: Vector::zeros(n), det_abs: 1.0 }
    }

    pub fn scaling(n: usize, factor: f64) -> Result<Self> {
        Self::linear(Matrix::identity(n, n) * factor)
    }

    pub fn translation_by(t: Vector) -> Self {
        let n = t.len();
        AffineMap { matrix: Matrix::identity(n, n), translation: t, det_abs: 1.0 }
    }

    /// Random linear map `R₁ D R₂` with rotations `R₁, R₂` and diagonal entries
    /// log-uniform in `[1/spread, spread]`.
    pub fn random_linear<R: Rng + ?Sized>(rng: &mut R, n: usize, spread: f64) -> Self {
        let r1 = random_rotation(rng, n);
        let r2 = random_rotation(rng, n);
        let d = Vector::from_fn(n, |_, _| spread.powf(rng.gen_range(-1.0..=1.0)));
        Self::linear(r1 * Matrix::from_diagonal(&d) * r2).expect("product of invertible factors")
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn translation(&self) -> &Vector {
        &self.translation
    }

    pub fn det_abs(&self) -> f64 {
        self.det_abs
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.matrix * x + &self.translation
    }

    pub fn inverse(&self) -> Self {
        let inv = self.matrix.clone().try_inverse().expect("map is invertible");
        let translation = -(&inv * &self.translation);
        AffineMap { det_abs: 1.0 / self.det_abs, matrix: inv, translation }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> Self {
        AffineMap {
            matrix: &self.matrix * &other.matrix,
            translation: &self.matrix * &other.translation + &self.translation,
            det_abs: self.det_abs * other.det_abs,
        }
    }

    /// Scale factor if the linear part is a positive multiple of a rotation.
    pub fn similarity_scale(&self) -> Option<f64> {
        let n = self.dim();
        let gram = self.matrix.transpose() * &self.matrix;
        let s2 = gram.trace() / n as f64;
        let is_similarity = (gram - Matrix::identity(n, n) * s2).amax() <= 1e-12 * s2;
        (is_similarity && self.matrix.determinant() > 0.0).then(|| s2.sqrt())
    }
}

impl serde::Serialize for AffineMap {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let rows: Vec<Vec<f64>> = self.matrix.row_iter().map(|r| r.iter().copied().collect()).collect();
        let mut s = serializer.serialize_struct("AffineMap", 3)?;
        s.serialize_field("matrix", &rows)?;
        s.serialize_field("translation", self.translation.as_slice())?;
        s.serialize_field("det_abs", &self.det_abs)?;
        s.end()
    }
}

/// Haar-distributed rotation (QR of a Gaussian matrix with sign correction).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let g = Matrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let mut col = q.column_mut(j);
            col *= -1.0;
        }
    }
    if q.determinant() < 0.0 {
        let mut col = q.column_mut(0);
        col *= -1.0;
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::stream_rng;

    #[test]
    fn singular_map_rejected() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(AffineMap::linear(m), Err(Error::SingularMap(_))));
    }

    #[test]
    fn inverse_and_compose() {
        let mut rng = stream_rng(1, 0);
        let a = AffineMap::new(
            AffineMap::random_linear(&mut rng, 3, 4.0).matrix().clone(),
            Vector::from_vec(vec![1.0, -2.0, 0.5]),
        )
        .unwrap();
        let id = a.compose(&a.inverse());
        assert!((id.matrix() - Matrix::identity(3, 3)).amax() < 1e-12);
        assert!(id.translation().amax() < 1e-12);
        assert!((id.det_abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_rotation_is_orthogonal() {
        let mut rng = stream_rng(2, 0);
        let q = random_rotation(&mut rng, 4);
        assert!((q.transpose() * &q - Matrix::identity(4, 4)).amax() < 1e-12);
        assert!((q.determinant() - 1.0).abs() < 1e-12);
    }
}
