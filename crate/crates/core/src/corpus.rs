//! Seeded random test bodies.

use crate::error::{Error, Result};
use crate::geometry::{convex_hull_2d, random_rotation, ConvexBody, SupportBody2D, DEFAULT_GRID};
use crate::util::{stream_rng, unit2, Matrix, Vector};
use nalgebra::Vector2;
use rand::Rng;
use std::f64::consts::PI;
use std::str::FromStr;

/// Highest harmonic of the random smooth bodies.
const MAX_HARMONIC: usize = 6;
/// Bound on `Σ (k² − 1)(|a_k| + |b_k|)`, which keeps `h + h''` above `1 − BUDGET`.
const CURVATURE_BUDGET: f64 = 0.8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Hull of 5 to 30 uniform points in the unit disk.
    Polygons,
    /// Hull of 3 to 15 uniform points and their reflections.
    SymmetricPolygons,
    /// Axis ratio log-uniform in `[1, 10]`, random orientation, unit area scale.
    Ellipses,
    /// Low-frequency perturbations of the disk with positive curvature radius.
    Smooth,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polygons" => Ok(Family::Polygons),
            "symmetric-polygons" => Ok(Family::SymmetricPolygons),
            "ellipses" => Ok(Family::Ellipses),
            "smooth" => Ok(Family::Smooth),
            _ => Err(Error::InvalidInput(format!(
                "unknown corpus {s:?} (expected polygons, symmetric-polygons, ellipses or smooth)"
            ))),
        }
    }
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Polygons => "polygons",
            Family::SymmetricPolygons => "symmetric-polygons",
            Family::Ellipses => "ellipses",
            Family::Smooth => "smooth",
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ConvexBody> {
        match self {
            Family::Polygons => random_polygon(rng),
            Family::SymmetricPolygons => random_symmetric_polygon(rng),
            Family::Ellipses => random_ellipse(rng),
            Family::Smooth => random_smooth_body(rng),
        }
    }
}

fn disk_point<R: Rng + ?Sized>(rng: &mut R) -> Vector2<f64> {
    unit2(rng.gen_range(0.0..2.0 * PI)) * rng.gen::<f64>().sqrt()
}

fn polygon_body(points: &[Vector2<f64>]) -> Result<ConvexBody> {
    let hull = convex_hull_2d(points, 1e-12);
    let pts: Vec<[f64; 2]> = hull.iter().map(|p| [p.x, p.y]).collect();
    Ok(ConvexBody::polygon(&pts)?.centered())
}

/// Centered hull of `k ∈ [5, 30]` uniform points in the unit disk; redrawn until it has
/// at least three vertices.
pub fn random_polygon<R: Rng + ?Sized>(rng: &mut R) -> Result<ConvexBody> {
    loop {
        let k = rng.gen_range(5..=30);
        let points: Vec<Vector2<f64>> = (0..k).map(|_| disk_point(rng)).collect();
        if convex_hull_2d(&points, 1e-12).len() >= 3 {
            return polygon_body(&points);
        }
    }
}

/// Centered hull of `±x_i` for `3 ≤ k ≤ 15` uniform points `x_i` in the unit disk.
pub fn random_symmetric_polygon<R: Rng + ?Sized>(rng: &mut R) -> Result<ConvexBody> {
    let k = rng.gen_range(3..=15);
    let mut points = Vec::with_capacity(2 * k);
    for _ in 0..k {
        let p = disk_point(rng);
        points.push(p);
        points.push(-p);
    }
    polygon_body(&points)
}

/// Centered ellipse with semi-axes `√r` and `1/√r`, `r` log-uniform in `[1, 10]`, rotated
/// uniformly.
pub fn random_ellipse<R: Rng + ?Sized>(rng: &mut R) -> Result<ConvexBody> {
    let ratio = 10f64.powf(rng.gen::<f64>());
    let rot = random_rotation(rng, 2);
    let d = Matrix::from_diagonal(&Vector::from_vec(vec![1.0 / ratio, ratio]));
    ConvexBody::ellipsoid(Vector::zeros(2), &rot * d * rot.transpose())
}

/// Centered body with support `1 + Σ_{k=2}^{6} a_k cos kθ + b_k sin kθ`, the
/// coefficients scaled so that `Σ (k² − 1)(|a_k| + |b_k|) ≤ 0.8`.
pub fn random_smooth_body<R: Rng + ?Sized>(rng: &mut R) -> Result<ConvexBody> {
    let mut cos = vec![0.0; MAX_HARMONIC + 1];
    let mut sin = vec![0.0; MAX_HARMONIC + 1];
    cos[0] = 1.0;
    let mut load = 0.0;
    for k in 2..=MAX_HARMONIC {
        cos[k] = rng.gen_range(-1.0..1.0) / (k * k) as f64;
        sin[k] = rng.gen_range(-1.0..1.0) / (k * k) as f64;
        load += ((k * k - 1) as f64) * (cos[k].abs() + sin[k].abs());
    }
    let budget = CURVATURE_BUDGET * rng.gen_range(0.2..1.0);
    let scale = if load > 0.0 { budget / load } else { 0.0 };
    for k in 2..=MAX_HARMONIC {
        cos[k] *= scale;
        sin[k] *= scale;
    }
    let body = SupportBody2D::from_coefficients(cos, sin, DEFAULT_GRID)?;
    let centered = body.translate(&(-body.centroid()));
    Ok(ConvexBody::Support2D(centered))
}

/// `count` bodies of `family` from the seeded stream; each body has its own stream.
pub fn generate(family: Family, count: usize, seed: u64) -> Result<Vec<ConvexBody>> {
    (0..count)
        .map(|i| family.sample(&mut stream_rng(seed, i as u64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bodies_are_centered_and_valid() {
        for family in [Family::Polygons, Family::SymmetricPolygons, Family::Ellipses, Family::Smooth] {
            let bodies = generate(family, 20, 5).unwrap();
            for b in &bodies {
                assert!(b.centroid().norm() < 1e-10, "{}", family.name());
                assert!(b.inner_radius() > 0.0);
            }
        }
    }

    #[test]
    fn symmetric_polygons_are_symmetric() {
        for b in generate(Family::SymmetricPolygons, 10, 9).unwrap() {
            for v in b.polytope().unwrap().vertices() {
                assert!(b.contains(&(-v), 1e-9));
            }
        }
    }

    #[test]
    fn smooth_bodies_keep_positive_curvature() {
        for b in generate(Family::Smooth, 20, 3).unwrap() {
            if let ConvexBody::Support2D(s) = &b {
                assert!((0..s.grid()).all(|j| s.curvature_radius(j) >= 0.2 - 1e-9));
            } else {
                panic!("expected a support body");
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate(Family::Polygons, 5, 11).unwrap();
        let b = generate(Family::Polygons, 5, 11).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.polytope().unwrap().vertices(), y.polytope().unwrap().vertices());
        }
        assert!("cubes".parse::<Family>().is_err());
    }
}
