use super::affine::AffineMap;
use super::arcpoly::ArcPolygon;
use super::ellipsoid::Ellipsoid;
use super::polytope::{Estimate, Polytope};
use super::support2d::{SupportBody2D, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::util::{from2, random_direction, stream_rng, to2, unit2, unit_ball_volume, Matrix, Vector};
use nalgebra::Vector2;
use std::f64::consts::PI;

const MC_SAMPLES: usize = 1 << 17;
const MC_SEED: u64 = 0x5eed_0002;

/// A convex body in one of several representations.
#[derive(Clone, Debug)]
pub enum ConvexBody {
    HPolytope(Polytope),
    VPolytope(Polytope),
    Ellipsoid(Ellipsoid),
    Ball { center: Vector, radius: f64 },
    Support2D(SupportBody2D),
    /// `K ∩ B(center, radius)`.
    BallIntersection { body: Box<ConvexBody>, center: Vector, radius: f64 },
    /// `conv{K, B(center, radius)}`.
    BallHull { body: Box<ConvexBody>, center: Vector, radius: f64 },
}

impl ConvexBody {
    pub fn hpolytope(normals: &[Vector], offsets: &[f64]) -> Result<Self> {
        Ok(ConvexBody::HPolytope(Polytope::from_halfspaces(normals, offsets)?))
    }

    pub fn vpolytope(points: &[Vector]) -> Result<Self> {
        Ok(ConvexBody::VPolytope(Polytope::from_vertices(points)?))
    }

    pub fn polygon(points: &[[f64; 2]]) -> Result<Self> {
        let pts: Vec<Vector> = points.iter().map(|p| Vector::from_vec(p.to_vec())).collect();
        Self::vpolytope(&pts)
    }

    pub fn ellipsoid(center: Vector, shape: Matrix) -> Result<Self> {
        Ok(ConvexBody::Ellipsoid(Ellipsoid::new(center, shape)?))
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if center.len() < 2 {
            return Err(Error::InvalidBody("dimension must be at least 2".into()));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidBody("radius must be positive".into()));
        }
        Ok(ConvexBody::Ball { center, radius })
    }

    pub fn unit_ball(n: usize) -> Self {
        ConvexBody::Ball { center: Vector::zeros(n), radius: 1.0 }
    }

    /// Axis-parallel cube `[-half, half]^n` as an H-polytope.
    pub fn cube(n: usize, half: f64) -> Result<Self> {
        let mut normals = Vec::with_capacity(2 * n);
        let mut offsets = Vec::with_capacity(2 * n);
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut a = Vector::zeros(n);
                a[i] = s;
                normals.push(a);
                offsets.push(half);
            }
        }
        Self::hpolytope(&normals, &offsets)
    }

    /// `conv{±radius·e_i}` as a V-polytope.
    pub fn cross_polytope(n: usize, radius: f64) -> Result<Self> {
        let mut pts = Vec::with_capacity(2 * n);
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut v = Vector::zeros(n);
                v[i] = s * radius;
                pts.push(v);
            }
        }
        Self::vpolytope(&pts)
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        Ok(ConvexBody::Ellipsoid(Ellipsoid::axis_aligned(Vector::zeros(2), &[a, b])?))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => p.dim(),
            ConvexBody::Ellipsoid(e) => e.dim(),
            ConvexBody::Ball { center, .. } => center.len(),
            ConvexBody::Support2D(_) => 2,
            ConvexBody::BallIntersection { center, .. } | ConvexBody::BallHull { center, .. } => center.len(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConvexBody::HPolytope(_) => "hpolytope",
            ConvexBody::VPolytope(_) => "vpolytope",
            ConvexBody::Ellipsoid(_) => "ellipsoid",
            ConvexBody::Ball { .. } => "ball",
            ConvexBody::Support2D(_) => "support2d",
            ConvexBody::BallIntersection { .. } => "ball_intersection",
            ConvexBody::BallHull { .. } => "ball_hull",
        }
    }

    pub fn polytope(&self) -> Option<&Polytope> {
        match self {
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_polytope(&self) -> bool {
        self.polytope().is_some()
    }

    /// Ellipsoid view of balls and ellipsoids.
    pub fn as_ellipsoid(&self) -> Option<Ellipsoid> {
        match self {
            ConvexBody::Ellipsoid(e) => Some(e.clone()),
            ConvexBody::Ball { center, radius } => Ellipsoid::ball(center.clone(), *radius).ok(),
            _ => None,
        }
    }

    fn check_dim(&self, v: &Vector) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        Ok(())
    }

    /// Exact boundary description for planar bodies built from polygons, disks
    /// and smooth support bodies.
    pub fn arc_polygon(&self) -> Option<ArcPolygon> {
        if self.dim() != 2 {
            return None;
        }
        match self {
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => Some(ArcPolygon::polygon(&p.polygon())),
            ConvexBody::Ball { center, radius } => Some(ArcPolygon::disk(to2(center), *radius)),
            ConvexBody::BallIntersection { body, center, radius } => {
                let shift = -center.clone();
                let moved = body.translate(&shift);
                let out = match &moved {
                    ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => {
                        ArcPolygon::polygon_ball_intersection(&p.polygon(), *radius).ok()?
                    }
                    ConvexBody::Support2D(s) => ArcPolygon::smooth_ball_intersection(s, *radius).ok()?,
                    ConvexBody::Ball { center: c, radius: r } if c.norm() + r <= *radius => {
                        ArcPolygon::disk(to2(c), *r)
                    }
                    ConvexBody::Ball { center: c, radius: r } if c.norm() + radius <= *r => {
                        ArcPolygon::disk(Vector2::zeros(), *radius)
                    }
                    _ => return None,
                };
                Some(out.translate(to2(center)))
            }
            ConvexBody::BallHull { body, center, radius } => {
                let shift = -center.clone();
                let moved = body.translate(&shift);
                let out = match &moved {
                    ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => {
                        ArcPolygon::polygon_ball_hull(&p.polygon(), *radius)
                    }
                    ConvexBody::Support2D(s) => ArcPolygon::smooth_ball_hull(s, *radius).ok()?,
                    ConvexBody::Ball { center: c, radius: r } if c.norm() + r <= *radius => {
                        ArcPolygon::disk(Vector2::zeros(), *radius)
                    }
                    ConvexBody::Ball { center: c, radius: r } if c.norm() + radius <= *r => {
                        ArcPolygon::disk(to2(c), *r)
                    }
                    _ => return None,
                };
                Some(out.translate(to2(center)))
            }
            _ => None,
        }
    }

    /// `h(u) = max_{x ∈ K} ⟨x, u⟩`.
    pub fn support(&self, u: &Vector) -> f64 {
        match self {
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => p.support(u),
            ConvexBody::Ellipsoid(e) => e.support(u),
            ConvexBody::Ball { center, radius } => center.dot(u) + radius * u.norm(),
            ConvexBody::Support2D(s) => s.support(u),
            ConvexBody::BallHull { body, center, radius } => body.support(u).max(center.dot(u) + radius * u.norm()),
            ConvexBody::BallIntersection { .. } => {
                if let Some(arc) = self.arc_polygon() {
                    return u.norm() * arc.support_at(u[1].atan2(u[0]));
                }
                self.numeric_support(u)
            }
        }
    }

    /// Support of a body known only through its radial function, by dense
    /// sampling of boundary points followed by local refinement.
    fn numeric_support(&self, u: &Vector) -> f64 {
        let n = self.dim();
        let boundary = |d: &Vector| -> f64 {
            let r = self.radial(d).unwrap_or(0.0);
            r * d.dot(u)
        };
        let mut best_dir = u / u.norm();
        let mut best = boundary(&best_dir);
        let mut rng = stream_rng(MC_SEED, 7);
        for _ in 0..4096 {
            let d = random_direction(&mut rng, n);
            let v = boundary(&d);
            if v > best {
                best = v;
                best_dir = d;
            }
        }
        let mut step = 0.1;
        while step > 1e-10 {
            let mut improved = false;
            for i in 0..n {
                for s in [1.0, -1.0] {
                    let mut d = best_dir.clone();
                    d[i] += s * step;
                    let d = &d / d.norm();
                    let v = boundary(&d);
                    if v > best {
                        best = v;
                        best_dir = d;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best
    }

    /// `ρ(u) = max{r ≥ 0 : r u ∈ K}`; requires the origin to be interior.
    pub fn radial(&self, u: &Vector) -> Result<f64> {
        self.check_dim(u)?;
        let unit = u / u.norm();
        let rho = match self {
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => {
                if !p.origin_interior() {
                    return Err(Error::OriginNotInterior);
                }
                p.radial(&unit)
            }
            ConvexBody::Ellipsoid(e) => e.radial(&unit)?,
            ConvexBody::Ball { center, radius } => {
                if center.norm() >= *radius {
                    return Err(Error::OriginNotInterior);
                }
                ball_exit(center, *radius, &Vector::zeros(self.dim()), &unit)
            }
            ConvexBody::Support2D(s) => s.radial(&unit)?,
            ConvexBody::BallIntersection { body, center, radius } => {
                if center.norm() >= *radius {
                    return Err(Error::OriginNotInterior);
                }
                body.radial(&unit)?.min(ball_exit(center, *radius, &Vector::zeros(self.dim()), &unit))
            }
            ConvexBody::BallHull { body, center, radius } => {
                if let Some(arc) = self.arc_polygon() {
                    arc.radial_at(unit[1].atan2(unit[0]))
                } else {
                    let inner = if center.norm() < *radius {
                        ball_exit(center, *radius, &Vector::zeros(self.dim()), &unit)
                    } else {
                        0.0
                    };
                    let outer = body.radial(&unit).unwrap_or(0.0).max(inner);
                    let upper = self.bounding_radius();
                    bisect_boundary(|r| self.contains(&(&unit * r), 0.0), outer, upper)
                }
            }
        };
        Ok(rho / u.norm())
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        match self {
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => p.contains(x, tol),
            ConvexBody::Ellipsoid(e) => e.contains(x, tol),
            ConvexBody::Ball { center, radius } => (x - center).norm() <= radius + tol,
            ConvexBody::Support2D(s) => s.contains(x, tol),
            ConvexBody::BallIntersection { body, center, radius } => {
                body.contains(x, tol) && (x - center).norm() <= radius + tol
            }
            ConvexBody::BallHull { body, center, radius } => {
                if body.contains(x, tol) || (x - center).norm() <= radius + tol {
                    return true;
                }
                // x ∈ conv{K, B} iff no direction separates it: ⟨x,u⟩ ≤ max(h_K(u), h_B(u)) for all u.
                if self.dim() == 2 {
                    let arc = self.arc_polygon();
                    return (0..2048).all(|j| {
                        let t = 2.0 * PI * j as f64 / 2048.0;
                        let u = from2(unit2(t));
                        let h = match &arc {
                            Some(a) => a.support_at(t),
                            None => self.support(&u),
                        };
                        x.dot(&u) <= h + tol
                    });
                }
                let mut rng = stream_rng(MC_SEED, 11);
                (0..8192).all(|_| {
                    let u = random_direction(&mut rng, self.dim());
                    x.dot(&u) <= body.support(&u).max(center.dot(&u) + radius) + tol
                })
            }
        }
    }

    /// Largest distance from the origin to a point of the body.
    pub fn bounding_radius(&self) -> f64 {
        match self {
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => {
                p.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max)
            }
            ConvexBody::Ellipsoid(e) => e.center().norm() + e.semi_axes().last().copied().unwrap_or(0.0),
            ConvexBody::Ball { center, radius } => center.norm() + radius,
            ConvexBody::Support2D(s) => (0..s.grid()).map(|j| s.node_point(j).norm()).fold(0.0, f64::max) * (1.0 + 1e-9),
            ConvexBody::BallIntersection { body, center, radius } => body.bounding_radius().min(center.norm() + radius),
            ConvexBody::BallHull { body, center, radius } => body.bounding_radius().max(center.norm() + radius),
        }
    }

    /// Largest `r` with `r·B ⊆ K`, i.e. `min_u h_K(u)` (origin interior).
    pub fn inner_radius(&self) -> f64 {
        match self {
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => p.min_offset(),
            ConvexBody::Ball { center, radius } => radius - center.norm(),
            ConvexBody::Ellipsoid(e) if e.center().norm() == 0.0 => e.semi_axes()[0],
            ConvexBody::Support2D(s) => s.h_nodes().iter().copied().fold(f64::INFINITY, f64::min),
            ConvexBody::BallIntersection { body, center, radius } => body.inner_radius().min(radius - center.norm()),
            _ => {
                let n = self.dim();
                let mut rng = stream_rng(MC_SEED, 13);
                (0..8192)
                    .map(|_| self.support(&random_direction(&mut rng, n)))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Range of `λ` with `x + λ d` in the body, for `x` inside.
    pub fn chord(&self, x: &Vector, d: &Vector) -> (f64, f64) {
        match self {
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => p.chord(x, d),
            ConvexBody::Ellipsoid(e) => e.chord(x, d),
            ConvexBody::Ball { center, radius } => ball_chord(center, *radius, x, d),
            ConvexBody::BallIntersection { body, center, radius } => {
                let (a, b) = body.chord(x, d);
                let (c, e) = ball_chord(center, *radius, x, d);
                (a.max(c), b.min(e))
            }
            _ => {
                let reach = 2.0 * (self.bounding_radius() + x.norm()) / d.norm();
                let hi = bisect_boundary(|t| self.contains(&(x + d * t), 0.0), 0.0, reach);
                let lo = bisect_boundary(|t| self.contains(&(x - d * t), 0.0), 0.0, reach);
                (-lo, hi)
            }
        }
    }

    /// Volume, first moment and second moment about the origin when exact.
    pub fn exact_moments(&self) -> Option<(f64, Vector, Matrix)> {
        let n = self.dim();
        match self {
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => p.exact_moments(),
            ConvexBody::Ellipsoid(_) | ConvexBody::Ball { .. } => {
                let e = self.as_ellipsoid()?;
                let vol = e.volume();
                let c = e.center();
                let cov = e.shape_inverse() / (n + 2) as f64;
                Some((vol, c * vol, (cov + c * c.transpose()) * vol))
            }
            ConvexBody::Support2D(s) => Some(s.moments()),
            _ => {
                let (a, first, second) = self.arc_polygon()?.moments();
                Some((
                    a,
                    from2(first),
                    Matrix::from_row_slice(2, 2, &[second[(0, 0)], second[(0, 1)], second[(1, 0)], second[(1, 1)]]),
                ))
            }
        }
    }

    pub fn volume(&self) -> Estimate {
        match self {
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => p.volume(),
            _ => match self.exact_moments() {
                Some((v, _, _)) => Estimate::exact(v),
                None => self.radial_monte_carlo().0,
            },
        }
    }

    pub fn centroid(&self) -> Vector {
        match self {
            ConvexBody::HPolytope(p) | ConvexBody::VPolytope(p) => p.centroid().0,
            ConvexBody::Ellipsoid(e) => e.center().clone(),
            ConvexBody::Ball { center, .. } => center.clone(),
            _ => match self.exact_moments() {
                Some((v, first, _)) => first / v,
                None => self.radial_monte_carlo().1,
            },
        }
    }

    /// Radial Monte Carlo about an interior point for bodies without exact moments.
    fn radial_monte_carlo(&self) -> (Estimate, Vector) {
        let n = self.dim();
        let q = match self {
            ConvexBody::BallIntersection { center, .. } | ConvexBody::BallHull { center, .. } => center.clone(),
            _ => Vector::zeros(n),
        };
        let shifted = self.translate(&(-&q));
        let mut rng = stream_rng(MC_SEED, 0);
        let ball = unit_ball_volume(n);
        let mut terms = Vec::with_capacity(MC_SAMPLES);
        let mut first = Vector::zeros(n);
        for _ in 0..MC_SAMPLES {
            let u = random_direction(&mut rng, n);
            let rho = shifted.radial(&u).unwrap_or(0.0);
            let rn = rho.powi(n as i32);
            terms.push(ball * rn);
            first += &u * (rn * rho);
        }
        let count = MC_SAMPLES as f64;
        let mean = terms.iter().sum::<f64>() / count;
        let var = terms.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (count - 1.0);
        let first = first * (n as f64 * ball / ((n + 1) as f64 * count));
        (
            Estimate { value: mean, std_error: (var / count).sqrt() },
            &q + first / mean,
        )
    }

    pub fn translate(&self, t: &Vector) -> Self {
        match self {
            ConvexBody::HPolytope(p) => ConvexBody::HPolytope(p.translate(t)),
            ConvexBody::VPolytope(p) => ConvexBody::VPolytope(p.translate(t)),
            ConvexBody::Ellipsoid(e) => ConvexBody::Ellipsoid(e.translate(t)),
            ConvexBody::Ball { center, radius } => ConvexBody::Ball { center: center + t, radius: *radius },
            ConvexBody::Support2D(s) => ConvexBody::Support2D(s.translate(t)),
            ConvexBody::BallIntersection { body, center, radius } => ConvexBody::BallIntersection {
                body: Box::new(body.translate(t)),
                center: center + t,
                radius: *radius,
            },
            ConvexBody::BallHull { body, center, radius } => ConvexBody::BallHull {
                body: Box::new(body.translate(t)),
                center: center + t,
                radius: *radius,
            },
        }
    }

    /// Translate of the body with its centroid at the origin.
    pub fn centered(&self) -> Self {
        self.translate(&(-self.centroid()))
    }

    /// Dilation `λK` about the origin.
    pub fn scale(&self, factor: f64) -> Result<Self> {
        self.apply_affine(&AffineMap::scaling(self.dim(), factor)?)
    }

    pub fn apply_affine(&self, map: &AffineMap) -> Result<Self> {
        if map.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: map.dim() });
        }
        let (m, t) = (map.matrix(), map.translation());
        Ok(match self {
            ConvexBody::HPolytope(p) => ConvexBody::HPolytope(p.affine_image(m, t)?),
            ConvexBody::VPolytope(p) => ConvexBody::VPolytope(p.affine_image(m, t)?),
            ConvexBody::Ellipsoid(e) => ConvexBody::Ellipsoid(e.affine_image(m, t)?),
            ConvexBody::Ball { center, radius } => match map.similarity_scale() {
                Some(s) => ConvexBody::Ball { center: map.apply(center), radius: radius * s },
                None => ConvexBody::Ellipsoid(Ellipsoid::ball(center.clone(), *radius)?.affine_image(m, t)?),
            },
            ConvexBody::Support2D(s) => ConvexBody::Support2D(s.affine_image(m, t)?),
            ConvexBody::BallIntersection { body, center, radius } | ConvexBody::BallHull { body, center, radius } => {
                let s = map.similarity_scale().ok_or_else(|| {
                    Error::Unsupported("non-similarity image of a body combined with a ball".into())
                })?;
                let body = Box::new(body.apply_affine(map)?);
                let center = map.apply(center);
                let radius = radius * s;
                if matches!(self, ConvexBody::BallIntersection { .. }) {
                    ConvexBody::BallIntersection { body, center, radius }
                } else {
                    ConvexBody::BallHull { body, center, radius }
                }
            }
        })
    }

    /// Polar body `{y : ⟨x, y⟩ ≤ 1 for all x ∈ K}`.
    pub fn polar(&self) -> Result<Self> {
        match self {
            ConvexBody::HPolytope(p) => Ok(ConvexBody::VPolytope(p.polar()?)),
            ConvexBody::VPolytope(p) => Ok(ConvexBody::HPolytope(p.polar()?)),
            ConvexBody::Ellipsoid(e) => Ok(ConvexBody::Ellipsoid(e.polar()?)),
            ConvexBody::Ball { center, radius } => {
                if center.norm() >= *radius {
                    return Err(Error::OriginNotInterior);
                }
                if center.amax() == 0.0 {
                    Ok(ConvexBody::Ball { center: center.clone(), radius: 1.0 / radius })
                } else {
                    Ok(ConvexBody::Ellipsoid(Ellipsoid::ball(center.clone(), *radius)?.polar()?))
                }
            }
            ConvexBody::Support2D(s) => {
                if !s.origin_interior() {
                    return Err(Error::OriginNotInterior);
                }
                let samples: Vec<f64> = (0..s.grid()).map(|j| 1.0 / s.radial_at(s.theta(j))).collect();
                Ok(ConvexBody::Support2D(SupportBody2D::from_samples(&samples)?))
            }
            ConvexBody::BallIntersection { body, center, radius } | ConvexBody::BallHull { body, center, radius } => {
                if center.amax() != 0.0 {
                    return Err(Error::Unsupported("polar of an off-center ball combination".into()));
                }
                let body = Box::new(body.polar()?);
                let radius = 1.0 / radius;
                Ok(if matches!(self, ConvexBody::BallIntersection { .. }) {
                    ConvexBody::BallHull { body, center: center.clone(), radius }
                } else {
                    ConvexBody::BallIntersection { body, center: center.clone(), radius }
                })
            }
        }
    }

    /// `K ∩ R·B` with the ball centered at the origin.
    pub fn intersect_ball(&self, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidInput("radius must be positive".into()));
        }
        if !self.contains(&Vector::zeros(self.dim()), -1e-12 * self.bounding_radius()) {
            return Err(Error::OriginNotInterior);
        }
        let n = self.dim();
        if self.bounding_radius() <= radius {
            return Ok(self.clone());
        }
        if let ConvexBody::Ball { center, radius: r } = self {
            if center.norm() + radius <= *r {
                return Ok(ConvexBody::Ball { center: Vector::zeros(n), radius });
            }
        }
        if self.is_polytope() && self.inner_radius() >= radius {
            return Ok(ConvexBody::Ball { center: Vector::zeros(n), radius });
        }
        Ok(ConvexBody::BallIntersection { body: Box::new(self.clone()), center: Vector::zeros(n), radius })
    }

    /// `conv{K, R·B}` with the ball centered at the origin.
    pub fn convex_hull_with_ball(&self, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidInput("radius must be positive".into()));
        }
        let n = self.dim();
        if self.bounding_radius() <= radius {
            return Ok(ConvexBody::Ball { center: Vector::zeros(n), radius });
        }
        if let ConvexBody::Ball { center, radius: r } = self {
            if center.norm() + radius <= *r {
                return Ok(self.clone());
            }
        }
        if self.is_polytope() && self.contains(&Vector::zeros(n), 0.0) && self.inner_radius() >= radius {
            return Ok(self.clone());
        }
        Ok(ConvexBody::BallHull { body: Box::new(self.clone()), center: Vector::zeros(n), radius })
    }

    /// Support-function view on `grid` nodes (planar bodies).
    pub fn support_samples(&self, grid: usize) -> Vec<f64> {
        (0..grid)
            .map(|j| self.support(&from2(unit2(2.0 * PI * j as f64 / grid as f64))))
            .collect()
    }

    /// Convert a planar smooth body to the spectral support representation.
    pub fn to_support2d(&self) -> Result<SupportBody2D> {
        match self {
            ConvexBody::Support2D(s) => Ok(s.clone()),
            ConvexBody::Ellipsoid(_) | ConvexBody::Ball { .. } if self.dim() == 2 => {
                SupportBody2D::from_samples(&self.support_samples(DEFAULT_GRID))
            }
            _ => Err(Error::Unsupported(format!("{} has no smooth support representation", self.kind()))),
        }
    }
}

fn ball_chord(center: &Vector, radius: f64, x: &Vector, d: &Vector) -> (f64, f64) {
    let y = x - center;
    let a = d.norm_squared();
    let b = y.dot(d);
    let c = y.norm_squared() - radius * radius;
    let disc = (b * b - a * c).max(0.0).sqrt();
    ((-b - disc) / a, (-b + disc) / a)
}

fn ball_exit(center: &Vector, radius: f64, x: &Vector, u: &Vector) -> f64 {
    ball_chord(center, radius, x, u).1
}

/// Largest `t` in `[lo, hi]` with `inside(t)`, assuming `inside(lo)` and monotonicity.
fn bisect_boundary<F: Fn(f64) -> bool>(inside: F, lo: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    if inside(hi) {
        return hi;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_vec(xs.to_vec())
    }

    fn square() -> ConvexBody {
        ConvexBody::cube(2, 1.0).unwrap()
    }

    #[test]
    fn support_examples() {
        let ball = ConvexBody::ball(v(&[0.0, 0.0]), 2.0).unwrap();
        assert_eq!(ball.support(&v(&[1.0, 0.0])), 2.0);
        let s = 0.5f64.sqrt();
        assert!((square().support(&v(&[s, s])) - 2f64.sqrt()).abs() < 1e-15);
        let e = ConvexBody::ellipse(2.0, 1.0).unwrap();
        assert!((e.support(&v(&[1.0, 0.0])) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn radial_examples() {
        let s = 0.5f64.sqrt();
        assert!((square().radial(&v(&[s, s])).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let off = square().translate(&v(&[1.5, 0.0]));
        assert!(matches!(off.radial(&v(&[1.0, 0.0])), Err(Error::OriginNotInterior)));
    }

    #[test]
    fn polar_examples() {
        let b = ConvexBody::ball(v(&[0.0, 0.0]), 2.0).unwrap().polar().unwrap();
        assert!(matches!(b, ConvexBody::Ball { radius, .. } if (radius - 0.5).abs() < 1e-15));
        let cross = square().polar().unwrap();
        let p = cross.polytope().unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert!((cross.volume().value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn volume_and_centroid_examples() {
        let tri = ConvexBody::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!((tri.centroid() - v(&[1.0 / 3.0, 1.0 / 3.0])).norm() < 1e-15);
        let sq = ConvexBody::polygon(&[[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]]).unwrap();
        assert!((sq.centroid() - v(&[1.0, 1.0])).norm() < 1e-15);
        let cube = ConvexBody::cube(3, 1.0).unwrap();
        assert!((cube.volume().value - 8.0).abs() < 1e-12);
    }

    #[test]
    fn affine_image_of_ball_is_ellipsoid() {
        let b = ConvexBody::unit_ball(2);
        let map = AffineMap::linear(Matrix::from_diagonal(&v(&[2.0, 1.0]))).unwrap();
        let img = b.apply_affine(&map).unwrap();
        let e = img.as_ellipsoid().unwrap();
        assert!((e.shape() - Matrix::from_diagonal(&v(&[0.25, 1.0]))).amax() < 1e-15);
        let doubled = b.apply_affine(&AffineMap::scaling(2, 2.0).unwrap()).unwrap();
        assert!((doubled.volume().value - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn ball_operations() {
        let inter = square().intersect_ball(1.0).unwrap();
        assert!(matches!(inter, ConvexBody::Ball { radius, .. } if radius == 1.0));
        let inter = square().intersect_ball(1.2).unwrap();
        assert!((inter.radial(&v(&[1.0, 0.0])).unwrap() - 1.0).abs() < 1e-15);
        let s = 0.5f64.sqrt();
        assert!((inter.radial(&v(&[s, s])).unwrap() - 1.2).abs() < 1e-15);
        let hull = square().convex_hull_with_ball(1.0).unwrap();
        assert!(hull.is_polytope());
        let thin = ConvexBody::ellipsoid(v(&[0.0, 0.0]), Matrix::from_diagonal(&v(&[100.0, 1.0]))).unwrap();
        let hull = thin.convex_hull_with_ball(0.5).unwrap();
        assert!((hull.support(&v(&[0.0, 1.0])) - 1.0).abs() < 1e-15);
        assert!((hull.support(&v(&[1.0, 0.0])) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn composite_volumes_are_exact_in_the_plane() {
        let inter = square().intersect_ball(1.2).unwrap();
        let (est, _) = inter.radial_monte_carlo();
        let exact = inter.volume();
        assert_eq!(exact.std_error, 0.0);
        assert!((est.value - exact.value).abs() < 4.0 * est.std_error);
    }
}
