//! Planar floating bodies and the floating-body limit for `as_1`.

use super::{AspMethod, AspValue};
use crate::error::{Error, Result};
use crate::geometry::{clip_halfplane, polygon_area, ConvexBody, Polytope, SupportBody2D};
use crate::util::{cross2, from2, integrate, to2, unit2, Vector};
use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;
use std::f64::consts::PI;

pub const FLOATING_DIRECTIONS: usize = 720;

/// Polygonal approximation of `K_δ`: the intersection over a direction grid of
/// the half-planes `⟨x, u⟩ ≤ t(u)` whose complementary caps have area `δ|K|`.
#[derive(Clone, Debug)]
pub struct FloatingBody {
    pub parent: ConvexBody,
    pub delta: f64,
    pub result: ConvexBody,
    /// Angles of the cut directions, ascending. The uniform grid `2πk/N` comes first in
    /// value order; polygons add directions clustered around each edge normal.
    pub cut_angles: Vec<f64>,
    /// Cut offsets `t(u)` matching `cut_angles`.
    pub cut_offsets: Vec<f64>,
}

/// Exact cap areas `|{x ∈ K : ⟨x, u⟩ ≥ t}|` for the supported representations.
enum CapOracle {
    Polygon(Vec<Vector2<f64>>),
    Ellipse { center: Vector2<f64>, root: Matrix2<f64>, det: f64 },
    Smooth(SupportBody2D),
}

fn disk_cap(s: f64) -> f64 {
    let s = s.clamp(-1.0, 1.0);
    s.acos() - s * (1.0 - s * s).sqrt()
}

impl CapOracle {
    fn new(body: &ConvexBody) -> Result<Self> {
        if body.dim() != 2 {
            return Err(Error::Unsupported("floating bodies are planar only".into()));
        }
        if let Some(p) = body.polytope() {
            return Ok(CapOracle::Polygon(p.polygon()));
        }
        if let Some(e) = body.as_ellipsoid() {
            let r = e.root_inverse();
            let root = Matrix2::new(r[(0, 0)], r[(0, 1)], r[(1, 0)], r[(1, 1)]);
            return Ok(CapOracle::Ellipse { center: to2(e.center()), root, det: root.determinant() });
        }
        if let ConvexBody::Support2D(s) = body {
            return Ok(CapOracle::Smooth(s.clone()));
        }
        Err(Error::Unsupported(format!("cap areas of {}", body.kind())))
    }

    /// Range of offsets `t` for direction `u`: `[−h(−u), h(u)]`.
    fn offset_range(&self, u: Vector2<f64>) -> (f64, f64) {
        match self {
            CapOracle::Polygon(p) => {
                let dots = p.iter().map(|v| v.dot(&u));
                let (lo, hi) = dots.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), d| (a.min(d), b.max(d)));
                (lo, hi)
            }
            CapOracle::Ellipse { center, root, .. } => {
                let w = (root * u).norm();
                (center.dot(&u) - w, center.dot(&u) + w)
            }
            CapOracle::Smooth(s) => {
                let phi = u.y.atan2(u.x);
                (-s.support_at(phi + PI), s.support_at(phi))
            }
        }
    }

    fn cap_area(&self, u: Vector2<f64>, t: f64) -> f64 {
        match self {
            CapOracle::Polygon(p) => polygon_area(&clip_halfplane(p, -u, -t)),
            CapOracle::Ellipse { center, root, det } => {
                let lu = root * u;
                det * disk_cap((t - center.dot(&u)) / lu.norm())
            }
            CapOracle::Smooth(s) => smooth_cap(s, u, t),
        }
    }
}

/// Cap of a smooth body: boundary normal angles `θ_a < φ < θ_b` where the line meets
/// the boundary, then `½∫ h r dθ` over the arc closed by the chord.
fn smooth_cap(s: &SupportBody2D, u: Vector2<f64>, t: f64) -> f64 {
    let phi = u.y.atan2(u.x);
    let height = |theta: f64| s.boundary_point(theta).dot(&u) - t;
    let theta_b = regula_falsi(height, phi, phi + PI);
    let theta_a = regula_falsi(height, phi, phi - PI);
    let (lo, hi) = (theta_a, theta_b);
    let harmonics = s.harmonics().0.len() as f64;
    let panels = (((hi - lo) / (2.0 * PI) * harmonics).ceil() as usize).max(2);
    let arc = 0.5
        * integrate(
            |theta| {
                let (h, _, d2h) = s.eval(theta);
                h * (h + d2h)
            },
            lo,
            hi,
            panels,
        );
    arc + 0.5 * cross2(s.boundary_point(hi), s.boundary_point(lo))
}

/// Root of `f` between `a` (where `f ≥ 0`) and `b` (where `f ≤ 0`) by the Illinois method.
fn regula_falsi<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa <= 0.0 {
        return a;
    }
    if fb >= 0.0 {
        return b;
    }
    let mut side = 0;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c);
        if fc == 0.0 || (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
            return c;
        }
        if (fc > 0.0) == (fa > 0.0) {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        if fc.abs() < 1e-16 {
            return c;
        }
    }
    0.5 * (a + b)
}

/// Cut angles: `directions` equally spaced angles, plus for polygons a geometric cluster
/// around every edge normal, where the boundary of `K_δ` turns through angles of order `δ`.
fn cut_angles(oracle: &CapOracle, delta: f64, directions: usize) -> Vec<f64> {
    let step = 2.0 * PI / directions as f64;
    let mut angles: Vec<f64> = (0..directions).map(|k| step * k as f64).collect();
    if let CapOracle::Polygon(p) = oracle {
        for i in 0..p.len() {
            let e = p[(i + 1) % p.len()] - p[i];
            let normal = (-e.x).atan2(e.y);
            let mut offset = 0.05 * delta;
            angles.push(normal);
            while offset < step {
                angles.push(normal + offset);
                angles.push(normal - offset);
                offset *= 1.5;
            }
        }
    }
    let mut angles: Vec<f64> = angles.into_iter().map(|a| a.rem_euclid(2.0 * PI)).collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    angles
}

/// Floating body `K_δ` of a planar body, cut along `directions` equally spaced directions
/// (refined near edge normals for polygons).
pub fn floating_body_2d(body: &ConvexBody, delta: f64, directions: usize) -> Result<FloatingBody> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    if directions < 3 {
        return Err(Error::InvalidInput("at least three cut directions are needed".into()));
    }
    let oracle = CapOracle::new(body)?;
    let target = delta * body.volume().value;
    let angles = cut_angles(&oracle, delta, directions);
    let cut_offsets: Vec<f64> = angles
        .par_iter()
        .map(|&a| {
            let u = unit2(a);
            let (lo, hi) = oracle.offset_range(u);
            regula_falsi(|t| oracle.cap_area(u, t) - target, lo, hi)
        })
        .collect();
    let reach = 2.0 * body.bounding_radius() + body.centroid().norm() + 1.0;
    let mut poly = vec![
        Vector2::new(-reach, -reach),
        Vector2::new(reach, -reach),
        Vector2::new(reach, reach),
        Vector2::new(-reach, reach),
    ];
    for (a, t) in angles.iter().zip(&cut_offsets) {
        poly = clip_halfplane(&poly, unit2(*a), *t);
        if poly.len() < 3 {
            return Err(Error::EmptyFloatingBody(delta));
        }
    }
    if polygon_area(&poly) <= 1e-14 * target / delta {
        return Err(Error::EmptyFloatingBody(delta));
    }
    let points: Vec<Vector> = poly.iter().map(|p| from2(*p)).collect();
    let result = ConvexBody::VPolytope(Polytope::from_vertices(&points).map_err(|_| Error::EmptyFloatingBody(delta))?);
    Ok(FloatingBody { parent: body.clone(), delta, result, cut_angles: angles, cut_offsets })
}

/// `δ_k = 0.02 · 2^{−k}`, `k = 0..6`.
pub fn default_deltas() -> Vec<f64> {
    (0..7).map(|k| 0.02 * 0.5f64.powi(k)).collect()
}

/// Polynomial extrapolation to `x = 0` through `(x_i, y_i)` (Neville's scheme).
fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let m = xs.len();
    for level in 1..m {
        for i in 0..m - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

/// Normalized volume defect `2(|B^1|/3)^{2/3} (|K| − |K_δ|) / (δ|K|)^{2/3}`.
pub fn floating_defect(volume: f64, floating_volume: f64, delta: f64) -> f64 {
    let c = 2.0 * (2.0f64 / 3.0).powf(2.0 / 3.0);
    c * (volume - floating_volume) / (delta * volume).powf(2.0 / 3.0)
}

/// `as_1` in the plane as the limit of the normalized floating-body volume defect,
/// extrapolated to `δ → 0` in the variable `δ^{2/3}` (smooth bodies) or with the
/// `δ^{1/3} log(1/δ)` expansion of polygons. The error estimate is the change in the
/// extrapolated value when the fitting window changes.
pub fn asp1_floating_limit_2d(body: &ConvexBody, deltas: &[f64]) -> Result<AspValue> {
    if deltas.len() < 3 {
        return Err(Error::InvalidInput("at least three delta values are needed".into()));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::NonMonotoneSequence);
    }
    let volume = body.volume().value;
    let defects: Vec<f64> = deltas
        .iter()
        .map(|&d| {
            let fb = floating_body_2d(body, d, FLOATING_DIRECTIONS)?;
            Ok(floating_defect(volume, fb.result.volume().value, d))
        })
        .collect::<Result<_>>()?;
    let (value, coarser) = if body.is_polytope() {
        let start = deltas.len().saturating_sub(EXTRAPOLATION_POINTS);
        (polygon_limit(&deltas[start..], &defects[start..]), polygon_limit(deltas, &defects))
    } else {
        let xs: Vec<f64> = deltas.iter().map(|d| d.powf(2.0 / 3.0)).collect();
        let order = deltas.len().min(EXTRAPOLATION_POINTS);
        let start = deltas.len() - order;
        (
            neville_at_zero(&xs[start..], &defects[start..]),
            neville_at_zero(&xs[start + 1..], &defects[start + 1..]),
        )
    };
    Ok(AspValue {
        value: value.max(0.0),
        p: 1.0,
        method: AspMethod::FloatingLimit,
        error_estimate: (value - coarser).abs(),
        reason: None,
    })
}

/// Constant term of the least-squares fit `d(δ) ≈ a + δ^{1/3}(b ln(1/δ) + c)`, the defect
/// expansion of a polygon.
fn polygon_limit(deltas: &[f64], defects: &[f64]) -> f64 {
    let rows = deltas.len();
    let design = nalgebra::DMatrix::from_fn(rows, 3, |i, j| {
        let x = deltas[i].cbrt();
        match j {
            0 => 1.0,
            1 => x * (1.0 / deltas[i]).ln(),
            _ => x,
        }
    });
    let rhs = nalgebra::DVector::from_column_slice(defects);
    match design.svd(true, true).solve(&rhs, 1e-14) {
        Ok(c) => c[0],
        Err(_) => f64::NAN,
    }
}

/// Number of smallest-δ points entering the extrapolation polynomial.
const EXTRAPOLATION_POINTS: usize = 4;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_floating_body_matches_cap_oracle() {
        let disk = ConvexBody::unit_ball(2);
        let delta = 0.05;
        // α − sin α cos α = δπ
        let alpha = regula_falsi(|a: f64| delta * PI - (a - a.sin() * a.cos()), 0.0, PI / 2.0);
        let fb = floating_body_2d(&disk, delta, 720).unwrap();
        let expected_radius = alpha.cos();
        let poly = fb.result.polytope().unwrap();
        for v in poly.vertices() {
            let r = v.norm();
            assert!(r >= expected_radius - 1e-12 && r <= expected_radius / (PI / 720.0).cos() + 1e-12);
        }
    }

    #[test]
    fn square_floating_body_cuts_corners() {
        let sq = ConvexBody::cube(2, 1.0).unwrap();
        let fb = floating_body_2d(&sq, 0.01, 720).unwrap();
        for v in fb.result.polytope().unwrap().vertices() {
            assert!(v.amax() < 1.0);
        }
        // caps parallel to a side: strip of width w with 2w = 0.04
        assert!((fb.cut_offsets[0] - 0.98).abs() < 1e-12);
    }

    #[test]
    fn smooth_cap_matches_ellipse_cap() {
        let smooth = ConvexBody::Support2D(SupportBody2D::ellipse(2.0, 1.0, 1024).unwrap());
        let exact = ConvexBody::ellipse(2.0, 1.0).unwrap();
        let a = CapOracle::new(&smooth).unwrap();
        let b = CapOracle::new(&exact).unwrap();
        for (k, t) in [(0usize, 1.5), (3, 0.2), (7, -0.5)] {
            let u = unit2(k as f64 * 0.4);
            assert!((a.cap_area(u, t) - b.cap_area(u, t)).abs() < 1e-11);
        }
    }

    #[test]
    fn limits_match_closed_forms() {
        let disk = asp1_floating_limit_2d(&ConvexBody::unit_ball(2), &default_deltas()).unwrap();
        assert!((disk.value / (2.0 * PI) - 1.0).abs() < 0.02);
        let square = asp1_floating_limit_2d(&ConvexBody::cube(2, 1.0).unwrap(), &default_deltas()).unwrap();
        assert!(square.value < 0.01);
    }

    #[test]
    fn rejects_bad_inputs() {
        let disk = ConvexBody::unit_ball(2);
        assert!(matches!(floating_body_2d(&disk, 0.6, 720), Err(Error::DeltaOutOfRange(_))));
        assert!(matches!(
            asp1_floating_limit_2d(&disk, &[0.01, 0.02, 0.005]),
            Err(Error::NonMonotoneSequence)
        ));
    }
}
