//! L_p affine surface areas by closed form, planar quadrature and exact
//! piecewise integration, plus the floating-body limit oracle.

mod floating;

pub use floating::{asp1_floating_limit_2d, default_deltas, floating_body_2d, floating_defect, FloatingBody, FLOATING_DIRECTIONS};

use crate::error::{Error, Result};
use crate::geometry::{asp_exponents, ConvexBody, SegmentRule, SupportBody2D};
use crate::report::BoundReport;
use crate::util::{random_direction, stream_rng, unit_ball_volume, unit_sphere_area};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AspMethod {
    ClosedForm,
    Quadrature2d,
    FloatingLimit,
    SphericalCapLowerBound,
    /// Exact integration over arcs, segments and corners of a planar boundary.
    Piecewise2d,
    /// Polytopes: curvature vanishes on facets.
    PolytopeRule,
}

/// A computed `as_p` value. Infinite values carry a reason.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AspValue {
    #[serde(serialize_with = "extended_real")]
    pub value: f64,
    #[serde(serialize_with = "extended_real")]
    pub p: f64,
    pub method: AspMethod,
    pub error_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl AspValue {
    fn exact(value: f64, p: f64, method: AspMethod) -> Self {
        AspValue { value, p, method, error_estimate: 0.0, reason: None }
    }

    fn divergent(p: f64, method: AspMethod, reason: &str) -> Self {
        AspValue { value: f64::INFINITY, p, method, error_estimate: 0.0, reason: Some(reason.to_string()) }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

/// Serializes infinities as the strings `"inf"` / `"-inf"`, finite values as numbers.
pub fn extended_real<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_infinite() {
        s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" })
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else {
        s.serialize_f64(*x)
    }
}

fn check_p(p: f64, n: usize) -> Result<()> {
    if p == -(n as f64) {
        return Err(Error::PEqualsMinusN(n));
    }
    if p.is_nan() {
        return Err(Error::InvalidInput("p is NaN".into()));
    }
    Ok(())
}

/// Exponent `(n − p)/(n + p)` of the affine equivariance `as_p(TK) = |det T|^e as_p(K)`.
pub fn equivariance_exponent(n: usize, p: f64) -> f64 {
    if p.is_infinite() {
        return -1.0;
    }
    let n = n as f64;
    (n - p) / (n + p)
}

/// `as_p(B_2^n) = n |B_2^n|`, and for an ellipsoid `T B + c` the factor `|det T|^{(n−p)/(n+p)}`.
pub fn asp_closed_form(body: &ConvexBody, p: f64) -> Result<AspValue> {
    let n = body.dim();
    check_p(p, n)?;
    let e = body
        .as_ellipsoid()
        .ok_or_else(|| Error::Unsupported(format!("no closed form for {}", body.kind())))?;
    let det_t = 1.0 / e.shape_determinant().sqrt();
    let value = det_t.powf(equivariance_exponent(n, p)) * unit_sphere_area(n);
    Ok(AspValue::exact(value, p, AspMethod::ClosedForm))
}

fn trapezoid_asp(body: &SupportBody2D, p: f64, m: usize) -> f64 {
    let (curv, supp, _) = asp_exponents(p);
    let direct = m == body.grid();
    let integrand = |j: usize| {
        let (h, d2h) = if direct {
            (body.h_nodes()[j], body.d2h_nodes()[j])
        } else {
            let (h, _, d2h) = body.eval(2.0 * std::f64::consts::PI * j as f64 / m as f64);
            (h, d2h)
        };
        (h + d2h).powf(curv) * h.powf(supp)
    };
    let sum: f64 = (0..m).map(integrand).sum();
    sum * 2.0 * std::f64::consts::PI / m as f64
}

/// Trapezoidal evaluation of `∫ r^{2/(2+p)} h^{-2(p−1)/(2+p)} dθ`, `r = h + h''`,
/// on a grid of `m` nodes; the error estimate compares with the half grid.
pub fn asp_quadrature_2d(body: &SupportBody2D, p: f64, m: usize) -> Result<AspValue> {
    check_p(p, 2)?;
    if m < 16 || m % 2 != 0 {
        return Err(Error::InvalidInput("quadrature grid must be even and at least 16".into()));
    }
    let g = body.centroid();
    let diameter = 2.0 * body.h_nodes().iter().copied().fold(0.0, f64::max);
    if g.norm() > 1e-8 * diameter {
        return Err(Error::NotCentered(g.norm()));
    }
    let min_r = body.min_curvature_radius();
    if min_r <= 0.0 {
        return Err(Error::NonConvex(min_r));
    }
    if m != body.grid() {
        let min_r = (0..m)
            .map(|j| {
                let (h, _, d2h) = body.eval(2.0 * std::f64::consts::PI * j as f64 / m as f64);
                h + d2h
            })
            .fold(f64::INFINITY, f64::min);
        if min_r <= 0.0 {
            return Err(Error::NonConvex(min_r));
        }
    }
    let full = trapezoid_asp(body, p, m);
    let half = trapezoid_asp(body, p, m / 2);
    Ok(AspValue {
        value: full,
        p,
        method: AspMethod::Quadrature2d,
        error_estimate: (full - half).abs(),
        reason: None,
    })
}

/// `as_p` of a polytope: curvature vanishes on facets, so the integral is `n|K|`
/// at `p = 0`, zero when `p/(n+p) > 0` and infinite when `−n < p < 0`.
pub fn asp_polytope(body: &ConvexBody, p: f64) -> Result<AspValue> {
    let n = body.dim();
    check_p(p, n)?;
    let vol = body.volume();
    let nf = n as f64;
    Ok(if p == 0.0 {
        AspValue {
            value: nf * vol.value,
            p,
            method: AspMethod::PolytopeRule,
            error_estimate: nf * vol.std_error,
            reason: None,
        }
    } else if p > 0.0 || p < -nf {
        AspValue::exact(0.0, p, AspMethod::PolytopeRule)
    } else {
        AspValue::divergent(p, AspMethod::PolytopeRule, "flat boundary with -n < p < 0")
    })
}

/// `as_p(K)` with `K` shifted so that its centroid is the origin, dispatching on the
/// representation: closed form for balls and ellipsoids, spectral quadrature for
/// smooth planar bodies, exact piecewise integration for planar arc/segment
/// boundaries, and the flat-facet rule for polytopes.
pub fn asp(body: &ConvexBody, p: f64) -> Result<AspValue> {
    let n = body.dim();
    check_p(p, n)?;
    match body {
        ConvexBody::Ellipsoid(_) | ConvexBody::Ball { .. } => asp_closed_form(body, p),
        ConvexBody::HPolytope(_) | ConvexBody::VPolytope(_) => asp_polytope(body, p),
        ConvexBody::Support2D(s) => {
            let centered = s.translate(&(-s.centroid()));
            asp_quadrature_2d(&centered, p, centered.grid())
        }
        _ => {
            let arc = body
                .arc_polygon()
                .ok_or_else(|| Error::Unsupported(format!("as_p of {} in dimension {n}", body.kind())))?;
            let value = arc
                .affine_surface_integral(p)
                .ok_or(Error::OriginNotInterior)?;
            if value.is_infinite() {
                return Ok(AspValue::divergent(p, AspMethod::Piecewise2d, "flat boundary with -n < p < 0"));
            }
            Ok(AspValue::exact(value, p, AspMethod::Piecewise2d))
        }
    }
}

/// Segment contribution rule at `p`, exposed for reports.
pub fn segment_rule(p: f64) -> SegmentRule {
    asp_exponents(p).2
}

/// Fraction of the sphere where `ρ_K(u) > R`, by direction sampling, with its
/// standard error.
pub fn spherical_fraction(body: &ConvexBody, radius: f64, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let n = body.dim();
    let mut axis = crate::util::Vector::zeros(n);
    axis[0] = 1.0;
    body.radial(&axis)?;
    const CHUNK: usize = 4096;
    let chunks = samples.div_ceil(CHUNK);
    let hits: Result<Vec<usize>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut hit = 0;
            for _ in 0..count {
                let u = random_direction(&mut rng, n);
                if body.radial(&u)? > radius {
                    hit += 1;
                }
            }
            Ok(hit)
        })
        .collect();
    let total: usize = hits?.iter().sum();
    let sigma = total as f64 / samples as f64;
    Ok((sigma, (sigma * (1.0 - sigma) / samples as f64).sqrt()))
}

/// Spherical-part lower bound: with `O = {u : ρ_K(u) > R}` and `μ(RO) = σ(O) n|B| R^{n−1}`,
/// returns `μ(RO) · R^{1 − 2np/(n+p)}`, the contribution of the sphere `R·S^{n−1}`
/// to `as_p(K ∩ R B)`.
pub fn asp_cap_lower_bound(body: &ConvexBody, radius: f64, p: f64, samples: usize, seed: u64) -> Result<AspValue> {
    let n = body.dim();
    let nf = n as f64;
    check_p(p, n)?;
    if !(0.0..=nf).contains(&p) {
        return Err(Error::POutOfRange { kind: "cap".into(), p });
    }
    let (sigma, err) = spherical_fraction(body, radius, samples, seed)?;
    let factor = unit_sphere_area(n) * radius.powf(nf - 1.0) * radius.powf(1.0 - 2.0 * nf * p / (nf + p));
    Ok(AspValue {
        value: sigma * factor,
        p,
        method: AspMethod::SphericalCapLowerBound,
        error_estimate: err * factor,
        reason: None,
    })
}

/// `μ(R·O)` for the spherical part, i.e. `σ(O) n |B| R^{n−1}`.
pub fn spherical_part_measure(sigma: f64, radius: f64, n: usize) -> f64 {
    sigma * unit_sphere_area(n) * radius.powi(n as i32 - 1)
}

/// `n |B_2^n|^{2p/(n+p)} |K|^{(n−p)/(n+p)}`: the affine isoperimetric value for a body of volume `|K|`.
pub fn isoperimetric_value(n: usize, p: f64, volume: f64) -> f64 {
    let ball = unit_ball_volume(n);
    let e = equivariance_exponent(n, p);
    unit_sphere_area(n) * (volume / ball).powf(e)
}

/// `as_p(K)` against `n|B|^{2p/(n+p)}|K|^{(n−p)/(n+p)}`: an upper bound for `0 ≤ p ≤ n`
/// a lower bound for `−n < p < 0`, with equality for ellipsoids.
pub fn isoperimetric_report(body: &ConvexBody, p: f64) -> Result<BoundReport> {
    let n = body.dim();
    let nf = n as f64;
    check_p(p, n)?;
    if p < -nf || p > nf {
        return Err(Error::POutOfRange { kind: "isoperimetric".into(), p });
    }
    let value = asp(body, p)?.value;
    let bound = isoperimetric_value(n, p, body.volume().value);
    let tol = 1e-7 * bound.max(1.0);
    Ok(if p >= 0.0 {
        BoundReport::at_most(format!("as_{p}"), value, bound, tol, "affine isoperimetric inequality, 0 <= p <= n")
    } else {
        BoundReport::at_least(format!("as_{p}"), bound, value, tol, "reverse affine isoperimetric inequality, -n < p < 0")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::{Matrix, Vector};
    use std::f64::consts::PI;

    #[test]
    fn isoperimetric_reports() {
        let e = ConvexBody::ellipse(3.0, 0.5).unwrap();
        for p in [-1.0, 0.5, 1.0, 2.0] {
            let r = isoperimetric_report(&e, p).unwrap();
            let bound = if p >= 0.0 { r.upper } else { r.lower };
            assert!(r.pass && (r.value - bound).abs() < 1e-9 * bound);
        }
        let sq = ConvexBody::cube(2, 1.0).unwrap();
        let r = isoperimetric_report(&sq, 1.0).unwrap();
        assert!(r.pass && r.value == 0.0);
        let r = isoperimetric_report(&sq, -1.0).unwrap();
        assert!(r.pass && r.value.is_infinite());
        assert!(matches!(isoperimetric_report(&sq, 3.0), Err(Error::POutOfRange { .. })));
    }

    #[test]
    fn closed_form_examples() {
        let b = ConvexBody::unit_ball(2);
        assert!((asp_closed_form(&b, 1.0).unwrap().value - 2.0 * PI).abs() < 1e-14);
        let b2 = ConvexBody::ball(Vector::zeros(2), 2.0).unwrap();
        assert!((asp_closed_form(&b2, 1.0).unwrap().value - 4f64.powf(1.0 / 3.0) * 2.0 * PI).abs() < 1e-13);
        let e = ConvexBody::ellipsoid(Vector::zeros(2), Matrix::from_diagonal(&Vector::from_vec(vec![0.25, 1.0]))).unwrap();
        assert!((asp_closed_form(&e, 0.0).unwrap().value - 4.0 * PI).abs() < 1e-13);
        assert!(matches!(asp_closed_form(&b, -2.0), Err(Error::PEqualsMinusN(2))));
    }

    #[test]
    fn quadrature_anchors() {
        let disk = SupportBody2D::disk(1.0, 256).unwrap();
        for p in [0.0, 1.0, 3.0, -1.0] {
            assert!((asp_quadrature_2d(&disk, p, 256).unwrap().value - 2.0 * PI).abs() < 1e-12);
        }
        let e = SupportBody2D::ellipse(2.0, 1.0, 1024).unwrap();
        let q = asp_quadrature_2d(&e, 1.0, 1024).unwrap();
        assert!((q.value - 2f64.powf(1.0 / 3.0) * 2.0 * PI).abs() < 1e-10);
        let as0 = asp_quadrature_2d(&e, 0.0, 1024).unwrap().value;
        assert!((as0 - 2.0 * e.area()).abs() < 1e-10);
    }

    #[test]
    fn quadrature_requires_centering() {
        let e = SupportBody2D::ellipse(2.0, 1.0, 256).unwrap().translate(&Vector::from_vec(vec![0.1, 0.0]));
        assert!(matches!(asp_quadrature_2d(&e, 1.0, 256), Err(Error::NotCentered(_))));
    }

    #[test]
    fn polytope_rule() {
        let sq = ConvexBody::cube(2, 1.0).unwrap();
        assert_eq!(asp(&sq, 1.0).unwrap().value, 0.0);
        assert_eq!(asp(&sq, 0.0).unwrap().value, 8.0);
        assert!(asp(&sq, -1.0).unwrap().is_infinite());
        assert_eq!(asp(&sq, -3.0).unwrap().value, 0.0);
    }

    #[test]
    fn cap_bound_on_ball_and_square() {
        let b = ConvexBody::unit_ball(2);
        let v = asp_cap_lower_bound(&b, 0.5, 1.0, 1000, 1).unwrap();
        assert!((v.value - PI * 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
        let v = asp_cap_lower_bound(&b, 1.1, 1.0, 1000, 1).unwrap();
        assert_eq!(v.value, 0.0);
        let sq = ConvexBody::cube(2, 1.0).unwrap();
        let (sigma, err) = spherical_fraction(&sq, 1.2, 200_000, 5).unwrap();
        let exact = 1.0 - 4.0 / PI * (1.0f64 / 1.2).acos();
        assert!((sigma - exact).abs() < 3.0 * err);
    }

    #[test]
    fn serializes_infinity_as_string() {
        let v = AspValue::divergent(-1.0, AspMethod::PolytopeRule, "flat");
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains("\"value\":\"inf\""));
    }
}
