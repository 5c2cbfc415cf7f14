//! Planar convex bodies whose boundary consists of circular arcs, corners and
//! straight segments, described by the Gauss map: an ordered list of pieces
//! indexed by outward normal angle. Consecutive pieces are joined by a
//! (possibly empty) segment whose normal angle is the shared endpoint angle.

use super::support2d::SupportBody2D;
use crate::error::{Error, Result};
use crate::util::{cross2, integrate, unit2};
use nalgebra::{Matrix2, Vector2};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub enum Piece {
    /// A boundary point whose normal cone spans `[from, to]`.
    Corner { point: Vector2<f64>, from: f64, to: f64 },
    /// A circular arc with normals spanning `[from, to]`.
    Arc { center: Vector2<f64>, radius: f64, from: f64, to: f64 },
    /// The part of a smooth body's boundary with normals in `[from, to]`, shifted by `offset`.
    Curve { body: Arc<SupportBody2D>, offset: Vector2<f64>, from: f64, to: f64 },
}

impl Piece {
    pub fn from(&self) -> f64 {
        match self {
            Piece::Corner { from, .. } | Piece::Arc { from, .. } | Piece::Curve { from, .. } => *from,
        }
    }

    pub fn to(&self) -> f64 {
        match self {
            Piece::Corner { to, .. } | Piece::Arc { to, .. } | Piece::Curve { to, .. } => *to,
        }
    }

    pub fn start_point(&self) -> Vector2<f64> {
        match self {
            Piece::Corner { point, .. } => *point,
            Piece::Arc { center, radius, from, .. } => center + unit2(*from) * *radius,
            Piece::Curve { body, offset, from, .. } => body.boundary_point(*from) + offset,
        }
    }

    pub fn end_point(&self) -> Vector2<f64> {
        match self {
            Piece::Corner { point, .. } => *point,
            Piece::Arc { center, radius, to, .. } => center + unit2(*to) * *radius,
            Piece::Curve { body, offset, to, .. } => body.boundary_point(*to) + offset,
        }
    }

    /// Boundary point and radius of curvature at normal angle `theta` (curved pieces).
    fn eval(&self, theta: f64) -> (Vector2<f64>, f64) {
        match self {
            Piece::Corner { point, .. } => (*point, 0.0),
            Piece::Arc { center, radius, .. } => (center + unit2(theta) * *radius, *radius),
            Piece::Curve { body, offset, .. } => {
                let (h, dh, d2h) = body.eval(theta);
                (unit2(theta) * h + unit2(theta + 0.5 * PI) * dh + offset, h + d2h)
            }
        }
    }

    fn panels(&self) -> usize {
        let span = self.to() - self.from();
        let per_turn = match self {
            Piece::Curve { body, .. } => (body.harmonics().0.len() as f64 / 2.0).max(32.0),
            _ => 32.0,
        };
        ((span / (2.0 * PI) * per_turn).ceil() as usize).max(1)
    }

    /// `∫ f(x, r) dθ` over the normal range of a curved piece; zero for corners.
    fn integrate_curved<F: Fn(Vector2<f64>, f64, f64) -> f64>(&self, f: F) -> f64 {
        if matches!(self, Piece::Corner { .. }) {
            return 0.0;
        }
        integrate(
            |t| {
                let (x, r) = self.eval(t);
                f(x, r, t)
            },
            self.from(),
            self.to(),
            self.panels(),
        )
    }

    fn translated(&self, t: Vector2<f64>) -> Piece {
        match self {
            Piece::Corner { point, from, to } => Piece::Corner { point: point + t, from: *from, to: *to },
            Piece::Arc { center, radius, from, to } => Piece::Arc {
                center: center + t,
                radius: *radius,
                from: *from,
                to: *to,
            },
            Piece::Curve { body, offset, from, to } => Piece::Curve {
                body: body.clone(),
                offset: offset + t,
                from: *from,
                to: *to,
            },
        }
    }
}

/// Contributions of the three kinds of boundary pieces to a boundary integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SegmentRule {
    Zero,
    Infinite,
    /// `length · ⟨x, N⟩`, the value at `p = 0`.
    LengthTimesSupport,
}

#[derive(Clone, Debug)]
pub struct ArcPolygon {
    pieces: Vec<Piece>,
}

/// Keeps track of unwrapped normal angles while pieces are appended.
struct Builder {
    pieces: Vec<Piece>,
    cursor: Option<f64>,
}

impl Builder {
    fn new() -> Self {
        Builder { pieces: Vec::new(), cursor: None }
    }

    fn unwrap_after(&self, angle: f64) -> f64 {
        match self.cursor {
            None => angle,
            Some(c) => {
                let mut a = angle;
                while a < c - 1e-12 {
                    a += 2.0 * PI;
                }
                while a > c + 2.0 * PI - 1e-12 {
                    a -= 2.0 * PI;
                }
                a.max(c)
            }
        }
    }

    fn start(&mut self, angle: f64) {
        if self.cursor.is_none() {
            self.cursor = Some(angle);
        }
    }

    fn corner(&mut self, point: Vector2<f64>, from: f64, to: f64) {
        self.start(from);
        let from = self.cursor.unwrap();
        let to = self.unwrap_after(to);
        self.pieces.push(Piece::Corner { point, from, to });
        self.cursor = Some(to);
    }

    fn arc(&mut self, center: Vector2<f64>, radius: f64, from: f64, to: f64) {
        self.start(from);
        let from = self.cursor.unwrap();
        let to = self.unwrap_after(to);
        self.pieces.push(Piece::Arc { center, radius, from, to });
        self.cursor = Some(to);
    }

    fn curve(&mut self, body: Arc<SupportBody2D>, from: f64, to: f64) {
        self.start(from);
        let from = self.cursor.unwrap();
        let to = self.unwrap_after(to);
        self.pieces.push(Piece::Curve { body, offset: Vector2::zeros(), from, to });
        self.cursor = Some(to);
    }

    fn finish(self) -> ArcPolygon {
        ArcPolygon { pieces: self.pieces }
    }
}

fn edge_normal_angle(a: Vector2<f64>, b: Vector2<f64>) -> f64 {
    let e = b - a;
    (-e.x).atan2(e.y)
}

impl ArcPolygon {
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn disk(center: Vector2<f64>, radius: f64) -> Self {
        ArcPolygon {
            pieces: vec![Piece::Arc { center, radius, from: 0.0, to: 2.0 * PI }],
        }
    }

    /// Polygon with counter-clockwise vertices.
    pub fn polygon(vertices: &[Vector2<f64>]) -> Self {
        let m = vertices.len();
        let mut b = Builder::new();
        for i in 0..m {
            let prev = vertices[(i + m - 1) % m];
            let next = vertices[(i + 1) % m];
            b.corner(
                vertices[i],
                edge_normal_angle(prev, vertices[i]),
                edge_normal_angle(vertices[i], next),
            );
        }
        b.finish()
    }

    /// Outer parallel body `P + εB` of a counter-clockwise polygon.
    pub fn rounded_polygon(vertices: &[Vector2<f64>], radius: f64) -> Self {
        let m = vertices.len();
        let mut b = Builder::new();
        for i in 0..m {
            let prev = vertices[(i + m - 1) % m];
            let next = vertices[(i + 1) % m];
            b.arc(
                vertices[i],
                radius,
                edge_normal_angle(prev, vertices[i]),
                edge_normal_angle(vertices[i], next),
            );
        }
        b.finish()
    }

    /// `P ∩ R·B` for a counter-clockwise polygon containing the origin.
    pub fn polygon_ball_intersection(vertices: &[Vector2<f64>], radius: f64) -> Result<Self> {
        let m = vertices.len();
        if !polygon_contains_origin(vertices) {
            return Err(Error::OriginNotInterior);
        }
        let tol = 1e-13 * radius;
        let inside: Vec<bool> = vertices.iter().map(|v| v.norm() <= radius + tol).collect();
        if inside.iter().all(|x| *x) {
            return Ok(Self::polygon(vertices));
        }
        // Portion [s0, s1] of each edge inside the disk.
        let mut parts: Vec<Option<(f64, f64)>> = Vec::with_capacity(m);
        for i in 0..m {
            let a = vertices[i];
            let e = vertices[(i + 1) % m] - a;
            let qa = e.norm_squared();
            let qb = 2.0 * a.dot(&e);
            let qc = a.norm_squared() - radius * radius;
            let disc = qb * qb - 4.0 * qa * qc;
            if disc <= 0.0 {
                parts.push(None);
                continue;
            }
            let sq = disc.sqrt();
            let mut s0 = ((-qb - sq) / (2.0 * qa)).max(0.0);
            let mut s1 = ((-qb + sq) / (2.0 * qa)).min(1.0);
            if inside[i] {
                s0 = 0.0;
            }
            if inside[(i + 1) % m] {
                s1 = 1.0;
            }
            parts.push((s1 - s0 > 1e-13).then_some((s0, s1)));
        }
        let active: Vec<usize> = (0..m).filter(|&i| parts[i].is_some()).collect();
        if active.is_empty() {
            return Ok(Self::disk(Vector2::zeros(), radius));
        }
        let point = |i: usize, s: f64| vertices[i] + (vertices[(i + 1) % m] - vertices[i]) * s;
        let angle = |p: Vector2<f64>| p.y.atan2(p.x);
        let mut b = Builder::new();
        for (k, &i) in active.iter().enumerate() {
            let j = active[(k + 1) % active.len()];
            let (_, s1) = parts[i].unwrap();
            let (s0_next, _) = parts[j].unwrap();
            let phi_i = edge_normal_angle(vertices[i], vertices[(i + 1) % m]);
            let phi_j = edge_normal_angle(vertices[j], vertices[(j + 1) % m]);
            if s1 >= 1.0 && j == (i + 1) % m && s0_next <= 0.0 {
                b.corner(vertices[j], phi_i, phi_j);
            } else {
                let exit = point(i, s1);
                let entry = point(j, s0_next);
                b.corner(exit, phi_i, angle(exit));
                b.arc(Vector2::zeros(), radius, angle(exit), angle(entry));
                b.corner(entry, angle(entry), phi_j);
            }
        }
        Ok(b.finish())
    }

    /// `conv{P, R·B}` for a counter-clockwise polygon.
    pub fn polygon_ball_hull(vertices: &[Vector2<f64>], radius: f64) -> Self {
        let m = vertices.len();
        let mut corners: Vec<(Vector2<f64>, f64, f64)> = Vec::new();
        for i in 0..m {
            let v = vertices[i];
            let r = v.norm();
            if r <= radius * (1.0 + 1e-13) {
                continue;
            }
            let lo_cone = edge_normal_angle(vertices[(i + m - 1) % m], v);
            let mut hi_cone = edge_normal_angle(v, vertices[(i + 1) % m]);
            while hi_cone < lo_cone {
                hi_cone += 2.0 * PI;
            }
            let mid = 0.5 * (lo_cone + hi_cone);
            let mut alpha = v.y.atan2(v.x);
            while alpha < mid - PI {
                alpha += 2.0 * PI;
            }
            while alpha > mid + PI {
                alpha -= 2.0 * PI;
            }
            let beta = (radius / r).acos();
            let lo = lo_cone.max(alpha - beta);
            let hi = hi_cone.min(alpha + beta);
            if hi > lo {
                corners.push((v, lo, hi));
            }
        }
        if corners.is_empty() {
            return Self::disk(Vector2::zeros(), radius);
        }
        let mut b = Builder::new();
        let first_from = corners[0].1;
        for k in 0..corners.len() {
            let (v, lo, hi) = corners[k];
            b.corner(v, lo, hi);
            let next_lo = if k + 1 < corners.len() { corners[k + 1].1 } else { first_from };
            let gap_end = b.unwrap_after(next_lo);
            if gap_end - b.cursor.unwrap() > 1e-14 {
                b.arc(Vector2::zeros(), radius, hi, next_lo);
            }
        }
        b.finish()
    }

    pub fn translate(&self, t: Vector2<f64>) -> Self {
        ArcPolygon { pieces: self.pieces.iter().map(|p| p.translated(t)).collect() }
    }

    pub fn scale(&self, factor: f64) -> Self {
        ArcPolygon {
            pieces: self
                .pieces
                .iter()
                .map(|p| match p {
                    Piece::Corner { point, from, to } => Piece::Corner { point: point * factor, from: *from, to: *to },
                    Piece::Arc { center, radius, from, to } => Piece::Arc {
                        center: center * factor,
                        radius: radius * factor,
                        from: *from,
                        to: *to,
                    },
                    Piece::Curve { body, offset, from, to } => Piece::Curve {
                        body: Arc::new(body.scale(factor)),
                        offset: offset * factor,
                        from: *from,
                        to: *to,
                    },
                })
                .collect(),
        }
    }

    /// Smooth body `K ∩ R·B` (origin interior to `K`).
    pub fn smooth_ball_intersection(body: &SupportBody2D, radius: f64) -> Result<Self> {
        if !body.origin_interior() {
            return Err(Error::OriginNotInterior);
        }
        let shared = Arc::new(body.clone());
        let excess = |t: f64| body.boundary_point(t).norm() - radius;
        let crossings = sign_changes(body.grid(), excess);
        if crossings.is_empty() {
            return Ok(if excess(0.0) < 0.0 {
                Self::curve(shared, 0.0, 2.0 * PI)
            } else {
                Self::disk(Vector2::zeros(), radius)
            });
        }
        // Start at an entry into the disk so that pieces alternate curve, corner, arc, corner.
        let k = crossings.len();
        let first = (0..k).find(|&i| !crossings[i].1).unwrap_or(0);
        let angle = |p: Vector2<f64>| p.y.atan2(p.x);
        let mut b = Builder::new();
        for step in 0..k / 2 {
            let (entry, _) = crossings[(first + 2 * step) % k];
            let (exit, _) = crossings[(first + 2 * step + 1) % k];
            let (next_entry, _) = crossings[(first + 2 * step + 2) % k];
            b.curve(shared.clone(), entry, exit);
            let p = body.boundary_point(exit);
            let q = body.boundary_point(next_entry);
            b.corner(p, exit, angle(p));
            b.arc(Vector2::zeros(), radius, angle(p), angle(q));
            b.corner(q, angle(q), next_entry);
        }
        Ok(b.finish())
    }

    /// Smooth body `conv{K, R·B}` (origin interior to `K`).
    pub fn smooth_ball_hull(body: &SupportBody2D, radius: f64) -> Result<Self> {
        if !body.origin_interior() {
            return Err(Error::OriginNotInterior);
        }
        let shared = Arc::new(body.clone());
        let excess = |t: f64| body.support_at(t) - radius;
        let crossings = sign_changes(body.grid(), excess);
        if crossings.is_empty() {
            return Ok(if excess(0.0) > 0.0 {
                Self::curve(shared, 0.0, 2.0 * PI)
            } else {
                Self::disk(Vector2::zeros(), radius)
            });
        }
        let k = crossings.len();
        // An upward crossing of h − R starts a stretch of the original boundary.
        let first = (0..k).find(|&i| crossings[i].1).unwrap_or(0);
        let mut b = Builder::new();
        for step in 0..k / 2 {
            let (up, _) = crossings[(first + 2 * step) % k];
            let (down, _) = crossings[(first + 2 * step + 1) % k];
            let (next_up, _) = crossings[(first + 2 * step + 2) % k];
            b.curve(shared.clone(), up, down);
            b.arc(Vector2::zeros(), radius, down, next_up);
        }
        Ok(b.finish())
    }

    fn curve(body: Arc<SupportBody2D>, from: f64, to: f64) -> Self {
        ArcPolygon { pieces: vec![Piece::Curve { body, offset: Vector2::zeros(), from, to }] }
    }

    /// Rotation by `angle` about the origin (corners and arcs only).
    pub fn rotate(&self, angle: f64) -> Result<Self> {
        let rot = nalgebra::Rotation2::new(angle);
        let pieces = self
            .pieces
            .iter()
            .map(|p| match p {
                Piece::Corner { point, from, to } => Ok(Piece::Corner {
                    point: rot * point,
                    from: from + angle,
                    to: to + angle,
                }),
                Piece::Arc { center, radius, from, to } => Ok(Piece::Arc {
                    center: rot * center,
                    radius: *radius,
                    from: from + angle,
                    to: to + angle,
                }),
                Piece::Curve { .. } => Err(Error::Unsupported("rotation of smooth boundary pieces".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ArcPolygon { pieces })
    }

    /// Segments `(start, end)` joining consecutive pieces (zero-length ones omitted).
    pub fn segments(&self) -> Vec<(Vector2<f64>, Vector2<f64>)> {
        let k = self.pieces.len();
        (0..k)
            .map(|i| (self.pieces[i].end_point(), self.pieces[(i + 1) % k].start_point()))
            .filter(|(a, b)| (b - a).norm() > 1e-14 * (1.0 + a.norm()))
            .collect()
    }

    pub fn support_at(&self, theta: f64) -> f64 {
        let u = unit2(theta);
        self.pieces
            .iter()
            .map(|p| {
                let (from, to) = (p.from(), p.to());
                let mut t = theta;
                while t < from {
                    t += 2.0 * PI;
                }
                while t > from + 2.0 * PI {
                    t -= 2.0 * PI;
                }
                if t <= to {
                    p.eval(t).0.dot(&u)
                } else {
                    p.start_point().dot(&u).max(p.end_point().dot(&u))
                }
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Distance from the origin to the boundary along angle `phi` (origin interior).
    pub fn radial_at(&self, phi: f64) -> f64 {
        let u = unit2(phi);
        let mut best: f64 = 0.0;
        for (a, b) in self.segments() {
            let e = b - a;
            let denom = cross2(u, e);
            if denom.abs() < 1e-300 {
                continue;
            }
            let t = cross2(a, e) / denom;
            let s = cross2(a, u) / denom;
            if t > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&s) {
                best = best.max(t);
            }
        }
        for p in &self.pieces {
            match p {
                Piece::Corner { point, .. } => {
                    if cross2(u, *point).abs() <= 1e-14 * point.norm() && point.dot(&u) > 0.0 {
                        best = best.max(point.norm());
                    }
                }
                Piece::Arc { center, radius, from, to } => {
                    let b = center.dot(&u);
                    let disc = b * b - center.norm_squared() + radius * radius;
                    if disc < 0.0 {
                        continue;
                    }
                    let t = b + disc.sqrt();
                    let hit = u * t - center;
                    if angle_in_range(hit.y.atan2(hit.x), *from, *to) {
                        best = best.max(t);
                    }
                }
                Piece::Curve { body, offset, from, to } => {
                    if offset.norm() > 0.0 {
                        continue;
                    }
                    let theta = body.normal_angle_towards(phi);
                    if angle_in_range(theta, *from, *to) {
                        best = best.max(body.radial_at(phi));
                    }
                }
            }
        }
        best
    }

    /// Area, first moment and second moment about the origin, from
    /// `∫ f dx = ∮ F ⟨x, N⟩ ds` with homogeneous `F`.
    pub fn moments(&self) -> (f64, Vector2<f64>, Matrix2<f64>) {
        let mut area = 0.0;
        let mut first = Vector2::zeros();
        let mut second = Matrix2::zeros();
        for (a, b) in self.segments() {
            let e = b - a;
            let hl = cross2(a, e);
            area += 0.5 * hl;
            first += (a + e * 0.5) * (hl / 3.0);
            let seg = a * a.transpose() + (a * e.transpose() + e * a.transpose()) * 0.5 + e * e.transpose() / 3.0;
            second += seg * (hl / 4.0);
        }
        for p in &self.pieces {
            area += 0.5 * p.integrate_curved(|x, r, t| x.dot(&unit2(t)) * r);
            for i in 0..2 {
                first[i] += p.integrate_curved(|x, r, t| x[i] * x.dot(&unit2(t)) * r) / 3.0;
                for j in i..2 {
                    let v = p.integrate_curved(|x, r, t| x[i] * x[j] * x.dot(&unit2(t)) * r) / 4.0;
                    second[(i, j)] += v;
                    if i != j {
                        second[(j, i)] += v;
                    }
                }
            }
        }
        (area, first, second)
    }

    pub fn area(&self) -> f64 {
        let mut area = 0.0;
        for (a, b) in self.segments() {
            area += 0.5 * cross2(a, b - a);
        }
        for p in &self.pieces {
            area += 0.5 * p.integrate_curved(|x, r, t| x.dot(&unit2(t)) * r);
        }
        area
    }

    pub fn perimeter(&self) -> f64 {
        let seg: f64 = self.segments().iter().map(|(a, b)| (b - a).norm()).sum();
        let curved: f64 = self.pieces.iter().map(|p| p.integrate_curved(|_, r, _| r)).sum();
        seg + curved
    }

    pub fn centroid(&self) -> Vector2<f64> {
        let (area, first, _) = self.moments();
        first / area
    }

    /// `∮ κ^{p/(2+p)} ⟨x − g, N⟩^{-2(p−1)/(2+p)} ds` in normal-angle form, with `g` the
    /// centroid. Corners carry no boundary measure; segments contribute according
    /// to [`asp_exponents`]. Returns `None` when the centroid is not interior.
    pub fn affine_surface_integral(&self, p: f64) -> Option<f64> {
        let g = self.centroid();
        let centered = self.translate(-g);
        let (curv_exp, supp_exp, rule) = asp_exponents(p);
        let mut total = 0.0;
        let mut infinite = false;
        for (a, b) in centered.segments() {
            let e = b - a;
            let len = e.norm();
            let h = cross2(a, e) / len;
            if h <= 0.0 {
                return None;
            }
            match rule {
                SegmentRule::Zero => {}
                SegmentRule::Infinite => infinite = true,
                SegmentRule::LengthTimesSupport => total += len * h,
            }
        }
        for piece in centered.pieces() {
            if let Piece::Corner { point, from, to } = piece {
                if point.dot(&unit2(*from)) <= 0.0 || point.dot(&unit2(*to)) <= 0.0 {
                    return None;
                }
                continue;
            }
            let bad = std::cell::Cell::new(false);
            let value = piece.integrate_curved(|x, r, t| {
                let h = x.dot(&unit2(t));
                if h <= 0.0 {
                    bad.set(true);
                    return 0.0;
                }
                r.powf(curv_exp) * h.powf(supp_exp)
            });
            if bad.get() {
                return None;
            }
            total += value;
        }
        Some(if infinite { f64::INFINITY } else { total })
    }
}

fn angle_in_range(angle: f64, from: f64, to: f64) -> bool {
    let mut a = angle;
    while a < from - 1e-12 {
        a += 2.0 * PI;
    }
    while a > from + 2.0 * PI {
        a -= 2.0 * PI;
    }
    a <= to + 1e-12
}

/// Sign changes of a periodic function sampled on `grid` nodes, refined by
/// bisection. Each entry is `(angle, rising)`.
fn sign_changes<F: Fn(f64) -> f64>(grid: usize, f: F) -> Vec<(f64, bool)> {
    let step = 2.0 * PI / grid as f64;
    let values: Vec<f64> = (0..grid).map(|j| f(j as f64 * step)).collect();
    let mut out = Vec::new();
    for j in 0..grid {
        let (a, b) = (values[j], values[(j + 1) % grid]);
        if (a < 0.0) == (b < 0.0) {
            continue;
        }
        let (mut lo, mut hi) = (j as f64 * step, (j + 1) as f64 * step);
        let mut f_lo = a;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid);
            if (fm < 0.0) == (f_lo < 0.0) {
                lo = mid;
                f_lo = fm;
            } else {
                hi = mid;
            }
        }
        out.push((0.5 * (lo + hi), b >= 0.0));
    }
    out
}

/// Exponents `(a, b)` of `r^a h^b` in the normal-angle integrand of the planar
/// affine surface area, and the contribution rule for flat pieces.
pub fn asp_exponents(p: f64) -> (f64, f64, SegmentRule) {
    if p.is_infinite() {
        return (0.0, -2.0, SegmentRule::Zero);
    }
    let curv = 2.0 / (2.0 + p);
    let supp = -2.0 * (p - 1.0) / (2.0 + p);
    let kappa_exp = p / (2.0 + p);
    let rule = if p == 0.0 {
        SegmentRule::LengthTimesSupport
    } else if kappa_exp > 0.0 {
        SegmentRule::Zero
    } else {
        SegmentRule::Infinite
    };
    (curv, supp, rule)
}

fn polygon_contains_origin(vertices: &[Vector2<f64>]) -> bool {
    let m = vertices.len();
    (0..m).all(|i| cross2(vertices[i], vertices[(i + 1) % m]) > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(half: f64) -> Vec<Vector2<f64>> {
        vec![
            Vector2::new(half, -half),
            Vector2::new(half, half),
            Vector2::new(-half, half),
            Vector2::new(-half, -half),
        ]
    }

    #[test]
    fn polygon_area_and_zero_asp() {
        let sq = ArcPolygon::polygon(&square(1.0));
        assert!((sq.area() - 4.0).abs() < 1e-14);
        assert!((sq.perimeter() - 8.0).abs() < 1e-14);
        assert_eq!(sq.affine_surface_integral(1.0), Some(0.0));
        assert!((sq.affine_surface_integral(0.0).unwrap() - 8.0).abs() < 1e-13);
        assert_eq!(sq.affine_surface_integral(-1.0), Some(f64::INFINITY));
    }

    #[test]
    fn disk_asp_matches_closed_form() {
        let d = ArcPolygon::disk(Vector2::new(0.3, 0.1), 2.0);
        let expected = 2f64.powf(2.0 / 3.0) * 2.0 * PI;
        assert!((d.affine_surface_integral(1.0).unwrap() - expected).abs() < 1e-12);
        assert!((d.centroid() - Vector2::new(0.3, 0.1)).norm() < 1e-14);
    }

    #[test]
    fn square_ball_intersection_area() {
        // [-1,1]² ∩ 1.2·B: four flat pieces and four arcs.
        let r: f64 = 1.2;
        let body = ArcPolygon::polygon_ball_intersection(&square(1.0), r).unwrap();
        let beta = (1.0 / r).acos();
        let arc_angle = 2.0 * PI - 8.0 * beta;
        let triangles = 8.0 * 0.5 * (r * r - 1.0).sqrt();
        let expected = 0.5 * r * r * arc_angle + triangles;
        assert!((body.area() - expected).abs() < 1e-13);
        let asp = body.affine_surface_integral(1.0).unwrap();
        assert!((asp - r.powf(2.0 / 3.0) * arc_angle).abs() < 1e-12);
        let total: f64 = body.pieces().iter().map(|p| p.to() - p.from()).sum();
        assert!((total - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn square_ball_hull_area() {
        let body = ArcPolygon::polygon_ball_hull(&square(1.0), 1.2);
        let r: f64 = 1.2;
        let d = 2f64.sqrt();
        let beta = (r / d).acos();
        // each corner adds a kite: two right triangles with legs r and √(d²−r²)
        let tangent = (d * d - r * r).sqrt();
        let kites = 4.0 * r * tangent;
        let arc_angle = 2.0 * PI - 8.0 * beta;
        let expected = kites + 0.5 * r * r * arc_angle;
        assert!((body.area() - expected).abs() < 1e-12, "{} {}", body.area(), expected);
        let total: f64 = body.pieces().iter().map(|p| p.to() - p.from()).sum();
        assert!((total - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn ball_hull_covering_polygon_is_disk() {
        let body = ArcPolygon::polygon_ball_hull(&square(1.0), 2.0);
        assert!((body.area() - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn rounded_square_area() {
        let eps = 0.1;
        let body = ArcPolygon::rounded_polygon(&square(1.0), eps);
        let expected = 4.0 + 8.0 * eps + PI * eps * eps;
        assert!((body.area() - expected).abs() < 1e-13);
    }
}
