//! Convex polytopes held in double description (vertices and facets).
//!
//! Both representations are kept in sync so that support queries are a
//! maximum over vertices and radial/membership queries a minimum over facets.

use crate::error::{Error, Result};
use crate::util::{cross2, random_direction, stream_rng, unit_ball_volume, Matrix, Vector};
use nalgebra::Vector2;

/// Upper bound on subset enumerations performed by the brute-force
/// vertex/facet enumeration.
const MAX_COMBINATIONS: u64 = 4_000_000;
const MC_VOLUME_SAMPLES: usize = 1 << 17;
const MC_VOLUME_SEED: u64 = 0x5eed_0001;

/// A value with a standard error; exact branches report zero error.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, std_error: 0.0 }
    }
}

#[derive(Clone, Debug)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vector>,
    normals: Vec<Vector>,
    offsets: Vec<f64>,
    incidence: Vec<Vec<usize>>,
    diameter: f64,
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u64) / (i as u64 + 1);
    }
    acc
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
fn for_each_combination<F: FnMut(&[usize])>(n: usize, k: usize, mut f: F) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 {
            i -= 1;
            if idx[i] != i + n - k {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return;
            }
        }
        if k == 0 {
            return;
        }
    }
}

fn scale_of(points: &[Vector]) -> f64 {
    points.iter().map(|p| p.amax()).fold(0.0, f64::max).max(1e-300)
}

fn dedupe(points: &[Vector], eps: f64) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| (q - p).amax() <= eps) {
            out.push(p.clone());
        }
    }
    out
}

fn affine_rank(points: &[Vector], eps: f64) -> usize {
    let n = points[0].len();
    let mean = points.iter().fold(Vector::zeros(n), |acc, p| acc + p) / points.len() as f64;
    let m = Matrix::from_fn(points.len(), n, |i, j| points[i][j] - mean[j]);
    let sv = m.singular_values();
    sv.iter().filter(|s| **s > eps).count()
}

/// Convex hull of planar points in counter-clockwise order, collinear points removed.
pub fn convex_hull_2d(points: &[Vector2<f64>], eps: f64) -> Vec<Vector2<f64>> {
    let mut pts: Vec<Vector2<f64>> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| (*a - *b).amax() <= eps);
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Vector2<f64>> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vector2<f64>>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if cross2(b - a, p - a) <= eps * (b - a).norm().max(eps) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(*p);
        }
        hull.pop();
    }
    hull
}

/// Part of a convex polygon with `⟨x, normal⟩ ≤ offset` (Sutherland–Hodgman step).
pub fn clip_halfplane(poly: &[Vector2<f64>], normal: Vector2<f64>, offset: f64) -> Vec<Vector2<f64>> {
    let m = poly.len();
    let mut out = Vec::with_capacity(m + 1);
    for i in 0..m {
        let a = poly[i];
        let b = poly[(i + 1) % m];
        let sa = normal.dot(&a) - offset;
        let sb = normal.dot(&b) - offset;
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            out.push(a + (b - a) * (sa / (sa - sb)));
        }
    }
    out
}

/// Signed area of a polygon (positive for counter-clockwise order).
pub fn polygon_area(poly: &[Vector2<f64>]) -> f64 {
    let m = poly.len();
    0.5 * (0..m).map(|i| cross2(poly[i], poly[(i + 1) % m])).sum::<f64>()
}

impl Polytope {
    fn from_parts(dim: usize, vertices: Vec<Vector>, normals: Vec<Vector>, offsets: Vec<f64>, incidence: Vec<Vec<usize>>) -> Self {
        let mut diameter: f64 = 0.0;
        for (i, a) in vertices.iter().enumerate() {
            for b in &vertices[i + 1..] {
                diameter = diameter.max((a - b).norm());
            }
        }
        Polytope { dim, vertices, normals, offsets, incidence, diameter }
    }

    /// Convex hull of a point cloud. Non-extreme points are discarded.
    pub fn from_vertices(points: &[Vector]) -> Result<Self> {
        let n = check_dims(points)?;
        let scale = scale_of(points);
        let eps = 1e-10 * scale;
        let pts = dedupe(points, eps);
        if pts.len() < n + 1 || affine_rank(&pts, 1e-9 * scale) < n {
            return Err(Error::DegenerateBody(format!(
                "points do not span a {n}-dimensional body"
            )));
        }
        if n == 2 {
            return Self::polygon_from_points(&pts, eps);
        }
        if binomial(pts.len(), n) > MAX_COMBINATIONS {
            return Err(Error::Unsupported(format!(
                "facet enumeration of {} points in dimension {n} is too large",
                pts.len()
            )));
        }
        let mut normals: Vec<Vector> = Vec::new();
        let mut offsets: Vec<f64> = Vec::new();
        for_each_combination(pts.len(), n, |idx| {
            let base = &pts[idx[0]];
            let rows = Matrix::from_fn(n - 1, n, |i, j| pts[idx[i + 1]][j] - base[j]);
            let Some(normal) = null_vector(&rows, 1e-9 * scale) else {
                return;
            };
            let b = normal.dot(base);
            let (mut above, mut below) = (false, false);
            for p in &pts {
                let s = normal.dot(p) - b;
                if s > eps {
                    above = true;
                } else if s < -eps {
                    below = true;
                }
                if above && below {
                    return;
                }
            }
            let (a, off) = if above { (-normal, -b) } else { (normal, b) };
            let dup = normals
                .iter()
                .zip(&offsets)
                .any(|(m, o)| (m - &a).amax() < 1e-9 && (o - off).abs() < eps * 10.0);
            if !dup {
                normals.push(a);
                offsets.push(off);
            }
        });
        Self::assemble(n, pts, normals, offsets, eps)
    }

    /// Bounded intersection of half-spaces `⟨a_i, x⟩ ≤ b_i`. Normals are normalized;
    /// redundant half-spaces are discarded.
    pub fn from_halfspaces(normals: &[Vector], offsets: &[f64]) -> Result<Self> {
        if normals.len() != offsets.len() {
            return Err(Error::InvalidBody(
                "normals and offsets differ in length".into(),
            ));
        }
        let n = check_dims(normals)?;
        let mut a_list = Vec::with_capacity(normals.len());
        let mut b_list = Vec::with_capacity(normals.len());
        for (a, b) in normals.iter().zip(offsets) {
            let norm = a.norm();
            if norm <= 1e-300 || !b.is_finite() {
                return Err(Error::InvalidBody("zero normal or non-finite offset".into()));
            }
            a_list.push(a / norm);
            b_list.push(b / norm);
        }
        // Boundedness: the normals must positively span R^n.
        let normal_hull = Polytope::from_vertices(&a_list).map_err(|_| {
            Error::DegenerateBody("half-spaces do not bound a region".into())
        })?;
        if normal_hull.offsets.iter().any(|b| *b <= 1e-12) {
            return Err(Error::DegenerateBody(
                "half-spaces do not bound a region".into(),
            ));
        }
        if binomial(a_list.len(), n) > MAX_COMBINATIONS {
            return Err(Error::Unsupported(format!(
                "vertex enumeration of {} facets in dimension {n} is too large",
                a_list.len()
            )));
        }
        let scale = b_list.iter().fold(0.0f64, |m, b| m.max(b.abs())).max(1e-300);
        let eps = 1e-10 * scale;
        let mut verts: Vec<Vector> = Vec::new();
        for_each_combination(a_list.len(), n, |idx| {
            let m = Matrix::from_fn(n, n, |i, j| a_list[idx[i]][j]);
            let rhs = Vector::from_fn(n, |i, _| b_list[idx[i]]);
            let lu = m.lu();
            if lu.determinant().abs() < 1e-12 {
                return;
            }
            let Some(x) = lu.solve(&rhs) else { return };
            if a_list
                .iter()
                .zip(&b_list)
                .all(|(a, b)| a.dot(&x) <= b + eps * 10.0)
                && !verts.iter().any(|v| (v - &x).amax() <= eps * 100.0)
            {
                verts.push(x);
            }
        });
        if verts.len() < n + 1 || affine_rank(&verts, 1e-9 * scale_of(&verts)) < n {
            return Err(Error::DegenerateBody(
                "half-space intersection is empty or lower dimensional".into(),
            ));
        }
        if n == 2 {
            return Self::polygon_from_points(&verts, eps);
        }
        Self::assemble(n, verts, a_list, b_list, eps * 100.0)
    }

    fn polygon_from_points(pts: &[Vector], eps: f64) -> Result<Self> {
        let planar: Vec<Vector2<f64>> = pts.iter().map(|p| Vector2::new(p[0], p[1])).collect();
        let hull = convex_hull_2d(&planar, eps);
        if hull.len() < 3 {
            return Err(Error::DegenerateBody("polygon has fewer than 3 vertices".into()));
        }
        let m = hull.len();
        let mut normals = Vec::with_capacity(m);
        let mut offsets = Vec::with_capacity(m);
        let mut incidence = Vec::with_capacity(m);
        for i in 0..m {
            let e = hull[(i + 1) % m] - hull[i];
            let nrm = Vector2::new(e.y, -e.x).normalize();
            normals.push(Vector::from_vec(vec![nrm.x, nrm.y]));
            offsets.push(nrm.dot(&hull[i]));
            incidence.push(vec![i, (i + 1) % m]);
        }
        let vertices = hull.iter().map(|v| Vector::from_vec(vec![v.x, v.y])).collect();
        Ok(Polytope::from_parts(2, vertices, normals, offsets, incidence))
    }

    fn assemble(
        n: usize,
        pts: Vec<Vector>,
        normals: Vec<Vector>,
        offsets: Vec<f64>,
        eps: f64,
    ) -> Result<Self> {
        let tol = eps * 10.0;
        let raw_incidence: Vec<Vec<usize>> = normals
            .iter()
            .zip(&offsets)
            .map(|(a, b)| {
                (0..pts.len())
                    .filter(|&j| (a.dot(&pts[j]) - b).abs() <= tol)
                    .collect()
            })
            .collect();
        let keep_facet: Vec<bool> = raw_incidence.iter().map(|inc| inc.len() >= n).collect();
        let mut degree = vec![0usize; pts.len()];
        for (inc, keep) in raw_incidence.iter().zip(&keep_facet) {
            if *keep {
                for &j in inc {
                    degree[j] += 1;
                }
            }
        }
        let mut remap = vec![usize::MAX; pts.len()];
        let mut vertices = Vec::new();
        for (j, p) in pts.into_iter().enumerate() {
            if degree[j] >= n {
                remap[j] = vertices.len();
                vertices.push(p);
            }
        }
        let mut out_normals = Vec::new();
        let mut out_offsets = Vec::new();
        let mut incidence = Vec::new();
        for (i, inc) in raw_incidence.into_iter().enumerate() {
            if !keep_facet[i] {
                continue;
            }
            let mapped: Vec<usize> = inc
                .into_iter()
                .filter(|&j| remap[j] != usize::MAX)
                .map(|j| remap[j])
                .collect();
            if mapped.len() >= n {
                out_normals.push(normals[i].clone());
                out_offsets.push(offsets[i]);
                incidence.push(mapped);
            }
        }
        if out_normals.len() < n + 1 {
            return Err(Error::DegenerateBody("too few facets".into()));
        }
        Ok(Polytope::from_parts(n, vertices, out_normals, out_offsets, incidence))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn normals(&self) -> &[Vector] {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// Vertex indices incident to each facet.
    pub fn incidence(&self) -> &[Vec<usize>] {
        &self.incidence
    }

    /// Polygon vertices in counter-clockwise order (dimension 2 only).
    pub fn polygon(&self) -> Vec<Vector2<f64>> {
        debug_assert_eq!(self.dim, 2);
        self.vertices.iter().map(|v| Vector2::new(v[0], v[1])).collect()
    }

    pub fn vertex_mean(&self) -> Vector {
        self.vertices
            .iter()
            .fold(Vector::zeros(self.dim), |acc, v| acc + v)
            / self.vertices.len() as f64
    }

    pub fn support(&self, u: &Vector) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest facet offset; positive iff the origin is interior.
    pub fn min_offset(&self) -> f64 {
        self.offsets.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn origin_interior(&self) -> bool {
        self.min_offset() > 1e-12 * self.diameter()
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Radial function about the origin; requires the origin to be interior.
    pub fn radial(&self, u: &Vector) -> f64 {
        self.normals
            .iter()
            .zip(&self.offsets)
            .filter_map(|(a, b)| {
                let s = a.dot(u);
                (s > 0.0).then(|| b / s)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Range of `λ` with `x + λ d` inside the polytope.
    pub fn chord(&self, x: &Vector, d: &Vector) -> (f64, f64) {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (a, b) in self.normals.iter().zip(&self.offsets) {
            let s = a.dot(d);
            let slack = b - a.dot(x);
            if s > 1e-300 {
                hi = hi.min(slack / s);
            } else if s < -1e-300 {
                lo = lo.max(slack / s);
            }
        }
        (lo, hi)
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(a, b)| a.dot(x) <= b + tol)
    }

    pub fn translate(&self, t: &Vector) -> Self {
        Polytope {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v + t).collect(),
            normals: self.normals.clone(),
            offsets: self
                .normals
                .iter()
                .zip(&self.offsets)
                .map(|(a, b)| b + a.dot(t))
                .collect(),
            incidence: self.incidence.clone(),
            diameter: self.diameter,
        }
    }

    /// Image under `x ↦ T x + t`.
    pub fn affine_image(&self, t_mat: &Matrix, t: &Vector) -> Result<Self> {
        let inv_t = t_mat
            .clone()
            .try_inverse()
            .ok_or(Error::SingularMap(0.0))?
            .transpose();
        let vertices: Vec<Vector> = self.vertices.iter().map(|v| t_mat * v + t).collect();
        let mut normals = Vec::with_capacity(self.normals.len());
        let mut offsets = Vec::with_capacity(self.normals.len());
        for (a, b) in self.normals.iter().zip(&self.offsets) {
            let a2 = &inv_t * a;
            let norm = a2.norm();
            offsets.push((b + a2.dot(t)) / norm);
            normals.push(a2 / norm);
        }
        if self.dim == 2 {
            return Polytope::from_vertices(&vertices);
        }
        Ok(Polytope::from_parts(self.dim, vertices, normals, offsets, self.incidence.clone()))
    }

    /// Polar body about the origin.
    pub fn polar(&self) -> Result<Self> {
        if !self.origin_interior() {
            return Err(Error::OriginNotInterior);
        }
        let vertices: Vec<Vector> = self
            .normals
            .iter()
            .zip(&self.offsets)
            .map(|(a, b)| a / *b)
            .collect();
        if self.dim == 2 {
            return Polytope::from_vertices(&vertices);
        }
        let normals: Vec<Vector> = self.vertices.iter().map(|v| v / v.norm()).collect();
        let offsets: Vec<f64> = self.vertices.iter().map(|v| 1.0 / v.norm()).collect();
        let mut incidence = vec![Vec::new(); self.vertices.len()];
        for (f, inc) in self.incidence.iter().enumerate() {
            for &v in inc {
                incidence[v].push(f);
            }
        }
        Ok(Polytope::from_parts(self.dim, vertices, normals, offsets, incidence))
    }

    /// Half-widths and center when every facet normal is a signed coordinate axis.
    pub fn as_box(&self) -> Option<(Vector, Vector)> {
        let n = self.dim;
        if self.normals.len() != 2 * n {
            return None;
        }
        let mut upper = vec![None; n];
        let mut lower = vec![None; n];
        for (a, b) in self.normals.iter().zip(&self.offsets) {
            let (idx, val) = a.iter().enumerate().max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))?;
            if (val.abs() - 1.0).abs() > 1e-12 {
                return None;
            }
            if *val > 0.0 {
                upper[idx] = Some(*b);
            } else {
                lower[idx] = Some(-*b);
            }
        }
        let mut center = Vector::zeros(n);
        let mut half = Vector::zeros(n);
        for i in 0..n {
            let (hi, lo) = (upper[i]?, lower[i]?);
            center[i] = 0.5 * (hi + lo);
            half[i] = 0.5 * (hi - lo);
        }
        Some((center, half))
    }

    /// Center and semi-axes when the polytope is `conv{c ± s_i e_i}`.
    pub fn as_cross_polytope(&self) -> Option<(Vector, Vector)> {
        let n = self.dim;
        if self.vertices.len() != 2 * n {
            return None;
        }
        let c = self.vertex_mean();
        let mut axes = vec![None; n];
        for v in &self.vertices {
            let d = v - &c;
            let (idx, val) = d.iter().enumerate().max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))?;
            let off_axis = d.iter().enumerate().filter(|(j, _)| *j != idx).map(|(_, x)| x.abs()).fold(0.0, f64::max);
            if off_axis > 1e-12 * val.abs() {
                return None;
            }
            match axes[idx] {
                None => axes[idx] = Some(val.abs()),
                Some(s) if (s - val.abs()).abs() <= 1e-12 * s => {}
                _ => return None,
            }
        }
        let s = Vector::from_iterator(n, axes.into_iter().map(|a| a.unwrap_or(0.0)));
        (s.min() > 0.0).then_some((c, s))
    }

    /// Simplicial decomposition (dimensions 2 and 3).
    pub fn simplices(&self) -> Vec<Vec<Vector>> {
        match self.dim {
            2 => {
                let v = &self.vertices;
                (1..v.len() - 1)
                    .map(|i| vec![v[0].clone(), v[i].clone(), v[i + 1].clone()])
                    .collect()
            }
            3 => {
                let q = self.vertex_mean();
                let mut out = Vec::new();
                for (f, inc) in self.incidence.iter().enumerate() {
                    let ring = self.facet_ring(f, inc);
                    for i in 1..ring.len() - 1 {
                        out.push(vec![
                            q.clone(),
                            self.vertices[ring[0]].clone(),
                            self.vertices[ring[i]].clone(),
                            self.vertices[ring[i + 1]].clone(),
                        ]);
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    }

    /// Vertices of a 3-D facet ordered cyclically within its plane.
    pub fn facet_ring(&self, facet: usize, inc: &[usize]) -> Vec<usize> {
        let a = &self.normals[facet];
        let center = inc
            .iter()
            .fold(Vector::zeros(3), |acc, &j| acc + &self.vertices[j])
            / inc.len() as f64;
        let e1 = {
            let d = &self.vertices[inc[0]] - &center;
            d.clone() / d.norm()
        };
        let e2 = {
            let c = nalgebra::Vector3::new(a[0], a[1], a[2])
                .cross(&nalgebra::Vector3::new(e1[0], e1[1], e1[2]));
            Vector::from_vec(vec![c.x, c.y, c.z])
        };
        let mut ring: Vec<(f64, usize)> = inc
            .iter()
            .map(|&j| {
                let d = &self.vertices[j] - &center;
                (d.dot(&e2).atan2(d.dot(&e1)), j)
            })
            .collect();
        ring.sort_by(|x, y| x.0.total_cmp(&y.0));
        ring.into_iter().map(|(_, j)| j).collect()
    }

    /// Volume, first moment and second moment about the origin, exact in
    /// dimensions 2 and 3 and for boxes and cross-polytopes.
    pub fn exact_moments(&self) -> Option<(f64, Vector, Matrix)> {
        let n = self.dim;
        if n <= 3 {
            let mut vol = 0.0;
            let mut first = Vector::zeros(n);
            let mut second = Matrix::zeros(n, n);
            for s in self.simplices() {
                let m = Matrix::from_fn(n, n, |i, j| s[j + 1][i] - s[0][i]);
                let v = m.determinant().abs() / factorial(n);
                let sum = s.iter().fold(Vector::zeros(n), |acc, p| acc + p);
                let outer = s.iter().fold(Matrix::zeros(n, n), |acc, p| acc + p * p.transpose());
                vol += v;
                first += &sum * (v / (n + 1) as f64);
                second += (outer + &sum * sum.transpose()) * (v / ((n + 1) * (n + 2)) as f64);
            }
            return Some((vol, first, second));
        }
        if let Some((c, half)) = self.as_box() {
            let vol: f64 = half.iter().map(|h| 2.0 * h).product();
            let cov = Matrix::from_diagonal(&half.map(|h| h * h / 3.0));
            return Some((vol, &c * vol, (cov + &c * c.transpose()) * vol));
        }
        if let Some((c, s)) = self.as_cross_polytope() {
            let vol: f64 = s.iter().map(|x| 2.0 * x).product::<f64>() / factorial(n);
            let k = 2.0 / ((n + 1) * (n + 2)) as f64;
            let cov = Matrix::from_diagonal(&s.map(|x| x * x * k));
            return Some((vol, &c * vol, (cov + &c * c.transpose()) * vol));
        }
        None
    }

    pub fn volume(&self) -> Estimate {
        if let Some((v, _, _)) = self.exact_moments() {
            return Estimate::exact(v);
        }
        self.radial_monte_carlo(MC_VOLUME_SAMPLES, MC_VOLUME_SEED).0
    }

    pub fn centroid(&self) -> (Vector, f64) {
        if let Some((v, first, _)) = self.exact_moments() {
            return (first / v, 0.0);
        }
        let (_, centroid, err) = self.radial_monte_carlo(MC_VOLUME_SAMPLES, MC_VOLUME_SEED);
        (centroid, err)
    }

    /// Volume and centroid from the radial function about the vertex mean:
    /// `|K| = |B| E[ρ^n]`, `∫x = q|K| + n|B| E[ρ^{n+1} u] / (n+1)`.
    pub fn radial_monte_carlo(&self, samples: usize, seed: u64) -> (Estimate, Vector, f64) {
        let n = self.dim;
        let q = self.vertex_mean();
        let shifted = self.translate(&(-&q));
        let mut rng = stream_rng(seed, 0);
        let ball = unit_ball_volume(n);
        let mut vol_terms = Vec::with_capacity(samples);
        let mut first = Vector::zeros(n);
        for _ in 0..samples {
            let u = random_direction(&mut rng, n);
            let rho = shifted.radial(&u);
            let rn = rho.powi(n as i32);
            vol_terms.push(ball * rn);
            first += &u * (rn * rho);
        }
        let mean = vol_terms.iter().sum::<f64>() / samples as f64;
        let var = vol_terms.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
        let first = first * (n as f64 * ball / ((n + 1) as f64 * samples as f64));
        let centroid = &q + first / mean;
        let err = (var / samples as f64).sqrt();
        (
            Estimate { value: mean, std_error: err },
            centroid,
            err / mean * self.diameter(),
        )
    }

    /// Facet areas (dimension 3) or edge lengths (dimension 2).
    pub fn facet_measures(&self) -> Vec<f64> {
        match self.dim {
            2 => (0..self.vertices.len())
                .map(|i| (&self.vertices[(i + 1) % self.vertices.len()] - &self.vertices[i]).norm())
                .collect(),
            3 => self
                .incidence
                .iter()
                .enumerate()
                .map(|(f, inc)| {
                    let ring = self.facet_ring(f, inc);
                    let p0 = to3(&self.vertices[ring[0]]);
                    (1..ring.len() - 1)
                        .map(|i| {
                            let a = to3(&self.vertices[ring[i]]) - p0;
                            let b = to3(&self.vertices[ring[i + 1]]) - p0;
                            0.5 * a.cross(&b).norm()
                        })
                        .sum()
                })
                .collect(),
            _ => Vec::new(),
        }
    }
}

fn to3(v: &Vector) -> nalgebra::Vector3<f64> {
    nalgebra::Vector3::new(v[0], v[1], v[2])
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn check_dims(points: &[Vector]) -> Result<usize> {
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidBody("empty point list".into()))?;
    let n = first.len();
    if n < 2 {
        return Err(Error::InvalidBody("dimension must be at least 2".into()));
    }
    for p in points {
        if p.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p.len() });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidBody("non-finite coordinate".into()));
        }
    }
    Ok(n)
}

/// Unit vector spanning the null space of a `(n-1) × n` matrix of full row rank.
fn null_vector(rows: &Matrix, eps: f64) -> Option<Vector> {
    let n = rows.ncols();
    if n == 3 {
        let a = nalgebra::Vector3::new(rows[(0, 0)], rows[(0, 1)], rows[(0, 2)]);
        let b = nalgebra::Vector3::new(rows[(1, 0)], rows[(1, 1)], rows[(1, 2)]);
        let c = a.cross(&b);
        let norm = c.norm();
        if norm <= eps * a.norm().max(b.norm()) {
            return None;
        }
        return Some(Vector::from_vec(vec![c.x / norm, c.y / norm, c.z / norm]));
    }
    // Pad to a square matrix so the SVD exposes the full right singular basis.
    let mut square = Matrix::zeros(n, n);
    square.view_mut((0, 0), (n - 1, n)).copy_from(rows);
    let svd = square.svd(false, true);
    let vt = svd.v_t?;
    let sv = &svd.singular_values;
    let (min_idx, _) = sv.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1))?;
    let mut sorted: Vec<f64> = sv.iter().copied().collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    if sorted[n - 2] <= eps {
        return None;
    }
    let v = vt.row(min_idx).transpose();
    Some(Vector::from_iterator(n, v.iter().copied()))
}
