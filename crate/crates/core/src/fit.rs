//! Löwner and John ellipsoids, isotropic position and the isotropic constant, and the
//! planar Santaló point.

use crate::error::{Error, Result};
use crate::geometry::{AffineMap, ConvexBody, Ellipsoid, Polytope};
use crate::sampling::{hit_and_run_streams, CHAINS, DEFAULT_BURN_IN};
use crate::util::{from2, unit2, Matrix, Vector};
use serde::Serialize;
use std::f64::consts::PI;

pub const DEFAULT_TOL: f64 = 1e-7;
pub const MAX_ITERATIONS: usize = 100_000;
/// Support-function grid used for containment checks of non-polytopal planar bodies.
const SUPPORT_GRID: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    John,
    Loewner,
}

#[derive(Clone, Debug, Serialize)]
pub struct EllipsoidFit {
    pub ellipsoid: Ellipsoid,
    pub kind: FitKind,
    /// Smallest `λ` with `inner ⊆ c + λ(outer − c)`, `c` the ellipsoid center: for the Löwner
    /// ellipsoid `E ⊆ c + λ(K − c)`, for the John ellipsoid `K ⊆ c + λ(E − c)`.
    pub containment_ratio: f64,
    pub iterations: usize,
    /// Optimality gap at termination: `max_i M_i/(n+1) − 1` for Löwner, `m·μ` for John.
    pub duality_gap: f64,
}

/// Minimum-volume ellipsoid containing `points` (Khachiyan's iteration with away steps
/// on the lifted points `(p, 1)`), scaled so that every point is covered.
pub fn loewner_of_points(points: &[Vector], tol: f64) -> Result<(Ellipsoid, usize, f64)> {
    let m = points.len();
    let n = points.first().map(|p| p.len()).unwrap_or(0);
    if m < n + 1 || n == 0 {
        return Err(Error::DegenerateBody("too few points for an enclosing ellipsoid".into()));
    }
    let d1 = (n + 1) as f64;
    let lifted: Vec<Vector> = points.iter().map(|p| p.clone().push(1.0)).collect();
    let mut u = vec![1.0 / m as f64; m];
    let mut iterations = 0;
    let mut gap;
    loop {
        let mut x = Matrix::zeros(n + 1, n + 1);
        for (q, w) in lifted.iter().zip(&u) {
            x.ger(*w, q, q, 1.0);
        }
        let chol = x
            .cholesky()
            .ok_or_else(|| Error::DegenerateBody("points lie in a hyperplane".into()))?;
        let mvals: Vec<f64> = lifted.iter().map(|q| q.dot(&chol.solve(q))).collect();
        let (j, mj) = mvals.iter().enumerate().fold((0, f64::NEG_INFINITY), |a, (i, &v)| if v > a.1 { (i, v) } else { a });
        let (k, mk) = mvals
            .iter()
            .enumerate()
            .filter(|(i, _)| u[*i] > 0.0)
            .fold((0, f64::INFINITY), |a, (i, &v)| if v < a.1 { (i, v) } else { a });
        gap = mj / d1 - 1.0;
        if (gap <= tol && mk >= d1 * (1.0 - tol)) || iterations >= MAX_ITERATIONS {
            break;
        }
        iterations += 1;
        if mj - d1 >= d1 - mk {
            let step = (mj - d1) / (d1 * (mj - 1.0));
            u.iter_mut().for_each(|w| *w *= 1.0 - step);
            u[j] += step;
        } else {
            let step = ((d1 - mk) / (d1 * (mk - 1.0))).min(u[k] / (1.0 - u[k]));
            u.iter_mut().for_each(|w| *w *= 1.0 + step);
            u[k] -= step;
            if u[k] < 1e-300 {
                u[k] = 0.0;
            }
        }
    }
    if gap > tol {
        return Err(Error::NotConverged(format!("Khachiyan iteration stopped with gap {gap:e}")));
    }
    let mut center = Vector::zeros(n);
    let mut second = Matrix::zeros(n, n);
    for (p, w) in points.iter().zip(&u) {
        center += p * *w;
        second.ger(*w, p, p, 1.0);
    }
    second.ger(-1.0, &center, &center, 1.0);
    let shape_inv = second * n as f64;
    let shape = shape_inv
        .try_inverse()
        .ok_or_else(|| Error::DegenerateBody("singular scatter matrix".into()))?;
    let worst = points
        .iter()
        .map(|p| {
            let d = p - &center;
            d.dot(&(&shape * &d))
        })
        .fold(0.0, f64::max);
    let shape = if worst > 1.0 { shape / worst } else { shape };
    Ok((Ellipsoid::new(center, crate::geometry::ellipsoid::symmetrize(shape))?, iterations, gap))
}

/// Points whose convex hull is the body (vertices), or a dense boundary sample for
/// non-polytopal planar bodies.
fn hull_points(body: &ConvexBody) -> Result<Vec<Vector>> {
    if let Some(p) = body.polytope() {
        return Ok(p.vertices().to_vec());
    }
    if body.dim() == 2 {
        return Ok(match body {
            ConvexBody::Support2D(s) => (0..s.grid()).map(|j| from2(s.node_point(j))).collect(),
            _ => (0..SUPPORT_GRID)
                .map(|j| {
                    let u = from2(unit2(2.0 * PI * j as f64 / SUPPORT_GRID as f64));
                    &u * body.radial(&u).unwrap_or(0.0)
                })
                .collect(),
        });
    }
    Err(Error::Unsupported(format!("enclosing ellipsoid of {}", body.kind())))
}

/// Largest ratio `h_{A−c}(u) / h_{B−c}(u)`: the factor by which `B` must be dilated about
/// `c` to contain `A`. Exact over facets when `B` is a polytope, otherwise on a direction grid.
fn dilation_needed(inner: &ConvexBody, outer: &ConvexBody, c: &Vector) -> f64 {
    let ratio = |u: &Vector| (inner.support(u) - c.dot(u)) / (outer.support(u) - c.dot(u));
    if let Some(p) = outer.polytope() {
        if inner.polytope().is_none() {
            return p.normals().iter().map(ratio).fold(0.0, f64::max);
        }
    }
    if let Some(p) = inner.polytope() {
        // vertices of the inner body against the gauge of the outer one
        return p
            .vertices()
            .iter()
            .map(|v| {
                let d = v - c;
                let r = d.norm();
                if r == 0.0 {
                    return 0.0;
                }
                let shifted = outer.translate(&(-c));
                r / shifted.radial(&(&d / r)).unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max);
    }
    if inner.dim() == 2 {
        return (0..SUPPORT_GRID)
            .map(|j| ratio(&from2(unit2(2.0 * PI * j as f64 / SUPPORT_GRID as f64))))
            .fold(0.0, f64::max);
    }
    f64::NAN
}

/// Löwner ellipsoid of a polytope (exact vertex set) or planar body (boundary sample,
/// then dilated so that the body is covered on the support grid).
pub fn loewner_ellipsoid(body: &ConvexBody, tol: f64) -> Result<EllipsoidFit> {
    if let Some(e) = body.as_ellipsoid() {
        return Ok(EllipsoidFit { ellipsoid: e, kind: FitKind::Loewner, containment_ratio: 1.0, iterations: 0, duality_gap: 0.0 });
    }
    let points = hull_points(body)?;
    let (mut e, iterations, gap) = loewner_of_points(&points, tol)?;
    let as_body = ConvexBody::Ellipsoid(e.clone());
    if !body.is_polytope() {
        let cover = dilation_needed(body, &as_body, e.center());
        if cover > 1.0 {
            e = e.translate(&(-e.center())).scale(cover).translate(e.center());
        }
    }
    let containment_ratio = dilation_needed(&ConvexBody::Ellipsoid(e.clone()), body, e.center());
    Ok(EllipsoidFit { ellipsoid: e, kind: FitKind::Loewner, containment_ratio, iterations, duality_gap: gap })
}

/// Inscribed ellipsoid `{B v + d : |v| ≤ 1}` of maximal volume in `{x : ⟨a_i, x⟩ ≤ b_i}`,
/// by Newton's method on `−log det B − μ Σ log(b_i − ⟨a_i, d⟩ − |B a_i|)` along `μ → 0`.
struct JohnProblem<'a> {
    normals: &'a [Vector],
    offsets: &'a [f64],
    n: usize,
}

impl JohnProblem<'_> {
    fn params(&self) -> usize {
        self.n * (self.n + 1) / 2 + self.n
    }

    /// Symmetric basis element `k` of the matrix part, as index pairs.
    fn pair(&self, k: usize) -> (usize, usize) {
        let mut k = k;
        for i in 0..self.n {
            if k < self.n - i {
                return (i, i + k);
            }
            k -= self.n - i;
        }
        unreachable!()
    }

    fn unpack(&self, x: &Vector) -> (Matrix, Vector) {
        let n = self.n;
        let mut b = Matrix::zeros(n, n);
        let nb = n * (n + 1) / 2;
        for k in 0..nb {
            let (i, j) = self.pair(k);
            b[(i, j)] = x[k];
            b[(j, i)] = x[k];
        }
        (b, x.rows(nb, n).into_owned())
    }

    fn pack(&self, b: &Matrix, d: &Vector) -> Vector {
        let nb = self.n * (self.n + 1) / 2;
        let mut x = Vector::zeros(self.params());
        for k in 0..nb {
            let (i, j) = self.pair(k);
            x[k] = b[(i, j)];
        }
        x.rows_mut(nb, self.n).copy_from(d);
        x
    }

    /// Objective, or `None` outside the domain.
    fn value(&self, x: &Vector, mu: f64) -> Option<f64> {
        let (b, d) = self.unpack(x);
        let chol = b.clone().cholesky()?;
        let logdet = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        let mut barrier = 0.0;
        for (a, off) in self.normals.iter().zip(self.offsets) {
            let s = off - a.dot(&d) - (&b * a).norm();
            if !(s > 0.0) {
                return None;
            }
            barrier += s.ln();
        }
        Some(-logdet - mu * barrier)
    }

    fn gradient_hessian(&self, x: &Vector, mu: f64) -> (Vector, Matrix) {
        let n = self.n;
        let nb = n * (n + 1) / 2;
        let np = self.params();
        let (b, d) = self.unpack(x);
        let binv = b.clone().try_inverse().unwrap_or_else(|| Matrix::identity(n, n));
        let basis: Vec<Matrix> = (0..nb)
            .map(|k| {
                let (i, j) = self.pair(k);
                let mut e = Matrix::zeros(n, n);
                e[(i, j)] = 1.0;
                e[(j, i)] = 1.0;
                e
            })
            .collect();
        let mut grad = Vector::zeros(np);
        let mut hess = Matrix::zeros(np, np);
        let products: Vec<Matrix> = basis.iter().map(|e| &binv * e).collect();
        for k in 0..nb {
            grad[k] = -products[k].trace();
            for l in 0..nb {
                hess[(k, l)] = (&products[k] * &products[l]).trace();
            }
        }
        for (a, off) in self.normals.iter().zip(self.offsets) {
            let v = &b * a;
            let w = v.norm();
            let s = off - a.dot(&d) - w;
            let vhat = &v / w;
            let mut g = Vector::zeros(np);
            let mut z = Matrix::zeros(n, np);
            for k in 0..nb {
                let col = &basis[k] * a;
                g[k] = vhat.dot(&col);
                z.set_column(k, &col);
            }
            for i in 0..n {
                g[nb + i] = a[i];
            }
            grad += &g * (mu / s);
            hess.ger(mu / (s * s), &g, &g, 1.0);
            let proj = Matrix::identity(n, n) - &vhat * vhat.transpose();
            hess += z.transpose() * proj * &z * (mu / (w * s));
        }
        (grad, hess)
    }

    fn newton(&self, x: &mut Vector, mu: f64) -> Result<usize> {
        let mut steps = 0;
        let mut f = self.value(x, mu).ok_or_else(|| Error::NotConverged("left the feasible region".into()))?;
        for _ in 0..200 {
            let (g, h) = self.gradient_hessian(x, mu);
            let Some(dir) = h.clone().cholesky().map(|c| -c.solve(&g)) else {
                return Err(Error::NotConverged("barrier Hessian is not positive definite".into()));
            };
            let decrement = -g.dot(&dir);
            if decrement < 1e-14 {
                break;
            }
            let mut t = 1.0;
            loop {
                let trial = &*x + &dir * t;
                if let Some(ft) = self.value(&trial, mu) {
                    if ft <= f - 0.25 * t * decrement {
                        *x = trial;
                        f = ft;
                        break;
                    }
                }
                t *= 0.5;
                if t < 1e-20 {
                    return Ok(steps);
                }
            }
            steps += 1;
        }
        Ok(steps)
    }
}

/// John ellipsoid of a polytope; ellipsoids are their own John ellipsoid, and other planar
/// bodies use the circumscribed polygon of their support grid, shrunk to fit.
pub fn john_ellipsoid(body: &ConvexBody, tol: f64) -> Result<EllipsoidFit> {
    if let Some(e) = body.as_ellipsoid() {
        return Ok(EllipsoidFit { ellipsoid: e, kind: FitKind::John, containment_ratio: 1.0, iterations: 0, duality_gap: 0.0 });
    }
    let owned;
    let poly: &Polytope = match body.polytope() {
        Some(p) => p,
        None if body.dim() == 2 => {
            let h = body.support_samples(SUPPORT_GRID / 4);
            let normals: Vec<Vector> =
                (0..h.len()).map(|j| from2(unit2(2.0 * PI * j as f64 / h.len() as f64))).collect();
            owned = Polytope::from_halfspaces(&normals, &h)?;
            &owned
        }
        None => return Err(Error::Unsupported(format!("inscribed ellipsoid of {}", body.kind()))),
    };
    let n = poly.dim();
    let start = poly.vertex_mean();
    let slack = poly
        .normals()
        .iter()
        .zip(poly.offsets())
        .map(|(a, b)| (b - a.dot(&start)) / a.norm())
        .fold(f64::INFINITY, f64::min);
    if !(slack > 0.0) {
        return Err(Error::DegenerateBody("polytope has empty interior".into()));
    }
    let problem = JohnProblem { normals: poly.normals(), offsets: poly.offsets(), n };
    let mut x = problem.pack(&(Matrix::identity(n, n) * (0.5 * slack)), &start);
    let m = poly.normals().len() as f64;
    let mut mu = 1.0;
    let target = (tol * 1e-2 / m).max(1e-14);
    let mut iterations = 0;
    loop {
        iterations += problem.newton(&mut x, mu)?;
        if mu <= target {
            break;
        }
        mu = (mu * 0.1).max(target);
    }
    let (b, d) = problem.unpack(&x);
    let b2 = &b * &b;
    let shape = b2
        .try_inverse()
        .ok_or_else(|| Error::DegenerateBody("inscribed ellipsoid collapsed".into()))?;
    let mut e = Ellipsoid::new(d, crate::geometry::ellipsoid::symmetrize(shape))?;
    if !body.is_polytope() {
        let excess = dilation_needed(&ConvexBody::Ellipsoid(e.clone()), body, e.center());
        if excess > 1.0 {
            e = e.translate(&(-e.center())).scale(1.0 / excess).translate(e.center());
        }
    }
    let containment_ratio = dilation_needed(body, &ConvexBody::Ellipsoid(e.clone()), e.center());
    Ok(EllipsoidFit { ellipsoid: e, kind: FitKind::John, containment_ratio, iterations, duality_gap: m * mu })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentMethod {
    /// Exact moments when available, hit-and-run otherwise.
    Auto,
    Exact,
    Sampling,
}

/// Affine map to isotropic position with the isotropic constant
/// `L_K = |K|^{−1/n} det(Cov K)^{1/(2n)}`.
#[derive(Clone, Debug, Serialize)]
pub struct IsotropicCertificate {
    pub map: AffineMap,
    pub l_k: f64,
    pub l_k_std_error: f64,
    /// `max |Cov(TK) − L_K² Id| / L_K²`, from exact moments of the image or an independent sample.
    pub covariance_residual: f64,
    pub residual_tolerance: f64,
    pub image_volume: f64,
    pub method: MomentMethod,
    pub samples: usize,
}

impl IsotropicCertificate {
    pub fn verify(&self) -> Result<()> {
        if !(self.l_k > 0.0) {
            return Err(Error::NotIsotropic(format!("L_K = {}", self.l_k)));
        }
        if !(self.covariance_residual <= self.residual_tolerance) {
            return Err(Error::NotIsotropic(format!(
                "covariance residual {:e} exceeds {:e}",
                self.covariance_residual, self.residual_tolerance
            )));
        }
        if !((self.image_volume - 1.0).abs() <= self.residual_tolerance.max(1e-9)) {
            return Err(Error::NotIsotropic(format!("image volume {}", self.image_volume)));
        }
        Ok(())
    }
}

/// A body in isotropic position with its certificate.
#[derive(Clone, Debug)]
pub struct IsotropicBody {
    pub body: ConvexBody,
    pub certificate: IsotropicCertificate,
}

const EXACT_TOLERANCE: f64 = 1e-9;

fn covariance_of(points: &[Vector], mean: &Vector) -> Matrix {
    let n = mean.len();
    let mut c = Matrix::zeros(n, n);
    for p in points {
        let d = p - mean;
        c.ger(1.0, &d, &d, 1.0);
    }
    c / points.len() as f64
}

fn mean_of(points: &[Vector]) -> Vector {
    let n = points[0].len();
    points.iter().fold(Vector::zeros(n), |acc, p| acc + p) / points.len() as f64
}

fn isotropic_constant(volume: f64, cov: &Matrix) -> f64 {
    let n = cov.nrows() as f64;
    volume.powf(-1.0 / n) * cov.determinant().powf(1.0 / (2.0 * n))
}

/// `Cov^{−1/2}` via the symmetric eigendecomposition.
fn inverse_root(cov: &Matrix) -> Result<Matrix> {
    let eig = cov.clone().symmetric_eigen();
    let scale = eig.eigenvalues.amax();
    if eig.eigenvalues.iter().any(|&l| !(l > 1e-14 * scale)) {
        return Err(Error::SingularCovariance);
    }
    let d = Matrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

/// Map `x ↦ L_K Cov^{−1/2}(x − g)` with its certificate. `samples` and `seed` drive the
/// hit-and-run branch (50 steps per sample, 16 chains, batch-means error bars).
pub fn isotropic_position(body: &ConvexBody, method: MomentMethod, samples: usize, seed: u64) -> Result<IsotropicCertificate> {
    let n = body.dim();
    let exact = match method {
        MomentMethod::Sampling => None,
        _ => body.exact_moments(),
    };
    if method == MomentMethod::Exact && exact.is_none() {
        return Err(Error::Unsupported(format!("exact moments of {}", body.kind())));
    }
    if let Some((vol, first, second)) = exact {
        let g = &first / vol;
        let cov = &second / vol - &g * g.transpose();
        let l_k = isotropic_constant(vol, &cov);
        let t = inverse_root(&cov)? * l_k;
        let map = AffineMap::new(t.clone(), -(&t * &g))?;
        let image = body.apply_affine(&map)?;
        let (iv, ifirst, isecond) = image
            .exact_moments()
            .ok_or_else(|| Error::Unsupported("moments of the isotropic image".into()))?;
        let ig = &ifirst / iv;
        let icov = &isecond / iv - &ig * ig.transpose();
        let residual = (icov - Matrix::identity(n, n) * (l_k * l_k)).amax() / (l_k * l_k);
        return Ok(IsotropicCertificate {
            map,
            l_k,
            l_k_std_error: 0.0,
            covariance_residual: residual.max(ig.amax() / l_k),
            residual_tolerance: EXACT_TOLERANCE,
            image_volume: iv,
            method: MomentMethod::Exact,
            samples: 0,
        });
    }
    if samples < 2 * CHAINS * (n + 1) {
        return Err(Error::InvalidInput(format!("need at least {} samples", 2 * CHAINS * (n + 1))));
    }
    let volume = body.volume();
    let start = match body.polytope() {
        Some(p) => p.vertex_mean(),
        None => body.centroid(),
    };
    let shifted = body.translate(&(-&start));
    let points: Vec<Vector> = hit_and_run_streams(&shifted, samples, DEFAULT_BURN_IN, seed, 0)?;
    let g = mean_of(&points);
    let cov = covariance_of(&points, &g);
    let l_k = isotropic_constant(volume.value, &cov);
    let size = points.len() / CHAINS;
    let batch: Vec<f64> = (0..CHAINS)
        .map(|b| {
            let chunk = &points[b * size..(b + 1) * size];
            isotropic_constant(volume.value, &covariance_of(chunk, &mean_of(chunk)))
        })
        .collect();
    let bmean = batch.iter().sum::<f64>() / CHAINS as f64;
    let bvar = batch.iter().map(|v| (v - bmean).powi(2)).sum::<f64>() / (CHAINS - 1) as f64;
    let cov_se = (bvar / CHAINS as f64).sqrt();
    let vol_rel = volume.std_error / volume.value / n as f64;
    let l_k_std_error = ((cov_se / l_k).powi(2) + vol_rel.powi(2)).sqrt() * l_k;
    let t = inverse_root(&cov)? * l_k;
    let map = AffineMap::new(t.clone(), -(&t * (&g + &start)))?;
    // independent sample for the residual
    let check: Vec<Vector> = hit_and_run_streams(&shifted, samples, DEFAULT_BURN_IN, seed, CHAINS as u64)?
        .into_iter()
        .map(|p| &t * (p - &g))
        .collect();
    let cg = mean_of(&check);
    let ccov = covariance_of(&check, &cg);
    let l2 = l_k * l_k;
    let residual = (&ccov - Matrix::identity(n, n) * l2).amax() / l2;
    let mut worst_se: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let vals: Vec<f64> = check.iter().map(|x| (x[i] - cg[i]) * (x[j] - cg[j]) / l2).collect();
            worst_se = worst_se.max(crate::util::batch_means(&vals, CHAINS).1);
        }
    }
    Ok(IsotropicCertificate {
        map: map.clone(),
        l_k,
        l_k_std_error,
        covariance_residual: residual,
        residual_tolerance: 6.0 * worst_se + 1e-12,
        image_volume: t.determinant().abs() * volume.value,
        method: MomentMethod::Sampling,
        samples,
    })
}

/// The isotropic image of `body` together with its certificate.
pub fn isotropic_image(body: &ConvexBody, method: MomentMethod, samples: usize, seed: u64) -> Result<IsotropicBody> {
    let certificate = isotropic_position(body, method, samples, seed)?;
    let image = body.apply_affine(&certificate.map)?;
    Ok(IsotropicBody { body: image, certificate })
}

#[derive(Clone, Debug, Serialize)]
pub struct SantaloPoint {
    pub point: Vec<f64>,
    /// `|(K − s)°|` at the returned point.
    pub polar_volume: f64,
    /// Distance of the barycenter of `(K − s)°` from the origin.
    pub barycenter_residual: f64,
    pub iterations: usize,
}

/// Area and first moment of `(K − s)°` for planar bodies.
enum PolarOracle {
    Polygon { normals: Vec<Vector>, offsets: Vec<f64> },
    Support { h: Vec<f64> },
}

impl PolarOracle {
    fn new(body: &ConvexBody) -> Result<Self> {
        if body.dim() != 2 {
            return Err(Error::Unsupported("Santaló point search is planar".into()));
        }
        Ok(match body.polytope() {
            Some(p) => PolarOracle::Polygon { normals: p.normals().to_vec(), offsets: p.offsets().to_vec() },
            None => PolarOracle::Support { h: body.support_samples(SUPPORT_GRID) },
        })
    }

    /// `(area, first moment)` of `(K − s)°`, or `None` when `s` is not interior.
    fn moments(&self, s: &Vector) -> Option<(f64, Vector)> {
        match self {
            PolarOracle::Polygon { normals, offsets } => {
                let pts: Option<Vec<Vector>> = normals
                    .iter()
                    .zip(offsets)
                    .map(|(a, b)| {
                        let gap = b - a.dot(s);
                        (gap > 0.0).then(|| a / gap)
                    })
                    .collect();
                let pts = pts?;
                let (mut area, mut first) = (0.0, Vector::zeros(2));
                for i in 0..pts.len() {
                    let (p, q) = (&pts[i], &pts[(i + 1) % pts.len()]);
                    let cr = p[0] * q[1] - p[1] * q[0];
                    area += 0.5 * cr;
                    first += (p + q) * (cr / 6.0);
                }
                Some((area, first))
            }
            PolarOracle::Support { h } => {
                let m = h.len();
                let dt = 2.0 * PI / m as f64;
                let (mut area, mut first) = (0.0, Vector::zeros(2));
                for (j, hj) in h.iter().enumerate() {
                    let u = from2(unit2(j as f64 * dt));
                    let gap = hj - u.dot(s);
                    if !(gap > 0.0) {
                        return None;
                    }
                    let rho = 1.0 / gap;
                    area += 0.5 * rho * rho * dt;
                    first += u * (rho.powi(3) / 3.0 * dt);
                }
                Some((area, first))
            }
        }
    }
}

/// Planar Santaló point: minimizes `s ↦ |(K − s)°|` by compass search from the centroid,
/// then polishes with Newton steps on the gradient `3 ∫_{(K−s)°} x dx`.
pub fn santalo_point(body: &ConvexBody, tol: f64) -> Result<SantaloPoint> {
    if let Some(e) = body.as_ellipsoid() {
        let polar = ConvexBody::Ellipsoid(e.translate(&(-e.center())).polar()?);
        return Ok(SantaloPoint {
            point: e.center().iter().copied().collect(),
            polar_volume: polar.volume().value,
            barycenter_residual: 0.0,
            iterations: 0,
        });
    }
    let oracle = PolarOracle::new(body)?;
    let centroid = body.centroid();
    let scale = body.translate(&(-&centroid)).inner_radius();
    if !(scale > 0.0) {
        return Err(Error::DegenerateBody("centroid is not interior".into()));
    }
    let area = |s: &Vector| oracle.moments(s).map(|m| m.0).unwrap_or(f64::INFINITY);
    let mut s = centroid.clone();
    let mut best = area(&s);
    let mut step = 0.25 * scale;
    let dirs: Vec<Vector> = (0..8).map(|k| from2(unit2(PI / 4.0 * k as f64))).collect();
    let mut iterations = 0;
    while step > 1e-7 * scale && iterations < 100_000 {
        iterations += 1;
        let mut moved = false;
        for d in &dirs {
            let trial = &s + d * step;
            let v = area(&trial);
            if v < best {
                best = v;
                s = trial;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    let grad = |s: &Vector| oracle.moments(s).map(|m| m.1 * 3.0);
    for _ in 0..20 {
        let Some(g) = grad(&s) else { break };
        let eps = 1e-6 * scale;
        let mut jac = Matrix::zeros(2, 2);
        let mut ok = true;
        for k in 0..2 {
            let mut e = Vector::zeros(2);
            e[k] = eps;
            match (grad(&(&s + &e)), grad(&(&s - &e))) {
                (Some(a), Some(b)) => jac.set_column(k, &((a - b) / (2.0 * eps))),
                _ => ok = false,
            }
        }
        let Some(step) = (if ok { jac.try_inverse().map(|j| -(j * &g)) } else { None }) else { break };
        let trial = &s + &step;
        match grad(&trial) {
            Some(gt) if gt.norm() < g.norm() => {
                s = trial;
                iterations += 1;
            }
            _ => break,
        }
        if step.norm() < 1e-15 * scale {
            break;
        }
    }
    let (polar_volume, first) = oracle.moments(&s).ok_or_else(|| Error::NotConverged("left the body".into()))?;
    let barycenter_residual = (first / polar_volume).norm();
    if barycenter_residual > tol {
        return Err(Error::NotConverged(format!("polar barycenter at distance {barycenter_residual:e}")));
    }
    Ok(SantaloPoint { point: s.iter().copied().collect(), polar_volume, barycenter_residual, iterations })
}

/// `|K|·|K°|` with the polar taken about the origin.
pub fn volume_product(body: &ConvexBody) -> Result<f64> {
    if !(body.inner_radius() > 0.0) {
        return Err(Error::OriginNotInterior);
    }
    let polar_volume = match body.polar() {
        Ok(p) => p.volume().value,
        Err(Error::Unsupported(_)) if body.dim() == 2 => {
            PolarOracle::new(body)?.moments(&Vector::zeros(2)).ok_or(Error::OriginNotInterior)?.0
        }
        Err(e) => return Err(e),
    };
    Ok(body.volume().value * polar_volume)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::{stream_rng, unit_ball_volume};
    use rand::Rng;

    fn v(x: &[f64]) -> Vector {
        Vector::from_vec(x.to_vec())
    }

    #[test]
    fn loewner_of_square_is_circumscribed_disk() {
        let fit = loewner_ellipsoid(&ConvexBody::cube(2, 1.0).unwrap(), DEFAULT_TOL).unwrap();
        let axes = fit.ellipsoid.semi_axes();
        assert!((axes[0] - 2f64.sqrt()).abs() < 1e-6 && (axes[1] - 2f64.sqrt()).abs() < 1e-6);
        assert!(fit.ellipsoid.center().norm() < 1e-9);
        assert!((fit.containment_ratio - 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn loewner_of_triangle_is_circumcircle() {
        let tri: Vec<[f64; 2]> = (0..3).map(|k| {
            let t = 2.0 * PI * k as f64 / 3.0 + 0.3;
            [1.0 + t.cos(), -0.5 + t.sin()]
        }).collect();
        let fit = loewner_ellipsoid(&ConvexBody::polygon(&tri).unwrap(), DEFAULT_TOL).unwrap();
        let axes = fit.ellipsoid.semi_axes();
        assert!((axes[0] - 1.0).abs() < 1e-6 && (axes[1] - 1.0).abs() < 1e-6);
        assert!((fit.ellipsoid.center() - v(&[1.0, -0.5])).norm() < 1e-6);
        assert!((fit.containment_ratio - 2.0).abs() < 1e-5);
    }

    #[test]
    fn loewner_of_circle_points() {
        let pts: Vec<Vector> = (0..90).map(|k| from2(unit2(2.0 * PI * k as f64 / 90.0))).collect();
        let (e, _, gap) = loewner_of_points(&pts, DEFAULT_TOL).unwrap();
        assert!(gap <= DEFAULT_TOL);
        for a in e.semi_axes() {
            assert!((a - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn john_of_square_and_cross() {
        let fit = john_ellipsoid(&ConvexBody::cube(2, 1.0).unwrap(), DEFAULT_TOL).unwrap();
        for a in fit.ellipsoid.semi_axes() {
            assert!((a - 1.0).abs() < 1e-7, "{a}");
        }
        assert!((fit.containment_ratio - 2f64.sqrt()).abs() < 1e-6);
        let cross = john_ellipsoid(&ConvexBody::cross_polytope(2, 1.0).unwrap(), DEFAULT_TOL).unwrap();
        for a in cross.ellipsoid.semi_axes() {
            assert!((a - 0.5f64.sqrt()).abs() < 1e-7);
        }
    }

    #[test]
    fn john_of_fine_polygon_is_nearly_the_disk() {
        let normals: Vec<Vector> = (0..64).map(|k| from2(unit2(2.0 * PI * k as f64 / 64.0))).collect();
        let body = ConvexBody::hpolytope(&normals, &[1.0; 64]).unwrap();
        let fit = john_ellipsoid(&body, DEFAULT_TOL).unwrap();
        for a in fit.ellipsoid.semi_axes() {
            assert!((a - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn john_of_triangle_is_incircle() {
        let tri = ConvexBody::polygon(&[[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]]).unwrap();
        let fit = john_ellipsoid(&tri, DEFAULT_TOL).unwrap();
        // an affine image of the equilateral incircle: area ratio π/(3√3)
        let ratio = fit.ellipsoid.volume() / 6.0;
        assert!((ratio - PI / (3.0 * 3f64.sqrt())).abs() < 1e-7);
        assert!(fit.containment_ratio <= 2.0 + 1e-6);
    }

    #[test]
    fn john_and_loewner_are_polar_dual() {
        let mut rng = stream_rng(17, 0);
        let pts: Vec<[f64; 2]> = (0..9).map(|_| {
            let t: f64 = rng.gen_range(0.0..PI);
            let r: f64 = rng.gen_range(0.5..1.5);
            [r * t.cos(), r * t.sin()]
        }).collect();
        let mut all = pts.clone();
        all.extend(pts.iter().map(|p| [-p[0], -p[1]]));
        let body = ConvexBody::polygon(&all).unwrap();
        let john = john_ellipsoid(&body, DEFAULT_TOL).unwrap().ellipsoid;
        let dual = loewner_ellipsoid(&body.polar().unwrap(), DEFAULT_TOL).unwrap().ellipsoid.polar().unwrap();
        assert!((john.shape() - dual.shape()).amax() < 1e-5 * john.shape().amax());
    }

    #[test]
    fn isotropic_constants_exact() {
        for n in 2..=5 {
            let cert = isotropic_position(&ConvexBody::cube(n, 0.5).unwrap(), MomentMethod::Auto, 0, 0).unwrap();
            assert!((cert.l_k - 1.0 / 12f64.sqrt()).abs() < 1e-12);
            assert!((cert.map.matrix() - Matrix::identity(n, n)).amax() < 1e-12);
            cert.verify().unwrap();
        }
        let disk = ConvexBody::ball(Vector::zeros(2), 1.0 / PI.sqrt()).unwrap();
        let cert = isotropic_position(&disk, MomentMethod::Auto, 0, 0).unwrap();
        assert!((cert.l_k - 1.0 / (2.0 * PI.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn isotropic_constant_is_affine_invariant_exactly() {
        let tri = ConvexBody::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let base = isotropic_position(&tri, MomentMethod::Auto, 0, 0).unwrap().l_k;
        let mut rng = stream_rng(3, 0);
        for _ in 0..5 {
            let map = AffineMap::random_linear(&mut rng, 2, 2.0).compose(&AffineMap::translation_by(v(&[0.3, -0.2])));
            let l = isotropic_position(&tri.apply_affine(&map).unwrap(), MomentMethod::Auto, 0, 0).unwrap().l_k;
            assert!((l - base).abs() < 1e-12);
        }
    }

    #[test]
    fn isotropic_constant_by_sampling() {
        let cube = ConvexBody::cube(3, 0.5).unwrap();
        let cert = isotropic_position(&cube, MomentMethod::Sampling, 20000, 11).unwrap();
        assert!((cert.l_k - 1.0 / 12f64.sqrt()).abs() < 3.0 * cert.l_k_std_error, "{} ± {}", cert.l_k, cert.l_k_std_error);
        cert.verify().unwrap();
    }

    #[test]
    fn santalo_points() {
        let sq = ConvexBody::cube(2, 1.0).unwrap().translate(&v(&[0.5, 0.25]));
        let s = santalo_point(&sq, 1e-6).unwrap();
        assert!((v(&s.point) - v(&[0.5, 0.25])).norm() < 1e-7);
        let ball = ConvexBody::ball(v(&[1.0, 2.0]), 0.5).unwrap();
        assert_eq!(santalo_point(&ball, 1e-6).unwrap().point, vec![1.0, 2.0]);
    }

    #[test]
    fn santalo_point_of_triangle_matches_grid_search() {
        let tri = ConvexBody::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let s = santalo_point(&tri, 1e-6).unwrap();
        let oracle = PolarOracle::new(&tri).unwrap();
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 1..1000 {
            for j in 1..(1000 - i) {
                let p = v(&[i as f64 * 1e-3, j as f64 * 1e-3]);
                if let Some((a, _)) = oracle.moments(&p) {
                    if a < best.0 {
                        best = (a, p[0], p[1]);
                    }
                }
            }
        }
        assert!((s.point[0] - best.1).abs() <= 1e-3 && (s.point[1] - best.2).abs() <= 1e-3);
        // the triangle's Santaló point is its centroid
        assert!((s.point[0] - 1.0 / 3.0).abs() < 1e-7);
    }

    #[test]
    fn volume_products() {
        let ball = ConvexBody::ball(Vector::zeros(2), 3.0).unwrap();
        assert!((volume_product(&ball).unwrap() - PI * PI).abs() < 1e-12);
        let sq = ConvexBody::cube(2, 1.0).unwrap();
        assert!((volume_product(&sq).unwrap() - 8.0).abs() < 1e-12);
        let e = ConvexBody::ellipse(3.0, 0.5).unwrap();
        assert!((volume_product(&e).unwrap() - PI * PI).abs() < 1e-12);
        assert!(volume_product(&ConvexBody::unit_ball(3)).unwrap() - unit_ball_volume(3).powi(2) < 1e-12);
        assert!(matches!(volume_product(&sq.translate(&v(&[2.0, 0.0]))), Err(Error::OriginNotInterior)));
    }
}
