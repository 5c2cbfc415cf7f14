//! Planar convex bodies given by a smooth periodic support function.
//!
//! The support function is stored as a truncated Fourier series together with
//! its values and first two derivatives on a uniform grid, so curvature
//! radii `h + h''` are available to spectral accuracy.

use crate::error::{Error, Result};
use crate::util::{unit2, Matrix, Vector};
use nalgebra::Vector2;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use std::f64::consts::PI;

pub const DEFAULT_GRID: usize = 2048;

#[derive(Clone, Debug)]
pub struct SupportBody2D {
    h: Vec<f64>,
    dh: Vec<f64>,
    d2h: Vec<f64>,
    cos_coef: Vec<f64>,
    sin_coef: Vec<f64>,
    node_angles: Vec<f64>,
}

impl SupportBody2D {
    /// Builds a body from support values on the uniform grid `θ_j = 2πj/m`.
    /// Fails with `NonConvex` when `h + h''` is not positive at every node.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let m = samples.len();
        if m < 16 || m % 2 != 0 {
            return Err(Error::InvalidBody("support grid must be even and at least 16".into()));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidBody("non-finite support value".into()));
        }
        let mut planner = FftPlanner::<f64>::new();
        let mut spectrum: Vec<Complex<f64>> = samples.iter().map(|x| Complex::new(*x, 0.0)).collect();
        planner.plan_fft_forward(m).process(&mut spectrum);
        let half = m / 2;
        let mut cos_coef = vec![0.0; half];
        let mut sin_coef = vec![0.0; half];
        cos_coef[0] = spectrum[0].re / m as f64;
        for k in 1..half {
            cos_coef[k] = 2.0 * spectrum[k].re / m as f64;
            sin_coef[k] = -2.0 * spectrum[k].im / m as f64;
        }
        Self::from_coefficients(cos_coef, sin_coef, m)
    }

    pub fn from_fn<F: Fn(f64) -> f64>(f: F, m: usize) -> Result<Self> {
        let samples: Vec<f64> = (0..m).map(|j| f(2.0 * PI * j as f64 / m as f64)).collect();
        Self::from_samples(&samples)
    }

    /// Body with support `Σ a_k cos kθ + b_k sin kθ`, tabulated on `m` nodes.
    pub fn from_coefficients(mut cos_coef: Vec<f64>, mut sin_coef: Vec<f64>, m: usize) -> Result<Self> {
        let half = m / 2;
        cos_coef.resize(half, 0.0);
        sin_coef.resize(half, 0.0);
        let scale = cos_coef.iter().chain(&sin_coef).fold(0.0f64, |a, c| a.max(c.abs()));
        let mut keep = half;
        while keep > 2 && cos_coef[keep - 1].abs() + sin_coef[keep - 1].abs() <= 2e-15 * scale {
            keep -= 1;
        }
        cos_coef.truncate(keep);
        sin_coef.truncate(keep);
        Self::tabulate(cos_coef, sin_coef, m)
    }

    fn tabulate(cos_coef: Vec<f64>, sin_coef: Vec<f64>, m: usize) -> Result<Self> {
        let keep = cos_coef.len();
        let mut planner = FftPlanner::<f64>::new();
        let inverse = planner.plan_fft_inverse(m);
        let mut grids: Vec<Vec<f64>> = Vec::with_capacity(3);
        for order in 0..3u32 {
            let mut spec = vec![Complex::new(0.0, 0.0); m];
            for k in 0..keep {
                let base = if k == 0 {
                    Complex::new(cos_coef[0], 0.0)
                } else {
                    Complex::new(0.5 * cos_coef[k], -0.5 * sin_coef[k])
                };
                let factor = Complex::new(0.0, k as f64).powu(order);
                spec[k] = base * factor;
                if k > 0 {
                    spec[m - k] = (base * factor).conj();
                }
            }
            inverse.process(&mut spec);
            grids.push(spec.iter().map(|c| c.re).collect());
        }
        let d2h = grids.pop().unwrap();
        let dh = grids.pop().unwrap();
        let h = grids.pop().unwrap();
        let min_r = h.iter().zip(&d2h).map(|(a, b)| a + b).fold(f64::INFINITY, f64::min);
        if !(min_r > 0.0) {
            return Err(Error::NonConvex(min_r));
        }
        let mut node_angles = Vec::with_capacity(m);
        let mut prev = f64::NEG_INFINITY;
        for j in 0..m {
            let theta = 2.0 * PI * j as f64 / m as f64;
            let x = unit2(theta) * h[j] + unit2(theta + 0.5 * PI) * dh[j];
            let mut a = x.y.atan2(x.x);
            if prev.is_finite() {
                while a < prev - PI {
                    a += 2.0 * PI;
                }
                while a > prev + PI {
                    a -= 2.0 * PI;
                }
            }
            node_angles.push(a);
            prev = a;
        }
        Ok(SupportBody2D { h, dh, d2h, cos_coef, sin_coef, node_angles })
    }

    /// Support function of a counter-clockwise polygon convolved with a periodic Gaussian
    /// of width `sigma`, plus `floor` times the unit disk. Coefficients are computed exactly
    /// from the edge measure `Σ ℓ_i δ(θ − θ_i)` of `h + h''`.
    pub fn smoothed_polygon(vertices: &[Vector2<f64>], sigma: f64, floor: f64, m: usize) -> Result<Self> {
        let count = vertices.len();
        if count < 3 {
            return Err(Error::InvalidBody("a polygon needs at least three vertices".into()));
        }
        if !(sigma > 0.0) || floor < 0.0 {
            return Err(Error::InvalidInput("smoothing width must be positive".into()));
        }
        let edges: Vec<(f64, f64)> = (0..count)
            .map(|i| {
                let e = vertices[(i + 1) % count] - vertices[i];
                (e.norm(), (-e.x).atan2(e.y))
            })
            .collect();
        let mut steiner = Vector2::zeros();
        for i in 0..count {
            let turn = (edges[i].1 - edges[(i + count - 1) % count].1).rem_euclid(2.0 * PI);
            steiner += vertices[i] * (turn / (2.0 * PI));
        }
        if m < 16 || m % 2 != 0 {
            return Err(Error::InvalidBody("support grid must be even and at least 16".into()));
        }
        let half = m / 2;
        let mut cos_coef = vec![0.0; half];
        let mut sin_coef = vec![0.0; half];
        cos_coef[0] = edges.iter().map(|(l, _)| l).sum::<f64>() / (2.0 * PI) + floor;
        if half > 1 {
            let g = (-0.5 * sigma * sigma).exp();
            cos_coef[1] = steiner.x * g;
            sin_coef[1] = steiner.y * g;
        }
        for k in 2..half {
            let kf = k as f64;
            let g = (-0.5 * (sigma * kf).powi(2)).exp();
            if g < 1e-20 {
                cos_coef.truncate(k);
                sin_coef.truncate(k);
                break;
            }
            let (c, s) = edges
                .iter()
                .fold((0.0, 0.0), |(c, s), (l, t)| (c + l * (kf * t).cos(), s + l * (kf * t).sin()));
            let factor = g / (PI * (1.0 - kf * kf));
            cos_coef[k] = c * factor;
            sin_coef[k] = s * factor;
        }
        Self::tabulate(cos_coef, sin_coef, m)
    }

    pub fn disk(radius: f64, m: usize) -> Result<Self> {
        Self::from_coefficients(vec![radius], vec![0.0], m)
    }

    /// Centered ellipse with semi-axes `a` (along e₁) and `b`.
    pub fn ellipse(a: f64, b: f64, m: usize) -> Result<Self> {
        Self::from_fn(|t| (a * a * t.cos().powi(2) + b * b * t.sin().powi(2)).sqrt(), m)
    }

    pub fn grid(&self) -> usize {
        self.h.len()
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.grid() as f64
    }

    pub fn h_nodes(&self) -> &[f64] {
        &self.h
    }

    pub fn dh_nodes(&self) -> &[f64] {
        &self.dh
    }

    pub fn d2h_nodes(&self) -> &[f64] {
        &self.d2h
    }

    pub fn harmonics(&self) -> (&[f64], &[f64]) {
        (&self.cos_coef, &self.sin_coef)
    }

    /// Radius of curvature `h + h''` at grid node `j`.
    pub fn curvature_radius(&self, j: usize) -> f64 {
        self.h[j] + self.d2h[j]
    }

    pub fn min_curvature_radius(&self) -> f64 {
        (0..self.grid()).map(|j| self.curvature_radius(j)).fold(f64::INFINITY, f64::min)
    }

    /// `(h, h', h'')` at an arbitrary angle, by summing the series.
    pub fn eval(&self, theta: f64) -> (f64, f64, f64) {
        let (s1, c1) = theta.sin_cos();
        let (mut c, mut s) = (1.0, 0.0);
        let mut out = (self.cos_coef[0], 0.0, 0.0);
        for k in 1..self.cos_coef.len() {
            let next_c = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = next_c;
            let (a, b) = (self.cos_coef[k], self.sin_coef[k]);
            let kf = k as f64;
            out.0 += a * c + b * s;
            out.1 += kf * (b * c - a * s);
            out.2 -= kf * kf * (a * c + b * s);
        }
        out
    }

    pub fn support_at(&self, theta: f64) -> f64 {
        self.eval(theta).0
    }

    pub fn support(&self, u: &Vector) -> f64 {
        let norm = u.norm();
        norm * self.support_at(u[1].atan2(u[0]))
    }

    pub fn boundary_point(&self, theta: f64) -> Vector2<f64> {
        let (h, dh, _) = self.eval(theta);
        unit2(theta) * h + unit2(theta + 0.5 * PI) * dh
    }

    pub fn node_point(&self, j: usize) -> Vector2<f64> {
        let t = self.theta(j);
        unit2(t) * self.h[j] + unit2(t + 0.5 * PI) * self.dh[j]
    }

    /// Inscribed polygon through `count` boundary points at equally spaced normal angles.
    pub fn boundary_polygon(&self, count: usize) -> Vec<Vector2<f64>> {
        (0..count)
            .map(|j| self.boundary_point(2.0 * PI * j as f64 / count as f64))
            .collect()
    }

    pub fn origin_interior(&self) -> bool {
        self.h.iter().all(|x| *x > 0.0)
    }

    /// Normal angle of the boundary point in direction `phi` (origin interior).
    pub fn normal_angle_towards(&self, phi: f64) -> f64 {
        let m = self.grid();
        let a0 = self.node_angles[0];
        let mut target = phi;
        while target < a0 {
            target += 2.0 * PI;
        }
        while target >= a0 + 2.0 * PI {
            target -= 2.0 * PI;
        }
        let j = self.node_angles.partition_point(|a| *a <= target).saturating_sub(1);
        let (mut lo, mut hi) = (self.theta(j), self.theta(j) + 2.0 * PI / m as f64);
        let dir = unit2(target);
        let side = |t: f64| {
            let x = self.boundary_point(t);
            x.x * dir.y - x.y * dir.x
        };
        let mut f_lo = side(lo);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let f_mid = side(mid);
            if (f_mid > 0.0) == (f_lo > 0.0) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Radial function about the origin in direction angle `phi`.
    pub fn radial_at(&self, phi: f64) -> f64 {
        let theta = self.normal_angle_towards(phi);
        self.support_at(theta) / (theta - phi).cos()
    }

    pub fn radial(&self, u: &Vector) -> Result<f64> {
        if !self.origin_interior() {
            return Err(Error::OriginNotInterior);
        }
        Ok(self.radial_at(u[1].atan2(u[0])))
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        let r = x.norm();
        if r == 0.0 {
            return self.origin_interior();
        }
        r <= self.radial_at(x[1].atan2(x[0])) + tol
    }

    fn weight(&self) -> f64 {
        2.0 * PI / self.grid() as f64
    }

    /// Area `½ ∫ h (h + h'') dθ`.
    pub fn area(&self) -> f64 {
        0.5 * self.weight()
            * (0..self.grid()).map(|j| self.h[j] * self.curvature_radius(j)).sum::<f64>()
    }

    pub fn perimeter(&self) -> f64 {
        self.weight() * self.h.iter().sum::<f64>()
    }

    /// Area, first and second moments by boundary integrals
    /// `∫x = ⅓∮ x h r dθ`, `∫xxᵀ = ¼∮ xxᵀ h r dθ`.
    pub fn moments(&self) -> (f64, Vector, Matrix) {
        let mut first = Vector2::zeros();
        let mut second = nalgebra::Matrix2::zeros();
        for j in 0..self.grid() {
            let x = self.node_point(j);
            let w = self.h[j] * self.curvature_radius(j);
            first += x * w;
            second += x * x.transpose() * w;
        }
        let wt = self.weight();
        let first = first * (wt / 3.0);
        let second = second * (wt / 4.0);
        (
            self.area(),
            Vector::from_vec(vec![first.x, first.y]),
            Matrix::from_row_slice(2, 2, &[second[(0, 0)], second[(0, 1)], second[(1, 0)], second[(1, 1)]]),
        )
    }

    pub fn centroid(&self) -> Vector {
        let (a, first, _) = self.moments();
        first / a
    }

    pub fn translate(&self, t: &Vector) -> Self {
        let mut out = self.clone();
        out.cos_coef[1] += t[0];
        out.sin_coef[1] += t[1];
        let mut prev = f64::NEG_INFINITY;
        for j in 0..self.grid() {
            let th = self.theta(j);
            let (s, c) = th.sin_cos();
            let dot = t[0] * c + t[1] * s;
            out.h[j] += dot;
            out.dh[j] += -t[0] * s + t[1] * c;
            out.d2h[j] -= dot;
            let x = out.node_point(j);
            let mut a = x.y.atan2(x.x);
            if prev.is_finite() {
                while a < prev - PI {
                    a += 2.0 * PI;
                }
                while a > prev + PI {
                    a -= 2.0 * PI;
                }
            }
            out.node_angles[j] = a;
            prev = a;
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for v in out
            .h
            .iter_mut()
            .chain(out.dh.iter_mut())
            .chain(out.d2h.iter_mut())
            .chain(out.cos_coef.iter_mut())
            .chain(out.sin_coef.iter_mut())
        {
            *v *= factor;
        }
        out
    }

    /// Image under `x ↦ T x + t`, using `h_{TK}(u) = h_K(Tᵀu)`.
    pub fn affine_image(&self, t_mat: &Matrix, t: &Vector) -> Result<Self> {
        let tt = t_mat.transpose();
        let samples: Vec<f64> = (0..self.grid())
            .map(|j| {
                let u = unit2(self.theta(j));
                let w = &tt * Vector::from_vec(vec![u.x, u.y]);
                w.norm() * self.support_at(w[1].atan2(w[0]))
            })
            .collect();
        Ok(Self::from_samples(&samples)?.translate(t))
    }

    /// Convolution of the support function with a periodic Gaussian of width `sigma`.
    pub fn smoothed(&self, sigma: f64) -> Result<Self> {
        let cos_coef: Vec<f64> = self
            .cos_coef
            .iter()
            .enumerate()
            .map(|(k, a)| a * (-0.5 * (sigma * k as f64).powi(2)).exp())
            .collect();
        let sin_coef: Vec<f64> = self
            .sin_coef
            .iter()
            .enumerate()
            .map(|(k, b)| b * (-0.5 * (sigma * k as f64).powi(2)).exp())
            .collect();
        Self::from_coefficients(cos_coef, sin_coef, self.grid())
    }
}
