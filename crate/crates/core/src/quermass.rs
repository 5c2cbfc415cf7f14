//! Quermassintegrals from the Steiner polynomial `|K + tB| = Σ C(n,i) W_i t^i`, and the
//! scaling-degree argument separating extremal affine surface areas from them.

use crate::curvature::equivariance_exponent;
use crate::error::{Error, Result};
use crate::extremal::{estimate_inner_max, estimate_outer_max, estimate_outer_min, SearchConfig};
use crate::geometry::{ConvexBody, Estimate, Polytope};
use crate::util::{batch_means, sig6, stream_rng, unit_ball_volume, unit_sphere_area, Matrix, Vector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

const MC_SAMPLES: usize = 1 << 18;
const MC_CHUNK: usize = 1 << 14;
const MAX_CONDITION: f64 = 1e12;
const POLY_RESIDUAL_FLOOR: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct SteinerFit {
    pub body_id: String,
    pub dim: usize,
    pub t_grid: Vec<f64>,
    pub volumes: Vec<f64>,
    pub volume_std_errors: Vec<f64>,
    #[serde(rename = "W")]
    pub w: Vec<f64>,
    #[serde(rename = "W_std_error")]
    pub w_std_error: Vec<f64>,
    /// Largest deviation of the fitted polynomial from the volumes, relative to the largest volume.
    pub residual: f64,
    pub exact: bool,
}

impl SteinerFit {
    pub fn with_body_id(mut self, id: impl Into<String>) -> Self {
        self.body_id = id.into();
        self
    }

    pub fn to_csv(&self) -> String {
        let header: Vec<String> = (0..self.w.len()).map(|i| format!("W{i}")).collect();
        let values: Vec<String> = self.w.iter().map(|w| sig6(*w)).collect();
        format!("body,{},residual\n{},{},{}\n", header.join(","), self.body_id, values.join(","), sig6(self.residual))
    }
}

/// `{0.1, 0.2, …, 0.1(n+1)}`.
pub fn default_t_grid(n: usize) -> Vec<f64> {
    (1..=n + 1).map(|k| 0.1 * k as f64).collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficients of `t ↦ |K + tB|` in the monomial basis where they are known exactly.
fn exact_parallel_coefficients(body: &ConvexBody) -> Option<Vec<f64>> {
    let n = body.dim();
    if let ConvexBody::Ball { radius, .. } = body {
        return Some((0..=n).map(|i| unit_ball_volume(n) * binomial(n, i) * radius.powi((n - i) as i32)).collect());
    }
    if let Some(e) = body.as_ellipsoid() {
        if let Some(r) = e.as_ball_radius() {
            return exact_parallel_coefficients(&ConvexBody::ball(Vector::zeros(n), r).ok()?);
        }
    }
    match n {
        2 => {
            let perimeter = match body {
                ConvexBody::Support2D(s) => 2.0 * PI * s.harmonics().0[0],
                ConvexBody::Ellipsoid(_) => 2.0 * PI * body.to_support2d().ok()?.harmonics().0[0],
                _ => body.arc_polygon()?.perimeter(),
            };
            Some(vec![body.volume().value, perimeter, PI])
        }
        3 => {
            let poly = body.polytope()?;
            let area: f64 = poly.facet_measures().iter().sum();
            Some(vec![poly.volume().value, area, edge_term(poly), 4.0 * PI / 3.0])
        }
        _ => None,
    }
}

/// `½ Σ_e ℓ_e · (π − dihedral angle at e)` over the edges of a 3-D polytope.
fn edge_term(poly: &Polytope) -> f64 {
    let mut edges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (f, inc) in poly.incidence().iter().enumerate() {
        let ring = poly.facet_ring(f, inc);
        for i in 0..ring.len() {
            let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
            edges.entry((a.min(b), a.max(b))).or_default().push(f);
        }
    }
    let normals = poly.normals();
    edges
        .iter()
        .filter(|(_, faces)| faces.len() == 2)
        .map(|(&(a, b), faces)| {
            let length = (&poly.vertices()[a] - &poly.vertices()[b]).norm();
            let (u, v) = (&normals[faces[0]], &normals[faces[1]]);
            let cos = (u.dot(v) / (u.norm() * v.norm())).clamp(-1.0, 1.0);
            0.5 * length * cos.acos()
        })
        .sum()
}

/// Distance from `y` to the axis-aligned ellipsoid with semi-axes `axes`.
fn ellipsoid_distance(y: &[f64], axes: &[f64]) -> f64 {
    let inside: f64 = y.iter().zip(axes).map(|(y, a)| (y / a).powi(2)).sum();
    if inside <= 1.0 {
        return 0.0;
    }
    let g = |lambda: f64| -> f64 {
        y.iter().zip(axes).map(|(y, a)| (a * y / (a * a + lambda)).powi(2)).sum::<f64>() - 1.0
    };
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let amax = axes.iter().copied().fold(0.0f64, f64::max);
    let (mut lo, mut hi) = (0.0, norm * amax + amax * amax);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let lambda = 0.5 * (lo + hi);
    y.iter()
        .zip(axes)
        .map(|(y, a)| {
            let z = a * a * y / (a * a + lambda);
            (y - z).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// Monte Carlo parallel volumes of an ellipsoid on a common sample from a bounding box.
fn ellipsoid_parallel_volumes(body: &ConvexBody, t_grid: &[f64], seed: u64) -> Result<Vec<Estimate>> {
    let e = body
        .as_ellipsoid()
        .ok_or_else(|| Error::Unsupported(format!("parallel volumes of {}", body.kind())))?;
    let n = e.dim();
    let eig = e.shape().clone().symmetric_eigen();
    let axes: Vec<f64> = eig.eigenvalues.iter().map(|l| 1.0 / l.sqrt()).collect();
    let tmax = t_grid.iter().copied().fold(0.0f64, f64::max);
    let half = axes.iter().copied().fold(0.0f64, f64::max) + tmax;
    let box_volume = (2.0 * half).powi(n as i32);
    let chunks = MC_SAMPLES / MC_CHUNK;
    let per_chunk: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let mut hits = vec![0.0; t_grid.len()];
            let mut y = vec![0.0; n];
            for _ in 0..MC_CHUNK {
                for v in y.iter_mut() {
                    *v = rng.gen_range(-half..half);
                }
                let d = ellipsoid_distance(&y, &axes);
                for (h, t) in hits.iter_mut().zip(t_grid) {
                    if d <= *t {
                        *h += 1.0;
                    }
                }
            }
            hits.iter().map(|h| h / MC_CHUNK as f64 * box_volume).collect()
        })
        .collect();
    Ok((0..t_grid.len())
        .map(|i| {
            let values: Vec<f64> = per_chunk.iter().map(|c| c[i]).collect();
            let (mean, se) = batch_means(&values, chunks);
            Estimate { value: mean, std_error: se }
        })
        .collect())
}

/// `|K + tB|` at each `t`: exact for planar bodies, balls and 3-D polytopes, Monte Carlo
/// for ellipsoids in higher dimensions.
pub fn parallel_volumes(body: &ConvexBody, t_grid: &[f64], seed: u64) -> Result<(Vec<Estimate>, bool)> {
    if let Some(coef) = exact_parallel_coefficients(body) {
        let vols = t_grid
            .iter()
            .map(|t| Estimate::exact(coef.iter().rev().fold(0.0, |acc, c| acc * t + c)))
            .collect();
        return Ok((vols, true));
    }
    Ok((ellipsoid_parallel_volumes(body, t_grid, seed)?, false))
}

/// Solves the Steiner system for `W_0..W_n` from parallel volumes on `t_grid`, by least
/// squares on a column-scaled Vandermonde matrix.
pub fn steiner_fit(body: &ConvexBody, t_grid: &[f64], seed: u64) -> Result<SteinerFit> {
    let n = body.dim();
    if !(2..=3).contains(&n) {
        return Err(Error::Unsupported(format!("Steiner fit in dimension {n}")));
    }
    let mut distinct: Vec<f64> = t_grid.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < n + 1 || distinct[0] <= 0.0 {
        return Err(Error::IllConditionedGrid(format!("need {} distinct positive values of t", n + 1)));
    }
    let (vols, exact) = parallel_volumes(body, t_grid, seed)?;
    let rows = t_grid.len();
    let mut a = Matrix::from_fn(rows, n + 1, |i, j| binomial(n, j) * t_grid[i].powi(j as i32));
    let scales: Vec<f64> = (0..=n).map(|j| a.column(j).amax()).collect();
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 0.0) || smax / smin > MAX_CONDITION {
        return Err(Error::IllConditionedGrid(format!("condition number {:.3e}", smax / smin)));
    }
    let b = Vector::from_iterator(rows, vols.iter().map(|v| v.value));
    let scaled = svd.solve(&b, 0.0).map_err(|e| Error::IllConditionedGrid(e.to_string()))?;
    let w: Vec<f64> = scaled.iter().zip(&scales).map(|(x, s)| x / s).collect();
    let fitted = &a * &scaled;
    let vmax = vols.iter().map(|v| v.value.abs()).fold(0.0f64, f64::max);
    let residual = (&fitted - &b).amax() / vmax;
    let pinv = svd.pseudo_inverse(0.0).map_err(|e| Error::IllConditionedGrid(e.to_string()))?;
    let w_std_error: Vec<f64> = (0..=n)
        .map(|j| {
            let var: f64 = (0..rows).map(|i| (pinv[(j, i)] * vols[i].std_error).powi(2)).sum();
            var.sqrt() / scales[j]
        })
        .collect();
    Ok(SteinerFit {
        body_id: String::new(),
        dim: n,
        t_grid: t_grid.to_vec(),
        volumes: vols.iter().map(|v| v.value).collect(),
        volume_std_errors: vols.iter().map(|v| v.std_error).collect(),
        w,
        w_std_error,
        residual,
        exact,
    })
}

/// Extremal quantities whose scaling degree is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HomogeneityTarget {
    /// `IS_1`.
    #[serde(rename = "IS_1")]
    InnerMaxOne,
    /// `os_{−1}`.
    #[serde(rename = "os_-1")]
    OuterMinMinusOne,
    /// `OS_{n²}`.
    #[serde(rename = "OS_n2")]
    OuterMaxSquare,
}

impl HomogeneityTarget {
    pub fn p(&self, n: usize) -> f64 {
        match self {
            HomogeneityTarget::InnerMaxOne => 1.0,
            HomogeneityTarget::OuterMinMinusOne => -1.0,
            HomogeneityTarget::OuterMaxSquare => (n * n) as f64,
        }
    }

    /// Degree `n(n − p)/(n + p)` of `α ↦ X(αK)`.
    pub fn expected_degree(&self, n: usize) -> f64 {
        n as f64 * equivariance_exponent(n, self.p(n))
    }

    fn evaluate(&self, body: &ConvexBody, config: &SearchConfig) -> Result<f64> {
        let p = self.p(body.dim());
        Ok(match self {
            HomogeneityTarget::InnerMaxOne => estimate_inner_max(body, p, config)?.value,
            HomogeneityTarget::OuterMinMinusOne => estimate_outer_min(body, p, config)?.value,
            HomogeneityTarget::OuterMaxSquare => estimate_outer_max(body, p, config)?.value,
        })
    }
}

impl std::str::FromStr for HomogeneityTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "IS_1" | "IS1" => Ok(HomogeneityTarget::InnerMaxOne),
            "os_-1" | "os-1" => Ok(HomogeneityTarget::OuterMinMinusOne),
            "OS_n2" | "OS_n^2" => Ok(HomogeneityTarget::OuterMaxSquare),
            _ => Err(Error::InvalidInput(format!("unknown estimator {s:?} (expected IS_1, os_-1 or OS_n2)"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HomogeneityReport {
    pub target: HomogeneityTarget,
    pub alphas: Vec<f64>,
    pub values: Vec<f64>,
    pub degree: f64,
    pub expected: f64,
    /// Largest residual of the log-log regression.
    pub residual: f64,
}

impl HomogeneityReport {
    pub fn matches(&self, tol: f64) -> bool {
        (self.degree - self.expected).abs() <= tol && self.residual <= tol
    }
}

/// Fitted degree of `α ↦ X(αK)` by least squares in log-log coordinates.
pub fn homogeneity_degree(
    target: HomogeneityTarget,
    body: &ConvexBody,
    alphas: &[f64],
    config: &SearchConfig,
) -> Result<HomogeneityReport> {
    let mut distinct: Vec<f64> = alphas.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 || distinct[0] <= 0.0 {
        return Err(Error::IllConditionedGrid("the regression needs at least three distinct positive scale factors".into()));
    }
    let values: Vec<f64> = alphas
        .iter()
        .map(|&a| target.evaluate(&body.scale(a)?, config))
        .collect::<Result<_>>()?;
    if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidInput("estimator values must be positive and finite".into()));
    }
    let xs: Vec<f64> = alphas.iter().map(|a| a.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let degree = sxy / sxx;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - degree * (x - mx)).abs())
        .fold(0.0, f64::max);
    Ok(HomogeneityReport {
        target,
        alphas: alphas.to_vec(),
        values,
        degree,
        expected: target.expected_degree(body.dim()),
        residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NonQuermassRow {
    pub n: usize,
    /// Scaling degree `n(n−1)/(n+1)` of `IS_1`.
    pub degree: f64,
    pub degree_is_integer: bool,
    /// Largest deviation of the best degree-`n` polynomial fit to `α^degree` on `[0.5, 2]`.
    pub polynomial_residual: f64,
    pub not_quermass: bool,
}

/// For each `n`, checks that `IS_1(αB) = α^{n(n−1)/(n+1)} n|B|` has non-integer degree and
/// is not reproduced by a polynomial of degree `n` in `α`.
pub fn non_quermass_report(n_list: &[usize]) -> Result<Vec<NonQuermassRow>> {
    n_list
        .iter()
        .map(|&n| {
            if !(2..=6).contains(&n) {
                return Err(Error::InvalidInput(format!("dimension {n} outside 2..=6")));
            }
            let degree = HomogeneityTarget::InnerMaxOne.expected_degree(n);
            let degree_is_integer = (degree - degree.round()).abs() < 1e-12;
            let alphas: Vec<f64> = (0..61).map(|i| 0.5 + 1.5 * i as f64 / 60.0).collect();
            let area = unit_sphere_area(n);
            let design = Matrix::from_fn(alphas.len(), n + 1, |i, j| alphas[i].powi(j as i32));
            let target = Vector::from_iterator(alphas.len(), alphas.iter().map(|a| a.powf(degree) * area));
            let coef = design
                .clone()
                .svd(true, true)
                .solve(&target, 0.0)
                .map_err(|e| Error::IllConditionedGrid(e.to_string()))?;
            let polynomial_residual = (&design * coef - &target).amax() / area;
            Ok(NonQuermassRow {
                n,
                degree,
                degree_is_integer,
                polynomial_residual,
                not_quermass: !degree_is_integer && polynomial_residual > POLY_RESIDUAL_FLOOR,
            })
        })
        .collect()
}
