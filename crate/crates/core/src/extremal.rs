//! Inner and outer extremal affine surface areas: closed forms on the degenerate
//! ranges, candidate searches, divergence probes and the sandwich checks.

use crate::curvature::{asp, equivariance_exponent, extended_real, floating_body_2d, isoperimetric_value};
use crate::error::{Error, Result};
use crate::fit::{john_ellipsoid, loewner_ellipsoid, DEFAULT_TOL};
use crate::geometry::{ArcPolygon, ConvexBody, Ellipsoid, Polytope, SupportBody2D};
use crate::report::BoundReport;
use crate::util::{from2, log_grid, sig6, stream_rng, to2, unit2, unit_sphere_area, Matrix, Vector};
use nalgebra::{Matrix2, Vector2};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Relative gap below which two candidate values count as equal.
const TIE: f64 = 1e-9;
const WITNESSES: usize = 6;
const CONTAINMENT_GRID: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExtremalKind {
    /// Supremum over convex subsets.
    #[serde(rename = "IS")]
    InnerMax,
    /// Infimum over convex subsets.
    #[serde(rename = "is")]
    InnerMin,
    /// Supremum over convex supersets.
    #[serde(rename = "OS")]
    OuterMax,
    /// Infimum over convex supersets.
    #[serde(rename = "os")]
    OuterMin,
}

impl ExtremalKind {
    pub fn symbol(&self) -> &'static str {
        match self {
            ExtremalKind::InnerMax => "IS",
            ExtremalKind::InnerMin => "is",
            ExtremalKind::OuterMax => "OS",
            ExtremalKind::OuterMin => "os",
        }
    }

    fn is_inner(&self) -> bool {
        matches!(self, ExtremalKind::InnerMax | ExtremalKind::InnerMin)
    }
}

impl fmt::Display for ExtremalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for ExtremalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "IS" => Ok(ExtremalKind::InnerMax),
            "is" => Ok(ExtremalKind::InnerMin),
            "OS" => Ok(ExtremalKind::OuterMax),
            "os" => Ok(ExtremalKind::OuterMin),
            _ => Err(Error::InvalidInput(format!("unknown extremal kind {s:?} (expected IS, is, OS or os)"))),
        }
    }
}

/// How the reported value relates to the true extremal quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueBound {
    Exact,
    LowerBound,
    UpperBound,
    Limit,
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateRecord {
    pub index: usize,
    pub descriptor: String,
    #[serde(serialize_with = "extended_real")]
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalEstimate {
    pub kind: ExtremalKind,
    #[serde(serialize_with = "extended_real")]
    pub p: f64,
    pub body_id: String,
    #[serde(serialize_with = "extended_real")]
    pub value: f64,
    pub bound: ValueBound,
    #[serde(skip)]
    pub witness: Option<ConvexBody>,
    pub witness_descriptor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub candidate_log: Vec<CandidateRecord>,
    pub bound_status: Vec<BoundReport>,
}

impl ExtremalEstimate {
    pub fn with_body_id(mut self, id: impl Into<String>) -> Self {
        self.body_id = id.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.bound_status.iter().all(|b| b.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("estimate serializes")
    }

    /// One row per candidate; the chosen witness is marked in the last column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("body_id,kind,p,index,descriptor,value,chosen\n");
        let chosen = self.witness_descriptor.as_deref();
        if self.candidate_log.is_empty() {
            out.push_str(&format!(
                "{},{},{},,{},{},true\n",
                self.body_id,
                self.kind,
                sig6(self.p),
                self.reason.as_deref().unwrap_or("closed form"),
                sig6(self.value)
            ));
        }
        for c in &self.candidate_log {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                self.body_id,
                self.kind,
                sig6(self.p),
                c.index,
                c.descriptor,
                sig6(c.value),
                Some(c.descriptor.as_str()) == chosen
            ));
        }
        out
    }
}

/// Candidate-family parameters for the searches.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Number of radii in the `K ∩ RB` and `conv{K, RB}` families.
    pub radii: usize,
    /// Scalings of the John ellipsoid about its center.
    pub john_scales: Vec<f64>,
    /// Dilations of the Löwner ellipsoid about its center.
    pub dilates: Vec<f64>,
    /// Floating-body parameters for the smoothed inner candidates.
    pub deltas: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub directions: usize,
    /// Support grid for smoothed candidates.
    pub grid: usize,
    /// Nelder–Mead iterations for the enclosing-ellipse search.
    pub local_iterations: usize,
    pub tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            radii: 32,
            john_scales: vec![0.25, 0.5, 0.75, 1.0],
            dilates: vec![1.0, 1.05, 1.1, 1.25, 1.5, 2.0],
            deltas: vec![0.001, 0.003, 0.01, 0.03, 0.05],
            sigmas: vec![0.02, 0.05, 0.1],
            directions: 720,
            grid: 4096,
            local_iterations: 400,
            tol: DEFAULT_TOL,
        }
    }
}

fn dim_f(body: &ConvexBody) -> f64 {
    body.dim() as f64
}

fn check_finite_p(p: f64, n: usize) -> Result<()> {
    if p.is_nan() {
        return Err(Error::InvalidInput("p is NaN".into()));
    }
    if p == -(n as f64) {
        return Err(Error::PEqualsMinusN(n));
    }
    Ok(())
}

fn require_planar(body: &ConvexBody) -> Result<()> {
    if body.dim() != 2 {
        return Err(Error::Unsupported(format!("extremal search in dimension {}", body.dim())));
    }
    Ok(())
}

fn require_centered(body: &ConvexBody) -> Result<()> {
    let g = body.centroid().norm();
    if g > 1e-8 * body.bounding_radius() {
        return Err(Error::NotCentered(g));
    }
    Ok(())
}

fn closed(kind: ExtremalKind, p: f64, value: f64, reason: &str) -> ExtremalEstimate {
    ExtremalEstimate {
        kind,
        p,
        body_id: String::new(),
        value,
        bound: ValueBound::Exact,
        witness: None,
        witness_descriptor: None,
        reason: Some(reason.into()),
        candidate_log: Vec::new(),
        bound_status: Vec::new(),
    }
}

/// Exact values on the degenerate ranges; `None` where a search is required.
pub fn closed_form_extremal(body: &ConvexBody, kind: ExtremalKind, p: f64) -> Result<Option<ExtremalEstimate>> {
    let n = body.dim();
    check_finite_p(p, n)?;
    let nf = n as f64;
    let body_term = || nf * body.volume().value;
    let ball_term = unit_sphere_area(n);
    let out = match kind {
        ExtremalKind::InnerMax => {
            if p == 0.0 {
                Some(closed(kind, p, body_term(), "IS_0 = n|K|"))
            } else if p == nf {
                Some(closed(kind, p, ball_term, "IS_n = n|B|"))
            } else if p > nf || p < 0.0 {
                Some(closed(kind, p, f64::INFINITY, "divergent: small balls or flat pieces"))
            } else {
                None
            }
        }
        ExtremalKind::InnerMin => Some(closed(kind, p, 0.0, "is_p = 0 for every p")),
        ExtremalKind::OuterMax => {
            if p == nf {
                Some(closed(kind, p, ball_term, "OS_n = n|B|"))
            } else if p < nf {
                Some(closed(kind, p, f64::INFINITY, "divergent: large balls or rounded cubes"))
            } else {
                None
            }
        }
        ExtremalKind::OuterMin => {
            if p == 0.0 {
                Some(closed(kind, p, body_term(), "os_0 = n|K|"))
            } else if p > 0.0 || p < -nf {
                Some(closed(kind, p, 0.0, "vanishing: smoothed polygons or large balls"))
            } else {
                None
            }
        }
    };
    Ok(out)
}

/// The extremal quantity: closed form where available, otherwise the matching search.
pub fn estimate(body: &ConvexBody, kind: ExtremalKind, p: f64, config: &SearchConfig) -> Result<ExtremalEstimate> {
    if let Some(e) = closed_form_extremal(body, kind, p)? {
        return Ok(e);
    }
    match kind {
        ExtremalKind::InnerMax => estimate_inner_max(body, p, config),
        ExtremalKind::OuterMax => estimate_outer_max(body, p, config),
        ExtremalKind::OuterMin => estimate_outer_min(body, p, config),
        ExtremalKind::InnerMin => unreachable!("is_p always has a closed form"),
    }
}

type Generated = (String, Result<ConvexBody>);

struct Evaluated {
    records: Vec<CandidateRecord>,
    bodies: Vec<Option<ConvexBody>>,
}

fn evaluate(candidates: Vec<Generated>, p: f64) -> Evaluated {
    let results: Vec<(CandidateRecord, Option<ConvexBody>)> = candidates
        .into_par_iter()
        .enumerate()
        .map(|(index, (descriptor, body))| match body {
            Ok(b) => match asp(&b, p) {
                Ok(v) => (CandidateRecord { index, descriptor, value: v.value, note: v.reason }, Some(b)),
                Err(e) => (CandidateRecord { index, descriptor, value: f64::NAN, note: Some(e.to_string()) }, None),
            },
            Err(e) => (CandidateRecord { index, descriptor, value: f64::NAN, note: Some(e.to_string()) }, None),
        })
        .collect();
    let (records, bodies) = results.into_iter().unzip();
    Evaluated { records, bodies }
}

/// Best finite-or-infinite value in index order; later candidates must win by more than
/// the relative tie margin.
fn select(values: &[f64], maximize: bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        best = match best {
            None => Some(i),
            Some(b) => {
                let bv = values[b];
                let margin = if bv.is_finite() { TIE * bv.abs() } else { 0.0 };
                let better = if maximize { v > bv + margin } else { v < bv - margin };
                Some(if better { i } else { b })
            }
        };
    }
    best
}

fn finish(
    kind: ExtremalKind,
    p: f64,
    bound: ValueBound,
    eval: Evaluated,
    maximize: bool,
) -> Result<ExtremalEstimate> {
    let values: Vec<f64> = eval.records.iter().map(|r| r.value).collect();
    let best = select(&values, maximize)
        .ok_or_else(|| Error::NotConverged(format!("no {kind} candidate could be evaluated")))?;
    Ok(ExtremalEstimate {
        kind,
        p,
        body_id: String::new(),
        value: values[best],
        bound,
        witness: eval.bodies[best].clone(),
        witness_descriptor: Some(eval.records[best].descriptor.clone()),
        reason: None,
        candidate_log: eval.records,
        bound_status: Vec::new(),
    })
}

fn grid_angles(m: usize) -> impl Iterator<Item = f64> {
    (0..m).map(move |j| 2.0 * PI * j as f64 / m as f64)
}

/// `max_u h_A(u)/h_B(u)` on a direction grid; `≤ 1` certifies `A ⊆ B` on the grid.
fn support_ratio(a: &ConvexBody, b: &ConvexBody) -> f64 {
    grid_angles(CONTAINMENT_GRID)
        .map(|t| {
            let u = from2(unit2(t));
            a.support(&u) / b.support(&u)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn containment_report(kind: ExtremalKind, body: &ConvexBody, witness: Option<&ConvexBody>) -> Option<BoundReport> {
    let w = witness?;
    let (quantity, ratio) = if kind.is_inner() {
        ("max h_witness / h_K", support_ratio(w, body))
    } else {
        ("max h_K / h_witness", support_ratio(body, w))
    };
    Some(BoundReport::at_most(quantity, ratio, 1.0, 1e-6, "candidate containment on a support grid"))
}

/// A planar body as a spectral support body where a composite family needs one.
fn composite_base(body: &ConvexBody) -> Result<ConvexBody> {
    if body.as_ellipsoid().is_some() {
        return Ok(ConvexBody::Support2D(body.to_support2d()?));
    }
    Ok(body.clone())
}

/// Gaussian-smoothed polygon scaled about the origin so that it sits inside (`inside`)
/// or around the body on the support grid.
fn smoothed_fit(body_support: &[f64], polygon: &[Vector2<f64>], sigma: f64, inside: bool) -> Result<ConvexBody> {
    let m = body_support.len();
    let mean = body_support.iter().sum::<f64>() / m as f64;
    let s = SupportBody2D::smoothed_polygon(polygon, sigma, 1e-9 * mean, m)?;
    if s.h_nodes().iter().any(|h| *h <= 0.0) {
        return Err(Error::OriginNotInterior);
    }
    let ratios = body_support.iter().zip(s.h_nodes()).map(|(k, h)| k / h);
    let scale = if inside {
        ratios.fold(f64::INFINITY, f64::min)
    } else {
        ratios.fold(f64::NEG_INFINITY, f64::max)
    };
    Ok(ConvexBody::Support2D(s.scale(scale)))
}

fn polygon_of(body: &ConvexBody) -> Option<Vec<Vector2<f64>>> {
    body.polytope().map(Polytope::polygon)
}

/// Vertices on the boundary at `k` equally spaced directions.
fn inscribed_polygon(body: &ConvexBody, k: usize, phase: f64) -> Result<Vec<Vector2<f64>>> {
    (0..k)
        .map(|j| {
            let u = unit2(phase + 2.0 * PI * j as f64 / k as f64);
            Ok(u * body.radial(&from2(u))?)
        })
        .collect()
}

/// Tangent polygon with `k` equally spaced outer normals.
fn circumscribed_polygon(body: &ConvexBody, k: usize) -> Result<Vec<Vector2<f64>>> {
    let normals: Vec<Vector> = grid_angles(k).map(|t| from2(unit2(t))).collect();
    let offsets: Vec<f64> = normals.iter().map(|u| body.support(u)).collect();
    Ok(Polytope::from_halfspaces(&normals, &offsets)?.polygon())
}

fn in_open_range(kind: ExtremalKind, p: f64, lo: f64, hi: f64) -> Result<()> {
    if !(p > lo && p < hi) && !(hi.is_infinite() && p == hi && p > lo) {
        return Err(Error::POutOfRange { kind: kind.symbol().into(), p });
    }
    Ok(())
}

/// Lower estimate of `IS_p` for `0 < p < n` over inscribed candidates: the body itself,
/// scaled John ellipses, `K ∩ RB` for radii between the inradius and circumradius, and
/// smoothed floating bodies scaled to fit.
pub fn estimate_inner_max(body: &ConvexBody, p: f64, config: &SearchConfig) -> Result<ExtremalEstimate> {
    let kind = ExtremalKind::InnerMax;
    require_planar(body)?;
    in_open_range(kind, p, 0.0, dim_f(body))?;
    require_centered(body)?;

    let mut candidates: Vec<Generated> = vec![("K".into(), Ok(body.clone()))];
    match john_ellipsoid(body, config.tol) {
        Ok(fit) => {
            let e = fit.ellipsoid;
            for &s in &config.john_scales {
                let shape = e.shape() / (s * s);
                candidates.push((
                    format!("john x{s}"),
                    Ellipsoid::new(e.center().clone(), shape).map(ConvexBody::Ellipsoid),
                ));
            }
        }
        Err(err) => candidates.push(("john".into(), Err(err))),
    }
    let base = composite_base(body)?;
    for r in log_grid(body.inner_radius(), body.bounding_radius(), config.radii) {
        candidates.push((format!("K cap {}B", sig6(r)), base.intersect_ball(r)));
    }
    let support = body.support_samples(config.grid);
    let floating: Vec<(f64, Result<Vec<Vector2<f64>>>)> = config
        .deltas
        .par_iter()
        .map(|&d| {
            let poly = floating_body_2d(body, d, config.directions)
                .and_then(|f| f.result.polytope().map(Polytope::polygon).ok_or(Error::EmptyFloatingBody(d)));
            (d, poly)
        })
        .collect();
    for (delta, poly) in &floating {
        for &sigma in &config.sigmas {
            let cand = match poly {
                Ok(poly) => smoothed_fit(&support, poly, sigma, true),
                Err(e) => Err(e.clone()),
            };
            candidates.push((format!("floating {delta} smoothed {sigma}"), cand));
        }
    }

    let mut est = finish(kind, p, ValueBound::LowerBound, evaluate(candidates, p), true)?;
    let n = body.dim();
    let upper = isoperimetric_value(n, p, body.volume().value);
    est.bound_status.push(BoundReport::at_most(
        "IS_p estimate",
        est.value,
        upper,
        1e-7 * upper.max(1.0),
        "affine isoperimetric bound n|B|^{2p/(n+p)}|K|^{(n-p)/(n+p)}",
    ));
    est.bound_status.extend(containment_report(kind, body, est.witness.as_ref()));
    Ok(est)
}

fn is_symmetric(body: &ConvexBody) -> bool {
    let h = body.support_samples(256);
    let scale = h.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    (0..128).all(|j| (h[j] - h[j + 128]).abs() <= 1e-9 * scale)
}

/// Smallest `s` with `K ⊆ c + s·M·B`.
fn cover_scale(body: &ConvexBody, center: Vector2<f64>, m: &Matrix2<f64>) -> Option<f64> {
    let inv = m.try_inverse()?;
    if let Some(p) = body.polytope() {
        return Some(p.vertices().iter().map(|v| (inv * (to2(v) - center)).norm()).fold(0.0, f64::max));
    }
    let dual = inv.transpose();
    let f = |t: f64| {
        let w = dual * unit2(t);
        body.support(&from2(w)) - center.dot(&w)
    };
    const COARSE: usize = 256;
    let step = 2.0 * PI / COARSE as f64;
    let values: Vec<f64> = (0..COARSE).map(|j| f(j as f64 * step)).collect();
    let mut best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for j in 0..COARSE {
        let prev = values[(j + COARSE - 1) % COARSE];
        let next = values[(j + 1) % COARSE];
        if values[j] >= prev && values[j] >= next {
            best = best.max(golden_max(&f, (j as f64 - 1.0) * step, (j as f64 + 1.0) * step));
        }
    }
    Some(best)
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (a, b);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

/// Downhill simplex minimization of `f` from `x0` with initial edge lengths `steps`.
fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], steps: &[f64], iterations: usize) -> (Vec<f64>, f64) {
    let dim = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let v = f(&x);
        simplex.push((x, v));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    let blend = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    for _ in 0..iterations {
        order(&mut simplex);
        let spread = simplex[dim].1 - simplex[0].1;
        if spread.abs() <= 1e-15 * simplex[0].1.abs().max(1e-300) {
            break;
        }
        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let reflected = blend(&centroid, &worst.0, -1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = blend(&centroid, &worst.0, -2.0);
            let fe = f(&expanded);
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
        } else {
            let contracted = if fr < worst.1 {
                blend(&centroid, &reflected, 0.5)
            } else {
                blend(&centroid, &worst.0, 0.5)
            };
            let fc = f(&contracted);
            if fc < worst.1.min(fr) {
                simplex[dim] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x = blend(&best, &entry.0, 0.5);
                    let v = f(&x);
                    *entry = (x, v);
                }
            }
        }
    }
    order(&mut simplex);
    simplex.swap_remove(0)
}

fn ellipse_frame(params: &[f64]) -> (Vector2<f64>, Matrix2<f64>) {
    let (c, s) = (params[1].cos(), params[1].sin());
    let rot = Matrix2::new(c, -s, s, c);
    let axes = Matrix2::new((0.5 * params[0]).exp(), 0.0, 0.0, (-0.5 * params[0]).exp());
    (Vector2::new(params[2], params[3]), rot * axes)
}

/// Enclosing ellipse of least area by a simplex search over axis ratio, orientation and
/// center, started at the Löwner ellipse; each trial ellipse is scaled to cover the body.
fn enclosing_ellipse_search(body: &ConvexBody, start: &Ellipsoid, iterations: usize) -> Result<Ellipsoid> {
    let axes = start.semi_axes();
    let eig = start.shape().clone().symmetric_eigen();
    let minor = if eig.eigenvalues[0] < eig.eigenvalues[1] { 0 } else { 1 };
    let major_dir = eig.eigenvectors.column(minor);
    let (a, b) = (axes.iter().copied().fold(0.0f64, f64::max), axes.iter().copied().fold(f64::INFINITY, f64::min));
    let c = start.center();
    let x0 = [(a / b).ln(), major_dir[1].atan2(major_dir[0]), c[0], c[1]];
    let r = body.bounding_radius();
    let objective = |x: &[f64]| {
        let (center, m) = ellipse_frame(x);
        cover_scale(body, center, &m).map(f64::ln).unwrap_or(f64::INFINITY)
    };
    let (x, _) = nelder_mead(objective, &x0, &[0.1, 0.1, 0.05 * r, 0.05 * r], iterations);
    let (center, m) = ellipse_frame(&x);
    let s = cover_scale(body, center, &m).ok_or(Error::SingularMap(0.0))?;
    let root = m * s;
    let inv = root.try_inverse().ok_or(Error::SingularMap(0.0))?;
    let shape = inv.transpose() * inv;
    let shape = Matrix::from_row_slice(2, 2, &[shape[(0, 0)], shape[(0, 1)], shape[(1, 0)], shape[(1, 1)]]);
    Ellipsoid::new(from2(center), crate::geometry::ellipsoid::symmetrize(shape))
}

/// Enclosing ellipses: Löwner ellipse, its dilates and the least-area search result.
fn outer_ellipse_candidates(body: &ConvexBody, config: &SearchConfig) -> Vec<Generated> {
    let mut out = Vec::new();
    match loewner_ellipsoid(body, config.tol) {
        Ok(fit) => {
            let e = fit.ellipsoid;
            for &d in &config.dilates {
                let shape = e.shape() / (d * d);
                out.push((format!("loewner x{d}"), Ellipsoid::new(e.center().clone(), shape).map(ConvexBody::Ellipsoid)));
            }
            out.push((
                "enclosing ellipse search".into(),
                enclosing_ellipse_search(body, &e, config.local_iterations).map(ConvexBody::Ellipsoid),
            ));
        }
        Err(err) => out.push(("loewner".into(), Err(err))),
    }
    out
}

/// Upper estimate of `os_p` for `−n < p < 0` over enclosing ellipses and the body itself
/// when it is not a polytope.
pub fn estimate_outer_min(body: &ConvexBody, p: f64, config: &SearchConfig) -> Result<ExtremalEstimate> {
    let kind = ExtremalKind::OuterMin;
    require_planar(body)?;
    let nf = dim_f(body);
    in_open_range(kind, p, -nf, 0.0)?;
    require_centered(body)?;

    let mut candidates: Vec<Generated> = Vec::new();
    if !body.is_polytope() {
        candidates.push(("K".into(), Ok(body.clone())));
    }
    candidates.extend(outer_ellipse_candidates(body, config));
    let mut est = finish(kind, p, ValueBound::UpperBound, evaluate(candidates, p), false)?;

    let n = body.dim();
    let e = equivariance_exponent(n, p);
    let lower = isoperimetric_value(n, p, body.volume().value);
    let (factor, basis) = if is_symmetric(body) {
        (nf.powf(nf * e / 2.0), "os_p(B)(|K|/|B|)^e <= os_p <= n^{ne/2} os_p(B)(|K|/|B|)^e (symmetric)")
    } else {
        (nf.powf(nf * e), "os_p(B)(|K|/|B|)^e <= os_p <= n^{ne} os_p(B)(|K|/|B|)^e")
    };
    let upper = factor * lower;
    est.bound_status.push(BoundReport::new("os_p estimate", lower, est.value, upper, 1e-7 * upper.max(1.0), basis));
    est.bound_status.extend(containment_report(kind, body, est.witness.as_ref()));
    Ok(est)
}

/// Lower estimate of `OS_p` for `p > n` (including `p = ∞`) over enclosing candidates:
/// the body itself, Löwner dilates, the least-area enclosing ellipse and `conv{K, sB}`.
pub fn estimate_outer_max(body: &ConvexBody, p: f64, config: &SearchConfig) -> Result<ExtremalEstimate> {
    let kind = ExtremalKind::OuterMax;
    require_planar(body)?;
    let nf = dim_f(body);
    in_open_range(kind, p, nf, f64::INFINITY)?;
    require_centered(body)?;

    let mut candidates: Vec<Generated> = vec![("K".into(), Ok(body.clone()))];
    candidates.extend(outer_ellipse_candidates(body, config));
    let base = composite_base(body)?;
    for s in log_grid(body.inner_radius(), body.bounding_radius(), config.radii) {
        candidates.push((format!("conv(K, {}B)", sig6(s)), base.convex_hull_with_ball(s)));
    }
    let mut est = finish(kind, p, ValueBound::LowerBound, evaluate(candidates, p), true)?;

    let n = body.dim();
    let e = equivariance_exponent(n, p);
    let upper = isoperimetric_value(n, p, body.volume().value);
    let lower = nf.powf(nf * e) * upper;
    est.bound_status.push(BoundReport::new(
        "OS_p estimate",
        lower,
        est.value,
        upper,
        1e-7 * upper.max(1.0),
        "n^{ne} OS_p(B)(|K|/|B|)^e <= OS_p <= OS_p(B)(|K|/|B|)^e",
    ));
    est.bound_status.extend(containment_report(kind, body, est.witness.as_ref()));
    Ok(est)
}

/// A witness sequence showing divergence to `∞` or decay to `0` on a degenerate range.
#[derive(Clone, Debug, Serialize)]
pub struct RangeProbe {
    pub kind: ExtremalKind,
    #[serde(serialize_with = "extended_real")]
    pub p: f64,
    pub body_id: String,
    #[serde(serialize_with = "extended_real")]
    pub limit: f64,
    pub family: String,
    pub sequence: Vec<CandidateRecord>,
    pub monotone: bool,
}

impl RangeProbe {
    pub fn with_body_id(mut self, id: impl Into<String>) -> Self {
        self.body_id = id.into();
        self
    }

    pub fn values(&self) -> Vec<f64> {
        self.sequence.iter().map(|c| c.value).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("probe serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("body_id,kind,p,index,descriptor,value,limit\n");
        for c in &self.sequence {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                self.body_id,
                self.kind,
                sig6(self.p),
                c.index,
                c.descriptor,
                sig6(c.value),
                sig6(self.limit)
            ));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    ShrinkingBalls,
    GrowingBalls,
    SmoothedInscribed,
    SmoothedCircumscribed,
    RoundedSquares,
    InscribedPolygons,
}

impl Family {
    fn name(&self) -> &'static str {
        match self {
            Family::ShrinkingBalls => "shrinking balls",
            Family::GrowingBalls => "growing balls",
            Family::SmoothedInscribed => "smoothed inscribed polygons",
            Family::SmoothedCircumscribed => "smoothed circumscribed polygons",
            Family::RoundedSquares => "rounded squares",
            Family::InscribedPolygons => "inscribed polygons",
        }
    }
}

fn probe_family(kind: ExtremalKind, p: f64, n: f64) -> Option<(Family, f64)> {
    let inf = f64::INFINITY;
    match kind {
        ExtremalKind::InnerMax if p > n || p < -n => Some((Family::ShrinkingBalls, inf)),
        ExtremalKind::InnerMax if p < 0.0 => Some((Family::SmoothedInscribed, inf)),
        ExtremalKind::OuterMax if p < -n => Some((Family::RoundedSquares, inf)),
        ExtremalKind::OuterMax if p < n => Some((Family::GrowingBalls, inf)),
        ExtremalKind::OuterMin if p > 0.0 => Some((Family::SmoothedCircumscribed, 0.0)),
        ExtremalKind::OuterMin if p < -n => Some((Family::GrowingBalls, 0.0)),
        ExtremalKind::InnerMin if p > 0.0 => Some((Family::SmoothedInscribed, 0.0)),
        ExtremalKind::InnerMin if p < -n => Some((Family::InscribedPolygons, 0.0)),
        ExtremalKind::InnerMin => Some((Family::ShrinkingBalls, 0.0)),
        _ => None,
    }
}

fn is_monotone(values: &[f64], limit: f64) -> bool {
    if values.iter().any(|v| v.is_nan()) {
        return false;
    }
    if limit.is_infinite() {
        values.windows(2).all(|w| w[1] > w[0] || (w[0].is_infinite() && w[1].is_infinite()))
    } else {
        let steps = values.windows(2).all(|w| (w[1] - limit).abs() <= (w[0] - limit).abs());
        let progress = values.first().map_or(true, |f| *f == limit || values.last().unwrap() != f);
        steps && progress && values.iter().all(|v| *v >= 0.0)
    }
}

/// Witness sequence for `kind` at a finite `p` in a degenerate range.
pub fn range_probe(body: &ConvexBody, kind: ExtremalKind, p: f64) -> Result<RangeProbe> {
    let n = body.dim();
    check_finite_p(p, n)?;
    if p.is_infinite() {
        return Err(Error::InvalidInput("range probes take a finite p".into()));
    }
    let nf = n as f64;
    let (family, limit) = probe_family(kind, p, nf)
        .ok_or_else(|| Error::NotDivergentRange { kind: kind.symbol().into(), p })?;
    let zero = Vector::zeros(n);
    let candidates: Vec<Generated> = match family {
        Family::ShrinkingBalls => {
            let r0 = body.inner_radius();
            (0..WITNESSES)
                .map(|k| {
                    let r = r0 * 0.5f64.powi(k as i32);
                    (format!("ball r={}", sig6(r)), ConvexBody::ball(zero.clone(), r))
                })
                .collect()
        }
        Family::GrowingBalls => {
            let r0 = body.bounding_radius();
            (0..WITNESSES)
                .map(|k| {
                    let r = r0 * 2f64.powi(k as i32);
                    (format!("ball r={}", sig6(r)), ConvexBody::ball(zero.clone(), r))
                })
                .collect()
        }
        Family::SmoothedInscribed | Family::SmoothedCircumscribed => {
            require_planar(body)?;
            let inside = family == Family::SmoothedInscribed;
            let polygon = match polygon_of(body) {
                Some(poly) => poly,
                None if inside => inscribed_polygon(body, 8, 0.0)?,
                None => circumscribed_polygon(body, 8)?,
            };
            let support = body.support_samples(SearchConfig::default().grid);
            (0..WITNESSES)
                .map(|k| {
                    let sigma = 0.2 * 0.5f64.powi(k as i32);
                    (format!("polygon smoothed {}", sig6(sigma)), smoothed_fit(&support, &polygon, sigma, inside))
                })
                .collect()
        }
        Family::InscribedPolygons => {
            require_planar(body)?;
            (0..WITNESSES)
                .map(|k| {
                    let count = k + 3;
                    let poly = inscribed_polygon(body, count, 0.1).and_then(|v| {
                        let pts: Vec<[f64; 2]> = v.iter().map(|x| [x.x, x.y]).collect();
                        ConvexBody::polygon(&pts)
                    });
                    (format!("inscribed {count}-gon"), poly)
                })
                .collect()
        }
        Family::RoundedSquares => {
            require_planar(body)?;
            let t = body.bounding_radius();
            let square = [Vector2::new(t, -t), Vector2::new(t, t), Vector2::new(-t, t), Vector2::new(-t, -t)];
            let sequence: Vec<CandidateRecord> = (1..=WITNESSES)
                .map(|k| {
                    let eps = t * 0.5f64.powi(k as i32);
                    let value = ArcPolygon::rounded_polygon(&square, eps)
                        .affine_surface_integral(p)
                        .unwrap_or(f64::NAN);
                    CandidateRecord {
                        index: k - 1,
                        descriptor: format!("square {} rounded {}", sig6(t), sig6(eps)),
                        value,
                        note: None,
                    }
                })
                .collect();
            let monotone = is_monotone(&sequence.iter().map(|c| c.value).collect::<Vec<_>>(), limit);
            return Ok(RangeProbe { kind, p, body_id: String::new(), limit, family: family.name().into(), sequence, monotone });
        }
    };
    let sequence = evaluate(candidates, p).records;
    let values: Vec<f64> = sequence.iter().map(|c| c.value).collect();
    Ok(RangeProbe {
        kind,
        p,
        body_id: String::new(),
        limit,
        family: family.name().into(),
        monotone: is_monotone(&values, limit),
        sequence,
    })
}

/// Normalized extremal maps along a grid of `p`.
#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub kind: ExtremalKind,
    pub p_grid: Vec<f64>,
    pub normalized: Vec<f64>,
    /// Estimates are exact (ellipsoid inputs), so violations are failures.
    pub exact: bool,
    pub reports: Vec<BoundReport>,
    pub warnings: Vec<String>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        !self.exact || self.reports.iter().all(|r| r.pass)
    }
}

/// Checks that `(IS_p/(n|K|))^{(n+p)/p}` increases and `(OS_p/(n|K°|))^{(n+p)/p}`,
/// `(os_p/(n|K°|))^{(n+p)/p}` decrease along `p_grid`. Violations on non-ellipsoids,
/// where the estimates are one-sided, are reported as warnings.
pub fn verify_monotonicity(
    body: &ConvexBody,
    kind: ExtremalKind,
    p_grid: &[f64],
    config: &SearchConfig,
) -> Result<MonotonicityReport> {
    if kind == ExtremalKind::InnerMin {
        return Err(Error::InvalidInput("is_p vanishes identically".into()));
    }
    if p_grid.iter().any(|p| *p == 0.0 || p.is_nan()) {
        return Err(Error::InvalidInput("the normalized maps are undefined at p = 0".into()));
    }
    let n = body.dim();
    let nf = n as f64;
    let mut grid = p_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let reference = if kind == ExtremalKind::InnerMax {
        nf * body.volume().value
    } else {
        nf * body.polar()?.volume().value
    };
    let values: Vec<f64> = grid
        .iter()
        .map(|&p| estimate(body, kind, p, config).map(|e| e.value))
        .collect::<Result<_>>()?;
    let normalized: Vec<f64> = grid
        .iter()
        .zip(&values)
        .map(|(&p, &x)| {
            let power = if p.is_infinite() { 1.0 } else { (nf + p) / p };
            (x / reference).powf(power)
        })
        .collect();
    let exact = body.as_ellipsoid().is_some();
    let mut reports = Vec::new();
    let mut warnings = Vec::new();
    for i in 1..grid.len() {
        let (prev, next) = (normalized[i - 1], normalized[i]);
        let tol = 1e-9 * prev.abs().max(next.abs()).max(1.0);
        let quantity = format!("{} map from p={} to p={}", kind, sig6(grid[i - 1]), sig6(grid[i]));
        let report = if kind == ExtremalKind::InnerMax {
            BoundReport::at_least(quantity, prev, next, tol, "non-decreasing in p")
        } else {
            BoundReport::at_most(quantity, next, prev, tol, "non-increasing in p")
        };
        if !report.pass && !exact {
            warnings.push(format!("{}: {} then {}", report.quantity, sig6(prev), sig6(next)));
        }
        reports.push(report);
    }
    Ok(MonotonicityReport { kind, p_grid: grid, normalized, exact, reports, warnings })
}

/// A body `K'` with `(1−ε)K ⊆ K' ⊆ (1+ε)K`: radial jitter of polygon vertices, or a
/// relative perturbation `h(1 + ε cos(3θ + φ))` of a smooth planar support function.
pub fn perturb(body: &ConvexBody, eps: f64, seed: u64) -> Result<ConvexBody> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidInput("perturbation size must lie in [0, 1)".into()));
    }
    if eps == 0.0 {
        return Ok(body.clone());
    }
    let mut rng = stream_rng(seed, 0);
    if let Some(poly) = body.polytope() {
        let points: Vec<Vector> = poly.vertices().iter().map(|v| v * (1.0 + eps * rng.gen_range(-1.0..=1.0))).collect();
        return ConvexBody::vpolytope(&points);
    }
    require_planar(body)?;
    let base = body.to_support2d()?;
    let phase: f64 = rng.gen_range(0.0..2.0 * PI);
    let s = SupportBody2D::from_fn(|t| base.support_at(t) * (1.0 + eps * (3.0 * t + phase).cos()), base.grid())?;
    Ok(ConvexBody::Support2D(s))
}

/// Compares the extremal quantity of a sandwiched perturbation with the scaling envelope
/// `[(1∓ε)^{n(n−p)/(n+p)}]`; `slack` is the relative estimator tolerance.
pub fn perturbation_smoke(
    body: &ConvexBody,
    kind: ExtremalKind,
    p: f64,
    eps: f64,
    slack: f64,
    seed: u64,
    config: &SearchConfig,
) -> Result<BoundReport> {
    let n = body.dim();
    let base = estimate(body, kind, p, config)?.value;
    let perturbed = perturb(body, eps, seed)?;
    let perturbed = if eps == 0.0 { perturbed } else { perturbed.centered() };
    let value = estimate(&perturbed, kind, p, config)?.value;
    let power = n as f64 * equivariance_exponent(n, p);
    let a = (1.0 - eps).powf(power);
    let b = (1.0 + eps).powf(power);
    let (lower, upper) = if base.is_finite() { (base * a.min(b), base * a.max(b)) } else { (base, base) };
    let tol = if base.is_finite() { slack * base.abs() } else { 0.0 };
    Ok(BoundReport::new(
        format!("{kind}_p of a {eps}-perturbation"),
        lower,
        value,
        upper,
        tol,
        "inclusion monotonicity with (1-eps)K ⊆ K' ⊆ (1+eps)K",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ConvexBody {
        ConvexBody::cube(2, 1.0).unwrap()
    }

    fn fast() -> SearchConfig {
        SearchConfig { radii: 12, local_iterations: 200, ..SearchConfig::default() }
    }

    #[test]
    fn closed_forms() {
        let sq = square();
        let v = |k, p| closed_form_extremal(&sq, k, p).unwrap().map(|e| e.value);
        assert_eq!(v(ExtremalKind::InnerMax, 0.0), Some(8.0));
        assert!((v(ExtremalKind::InnerMax, 2.0).unwrap() - 2.0 * PI).abs() < 1e-15);
        assert!((v(ExtremalKind::OuterMax, 2.0).unwrap() - 2.0 * PI).abs() < 1e-15);
        assert_eq!(v(ExtremalKind::OuterMin, 0.0), Some(8.0));
        assert_eq!(v(ExtremalKind::InnerMin, 1.0), Some(0.0));
        assert_eq!(v(ExtremalKind::InnerMax, 3.0), Some(f64::INFINITY));
        assert_eq!(v(ExtremalKind::InnerMax, -1.0), Some(f64::INFINITY));
        assert_eq!(v(ExtremalKind::OuterMax, 1.0), Some(f64::INFINITY));
        assert_eq!(v(ExtremalKind::OuterMin, 1.0), Some(0.0));
        assert_eq!(v(ExtremalKind::OuterMin, -3.0), Some(0.0));
        assert_eq!(v(ExtremalKind::InnerMax, 1.0), None);
        assert_eq!(v(ExtremalKind::OuterMin, -1.0), None);
        assert_eq!(v(ExtremalKind::OuterMax, f64::INFINITY), None);
        assert!(matches!(closed_form_extremal(&sq, ExtremalKind::InnerMax, -2.0), Err(Error::PEqualsMinusN(2))));
    }

    #[test]
    fn kind_round_trip() {
        for s in ["IS", "is", "OS", "os"] {
            assert_eq!(s.parse::<ExtremalKind>().unwrap().symbol(), s);
        }
        assert!("Is".parse::<ExtremalKind>().is_err());
    }

    #[test]
    fn inner_max_square_sandwich() {
        let est = estimate_inner_max(&square(), 1.0, &fast()).unwrap();
        let upper = 2.0 * PI.powf(2.0 / 3.0) * 4f64.powf(1.0 / 3.0);
        assert!(est.value >= 2.0 * PI - 1e-9, "{}", est.value);
        assert!(est.value <= upper + 1e-7);
        assert!(est.passed(), "{:?}", est.bound_status);
    }

    #[test]
    fn ellipse_is_its_own_witness() {
        let e = ConvexBody::ellipse(2.0, 1.0).unwrap();
        let config = fast();
        let exact = |p: f64| 2f64.powf(equivariance_exponent(2, p)) * 2.0 * PI;
        for (est, p) in [
            (estimate_inner_max(&e, 1.0, &config).unwrap(), 1.0),
            (estimate_outer_min(&e, -1.0, &config).unwrap(), -1.0),
            (estimate_outer_max(&e, 4.0, &config).unwrap(), 4.0),
        ] {
            assert_eq!(est.witness_descriptor.as_deref(), Some("K"), "{:?}", est.candidate_log);
            assert!((est.value - exact(p)).abs() < 1e-6 * exact(p));
            assert!(est.passed(), "{:?}", est.bound_status);
        }
    }

    #[test]
    fn outer_min_square() {
        let est = estimate_outer_min(&square(), -1.0, &fast()).unwrap();
        assert!(est.value <= 16.0 * PI + 1e-9);
        assert!((est.value - 16.0 * PI).abs() < 1e-6, "{}", est.value);
        let b = &est.bound_status[0];
        assert!((b.lower - 128.0 / (PI * PI)).abs() < 1e-9);
        assert!((b.upper - 1024.0 / (PI * PI)).abs() < 1e-9);
        assert!(est.passed());
    }

    #[test]
    fn outer_max_square_at_infinity() {
        let est = estimate_outer_max(&square(), f64::INFINITY, &fast()).unwrap();
        assert!((est.value - PI).abs() < 1e-6, "{}", est.value);
        assert!(est.passed(), "{:?}", est.bound_status);
    }

    #[test]
    fn balls_are_extremal() {
        let b = ConvexBody::unit_ball(2);
        let config = fast();
        for est in [
            estimate_inner_max(&b, 1.0, &config).unwrap(),
            estimate_outer_min(&b, -1.0, &config).unwrap(),
            estimate_outer_max(&b, 4.0, &config).unwrap(),
        ] {
            assert!((est.value - 2.0 * PI).abs() < 1e-9);
        }
    }

    #[test]
    fn out_of_range_p() {
        let sq = square();
        let c = fast();
        assert!(matches!(estimate_inner_max(&sq, 2.5, &c), Err(Error::POutOfRange { .. })));
        assert!(matches!(estimate_outer_min(&sq, 0.5, &c), Err(Error::POutOfRange { .. })));
        assert!(matches!(estimate_outer_max(&sq, 1.0, &c), Err(Error::POutOfRange { .. })));
        let moved = sq.translate(&Vector::from_vec(vec![0.5, 0.0]));
        assert!(matches!(estimate_inner_max(&moved, 1.0, &c), Err(Error::NotCentered(_))));
    }

    #[test]
    fn range_probes_are_monotone() {
        let sq = square();
        let disk = ConvexBody::ellipse(1.5, 1.0).unwrap();
        let cases = [
            (ExtremalKind::InnerMax, 3.0),
            (ExtremalKind::InnerMax, -3.0),
            (ExtremalKind::InnerMax, -1.0),
            (ExtremalKind::OuterMax, 1.0),
            (ExtremalKind::OuterMax, -3.0),
            (ExtremalKind::OuterMin, 1.0),
            (ExtremalKind::OuterMin, -3.0),
            (ExtremalKind::InnerMin, 1.0),
            (ExtremalKind::InnerMin, -1.0),
            (ExtremalKind::InnerMin, -3.0),
        ];
        for body in [&sq, &disk] {
            for (kind, p) in cases {
                let probe = range_probe(body, kind, p).unwrap();
                assert!(probe.sequence.len() >= 5);
                assert!(probe.monotone, "{kind} p={p}: {:?}", probe.values());
            }
        }
        let probe = range_probe(&sq, ExtremalKind::InnerMax, 3.0).unwrap();
        let v = probe.values();
        assert!((v[1] / v[0] - 0.5f64.powf(-0.4)).abs() < 1e-12);
        let rounded = range_probe(&sq, ExtremalKind::OuterMax, -3.0).unwrap().values();
        let ratios: Vec<f64> = rounded.windows(2).map(|w| w[1] / w[0]).collect();
        assert!(ratios.windows(2).all(|r| r[1] < r[0] && r[1] > 4.0), "{ratios:?}");
        assert!(ratios[4] < 4.5, "{ratios:?}");
        assert!(matches!(
            range_probe(&sq, ExtremalKind::InnerMax, 1.0),
            Err(Error::NotDivergentRange { .. })
        ));
    }

    #[test]
    fn monotonicity_on_ellipses() {
        let config = fast();
        for body in [ConvexBody::unit_ball(2), ConvexBody::ellipse(2.0, 0.5).unwrap()] {
            let r = verify_monotonicity(&body, ExtremalKind::InnerMax, &[0.5, 1.0, 1.5, 2.0], &config).unwrap();
            assert!(r.exact && r.passed(), "{:?}", r.reports);
            let r = verify_monotonicity(&body, ExtremalKind::OuterMin, &[-1.5, -1.0, -0.5], &config).unwrap();
            assert!(r.passed(), "{:?}", r.reports);
        }
        let single = verify_monotonicity(&square(), ExtremalKind::InnerMax, &[1.0], &config).unwrap();
        assert!(single.reports.is_empty() && single.passed());
    }

    #[test]
    fn perturbation_envelopes() {
        let config = fast();
        let disk = ConvexBody::unit_ball(2);
        let same = perturbation_smoke(&disk, ExtremalKind::InnerMax, 1.0, 0.0, 0.0, 1, &config).unwrap();
        assert!(same.pass && same.value == same.lower);
        let r = perturbation_smoke(&disk, ExtremalKind::InnerMax, 1.0, 0.01, 1e-6, 1, &config).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.upper / (2.0 * PI) - 1.01f64.powf(2.0 / 3.0)).abs() < 1e-12);
        let r = perturbation_smoke(&square(), ExtremalKind::InnerMax, 1.0, 0.01, 0.01, 3, &config).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn estimates_scale_with_the_body() {
        let config = fast();
        let sq = square();
        let big = sq.scale(1.7).unwrap();
        let a = estimate_inner_max(&sq, 1.0, &config).unwrap().value;
        let b = estimate_inner_max(&big, 1.0, &config).unwrap().value;
        assert!((b / a - 1.7f64.powf(2.0 / 3.0)).abs() < 1e-9, "{a} {b}");
        let a = estimate_outer_min(&sq, -1.0, &config).unwrap().value;
        let b = estimate_outer_min(&big, -1.0, &config).unwrap().value;
        assert!((b / a - 1.7f64.powf(6.0)).abs() < 1e-9);
    }

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let (x, v) = nelder_mead(|x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2), &[0.0, 0.0], &[0.5, 0.5], 500);
        assert!((x[0] - 1.0).abs() < 1e-6 && (x[1] + 2.0).abs() < 1e-6 && v < 1e-12);
    }

    #[test]
    fn csv_and_json() {
        let est = estimate_outer_min(&square(), -1.0, &fast()).unwrap().with_body_id("square");
        let csv = est.to_csv();
        assert!(csv.starts_with("body_id,kind,p,index"));
        assert_eq!(csv.lines().count(), est.candidate_log.len() + 1);
        let json: serde_json::Value = serde_json::from_str(&est.to_json()).unwrap();
        assert_eq!(json["kind"], "os");
        assert_eq!(json["body_id"], "square");
    }
}
