//! Hit-and-run sampling, empirical thin-shell masses, and the shell partition used to
//! truncate an isotropic body to `K ∩ R·B`.

use crate::curvature::spherical_fraction;
use crate::error::{Error, Result};
use crate::fit::IsotropicBody;
use crate::geometry::ConvexBody;
use crate::report::BoundReport;
use crate::util::{batch_means, random_direction, stream_rng, unit_ball_volume, Vector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const DEFAULT_BURN_IN: usize = 50;
/// Independent chains; each owns one RNG stream, so output does not depend on thread count.
pub const CHAINS: usize = 16;
const WARMUP_FACTOR: usize = 20;

/// Number of points produced by chain `c` when `count` points are split over `chains`.
fn chain_len(count: usize, chains: usize, c: usize) -> usize {
    count / chains + usize::from(c < count % chains)
}

/// `count` points of the uniform distribution on the body by hit-and-run from the origin.
/// Each chain warms up for `20·burn_in` steps and then records a point every `burn_in` steps.
pub fn hit_and_run(body: &ConvexBody, count: usize, burn_in: usize, seed: u64) -> Result<Vec<Vector>> {
    hit_and_run_streams(body, count, burn_in, seed, 0)
}

pub(crate) fn hit_and_run_streams(
    body: &ConvexBody,
    count: usize,
    burn_in: usize,
    seed: u64,
    stream_base: u64,
) -> Result<Vec<Vector>> {
    if !(body.inner_radius() > 0.0) {
        return Err(Error::OriginNotInterior);
    }
    let n = body.dim();
    let burn_in = burn_in.max(1);
    let chains = CHAINS.min(count.max(1));
    let parts: Vec<Vec<Vector>> = (0..chains)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, stream_base + c as u64);
            let mut x = Vector::zeros(n);
            let step = |x: &mut Vector, rng: &mut rand_chacha::ChaCha8Rng| {
                let d = random_direction(rng, n);
                let (lo, hi) = body.chord(x, &d);
                if hi > lo {
                    *x += d * rng.gen_range(lo..hi);
                }
            };
            for _ in 0..WARMUP_FACTOR * burn_in {
                step(&mut x, &mut rng);
            }
            let len = chain_len(count, chains, c);
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                for _ in 0..burn_in {
                    step(&mut x, &mut rng);
                }
                out.push(x.clone());
            }
            out
        })
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

/// Normalized distance of `x` from the thin-shell radius: `|‖x‖ − L√n| / (L n^{1/3})`.
fn shell_deviation(x: &Vector, l_k: f64, n: usize) -> f64 {
    let nf = n as f64;
    (x.norm() - l_k * nf.sqrt()).abs() / (l_k * nf.cbrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct ThinShellReport {
    pub dim: usize,
    pub l_k: f64,
    pub c_thin: f64,
    /// Fraction of samples with `|‖x‖ − L√n| < c·L·n^{1/3}`.
    pub mass: f64,
    pub std_error: f64,
    /// Smallest `c` on the 0.01 grid whose shell holds at least half the samples.
    pub c_half: f64,
    pub samples: usize,
}

/// Empirical mass of the thin shell of half-width `c_thin·L_K·n^{1/3}` around radius `L_K√n`.
pub fn thin_shell_check(iso: &IsotropicBody, c_thin: f64, samples: usize, seed: u64) -> Result<ThinShellReport> {
    iso.certificate.verify()?;
    if samples == 0 {
        return Err(Error::InvalidInput("at least one sample is needed".into()));
    }
    let n = iso.body.dim();
    let l_k = iso.certificate.l_k;
    let points = hit_and_run(&iso.body, samples, DEFAULT_BURN_IN, seed)?;
    let devs: Vec<f64> = points.iter().map(|x| shell_deviation(x, l_k, n)).collect();
    let hits: Vec<f64> = devs.iter().map(|&d| if d < c_thin { 1.0 } else { 0.0 }).collect();
    let (mass, std_error) = batch_means(&hits, CHAINS);
    let mut sorted = devs.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[(sorted.len() + 1) / 2 - 1];
    let c_half = ((median / 0.01).floor() + 1.0) * 0.01;
    Ok(ThinShellReport { dim: n, l_k, c_thin, mass, std_error, c_half, samples })
}

/// Number of shells beyond the first: `⌊n log₂((√n + c n^{1/3})/(√n − c n^{1/3}))⌋`.
pub fn shell_count(n: usize, c_thin: f64) -> Result<usize> {
    let nf = n as f64;
    if !(c_thin > 0.0) {
        return Err(Error::InvalidInput("c_thin must be positive".into()));
    }
    if c_thin >= nf.powf(1.0 / 6.0) {
        return Err(Error::ConstructionRefused(format!(
            "c_thin = {c_thin} must be below n^(1/6) = {:.6} so the inner shell radius is positive",
            nf.powf(1.0 / 6.0)
        )));
    }
    let ratio = (nf.sqrt() + c_thin * nf.cbrt()) / (nf.sqrt() - c_thin * nf.cbrt());
    Ok((nf * ratio.log2()).floor() as usize)
}

#[derive(Clone, Debug, Serialize)]
pub struct Shell {
    pub index: usize,
    pub inner: f64,
    pub outer: f64,
    pub mass: f64,
}

/// Shells `2^{i/n}ℓ < ‖x‖ ≤ 2^{(i+1)/n}ℓ`, `ℓ = L_K(√n − c n^{1/3})`, `i = 0..=k_n`, with
/// masses from one shared sample, and the heaviest shell's inner radius `R`.
#[derive(Clone, Debug, Serialize)]
pub struct ShellPartition {
    #[serde(skip)]
    pub body: ConvexBody,
    pub dim: usize,
    pub l_k: f64,
    pub c_thin: f64,
    pub k_n: usize,
    pub ell: f64,
    pub shells: Vec<Shell>,
    pub chosen_index: usize,
    pub radius: f64,
    /// Mass of the thin shell `|‖x‖ − L√n| < c L n^{1/3}` on the same sample.
    pub thin_shell_mass: f64,
    /// `thin_shell_mass / (k_n + 1)`, which the chosen shell must reach.
    pub shell_mass_lower: f64,
    pub pigeonhole_holds: bool,
    pub samples: usize,
    /// Sampled points of the chosen shell.
    #[serde(skip)]
    pub chosen_points: Vec<Vector>,
}

pub fn build_shell_partition(iso: &IsotropicBody, c_thin: f64, samples: usize, seed: u64) -> Result<ShellPartition> {
    iso.certificate.verify()?;
    let n = iso.body.dim();
    let nf = n as f64;
    let k_n = shell_count(n, c_thin)?;
    let l_k = iso.certificate.l_k;
    let ell = l_k * (nf.sqrt() - c_thin * nf.cbrt());
    let points = hit_and_run(&iso.body, samples, DEFAULT_BURN_IN, seed)?;
    let total = points.len() as f64;
    let bound = |i: usize| 2f64.powf(i as f64 / nf) * ell;
    let mut counts = vec![0usize; k_n + 1];
    let mut shell_of = Vec::with_capacity(points.len());
    let mut thin = 0usize;
    for x in &points {
        let r = x.norm();
        let idx = (0..=k_n).find(|&i| r > bound(i) && r <= bound(i + 1));
        if let Some(i) = idx {
            counts[i] += 1;
        }
        shell_of.push(idx);
        if shell_deviation(x, l_k, n) < c_thin {
            thin += 1;
        }
    }
    let shells: Vec<Shell> = (0..=k_n)
        .map(|i| Shell { index: i, inner: bound(i), outer: bound(i + 1), mass: counts[i] as f64 / total })
        .collect();
    // first maximal index on ties
    let chosen_index = (0..=k_n).fold(0, |best, i| if counts[i] > counts[best] { i } else { best });
    let thin_shell_mass = thin as f64 / total;
    let shell_mass_lower = thin_shell_mass / (k_n + 1) as f64;
    let chosen_points = points
        .iter()
        .zip(&shell_of)
        .filter(|(_, s)| **s == Some(chosen_index))
        .map(|(x, _)| x.clone())
        .collect();
    Ok(ShellPartition {
        body: iso.body.clone(),
        dim: n,
        l_k,
        c_thin,
        k_n,
        ell,
        pigeonhole_holds: shells[chosen_index].mass >= shell_mass_lower,
        radius: bound(chosen_index),
        shells,
        chosen_index,
        thin_shell_mass,
        shell_mass_lower,
        samples: points.len(),
        chosen_points,
    })
}

impl ShellPartition {
    /// Outer radius of the thin shell, `L_K(√n + c n^{1/3})`.
    pub fn thin_shell_outer(&self) -> f64 {
        let nf = self.dim as f64;
        self.l_k * (nf.sqrt() + self.c_thin * nf.cbrt())
    }

    /// Points of the chosen shell that, scaled by `2^{−1/n}`, fall outside `S_O`: either the
    /// direction has `ρ_K ≤ R` or the scaled point lies beyond radius `R`.
    pub fn inclusion_violations(&self) -> Result<usize> {
        let shrink = 2f64.powf(-1.0 / self.dim as f64);
        let mut bad = 0;
        for x in &self.chosen_points {
            let r = x.norm();
            let rho = self.body.radial(&(x / r))?;
            if !(rho > self.radius) || r * shrink > self.radius * (1.0 + 1e-12) {
                bad += 1;
            }
        }
        Ok(bad)
    }

    /// Structural checks: `R ≤ 2√n L_K`, `R` inside the thin shell, the pigeonhole bound and
    /// the top shell reaching the thin shell's outer radius.
    pub fn reports(&self) -> Vec<BoundReport> {
        let nf = self.dim as f64;
        vec![
            BoundReport::at_most("R", self.radius, 2.0 * nf.sqrt() * self.l_k, 1e-12, "truncation radius at most 2√n·L_K"),
            BoundReport::new("R", self.ell, self.radius, self.thin_shell_outer(), 1e-12, "truncation radius inside the thin shell"),
            BoundReport::at_least(
                "chosen shell mass",
                self.shell_mass_lower,
                self.shells[self.chosen_index].mass,
                0.0,
                "heaviest of k_n+1 shells holds a 1/(k_n+1) share of the thin shell",
            ),
            BoundReport::at_least(
                "outer shell radius",
                self.thin_shell_outer(),
                self.shells.last().map(|s| s.outer).unwrap_or(0.0),
                1e-12,
                "shells cover the thin shell",
            ),
        ]
    }
}

/// Spherical part `S_O = {rθ : ρ_K(θ) > R, 0 ≤ r ≤ R}` of `K ∩ R·B`.
#[derive(Clone, Debug, Serialize)]
pub struct SoSet {
    pub dim: usize,
    pub radius: f64,
    pub directions: usize,
    /// Normalized spherical measure of `O = {θ : ρ_K(θ) > R}`.
    pub sigma: f64,
    pub sigma_std_error: f64,
    /// `σ(O)·Rⁿ·|B|`.
    pub volume: f64,
    pub volume_std_error: f64,
}

pub fn build_so(body: &ConvexBody, radius: f64, directions: usize, seed: u64) -> Result<SoSet> {
    if !(radius > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let n = body.dim();
    let (sigma, sigma_std_error) = spherical_fraction(body, radius, directions, seed)?;
    let cone = radius.powi(n as i32) * unit_ball_volume(n);
    Ok(SoSet {
        dim: n,
        radius,
        directions,
        sigma,
        sigma_std_error,
        volume: sigma * cone,
        volume_std_error: sigma_std_error * cone,
    })
}

impl SoSet {
    /// `|S_O| ≥ 2^{-1}|L_{i₀}|` with `|L_{i₀}|` the chosen shell's mass fraction of `|K|`,
    /// allowing three standard errors of both estimates.
    pub fn volume_report(&self, partition: &ShellPartition, body_volume: f64) -> BoundReport {
        let shell = partition.shells[partition.chosen_index].mass * body_volume;
        let shell_se = (partition.shells[partition.chosen_index].mass / partition.samples.max(1) as f64).sqrt() * body_volume;
        let tol = 3.0 * (self.volume_std_error.powi(2) + (0.5 * shell_se).powi(2)).sqrt();
        BoundReport::at_least("|S_O|", 0.5 * shell, self.volume, tol, "chosen shell scaled by 2^{-1/n} lies in S_O")
    }
}
