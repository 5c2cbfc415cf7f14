use affsurf::corpus::{random_ellipse, random_polygon, random_smooth_body, random_symmetric_polygon};
use affsurf::curvature::{
    asp, asp1_floating_limit_2d, asp_quadrature_2d, default_deltas, equivariance_exponent, isoperimetric_report,
    isoperimetric_value, spherical_fraction,
};
use affsurf::extremal::{
    closed_form_extremal, estimate_inner_max, estimate_outer_min, range_probe, ExtremalKind, SearchConfig,
};
use affsurf::fit::{isotropic_image, isotropic_position, loewner_ellipsoid, MomentMethod, DEFAULT_TOL};
use affsurf::quermass::{
    default_t_grid, homogeneity_degree, non_quermass_report, steiner_fit, HomogeneityTarget,
};
use affsurf::sampling::{build_shell_partition, build_so, hit_and_run, DEFAULT_BURN_IN};
use affsurf::util::{from2, random_direction, stream_rng, unit2, unit_ball_volume, unit_sphere_area, Matrix, Vector};
use affsurf::{AffineMap, ConvexBody, Ellipsoid, SupportBody2D};
use rand::Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

type Check = Result<String, String>;

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn criterion_ball_identity() -> Check {
    let disk = SupportBody2D::disk(1.0, 256).map_err(fail)?;
    let mut worst = 0.0f64;
    for p in [0.0, 0.5, 1.0, 1.5, 2.0] {
        let value = asp_quadrature_2d(&disk, p, 256).map_err(fail)?.value;
        worst = worst.max((value - 2.0 * PI).abs());
    }
    ensure(worst < 1e-9, || format!("max |as_p - 2π| = {worst:e}"))?;
    Ok(format!("max |as_p(disk) - 2π| = {worst:.1e}"))
}

fn criterion_equivariance() -> Check {
    let mut worst = 0.0f64;
    for trial in 0..100u64 {
        let mut rng = stream_rng(2, trial);
        let ellipse = random_ellipse(&mut rng).map_err(fail)?;
        let support = ConvexBody::Support2D(ellipse.to_support2d().map_err(fail)?);
        let angle: f64 = rng.gen_range(0.0..2.0 * PI);
        let (c, s) = (angle.cos(), angle.sin());
        let d1 = 4f64.powf(rng.gen_range(-1.0..1.0));
        let d2 = 4f64.powf(rng.gen_range(-1.0..1.0));
        let m = if trial % 2 == 0 {
            Matrix::from_row_slice(2, 2, &[d1, 0.0, 0.0, d2])
        } else {
            Matrix::from_row_slice(2, 2, &[c * d1, -s * d2, s * d1, c * d2])
        };
        let map = AffineMap::linear(m).map_err(fail)?;
        for p in [0.5, 1.0, 1.5] {
            let factor = map.det_abs().powf(equivariance_exponent(2, p));
            for body in [&ellipse, &support] {
                let base = asp(body, p).map_err(fail)?.value;
                let image = asp(&body.apply_affine(&map).map_err(fail)?, p).map_err(fail)?.value;
                worst = worst.max(relative(image, factor * base));
            }
        }
    }
    ensure(worst < 1e-7, || format!("max relative error {worst:e}"))?;
    Ok(format!("300 map/p pairs on closed-form and quadrature ellipses, max relative error {worst:.1e}"))
}

fn criterion_floating_oracle() -> Check {
    let smooth = random_smooth_body(&mut stream_rng(3, 0)).map_err(fail)?;
    let cases = [
        ("disk", ConvexBody::unit_ball(2), SupportBody2D::disk(1.0, 4096).map_err(fail)?),
        ("ellipse(2,1)", ConvexBody::ellipse(2.0, 1.0).map_err(fail)?, SupportBody2D::ellipse(2.0, 1.0, 4096).map_err(fail)?),
        ("random smooth", smooth.clone(), smooth.to_support2d().map_err(fail)?),
    ];
    let mut parts = Vec::new();
    for (name, body, support) in cases {
        let limit = asp1_floating_limit_2d(&body, &default_deltas()).map_err(fail)?.value;
        let centered = support.translate(&(-support.centroid()));
        let quad = asp_quadrature_2d(&centered, 1.0, centered.grid()).map_err(fail)?.value;
        let err = relative(limit, quad);
        ensure(err < 0.02, || format!("{name}: floating {limit} vs quadrature {quad}"))?;
        parts.push(format!("{name} {:.2}%", 100.0 * err));
    }
    Ok(format!("relative gaps {}", parts.join(", ")))
}

fn criterion_isoperimetric() -> Check {
    let mut checks = 0;
    for i in 0..50u64 {
        let body = random_smooth_body(&mut stream_rng(4, i)).map_err(fail)?;
        for p in [0.5, 1.0, 1.5, -0.5, -1.0] {
            let report = isoperimetric_report(&body, p).map_err(fail)?;
            ensure(report.pass, || format!("body {i}, p = {p}: {} vs [{}, {}]", report.value, report.lower, report.upper))?;
            checks += 1;
        }
    }
    let mut worst = 0.0f64;
    for i in 0..10u64 {
        let ellipse = random_ellipse(&mut stream_rng(5, i)).map_err(fail)?;
        let area = ellipse.volume().value;
        for p in [0.5, 1.0, 1.5, -0.5, -1.0] {
            let value = asp(&ellipse, p).map_err(fail)?.value;
            worst = worst.max(relative(value, isoperimetric_value(2, p, area)));
        }
    }
    ensure(worst < 1e-7, || format!("ellipse equality off by {worst:e}"))?;
    Ok(format!("{checks} smooth-body inequalities hold, ellipse equality within {worst:.1e}"))
}

/// Largest `λ` needed to cover sampled boundary points of `e` by `c + λ(K − c)`.
fn ellipse_in_scaled_body(e: &Ellipsoid, body: &ConvexBody, factor: f64) -> bool {
    let c = e.center().clone();
    (0..512).all(|j| {
        let x = e.boundary_point(&from2(unit2(j as f64 * PI / 256.0)));
        body.contains(&(&c + (x - &c) / factor), 1e-7)
    })
}

fn criterion_ellipsoids() -> Check {
    let square = ConvexBody::cube(2, 1.0).map_err(fail)?;
    let fit = loewner_ellipsoid(&square, DEFAULT_TOL).map_err(fail)?;
    let axes = fit.ellipsoid.semi_axes();
    let off = fit.ellipsoid.center().norm().max((axes[0] - 2f64.sqrt()).abs()).max((axes[1] - 2f64.sqrt()).abs());
    ensure(off < 1e-6, || format!("Löwner ellipse of the square off by {off:e}"))?;
    for i in 0..50u64 {
        let body = random_polygon(&mut stream_rng(6, i)).map_err(fail)?;
        let e = loewner_ellipsoid(&body, DEFAULT_TOL).map_err(fail)?.ellipsoid;
        let covers = body.polytope().unwrap().vertices().iter().all(|v| e.contains(v, 1e-7));
        ensure(covers, || format!("polygon {i} not inside its Löwner ellipse"))?;
        ensure(ellipse_in_scaled_body(&e, &body, 2.0), || format!("polygon {i}: L(K) not inside 2K"))?;
    }
    for i in 0..25u64 {
        let body = random_symmetric_polygon(&mut stream_rng(7, i)).map_err(fail)?;
        let e = loewner_ellipsoid(&body, DEFAULT_TOL).map_err(fail)?.ellipsoid;
        ensure(ellipse_in_scaled_body(&e, &body, 2f64.sqrt()), || format!("symmetric polygon {i}: L(K) not inside √2 K"))?;
    }
    Ok(format!("square Löwner disk off by {off:.1e}; 50 polygons in [K, 2K]; 25 symmetric in [K, √2K]"))
}

fn criterion_isotropic_constant() -> Check {
    let target = 1.0 / 12f64.sqrt();
    let mut exact_worst = 0.0f64;
    for n in 2..=6 {
        let cube = ConvexBody::cube(n, 0.5).map_err(fail)?;
        let cert = isotropic_position(&cube, MomentMethod::Exact, 0, 0).map_err(fail)?;
        exact_worst = exact_worst.max((cert.l_k - target).abs());
    }
    ensure(exact_worst < 1e-6, || format!("exact branch off by {exact_worst:e}"))?;
    let mut sigmas = Vec::new();
    for n in 3..=6 {
        let cube = ConvexBody::cube(n, 0.5).map_err(fail)?;
        let cert = isotropic_position(&cube, MomentMethod::Sampling, 40_000, 60 + n as u64).map_err(fail)?;
        let z = (cert.l_k - target).abs() / cert.l_k_std_error;
        ensure(z < 3.0, || format!("sampling branch n = {n}: L_K = {} ± {}", cert.l_k, cert.l_k_std_error))?;
        sigmas.push(z);
    }
    let cube = ConvexBody::cube(3, 0.5).map_err(fail)?;
    for i in 0..10u64 {
        let map = AffineMap::random_linear(&mut stream_rng(8, i), 3, 3.0);
        let image = cube.apply_affine(&map).map_err(fail)?;
        let exact = isotropic_position(&image, MomentMethod::Exact, 0, 0).map_err(fail)?;
        ensure((exact.l_k - target).abs() < 1e-6, || format!("map {i}: exact L_K = {}", exact.l_k))?;
        let sampled = isotropic_position(&image, MomentMethod::Sampling, 20_000, 80 + i).map_err(fail)?;
        let z = (sampled.l_k - target).abs() / sampled.l_k_std_error;
        ensure(z < 3.0, || format!("map {i}: sampled L_K = {} ± {}", sampled.l_k, sampled.l_k_std_error))?;
        sigmas.push(z);
    }
    let worst = sigmas.iter().cloned().fold(0.0, f64::max);
    Ok(format!("exact branch within {exact_worst:.1e}; sampled estimates within {worst:.2}σ"))
}

/// `|{x ∈ RB : R x/|x| ∈ K}|` by rejection sampling from the cube `[−R, R]ⁿ`.
fn truncated_cone_volume(body: &ConvexBody, radius: f64, samples: usize, seed: u64) -> (f64, f64) {
    let n = body.dim();
    let mut rng = stream_rng(seed, 0);
    let mut hits = 0usize;
    for _ in 0..samples {
        let x = Vector::from_fn(n, |_, _| rng.gen_range(-radius..radius));
        let r = x.norm();
        if r <= radius && r > 0.0 && body.contains(&(&x * (radius / r)), 0.0) {
            hits += 1;
        }
    }
    let box_volume = (2.0 * radius).powi(n as i32);
    let f = hits as f64 / samples as f64;
    (f * box_volume, (f * (1.0 - f) / samples as f64).sqrt() * box_volume)
}

fn criterion_thin_shell() -> Check {
    let mut rows = 0;
    let mut worst_z = 0.0f64;
    for n in 3..=8usize {
        for (name, body) in [("cube", ConvexBody::cube(n, 0.5).map_err(fail)?), ("ball", ConvexBody::unit_ball(n))] {
            let seed = 100 + n as u64;
            let iso = isotropic_image(&body, MomentMethod::Exact, 0, seed).map_err(fail)?;
            let part = build_shell_partition(&iso, 1.0, 10_000, seed).map_err(fail)?;
            let nf = n as f64;
            let l_k = part.l_k;
            ensure(part.radius <= 2.0 * nf.sqrt() * l_k * (1.0 + 1e-12), || format!("{name}{n}: R = {}", part.radius))?;
            let chosen = part.shells[part.chosen_index].mass;
            ensure(chosen >= part.thin_shell_mass / (part.k_n + 1) as f64, || format!("{name}{n}: pigeonhole fails"))?;
            let violations = part.inclusion_violations().map_err(fail)?;
            ensure(violations == 0, || format!("{name}{n}: {violations} inclusion violations"))?;
            let so = build_so(&iso.body, part.radius, 200_000, seed).map_err(fail)?;
            let (sigma, sigma_se) = spherical_fraction(&iso.body, part.radius, 200_000, seed).map_err(fail)?;
            let cone = sigma * unit_sphere_area(n) * part.radius.powi(n as i32 - 1) * part.radius / nf;
            let cone_se = sigma_se * unit_ball_volume(n) * part.radius.powi(n as i32);
            ensure(relative(cone, so.volume) < 1e-12, || format!("{name}{n}: μ(RO)R/n = {cone} vs |S_O| = {}", so.volume))?;
            let (direct, direct_se) = truncated_cone_volume(&iso.body, part.radius, 400_000, seed);
            let spread = (cone_se.powi(2) + direct_se.powi(2)).sqrt();
            let z = if spread > 0.0 { (cone - direct).abs() / spread } else { 0.0 };
            ensure(z < 3.0, || format!("{name}{n}: cone {cone} vs direct {direct} ({z:.2}σ)"))?;
            worst_z = worst_z.max(z);
            rows += 1;
        }
    }
    Ok(format!("{rows} bodies: R ≤ 2√n L_K, pigeonhole, zero violations; cone volume within {worst_z:.2}σ of direct sampling"))
}

fn criterion_inner_sandwich() -> Check {
    let config = SearchConfig::default();
    let square = ConvexBody::cube(2, 1.0).map_err(fail)?;
    let lower = asp(&ConvexBody::unit_ball(2), 1.0).map_err(fail)?.value;
    let upper = 2.0 * PI.powf(2.0 / 3.0) * 4f64.powf(1.0 / 3.0);
    let est = estimate_inner_max(&square, 1.0, &config).map_err(fail)?;
    ensure(est.value >= lower - 1e-9 && est.value <= upper + 1e-9, || format!("IS_1(square) = {}", est.value))?;
    let mut worst = 0.0f64;
    for i in 0..5u64 {
        let ellipse = random_ellipse(&mut stream_rng(9, i)).map_err(fail)?;
        let e = estimate_inner_max(&ellipse, 1.0, &config).map_err(fail)?;
        let witness = e.witness.as_ref().and_then(|w| w.as_ellipsoid()).ok_or("ellipse has no ellipse witness")?;
        let input = ellipse.as_ellipsoid().unwrap();
        let same = (witness.shape() - input.shape()).amax() < 1e-9 && (witness.center() - input.center()).amax() < 1e-9;
        ensure(same, || format!("ellipse {i}: witness differs from input"))?;
        worst = worst.max(relative(e.value, isoperimetric_value(2, 1.0, ellipse.volume().value)));
    }
    ensure(worst < 1e-6, || format!("ellipse equality off by {worst:e}"))?;
    Ok(format!("IS_1(square) = {:.5} in [{lower:.4}, {upper:.4}]; ellipses self-witness within {worst:.1e}", est.value))
}

fn criterion_outer_sandwich() -> Check {
    let square = ConvexBody::cube(2, 1.0).map_err(fail)?;
    let est = estimate_outer_min(&square, -1.0, &SearchConfig::default()).map_err(fail)?;
    ensure((12.97..=103.8).contains(&est.value), || format!("os_-1(square) = {}", est.value))?;
    let witness = est.witness.as_ref().ok_or("no witness")?;
    let value = asp(witness, -1.0).map_err(fail)?.value;
    ensure(value <= 16.0 * PI * (1.0 + 1e-9), || format!("witness value {value} exceeds 16π"))?;
    let covers = (0..720).all(|j| {
        let u = from2(unit2(j as f64 * PI / 360.0));
        witness.support(&u) >= square.support(&u) - 1e-9
    });
    ensure(covers, || "witness does not contain the square".into())?;
    Ok(format!("os_-1(square) = {:.5} in [12.97, 103.8], witness as_-1 = {value:.5} ≤ 16π", est.value))
}

fn criterion_degenerate_ranges() -> Check {
    let bodies = [
        ("square", ConvexBody::cube(2, 1.0).map_err(fail)?),
        ("ellipse", ConvexBody::ellipse(2.0, 1.0).map_err(fail)?),
    ];
    let value = |body: &ConvexBody, kind, p| -> Result<f64, String> {
        Ok(closed_form_extremal(body, kind, p).map_err(fail)?.ok_or("no closed form")?.value)
    };
    for (name, body) in &bodies {
        let area = body.volume().value;
        let expected = [
            (ExtremalKind::InnerMax, 0.0, 2.0 * area),
            (ExtremalKind::InnerMax, 2.0, 2.0 * PI),
            (ExtremalKind::OuterMax, 2.0, 2.0 * PI),
            (ExtremalKind::OuterMin, 0.0, 2.0 * area),
            (ExtremalKind::InnerMin, 1.0, 0.0),
            (ExtremalKind::InnerMin, -1.0, 0.0),
            (ExtremalKind::InnerMin, 3.0, 0.0),
        ];
        for (kind, p, target) in expected {
            let got = value(body, kind, p)?;
            ensure((got - target).abs() <= 1e-12 * target.max(1.0), || format!("{name}: {kind}_{p} = {got}, expected {target}"))?;
        }
    }
    let probes = [
        (ExtremalKind::InnerMax, 3.0),
        (ExtremalKind::InnerMax, -1.0),
        (ExtremalKind::InnerMax, -3.0),
        (ExtremalKind::OuterMax, 1.0),
        (ExtremalKind::OuterMax, -1.0),
        (ExtremalKind::OuterMax, -3.0),
        (ExtremalKind::OuterMin, 1.0),
        (ExtremalKind::OuterMin, -3.0),
        (ExtremalKind::InnerMin, 1.0),
        (ExtremalKind::InnerMin, -1.0),
        (ExtremalKind::InnerMin, -3.0),
    ];
    let mut count = 0;
    for (name, body) in &bodies {
        for (kind, p) in probes {
            let probe = range_probe(body, kind, p).map_err(fail)?;
            let values = probe.values();
            ensure(values.len() >= 5, || format!("{name} {kind}_{p}: only {} witnesses", values.len()))?;
            ensure(probe.monotone, || format!("{name} {kind}_{p}: not monotone toward {}: {values:?}", probe.limit))?;
            count += 1;
        }
    }
    Ok(format!("closed forms exact on square and ellipse; {count} witness sequences monotone toward their limits"))
}

fn criterion_steiner() -> Check {
    let cases = [
        ("square", ConvexBody::cube(2, 1.0).map_err(fail)?, vec![4.0, 4.0, PI]),
        ("disk", ConvexBody::unit_ball(2), vec![PI, PI, PI]),
        ("cube", ConvexBody::cube(3, 1.0).map_err(fail)?, vec![8.0, 8.0, 2.0 * PI, 4.0 * PI / 3.0]),
    ];
    for (name, body, expected) in &cases {
        let fit = steiner_fit(body, &default_t_grid(body.dim()), 1).map_err(fail)?;
        let off = fit.w.iter().zip(expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(off < 1e-8 && fit.residual < 1e-8, || format!("{name}: W = {:?}, residual {:e}", fit.w, fit.residual))?;
    }
    let square = ConvexBody::cube(2, 1.0).map_err(fail)?;
    let report = homogeneity_degree(HomogeneityTarget::InnerMaxOne, &square, &[0.5, 1.0, 2.0], &SearchConfig::default())
        .map_err(fail)?;
    ensure((report.degree - 2.0 / 3.0).abs() < 1e-9, || format!("IS_1 degree {}", report.degree))?;
    let rows = non_quermass_report(&[2, 3, 4, 5, 6]).map_err(fail)?;
    ensure(rows.iter().all(|r| r.not_quermass), || "a dimension looks like a quermassintegral".into())?;
    Ok(format!("W exact for square, disk and cube; IS_1 degree {:.10}; non-quermass for n = 2..6", report.degree))
}

fn criterion_determinism() -> Check {
    let twice = |f: &dyn Fn() -> Result<String, String>| -> Result<(), String> {
        let a = f()?;
        let b = f()?;
        ensure(a == b, || "rerun differs".into())
    };
    let cube = ConvexBody::cube(3, 0.5).map_err(fail)?;
    let ellipsoid = ConvexBody::ellipsoid(Vector::zeros(3), Matrix::from_diagonal(&Vector::from_vec(vec![1.0, 0.5, 2.0])))
        .map_err(fail)?;
    twice(&|| {
        let pts = hit_and_run(&cube, 2000, DEFAULT_BURN_IN, 5).map_err(fail)?;
        Ok(format!("{pts:?}"))
    })?;
    twice(&|| {
        let cert = isotropic_position(&cube, MomentMethod::Sampling, 8000, 6).map_err(fail)?;
        serde_json::to_string(&cert).map_err(fail)
    })?;
    twice(&|| {
        let iso = isotropic_image(&cube, MomentMethod::Exact, 0, 0).map_err(fail)?;
        let part = build_shell_partition(&iso, 1.0, 5000, 7).map_err(fail)?;
        let so = build_so(&iso.body, part.radius, 20_000, 7).map_err(fail)?;
        Ok(serde_json::to_string(&part).map_err(fail)? + &serde_json::to_string(&so).map_err(fail)?)
    })?;
    twice(&|| {
        let fit = steiner_fit(&ellipsoid, &default_t_grid(3), 8).map_err(fail)?;
        serde_json::to_string(&fit).map_err(fail)
    })?;
    twice(&|| {
        let mut rng = stream_rng(9, 0);
        let dirs: Vec<Vector> = (0..100).map(|_| random_direction(&mut rng, 4)).collect();
        Ok(format!("{dirs:?}"))
    })?;
    Ok("hit-and-run, sampled isotropy, shell partition, Monte Carlo Steiner and direction streams rerun byte-identically".into())
}

fn main() {
    let criteria: [(u32, &str, u64, fn() -> Check); 12] = [
        (1, "ball identity", 1, criterion_ball_identity),
        (2, "affine equivariance", 10, criterion_equivariance),
        (3, "floating-body oracle", 30, criterion_floating_oracle),
        (4, "isoperimetric suite", 60, criterion_isoperimetric),
        (5, "Löwner and John containment", 30, criterion_ellipsoids),
        (6, "isotropic constant", 60, criterion_isotropic_constant),
        (7, "thin-shell construction", 300, criterion_thin_shell),
        (8, "IS sandwich", 60, criterion_inner_sandwich),
        (9, "os sandwich", 60, criterion_outer_sandwich),
        (10, "degenerate ranges", 30, criterion_degenerate_ranges),
        (11, "Steiner and quermass", 30, criterion_steiner),
        (12, "determinism", u64::MAX, criterion_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (id, name, limit, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || id.to_string() == *f) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let within = limit == u64::MAX || elapsed < Duration::from_secs(limit);
        let (status, detail) = match (&result, within) {
            (Ok(detail), true) => ("PASS", detail.clone()),
            (Ok(detail), false) => ("FAIL", format!("{detail}; exceeded {limit} s")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!("criterion {id:>2} {status} {name} ({:.2} s): {detail}", elapsed.as_secs_f64());
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
