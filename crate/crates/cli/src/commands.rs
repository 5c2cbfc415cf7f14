use crate::args::{AspMethodArg, Common, MomentArg, Suite};
use crate::output::{bound_table, num, pass_word, to_json, vector, Outcome, Record, Table};
use affsurf::corpus::{self, Family};
use affsurf::curvature::{
    asp, asp1_floating_limit_2d, asp_closed_form, asp_polytope, asp_quadrature_2d, default_deltas,
    equivariance_exponent, floating_body_2d, floating_defect, isoperimetric_report, AspValue, FLOATING_DIRECTIONS,
};
use affsurf::extremal::{estimate, range_probe, ExtremalKind, SearchConfig};
use affsurf::fit::{
    isotropic_image, isotropic_position, john_ellipsoid, loewner_ellipsoid, santalo_point, EllipsoidFit, MomentMethod,
    DEFAULT_TOL,
};
use affsurf::geometry::BodySpec;
use affsurf::quermass::{default_t_grid, homogeneity_degree, non_quermass_report, steiner_fit, HomogeneityTarget};
use affsurf::report::BoundReport;
use affsurf::sampling::{build_shell_partition, build_so, thin_shell_check};
use affsurf::util::{sig6, stream_rng, unit_ball_volume};
use affsurf::{AffineMap, ConvexBody, Error, Result};
use serde_json::{json, Value};
use std::path::Path;

const ISOTROPIC_SAMPLES: usize = 40_000;
const THINSHELL_SAMPLES: usize = 20_000;
const ISO_P_GRID: [f64; 5] = [0.5, 1.0, 1.5, -0.5, -1.0];
const EQUIVARIANCE_P: [f64; 3] = [0.5, 1.0, 1.5];
const EQUIVARIANCE_SPREAD: f64 = 3.0;

pub struct Loaded {
    pub id: String,
    pub body: ConvexBody,
}

pub fn load(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let spec: BodySpec =
        serde_json::from_str(&text).map_err(|e| Error::InvalidBody(format!("malformed body JSON: {e}")))?;
    let id = match spec.id() {
        Some(id) => id.to_string(),
        None => path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
    };
    Ok(Loaded { id, body: spec.build()? })
}

fn with_body_id(mut value: Value, id: &str) -> Value {
    if let Value::Object(map) = &mut value {
        map.insert("body_id".into(), Value::from(id));
    }
    value
}

fn json_name<T: serde::Serialize>(value: &T) -> String {
    match to_json(value) {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

fn joined(text: &[String]) -> String {
    text.iter().filter(|s| !s.is_empty()).cloned().collect::<Vec<_>>().join("\n")
}

fn config(common: &Common) -> SearchConfig {
    let mut config = SearchConfig::default();
    if let Some(grid) = common.grid {
        config.grid = grid;
    }
    if let Some(tol) = common.tol {
        config.tol = tol;
    }
    config
}

fn check_p(body: &ConvexBody, p: f64) -> Result<()> {
    let n = body.dim();
    if p == -(n as f64) {
        return Err(Error::PEqualsMinusN(n));
    }
    Ok(())
}

pub fn cmd_asp(common: &Common, path: &Path, p: f64, method: AspMethodArg) -> Result<Outcome> {
    let Loaded { id, body } = load(path)?;
    check_p(&body, p)?;
    let value: AspValue = match method {
        AspMethodArg::Auto => asp(&body, p)?,
        AspMethodArg::Closed => asp_closed_form(&body, p)?,
        AspMethodArg::Polytope => asp_polytope(&body, p)?,
        AspMethodArg::Quadrature => {
            let s = body.to_support2d()?;
            let s = s.translate(&(-s.centroid()));
            asp_quadrature_2d(&s, p, common.grid.unwrap_or(s.grid()))?
        }
        AspMethodArg::Floating => {
            if p != 1.0 {
                return Err(Error::InvalidInput("the floating-body limit only computes p = 1".into()));
            }
            asp1_floating_limit_2d(&body, &default_deltas())?
        }
    };
    let mut record = Record::new()
        .text("body", &id)
        .num("p", value.p)
        .num("value", value.value)
        .text("method", json_name(&value.method))
        .num("error_estimate", value.error_estimate);
    if let Some(reason) = &value.reason {
        record = record.text("reason", reason);
    }
    Ok(Outcome {
        text: record.to_text(),
        csv: record.to_csv(),
        json: with_body_id(to_json(&value), &id),
        pass: true,
    })
}

pub fn cmd_floating(common: &Common, path: &Path, delta: f64) -> Result<Outcome> {
    let Loaded { id, body } = load(path)?;
    let directions = common.grid.unwrap_or(FLOATING_DIRECTIONS);
    let fb = floating_body_2d(&body, delta, directions)?;
    let volume = body.volume().value;
    let floating_volume = fb.result.volume().value;
    let defect = floating_defect(volume, floating_volume, delta);
    let record = Record::new()
        .text("body", &id)
        .num("delta", delta)
        .num("volume", volume)
        .num("floating_volume", floating_volume)
        .num("normalized_defect", defect)
        .text("cuts", fb.cut_angles.len().to_string());
    let mut table = Table::new(&["angle", "offset"]);
    for (a, t) in fb.cut_angles.iter().zip(&fb.cut_offsets) {
        table.push(vec![sig6(*a), sig6(*t)]);
    }
    let json = json!({
        "body_id": id,
        "delta": delta,
        "volume": volume,
        "floating_volume": floating_volume,
        "normalized_defect": defect,
        "cut_angles": fb.cut_angles,
        "cut_offsets": fb.cut_offsets,
    });
    Ok(Outcome { text: record.to_text(), csv: table.to_csv(), json, pass: true })
}

/// Central symmetry about the centroid, checked on vertices or on support samples.
fn is_symmetric(body: &ConvexBody) -> bool {
    if body.as_ellipsoid().is_some() {
        return true;
    }
    let c = body.centroid();
    let scale = body.bounding_radius();
    if let Some(poly) = body.polytope() {
        return poly.vertices().iter().all(|v| body.contains(&(&c * 2.0 - v), 1e-9 * scale));
    }
    if body.dim() == 2 {
        let h = body.translate(&(-c)).support_samples(256);
        return (0..128).all(|j| (h[j] - h[j + 128]).abs() <= 1e-9 * scale);
    }
    false
}

fn ellipsoid_outcome(id: &str, body: &ConvexBody, fit: &EllipsoidFit, name: &str, claim: &str) -> Outcome {
    let n = body.dim() as f64;
    let symmetric = is_symmetric(body);
    let factor = if symmetric { n.sqrt() } else { n };
    let report = BoundReport::new("containment ratio", 1.0 - 1e-9, fit.containment_ratio, factor, 1e-6, claim);
    let e = &fit.ellipsoid;
    let center: Vec<f64> = e.center().iter().copied().collect();
    let record = Record::new()
        .text("body", id)
        .text("ellipsoid", name)
        .text("center", vector(&center))
        .text("semi_axes", vector(&e.semi_axes()))
        .num("volume", e.volume())
        .num("containment_ratio", fit.containment_ratio)
        .num("ratio_bound", factor)
        .text("symmetric", symmetric.to_string())
        .text("iterations", fit.iterations.to_string())
        .num("duality_gap", fit.duality_gap)
        .text("status", pass_word(report.pass));
    let json = json!({
        "body_id": id,
        "fit": to_json(fit),
        "symmetric": symmetric,
        "report": to_json(&report),
    });
    Outcome { text: record.to_text(), csv: record.to_csv(), json, pass: report.pass }
}

pub fn cmd_mvee(common: &Common, path: &Path) -> Result<Outcome> {
    let Loaded { id, body } = load(path)?;
    let fit = loewner_ellipsoid(&body, common.tol.unwrap_or(DEFAULT_TOL))?;
    Ok(ellipsoid_outcome(&id, &body, &fit, "loewner", "K ⊆ L ⊆ c + λ(K − c), λ ≤ n (√n if symmetric)"))
}

pub fn cmd_john(common: &Common, path: &Path) -> Result<Outcome> {
    let Loaded { id, body } = load(path)?;
    let fit = john_ellipsoid(&body, common.tol.unwrap_or(DEFAULT_TOL))?;
    Ok(ellipsoid_outcome(&id, &body, &fit, "john", "J ⊆ K ⊆ c + λ(J − c), λ ≤ n (√n if symmetric)"))
}

pub fn cmd_isotropic(common: &Common, path: &Path, method: MomentArg) -> Result<Outcome> {
    let Loaded { id, body } = load(path)?;
    let method = match method {
        MomentArg::Auto => MomentMethod::Auto,
        MomentArg::Exact => MomentMethod::Exact,
        MomentArg::Sampling => MomentMethod::Sampling,
    };
    let samples = common.samples.unwrap_or(ISOTROPIC_SAMPLES);
    let cert = isotropic_position(&body, method, samples, common.seed)?;
    let verdict = cert.verify();
    let record = Record::new()
        .text("body", &id)
        .text("method", json_name(&cert.method))
        .num("l_k", cert.l_k)
        .num("l_k_std_error", cert.l_k_std_error)
        .num("covariance_residual", cert.covariance_residual)
        .num("residual_tolerance", cert.residual_tolerance)
        .num("image_volume", cert.image_volume)
        .text("samples", cert.samples.to_string())
        .text("status", pass_word(verdict.is_ok()));
    let mut text = record.to_text();
    if let Err(e) = &verdict {
        text.push_str(&format!("reason  {e}\n"));
    }
    Ok(Outcome { text, csv: record.to_csv(), json: with_body_id(to_json(&cert), &id), pass: verdict.is_ok() })
}

pub fn cmd_santalo(common: &Common, path: &Path) -> Result<Outcome> {
    let Loaded { id, body } = load(path)?;
    let s = santalo_point(&body, common.tol.unwrap_or(1e-9))?;
    let n = body.dim();
    let volume = body.volume().value;
    let product = volume * s.polar_volume;
    let ball = unit_ball_volume(n).powi(2);
    let mut reports = vec![BoundReport::at_most(
        "volume product",
        product,
        ball,
        1e-9 * ball,
        "volume product at the Santaló point is at most that of the ball",
    )];
    if n == 2 {
        reports.push(BoundReport::at_least("volume product", 6.75, product, 1e-9, "planar minimum 27/4 attained by triangles"));
    }
    let pass = reports.iter().all(|r| r.pass);
    let record = Record::new()
        .text("body", &id)
        .text("santalo_point", vector(&s.point))
        .num("polar_volume", s.polar_volume)
        .num("volume_product", product)
        .num("ball_product", ball)
        .num("barycenter_residual", s.barycenter_residual)
        .text("iterations", s.iterations.to_string())
        .text("status", pass_word(pass));
    let json = json!({
        "body_id": id,
        "santalo": to_json(&s),
        "volume": volume,
        "volume_product": product,
        "reports": to_json(&reports),
    });
    Ok(Outcome { text: record.to_text(), csv: record.to_csv(), json, pass })
}

pub fn cmd_extremal(common: &Common, path: &Path, kind: &str, p: f64, probe: bool) -> Result<Outcome> {
    let Loaded { id, body } = load(path)?;
    let kind: ExtremalKind = kind.parse()?;
    check_p(&body, p)?;
    if probe {
        let probe = range_probe(&body, kind, p)?.with_body_id(&id);
        let record = Record::new()
            .text("body", &id)
            .text("kind", kind.to_string())
            .num("p", p)
            .num("limit", probe.limit)
            .text("family", &probe.family)
            .text("monotone", probe.monotone.to_string());
        let mut table = Table::new(&["index", "witness", "value"]);
        for c in &probe.sequence {
            table.push(vec![c.index.to_string(), c.descriptor.clone(), sig6(c.value)]);
        }
        return Ok(Outcome {
            text: joined(&[record.to_text(), table.to_text()]),
            csv: probe.to_csv(),
            json: to_json(&probe),
            pass: probe.monotone,
        });
    }
    let est = estimate(&body, kind, p, &config(common))?.with_body_id(&id);
    let mut record = Record::new()
        .text("body", &id)
        .text("kind", kind.to_string())
        .num("p", p)
        .num("value", est.value)
        .text("bound", json_name(&est.bound))
        .text("witness", est.witness_descriptor.clone().unwrap_or_else(|| "none".into()));
    if let Some(reason) = &est.reason {
        record = record.text("reason", reason);
    }
    record = record.text("status", pass_word(est.passed()));
    let mut candidates = Table::new(&["index", "candidate", "value"]);
    for c in &est.candidate_log {
        candidates.push(vec![c.index.to_string(), c.descriptor.clone(), sig6(c.value)]);
    }
    let mut sections = vec![record.to_text()];
    if !est.bound_status.is_empty() {
        sections.push(bound_table(&est.bound_status).to_text());
    }
    if !est.candidate_log.is_empty() {
        sections.push(candidates.to_text());
    }
    Ok(Outcome { text: joined(&sections), csv: est.to_csv(), json: to_json(&est), pass: est.passed() })
}

pub fn cmd_thinshell(common: &Common, path: &Path, c_thin: f64, directions: usize) -> Result<Outcome> {
    let Loaded { id, body } = load(path)?;
    let samples = common.samples.unwrap_or(THINSHELL_SAMPLES);
    let seed = common.seed;
    let iso = isotropic_image(&body, MomentMethod::Auto, samples, seed)?;
    let shell = thin_shell_check(&iso, c_thin, samples, seed.wrapping_add(1))?;
    let mut record = Record::new()
        .text("body", &id)
        .text("dim", shell.dim.to_string())
        .num("l_k", shell.l_k)
        .num("c_thin", c_thin)
        .num("thin_shell_mass", shell.mass)
        .num("mass_std_error", shell.std_error)
        .text("half_mass", (shell.mass >= 0.5).to_string())
        .num("c_half", shell.c_half)
        .text("samples", shell.samples.to_string());
    let mut json = json!({ "body_id": id, "thin_shell": to_json(&shell) });
    let partition = match build_shell_partition(&iso, c_thin, samples, seed.wrapping_add(2)) {
        Ok(part) => part,
        Err(Error::ConstructionRefused(reason)) => {
            record = record.text("partition", format!("refused: {reason}"));
            json["partition"] = Value::Null;
            return Ok(Outcome { text: record.to_text(), csv: record.to_csv(), json, pass: true });
        }
        Err(e) => return Err(e),
    };
    let so = build_so(&iso.body, partition.radius, directions, seed.wrapping_add(3))?;
    let violations = partition.inclusion_violations()?;
    let mut reports = partition.reports();
    reports.push(so.volume_report(&partition, iso.body.volume().value));
    reports.push(BoundReport::at_most(
        "inclusion violations",
        violations as f64,
        0.0,
        0.0,
        "chosen shell scaled by 2^{-1/n} lies in the truncated cone",
    ));
    let pass = reports.iter().all(|r| r.pass);
    record = record
        .text("k_n", partition.k_n.to_string())
        .text("chosen_shell", partition.chosen_index.to_string())
        .num("radius", partition.radius)
        .num("chosen_mass", partition.shells[partition.chosen_index].mass)
        .num("pigeonhole_bound", partition.shell_mass_lower)
        .num("cone_volume", so.volume)
        .text("inclusion_violations", violations.to_string())
        .text("status", pass_word(pass));
    let mut shells = Table::new(&["shell", "inner", "outer", "mass", "chosen"]);
    for s in &partition.shells {
        shells.push(vec![
            s.index.to_string(),
            sig6(s.inner),
            sig6(s.outer),
            sig6(s.mass),
            (s.index == partition.chosen_index).to_string(),
        ]);
    }
    json["partition"] = to_json(&partition);
    json["cone"] = to_json(&so);
    json["inclusion_violations"] = Value::from(violations);
    json["reports"] = to_json(&reports);
    Ok(Outcome {
        text: joined(&[record.to_text(), shells.to_text(), bound_table(&reports).to_text()]),
        csv: shells.to_csv(),
        json,
        pass,
    })
}

pub fn cmd_quermass(
    common: &Common,
    body: Option<&Path>,
    t: Option<&[f64]>,
    estimator: Option<&str>,
    alphas: &[f64],
    non_quermass: Option<&[usize]>,
) -> Result<Outcome> {
    if let Some(dims) = non_quermass {
        let rows = non_quermass_report(dims)?;
        let mut table = Table::new(&["n", "degree", "integer_degree", "polynomial_residual", "not_quermass"]);
        for r in &rows {
            table.push(vec![
                r.n.to_string(),
                sig6(r.degree),
                r.degree_is_integer.to_string(),
                sig6(r.polynomial_residual),
                r.not_quermass.to_string(),
            ]);
        }
        let pass = rows.iter().all(|r| r.not_quermass);
        return Ok(Outcome { text: table.to_text(), csv: table.to_csv(), json: to_json(&rows), pass });
    }
    let path = body.ok_or_else(|| Error::InvalidInput("--body is required".into()))?;
    let Loaded { id, body } = load(path)?;
    if let Some(name) = estimator {
        let target: HomogeneityTarget = name.parse()?;
        let report = homogeneity_degree(target, &body, alphas, &config(common))?;
        let tol = common.tol.unwrap_or(1e-6);
        let pass = report.matches(tol);
        let record = Record::new()
            .text("body", &id)
            .text("estimator", json_name(&report.target))
            .num("degree", report.degree)
            .num("expected", report.expected)
            .num("residual", report.residual)
            .text("status", pass_word(pass));
        let mut table = Table::new(&["alpha", "value"]);
        for (a, v) in report.alphas.iter().zip(&report.values) {
            table.push(vec![sig6(*a), sig6(*v)]);
        }
        return Ok(Outcome {
            text: joined(&[record.to_text(), table.to_text()]),
            csv: table.to_csv(),
            json: with_body_id(to_json(&report), &id),
            pass,
        });
    }
    let grid = t.map(<[f64]>::to_vec).unwrap_or_else(|| default_t_grid(body.dim()));
    let fit = steiner_fit(&body, &grid, common.seed)?.with_body_id(&id);
    let mut record = Record::new().text("body", &id).text("dim", fit.dim.to_string());
    for (i, (w, se)) in fit.w.iter().zip(&fit.w_std_error).enumerate() {
        record = record.num(&format!("W{i}"), *w).num(&format!("W{i}_std_error"), *se);
    }
    record = record.num("residual", fit.residual).text("exact", fit.exact.to_string());
    let mut table = Table::new(&["t", "volume", "std_error"]);
    for ((t, v), se) in fit.t_grid.iter().zip(&fit.volumes).zip(&fit.volume_std_errors) {
        table.push(vec![sig6(*t), sig6(*v), sig6(*se)]);
    }
    Ok(Outcome {
        text: joined(&[record.to_text(), table.to_text()]),
        csv: fit.to_csv(),
        json: to_json(&fit),
        pass: true,
    })
}

pub fn cmd_verify(
    common: &Common,
    suite: Suite,
    body: Option<&Path>,
    corpus_name: &str,
    count: usize,
    trials: usize,
) -> Result<Outcome> {
    match suite {
        Suite::IsoInequality => verify_iso(common, corpus_name, count),
        Suite::Steiner => verify_steiner(common, body.ok_or_else(|| Error::InvalidInput("--body is required".into()))?),
        Suite::Equivariance => verify_equivariance(common, trials),
    }
}

fn family(name: &str) -> Result<Family> {
    if name == "random2d" {
        Ok(Family::Smooth)
    } else {
        name.parse()
    }
}

fn verify_iso(common: &Common, corpus_name: &str, count: usize) -> Result<Outcome> {
    let bodies = corpus::generate(family(corpus_name)?, count, common.seed)?;
    let mut table = Table::new(&["body", "p", "as_p", "bound", "pass"]);
    let mut rows = Vec::new();
    let mut passed_bodies = 0;
    for (i, b) in bodies.iter().enumerate() {
        let mut all = true;
        for &p in &ISO_P_GRID {
            let r = isoperimetric_report(b, p)?;
            let bound = if p >= 0.0 { r.upper } else { r.lower };
            all &= r.pass;
            table.push(vec![i.to_string(), sig6(p), sig6(r.value), sig6(bound), pass_word(r.pass).into()]);
            rows.push(json!({ "body": i, "p": p, "value": num(r.value), "bound": num(bound), "pass": r.pass }));
        }
        passed_bodies += all as usize;
    }
    let pass = passed_bodies == bodies.len();
    let record = Record::new()
        .text("suite", "iso-inequality")
        .text("corpus", corpus_name)
        .text("seed", common.seed.to_string())
        .text("bodies_passed", format!("{passed_bodies}/{}", bodies.len()))
        .text("status", pass_word(pass));
    let json = json!({
        "suite": "iso-inequality",
        "corpus": corpus_name,
        "seed": common.seed,
        "bodies": bodies.len(),
        "bodies_passed": passed_bodies,
        "checks": rows,
    });
    Ok(Outcome { text: record.to_text(), csv: table.to_csv(), json, pass })
}

fn verify_steiner(common: &Common, path: &Path) -> Result<Outcome> {
    let Loaded { id, body } = load(path)?;
    let n = body.dim();
    let fit = steiner_fit(&body, &default_t_grid(n), common.seed)?.with_body_id(&id);
    let volume = body.volume().value;
    let ball = unit_ball_volume(n);
    let (w0_tol, wn_tol) = if fit.exact {
        (1e-8 * volume.max(1.0), 1e-8)
    } else {
        (3.0 * fit.w_std_error[0] + 1e-8, 3.0 * fit.w_std_error[n] + 1e-8)
    };
    let residual_tol = common.tol.unwrap_or(if fit.exact { 1e-8 } else { 1e-2 });
    let reports = vec![
        BoundReport::new("W0", volume, fit.w[0], volume, w0_tol, "constant term is the volume"),
        BoundReport::new(format!("W{n}"), ball, fit.w[n], ball, wn_tol, "leading term is the unit ball volume"),
        BoundReport::at_most("residual", fit.residual, 0.0, residual_tol, "parallel volumes are a polynomial in t"),
    ];
    let pass = reports.iter().all(|r| r.pass);
    let record = Record::new()
        .text("suite", "steiner")
        .text("body", &id)
        .text("W", vector(&fit.w))
        .num("residual", fit.residual)
        .text("exact", fit.exact.to_string())
        .text("status", pass_word(pass));
    let json = json!({ "suite": "steiner", "fit": to_json(&fit), "reports": to_json(&reports) });
    Ok(Outcome {
        text: joined(&[record.to_text(), bound_table(&reports).to_text()]),
        csv: fit.to_csv(),
        json,
        pass,
    })
}

fn verify_equivariance(common: &Common, trials: usize) -> Result<Outcome> {
    let tol = common.tol.unwrap_or(1e-7);
    let mut table = Table::new(&["trial", "body", "p", "det", "as_p", "as_p_image", "relative_error"]);
    let mut rows = Vec::new();
    let mut max_error = 0.0f64;
    for trial in 0..trials {
        let mut rng = stream_rng(common.seed, trial as u64);
        let family = if trial % 2 == 0 { Family::Ellipses } else { Family::Smooth };
        let body = family.sample(&mut rng)?;
        let p = EQUIVARIANCE_P[trial % EQUIVARIANCE_P.len()];
        let map = AffineMap::random_linear(&mut rng, 2, EQUIVARIANCE_SPREAD);
        let image = body.apply_affine(&map)?;
        let base = asp(&body, p)?.value;
        let mapped = asp(&image, p)?.value;
        let expected = map.det_abs().powf(equivariance_exponent(2, p)) * base;
        let error = (mapped - expected).abs() / base;
        max_error = max_error.max(error);
        table.push(vec![
            trial.to_string(),
            family.name().into(),
            sig6(p),
            sig6(map.det_abs()),
            sig6(base),
            sig6(mapped),
            sig6(error),
        ]);
        rows.push(json!({
            "trial": trial,
            "family": family.name(),
            "p": p,
            "det": map.det_abs(),
            "value": base,
            "image_value": mapped,
            "relative_error": error,
        }));
    }
    let pass = max_error < tol;
    let record = Record::new()
        .text("suite", "equivariance")
        .text("trials", trials.to_string())
        .text("seed", common.seed.to_string())
        .num("max_relative_error", max_error)
        .num("tolerance", tol)
        .text("status", pass_word(pass));
    let json = json!({
        "suite": "equivariance",
        "seed": common.seed,
        "max_relative_error": max_error,
        "tolerance": tol,
        "trials": rows,
    });
    Ok(Outcome { text: record.to_text(), csv: table.to_csv(), json, pass })
}
