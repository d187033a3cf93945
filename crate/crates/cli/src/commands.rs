//! Subcommand bodies. Each returns the bytes for the output stream, a human
//! summary and an exit code.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use intersective_core::dynamics::{self, GhkConfig, Sampling, System};
use intersective_core::experiments::{self, Threshold, DEFAULT_EPSILON};
use intersective_core::intersectivity::{self, DepthRule, Verdict};
use intersective_core::largeness::{self, Window};
use intersective_core::{AlgInt, Field, Limits, OPoly};
use serde_json::{json, Map, Value};

use crate::config;
use crate::output::{self, verdict_json};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_INTERSECTIVE: i32 = 2;

/// Default cap on the work any config-driven scan may do.
pub const DEFAULT_BUDGET: u128 = 1 << 36;

#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub summary: String,
    pub code: i32,
}

impl Outcome {
    fn line(&mut self, v: &Value) {
        self.stdout.push_str(&v.to_string());
        self.stdout.push('\n');
    }
}

fn verdict_outcome(v: &Verdict, polys: &[&OPoly], f: Field, label: &str) -> Outcome {
    let mut out = Outcome::default();
    out.line(&verdict_json(v, polys, f));
    let mut s = format!("{label} over {f}: {}", v.status.as_str());
    if let Some(b) = v.bound {
        let _ = write!(s, " (bound {b})");
    }
    if let Some(w) = &v.witness {
        let _ = write!(s, ", witness {w}");
    }
    if let Some(d) = v.depth_used {
        let _ = write!(s, ", max depth {d}");
    }
    if let Some(c) = &v.certificate {
        let _ = write!(s, ", certificate {}", output::certificate_json(c));
    }
    if let Some(w) = &v.warning {
        let _ = write!(s, "\nwarning: {w}");
    }
    out.summary = s;
    out.code = if v.is_not_intersective() {
        EXIT_NOT_INTERSECTIVE
    } else {
        EXIT_OK
    };
    out
}

pub fn check(poly: &str, field: &str, bound: u64, depth_min: u32, limits: &Limits) -> Result<Outcome> {
    let f: Field = field.parse()?;
    let p = OPoly::parse(poly, f)?;
    let rule = DepthRule {
        depth_min,
        ..DepthRule::default()
    };
    let v = intersectivity::is_intersective_up_to(&p, bound, &rule, limits)?;
    Ok(verdict_outcome(&v, &[&p], f, &p.to_string()))
}

pub fn joint(polys: &[String], field: &str, bound: u64, depth_min: u32, gcd: bool, limits: &Limits) -> Result<Outcome> {
    let f: Field = field.parse()?;
    let ps: Vec<OPoly> = polys.iter().map(|s| OPoly::parse(s, f)).collect::<Result<_, _>>()?;
    let rule = DepthRule {
        depth_min,
        ..DepthRule::default()
    };
    let refs: Vec<&OPoly> = ps.iter().collect();
    let label = format!("{{{}}}", ps.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "));
    if !gcd {
        let v = intersectivity::jointly_intersective_up_to(&ps, bound, &rule, limits)?;
        return Ok(verdict_outcome(&v, &refs, f, &label));
    }
    let r = intersectivity::gcd_reduction_check(&ps, bound, &rule, limits)?;
    let mut out = verdict_outcome(&r.joint_verdict, &refs, f, &label);
    let mut v = verdict_json(&r.joint_verdict, &refs, f);
    v["gcd_reduction"] = json!({
        "gcd": r.gcd.g.to_string(),
        "delta": r.gcd.delta.to_string(),
        "cofactors": r.gcd.cofactors.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "gcd_verdict": verdict_json(&r.gcd_verdict, &[&r.gcd.g], f),
        "notes": r.notes,
    });
    out.stdout = format!("{v}\n");
    let _ = write!(out.summary, "\ngcd {} with Bezout denominator {}", r.gcd.g, r.gcd.delta);
    Ok(out)
}

pub fn certify_quad_const(c: &str, field: &str, scan_bound: u64, limits: &Limits) -> Result<Outcome> {
    let f: Field = field.parse()?;
    let c: AlgInt = c.parse()?;
    let v = intersectivity::certify_quadratic_plus_constant(&c, f, scan_bound, limits)?;
    let x = OPoly::x(f);
    let p = x.mul(&x).add(&OPoly::constant(f, 1, c));
    Ok(verdict_outcome(&v, &[&p], f, &p.to_string()))
}

pub fn certify_three_quadratics(alpha: &str, beta: &str, limits: &Limits) -> Result<Outcome> {
    let f = Field::gaussian();
    let (a, b): (AlgInt, AlgInt) = (alpha.parse()?, beta.parse()?);
    let v = intersectivity::certify_three_quadratics(&a, &b, limits)?;
    let p = intersectivity::three_quadratics_poly(&a, &b);
    Ok(verdict_outcome(&v, &[&p], f, &p.to_string()))
}

pub fn search_three_quadratics(max_norm: u64, limit: usize, limits: &Limits) -> Result<Outcome> {
    let s = intersectivity::search_three_quadratics(max_norm, limit, limits)?;
    let mut out = Outcome::default();
    let found: Vec<Value> = s
        .found
        .iter()
        .map(|(a, b)| json!({"alpha": a.to_string(), "beta": b.to_string()}))
        .collect();
    out.line(&json!({"max_norm": max_norm, "found": found, "rejected": s.rejects.len()}));
    out.summary = format!(
        "{} pair(s) of Gaussian primes of norm <= {max_norm} pass both residue conditions; {} rejected",
        s.found.len(),
        s.rejects.len()
    );
    Ok(out)
}

pub fn decompose(poly: &str, field: &str) -> Result<Outcome> {
    let f: Field = field.parse()?;
    let p = OPoly::parse(poly, f)?;
    let comps = p.decompose().component_strings();
    let mut out = Outcome::default();
    out.line(&json!({"components": comps}));
    out.summary = format!("{p} over {f} -> ({})", comps.join(", "));
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    match v {
        Value::Object(m) => Ok(m),
        _ => bail!("config must be a JSON object"),
    }
}

fn key<'a>(m: &'a Map<String, Value>, k: &str) -> Result<&'a Value> {
    m.get(k).ok_or_else(|| anyhow!("config is missing {k:?}"))
}

fn samples(m: &Map<String, Value>) -> Result<usize> {
    Ok(key(m, "samples")?
        .as_u64()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("samples must be a positive integer"))? as usize)
}

/// Sampling settings; the seed is only demanded when some value is sampled.
fn sampling(m: &Map<String, Value>, sys: &System, npolys: usize) -> Result<Sampling> {
    let exact = matches!(sys, System::Kronecker(_)) && npolys == 1;
    if exact {
        return Ok(Sampling {
            samples: m.get("samples").and_then(Value::as_u64).unwrap_or(1).max(1) as usize,
            seed: m.get("seed").and_then(Value::as_u64).unwrap_or(0),
        });
    }
    Ok(Sampling {
        samples: samples(m)?,
        seed: config::seed(m)?,
    })
}

fn system_and_polys(m: &Map<String, Value>) -> Result<(System, Vec<OPoly>)> {
    let sys = config::system(key(m, "system")?)?;
    let f = config::field(m.get("field"))?;
    let polys = config::polys(key(m, "polys")?, f)?;
    Ok((sys, polys))
}

pub fn scan_returns(m: &Map<String, Value>) -> Result<Outcome> {
    let (sys, polys) = system_and_polys(m)?;
    let w = config::window(key(m, "window")?)?;
    let threshold = config::real(key(m, "threshold")?)?;
    let s = sampling(m, &sys, polys.len())?;
    let budget = config::budget(m, DEFAULT_BUDGET)?;
    let scan = dynamics::return_set_scan(&sys, &polys, threshold, &w, &s, budget)?;
    let mut out = Outcome::default();
    for r in &scan.rows {
        out.line(&output::correlation_json(r));
    }
    out.line(&json!({"summary": {
        "good_count": scan.hits.len(),
        "density_of_good": scan.density.as_f64(),
        "syndeticity_gap": output::gap_json(&scan.gap),
        "threshold": threshold,
        "window_size": w.cardinality() as u64,
    }}));
    out.summary = format!(
        "{} of {} window points return above {threshold}; gap {:?}",
        scan.hits.len(),
        w.cardinality(),
        scan.gap
    );
    Ok(out)
}

pub fn simulate(m: &Map<String, Value>) -> Result<Outcome> {
    let (sys, polys) = system_and_polys(m)?;
    let s = sampling(m, &sys, polys.len())?;
    let points: Vec<Vec<i64>> = match (m.get("points"), m.get("window")) {
        (Some(p), _) => p
            .as_array()
            .ok_or_else(|| anyhow!("points must be a list"))?
            .iter()
            .map(|x| {
                x.as_array()
                    .ok_or_else(|| anyhow!("each point must be a list"))?
                    .iter()
                    .map(|c| c.as_i64().ok_or_else(|| anyhow!("coordinates must be integers")))
                    .collect()
            })
            .collect::<Result<_>>()?,
        (None, Some(w)) => config::window(w)?.points().collect(),
        (None, None) => bail!("config needs \"points\" or \"window\""),
    };
    let mut out = Outcome::default();
    let mut max_err: f64 = 0.0;
    for u in &points {
        let r = dynamics::correlation(&sys, &polys, u, &s)?;
        if let dynamics::Method::MonteCarlo { stderr, .. } = r.method {
            max_err = max_err.max(stderr);
        }
        out.line(&output::correlation_json(&r));
    }
    out.summary = format!("{} correlation(s), largest standard error {max_err:.3e}", points.len());
    Ok(out)
}

pub fn ghk(m: &Map<String, Value>, k: Option<u32>) -> Result<Outcome> {
    let sys = config::system(key(m, "system")?)?;
    let f = config::function(key(m, "function")?)?;
    let k = match (k, m.get("k")) {
        (Some(k), _) => k,
        (None, Some(v)) => v.as_u64().ok_or_else(|| anyhow!("k must be an integer"))? as u32,
        (None, None) => bail!("seminorm order missing: pass --k"),
    };
    let u_samples = match m.get("u_samples") {
        None | Some(Value::Null) => None,
        Some(v) => Some(v.as_u64().ok_or_else(|| anyhow!("u_samples must be an integer"))? as usize),
    };
    let cfg = GhkConfig {
        k,
        window: config::window(key(m, "window")?)?,
        samples: samples(m)?,
        seed: config::seed(m)?,
        u_samples,
        budget: config::budget(m, DEFAULT_BUDGET)?,
    };
    let r = dynamics::ghk_estimate(&sys, &f, &cfg)?;
    let mut out = Outcome::default();
    out.line(&json!({
        "k": k,
        "value": r.value,
        "power": r.power,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "u_samples": cfg.u_samples,
        "window_size": cfg.window.cardinality() as u64,
    }));
    out.summary = format!("seminorm estimate of order {k}: {:.6} (power {:.6e})", r.value, r.power);
    Ok(out)
}

/// Density experiments: a density profile (`windows`), a partition scan
/// (`parts`), the Gaussian demo (`demo`), or a return scan (`set`).
pub fn density(m: &Map<String, Value>) -> Result<Outcome> {
    let budget = config::budget(m, DEFAULT_BUDGET)?;
    let mut out = Outcome::default();
    if let Some(ws) = m.get("windows") {
        let s = config::set_spec(key(m, "set")?)?;
        let windows: Vec<Window> = ws
            .as_array()
            .ok_or_else(|| anyhow!("windows must be a list"))?
            .iter()
            .map(config::window)
            .collect::<Result<_>>()?;
        let profile = largeness::density_profile(&s, &windows, budget)?;
        for (w, d) in windows.iter().zip(&profile) {
            let mut row = output::density_json(d);
            row["lo"] = json!(w.lo());
            row["hi"] = json!(w.hi());
            out.line(&row);
        }
        out.summary = format!("density profile over {} window(s)", windows.len());
        return Ok(out);
    }
    let w_set = config::window(key(m, "window_set")?)?;
    let w_u = config::window(key(m, "window_u")?)?;
    let epsilon = m.get("epsilon").map(config::real).transpose()?.unwrap_or(DEFAULT_EPSILON);
    if m.get("demo").and_then(Value::as_bool) == Some(true) {
        let e = config::set_spec(key(m, "set")?)?;
        let r = experiments::gaussian_config_demo(&e, &w_set, &w_u, epsilon, budget)?;
        for row in &r.scan.rows {
            out.line(&output::return_row_json(row));
        }
        let mut summary = output::return_summary_json(&r.scan);
        summary["set_density"] = output::density_json(&r.set_density);
        summary["epsilon"] = json!(epsilon);
        summary["components"] = json!(r.components);
        out.line(&json!({ "summary": summary }));
        out.summary = format!(
            "mapping ({}); {} witness(es) at threshold {:.6}",
            r.components.join(", "),
            r.scan.good_count(),
            r.scan.threshold
        );
        return Ok(out);
    }
    let f = config::field(m.get("field"))?;
    let polys = config::polys(key(m, "polys")?, f)?;
    let threshold = match m.get("threshold") {
        Some(t) => Threshold::Fixed(config::real(t)?),
        None => Threshold::SquareMinus(epsilon),
    };
    let (scan, extra) = if let Some(parts) = m.get("parts") {
        let parts: Vec<_> = parts
            .as_array()
            .ok_or_else(|| anyhow!("parts must be a list"))?
            .iter()
            .map(config::set_spec)
            .collect::<Result<_>>()?;
        let r = experiments::partition_scan(&parts, &polys, &w_set, &w_u, threshold, budget)?;
        let extra = json!({
            "cell": r.cell,
            "cell_densities": r.densities.iter().map(output::density_json).collect::<Vec<_>>(),
        });
        (r.scan, extra)
    } else {
        let e = config::set_spec(key(m, "set")?)?;
        let d = largeness::count_in(&e, &w_set) as f64 / w_set.cardinality() as f64;
        let r = experiments::density_return_scan(&e, &polys, &w_set, &w_u, threshold.resolve(d), budget)?;
        (r, json!({"set_density": d}))
    };
    for row in &scan.rows {
        out.line(&output::return_row_json(row));
    }
    let mut summary = output::return_summary_json(&scan);
    for (k, v) in extra.as_object().into_iter().flatten() {
        summary[k] = v.clone();
    }
    out.line(&json!({ "summary": summary }));
    out.summary = format!(
        "{} of {} shifts are good at threshold {:.6}; gap {:?}",
        scan.good_count(),
        w_u.cardinality(),
        scan.threshold,
        scan.gap
    );
    Ok(out)
}
