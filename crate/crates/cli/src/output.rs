//! JSON forms of verdicts and reports, and re-verification of emitted verdicts.

use std::collections::BTreeSet;

use anyhow::{anyhow, bail, ensure, Context, Result};
use intersective_core::dynamics::{CorrelationReport, Method};
use intersective_core::experiments::{DensityReturnReport, ReturnRow};
use intersective_core::intersectivity::{roots_mod, Certificate, Status, ThreeQuadraticsRecord, Verdict};
use intersective_core::largeness::{Density, Gap};
use intersective_core::{AlgInt, Field, Ideal, Limits, OPoly};
use serde_json::{json, Map, Value};

fn opt_str<T: ToString>(x: &Option<T>) -> Value {
    x.as_ref().map_or(Value::Null, |v| Value::String(v.to_string()))
}

fn record_json(r: &ThreeQuadraticsRecord) -> Value {
    json!({
        "kind": "three_quadratics",
        "alpha": r.alpha.to_string(),
        "beta": r.beta.to_string(),
        "sqrt_alpha_mod_beta": opt_str(&r.sqrt_alpha_mod_beta),
        "sqrt_beta_mod_alpha": opt_str(&r.sqrt_beta_mod_alpha),
        "two_adic": r.two_adic.as_ref().map_or(Value::Null, |(which, root)| json!({
            "square": which.as_str(),
            "root": root.to_string(),
        })),
    })
}

pub fn certificate_json(c: &Certificate) -> Value {
    match c {
        Certificate::ExactRoot(r) => json!({"kind": "exact_root", "root": r.to_string()}),
        Certificate::ThreeQuadratics(r) => record_json(r),
    }
}

/// `{status, witness?, bound?, depth_used?, certificate?}` plus the inputs
/// needed to re-check it.
pub fn verdict_json(v: &Verdict, polys: &[&OPoly], f: Field) -> Value {
    let mut m = Map::new();
    m.insert("status".into(), json!(v.status.as_str()));
    m.insert("field".into(), json!(f.to_string()));
    let ps: Vec<String> = polys.iter().map(|p| p.to_string()).collect();
    m.insert("polys".into(), json!(ps));
    if let Some(w) = &v.witness {
        m.insert("witness".into(), json!(w.to_string()));
    }
    if let Some(b) = v.bound {
        m.insert("bound".into(), json!(b));
    }
    if let Some(d) = v.depth_used {
        m.insert("depth_used".into(), json!(d));
    }
    if let Some(c) = &v.certificate {
        m.insert("certificate".into(), certificate_json(c));
    }
    if let Some(w) = &v.warning {
        m.insert("warning".into(), json!(w));
    }
    Value::Object(m)
}

/// Whether the polynomials share a zero modulo `ideal`.
fn has_common_root(polys: &[OPoly], ideal: &Ideal, limits: &Limits) -> Result<bool> {
    let Some(first) = polys.first() else {
        bail!("verdict names no polynomials");
    };
    if polys.iter().all(|p| p.arity() == 1) {
        let mut common: BTreeSet<AlgInt> = roots_mod(first, ideal, limits)?.into_iter().collect();
        for p in &polys[1..] {
            let roots: BTreeSet<AlgInt> = roots_mod(p, ideal, limits)?.into_iter().collect();
            common = common.intersection(&roots).cloned().collect();
        }
        return Ok(!common.is_empty());
    }
    let d = first.arity() as u32;
    let residues = ideal.residue_system(limits.residue_cap)?;
    let total = (residues.len() as u128).checked_pow(d);
    ensure!(
        total.is_some_and(|t| t <= limits.residue_cap as u128),
        "too many residue tuples to re-verify modulo {ideal}"
    );
    let mut idx = vec![0usize; d as usize];
    loop {
        let point: Vec<AlgInt> = idx.iter().map(|&i| residues[i].clone()).collect();
        if polys.iter().all(|p| ideal.contains(&p.eval_mod_point(&point, ideal))) {
            return Ok(true);
        }
        let mut j = 0;
        loop {
            if j == idx.len() {
                return Ok(false);
            }
            idx[j] += 1;
            if idx[j] < residues.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

fn parse_elt(v: &Value, what: &str) -> Result<AlgInt> {
    let s = v.as_str().ok_or_else(|| anyhow!("{what} must be a string"))?;
    Ok(s.parse()?)
}

/// Re-parses an emitted verdict and re-checks its witness or certificate
/// against the polynomials it names.
pub fn verify_verdict_json(v: &Value, limits: &Limits) -> Result<()> {
    let m = v.as_object().ok_or_else(|| anyhow!("verdict must be an object"))?;
    let f: Field = m
        .get("field")
        .and_then(Value::as_str)
        .ok_or_else(|| anyhow!("verdict lacks a field"))?
        .parse()?;
    let polys: Vec<OPoly> = m
        .get("polys")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("verdict lacks polys"))?
        .iter()
        .map(|p| Ok(OPoly::parse(p.as_str().ok_or_else(|| anyhow!("poly must be a string"))?, f)?))
        .collect::<Result<_>>()?;
    let status = m.get("status").and_then(Value::as_str).ok_or_else(|| anyhow!("missing status"))?;
    let known = [Status::NotIntersective, Status::IntersectiveUpTo, Status::CertifiedIntersective];
    ensure!(known.iter().any(|s| s.as_str() == status), "unknown status {status}");
    if let Some(w) = m.get("witness") {
        let ideal = Ideal::parse(w.as_str().ok_or_else(|| anyhow!("witness must be a string"))?, f)?;
        ensure!(status == Status::NotIntersective.as_str(), "witness on a {status} verdict");
        ensure!(!has_common_root(&polys, &ideal, limits)?, "the family has a common root modulo {ideal}");
    } else {
        ensure!(status != Status::NotIntersective.as_str(), "NOT_INTERSECTIVE verdict without witness");
    }
    if let Some(c) = m.get("certificate") {
        let c = c.as_object().ok_or_else(|| anyhow!("certificate must be an object"))?;
        match c.get("kind").and_then(Value::as_str) {
            Some("exact_root") => {
                let r = parse_elt(c.get("root").unwrap_or(&Value::Null), "root")?;
                for p in &polys {
                    if p.arity() == 1 {
                        ensure!(p.eval_univariate(&r).is_zero(), "{r} is not a root of {p}");
                    }
                }
            }
            Some("three_quadratics") => {
                let alpha = parse_elt(c.get("alpha").unwrap_or(&Value::Null), "alpha")?;
                let beta = parse_elt(c.get("beta").unwrap_or(&Value::Null), "beta")?;
                let cert = intersective_core::intersectivity::certify_three_quadratics(&alpha, &beta, limits)
                    .context("re-certifying")?;
                let Some(Certificate::ThreeQuadratics(rec)) = cert.certificate else {
                    bail!("re-certification produced no record");
                };
                ensure!(rec.verify(), "record does not verify");
                ensure!(record_json(&rec) == Value::Object(c.clone()), "certificate differs on recomputation");
            }
            other => bail!("unknown certificate kind {other:?}"),
        }
    }
    Ok(())
}

pub fn gap_json(g: &Gap) -> Value {
    match g {
        Gap::Finite(r) => json!(r),
        Gap::InfiniteOnWindow => json!("infinite_on_window"),
    }
}

pub fn density_json(d: &Density) -> Value {
    json!({"count": d.count as u64, "size": d.size as u64, "density": d.as_f64()})
}

pub fn correlation_json(r: &CorrelationReport) -> Value {
    match r.method {
        Method::Exact => json!({"u": r.u, "value": r.value, "method": "EXACT"}),
        Method::MonteCarlo { samples, seed, stderr } => json!({
            "u": r.u,
            "value": r.value,
            "method": "MONTE_CARLO",
            "stderr": stderr,
            "samples": samples,
            "seed": seed,
        }),
    }
}

pub fn return_row_json(r: &ReturnRow) -> Value {
    json!({
        "u": r.u,
        "shifts": r.shifts,
        "count": r.density.count as u64,
        "size": r.density.size as u64,
        "density": r.density.as_f64(),
    })
}

pub fn return_summary_json(r: &DensityReturnReport) -> Value {
    json!({
        "good_count": r.good_count(),
        "density_of_good": r.good_density.as_f64(),
        "syndeticity_gap": gap_json(&r.gap),
        "threshold": r.threshold,
        "mappings": r.mappings.iter().map(|m| m.component_strings()).collect::<Vec<_>>(),
    })
}
