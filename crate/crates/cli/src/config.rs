//! JSON configuration: set specifications, windows, dynamical systems and
//! sampled functions.

use anyhow::{anyhow, bail, Context, Result};
use intersective_core::dynamics::{
    HeisenbergElement, HeisenbergSystem, KroneckerSystem, SampledFunction, System, TorusBox,
};
use intersective_core::experiments::ideal_lattice;
use intersective_core::largeness::{SetSpec, Window};
use intersective_core::{AlgInt, Field, Ideal, OPoly};
use serde_json::{Map, Value};

pub const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// A real number given as a literal or one of the named constants.
pub fn real(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| anyhow!("bad number {n}")),
        Value::String(s) => match s.as_str() {
            "golden" => Ok(GOLDEN),
            "sqrt2" => Ok(std::f64::consts::SQRT_2),
            "sqrt3" => Ok(3f64.sqrt()),
            "pi" => Ok(std::f64::consts::PI),
            "e" => Ok(std::f64::consts::E),
            other => bail!("unknown named constant {other:?}"),
        },
        other => bail!("expected a number, got {other}"),
    }
}

fn reals(v: &Value) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| anyhow!("expected an array of numbers, got {v}"))?
        .iter()
        .map(real)
        .collect()
}

fn ints(v: &Value) -> Result<Vec<i64>> {
    v.as_array()
        .ok_or_else(|| anyhow!("expected an array of integers, got {v}"))?
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| anyhow!("expected an integer, got {x}")))
        .collect()
}

fn object(v: &Value) -> Result<&Map<String, Value>> {
    v.as_object().ok_or_else(|| anyhow!("expected an object, got {v}"))
}

fn field_of<'a>(m: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    m.get(key).ok_or_else(|| anyhow!("missing field {key:?}"))
}

/// The single key of a tagged object such as `{"random": {...}}`.
fn tagged(v: &Value) -> Result<(&str, &Value)> {
    let m = object(v)?;
    let mut it = m.iter();
    match (it.next(), it.next()) {
        (Some((k, inner)), None) => Ok((k.as_str(), inner)),
        _ => bail!("expected an object with exactly one key, got {v}"),
    }
}

pub fn seed(m: &Map<String, Value>) -> Result<u64> {
    field_of(m, "seed")
        .context("sampling requires an explicit seed")?
        .as_u64()
        .ok_or_else(|| anyhow!("seed must be a non-negative integer"))
}

pub fn field(v: Option<&Value>) -> Result<Field> {
    match v {
        None => Ok(Field::rational()),
        Some(Value::String(s)) => Ok(s.parse()?),
        Some(other) => bail!("field must be a string, got {other}"),
    }
}

pub fn polys(v: &Value, f: Field) -> Result<Vec<OPoly>> {
    let arr = v.as_array().ok_or_else(|| anyhow!("polys must be an array of strings"))?;
    arr.iter()
        .map(|p| {
            let s = p.as_str().ok_or_else(|| anyhow!("polynomial must be a string, got {p}"))?;
            OPoly::parse(s, f).with_context(|| format!("parsing polynomial {s:?}"))
        })
        .collect()
}

/// `{"lo": [...], "hi": [...]}` or `{"radius": R, "dim": D}`.
pub fn window(v: &Value) -> Result<Window> {
    let m = object(v)?;
    if let Some(r) = m.get("radius") {
        let r = r.as_i64().filter(|&r| r >= 0).ok_or_else(|| anyhow!("radius must be a non-negative integer"))?;
        let dim = m.get("dim").map_or(Some(1), Value::as_u64).filter(|&d| d > 0);
        let dim = dim.ok_or_else(|| anyhow!("dim must be a positive integer"))?;
        return Ok(Window::centered(dim as usize, r));
    }
    Ok(Window::new(ints(field_of(m, "lo")?)?, ints(field_of(m, "hi")?)?)?)
}

/// The set-specification mini-language.
pub fn set_spec(v: &Value) -> Result<SetSpec> {
    if v.as_str() == Some("all") {
        return Ok(SetSpec::All);
    }
    let (tag, inner) = tagged(v)?;
    Ok(match tag {
        "congruence" => {
            let m = object(inner)?;
            let spec = if let Some(moduli) = m.get("modulus") {
                let moduli = ints(moduli)?;
                let offset = m.get("offset").map(ints).transpose()?.unwrap_or(vec![0; moduli.len()]);
                SetSpec::modulus(&moduli, offset)?
            } else if let Some(basis) = m.get("lattice") {
                let rows: Vec<Vec<i64>> = basis
                    .as_array()
                    .ok_or_else(|| anyhow!("lattice must be a matrix"))?
                    .iter()
                    .map(ints)
                    .collect::<Result<_>>()?;
                let offset = m.get("offset").map(ints).transpose()?.unwrap_or(vec![0; rows.len()]);
                SetSpec::lattice(rows, offset)?
            } else if let Some(gens) = m.get("ideal") {
                let f = field(m.get("field"))?;
                let gens: Vec<AlgInt> = gens
                    .as_array()
                    .ok_or_else(|| anyhow!("ideal must list generators"))?
                    .iter()
                    .map(|g| {
                        let s = g.as_str().ok_or_else(|| anyhow!("generator must be a string"))?;
                        Ok(s.parse::<AlgInt>()?)
                    })
                    .collect::<Result<_>>()?;
                let lat = ideal_lattice(&Ideal::from_generators(&gens, f)?)?;
                match m.get("offset") {
                    Some(o) => lat.shift(ints(o)?),
                    None => lat,
                }
            } else {
                bail!("congruence needs \"modulus\", \"lattice\" or \"ideal\"");
            };
            spec
        }
        "random" => {
            let m = object(inner)?;
            let density = real(field_of(m, "density")?)?;
            if !(0.0..=1.0).contains(&density) {
                bail!("random density must lie in [0, 1]");
            }
            SetSpec::Random {
                density,
                seed: seed(m)?,
            }
        }
        "bohr" => {
            let m = object(inner)?;
            SetSpec::Bohr {
                alpha: reals(field_of(m, "alpha")?)?,
                radius: real(field_of(m, "radius")?)?,
            }
        }
        "explicit" => SetSpec::explicit(
            inner
                .as_array()
                .ok_or_else(|| anyhow!("explicit must list points"))?
                .iter()
                .map(ints)
                .collect::<Result<Vec<_>>>()?,
        ),
        "union" => SetSpec::Union(list(inner)?),
        "intersect" => SetSpec::Intersect(list(inner)?),
        "complement" => set_spec(inner)?.complement(),
        "shift" => {
            let m = object(inner)?;
            set_spec(field_of(m, "set")?)?.shift(ints(field_of(m, "by")?)?)
        }
        other => bail!("unknown set kind {other:?}"),
    })
}

fn list(v: &Value) -> Result<Vec<SetSpec>> {
    v.as_array()
        .ok_or_else(|| anyhow!("expected a list of sets"))?
        .iter()
        .map(set_spec)
        .collect()
}

fn torus_box(v: &Value) -> Result<TorusBox> {
    let m = object(v)?;
    Ok(TorusBox::new(reals(field_of(m, "corner")?)?, reals(field_of(m, "sides")?)?)?)
}

/// `{"kronecker": {...}}` or `{"heisenberg": {...}}`.
pub fn system(v: &Value) -> Result<System> {
    let (tag, inner) = tagged(v)?;
    let m = object(inner)?;
    let target = torus_box(field_of(m, "B")?)?;
    match tag {
        "kronecker" => {
            if let Some(d) = m.get("dim") {
                if d.as_u64() != Some(target.dim() as u64) {
                    bail!("dim {d} does not match the box dimension {}", target.dim());
                }
            }
            let alpha: Vec<Vec<f64>> = field_of(m, "alpha")?
                .as_array()
                .ok_or_else(|| anyhow!("alpha must be a list of vectors"))?
                .iter()
                .map(reals)
                .collect::<Result<_>>()?;
            Ok(System::Kronecker(KroneckerSystem::new(&alpha, target)?))
        }
        "heisenberg" => {
            let a = reals(field_of(m, "a")?)?;
            let [x, y, z] = a[..] else {
                bail!("heisenberg generator needs three coordinates");
            };
            Ok(System::Heisenberg(HeisenbergSystem::new(HeisenbergElement::new(x, y, z), target)?))
        }
        other => bail!("unknown system kind {other:?}"),
    }
}

/// `{"constant": c}`, `{"cosine": [k...]}`, `{"indicator": box}`,
/// `{"centered_indicator": box}`.
pub fn function(v: &Value) -> Result<SampledFunction> {
    let (tag, inner) = tagged(v)?;
    Ok(match tag {
        "constant" => SampledFunction::Constant(real(inner)?),
        "cosine" => SampledFunction::Cosine(ints(inner)?),
        "indicator" => SampledFunction::Indicator(torus_box(inner)?),
        "centered_indicator" => SampledFunction::CenteredIndicator(torus_box(inner)?),
        other => bail!("unknown function kind {other:?}"),
    })
}

pub fn budget(m: &Map<String, Value>, default: u128) -> Result<u128> {
    match m.get("budget") {
        None => Ok(default),
        Some(b) => Ok(b.as_u64().ok_or_else(|| anyhow!("budget must be a non-negative integer"))? as u128),
    }
}
