//! Density return sets on `O_L ≅ Z^m`, partition colourings and the
//! Gaussian-integer configuration demo. All densities are exact counts on a
//! finite window.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::largeness::{self, Density, Gap, Point, SetSpec, Window};
use crate::number_field::{AlgInt, Field};
use crate::par;
use crate::poly::{OPoly, ZPolyVector};

/// The ideal `I` as a sublattice of `Z^m` in the integral-basis coordinates.
pub fn ideal_lattice(ideal: &Ideal) -> Result<SetSpec> {
    let (a, b, c) = ideal.hnf();
    let conv = |x: &BigInt| x.to_i64().ok_or(Error::Overflow("ideal basis"));
    if ideal.field().is_rational() {
        return SetSpec::lattice(vec![vec![conv(a)?]], vec![0]);
    }
    SetSpec::lattice(vec![vec![conv(a)?, conv(b)?], vec![0, conv(c)?]], vec![0, 0])
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReturnRow {
    pub u: Point,
    /// `p_i(u)` in integral-basis coordinates.
    pub shifts: Vec<Point>,
    /// `|E ∩ (E - p_1(u)) ∩ ... ∩ W_set|` out of `|W_set|`.
    pub density: Density,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityReturnReport {
    pub mappings: Vec<ZPolyVector>,
    pub threshold: f64,
    pub rows: Vec<ReturnRow>,
    pub good: Vec<Point>,
    pub good_density: Density,
    pub gap: Gap,
}

impl DensityReturnReport {
    pub fn good_count(&self) -> usize {
        self.good.len()
    }
}

fn lattice_mappings(polys: &[OPoly]) -> Result<(Field, usize, Vec<ZPolyVector>)> {
    let first = polys.first().ok_or(Error::EmptyInput("polynomial family"))?;
    let (f, d) = (first.field(), first.arity());
    if polys.iter().any(|p| p.field() != f || p.arity() != d) {
        return Err(Error::InvalidInput("polynomials must share field and arity".into()));
    }
    Ok((f, d, polys.iter().map(OPoly::decompose).collect()))
}

fn shift_of(map: &ZPolyVector, u: &[BigInt]) -> Result<Point> {
    map.components
        .iter()
        .map(|c| c.eval(u).to_i64().ok_or(Error::Overflow("shift outside i64")))
        .collect()
}

/// Exact intersection count for one tuple of shifts.
fn count_with_shifts(e: &SetSpec, members: &[Point], shifts: &[Point]) -> u128 {
    let live: Vec<&Point> = shifts.iter().filter(|s| s.iter().any(|&c| c != 0)).collect();
    let mut y = vec![0i64; members.first().map_or(0, Vec::len)];
    members
        .iter()
        .filter(|x| {
            live.iter().all(|s| {
                for ((yj, xj), sj) in y.iter_mut().zip(x.iter()).zip(s.iter()) {
                    *yj = xj + sj;
                }
                e.contains(&y)
            })
        })
        .count() as u128
}

/// For each `u` in `w_u`, the exact density of `E ∩ ⋂ (E - p_i(u))` on
/// `w_set`, and the largeness of `{u : density >= threshold}` on `w_u`.
pub fn density_return_scan(
    e: &SetSpec,
    polys: &[OPoly],
    w_set: &Window,
    w_u: &Window,
    threshold: f64,
    budget: u128,
) -> Result<DensityReturnReport> {
    let (f, d, mappings) = lattice_mappings(polys)?;
    let m = f.degree();
    if w_set.dim() != m {
        return Err(Error::ArityMismatch {
            expected: m,
            got: w_set.dim(),
        });
    }
    if w_u.dim() != d * m {
        return Err(Error::ArityMismatch {
            expected: d * m,
            got: w_u.dim(),
        });
    }
    let needed = w_u
        .cardinality()
        .saturating_mul(w_set.cardinality())
        .saturating_mul(polys.len() as u128 + 1);
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    let members: Vec<Point> = w_set.points().filter(|x| e.contains(x)).collect();
    let size = w_set.cardinality();
    let us: Vec<Point> = w_u.points().collect();
    let rows: Vec<ReturnRow> = par::map(&us, |u| {
        let ub: Vec<BigInt> = u.iter().map(|&c| BigInt::from(c)).collect();
        let shifts: Vec<Point> = mappings.iter().map(|map| shift_of(map, &ub)).collect::<Result<_>>()?;
        let count = count_with_shifts(e, &members, &shifts);
        Ok(ReturnRow {
            u: u.clone(),
            shifts,
            density: Density { count, size },
        })
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let good: Vec<Point> = rows
        .iter()
        .filter(|r| r.density.as_f64() >= threshold)
        .map(|r| r.u.clone())
        .collect();
    let good_density = Density {
        count: good.len() as u128,
        size: w_u.cardinality(),
    };
    let gap = largeness::syndeticity_gap(&SetSpec::explicit(good.iter().cloned()), w_u)?;
    Ok(DensityReturnReport {
        mappings,
        threshold,
        rows,
        good,
        good_density,
        gap,
    })
}

/// How the good-shift threshold is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Threshold {
    Fixed(f64),
    /// `d_W(E)^2 - epsilon`, with `d_W(E)` the density of the scanned set.
    SquareMinus(f64),
}

impl Threshold {
    pub fn resolve(&self, set_density: f64) -> f64 {
        match *self {
            Threshold::Fixed(c) => c,
            Threshold::SquareMinus(eps) => set_density * set_density - eps,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionReport {
    /// Index of the densest cell (lowest index on ties).
    pub cell: usize,
    pub densities: Vec<Density>,
    pub scan: DensityReturnReport,
}

/// Checks that `parts` partition `w_set`, then runs the return scan on the
/// densest cell.
pub fn partition_scan(
    parts: &[SetSpec],
    polys: &[OPoly],
    w_set: &Window,
    w_u: &Window,
    threshold: Threshold,
    budget: u128,
) -> Result<PartitionReport> {
    if parts.is_empty() {
        return Err(Error::EmptyInput("partition"));
    }
    let mut counts = vec![0u128; parts.len()];
    for x in w_set.points() {
        let owners: Vec<usize> = (0..parts.len()).filter(|&i| parts[i].contains(&x)).collect();
        match owners.as_slice() {
            [i] => counts[*i] += 1,
            _ => {
                return Err(Error::NotAPartition(format!(
                    "point {x:?} lies in {} cells",
                    owners.len()
                )))
            }
        }
    }
    let size = w_set.cardinality();
    let densities: Vec<Density> = counts.iter().map(|&count| Density { count, size }).collect();
    let cell = (0..parts.len()).fold(0, |best, i| if counts[i] > counts[best] { i } else { best });
    let t = threshold.resolve(densities[cell].as_f64());
    let scan = density_return_scan(&parts[cell], polys, w_set, w_u, t, budget)?;
    Ok(PartitionReport { cell, densities, scan })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DemoReport {
    /// Component strings of the lattice mapping for `x^2 + 1`.
    pub components: Vec<String>,
    pub set_density: Density,
    pub epsilon: f64,
    pub scan: DensityReturnReport,
}

pub const DEFAULT_EPSILON: f64 = 0.05;

/// Return scan for `x^2 + 1` over `Z[i]` with threshold `d_W(E)^2 - epsilon`,
/// where `d_W(E)` is the density of `E` on `w_set`.
pub fn gaussian_config_demo(
    e: &SetSpec,
    w_set: &Window,
    w_u: &Window,
    epsilon: f64,
    budget: u128,
) -> Result<DemoReport> {
    let f = Field::gaussian();
    let p = OPoly::parse("x^2+1", f)?;
    let components = p.decompose().component_strings();
    let set_density = Density {
        count: largeness::count_in(e, w_set),
        size: w_set.cardinality(),
    };
    let t = Threshold::SquareMinus(epsilon).resolve(set_density.as_f64());
    let scan = density_return_scan(e, &[p], w_set, w_u, t, budget)?;
    Ok(DemoReport {
        components,
        set_density,
        epsilon,
        scan,
    })
}

/// `p(u)` for `u` given in integral-basis coordinates, straight from the
/// `O_L`-polynomial.
pub fn shift_direct(p: &OPoly, u: &[i64]) -> Result<Vec<BigInt>> {
    let m = p.field().degree();
    let point: Vec<AlgInt> = u
        .chunks(m)
        .map(|c| AlgInt::from_coords(&c.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()))
        .collect();
    Ok(p.evaluate(&point)?.coords(&p.field()))
}
