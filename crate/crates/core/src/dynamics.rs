//! Kronecker torus rotations and the Heisenberg nilrotation, with correlation
//! integrals, return-set scans and a window estimator for the
//! Gowers-Host-Kra seminorms.
//!
//! Points of `[0, 1)` are stored as 64-bit fixed-point fractions, so every
//! translation is exact modulo one and orbits stay accurate for very large
//! exponents. Rotation numbers given as floats are rounded to that grid.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::arith;
use crate::error::{Error, Result};
use crate::largeness::{self, Density, Gap, Point, SetSpec, Window};
use crate::number_field::{AlgInt, Field};
use crate::par;
use crate::poly::OPoly;

const TWO64: f64 = 18_446_744_073_709_551_616.0;

/// Fixed-point image of `frac(x)`.
pub fn to_fixed(x: f64) -> u64 {
    let f = arith::frac(x);
    let scaled = f * TWO64;
    if scaled >= TWO64 {
        0
    } else {
        scaled as u64
    }
}

pub fn from_fixed(x: u64) -> f64 {
    x as f64 / TWO64
}

fn low64(x: &BigInt) -> u64 {
    let m = BigInt::one() << 64;
    x.mod_floor(&m).to_u64().expect("reduced mod 2^64")
}

fn low128(x: &BigInt) -> u128 {
    let m = BigInt::one() << 128;
    x.mod_floor(&m).to_u128().expect("reduced mod 2^128")
}

/// Distance to the nearest integer.
pub fn dist_to_int(t: f64) -> f64 {
    arith::dist_to_int(t)
}

/// Lebesgue measure of `I ∩ (I - t)` for an arc `I` of length `s` on the circle.
pub fn overlap(s: f64, t: f64) -> f64 {
    let d = dist_to_int(t);
    (s - d).max(0.0) + (s - (1.0 - d)).max(0.0)
}

/// A box on the torus `[0,1)^D`, possibly wrapping around.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusBox {
    pub corner: Vec<f64>,
    pub sides: Vec<f64>,
}

impl TorusBox {
    pub fn new(corner: Vec<f64>, sides: Vec<f64>) -> Result<TorusBox> {
        if corner.len() != sides.len() || corner.is_empty() {
            return Err(Error::InvalidInput("box corner and sides must have equal positive length".into()));
        }
        if sides.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(Error::InvalidInput("box sides must lie in [0, 1]".into()));
        }
        Ok(TorusBox { corner, sides })
    }

    /// `[0, 1)^dim`.
    pub fn full(dim: usize) -> TorusBox {
        TorusBox {
            corner: vec![0.0; dim],
            sides: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn measure(&self) -> f64 {
        self.sides.iter().product()
    }

    fn contains_fixed(&self, x: &[u64]) -> bool {
        x.iter().zip(&self.corner).zip(&self.sides).all(|((&p, &c), &s)| {
            let off = p.wrapping_sub(to_fixed(c));
            (off as f64) < s * TWO64
        })
    }
}

/// Measure of `B ∩ (B - t)`: the product of per-coordinate arc overlaps.
pub fn torus_overlap(b: &TorusBox, t: &[f64]) -> f64 {
    b.sides.iter().zip(t).map(|(&s, &x)| overlap(s, x)).product()
}

/// Rotation of `[0,1)^D` by `a*alpha_1 + b*alpha_2 + ...` for `u = a + b*w + ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct KroneckerSystem {
    alpha: Vec<Vec<u64>>,
    pub target: TorusBox,
}

impl KroneckerSystem {
    /// One rotation vector per basis element of `O_L`.
    pub fn new(alpha: &[Vec<f64>], target: TorusBox) -> Result<KroneckerSystem> {
        let dim = target.dim();
        if alpha.is_empty() || alpha.iter().any(|a| a.len() != dim) {
            return Err(Error::InvalidInput(format!("need rotation vectors of length {dim}")));
        }
        Ok(KroneckerSystem {
            alpha: alpha.iter().map(|a| a.iter().map(|&x| to_fixed(x)).collect()).collect(),
            target,
        })
    }

    pub fn dim(&self) -> usize {
        self.target.dim()
    }

    pub fn rank(&self) -> usize {
        self.alpha.len()
    }

    /// The rotation vector for `v` (integer coordinates), fixed point.
    pub fn shift_fixed(&self, v: &[BigInt]) -> Vec<u64> {
        let mut t = vec![0u64; self.dim()];
        for (c, a) in v.iter().zip(&self.alpha) {
            let c = low64(c);
            for (tj, aj) in t.iter_mut().zip(a) {
                *tj = tj.wrapping_add(c.wrapping_mul(*aj));
            }
        }
        t
    }

    pub fn shift(&self, v: &[BigInt]) -> Vec<f64> {
        self.shift_fixed(v).into_iter().map(from_fixed).collect()
    }

    pub fn translate(&self, x: &[f64], v: &[BigInt]) -> Vec<f64> {
        let fixed: Vec<u64> = x.iter().map(|&c| to_fixed(c)).collect();
        let t = self.shift_fixed(v);
        fixed.iter().zip(&t).map(|(a, b)| from_fixed(a.wrapping_add(*b))).collect()
    }
}

/// An element `(x, y, z)` of the Heisenberg group with
/// `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+x*y')`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeisenbergElement {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl HeisenbergElement {
    pub const IDENTITY: HeisenbergElement = HeisenbergElement { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        HeisenbergElement { x, y, z }
    }

    pub fn mul(&self, o: &Self) -> Self {
        HeisenbergElement::new(self.x + o.x, self.y + o.y, self.z + o.z + self.x * o.y)
    }

    pub fn inverse(&self) -> Self {
        HeisenbergElement::new(-self.x, -self.y, -self.z + self.x * self.y)
    }

    /// `a^n = (n a, n b, n c + C(n,2) a b)`.
    pub fn pow(&self, n: i64) -> Self {
        let nf = n as f64;
        let pairs = (n as f64) * ((n - 1) as f64) / 2.0;
        HeisenbergElement::new(nf * self.x, nf * self.y, nf * self.z + pairs * self.x * self.y)
    }

    /// `a^n` by repeated multiplication.
    pub fn pow_iter(&self, n: i64) -> Self {
        let step = if n >= 0 { *self } else { self.inverse() };
        (0..n.unsigned_abs()).fold(Self::IDENTITY, |acc, _| acc.mul(&step))
    }
}

/// Representative in `[0,1)^3` of `g Gamma`: right-multiply by
/// `(-floor x, -floor y, c)`, using `(x,y,z)(a,b,c) = (x+a, y+b, z+c+x*b)`.
pub fn heisenberg_reduce(g: HeisenbergElement) -> HeisenbergElement {
    let a = -libm::floor(g.x);
    let b = -libm::floor(g.y);
    let z = g.z + g.x * b;
    let c = -libm::floor(z);
    let fix = |v: f64| if v >= 1.0 { 0.0 } else { v };
    HeisenbergElement::new(fix(g.x + a), fix(g.y + b), fix(z + c))
}

/// The nilrotation `g Gamma -> a^n g Gamma` on the Heisenberg nilmanifold.
#[derive(Clone, Debug, PartialEq)]
pub struct HeisenbergSystem {
    a: [u64; 3],
    pub generator: HeisenbergElement,
    pub target: TorusBox,
}

/// Everything about `a^n` the action needs, reduced modulo the fixed-point grid.
struct HeisenbergPower {
    /// `n * alpha` scaled by `2^64`, modulo `2^128`.
    na: u128,
    /// `n * beta` scaled by `2^64`: low and high words.
    nb_lo: u64,
    nb_hi: u64,
    /// `n * gamma + C(n,2) alpha beta` scaled by `2^128`.
    nz: u128,
}

impl HeisenbergSystem {
    pub fn new(generator: HeisenbergElement, target: TorusBox) -> Result<HeisenbergSystem> {
        if target.dim() != 3 {
            return Err(Error::InvalidInput("Heisenberg target box must be 3-dimensional".into()));
        }
        let a = [to_fixed(generator.x), to_fixed(generator.y), to_fixed(generator.z)];
        Ok(HeisenbergSystem { a, generator, target })
    }

    fn power(&self, n: &BigInt) -> HeisenbergPower {
        let [al, be, ga] = self.a.map(BigInt::from);
        let nb = n * &be;
        let (hi, lo) = nb.div_mod_floor(&(BigInt::one() << 64));
        let pairs = n * (n - 1) / 2;
        let nz = (n * &ga << 64) + pairs * &al * &be;
        HeisenbergPower {
            na: low128(&(n * &al)),
            nb_lo: lo.to_u64().expect("reduced"),
            nb_hi: low64(&hi),
            nz: low128(&nz),
        }
    }

    fn apply(&self, p: &HeisenbergPower, g: &[u64]) -> [u64; 3] {
        let (x, y, z) = (g[0], g[1], g[2]);
        let x2 = x.wrapping_add(p.na as u64);
        let (y2, carry) = y.overflowing_add(p.nb_lo);
        let floor_b = p.nb_hi.wrapping_add(carry as u64);
        let z128 = p
            .nz
            .wrapping_add((z as u128) << 64)
            .wrapping_add(p.na.wrapping_mul(y as u128))
            .wrapping_sub((x2.wrapping_mul(floor_b) as u128) << 64);
        [x2, y2, (z128 >> 64) as u64]
    }

    /// `a^n (x, y, z) Gamma`, reduced to `[0,1)^3`.
    pub fn act(&self, n: &BigInt, g: HeisenbergElement) -> HeisenbergElement {
        let p = self.power(n);
        let r = self.apply(&p, &[to_fixed(g.x), to_fixed(g.y), to_fixed(g.z)]);
        HeisenbergElement::new(from_fixed(r[0]), from_fixed(r[1]), from_fixed(r[2]))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum System {
    Kronecker(KroneckerSystem),
    Heisenberg(HeisenbergSystem),
}

/// Precomputed action of one group element.
enum Prepared {
    Shift(Vec<u64>),
    Heisenberg(HeisenbergPower),
}

impl System {
    pub fn target(&self) -> &TorusBox {
        match self {
            System::Kronecker(k) => &k.target,
            System::Heisenberg(h) => &h.target,
        }
    }

    pub fn dim(&self) -> usize {
        self.target().dim()
    }

    /// Rank of the acting lattice.
    pub fn rank(&self) -> usize {
        match self {
            System::Kronecker(k) => k.rank(),
            System::Heisenberg(_) => 1,
        }
    }

    fn prepare(&self, v: &[BigInt]) -> Prepared {
        match self {
            System::Kronecker(k) => Prepared::Shift(k.shift_fixed(v)),
            System::Heisenberg(h) => Prepared::Heisenberg(h.power(&v[0])),
        }
    }

    fn apply(&self, p: &Prepared, x: &[u64]) -> Vec<u64> {
        let mut out = vec![0; x.len()];
        self.apply_into(p, x, &mut out);
        out
    }

    fn apply_into(&self, p: &Prepared, x: &[u64], out: &mut [u64]) {
        match (self, p) {
            (_, Prepared::Shift(t)) => {
                for ((o, a), b) in out.iter_mut().zip(x).zip(t) {
                    *o = a.wrapping_add(*b);
                }
            }
            (System::Heisenberg(h), Prepared::Heisenberg(hp)) => out.copy_from_slice(&h.apply(hp, x)),
            _ => unreachable!("prepared for another system"),
        }
    }

    /// `T^v x` for a point given in floats.
    pub fn act(&self, v: &[BigInt], x: &[f64]) -> Vec<f64> {
        let fixed: Vec<u64> = x.iter().map(|&c| to_fixed(c)).collect();
        self.apply(&self.prepare(v), &fixed).into_iter().map(from_fixed).collect()
    }
}

/// Uniform random points of `[0,1)^dim`, fixed point.
fn sample_points(dim: usize, n: usize, seed: u64) -> Vec<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..dim).map(|_| rng.next_u64()).collect()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    Exact,
    MonteCarlo { samples: usize, seed: u64, stderr: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationReport {
    pub u: Point,
    pub value: f64,
    pub method: Method,
}

/// Monte-Carlo settings; the stream for each `u` is derived from `(seed, u)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sampling {
    pub samples: usize,
    pub seed: u64,
}

/// Shifts `p_i(u)` as integer coordinates against the integral basis.
fn poly_shifts(sys: &System, polys: &[OPoly], u: &[i64]) -> Result<Vec<Vec<BigInt>>> {
    let first = polys.first().ok_or(Error::EmptyInput("polynomial family"))?;
    let f: Field = first.field();
    let m = f.degree();
    if sys.rank() != m {
        return Err(Error::InvalidInput(format!(
            "system acts by a rank-{} lattice but {} has rank {m}",
            sys.rank(),
            f
        )));
    }
    let d = first.arity();
    if u.len() != d * m {
        return Err(Error::ArityMismatch {
            expected: d * m,
            got: u.len(),
        });
    }
    let point: Vec<AlgInt> = u
        .chunks(m)
        .map(|c| {
            let coords: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
            AlgInt::from_coords(&coords)
        })
        .collect();
    polys
        .iter()
        .map(|p| {
            if p.field() != f || p.arity() != d {
                return Err(Error::InvalidInput("polynomials must share field and arity".into()));
            }
            let v = p.evaluate(&point)?;
            Ok(v.coords(&f))
        })
        .collect()
}

/// `mu(B ∩ T^{-p_1(u)} B ∩ ... )`: exact for a single polynomial on a
/// Kronecker system, Monte Carlo otherwise.
pub fn correlation(sys: &System, polys: &[OPoly], u: &[i64], sampling: &Sampling) -> Result<CorrelationReport> {
    let shifts = poly_shifts(sys, polys, u)?;
    if let (System::Kronecker(k), [v]) = (sys, shifts.as_slice()) {
        return Ok(CorrelationReport {
            u: u.to_vec(),
            value: torus_overlap(&k.target, &k.shift(v)),
            method: Method::Exact,
        });
    }
    monte_carlo(sys, &shifts, u, sampling)
}

/// Monte-Carlo estimate of the same correlation, whatever the system.
pub fn correlation_monte_carlo(
    sys: &System,
    polys: &[OPoly],
    u: &[i64],
    sampling: &Sampling,
) -> Result<CorrelationReport> {
    let shifts = poly_shifts(sys, polys, u)?;
    monte_carlo(sys, &shifts, u, sampling)
}

fn monte_carlo(sys: &System, shifts: &[Vec<BigInt>], u: &[i64], sampling: &Sampling) -> Result<CorrelationReport> {
    if sampling.samples == 0 {
        return Err(Error::InvalidInput("sample count must be positive".into()));
    }
    let prepared: Vec<Prepared> = shifts.iter().map(|v| sys.prepare(v)).collect();
    let b = sys.target();
    let mut rng = ChaCha8Rng::seed_from_u64(arith::point_hash(sampling.seed, u));
    let mut hits = 0usize;
    let mut x = vec![0u64; sys.dim()];
    let mut y = vec![0u64; sys.dim()];
    for _ in 0..sampling.samples {
        for c in x.iter_mut() {
            *c = rng.next_u64();
        }
        if b.contains_fixed(&x)
            && prepared.iter().all(|p| {
                sys.apply_into(p, &x, &mut y);
                b.contains_fixed(&y)
            })
        {
            hits += 1;
        }
    }
    let n = sampling.samples as f64;
    let value = hits as f64 / n;
    Ok(CorrelationReport {
        u: u.to_vec(),
        value,
        method: Method::MonteCarlo {
            samples: sampling.samples,
            seed: sampling.seed,
            stderr: libm::sqrt(value * (1.0 - value) / n),
        },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReturnScan {
    /// One report per window point, in window order.
    pub rows: Vec<CorrelationReport>,
    pub hits: Vec<Point>,
    pub density: Density,
    pub gap: Gap,
}

/// `{u in W : correlation(u) >= threshold}` with its density and gap on `W`.
pub fn return_set_scan(
    sys: &System,
    polys: &[OPoly],
    threshold: f64,
    w: &Window,
    sampling: &Sampling,
    budget: u128,
) -> Result<ReturnScan> {
    let exact = matches!(sys, System::Kronecker(_)) && polys.len() == 1;
    let per_point = if exact { 1 } else { sampling.samples.max(1) as u128 };
    let needed = w.cardinality().saturating_mul(per_point);
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    let points: Vec<Point> = w.points().collect();
    let rows: Vec<CorrelationReport> = par::map(&points, |u| correlation(sys, polys, u, sampling))
        .into_iter()
        .collect::<Result<_>>()?;
    let hits: Vec<Point> = rows.iter().filter(|r| r.value >= threshold).map(|r| r.u.clone()).collect();
    let density = Density {
        count: hits.len() as u128,
        size: w.cardinality(),
    };
    let gap = largeness::syndeticity_gap(&SetSpec::explicit(hits.iter().cloned()), w)?;
    Ok(ReturnScan {
        rows,
        hits,
        density,
        gap,
    })
}

/// A real function on the phase space, evaluated at sample points.
#[derive(Clone, Debug, PartialEq)]
pub enum SampledFunction {
    Constant(f64),
    /// `cos(2 pi k . x)`.
    Cosine(Vec<i64>),
    Indicator(TorusBox),
    /// `1_B - mu(B)`.
    CenteredIndicator(TorusBox),
}

impl SampledFunction {
    fn eval(&self, x: &[u64]) -> f64 {
        match self {
            SampledFunction::Constant(c) => *c,
            SampledFunction::Cosine(k) => {
                let phase = k
                    .iter()
                    .zip(x)
                    .fold(0u64, |acc, (&kj, &xj)| acc.wrapping_add((kj as u64).wrapping_mul(xj)));
                libm::cos(2.0 * core::f64::consts::PI * from_fixed(phase))
            }
            SampledFunction::Indicator(b) => b.contains_fixed(x) as u8 as f64,
            SampledFunction::CenteredIndicator(b) => b.contains_fixed(x) as u8 as f64 - b.measure(),
        }
    }
}

/// Settings for [`ghk_estimate`].
#[derive(Clone, Debug, PartialEq)]
pub struct GhkConfig {
    pub k: u32,
    /// Window of lattice shifts `u` to average over.
    pub window: Window,
    pub samples: usize,
    pub seed: u64,
    /// Average over this many pseudo-random window points per level instead
    /// of the whole window.
    pub u_samples: Option<usize>,
    /// Cap on the number of function evaluations.
    pub budget: u128,
}

pub const GHK_MAX_K: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhkReport {
    /// The estimate of the seminorm.
    pub value: f64,
    /// The averaged `2^k`-th power before clamping and root extraction.
    pub power: f64,
}

/// Window estimate of the seminorm of order `k` by the recursion
/// `P(S, 0) = mean_x prod_{s in S} f(T^s x)` and
/// `P(S, j+1) = avg_u P(S ∪ (S+u), j)`, clamping at zero from `j = 1` on.
pub fn ghk_estimate(sys: &System, f: &SampledFunction, cfg: &GhkConfig) -> Result<GhkReport> {
    if cfg.k > GHK_MAX_K {
        return Err(Error::InvalidInput(format!("seminorm order {} exceeds {GHK_MAX_K}", cfg.k)));
    }
    if cfg.samples == 0 {
        return Err(Error::InvalidInput("sample count must be positive".into()));
    }
    if cfg.window.dim() != sys.rank() {
        return Err(Error::ArityMismatch {
            expected: sys.rank(),
            got: cfg.window.dim(),
        });
    }
    let all: Vec<Point> = cfg.window.points().collect();
    let levels: Vec<Vec<Point>> = (0..cfg.k)
        .map(|level| match cfg.u_samples {
            Some(n) => (0..n)
                .map(|i| {
                    let h = arith::point_hash(cfg.seed ^ 0x5eed_0f_5eed, &[level as i64, i as i64]);
                    all[(h % all.len() as u64) as usize].clone()
                })
                .collect(),
            None => all.clone(),
        })
        .collect();
    let per_level: u128 = levels.iter().map(|l| l.len() as u128).product();
    let needed = per_level
        .saturating_mul(cfg.samples as u128)
        .saturating_mul(1u128 << cfg.k);
    if needed > cfg.budget {
        return Err(Error::Budget {
            needed,
            budget: cfg.budget,
        });
    }
    let xs = sample_points(sys.dim(), cfg.samples, arith::mix64(cfg.seed));
    let base: Vec<f64> = xs.iter().map(|x| f.eval(x)).collect();
    let zero: Point = vec![0; sys.rank()];
    let mut est = Estimator {
        sys,
        f,
        xs: &xs,
        base: &base,
        levels: &levels,
        cache: BTreeMap::new(),
    };
    let distinct: BTreeSet<&Point> = levels.iter().flatten().collect();
    if (distinct.len() as u128).saturating_mul(cfg.samples as u128) <= GHK_CACHE_VALUES {
        let cache = distinct.into_iter().map(|u| (u.clone(), est.column(u))).collect();
        est.cache = cache;
    }
    let power = est.level(&[zero], cfg.k as usize);
    let value = libm::pow(power.max(0.0), 1.0 / (1u64 << cfg.k) as f64);
    Ok(GhkReport { value, power })
}

/// Largest number of cached function values in [`ghk_estimate`].
const GHK_CACHE_VALUES: u128 = 1 << 22;

struct Estimator<'a> {
    sys: &'a System,
    f: &'a SampledFunction,
    xs: &'a [Vec<u64>],
    base: &'a [f64],
    levels: &'a [Vec<Point>],
    /// `f(T^u x_i)` for the shifts drawn at each level.
    cache: BTreeMap<Point, Vec<f64>>,
}

enum Column<'a> {
    Cached(&'a [f64]),
    Live(Prepared),
}

impl Estimator<'_> {
    fn prepare(&self, s: &[i64]) -> Prepared {
        let v: Vec<BigInt> = s.iter().map(|&c| BigInt::from(c)).collect();
        self.sys.prepare(&v)
    }

    fn column(&self, s: &[i64]) -> Vec<f64> {
        let p = self.prepare(s);
        let mut buf = vec![0u64; self.sys.dim()];
        self.xs
            .iter()
            .map(|x| {
                self.sys.apply_into(&p, x, &mut buf);
                self.f.eval(&buf)
            })
            .collect()
    }

    fn mean_product(&self, shifts: &[Point]) -> f64 {
        let cols: Vec<Column<'_>> = shifts
            .iter()
            .map(|s| {
                if s.iter().all(|&c| c == 0) {
                    Column::Cached(self.base)
                } else if let Some(v) = self.cache.get(s) {
                    Column::Cached(v)
                } else {
                    Column::Live(self.prepare(s))
                }
            })
            .collect();
        let mut buf = vec![0u64; self.sys.dim()];
        let mut sum = 0.0;
        for (i, x) in self.xs.iter().enumerate() {
            let mut prod = 1.0;
            for c in &cols {
                prod *= match c {
                    Column::Cached(v) => v[i],
                    Column::Live(p) => {
                        self.sys.apply_into(p, x, &mut buf);
                        self.f.eval(&buf)
                    }
                };
            }
            sum += prod;
        }
        sum / self.xs.len() as f64
    }

    fn level(&self, shifts: &[Point], j: usize) -> f64 {
        if j == 0 {
            return self.mean_product(shifts);
        }
        let us = &self.levels[j - 1];
        let child = |u: &Point| {
            let mut next = shifts.to_vec();
            next.extend(shifts.iter().map(|s| s.iter().zip(u).map(|(a, b)| a + b).collect()));
            let v = self.level(&next, j - 1);
            if j - 1 >= 1 {
                v.max(0.0)
            } else {
                v
            }
        };
        let values: Vec<f64> = if j == self.levels.len() {
            par::map(us, child)
        } else {
            us.iter().map(child).collect()
        };
        values.iter().sum::<f64>() / us.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, proptest, ProptestConfig};

    const GOLDEN: f64 = 0.618_033_988_749_894_8;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn kron_1d(side: f64) -> System {
        System::Kronecker(KroneckerSystem::new(&[vec![GOLDEN]], TorusBox::new(vec![0.0], vec![side]).unwrap()).unwrap())
    }

    fn squares() -> Vec<OPoly> {
        vec![OPoly::parse("x^2", Field::rational()).unwrap()]
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(overlap(0.5, 0.0), 0.5);
        assert!((overlap(0.5, 0.3) - 0.2).abs() < 1e-15);
        assert!((overlap(0.8, 0.5) - 0.6).abs() < 1e-15);
        assert_eq!(overlap(1.0, 0.37), 1.0);
    }

    #[test]
    fn overlap_matches_interval_oracle() {
        // Direct interval intersection on a fine grid.
        for &(s, t) in &[(0.5, 0.3), (0.8, 0.5), (0.25, 0.9), (0.6, 0.45)] {
            let n = 200_000;
            let inside = |x: f64| arith::frac(x) < s;
            let count = (0..n)
                .filter(|&i| {
                    let x = (i as f64 + 0.5) / n as f64;
                    inside(x) && inside(x + t)
                })
                .count();
            assert!((count as f64 / n as f64 - overlap(s, t)).abs() < 1e-4);
        }
    }

    #[test]
    fn kronecker_correlation_examples() {
        let sys = kron_1d(0.5);
        let s = Sampling { samples: 1000, seed: 1 };
        let r = correlation(&sys, &squares(), &[0], &s).unwrap();
        assert_eq!((r.value, r.method), (0.5, Method::Exact));
        let r = correlation(&sys, &squares(), &[1], &s).unwrap();
        assert!((r.value - (0.5 - (1.0 - GOLDEN))).abs() < 1e-9);
    }

    #[test]
    fn heisenberg_full_box_correlation_is_one() {
        let h = HeisenbergSystem::new(HeisenbergElement::new(GOLDEN, 2f64.sqrt(), 0.1), TorusBox::full(3)).unwrap();
        let sys = System::Heisenberg(h);
        let s = Sampling { samples: 500, seed: 9 };
        for u in [-7i64, 0, 3, 12345] {
            let r = correlation(&sys, &squares(), &[u], &s).unwrap();
            assert_eq!(r.value, 1.0);
        }
        assert!(correlation(&sys, &squares(), &[1], &Sampling { samples: 0, seed: 0 }).is_err());
    }

    #[test]
    fn heisenberg_reduce_examples() {
        let r = heisenberg_reduce(HeisenbergElement::new(0.5, 0.5, 0.5));
        assert_eq!(r, HeisenbergElement::new(0.5, 0.5, 0.5));
        let r = heisenberg_reduce(HeisenbergElement::new(1.2, 0.0, 0.0));
        assert!((r.x - 0.2).abs() < 1e-12 && r.y == 0.0 && r.z == 0.0);
        let r = heisenberg_reduce(HeisenbergElement::new(0.5, 1.5, 0.3));
        assert!((r.x - 0.5).abs() < 1e-12 && (r.y - 0.5).abs() < 1e-12 && (r.z - 0.8).abs() < 1e-12);
    }

    #[test]
    fn heisenberg_reduction_is_right_lattice_multiplication() {
        for &(x, y, z) in &[(3.7, -2.2, 5.1), (-0.3, 0.9, -7.25), (12.5, 4.75, 0.0)] {
            let g = HeisenbergElement::new(x, y, z);
            let r = heisenberg_reduce(g);
            let gamma = g.inverse().mul(&r);
            for c in [gamma.x, gamma.y, gamma.z] {
                assert!((c - libm::round(c)).abs() < 1e-9, "{gamma:?}");
            }
        }
    }

    #[test]
    fn heisenberg_closed_form_matches_iteration() {
        let a = HeisenbergElement::new(0.37, -1.21, 0.05);
        for n in -50..=50 {
            let (c, i) = (a.pow(n), a.pow_iter(n));
            for (p, q) in [(c.x, i.x), (c.y, i.y), (c.z, i.z)] {
                assert!((p - q).abs() < 1e-9 * (1.0 + q.abs()), "n = {n}");
            }
        }
    }

    #[test]
    fn heisenberg_fixed_point_action_matches_group_law() {
        let a = HeisenbergElement::new(0.375, 0.8125, 0.0625);
        let h = HeisenbergSystem::new(a, TorusBox::full(3)).unwrap();
        let g = HeisenbergElement::new(0.25, 0.5, 0.75);
        for n in -40..=40 {
            let got = h.act(&BigInt::from(n), g);
            let want = heisenberg_reduce(a.pow(n).mul(&g));
            for (p, q) in [(got.x, want.x), (got.y, want.y), (got.z, want.z)] {
                let d = dist_to_int(p - q);
                assert!(d < 1e-9, "n = {n}: {got:?} vs {want:?}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn kronecker_action_is_additive(u in -1_000_000i64..1_000_000, v in -1_000_000i64..1_000_000,
                                        b in -1000i64..1000, x in 0.0f64..1.0, y in 0.0f64..1.0) {
            let k = KroneckerSystem::new(&[vec![GOLDEN, 0.1], vec![2f64.sqrt(), 0.3]], TorusBox::full(2)).unwrap();
            let sys = System::Kronecker(k);
            let once = sys.act(&big(&[u + v, 2 * b]), &[x, y]);
            let twice = sys.act(&big(&[u, b]), &sys.act(&big(&[v, b]), &[x, y]));
            for (p, q) in once.iter().zip(&twice) {
                prop_assert!(dist_to_int(p - q) < 1e-12);
            }
        }

        #[test]
        fn heisenberg_action_is_additive(n in -100_000_000i64..100_000_000, m in -100_000_000i64..100_000_000,
                                         x in 0.0f64..1.0, y in 0.0f64..1.0, z in 0.0f64..1.0) {
            let h = HeisenbergSystem::new(HeisenbergElement::new(GOLDEN, 2f64.sqrt() - 1.0, 0.2), TorusBox::full(3)).unwrap();
            let g = [to_fixed(x), to_fixed(y), to_fixed(z)];
            let once = h.apply(&h.power(&BigInt::from(n + m)), &g);
            let twice = h.apply(&h.power(&BigInt::from(n)), &h.apply(&h.power(&BigInt::from(m)), &g));
            for (p, q) in once.iter().zip(&twice) {
                prop_assert!(dist_to_int(from_fixed(p.wrapping_sub(*q))) < 1e-12);
            }
        }
    }

    #[test]
    fn exact_and_monte_carlo_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let alpha = from_fixed(rng.next_u64());
            let side = 0.05 + 0.9 * from_fixed(rng.next_u64());
            let u = (rng.next_u64() % 1000) as i64 - 500;
            let k = KroneckerSystem::new(&[vec![alpha]], TorusBox::new(vec![from_fixed(rng.next_u64())], vec![side]).unwrap())
                .unwrap();
            let sys = System::Kronecker(k.clone());
            let exact = correlation(&sys, &squares(), &[u], &Sampling { samples: 1, seed: 0 }).unwrap();
            let mc = correlation_monte_carlo(&sys, &squares(), &[u], &Sampling { samples: 20_000, seed: 5 }).unwrap();
            let Method::MonteCarlo { stderr, .. } = mc.method else {
                panic!("expected Monte Carlo");
            };
            let z = (mc.value - exact.value).abs() / stderr.max(1e-9);
            worst = worst.max(z);
        }
        assert!(worst < 4.0, "worst deviation {worst} standard errors");
    }

    #[test]
    fn correlation_at_zero_is_measure() {
        let h = HeisenbergSystem::new(
            HeisenbergElement::new(GOLDEN, 0.3, 0.0),
            TorusBox::new(vec![0.1, 0.2, 0.3], vec![0.5, 0.6, 0.7]).unwrap(),
        )
        .unwrap();
        let sys = System::Heisenberg(h);
        let r = correlation(&sys, &squares(), &[0], &Sampling { samples: 40_000, seed: 3 }).unwrap();
        let Method::MonteCarlo { stderr, .. } = r.method else {
            panic!("expected Monte Carlo");
        };
        assert!((r.value - 0.21).abs() < 3.0 * stderr);
    }

    #[test]
    fn return_scans() {
        let sys = kron_1d(0.5);
        let w = Window::centered(1, 10_000);
        let s = Sampling { samples: 1, seed: 0 };
        let lin = vec![OPoly::parse("x", Field::rational()).unwrap()];
        let scan = return_set_scan(&sys, &lin, 0.49, &w, &s, u128::MAX).unwrap();
        assert!(scan.hits.len() > 1);
        assert!(scan.hits.iter().all(|u| u[0] == 0 || u[0].abs() >= 55));
        let scan = return_set_scan(&sys, &lin, 0.51, &w, &s, u128::MAX).unwrap();
        assert!(scan.hits.is_empty());
        assert_eq!(scan.gap, Gap::InfiniteOnWindow);
        let scan = return_set_scan(&sys, &squares(), 0.2, &w, &s, u128::MAX).unwrap();
        assert!(scan.density.as_f64() > 0.01);
        assert!(matches!(scan.gap, Gap::Finite(g) if g <= 200));
        assert!(matches!(
            return_set_scan(&sys, &squares(), 0.2, &w, &s, 10),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn ghk_constant_is_one() {
        let sys = kron_1d(0.5);
        for k in 0..=3 {
            let cfg = GhkConfig {
                k,
                window: Window::interval(1, 20).unwrap(),
                samples: 50,
                seed: 4,
                u_samples: if k == 3 { Some(8) } else { None },
                budget: 1 << 40,
            };
            let r = ghk_estimate(&sys, &SampledFunction::Constant(1.0), &cfg).unwrap();
            assert!((r.value - 1.0).abs() < 1e-12);
        }
        let cfg = GhkConfig {
            k: 4,
            window: Window::interval(1, 2).unwrap(),
            samples: 1,
            seed: 0,
            u_samples: None,
            budget: 1 << 40,
        };
        assert!(ghk_estimate(&sys, &SampledFunction::Constant(1.0), &cfg).is_err());
    }

    #[test]
    fn ghk_cosine_small_scale() {
        let sys = kron_1d(0.5);
        let f = SampledFunction::Cosine(vec![1]);
        let cfg = GhkConfig {
            k: 1,
            window: Window::interval(1, 2000).unwrap(),
            samples: 2000,
            seed: 11,
            u_samples: None,
            budget: 1 << 40,
        };
        assert!(ghk_estimate(&sys, &f, &cfg).unwrap().value < 0.05);
        let cfg = GhkConfig { k: 2, u_samples: Some(60), ..cfg };
        let oracle = libm::pow(0.125, 0.25);
        let r = ghk_estimate(&sys, &f, &cfg).unwrap();
        assert!((r.value - oracle).abs() < 0.05, "{r:?}");
    }

    #[test]
    fn ghk_is_bounded_by_sup_norm() {
        let sys = kron_1d(0.5);
        let b = TorusBox::new(vec![0.2], vec![0.3]).unwrap();
        for f in [SampledFunction::Indicator(b.clone()), SampledFunction::CenteredIndicator(b)] {
            for k in 1..=2 {
                let cfg = GhkConfig {
                    k,
                    window: Window::interval(1, 30).unwrap(),
                    samples: 300,
                    seed: 2,
                    u_samples: None,
                    budget: 1 << 40,
                };
                let r = ghk_estimate(&sys, &f, &cfg).unwrap();
                assert!((0.0..=1.0 + 1e-12).contains(&r.value));
            }
        }
    }
}
