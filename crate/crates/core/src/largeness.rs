//! Finite-window diagnostics for density, syndeticity and IP structure of
//! subsets of `Z^D`.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith;
use crate::error::{Error, Result};
use crate::par;

pub type Point = Vec<i64>;

/// An integer box `[lo_1, hi_1] x ... x [lo_D, hi_D]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    lo: Point,
    hi: Point,
}

impl Window {
    pub fn new(lo: Point, hi: Point) -> Result<Window> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidInput("window bounds must have equal positive length".into()));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::InvalidInput("empty window".into()));
        }
        Ok(Window { lo, hi })
    }

    /// `[-radius, radius]^dim`.
    pub fn centered(dim: usize, radius: i64) -> Window {
        assert!(dim > 0 && radius >= 0, "bad centered window");
        Window {
            lo: vec![-radius; dim],
            hi: vec![radius; dim],
        }
    }

    /// `[0, n]` in `Z`.
    pub fn interval(lo: i64, hi: i64) -> Result<Window> {
        Window::new(vec![lo], vec![hi])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn side(&self, j: usize) -> u64 {
        (self.hi[j] - self.lo[j]) as u64 + 1
    }

    pub fn cardinality(&self) -> u128 {
        (0..self.dim()).map(|j| self.side(j) as u128).product()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.lo).zip(&self.hi).all(|((v, l), h)| l <= v && v <= h)
    }

    pub fn shifted(&self, by: &[i64]) -> Window {
        Window {
            lo: self.lo.iter().zip(by).map(|(a, b)| a + b).collect(),
            hi: self.hi.iter().zip(by).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn inflated(&self, r: i64) -> Window {
        Window {
            lo: self.lo.iter().map(|a| a - r).collect(),
            hi: self.hi.iter().map(|a| a + r).collect(),
        }
    }

    /// Sub-window with the first coordinate fixed to `x0`.
    fn slice(&self, x0: i64) -> Window {
        let mut w = self.clone();
        w.lo[0] = x0;
        w.hi[0] = x0;
        w
    }

    /// Points in lexicographic order.
    pub fn points(&self) -> WindowPoints<'_> {
        WindowPoints {
            w: self,
            next: Some(self.lo.clone()),
        }
    }
}

pub struct WindowPoints<'a> {
    w: &'a Window,
    next: Option<Point>,
}

impl Iterator for WindowPoints<'_> {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        let cur = self.next.take()?;
        let mut n = cur.clone();
        let mut j = n.len();
        loop {
            if j == 0 {
                break;
            }
            j -= 1;
            if n[j] < self.w.hi[j] {
                n[j] += 1;
                self.next = Some(n);
                break;
            }
            n[j] = self.w.lo[j];
        }
        Some(cur)
    }
}

/// A subset of `Z^D` given by a pure membership predicate.
#[derive(Clone, Debug, PartialEq)]
pub enum SetSpec {
    /// `offset + H Z^D`, `H` upper triangular with positive diagonal; columns
    /// are the lattice basis.
    Congruence { hnf: Vec<Vec<i64>>, offset: Point },
    /// Each point independently with probability `density`, by hashing.
    Random { density: f64, seed: u64 },
    /// `{x : ||alpha . x|| < radius}`.
    Bohr { alpha: Vec<f64>, radius: f64 },
    Explicit(BTreeSet<Point>),
    All,
    Complement(Box<SetSpec>),
    Union(Vec<SetSpec>),
    Intersect(Vec<SetSpec>),
    /// `inner + by`.
    Shift { inner: Box<SetSpec>, by: Point },
}

impl SetSpec {
    /// `x_j = offset_j mod m_j` for each coordinate.
    pub fn modulus(m: &[i64], offset: Point) -> Result<SetSpec> {
        if m.iter().any(|&v| v <= 0) || m.len() != offset.len() {
            return Err(Error::InvalidInput("moduli must be positive, one per coordinate".into()));
        }
        let hnf = (0..m.len())
            .map(|i| (0..m.len()).map(|j| if i == j { m[i] } else { 0 }).collect())
            .collect();
        Ok(SetSpec::Congruence { hnf, offset })
    }

    /// Sublattice with upper-triangular basis matrix (columns are basis vectors).
    pub fn lattice(hnf: Vec<Vec<i64>>, offset: Point) -> Result<SetSpec> {
        let n = hnf.len();
        let ok = offset.len() == n
            && hnf.iter().enumerate().all(|(i, row)| {
                row.len() == n && row[i] > 0 && row[..i].iter().all(|&v| v == 0)
            });
        if !ok {
            return Err(Error::InvalidInput("lattice basis must be upper triangular with positive diagonal".into()));
        }
        Ok(SetSpec::Congruence { hnf, offset })
    }

    pub fn explicit(points: impl IntoIterator<Item = Point>) -> SetSpec {
        SetSpec::Explicit(points.into_iter().collect())
    }

    pub fn complement(self) -> SetSpec {
        SetSpec::Complement(Box::new(self))
    }

    pub fn shift(self, by: Point) -> SetSpec {
        SetSpec::Shift {
            inner: Box::new(self),
            by,
        }
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        match self {
            SetSpec::Congruence { hnf, offset } => {
                let mut v: Vec<i128> = x.iter().zip(offset).map(|(a, b)| *a as i128 - *b as i128).collect();
                for i in (0..v.len()).rev() {
                    let d = hnf[i][i] as i128;
                    if v[i] % d != 0 {
                        return false;
                    }
                    let c = v[i] / d;
                    for (k, vk) in v.iter_mut().enumerate().take(i + 1) {
                        *vk -= c * hnf[k][i] as i128;
                    }
                }
                true
            }
            SetSpec::Random { density, seed } => {
                arith::unit_from_hash(arith::point_hash(*seed, x)) < *density
            }
            SetSpec::Bohr { alpha, radius } => {
                let s = alpha
                    .iter()
                    .zip(x)
                    .fold(0.0, |acc, (&a, &n)| arith::frac(acc + arith::frac_mul(n, a)));
                arith::dist_to_int(s) < *radius
            }
            SetSpec::Explicit(set) => set.contains(x),
            SetSpec::All => true,
            SetSpec::Complement(s) => !s.contains(x),
            SetSpec::Union(v) => v.iter().any(|s| s.contains(x)),
            SetSpec::Intersect(v) => v.iter().all(|s| s.contains(x)),
            SetSpec::Shift { inner, by } => {
                let y: Point = x.iter().zip(by).map(|(a, b)| a - b).collect();
                inner.contains(&y)
            }
        }
    }

    /// Index of a congruence spec's lattice.
    pub fn index(&self) -> Option<u128> {
        match self {
            SetSpec::Congruence { hnf, .. } => Some((0..hnf.len()).map(|i| hnf[i][i] as u128).product()),
            _ => None,
        }
    }
}

/// Maximum number of generators accepted by [`finite_sums`].
pub const FINITE_SUMS_CAP: usize = 24;

/// All sums over nonempty subsets of `xs`.
pub fn finite_sums(xs: &[Point]) -> Result<BTreeSet<Point>> {
    if xs.len() > FINITE_SUMS_CAP {
        return Err(Error::Budget {
            needed: 1u128 << xs.len(),
            budget: 1u128 << FINITE_SUMS_CAP,
        });
    }
    let Some(first) = xs.first() else {
        return Ok(BTreeSet::new());
    };
    let dim = first.len();
    if xs.iter().any(|x| x.len() != dim) {
        return Err(Error::InvalidInput("generators of different dimension".into()));
    }
    // Sums indexed by subset mask, built from the lowest set bit.
    let n = xs.len();
    let mut sums: Vec<Point> = Vec::with_capacity(1 << n);
    sums.push(vec![0; dim]);
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        let rest = &sums[mask & (mask - 1)];
        let s = rest.iter().zip(&xs[low]).map(|(a, b)| a + b).collect();
        sums.push(s);
    }
    Ok(sums.into_iter().skip(1).collect())
}

/// `|S ∩ W|` out of `|W|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Density {
    pub count: u128,
    pub size: u128,
}

impl Density {
    pub fn as_f64(&self) -> f64 {
        self.count as f64 / self.size as f64
    }
}

pub fn count_in(s: &SetSpec, w: &Window) -> u128 {
    let slices: Vec<i64> = (w.lo[0]..=w.hi[0]).collect();
    par::map(&slices, |&x0| w.slice(x0).points().filter(|p| s.contains(p)).count() as u128)
        .into_iter()
        .sum()
}

/// Exact densities of `S` in each window; the total number of points
/// visited must not exceed `budget`.
pub fn density_profile(s: &SetSpec, windows: &[Window], budget: u128) -> Result<Vec<Density>> {
    let needed: u128 = windows.iter().map(Window::cardinality).sum();
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    Ok(windows
        .iter()
        .map(|w| Density {
            count: count_in(s, w),
            size: w.cardinality(),
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Gap {
    Finite(u64),
    InfiniteOnWindow,
}

/// Indicator of `S` on a box with D-dimensional prefix sums for box counts.
struct BoxCounter {
    w: Window,
    strides: Vec<usize>,
    prefix: Vec<u32>,
}

impl BoxCounter {
    fn new(s: &SetSpec, w: Window) -> Self {
        let dim = w.dim();
        let sides: Vec<usize> = (0..dim).map(|j| w.side(j) as usize + 1).collect();
        let mut strides = vec![1usize; dim];
        for j in (0..dim.saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * sides[j + 1];
        }
        let total = strides[0] * sides[0];
        let mut prefix = vec![0u32; total];
        // Membership in parallel by first-coordinate slice.
        let slices: Vec<i64> = (w.lo[0]..=w.hi[0]).collect();
        let rows = par::map(&slices, |&x0| {
            w.slice(x0).points().map(|p| s.contains(&p)).collect::<Vec<bool>>()
        });
        for (p, hit) in w.points().zip(rows.into_iter().flatten()) {
            if hit {
                let idx: usize = (0..dim).map(|j| (p[j] - w.lo[j]) as usize + 1).zip(&strides).map(|(a, s)| a * s).sum();
                prefix[idx] = 1;
            }
        }
        for j in 0..dim {
            let st = strides[j];
            for idx in 0..total {
                if (idx / st) % sides[j] != 0 {
                    prefix[idx] += prefix[idx - st];
                }
            }
        }
        BoxCounter { w, strides, prefix }
    }

    /// Number of members in `[lo, hi]`, clipped to the box.
    fn count(&self, lo: &[i64], hi: &[i64]) -> u64 {
        let dim = self.w.dim();
        let mut a = vec![0usize; dim];
        let mut b = vec![0usize; dim];
        for j in 0..dim {
            let l = lo[j].max(self.w.lo[j]);
            let h = hi[j].min(self.w.hi[j]);
            if l > h {
                return 0;
            }
            a[j] = (l - self.w.lo[j]) as usize;
            b[j] = (h - self.w.lo[j]) as usize + 1;
        }
        let mut total: i64 = 0;
        for corner in 0..(1usize << dim) {
            let mut idx = 0;
            let mut sign = 1;
            for j in 0..dim {
                if corner >> j & 1 == 1 {
                    idx += a[j] * self.strides[j];
                    sign = -sign;
                } else {
                    idx += b[j] * self.strides[j];
                }
            }
            total += sign * self.prefix[idx] as i64;
        }
        total as u64
    }
}

/// Largest number of box cells [`syndeticity_gap`] will allocate.
pub const GAP_CELL_BUDGET: u128 = 1 << 26;

/// Smallest `r` such that every point of `W` is within sup-distance `r` of
/// `S` (members counted inside `W` inflated by `r`).
pub fn syndeticity_gap(s: &SetSpec, w: &Window) -> Result<Gap> {
    let big = (0..w.dim()).map(|j| w.side(j) - 1).max().unwrap_or(0) as i64;
    let outer = w.inflated(big);
    let cells: u128 = (0..outer.dim()).map(|j| outer.side(j) as u128 + 1).product();
    if cells > GAP_CELL_BUDGET {
        return Err(Error::Budget {
            needed: cells,
            budget: GAP_CELL_BUDGET,
        });
    }
    let counter = BoxCounter::new(s, outer);
    let points: Vec<Point> = w.points().collect();
    let covered = |r: i64| {
        points.iter().all(|p| {
            let lo: Point = p.iter().map(|v| v - r).collect();
            let hi: Point = p.iter().map(|v| v + r).collect();
            counter.count(&lo, &hi) > 0
        })
    };
    if !covered(big) {
        return Ok(Gap::InfiniteOnWindow);
    }
    let (mut lo, mut hi) = (0i64, big);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if covered(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(Gap::Finite(lo as u64))
}

/// Smallest gap of `S + t` over shifts `t` in `shifts`, with the first shift
/// attaining it.
pub fn best_shift_gap(s: &SetSpec, w: &Window, shifts: &Window) -> Result<(Point, Gap)> {
    let mut best: Option<(Point, Gap)> = None;
    for t in shifts.points() {
        let g = syndeticity_gap(&s.clone().shift(t.clone()), w)?;
        if best.as_ref().map_or(true, |(_, b)| g < *b) {
            best = Some((t, g));
        }
    }
    best.ok_or_else(|| Error::Internal("empty shift window".into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IpSearch {
    /// Generators whose finite sums all lie in `W \ S`.
    Found(Vec<Point>),
    Absent,
    BudgetExhausted,
}

/// Depth-first search for `n` nonzero generators, in window order, whose
/// finite sums all avoid `S` and stay in `W`. Each new generator `x` must
/// keep `x + s` outside `S` for every earlier sum `s` (including `0`).
pub fn ip_falsify(s: &SetSpec, w: &Window, n: usize, node_budget: u64) -> Result<IpSearch> {
    if n == 0 || n > 10 {
        return Err(Error::InvalidInput(format!("generator count {n} outside 1..=10")));
    }
    let free: Vec<Point> = w
        .points()
        .filter(|p| p.iter().any(|&v| v != 0) && !s.contains(p))
        .collect();
    let good = |p: &Point| w.contains(p) && !s.contains(p);
    let mut nodes = 0u64;
    let mut gens: Vec<usize> = Vec::new();
    // sums[k] = finite sums of the first k generators, with 0.
    let mut sums: Vec<Vec<Point>> = vec![vec![vec![0; w.dim()]]];
    let mut next = 0usize;
    loop {
        if gens.len() == n {
            return Ok(IpSearch::Found(gens.iter().map(|&i| free[i].clone()).collect()));
        }
        let mut advanced = false;
        while next < free.len() {
            nodes += 1;
            if nodes > node_budget {
                return Ok(IpSearch::BudgetExhausted);
            }
            let x = &free[next];
            let base = sums.last().expect("nonempty");
            let new: Vec<Point> = base
                .iter()
                .map(|s| s.iter().zip(x).map(|(a, b)| a + b).collect())
                .collect();
            if new.iter().all(good) {
                let mut all = base.clone();
                all.extend(new);
                sums.push(all);
                gens.push(next);
                next += 1;
                advanced = true;
                break;
            }
            next += 1;
        }
        if !advanced {
            match gens.pop() {
                None => return Ok(IpSearch::Absent),
                Some(i) => {
                    sums.pop();
                    next = i + 1;
                }
            }
        }
    }
}
