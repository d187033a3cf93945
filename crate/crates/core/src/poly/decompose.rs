//! Coordinate decomposition of `O_L`-polynomials into `Z`-polynomial maps.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::lfield::LElt;
use super::{write_sum, Monomial, OPoly};
use crate::error::{Error, Result};
use crate::number_field::{AlgInt, Field};

/// A polynomial in `Z[v_1, ..., v_n]`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl ZPoly {
    pub fn zero(nvars: usize) -> ZPoly {
        ZPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigInt) -> ZPoly {
        let mut p = ZPoly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, index: usize) -> ZPoly {
        let mut m = vec![0; nvars];
        m[index] = 1;
        let mut p = ZPoly::zero(nvars);
        p.add_term(m, BigInt::one());
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &ZPoly) -> ZPoly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> ZPoly {
        let mut out = ZPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    pub fn mul(&self, o: &ZPoly) -> ZPoly {
        let mut out = ZPoly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    pub fn eval(&self, point: &[BigInt]) -> BigInt {
        assert_eq!(point.len(), self.nvars, "wrong number of coordinates");
        self.terms
            .iter()
            .map(|(m, c)| {
                m.iter()
                    .zip(point)
                    .fold(c.clone(), |acc, (&e, x)| acc * num_traits::pow(x.clone(), e as usize))
            })
            .sum()
    }

    /// Renders with the given variable names, highest total degree first.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        Named { p: self, names }
    }
}

struct Named<'a> {
    p: &'a ZPoly,
    names: &'a [String],
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut v: Vec<_> = self.p.terms.iter().collect();
        v.sort_by(|(m1, _), (m2, _)| {
            let d1: u32 = m1.iter().sum();
            let d2: u32 = m2.iter().sum();
            d2.cmp(&d1).then_with(|| m2.cmp(m1))
        });
        write_sum(f, v.into_iter(), |j| self.names[j].clone())
    }
}

/// Components of `p` against `{1, w}` (one component over `Q`). Variables
/// are ordered `a_1, b_1, a_2, b_2, ...` with `x_j = a_j + b_j w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZPolyVector {
    pub components: Vec<ZPoly>,
    pub field: Field,
    pub arity: usize,
}

impl ZPolyVector {
    fn m(&self) -> usize {
        self.field.degree()
    }

    pub fn nvars(&self) -> usize {
        self.arity * self.m()
    }

    pub fn names(&self) -> Vec<String> {
        let letters = ["a", "b"];
        let mut out = Vec::with_capacity(self.nvars());
        for j in 0..self.arity {
            for l in &letters[..self.m()] {
                out.push(if self.arity == 1 {
                    String::from(*l)
                } else {
                    format!("{l}{}", j + 1)
                });
            }
        }
        out
    }

    pub fn component_strings(&self) -> Vec<String> {
        let names = self.names();
        self.components
            .iter()
            .map(|c| format!("{}", c.display_with(&names)))
            .collect()
    }

    /// Integer coordinates of a point of `O_L^d`.
    pub fn coordinates(&self, point: &[AlgInt]) -> Vec<BigInt> {
        point
            .iter()
            .flat_map(|x| x.coords(&self.field))
            .collect()
    }

    /// `sum_j components[j](u) e_j` for `u` in `Z^{dm}`.
    pub fn eval(&self, u: &[BigInt]) -> AlgInt {
        let vals: Vec<BigInt> = self.components.iter().map(|c| c.eval(u)).collect();
        AlgInt::from_coords(&vals)
    }

    /// Rebuilds the `O_L`-polynomial by substituting `b = (x - conj x)/(2w - t)`
    /// and `a = x - b w`, which must leave no trace of `conj x`.
    pub fn recompose(&self) -> Result<OPoly> {
        let f = self.field;
        let d = self.arity;
        let nv = 2 * d;
        let mut subs: Vec<LPolyM> = Vec::with_capacity(self.nvars());
        for j in 0..d {
            let x = LPolyM::var(nv, 2 * j);
            if f.is_rational() {
                subs.push(x);
                continue;
            }
            let y = LPolyM::var(nv, 2 * j + 1);
            let (t, _) = f.min_poly_of_omega();
            let denom = AlgInt::new(-t, 2);
            let inv = LElt::from_alg(denom).inv(&f);
            let b = x.sub(&y).scale(&inv, &f);
            let a = x.sub(&b.scale(&LElt::from_alg(AlgInt::omega()), &f));
            subs.push(a);
            subs.push(b);
        }
        let mut total = LPolyM::zero();
        for (k, comp) in self.components.iter().enumerate() {
            let basis = if k == 0 { AlgInt::one() } else { AlgInt::omega() };
            let mut acc = LPolyM::zero();
            for (m, c) in &comp.terms {
                let mut term = LPolyM::constant(nv, LElt::from_alg(AlgInt::from_int(c.clone())));
                for (v, &e) in m.iter().enumerate() {
                    for _ in 0..e {
                        term = term.mul(&subs[v], &f);
                    }
                }
                acc = acc.add(&term);
            }
            total = total.add(&acc.scale(&LElt::from_alg(basis), &f));
        }
        let mut out = Vec::new();
        for (m, c) in total.terms {
            if m.iter().skip(1).step_by(2).any(|&e| e > 0) || !c.den.is_one() {
                return Err(Error::Internal("recomposition is not a polynomial over O_L".into()));
            }
            out.push((m.iter().step_by(2).copied().collect(), c.num));
        }
        OPoly::from_terms(f, d, out)
    }
}

/// Multivariate polynomial over `L` in variables `x_1, y_1, x_2, y_2, ...`.
#[derive(Clone, Debug)]
struct LPolyM {
    terms: BTreeMap<Monomial, LElt>,
}

impl LPolyM {
    fn zero() -> LPolyM {
        LPolyM {
            terms: BTreeMap::new(),
        }
    }

    fn constant(nv: usize, c: LElt) -> LPolyM {
        let mut p = LPolyM::zero();
        p.add_term(vec![0; nv], c);
        p
    }

    fn var(nv: usize, index: usize) -> LPolyM {
        let mut m = vec![0; nv];
        m[index] = 1;
        let mut p = LPolyM::zero();
        p.add_term(m, LElt::one());
        p
    }

    fn add_term(&mut self, m: Monomial, c: LElt) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&m) {
            Some(old) => old.add(&c),
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, sum);
        }
    }

    fn add(&self, o: &LPolyM) -> LPolyM {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn sub(&self, o: &LPolyM) -> LPolyM {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.neg());
        }
        out
    }

    fn scale(&self, k: &LElt, f: &Field) -> LPolyM {
        let mut out = LPolyM::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.mul(k, f));
        }
        out
    }

    fn mul(&self, o: &LPolyM, f: &Field) -> LPolyM {
        let mut out = LPolyM::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                out.add_term(m, c1.mul(c2, f));
            }
        }
        out
    }
}

/// `(c0, c1)` standing for `c0 + c1 w`.
type Pair = (ZPoly, ZPoly);

fn pair_mul(x: &Pair, y: &Pair, f: &Field) -> Pair {
    let (t, n) = f.min_poly_of_omega();
    let hi = x.1.mul(&y.1);
    let c0 = x.0.mul(&y.0).add(&hi.scale(&BigInt::from(n)));
    let c1 = x.0.mul(&y.1).add(&x.1.mul(&y.0)).add(&hi.scale(&BigInt::from(t)));
    (c0, c1)
}

pub(crate) fn decompose(p: &OPoly) -> ZPolyVector {
    let f = p.field();
    let d = p.arity();
    if f.is_rational() {
        let mut out = ZPoly::zero(d);
        for (m, c) in p.terms() {
            out.add_term(m.clone(), c.a.clone());
        }
        return ZPolyVector {
            components: vec![out],
            field: f,
            arity: d,
        };
    }
    let nv = 2 * d;
    let xs: Vec<Pair> = (0..d)
        .map(|j| (ZPoly::var(nv, 2 * j), ZPoly::var(nv, 2 * j + 1)))
        .collect();
    let mut powers: Vec<Vec<Pair>> = vec![vec![(ZPoly::constant(nv, BigInt::one()), ZPoly::zero(nv))]; d];
    let mut acc: Pair = (ZPoly::zero(nv), ZPoly::zero(nv));
    for (m, c) in p.terms() {
        let mut term: Pair = (ZPoly::constant(nv, c.a.clone()), ZPoly::constant(nv, c.b.clone()));
        for (j, &e) in m.iter().enumerate() {
            while powers[j].len() <= e as usize {
                let next = pair_mul(powers[j].last().expect("nonempty"), &xs[j], &f);
                powers[j].push(next);
            }
            term = pair_mul(&term, &powers[j][e as usize], &f);
        }
        acc = (acc.0.add(&term.0), acc.1.add(&term.1));
    }
    ZPolyVector {
        components: vec![acc.0, acc.1],
        field: f,
        arity: d,
    }
}
