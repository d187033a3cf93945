//! Sparse multivariate polynomials over `O_L`.

mod decompose;
mod gcd;
mod lfield;
mod parse;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::number_field::{AlgInt, Field};

pub use decompose::{ZPoly, ZPolyVector};
pub use gcd::{discriminant, poly_gcd_over_l, resultant, squarefree_part, GcdResult};

/// Exponent vector of a monomial.
pub type Monomial = Vec<u32>;

/// A polynomial in `O_L[x_1, ..., x_d]`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OPoly {
    field: Field,
    arity: usize,
    terms: BTreeMap<Monomial, AlgInt>,
}

impl OPoly {
    pub fn zero(field: Field, arity: usize) -> OPoly {
        OPoly {
            field,
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: Field, arity: usize, c: AlgInt) -> OPoly {
        let mut p = OPoly::zero(field, arity);
        p.add_term(vec![0; arity], c);
        p
    }

    /// The variable `x_{index+1}`.
    pub fn var(field: Field, arity: usize, index: usize) -> OPoly {
        let mut m = vec![0; arity];
        m[index] = 1;
        let mut p = OPoly::zero(field, arity);
        p.add_term(m, AlgInt::one());
        p
    }

    pub fn x(field: Field) -> OPoly {
        OPoly::var(field, 1, 0)
    }

    /// Univariate polynomial from coefficients, lowest degree first.
    pub fn from_dense(field: Field, coeffs: &[AlgInt]) -> OPoly {
        let mut p = OPoly::zero(field, 1);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(vec![i as u32], c.clone());
        }
        p
    }

    pub fn from_terms(
        field: Field,
        arity: usize,
        terms: impl IntoIterator<Item = (Monomial, AlgInt)>,
    ) -> Result<OPoly> {
        let mut p = OPoly::zero(field, arity);
        for (m, c) in terms {
            if m.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    got: m.len(),
                });
            }
            field.check(&c)?;
            p.add_term(m, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: AlgInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &AlgInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &[u32]) -> AlgInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> AlgInt {
        self.coeff(&vec![0; self.arity])
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    pub fn is_constant(&self) -> bool {
        self.total_degree().unwrap_or(0) == 0
    }

    pub fn is_univariate(&self) -> bool {
        self.arity == 1
    }

    fn require_univariate(&self) -> Result<()> {
        if self.is_univariate() {
            Ok(())
        } else {
            Err(Error::NotUnivariate)
        }
    }

    /// Coefficients lowest degree first; empty for zero.
    pub fn to_dense(&self) -> Result<Vec<AlgInt>> {
        self.require_univariate()?;
        let deg = match self.total_degree() {
            None => return Ok(Vec::new()),
            Some(d) => d as usize,
        };
        let mut out = vec![AlgInt::zero(); deg + 1];
        for (m, c) in &self.terms {
            out[m[0] as usize] = c.clone();
        }
        Ok(out)
    }

    /// Leading coefficient of a univariate polynomial.
    pub fn leading_coeff(&self) -> Result<AlgInt> {
        Ok(self.to_dense()?.pop().unwrap_or_default())
    }

    fn compatible(&self, other: &OPoly) {
        assert_eq!(self.field, other.field, "polynomials over different fields");
        assert_eq!(self.arity, other.arity, "polynomials of different arity");
    }

    pub fn add(&self, other: &OPoly) -> OPoly {
        self.compatible(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> OPoly {
        OPoly {
            field: self.field,
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &OPoly) -> OPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &OPoly) -> OPoly {
        self.compatible(other);
        let mut out = OPoly::zero(self.field, self.arity);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                out.add_term(m, self.field.mul(c1, c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &AlgInt) -> OPoly {
        let mut out = OPoly::zero(self.field, self.arity);
        for (m, x) in &self.terms {
            out.add_term(m.clone(), self.field.mul(x, c));
        }
        out
    }

    pub fn pow(&self, e: u32) -> OPoly {
        let mut acc = OPoly::constant(self.field, self.arity, AlgInt::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact evaluation at a point of `O_L^d`.
    pub fn evaluate(&self, point: &[AlgInt]) -> Result<AlgInt> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: point.len(),
            });
        }
        for x in point {
            self.field.check(x)?;
        }
        if self.arity == 1 {
            return Ok(self.eval_univariate(&point[0]));
        }
        let f = self.field;
        let mut powers: Vec<Vec<AlgInt>> = vec![vec![AlgInt::one()]; self.arity];
        let mut acc = AlgInt::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (j, &e) in m.iter().enumerate() {
                while powers[j].len() <= e as usize {
                    let next = f.mul(powers[j].last().expect("nonempty"), &point[j]);
                    powers[j].push(next);
                }
                term = f.mul(&term, &powers[j][e as usize]);
            }
            acc += &term;
        }
        Ok(acc)
    }

    /// Horner evaluation of a univariate polynomial.
    pub fn eval_univariate(&self, x: &AlgInt) -> AlgInt {
        debug_assert!(self.is_univariate());
        let f = self.field;
        let mut acc = AlgInt::zero();
        let mut prev: Option<u32> = None;
        for (m, c) in self.terms.iter().rev() {
            let e = m[0];
            if let Some(pe) = prev {
                for _ in e..pe {
                    acc = f.mul(&acc, x);
                }
            }
            acc += c;
            prev = Some(e);
        }
        if let Some(pe) = prev {
            for _ in 0..pe {
                acc = f.mul(&acc, x);
            }
        }
        acc
    }

    /// Univariate evaluation modulo an ideal, reducing after every step.
    pub fn eval_mod(&self, x: &AlgInt, ideal: &Ideal) -> AlgInt {
        debug_assert!(self.is_univariate());
        let f = self.field;
        let x = ideal.reduce(x);
        let mut acc = AlgInt::zero();
        let mut prev: Option<u32> = None;
        for (m, c) in self.terms.iter().rev() {
            let e = m[0];
            if let Some(pe) = prev {
                for _ in e..pe {
                    acc = ideal.reduce(&f.mul(&acc, &x));
                }
            }
            acc = ideal.reduce(&(&acc + c));
            prev = Some(e);
        }
        if let Some(pe) = prev {
            for _ in 0..pe {
                acc = ideal.reduce(&f.mul(&acc, &x));
            }
        }
        acc
    }

    /// Multivariate evaluation modulo an ideal.
    pub fn eval_mod_point(&self, point: &[AlgInt], ideal: &Ideal) -> AlgInt {
        if self.arity == 1 {
            return self.eval_mod(&point[0], ideal);
        }
        let f = self.field;
        let mut acc = AlgInt::zero();
        for (m, c) in &self.terms {
            let mut term = ideal.reduce(c);
            for (j, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    term = ideal.reduce(&f.mul(&term, &point[j]));
                }
            }
            acc = ideal.reduce(&(&acc + &term));
        }
        acc
    }

    pub fn formal_derivative(&self) -> Result<OPoly> {
        self.require_univariate()?;
        let mut out = OPoly::zero(self.field, 1);
        for (m, c) in &self.terms {
            if m[0] > 0 {
                out.add_term(vec![m[0] - 1], c.scale(&BigInt::from(m[0])));
            }
        }
        Ok(out)
    }

    /// Same polynomial viewed over another field (coefficients must fit).
    pub fn with_field(&self, field: Field) -> Result<OPoly> {
        for c in self.terms.values() {
            field.check(c)?;
        }
        Ok(OPoly {
            field,
            arity: self.arity,
            terms: self.terms.clone(),
        })
    }

    pub fn parse(s: &str, field: Field) -> Result<OPoly> {
        parse::parse(s, field, None)
    }

    pub fn parse_with_arity(s: &str, field: Field, arity: usize) -> Result<OPoly> {
        parse::parse(s, field, Some(arity))
    }

    /// Parses a constant expression (e.g. `1+w`, `-(w+1)`, `i`) as an element.
    pub fn parse_element(s: &str, field: Field) -> Result<AlgInt> {
        let p = parse::parse(s, field, Some(0))?;
        Ok(p.constant_term())
    }

    pub fn decompose(&self) -> ZPolyVector {
        decompose::decompose(self)
    }

    /// Terms in display order: total degree descending, then exponent
    /// vectors descending.
    fn display_order(&self) -> Vec<(&Monomial, &AlgInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(m1, _), (m2, _)| {
            let d1: u32 = m1.iter().sum();
            let d2: u32 = m2.iter().sum();
            d2.cmp(&d1).then_with(|| m2.cmp(m1))
        });
        v
    }

    fn var_name(&self, j: usize) -> String {
        if self.arity == 1 {
            "x".into()
        } else {
            alloc::format!("x{}", j + 1)
        }
    }
}

/// Writes `sign`-less term bodies such as `3*x^2`, `x1*x2`, `(1+w)*x`.
pub(crate) fn write_sum<'a, C, N>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (&'a Monomial, C)>,
    name: N,
) -> fmt::Result
where
    C: TermCoeff,
    N: Fn(usize) -> String,
{
    let mut first = true;
    for (m, c) in terms {
        let (negative, body) = c.body();
        let mono: Vec<String> = m
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(j, &e)| {
                if e == 1 {
                    name(j)
                } else {
                    alloc::format!("{}^{}", name(j), e)
                }
            })
            .collect();
        if negative {
            f.write_str("-")?;
        } else if !first {
            f.write_str("+")?;
        }
        first = false;
        match (body.as_str(), mono.is_empty()) {
            (b, true) => f.write_str(b)?,
            ("1", false) => f.write_str(&mono.join("*"))?,
            (b, false) => write!(f, "{}*{}", b, mono.join("*"))?,
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// Sign and unsigned text of a coefficient.
pub(crate) trait TermCoeff {
    fn body(&self) -> (bool, String);
}

impl TermCoeff for &BigInt {
    fn body(&self) -> (bool, String) {
        (self.is_negative(), alloc::format!("{}", self.abs()))
    }
}

impl TermCoeff for &AlgInt {
    fn body(&self) -> (bool, String) {
        if self.b.is_zero() {
            return (&self.a).body();
        }
        if self.a.is_zero() {
            let (neg, k) = (&self.b).body();
            let text = if self.b.abs().is_one() {
                "w".into()
            } else {
                alloc::format!("{k}*w")
            };
            return (neg, text);
        }
        (false, alloc::format!("({})", self))
    }
}

impl fmt::Display for OPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(f, self.display_order().into_iter(), |j| self.var_name(j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn g() -> Field {
        Field::gaussian()
    }

    #[test]
    fn evaluation_examples() {
        let p = OPoly::parse("x^2+1", g()).unwrap();
        assert_eq!(p.evaluate(&[AlgInt::omega()]).unwrap(), AlgInt::zero());
        let q5 = Field::quadratic(5).unwrap();
        let p = OPoly::parse("x^2-w", q5).unwrap();
        assert_eq!(p.evaluate(&[AlgInt::omega()]).unwrap(), AlgInt::one());
        let m = OPoly::parse("3*x1^2*x2 + x2 - 7", Field::rational()).unwrap();
        assert_eq!(
            m.evaluate(&[AlgInt::zero(), AlgInt::zero()]).unwrap(),
            AlgInt::from_i64(-7)
        );
        assert!(matches!(
            m.evaluate(&[AlgInt::zero()]),
            Err(Error::ArityMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn derivatives() {
        let p = OPoly::parse("x^2+1", g()).unwrap();
        assert_eq!(p.formal_derivative().unwrap(), OPoly::parse("2*x", g()).unwrap());
        let c = OPoly::parse("5+w", g()).unwrap().with_field(g()).unwrap();
        let c = OPoly::parse_with_arity(&c.to_string(), g(), 1).unwrap();
        assert!(c.formal_derivative().unwrap().is_zero());
        let m = OPoly::parse("x1*x2", g()).unwrap();
        assert_eq!(m.formal_derivative(), Err(Error::NotUnivariate));
    }

    #[test]
    fn derivative_of_three_quadratics_matches_expansion() {
        let alpha = AlgInt::new(2, 1);
        let beta = AlgInt::new(3, 2);
        let f = g();
        let x = OPoly::x(f);
        let quad = |c: &AlgInt| x.mul(&x).sub(&OPoly::constant(f, 1, c.clone()));
        let ab = f.mul(&alpha, &beta);
        let factors = [quad(&alpha), quad(&beta), quad(&ab)];
        let product = factors[0].mul(&factors[1]).mul(&factors[2]);
        let d = product.formal_derivative().unwrap();
        assert_eq!(d.total_degree(), Some(5));
        // Oracle: product rule, term by term.
        let dq = OPoly::parse("2*x", f).unwrap();
        let rule = dq
            .mul(&factors[1])
            .mul(&factors[2])
            .add(&factors[0].mul(&dq).mul(&factors[2]))
            .add(&factors[0].mul(&factors[1]).mul(&dq));
        assert_eq!(d, rule);
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "x^2+1",
            "x^6-251*x^4+6383*x^2-48841",
            "(1+w)*x^3-w*x+2",
            "x1^2*x2-3*x2^2+x1",
            "-x",
            "0",
        ] {
            let field = g();
            let p = OPoly::parse(s, field).unwrap();
            assert_eq!(p.to_string(), s);
            assert_eq!(OPoly::parse(&p.to_string(), field).unwrap(), p);
        }
    }

    #[test]
    fn eval_mod_matches_reduction_of_exact_value() {
        let f = Field::quadratic(-5).unwrap();
        let p = OPoly::parse("3*x^4-(2+w)*x^3+x-7", f).unwrap();
        let ideal = Ideal::from_generators(&[AlgInt::from_i64(7), AlgInt::new(3, 1)], f).unwrap();
        for a in -4..4 {
            for b in -4..4 {
                let x = AlgInt::new(a, b);
                assert_eq!(p.eval_mod(&x, &ideal), ideal.reduce(&p.eval_univariate(&x)));
            }
        }
    }
}
