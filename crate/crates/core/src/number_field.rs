//! Exact arithmetic in the ring of integers `O_L` of `L = Q(sqrt d)` or `L = Q`.
//!
//! Elements are written `a + b*w` in the fixed integral basis `{1, w}` where
//! `w = sqrt d` if `d != 1 mod 4` and `w = (1 + sqrt d)/2` if `d = 1 mod 4`.
//! In both cases `w^2 = t*w + n` with `(t, n) = (0, d)` or `(1, (d-1)/4)`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, Complex};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OmegaKind {
    /// `L = Q`: the basis is `{1}`.
    Rational,
    /// `w = sqrt d`.
    SqrtD,
    /// `w = (1 + sqrt d) / 2`.
    HalfTrace,
}

/// A quadratic number field `Q(sqrt d)` with `d` squarefree, or `Q` itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    d: Option<i64>,
    t: i64,
    n: i64,
}

impl Field {
    pub const RATIONAL: Field = Field {
        d: None,
        t: 0,
        n: 0,
    };

    pub fn rational() -> Field {
        Field::RATIONAL
    }

    pub fn quadratic(d: i64) -> Result<Field> {
        if d == 0 || d == 1 {
            return Err(Error::InvalidField(format!("d = {d} does not give a quadratic field")));
        }
        if !arith::is_squarefree(d) {
            return Err(Error::InvalidField(format!("d = {d} is not squarefree")));
        }
        let (t, n) = if d.rem_euclid(4) == 1 {
            (1, (d - 1) / 4)
        } else {
            (0, d)
        };
        Ok(Field { d: Some(d), t, n })
    }

    /// `Q(i)`.
    pub fn gaussian() -> Field {
        Field::quadratic(-1).expect("-1 is squarefree")
    }

    pub fn d(&self) -> Option<i64> {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.d.is_none()
    }

    /// Rank of `O_L` over `Z`.
    pub fn degree(&self) -> usize {
        if self.is_rational() {
            1
        } else {
            2
        }
    }

    pub fn omega_kind(&self) -> OmegaKind {
        match (self.d, self.t) {
            (None, _) => OmegaKind::Rational,
            (Some(_), 0) => OmegaKind::SqrtD,
            _ => OmegaKind::HalfTrace,
        }
    }

    /// Field discriminant: `4d`, `d`, or `1` for `Q`.
    pub fn disc(&self) -> i64 {
        match self.omega_kind() {
            OmegaKind::Rational => 1,
            OmegaKind::SqrtD => 4 * self.n,
            OmegaKind::HalfTrace => self.d.unwrap_or(1),
        }
    }

    /// `(t, n)` with `w^2 = t*w + n`.
    pub fn min_poly_of_omega(&self) -> (i64, i64) {
        (self.t, self.n)
    }

    pub fn contains(&self, x: &AlgInt) -> bool {
        !self.is_rational() || x.b.is_zero()
    }

    pub fn check(&self, x: &AlgInt) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                element: x.to_string(),
                field: self.to_string(),
            })
        }
    }

    /// Product, reduced with `w^2 = t*w + n`.
    pub fn mul(&self, x: &AlgInt, y: &AlgInt) -> AlgInt {
        if self.is_rational() {
            return AlgInt::from_int(&x.a * &y.a);
        }
        let bd = &x.b * &y.b;
        let a = &x.a * &y.a + &bd * self.n;
        let b = &x.a * &y.b + &x.b * &y.a + &bd * self.t;
        AlgInt { a, b }
    }

    /// Checked product: both factors must belong to this field.
    pub fn nf_mul(&self, x: &AlgInt, y: &AlgInt) -> Result<AlgInt> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.mul(x, y))
    }

    pub fn square(&self, x: &AlgInt) -> AlgInt {
        self.mul(x, x)
    }

    pub fn pow(&self, x: &AlgInt, mut e: u64) -> AlgInt {
        let mut base = x.clone();
        let mut acc = AlgInt::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Galois conjugate: `w -> t - w`.
    pub fn conj(&self, x: &AlgInt) -> AlgInt {
        if self.is_rational() {
            return x.clone();
        }
        AlgInt {
            a: &x.a + &x.b * self.t,
            b: -&x.b,
        }
    }

    /// `z` with `x * z = N(x)`: the conjugate, or `1` over `Q`.
    pub(crate) fn adjugate(&self, x: &AlgInt) -> AlgInt {
        if self.is_rational() {
            AlgInt::one()
        } else {
            self.conj(x)
        }
    }

    /// `N(x) = x * conj(x) = a^2 + t*a*b - n*b^2`, and `N(a) = a` over `Q`.
    pub fn norm(&self, x: &AlgInt) -> BigInt {
        if self.is_rational() {
            return x.a.clone();
        }
        &x.a * &x.a + &x.a * &x.b * self.t - &x.b * &x.b * self.n
    }

    pub fn trace(&self, x: &AlgInt) -> BigInt {
        if self.is_rational() {
            return x.a.clone();
        }
        &x.a * 2 + &x.b * self.t
    }

    /// `x / y` if the quotient lies in `O_L`.
    pub fn div_exact(&self, x: &AlgInt, y: &AlgInt) -> Option<AlgInt> {
        if y.is_zero() {
            return None;
        }
        let n = self.norm(y);
        let num = self.mul(x, &self.adjugate(y));
        let (qa, ra) = num.a.div_rem(&n);
        let (qb, rb) = num.b.div_rem(&n);
        if ra.is_zero() && rb.is_zero() {
            Some(AlgInt { a: qa, b: qb })
        } else {
            None
        }
    }

    pub fn divides(&self, y: &AlgInt, x: &AlgInt) -> bool {
        if y.is_zero() {
            return x.is_zero();
        }
        self.div_exact(x, y).is_some()
    }

    pub fn is_unit(&self, x: &AlgInt) -> bool {
        self.norm(x).abs().is_one()
    }

    /// The units of `O_L` of finite order (all units for imaginary fields).
    pub fn torsion_units(&self) -> Vec<AlgInt> {
        let mut out = Vec::new();
        let candidates: Vec<AlgInt> = match self.d {
            Some(-1) => [(1, 0), (-1, 0), (0, 1), (0, -1)]
                .iter()
                .map(|&(a, b)| AlgInt::new(a, b))
                .collect(),
            // w = (1 + sqrt -3)/2 is a primitive sixth root of unity.
            Some(-3) => {
                let w = AlgInt::omega();
                (0..6).map(|k| self.pow(&w, k)).collect()
            }
            _ => [AlgInt::one(), -AlgInt::one()].into(),
        };
        for c in candidates {
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }

    /// Whether `x = u * y` for a root of unity `u`.
    pub fn is_associate_by_torsion(&self, x: &AlgInt, y: &AlgInt) -> bool {
        self.torsion_units()
            .iter()
            .any(|u| &self.mul(u, y) == x)
    }

    /// Images of `w` under the embeddings of `L` into `C`.
    pub(crate) fn omega_embeddings(&self) -> Vec<Complex> {
        let d = match self.d {
            None => return Vec::new(),
            Some(d) => d as f64,
        };
        let root = if d >= 0.0 {
            Complex::new(libm::sqrt(d), 0.0)
        } else {
            Complex::new(0.0, libm::sqrt(-d))
        };
        let neg = Complex::new(-root.re, -root.im);
        if self.t == 0 {
            alloc::vec![root, neg]
        } else {
            let half = |z: Complex| Complex::new((1.0 + z.re) / 2.0, z.im / 2.0);
            alloc::vec![half(root), half(neg)]
        }
    }

    /// Complex embeddings of `x`; one entry for `Q`, two otherwise.
    pub(crate) fn embed(&self, x: &AlgInt) -> Vec<Complex> {
        let a = x.a.to_f64().unwrap_or(f64::INFINITY);
        if self.is_rational() {
            return alloc::vec![Complex::new(a, 0.0)];
        }
        let b = x.b.to_f64().unwrap_or(f64::INFINITY);
        self.omega_embeddings()
            .into_iter()
            .map(|w| Complex::new(a + b * w.re, b * w.im))
            .collect()
    }

    /// Lattice points of `O_L` near a pair of embedding values; used to turn
    /// approximate roots into exact candidates.
    pub(crate) fn nearby_elements(&self, images: &[Complex]) -> Vec<AlgInt> {
        let mut out = Vec::new();
        if self.is_rational() {
            let r = libm::round(images[0].re);
            if r.is_finite() {
                let r = r as i64;
                for k in -1..=1 {
                    out.push(AlgInt::from_i64(r + k));
                }
            }
            return out;
        }
        let w = self.omega_embeddings();
        // Solve a + b*w1 = z1, a + b*w2 = z2 (real case) or use real/imag parts
        // of a single complex embedding (imaginary case).
        let b = if w[0].im != 0.0 {
            images[0].im / w[0].im
        } else {
            (images[0].re - images[1].re) / (w[0].re - w[1].re)
        };
        let a = images[0].re - b * w[0].re;
        if !(a.is_finite() && b.is_finite()) {
            return out;
        }
        let (a0, b0) = (libm::round(a) as i64, libm::round(b) as i64);
        for da in -1..=1 {
            for db in -1..=1 {
                out.push(AlgInt::new(a0 + da, b0 + db));
            }
        }
        out
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.d {
            None => f.write_str("Q"),
            Some(d) => write!(f, "Q(sqrt {d})"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    /// Accepts `Q`, `Q(sqrt D)`, `Q(sqrt(D))` and `Q(i)`.
    fn from_str(s: &str) -> Result<Field> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "Q" {
            return Ok(Field::rational());
        }
        if compact == "Q(i)" {
            return Ok(Field::gaussian());
        }
        let inner = compact
            .strip_prefix("Q(sqrt")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("unrecognized field {s:?}")))?;
        let inner = inner
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(inner);
        let d: i64 = inner
            .parse()
            .map_err(|_| Error::Parse(format!("bad radicand in {s:?}")))?;
        Field::quadratic(d)
    }
}

/// An element `a + b*w` of `O_L` with arbitrary-precision coordinates.
///
/// The ordering is lexicographic on `(a, b)`; root listings use it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgInt {
    pub a: BigInt,
    pub b: BigInt,
}

impl AlgInt {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        AlgInt {
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn from_int(a: impl Into<BigInt>) -> Self {
        AlgInt {
            a: a.into(),
            b: BigInt::zero(),
        }
    }

    pub fn from_i64(a: i64) -> Self {
        AlgInt::from_int(a)
    }

    pub fn zero() -> Self {
        AlgInt::default()
    }

    pub fn one() -> Self {
        AlgInt::from_int(1)
    }

    pub fn omega() -> Self {
        AlgInt::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn scale(&self, k: &BigInt) -> AlgInt {
        AlgInt {
            a: &self.a * k,
            b: &self.b * k,
        }
    }

    /// Coordinates in the integral basis, truncated to the field degree.
    pub fn coords(&self, field: &Field) -> Vec<BigInt> {
        if field.is_rational() {
            alloc::vec![self.a.clone()]
        } else {
            alloc::vec![self.a.clone(), self.b.clone()]
        }
    }

    pub fn from_coords(coords: &[BigInt]) -> AlgInt {
        AlgInt {
            a: coords.first().cloned().unwrap_or_default(),
            b: coords.get(1).cloned().unwrap_or_default(),
        }
    }
}

impl From<i64> for AlgInt {
    fn from(a: i64) -> Self {
        AlgInt::from_i64(a)
    }
}

impl Add for &AlgInt {
    type Output = AlgInt;
    fn add(self, o: &AlgInt) -> AlgInt {
        AlgInt {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        }
    }
}

impl Add for AlgInt {
    type Output = AlgInt;
    fn add(self, o: AlgInt) -> AlgInt {
        &self + &o
    }
}

impl Sub for &AlgInt {
    type Output = AlgInt;
    fn sub(self, o: &AlgInt) -> AlgInt {
        AlgInt {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
        }
    }
}

impl Sub for AlgInt {
    type Output = AlgInt;
    fn sub(self, o: AlgInt) -> AlgInt {
        &self - &o
    }
}

impl AddAssign<&AlgInt> for AlgInt {
    fn add_assign(&mut self, o: &AlgInt) {
        self.a += &o.a;
        self.b += &o.b;
    }
}

impl SubAssign<&AlgInt> for AlgInt {
    fn sub_assign(&mut self, o: &AlgInt) {
        self.a -= &o.a;
        self.b -= &o.b;
    }
}

impl Neg for AlgInt {
    type Output = AlgInt;
    fn neg(self) -> AlgInt {
        AlgInt {
            a: -self.a,
            b: -self.b,
        }
    }
}

impl Neg for &AlgInt {
    type Output = AlgInt;
    fn neg(self) -> AlgInt {
        -self.clone()
    }
}

impl fmt::Display for AlgInt {
    /// `a+b*w`, dropping zero parts: `3`, `w`, `-2*w`, `1-w`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if !self.a.is_zero() {
            write!(f, "{}", self.a)?;
            if self.b.is_positive() {
                f.write_str("+")?;
            }
        }
        if self.b.is_one() {
            f.write_str("w")
        } else if self.b == -BigInt::one() {
            f.write_str("-w")
        } else {
            write!(f, "{}*w", self.b)
        }
    }
}

impl FromStr for AlgInt {
    type Err = Error;

    /// Parses linear forms such as `3`, `-w`, `2*w`, `1-3*w`, `4+w`.
    fn from_str(s: &str) -> Result<AlgInt> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty element".into()));
        }
        let bad = || Error::Parse(format!("bad element {s:?}"));
        let mut out = AlgInt::zero();
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let (sign, body) = match rest.as_bytes()[0] {
                b'+' => (1, &rest[1..]),
                b'-' => (-1, &rest[1..]),
                _ if rest.len() == compact.len() => (1, rest),
                _ => return Err(bad()),
            };
            let end = body[1.min(body.len())..]
                .find(['+', '-'])
                .map(|i| i + 1)
                .unwrap_or(body.len());
            let term = &body[..end];
            rest = &body[end..];
            if term.is_empty() {
                return Err(bad());
            }
            if let Some(coef) = term.strip_suffix('w') {
                let coef = coef.strip_suffix('*').unwrap_or(coef);
                let k: BigInt = if coef.is_empty() {
                    BigInt::one()
                } else {
                    coef.parse().map_err(|_| bad())?
                };
                out.b += k * sign;
            } else {
                let k: BigInt = term.parse().map_err(|_| bad())?;
                out.a += k * sign;
            }
        }
        Ok(out)
    }
}
