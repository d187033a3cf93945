//! Exact arithmetic in the number field `L` itself, as `(a + b*w) / den`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::number_field::{AlgInt, Field};

/// `num / den` with `den > 0` and `gcd(num.a, num.b, den) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct LElt {
    pub num: AlgInt,
    pub den: BigInt,
}

impl LElt {
    pub fn zero() -> LElt {
        LElt::from_alg(AlgInt::zero())
    }

    pub fn one() -> LElt {
        LElt::from_alg(AlgInt::one())
    }

    pub fn from_alg(num: AlgInt) -> LElt {
        LElt {
            num,
            den: BigInt::one(),
        }
    }

    pub fn new(num: AlgInt, den: BigInt) -> LElt {
        assert!(!den.is_zero(), "zero denominator");
        let g = num.a.gcd(&num.b).gcd(&den);
        let (mut num, mut den) = if g.is_one() || g.is_zero() {
            (num, den)
        } else {
            (
                AlgInt {
                    a: &num.a / &g,
                    b: &num.b / &g,
                },
                den / &g,
            )
        };
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        if num.is_zero() {
            den = BigInt::one();
        }
        LElt { num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &LElt) -> LElt {
        let num = self.num.scale(&o.den) + o.num.scale(&self.den);
        LElt::new(num, &self.den * &o.den)
    }

    pub fn neg(&self) -> LElt {
        LElt {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &LElt) -> LElt {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &LElt, f: &Field) -> LElt {
        LElt::new(f.mul(&self.num, &o.num), &self.den * &o.den)
    }

    /// `1/x = den * adj(num) / N(num)`.
    pub fn inv(&self, f: &Field) -> LElt {
        assert!(!self.is_zero(), "inverse of zero");
        let n = f.norm(&self.num);
        LElt::new(f.adjugate(&self.num).scale(&self.den), n)
    }

    pub fn div(&self, o: &LElt, f: &Field) -> LElt {
        self.mul(&o.inv(f), f)
    }
}

/// Dense univariate polynomial over `L`, lowest degree first, no trailing zeros.
pub(crate) type LPoly = Vec<LElt>;

pub(crate) fn trim(p: &mut LPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub(crate) fn lp_add(a: &LPoly, b: &LPoly) -> LPoly {
    let n = a.len().max(b.len());
    let zero = LElt::zero();
    let mut out: LPoly = (0..n)
        .map(|i| a.get(i).unwrap_or(&zero).add(b.get(i).unwrap_or(&zero)))
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn lp_scale(a: &LPoly, c: &LElt, f: &Field) -> LPoly {
    let mut out: LPoly = a.iter().map(|x| x.mul(c, f)).collect();
    trim(&mut out);
    out
}

pub(crate) fn lp_mul(a: &LPoly, b: &LPoly, f: &Field) -> LPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = alloc::vec![LElt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y, f));
        }
    }
    trim(&mut out);
    out
}

pub(crate) fn lp_sub(a: &LPoly, b: &LPoly) -> LPoly {
    let nb: LPoly = b.iter().map(LElt::neg).collect();
    lp_add(a, &nb)
}

/// Euclidean division `a = q*b + r` with `deg r < deg b`.
pub(crate) fn lp_divrem(a: &LPoly, b: &LPoly, f: &Field) -> (LPoly, LPoly) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = a.clone();
    trim(&mut r);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = b.last().expect("nonzero").inv(f);
    let mut q = alloc::vec![LElt::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().expect("nonzero").mul(&lead_inv, f);
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] = r[shift + j].sub(&c.mul(bj, f));
        }
        q[shift] = c;
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

pub(crate) fn lp_monic(a: &LPoly, f: &Field) -> (LPoly, LElt) {
    let inv = a.last().expect("nonzero").inv(f);
    (lp_scale(a, &inv, f), inv)
}
