//! Greatest common divisors over `L[x]` with denominator-cleared Bezout
//! certificates, squarefree parts and discriminants.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::lfield::{lp_divrem, lp_monic, lp_mul, lp_scale, lp_sub, trim, LElt, LPoly};
use super::OPoly;
use crate::error::{Error, Result};
use crate::number_field::{AlgInt, Field};

/// `sum(cofactors[i] * ps[i]) == delta * g`, all in `O_L[x]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GcdResult {
    /// A gcd in `L[x]`, scaled into `O_L[x]` with unit integer content.
    pub g: OPoly,
    pub cofactors: Vec<OPoly>,
    pub delta: AlgInt,
}

fn to_lpoly(p: &OPoly) -> Result<LPoly> {
    Ok(p.to_dense()?.into_iter().map(LElt::from_alg).collect())
}

fn lcm_of_dens<'a>(coeffs: impl Iterator<Item = &'a LElt>) -> BigInt {
    coeffs.fold(BigInt::one(), |acc, c| acc.lcm(&c.den))
}

/// Clears denominators with the smallest positive rational scale and
/// returns `(scale, scale * p)`.
fn to_primitive(p: &LPoly, field: Field) -> (LElt, OPoly) {
    let l = lcm_of_dens(p.iter());
    let nums: Vec<AlgInt> = p
        .iter()
        .map(|c| c.num.scale(&(&l / &c.den)))
        .collect();
    let content = nums
        .iter()
        .fold(BigInt::zero(), |acc, c| acc.gcd(&c.a).gcd(&c.b));
    let content = if content.is_zero() { BigInt::one() } else { content };
    let prim: Vec<AlgInt> = nums
        .iter()
        .map(|c| AlgInt {
            a: &c.a / &content,
            b: &c.b / &content,
        })
        .collect();
    (
        LElt::new(AlgInt::from_int(l), content),
        OPoly::from_dense(field, &prim),
    )
}

/// Extended Euclid on `(r0, s0)`, `(r1, s1)` where each `r = sum s_i p_i`.
fn ext_step(
    mut r0: LPoly,
    mut s0: Vec<LPoly>,
    mut r1: LPoly,
    mut s1: Vec<LPoly>,
    f: &Field,
) -> (LPoly, Vec<LPoly>) {
    trim(&mut r0);
    trim(&mut r1);
    if r0.is_empty() {
        return (r1, s1);
    }
    while !r1.is_empty() {
        let (m, inv) = lp_monic(&r1, f);
        r1 = m;
        s1 = s1.iter().map(|s| lp_scale(s, &inv, f)).collect();
        let (q, r) = lp_divrem(&r0, &r1, f);
        let s2: Vec<LPoly> = s0
            .iter()
            .zip(&s1)
            .map(|(a, b)| lp_sub(a, &lp_mul(&q, b, f)))
            .collect();
        r0 = core::mem::replace(&mut r1, r);
        s0 = core::mem::replace(&mut s1, s2);
    }
    (r0, s0)
}

/// gcd of univariate polynomials over `L`, with a Bezout identity cleared
/// of denominators.
pub fn poly_gcd_over_l(ps: &[OPoly]) -> Result<GcdResult> {
    let first = ps.first().ok_or(Error::EmptyInput("polynomial family"))?;
    let f = first.field();
    for p in ps {
        if !p.is_univariate() {
            return Err(Error::NotUnivariate);
        }
        if p.field() != f {
            return Err(Error::InvalidInput("polynomials over different fields".into()));
        }
    }
    let k = ps.len();
    let lps: Vec<LPoly> = ps.iter().map(to_lpoly).collect::<Result<_>>()?;
    let unit = |i: usize| -> Vec<LPoly> {
        (0..k)
            .map(|j| if i == j { vec![LElt::one()] } else { Vec::new() })
            .collect()
    };
    let mut acc: Option<(LPoly, Vec<LPoly>)> = None;
    for (i, lp) in lps.iter().enumerate() {
        if lp.is_empty() {
            continue;
        }
        acc = Some(match acc {
            None => (lp.clone(), unit(i)),
            Some((g, s)) => ext_step(g, s, lp.clone(), unit(i), &f),
        });
    }
    let (g, s) = acc.ok_or_else(|| Error::InvalidInput("all polynomials are zero".into()))?;
    let (g, inv) = lp_monic(&g, &f);
    let s: Vec<LPoly> = s.iter().map(|x| lp_scale(x, &inv, &f)).collect();
    let (scale, g_int) = to_primitive(&g, f);
    let h: Vec<LPoly> = s.iter().map(|x| lp_scale(x, &scale, &f)).collect();
    let delta = lcm_of_dens(h.iter().flatten());
    let cofactors: Vec<OPoly> = h
        .iter()
        .map(|x| {
            let coeffs: Vec<AlgInt> = x
                .iter()
                .map(|c| c.num.scale(&(&delta / &c.den)))
                .collect();
            OPoly::from_dense(f, &coeffs)
        })
        .collect();
    let delta = AlgInt::from_int(delta);
    let lhs = cofactors
        .iter()
        .zip(ps)
        .fold(OPoly::zero(f, 1), |acc, (c, p)| acc.add(&c.mul(p)));
    if lhs != g_int.scale(&delta) {
        return Err(Error::Internal(format!(
            "Bezout identity failed for gcd {g_int}"
        )));
    }
    Ok(GcdResult {
        g: g_int,
        cofactors,
        delta,
    })
}

/// `p / gcd(p, p')`, scaled into `O_L[x]` with unit integer content.
pub fn squarefree_part(p: &OPoly) -> Result<OPoly> {
    let f = p.field();
    let lp = to_lpoly(p)?;
    if lp.len() <= 2 {
        return Ok(to_primitive(&lp, f).1);
    }
    let dp = to_lpoly(&p.formal_derivative()?)?;
    let (g, _) = ext_step(lp.clone(), vec![Vec::new()], dp, vec![Vec::new()], &f);
    let (q, r) = lp_divrem(&lp, &g, &f);
    if !r.is_empty() {
        return Err(Error::Internal("gcd does not divide polynomial".into()));
    }
    Ok(to_primitive(&q, f).1)
}

/// Determinant over `L` by fraction-exact Gaussian elimination.
fn determinant(mut m: Vec<Vec<LElt>>, f: &Field) -> LElt {
    let n = m.len();
    let mut det = LElt::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return LElt::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = det.neg();
        }
        let inv = m[col][col].inv(f);
        det = det.mul(&m[col][col], f);
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].mul(&inv, f);
            for c in col..n {
                let sub = factor.mul(&m[col][c], f);
                m[r][c] = m[r][c].sub(&sub);
            }
        }
    }
    det
}

fn resultant_l(p: &LPoly, q: &LPoly, f: &Field) -> LElt {
    let (m, n) = (p.len() - 1, q.len() - 1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![LElt::zero(); size];
        for (j, c) in p.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![LElt::zero(); size];
        for (j, c) in q.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    determinant(rows, f)
}

fn integral(x: LElt) -> Result<AlgInt> {
    if x.den.is_one() {
        Ok(x.num)
    } else {
        Err(Error::Internal("resultant is not integral".into()))
    }
}

/// Resultant of two nonzero univariate polynomials (Sylvester determinant).
pub fn resultant(p: &OPoly, q: &OPoly) -> Result<AlgInt> {
    let (lp, lq) = (to_lpoly(p)?, to_lpoly(q)?);
    if lp.is_empty() || lq.is_empty() {
        return Err(Error::InvalidInput("resultant with the zero polynomial".into()));
    }
    integral(resultant_l(&lp, &lq, &p.field()))
}

/// `(-1)^(n(n-1)/2) Res(p, p') / lc(p)`.
pub fn discriminant(p: &OPoly) -> Result<AlgInt> {
    let f = p.field();
    let lp = to_lpoly(p)?;
    let n = lp.len().saturating_sub(1);
    if n == 0 {
        return Err(Error::InvalidInput("discriminant of a constant".into()));
    }
    if n == 1 {
        return Ok(AlgInt::one());
    }
    let dp = to_lpoly(&p.formal_derivative()?)?;
    let res = resultant_l(&lp, &dp, &f);
    let mut d = res.div(lp.last().expect("nonzero"), &f);
    if (n * (n - 1) / 2) % 2 == 1 {
        d = d.neg();
    }
    integral(d)
}
