//! Nonzero ideals of `O_L` as finite-index sublattices of `O_L = Z^2`.
//!
//! An ideal is stored by its Hermite normal form `[[a, b], [0, c]]` whose
//! columns are the coordinates of the Z-basis `{a, b + c*w}`, with `a, c > 0`
//! and `0 <= b < a`. The norm (index) is `a*c`. Ideals of `Z` use `b = 0`,
//! `c = 1`.

use alloc::string::ToString;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::number_field::{AlgInt, Field};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ideal {
    field: Field,
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl Ideal {
    /// The ideal generated (as an `O_L`-module) by `gens`.
    pub fn from_generators(gens: &[AlgInt], field: Field) -> Result<Ideal> {
        for g in gens {
            field.check(g)?;
        }
        if field.is_rational() {
            let g = gens.iter().fold(BigInt::zero(), |acc, x| acc.gcd(&x.a));
            if g.is_zero() {
                return Err(Error::ZeroIdeal);
            }
            return Ok(Ideal {
                field,
                a: g,
                b: BigInt::zero(),
                c: BigInt::one(),
            });
        }
        let w = AlgInt::omega();
        let mut vectors = Vec::with_capacity(2 * gens.len());
        for g in gens {
            vectors.push((g.a.clone(), g.b.clone()));
            let gw = field.mul(g, &w);
            vectors.push((gw.a, gw.b));
        }
        Ideal::from_lattice(vectors, field)
    }

    pub fn principal(x: &AlgInt, field: Field) -> Result<Ideal> {
        Ideal::from_generators(core::slice::from_ref(x), field)
    }

    pub fn unit(field: Field) -> Ideal {
        Ideal {
            field,
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::one(),
        }
    }

    /// Ideal from an explicit HNF; checks canonicity and closure under `w`.
    pub fn from_hnf(a: BigInt, b: BigInt, c: BigInt, field: Field) -> Result<Ideal> {
        if !a.is_positive() || !c.is_positive() || b.is_negative() || b >= a {
            return Err(Error::InvalidInput(format!(
                "[[{a},{b}],[0,{c}]] is not in canonical Hermite form"
            )));
        }
        if field.is_rational() && (!b.is_zero() || !c.is_one()) {
            return Err(Error::InvalidInput("ideals of Z have a single generator".into()));
        }
        let ideal = Ideal { field, a, b, c };
        if !ideal.is_closed_under_omega() {
            return Err(Error::InvalidInput(format!(
                "{ideal} is a sublattice but not an ideal"
            )));
        }
        Ok(ideal)
    }

    /// HNF of the Z-lattice spanned by `vectors` (coordinates in `{1, w}`).
    fn from_lattice(vectors: Vec<(BigInt, BigInt)>, field: Field) -> Result<Ideal> {
        let mut pivot: Option<(BigInt, BigInt)> = None;
        let mut horizontal = BigInt::zero();
        for (u, v) in vectors {
            if v.is_zero() {
                horizontal = horizontal.gcd(&u);
                continue;
            }
            match pivot.take() {
                None => pivot = Some((u, v)),
                Some((pu, pv)) => {
                    // Unimodular step on (pivot, w): new pivot has v = gcd,
                    // the other combination has v = 0.
                    let ext = pv.extended_gcd(&v);
                    let g = ext.gcd;
                    let new_pivot = (&pu * &ext.x + &u * &ext.y, g.clone());
                    let other = &pu * (&v / &g) - &u * (&pv / &g);
                    horizontal = horizontal.gcd(&other);
                    pivot = Some(new_pivot);
                }
            }
        }
        let (pu, pv) = pivot.ok_or(Error::ZeroIdeal)?;
        if horizontal.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        let (pu, pv) = if pv.is_negative() { (-pu, -pv) } else { (pu, pv) };
        let a = horizontal.abs();
        let b = pu.mod_floor(&a);
        let ideal = Ideal { field, a, b, c: pv };
        debug_assert!(ideal.is_closed_under_omega());
        Ok(ideal)
    }

    fn is_closed_under_omega(&self) -> bool {
        if self.field.is_rational() {
            return true;
        }
        let w = AlgInt::omega();
        let first = self.field.mul(&AlgInt::from_int(self.a.clone()), &w);
        let second = self.field.mul(&AlgInt::new(self.b.clone(), self.c.clone()), &w);
        self.contains(&first) && self.contains(&second)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// `(a, b, c)` of the Hermite form.
    pub fn hnf(&self) -> (&BigInt, &BigInt, &BigInt) {
        (&self.a, &self.b, &self.c)
    }

    /// The Z-basis `{a, b + c*w}`, or `{a}` for ideals of `Z`.
    pub fn basis(&self) -> Vec<AlgInt> {
        let mut out = alloc::vec![AlgInt::from_int(self.a.clone())];
        if !self.field.is_rational() {
            out.push(AlgInt::new(self.b.clone(), self.c.clone()));
        }
        out
    }

    /// Index `[O_L : I]`.
    pub fn norm(&self) -> BigInt {
        &self.a * &self.c
    }

    pub fn norm_u64(&self) -> Option<u64> {
        self.norm().to_u64()
    }

    pub fn is_unit(&self) -> bool {
        self.a.is_one() && self.c.is_one()
    }

    /// Smallest positive rational integer in the ideal.
    pub fn min_integer(&self) -> &BigInt {
        &self.a
    }

    pub fn contains(&self, x: &AlgInt) -> bool {
        if self.field.is_rational() && !x.b.is_zero() {
            return false;
        }
        let (k, r) = x.b.div_mod_floor(&self.c);
        if !r.is_zero() {
            return false;
        }
        (&x.a - &k * &self.b).is_multiple_of(&self.a)
    }

    /// Canonical representative: `x0 + y0*w` with `0 <= x0 < a`, `0 <= y0 < c`.
    pub fn reduce(&self, x: &AlgInt) -> AlgInt {
        let (k, y0) = x.b.div_mod_floor(&self.c);
        let x0 = (&x.a - &k * &self.b).mod_floor(&self.a);
        AlgInt { a: x0, b: y0 }
    }

    /// One canonical representative per coset, sorted lexicographically.
    pub fn residue_system(&self, cap: u64) -> Result<Vec<AlgInt>> {
        let norm = self.norm();
        if norm > BigInt::from(cap) {
            return Err(Error::ResidueCapExceeded {
                size: norm.to_string(),
                cap,
            });
        }
        let a = self.a.to_u64().expect("bounded by cap");
        let c = self.c.to_u64().expect("bounded by cap");
        let mut out = Vec::with_capacity((a * c) as usize);
        for x in 0..a {
            for y in 0..c {
                out.push(AlgInt::new(x, y));
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Ideal) -> Ideal {
        let f = self.field;
        let mut gens = Vec::with_capacity(4);
        for x in self.basis() {
            for y in other.basis() {
                gens.push(f.mul(&x, &y));
            }
        }
        Ideal::from_generators(&gens, f).expect("product of nonzero ideals is nonzero")
    }

    pub fn pow(&self, k: u32) -> Ideal {
        let mut acc = Ideal::unit(self.field);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `x^e mod I`, reducing after every step.
    pub fn pow_mod(&self, x: &AlgInt, mut e: BigInt) -> AlgInt {
        let f = self.field;
        let mut base = self.reduce(x);
        let mut acc = self.reduce(&AlgInt::one());
        let two = BigInt::from(2);
        while e.is_positive() {
            if e.is_odd() {
                acc = self.reduce(&f.mul(&acc, &base));
            }
            e /= &two;
            if e.is_positive() {
                base = self.reduce(&f.mul(&base, &base));
            }
        }
        acc
    }

    /// Parses `[[a,b],[0,c]]`, or `[[n,0]]` for ideals of `Z`.
    pub fn parse(s: &str, field: Field) -> Result<Ideal> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("bad ideal {s:?}"));
        let inner = compact
            .strip_prefix("[[")
            .and_then(|r| r.strip_suffix("]]"))
            .ok_or_else(bad)?;
        let nums: Vec<BigInt> = inner
            .split(|c| c == ',' || c == '[' || c == ']')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<BigInt>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match (field.is_rational(), nums.as_slice()) {
            (true, [n, z]) if z.is_zero() => {
                Ideal::from_hnf(n.clone(), BigInt::zero(), BigInt::one(), field)
            }
            (false, [a, b, z, c]) if z.is_zero() => {
                Ideal::from_hnf(a.clone(), b.clone(), c.clone(), field)
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_rational() {
            write!(f, "[[{},0]]", self.a)
        } else {
            write!(f, "[[{},{}],[0,{}]]", self.a, self.b, self.c)
        }
    }
}

impl PartialOrd for Ideal {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Ideals order by norm, then by Hermite form.
impl Ord for Ideal {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.norm()
            .cmp(&other.norm())
            .then_with(|| self.a.cmp(&other.a))
            .then_with(|| self.b.cmp(&other.b))
            .then_with(|| self.c.cmp(&other.c))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

/// A prime ideal above the rational prime `p`, with its splitting data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeFactor {
    pub p: u64,
    pub prime_ideal: Ideal,
    pub residue_degree: u32,
    pub ramification: u32,
    pub splitting: Splitting,
    /// An element of valuation exactly one at this prime.
    pub uniformizer: AlgInt,
    /// Image of `w` in `O_L / P` when the residue field is `Z/p`.
    omega_residue: Option<u64>,
}

impl PrimeFactor {
    pub fn norm(&self) -> u64 {
        self.p.pow(self.residue_degree)
    }

    /// Whether `p` ramifies in `O_L`.
    pub fn is_ramified(&self) -> bool {
        self.ramification > 1
    }

    /// An inverse of `x` modulo the prime ideal, or `None` if `x` lies in it.
    pub fn inverse_mod(&self, x: &AlgInt) -> Option<AlgInt> {
        if self.prime_ideal.contains(x) {
            return None;
        }
        let p = self.p;
        let field = self.prime_ideal.field();
        if self.residue_degree == 1 {
            let r = self.omega_residue.unwrap_or(0);
            let u = arith::big_mod_u64(&x.a, p);
            let v = arith::big_mod_u64(&x.b, p);
            let image = (u + arith::mul_mod(v, r, p)) % p;
            let inv = arith::pow_mod(image, p - 2, p);
            return Some(AlgInt::from_i64(inv as i64));
        }
        // Inert: x^{-1} = conj(x) / N(x), and N(x) is a unit mod p.
        let n = arith::big_mod_u64(&field.norm(x), p);
        let n_inv = arith::pow_mod(n, p - 2, p);
        Some(self.prime_ideal.reduce(&field.conj(x).scale(&BigInt::from(n_inv))))
    }
}

/// Factorization of `(p)` in `O_L` read off from `x^2 - t*x - n` mod `p`.
pub fn factor_rational_prime(p: u64, field: Field) -> Result<Vec<PrimeFactor>> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let pb = AlgInt::from_i64(p as i64);
    if field.is_rational() {
        return Ok(alloc::vec![PrimeFactor {
            p,
            prime_ideal: Ideal::principal(&pb, field)?,
            residue_degree: 1,
            ramification: 1,
            splitting: Splitting::Split,
            uniformizer: pb,
            omega_residue: Some(0),
        }]);
    }
    let (t, n) = field.min_poly_of_omega();
    let (tm, nm) = (t.rem_euclid(p as i64) as u64, n.rem_euclid(p as i64) as u64);
    let roots: Vec<u64> = if p == 2 {
        (0..2)
            .filter(|&r| (r * r + 2 * 2 - tm * r - nm) % 2 == 0)
            .collect()
    } else {
        // x = (t +- sqrt(t^2 + 4n)) / 2
        let disc = (arith::mul_mod(tm, tm, p) + arith::mul_mod(4 % p, nm, p)) % p;
        let half = (p + 1) / 2;
        match arith::sqrt_mod(disc, p) {
            None => Vec::new(),
            Some(s) => {
                let r1 = arith::mul_mod((tm + s) % p, half, p);
                let r2 = arith::mul_mod((tm + p - s) % p, half, p);
                let mut v = alloc::vec![r1, r2];
                v.sort_unstable();
                v.dedup();
                v
            }
        }
    };
    let ramified = field.disc().rem_euclid(p as i64) == 0;
    let mut out = Vec::new();
    match roots.len() {
        0 => out.push(PrimeFactor {
            p,
            prime_ideal: Ideal::principal(&pb, field)?,
            residue_degree: 2,
            ramification: 1,
            splitting: Splitting::Inert,
            uniformizer: pb,
            omega_residue: None,
        }),
        _ => {
            for &r in &roots {
                let gen = AlgInt::new(-(r as i64), 1);
                let prime_ideal = Ideal::from_generators(&[pb.clone(), gen], field)?;
                let square = prime_ideal.pow(2);
                let candidates = [
                    pb.clone(),
                    AlgInt::new(-(r as i64), 1),
                    AlgInt::new(-(r as i64) - p as i64, 1),
                ];
                let uniformizer = candidates
                    .into_iter()
                    .find(|x| prime_ideal.contains(x) && !square.contains(x))
                    .ok_or_else(|| Error::Internal(format!("no uniformizer above {p}")))?;
                out.push(PrimeFactor {
                    p,
                    prime_ideal,
                    residue_degree: 1,
                    ramification: if ramified { 2 } else { 1 },
                    splitting: if ramified {
                        Splitting::Ramified
                    } else {
                        Splitting::Split
                    },
                    uniformizer,
                    omega_residue: Some(r),
                });
            }
        }
    }
    out.sort_by(|x, y| x.prime_ideal.cmp(&y.prime_ideal));
    Ok(out)
}

/// All prime ideals of norm `<= bound`, ordered by norm then Hermite form.
pub fn prime_ideals_up_to(field: Field, bound: u64) -> Vec<PrimeFactor> {
    let mut out: Vec<PrimeFactor> = arith::primes_up_to(bound)
        .into_iter()
        .flat_map(|p| factor_rational_prime(p, field).expect("sieve output is prime"))
        .filter(|pf| pf.norm() <= bound)
        .collect();
    out.sort_by(|x, y| x.prime_ideal.cmp(&y.prime_ideal));
    out
}

/// All nonzero ideals of norm `<= bound`, enumerated by Hermite form.
pub fn ideals_up_to(field: Field, bound: u64) -> Vec<Ideal> {
    let mut out = Vec::new();
    for a in 1..=bound {
        if field.is_rational() {
            out.push(Ideal {
                field,
                a: a.into(),
                b: BigInt::zero(),
                c: BigInt::one(),
            });
            continue;
        }
        for c in 1..=bound / a {
            for b in 0..a {
                if let Ok(i) = Ideal::from_hnf(a.into(), b.into(), c.into(), field) {
                    out.push(i);
                }
            }
        }
    }
    out.sort();
    out
}

/// `P`-adic valuation of a nonzero element.
pub fn valuation(x: &AlgInt, prime: &PrimeFactor) -> u32 {
    assert!(!x.is_zero(), "valuation of zero");
    let mut k = 0;
    let mut power = prime.prime_ideal.clone();
    while power.contains(x) {
        k += 1;
        power = power.mul(&prime.prime_ideal);
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn g() -> Field {
        Field::gaussian()
    }

    fn hnf(i: &Ideal) -> (i64, i64, i64) {
        let (a, b, c) = i.hnf();
        (a.to_i64().unwrap(), b.to_i64().unwrap(), c.to_i64().unwrap())
    }

    /// Index of a lattice by counting residue classes of a coordinate
    /// window: the number of window points in a fundamental box.
    fn brute_index(ideal: &Ideal, side: i64) -> usize {
        let mut reps = alloc::collections::BTreeSet::new();
        for x in 0..side {
            for y in 0..side {
                // Points x + y*w with x, y in the window; collect coset keys
                // by exhaustively subtracting lattice vectors found in-window.
                let p = AlgInt::new(x, y);
                let key = (0..side)
                    .flat_map(|u| (0..side).map(move |v| AlgInt::new(u, v)))
                    .find(|q| ideal.contains(&(&p - q)))
                    .unwrap();
                reps.insert(key);
            }
        }
        reps.len()
    }

    #[test]
    fn principal_ideals() {
        let five = Ideal::principal(&AlgInt::from_i64(5), g()).unwrap();
        assert_eq!(hnf(&five), (5, 0, 5));
        assert_eq!(five.norm(), BigInt::from(25));
        let pi = Ideal::principal(&AlgInt::new(1, 1), g()).unwrap();
        assert_eq!(pi.norm(), BigInt::from(2));
        assert_eq!(brute_index(&pi, 4), 2);
    }

    #[test]
    fn norm_matches_index_oracle_in_q_sqrt5() {
        let f = Field::quadratic(5).unwrap();
        let i = Ideal::from_generators(&[AlgInt::from_i64(3), AlgInt::new(1, 2)], f).unwrap();
        // Index counted directly: number of distinct cosets among a 20x20 window.
        assert_eq!(BigInt::from(brute_index(&i, 20) as u64), i.norm());
    }

    #[test]
    fn zero_ideal_is_rejected() {
        assert_eq!(Ideal::from_generators(&[AlgInt::zero()], g()), Err(Error::ZeroIdeal));
        assert_eq!(Ideal::from_generators(&[], Field::rational()), Err(Error::ZeroIdeal));
    }

    #[test]
    fn splitting_in_gaussian_integers() {
        let five = factor_rational_prime(5, g()).unwrap();
        assert_eq!(five.len(), 2);
        assert!(five.iter().all(|p| p.norm() == 5 && p.splitting == Splitting::Split));
        let gens: Vec<Ideal> = [2, 3]
            .iter()
            .map(|&r| Ideal::from_generators(&[AlgInt::from_i64(5), AlgInt::new(-r, 1)], g()).unwrap())
            .collect();
        for pf in &five {
            assert!(gens.contains(&pf.prime_ideal));
        }
        let three = factor_rational_prime(3, g()).unwrap();
        assert_eq!(three.len(), 1);
        assert_eq!(three[0].norm(), 9);
        assert_eq!(three[0].splitting, Splitting::Inert);
        let two = factor_rational_prime(2, g()).unwrap();
        assert_eq!(two.len(), 1);
        assert_eq!(two[0].ramification, 2);
        assert_eq!(two[0].prime_ideal, Ideal::principal(&AlgInt::new(1, 1), g()).unwrap());
        assert!(factor_rational_prime(9, g()).is_err());
    }

    #[test]
    fn factorizations_multiply_back_to_p() {
        for d in [-1i64, -2, -3, -5, 2, 3, 5, 13, -15, 21] {
            let f = Field::quadratic(d).unwrap();
            for p in arith::primes_up_to(60) {
                let factors = factor_rational_prime(p, f).unwrap();
                let mut product = Ideal::unit(f);
                let mut norm_product = BigInt::one();
                for pf in &factors {
                    product = product.mul(&pf.prime_ideal.pow(pf.ramification));
                    norm_product *= BigInt::from(pf.norm()).pow(pf.ramification);
                    assert_eq!(valuation(&pf.uniformizer, pf), 1, "d={d} p={p}");
                }
                assert_eq!(product, Ideal::principal(&AlgInt::from_i64(p as i64), f).unwrap());
                assert_eq!(norm_product, BigInt::from(p * p));
            }
        }
        for p in arith::primes_up_to(30) {
            let factors = factor_rational_prime(p, Field::rational()).unwrap();
            assert_eq!(factors[0].norm(), p);
        }
    }

    #[test]
    fn residue_systems() {
        let two = Ideal::principal(&AlgInt::from_i64(2), Field::rational()).unwrap();
        assert_eq!(two.residue_system(100).unwrap(), alloc::vec![AlgInt::zero(), AlgInt::one()]);
        let pi = Ideal::principal(&AlgInt::new(1, 1), g()).unwrap();
        assert_eq!(pi.residue_system(100).unwrap().len(), 2);
        let pi5 = pi.pow(5);
        assert_eq!(pi5.residue_system(100).unwrap().len(), 32);
        assert!(matches!(
            pi5.residue_system(16),
            Err(Error::ResidueCapExceeded { .. })
        ));
    }

    #[test]
    fn membership_and_products() {
        let pi = Ideal::principal(&AlgInt::new(1, 1), g()).unwrap();
        let two = Ideal::principal(&AlgInt::from_i64(2), g()).unwrap();
        let two_i = Ideal::principal(&AlgInt::new(0, 2), g()).unwrap();
        assert_eq!(pi.pow(2), two_i);
        assert_eq!(pi.pow(2), two);
        assert!(!pi.contains(&AlgInt::from_i64(5)));
        let x = AlgInt::new(7, -4);
        assert!(Ideal::principal(&x, g()).unwrap().contains(&x));
    }

    #[test]
    fn reduction_is_canonical() {
        let f = Field::quadratic(-5).unwrap();
        let i = Ideal::from_generators(&[AlgInt::from_i64(3), AlgInt::new(1, 1)], f).unwrap();
        for x in -6..6 {
            for y in -6..6 {
                let e = AlgInt::new(x, y);
                let r = i.reduce(&e);
                assert!(i.contains(&(&e - &r)));
                assert_eq!(i.reduce(&r), r);
            }
        }
    }

    #[test]
    fn ideal_text_round_trip() {
        let pi = Ideal::principal(&AlgInt::new(1, 1), g()).unwrap();
        assert_eq!(pi.to_string(), "[[2,1],[0,1]]");
        assert_eq!(Ideal::parse(&pi.to_string(), g()).unwrap(), pi);
        let five = Ideal::principal(&AlgInt::from_i64(5), Field::rational()).unwrap();
        assert_eq!(five.to_string(), "[[5,0]]");
        assert_eq!(Ideal::parse("[[5,0]]", Field::rational()).unwrap(), five);
        assert!(Ideal::parse("[[2,0],[0,1]]", g()).is_err(), "not an ideal of Z[i]");
    }

    #[test]
    fn enumerated_ideals_are_ideals_with_brute_force_norms() {
        let all = ideals_up_to(g(), 10);
        // Z[i] ideal counts by norm 1..10: 1,1,0,1,2,0,0,1,1,2.
        assert_eq!(all.len(), 9);
        for i in all.iter().filter(|i| i.norm() <= BigInt::from(5)) {
            assert_eq!(BigInt::from(brute_index(i, 6) as u64), i.norm(), "{i}");
        }
    }

    #[test]
    fn density_of_ideal_lattice_in_boxes() {
        let pi = Ideal::principal(&AlgInt::new(1, 1), g()).unwrap();
        for side in [10i64, 40, 100] {
            let count = (0..side)
                .flat_map(|x| (0..side).map(move |y| AlgInt::new(x, y)))
                .filter(|e| pi.contains(e))
                .count();
            let density = count as f64 / (side * side) as f64;
            assert!((density - 0.5).abs() <= 2.0 / side as f64);
        }
        let _ = pi.to_string();
    }
}
