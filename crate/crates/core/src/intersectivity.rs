//! Roots modulo ideals, Hensel lifting, and intersectivity verdicts.
//!
//! A polynomial over `O_L` is intersective when it has a root modulo every
//! nonzero ideal. By the Chinese remainder theorem it suffices to look at
//! prime powers, so scans walk prime ideals up to a norm bound and lift roots
//! level by level. Falsification is exact. Positive answers are either
//! "up to the bound" or backed by a structural certificate.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{self, Complex};
use crate::error::{Error, Result};
use crate::ideal::{self, Ideal, PrimeFactor};
use crate::number_field::{AlgInt, Field};
use crate::par;
use crate::poly::{discriminant, poly_gcd_over_l, squarefree_part, GcdResult, OPoly};
use crate::Limits;

/// Every residue `r` in the residue system of `ideal` with `p(r)` in `ideal`,
/// sorted lexicographically on canonical coordinates.
pub fn roots_mod(p: &OPoly, ideal: &Ideal, limits: &Limits) -> Result<Vec<AlgInt>> {
    require_univariate(p)?;
    let residues = ideal.residue_system(limits.residue_cap)?;
    Ok(residues
        .into_iter()
        .filter(|r| p.eval_mod(r, ideal).is_zero())
        .collect())
}

fn require_univariate(p: &OPoly) -> Result<()> {
    if p.is_univariate() {
        Ok(())
    } else {
        Err(Error::NotUnivariate)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootKind {
    /// `p'(r)` is a unit modulo the prime.
    Nonsingular,
    Singular,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftNode {
    pub root: AlgInt,
    /// Index of the parent in the previous level.
    pub parent: Option<usize>,
    pub kind: RootKind,
}

/// Roots of `p` modulo `P^k` for `k = 1..=K`; `levels[k-1]` holds level `k`.
#[derive(Clone, Debug)]
pub struct LiftTree {
    pub prime: PrimeFactor,
    pub levels: Vec<Vec<LiftNode>>,
}

impl LiftTree {
    /// First level (1-based) with no roots.
    pub fn dead_at(&self) -> Option<u32> {
        self.levels
            .iter()
            .position(|l| l.is_empty())
            .map(|i| i as u32 + 1)
    }
}

struct Lifter<'a> {
    p: &'a OPoly,
    dp: OPoly,
    pf: &'a PrimeFactor,
    cap: u64,
    /// `P^k` for the current level `k`.
    ideal: Ideal,
    /// `pi^k`.
    pi_k: AlgInt,
    k: u32,
    residues: Vec<AlgInt>,
}

impl<'a> Lifter<'a> {
    fn new(p: &'a OPoly, pf: &'a PrimeFactor, limits: &Limits) -> Result<Self> {
        let residues = pf.prime_ideal.residue_system(limits.residue_cap)?;
        Ok(Lifter {
            p,
            dp: p.formal_derivative()?,
            pf,
            cap: limits.residue_cap,
            ideal: pf.prime_ideal.clone(),
            pi_k: pf.uniformizer.clone(),
            k: 1,
            residues,
        })
    }

    fn kind(&self, r: &AlgInt) -> RootKind {
        if self.dp.eval_mod(r, &self.pf.prime_ideal).is_zero() {
            RootKind::Singular
        } else {
            RootKind::Nonsingular
        }
    }

    fn first_level(&self) -> Vec<LiftNode> {
        self.residues
            .iter()
            .filter(|r| self.p.eval_mod(r, &self.ideal).is_zero())
            .map(|r| LiftNode {
                root: r.clone(),
                parent: None,
                kind: self.kind(r),
            })
            .collect()
    }

    /// Roots modulo `P^{k+1}` from the roots modulo `P^k`.
    fn step(&mut self, prev: &[LiftNode]) -> Result<Vec<LiftNode>> {
        let f = self.p.field();
        let singular = prev.iter().filter(|n| n.kind == RootKind::Singular).count() as u64;
        let n = self.pf.norm();
        if singular.saturating_mul(n) > self.cap {
            return Err(Error::ResidueCapExceeded {
                size: format!("{}", singular as u128 * n as u128),
                cap: self.cap,
            });
        }
        let next = self.ideal.mul(&self.pf.prime_ideal);
        let mut out = Vec::new();
        for (i, node) in prev.iter().enumerate() {
            match node.kind {
                RootKind::Nonsingular => {
                    let d = self.dp.eval_mod(&node.root, &self.pf.prime_ideal);
                    let w = self.pf.inverse_mod(&d).expect("nonsingular derivative is a unit");
                    let value = self.p.eval_mod(&node.root, &next);
                    let lifted = next.reduce(&(&node.root - &f.mul(&value, &w)));
                    debug_assert!(self.p.eval_mod(&lifted, &next).is_zero());
                    out.push(LiftNode {
                        root: lifted,
                        parent: Some(i),
                        kind: RootKind::Nonsingular,
                    });
                }
                RootKind::Singular => {
                    for s in &self.residues {
                        let child = next.reduce(&(&node.root + &f.mul(s, &self.pi_k)));
                        if self.p.eval_mod(&child, &next).is_zero() {
                            out.push(LiftNode {
                                root: child,
                                parent: Some(i),
                                kind: RootKind::Singular,
                            });
                        }
                    }
                }
            }
        }
        out.sort_by(|a, b| a.root.cmp(&b.root));
        self.pi_k = f.mul(&self.pi_k, &self.pf.uniformizer);
        self.ideal = next;
        self.k += 1;
        Ok(out)
    }
}

/// Complete root sets of `p` modulo `P^k` for `k <= depth`. Nonsingular roots
/// lift by one Newton step; singular roots by enumerating the `N(P)` lifts.
pub fn lift_roots(p: &OPoly, pf: &PrimeFactor, depth: u32, limits: &Limits) -> Result<LiftTree> {
    require_univariate(p)?;
    if depth == 0 {
        return Err(Error::InvalidInput("lift depth must be at least 1".into()));
    }
    let mut lifter = Lifter::new(p, pf, limits)?;
    let mut levels = vec![lifter.first_level()];
    while (levels.len() as u32) < depth {
        let next = lifter.step(levels.last().expect("nonempty"))?;
        levels.push(next);
    }
    Ok(LiftTree {
        prime: pf.clone(),
        levels,
    })
}

/// How deep to lift at each prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DepthRule {
    /// Never stop before this level.
    pub depth_min: u32,
    /// Never stop before this level at ramified primes.
    pub ramified_min: u32,
}

impl Default for DepthRule {
    fn default() -> Self {
        DepthRule {
            depth_min: 1,
            ramified_min: 5,
        }
    }
}

impl DepthRule {
    fn minimum(&self, pf: &PrimeFactor) -> u32 {
        let m = self.depth_min.max(1);
        if pf.is_ramified() {
            m.max(self.ramified_min)
        } else {
            m
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    NotIntersective,
    IntersectiveUpTo,
    CertifiedIntersective,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::NotIntersective => "NOT_INTERSECTIVE",
            Status::IntersectiveUpTo => "INTERSECTIVE_UP_TO",
            Status::CertifiedIntersective => "CERTIFIED_INTERSECTIVE",
        }
    }
}

/// Which of `alpha`, `beta`, `alpha*beta` is a square modulo `(1+i)^5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwoAdicSquare {
    Alpha,
    Beta,
    AlphaBeta,
}

impl TwoAdicSquare {
    pub fn as_str(&self) -> &'static str {
        match self {
            TwoAdicSquare::Alpha => "alpha",
            TwoAdicSquare::Beta => "beta",
            TwoAdicSquare::AlphaBeta => "alpha*beta",
        }
    }
}

/// Residue conditions for `(x^2 - alpha)(x^2 - beta)(x^2 - alpha*beta)` over
/// `Z[i]`, each with an explicit square root so the record can be rechecked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeQuadraticsRecord {
    pub alpha: AlgInt,
    pub beta: AlgInt,
    /// `s` with `s^2 = alpha mod beta`.
    pub sqrt_alpha_mod_beta: Option<AlgInt>,
    /// `s` with `s^2 = beta mod alpha`.
    pub sqrt_beta_mod_alpha: Option<AlgInt>,
    pub two_adic: Option<(TwoAdicSquare, AlgInt)>,
}

impl ThreeQuadraticsRecord {
    pub fn conditions_hold(&self) -> bool {
        self.sqrt_alpha_mod_beta.is_some()
            && self.sqrt_beta_mod_alpha.is_some()
            && self.two_adic.is_some()
    }

    /// Rechecks every stored square root from scratch.
    pub fn verify(&self) -> bool {
        let f = Field::gaussian();
        let sq = |s: &AlgInt, target: &AlgInt, modulus: &AlgInt| {
            Ideal::principal(modulus, f)
                .map(|i| i.contains(&(&f.square(s) - target)))
                .unwrap_or(false)
        };
        let (Some(sa), Some(sb), Some((which, s2))) =
            (&self.sqrt_alpha_mod_beta, &self.sqrt_beta_mod_alpha, &self.two_adic)
        else {
            return false;
        };
        let target = match which {
            TwoAdicSquare::Alpha => self.alpha.clone(),
            TwoAdicSquare::Beta => self.beta.clone(),
            TwoAdicSquare::AlphaBeta => f.mul(&self.alpha, &self.beta),
        };
        sq(sa, &self.alpha, &self.beta)
            && sq(sb, &self.beta, &self.alpha)
            && sq(s2, &target, &f.pow(&AlgInt::new(1, 1), 5))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// A root of the polynomial in `O_L` (or a common root of a family).
    ExactRoot(AlgInt),
    ThreeQuadratics(ThreeQuadraticsRecord),
}

/// What happened at one prime ideal during a scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeScan {
    pub prime: Ideal,
    /// Number of roots at each lifted level.
    pub roots_per_level: Vec<usize>,
    /// First level with no roots.
    pub dead_at: Option<u32>,
    /// Level at which a nonsingular root was first seen.
    pub nonsingular_at: Option<u32>,
}

impl PrimeScan {
    pub fn depth(&self) -> u32 {
        self.roots_per_level.len() as u32
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<Ideal>,
    pub bound: Option<u64>,
    /// Deepest level lifted at any prime.
    pub depth_used: Option<u32>,
    pub certificate: Option<Certificate>,
    pub scans: Vec<PrimeScan>,
    pub warning: Option<String>,
}

impl Verdict {
    fn new(status: Status) -> Self {
        Verdict {
            status,
            witness: None,
            bound: None,
            depth_used: None,
            certificate: None,
            scans: Vec::new(),
            warning: None,
        }
    }

    pub fn is_not_intersective(&self) -> bool {
        self.status == Status::NotIntersective
    }
}

/// Roots of `p` lying in `O_L`, found from complex approximations of the roots
/// under each embedding and confirmed by exact evaluation.
pub fn exact_roots(p: &OPoly) -> Result<Vec<AlgInt>> {
    require_univariate(p)?;
    if p.is_constant() {
        return Ok(Vec::new());
    }
    let f = p.field();
    let sf = squarefree_part(p)?;
    let coeffs = sf.to_dense()?;
    let embedded: Vec<Vec<Complex>> = coeffs.iter().map(|c| f.embed(c)).collect();
    let roots_under = |j: usize| -> Vec<Complex> {
        let cs: Vec<Complex> = embedded.iter().map(|e| e[j]).collect();
        arith::complex_roots(&cs)
    };
    let mut candidates = Vec::new();
    match f.omega_embeddings().first() {
        Some(w) if w.im == 0.0 => {
            let (r1, r2) = (roots_under(0), roots_under(1));
            for z1 in &r1 {
                for z2 in &r2 {
                    candidates.extend(f.nearby_elements(&[*z1, *z2]));
                }
            }
        }
        _ => {
            for z in roots_under(0) {
                candidates.extend(f.nearby_elements(&[z, z]));
            }
        }
    }
    candidates.sort();
    candidates.dedup();
    candidates.retain(|r| p.eval_univariate(r).is_zero());
    Ok(candidates)
}

fn scan_prime(
    p: &OPoly,
    pf: &PrimeFactor,
    rule: &DepthRule,
    disc: &AlgInt,
    limits: &Limits,
) -> Result<(PrimeScan, Option<Ideal>)> {
    let mut lifter = Lifter::new(p, pf, limits)?;
    let minimum = rule.minimum(pf);
    let mut level = lifter.first_level();
    let mut sizes = Vec::new();
    let mut nonsingular_at = None;
    let mut target: Option<u32> = None;
    loop {
        let k = lifter.k;
        sizes.push(level.len());
        if level.is_empty() {
            let scan = PrimeScan {
                prime: pf.prime_ideal.clone(),
                roots_per_level: sizes,
                dead_at: Some(k),
                nonsingular_at,
            };
            return Ok((scan, Some(lifter.ideal)));
        }
        if nonsingular_at.is_none() && level.iter().any(|n| n.kind == RootKind::Nonsingular) {
            nonsingular_at = Some(k);
        }
        if nonsingular_at.is_some() && k >= minimum {
            break;
        }
        let depth = *target.get_or_insert_with(|| {
            let v = ideal::valuation(disc, pf);
            (2 * v + 1).max(minimum)
        });
        if k >= depth {
            break;
        }
        level = lifter.step(&level)?;
    }
    let scan = PrimeScan {
        prime: pf.prime_ideal.clone(),
        roots_per_level: sizes,
        dead_at: None,
        nonsingular_at,
    };
    Ok((scan, None))
}

fn require_nonconstant(p: &OPoly) -> Result<()> {
    require_univariate(p)?;
    if p.is_constant() {
        return Err(Error::InvalidInput(format!("{p} is constant")));
    }
    Ok(())
}

/// Smallest witness over a set of per-prime results, re-verified by
/// `roots_mod` when its norm fits under the cap.
fn finish_scan<T>(
    results: Vec<Result<(T, Option<Ideal>)>>,
    mut verify: impl FnMut(&Ideal) -> Result<bool>,
    limits: &Limits,
) -> Result<(Vec<T>, Option<Ideal>, Option<String>)> {
    let mut scans = Vec::with_capacity(results.len());
    let mut witness: Option<Ideal> = None;
    for r in results {
        let (scan, w) = r?;
        scans.push(scan);
        if let Some(w) = w {
            if witness.as_ref().map_or(true, |cur| w < *cur) {
                witness = Some(w);
            }
        }
    }
    let mut warning = None;
    if let Some(w) = &witness {
        if w.norm() <= BigInt::from(limits.residue_cap) {
            if !verify(w)? {
                return Err(Error::Internal(format!("witness {w} failed re-verification")));
            }
        } else {
            warning = Some(format!(
                "witness of norm {} is beyond the brute-force re-verification cap",
                w.norm()
            ));
        }
    }
    Ok((scans, witness, warning))
}

/// Scans every prime ideal of norm `<= bound`, lifting per `rule`.
pub fn is_intersective_up_to(
    p: &OPoly,
    bound: u64,
    rule: &DepthRule,
    limits: &Limits,
) -> Result<Verdict> {
    require_nonconstant(p)?;
    let f = p.field();
    let sf = squarefree_part(p)?;
    let disc = if sf.is_constant() {
        AlgInt::from_i64(1)
    } else {
        discriminant(&sf)?
    };
    let disc = if disc.is_zero() { AlgInt::from_i64(1) } else { disc };
    let roots = exact_roots(p)?;
    let primes = ideal::prime_ideals_up_to(f, bound);
    let results = par::map(&primes, |pf| scan_prime(p, pf, rule, &disc, limits));
    let (scans, witness, warning) =
        finish_scan(results, |w| Ok(roots_mod(p, w, limits)?.is_empty()), limits)?;
    let mut v = match &witness {
        Some(_) => Verdict::new(Status::NotIntersective),
        None => Verdict::new(Status::IntersectiveUpTo),
    };
    if witness.is_some() && !roots.is_empty() {
        return Err(Error::Internal(format!("{p} has a root but a witness was found")));
    }
    v.witness = witness;
    v.bound = Some(bound);
    v.depth_used = scans.iter().map(PrimeScan::depth).max();
    v.certificate = roots.into_iter().max().map(Certificate::ExactRoot);
    v.scans = scans;
    v.warning = warning;
    Ok(v)
}

/// Exact square root in `O_L`, if one exists.
pub fn exact_sqrt(x: &AlgInt, f: &Field) -> Option<AlgInt> {
    let isqrt = |n: &BigInt| -> Option<BigInt> {
        if n.is_negative() {
            return None;
        }
        let r = n.sqrt();
        (&r * &r == *n).then_some(r)
    };
    if x.is_zero() {
        return Some(AlgInt::zero());
    }
    if f.is_rational() {
        return isqrt(&x.a).map(AlgInt::from_int);
    }
    // With r^2 = x: N(r) = +-sqrt(N(x)) and Tr(r)^2 = Tr(x) + 2 N(r), and
    // r = (x + N(r)) / Tr(r) whenever the trace is nonzero.
    let norm = f.norm(x);
    let mut found = Vec::new();
    if let Some(nr) = isqrt(&norm.abs()) {
        for n in [nr.clone(), -nr] {
            let Some(tr) = isqrt(&(f.trace(x) + &n * 2)) else {
                continue;
            };
            if tr.is_zero() {
                continue;
            }
            let num = x + &AlgInt::from_int(n.clone());
            if num.a.is_zero() && num.b.is_zero() {
                continue;
            }
            for t in [tr.clone(), -tr.clone()] {
                if let Some(r) = f.div_exact(&num, &AlgInt::from_int(t)) {
                    if f.square(&r) == *x {
                        found.push(r);
                    }
                }
            }
        }
    }
    // Trace zero: r = z * sqrt(d) with z^2 = x / d.
    let d = f.d().expect("quadratic");
    let (t, _) = f.min_poly_of_omega();
    let sqrt_d = AlgInt::new(-t, if t == 0 { 1 } else { 2 });
    if x.b.is_zero() && (&x.a % d).is_zero() {
        if let Some(z) = isqrt(&(&x.a / d)) {
            let r = sqrt_d.scale(&z);
            if f.square(&r) == *x {
                found.push(r);
            }
        }
    }
    found.into_iter().max()
}

/// `x^2 + c`: certified by an exact root of `-c`, refuted by the first prime
/// ideal of norm `<= scan_bound` modulo which `-c` is not a square.
pub fn certify_quadratic_plus_constant(
    c: &AlgInt,
    f: Field,
    scan_bound: u64,
    limits: &Limits,
) -> Result<Verdict> {
    f.check(c)?;
    if let Some(r) = exact_sqrt(&-c, &f) {
        let mut v = Verdict::new(Status::CertifiedIntersective);
        v.certificate = Some(Certificate::ExactRoot(r));
        return Ok(v);
    }
    let x = OPoly::x(f);
    let p = x.mul(&x).add(&OPoly::constant(f, 1, c.clone()));
    for pf in ideal::prime_ideals_up_to(f, scan_bound) {
        if roots_mod(&p, &pf.prime_ideal, limits)?.is_empty() {
            let mut v = Verdict::new(Status::NotIntersective);
            v.witness = Some(pf.prime_ideal);
            return Ok(v);
        }
    }
    let mut v = Verdict::new(Status::IntersectiveUpTo);
    v.bound = Some(scan_bound);
    v.warning = Some(format!(
        "no refuting prime of norm <= {scan_bound}; raise the scan bound"
    ));
    Ok(v)
}

fn gaussian_prime_norm(x: &AlgInt) -> Option<u64> {
    let f = Field::gaussian();
    let n = f.norm(x).to_u64()?;
    if arith::is_prime(n) {
        return Some(n);
    }
    let q = n.sqrt();
    if q * q == n && arith::is_prime(q) && q % 4 == 3 && f.is_associate_by_torsion(x, &AlgInt::from_i64(q as i64)) {
        return Some(n);
    }
    None
}

fn sqrt_mod_ideal(x: &AlgInt, modulus: &Ideal, limits: &Limits) -> Result<Option<AlgInt>> {
    let f = modulus.field();
    let target = modulus.reduce(x);
    Ok(modulus
        .residue_system(limits.residue_cap)?
        .into_iter()
        .find(|s| modulus.reduce(&f.square(s)) == target))
}

/// Evaluates the residue conditions for the three-quadratics family without
/// checking the hypotheses on `alpha` and `beta`.
fn three_quadratics_record(alpha: &AlgInt, beta: &AlgInt, limits: &Limits) -> Result<ThreeQuadraticsRecord> {
    let f = Field::gaussian();
    let ia = Ideal::principal(alpha, f)?;
    let ib = Ideal::principal(beta, f)?;
    // Euler's criterion first; the explicit root is only searched when it succeeds.
    let euler = |x: &AlgInt, i: &Ideal| -> bool {
        let e = (i.norm() - 1u32) / 2u32;
        i.pow_mod(x, e) == i.reduce(&AlgInt::from_i64(1))
    };
    let sa = if euler(alpha, &ib) { sqrt_mod_ideal(alpha, &ib, limits)? } else { None };
    let sb = if euler(beta, &ia) { sqrt_mod_ideal(beta, &ia, limits)? } else { None };
    let two5 = Ideal::principal(&f.pow(&AlgInt::new(1, 1), 5), f)?;
    let ab = f.mul(alpha, beta);
    let mut two_adic = None;
    for (which, x) in [
        (TwoAdicSquare::Alpha, alpha),
        (TwoAdicSquare::Beta, beta),
        (TwoAdicSquare::AlphaBeta, &ab),
    ] {
        if let Some(s) = sqrt_mod_ideal(x, &two5, limits)? {
            two_adic = Some((which, s));
            break;
        }
    }
    Ok(ThreeQuadraticsRecord {
        alpha: alpha.clone(),
        beta: beta.clone(),
        sqrt_alpha_mod_beta: sa,
        sqrt_beta_mod_alpha: sb,
        two_adic,
    })
}

fn check_three_quadratics_inputs(alpha: &AlgInt, beta: &AlgInt) -> Result<()> {
    let f = Field::gaussian();
    for x in [alpha, beta] {
        let n = gaussian_prime_norm(x)
            .ok_or_else(|| Error::InvalidInput(format!("{x} is not a Gaussian prime")))?;
        if n == 2 {
            return Err(Error::InvalidInput(format!("{x} is associate to 1+i")));
        }
    }
    if f.is_associate_by_torsion(alpha, beta) {
        return Err(Error::InvalidInput(format!("{alpha} and {beta} are associates")));
    }
    Ok(())
}

/// `(x^2 - alpha)(x^2 - beta)(x^2 - alpha*beta)` over `Z[i]`.
pub fn three_quadratics_poly(alpha: &AlgInt, beta: &AlgInt) -> OPoly {
    let f = Field::gaussian();
    let x = OPoly::x(f);
    let quad = |c: AlgInt| x.mul(&x).sub(&OPoly::constant(f, 1, c));
    quad(alpha.clone())
        .mul(&quad(beta.clone()))
        .mul(&quad(f.mul(alpha, beta)))
}

/// Certifies the three-quadratics family over `Z[i]` from its residue
/// conditions. Fails with `ConditionsNotMet` when they do not hold.
pub fn certify_three_quadratics(alpha: &AlgInt, beta: &AlgInt, limits: &Limits) -> Result<Verdict> {
    check_three_quadratics_inputs(alpha, beta)?;
    let record = three_quadratics_record(alpha, beta, limits)?;
    if !record.conditions_hold() {
        let mut missing = Vec::new();
        if record.sqrt_alpha_mod_beta.is_none() {
            missing.push("alpha is not a square mod beta");
        }
        if record.sqrt_beta_mod_alpha.is_none() {
            missing.push("beta is not a square mod alpha");
        }
        if record.two_adic.is_none() {
            missing.push("none of alpha, beta, alpha*beta is a square mod (1+i)^5");
        }
        return Err(Error::ConditionsNotMet(missing.join("; ")));
    }
    debug_assert!(record.verify());
    let mut v = Verdict::new(Status::CertifiedIntersective);
    v.certificate = Some(Certificate::ThreeQuadratics(record));
    Ok(v)
}

/// Why a pair was rejected by [`search_three_quadratics`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reject {
    /// One of the quadratic residue conditions between `alpha` and `beta` fails.
    ResidueCondition,
    /// None of the three constants is a square modulo `(1+i)^5`.
    TwoAdicCondition,
}

#[derive(Clone, Debug, Default)]
pub struct ThreeQuadraticsSearch {
    pub found: Vec<(AlgInt, AlgInt)>,
    pub rejects: Vec<(AlgInt, AlgInt, Reject)>,
}

/// Gaussian primes of norm `<= max_norm`, all associates, not associate to
/// `1+i`, ordered by norm and then coordinates.
pub fn gaussian_primes(max_norm: u64) -> Vec<AlgInt> {
    let r = libm::sqrt(max_norm as f64) as i64 + 1;
    let mut out: Vec<(u64, AlgInt)> = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            let x = AlgInt::new(a, b);
            if let Some(n) = gaussian_prime_norm(&x) {
                if n <= max_norm && n != 2 {
                    out.push((n, x));
                }
            }
        }
    }
    out.sort();
    out.into_iter().map(|(_, x)| x).collect()
}

/// Pairs `(alpha, beta)` of Gaussian primes of norm `<= max_norm` meeting the
/// residue conditions, in a fixed order, stopping after `limit` hits.
pub fn search_three_quadratics(max_norm: u64, limit: usize, limits: &Limits) -> Result<ThreeQuadraticsSearch> {
    let f = Field::gaussian();
    let primes = gaussian_primes(max_norm);
    let mut out = ThreeQuadraticsSearch::default();
    for (i, alpha) in primes.iter().enumerate() {
        for beta in &primes[i + 1..] {
            if f.is_associate_by_torsion(alpha, beta) {
                continue;
            }
            let rec = three_quadratics_record(alpha, beta, limits)?;
            if rec.conditions_hold() {
                out.found.push((alpha.clone(), beta.clone()));
                if out.found.len() >= limit {
                    return Ok(out);
                }
            } else if rec.sqrt_alpha_mod_beta.is_none() || rec.sqrt_beta_mod_alpha.is_none() {
                out.rejects.push((alpha.clone(), beta.clone(), Reject::ResidueCondition));
            } else {
                out.rejects.push((alpha.clone(), beta.clone(), Reject::TwoAdicCondition));
            }
        }
    }
    Ok(out)
}

/// Common roots of the family modulo `P^k`, lifted level by level.
fn joint_scan_prime(
    ps: &[OPoly],
    pf: &PrimeFactor,
    depth: u32,
    limits: &Limits,
) -> Result<(PrimeScan, Option<Ideal>)> {
    let f = pf.prime_ideal.field();
    let d = ps[0].arity();
    let residues = pf.prime_ideal.residue_system(limits.residue_cap)?;
    let n = residues.len() as u64;
    let fan = n
        .checked_pow(d as u32)
        .filter(|&x| x <= limits.residue_cap)
        .ok_or_else(|| Error::ResidueCapExceeded {
            size: format!("{n}^{d}"),
            cap: limits.residue_cap,
        })?;
    // All d-tuples of residues, as offsets.
    let mut offsets: Vec<Vec<AlgInt>> = vec![Vec::new()];
    for _ in 0..d {
        offsets = offsets
            .into_iter()
            .flat_map(|t| {
                residues.iter().map(move |s| {
                    let mut t = t.clone();
                    t.push(s.clone());
                    t
                })
            })
            .collect();
    }
    let all_vanish = |z: &[AlgInt], ideal: &Ideal| ps.iter().all(|p| p.eval_mod_point(z, ideal).is_zero());
    let mut ideal = pf.prime_ideal.clone();
    let mut level: Vec<Vec<AlgInt>> = offsets.iter().filter(|z| all_vanish(z, &ideal)).cloned().collect();
    let mut sizes = vec![level.len()];
    let mut pi_k = pf.uniformizer.clone();
    let mut k = 1;
    while !level.is_empty() && k < depth {
        let candidates = (level.len() as u64).saturating_mul(fan);
        if candidates > limits.residue_cap {
            return Err(Error::ResidueCapExceeded {
                size: format!("{candidates}"),
                cap: limits.residue_cap,
            });
        }
        let next = ideal.mul(&pf.prime_ideal);
        let mut out = Vec::new();
        for z in &level {
            for s in &offsets {
                let child: Vec<AlgInt> = z
                    .iter()
                    .zip(s)
                    .map(|(zi, si)| next.reduce(&(zi + &f.mul(si, &pi_k))))
                    .collect();
                if all_vanish(&child, &next) {
                    out.push(child);
                }
            }
        }
        out.sort();
        level = out;
        sizes.push(level.len());
        ideal = next;
        pi_k = f.mul(&pi_k, &pf.uniformizer);
        k += 1;
    }
    let dead = level.is_empty();
    let scan = PrimeScan {
        prime: pf.prime_ideal.clone(),
        roots_per_level: sizes,
        dead_at: dead.then_some(k),
        nonsingular_at: None,
    };
    Ok((scan, dead.then_some(ideal)))
}

/// Searches for a common zero of the family modulo every prime power
/// `P^k` with `N(P)^k <= bound` (and `k >= rule.depth_min`).
pub fn jointly_intersective_up_to(
    ps: &[OPoly],
    bound: u64,
    rule: &DepthRule,
    limits: &Limits,
) -> Result<Verdict> {
    let first = ps.first().ok_or(Error::EmptyInput("polynomial family"))?;
    let (f, d) = (first.field(), first.arity());
    for p in ps {
        if p.field() != f {
            return Err(Error::InvalidInput("polynomials over different fields".into()));
        }
        if p.arity() != d {
            return Err(Error::ArityMismatch {
                expected: d,
                got: p.arity(),
            });
        }
    }
    let primes = ideal::prime_ideals_up_to(f, bound);
    let results = par::map(&primes, |pf| {
        let n = pf.norm();
        let mut k = 1u32;
        while n.checked_pow(k + 1).is_some_and(|x| x <= bound) {
            k += 1;
        }
        joint_scan_prime(ps, pf, k.max(rule.depth_min), limits)
    });
    let verify = |w: &Ideal| -> Result<bool> {
        let residues = w.residue_system(limits.residue_cap)?;
        let total = (residues.len() as u64).checked_pow(d as u32);
        if total.map_or(true, |t| t > limits.residue_cap) {
            return Ok(true);
        }
        let mut idx = vec![0usize; d];
        loop {
            let z: Vec<AlgInt> = idx.iter().map(|&i| residues[i].clone()).collect();
            if ps.iter().all(|p| p.eval_mod_point(&z, w).is_zero()) {
                return Ok(false);
            }
            let mut j = 0;
            loop {
                if j == d {
                    return Ok(true);
                }
                idx[j] += 1;
                if idx[j] < residues.len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
        }
    };
    let (scans, witness, warning) = finish_scan(results, verify, limits)?;
    let mut v = Verdict::new(if witness.is_some() {
        Status::NotIntersective
    } else {
        Status::IntersectiveUpTo
    });
    if witness.is_none() && d == 1 {
        let nonzero: Vec<&OPoly> = ps.iter().filter(|p| !p.is_zero()).collect();
        if let Some(lead) = nonzero.iter().find(|p| !p.is_constant()) {
            v.certificate = exact_roots(lead)?
                .into_iter()
                .filter(|r| nonzero.iter().all(|p| p.eval_univariate(r).is_zero()))
                .max()
                .map(Certificate::ExactRoot);
        }
    }
    v.witness = witness;
    v.bound = Some(bound);
    v.depth_used = scans.iter().map(PrimeScan::depth).max();
    v.scans = scans;
    v.warning = warning;
    Ok(v)
}

/// Outcome of comparing a family against its gcd.
#[derive(Clone, Debug)]
pub struct GcdReduction {
    pub gcd: GcdResult,
    pub gcd_verdict: Verdict,
    pub joint_verdict: Verdict,
    pub notes: Vec<String>,
}

/// Computes `g = gcd(ps)` over `L`, scans `g` and the family on the same
/// bound, and checks that a witness against `g` coprime to the Bezout
/// denominator also refutes the family.
pub fn gcd_reduction_check(ps: &[OPoly], bound: u64, rule: &DepthRule, limits: &Limits) -> Result<GcdReduction> {
    let gcd = poly_gcd_over_l(ps)?;
    let f = gcd.g.field();
    let joint_verdict = jointly_intersective_up_to(ps, bound, rule, limits)?;
    let mut notes = Vec::new();
    let gcd_verdict = if gcd.g.is_constant() {
        // A nonzero constant lies outside the first prime ideal not containing it.
        let c = gcd.g.constant_term();
        let mut v = Verdict::new(Status::NotIntersective);
        v.bound = Some(bound);
        v.witness = ideal::prime_ideals_up_to(f, bound)
            .into_iter()
            .map(|pf| pf.prime_ideal)
            .find(|i| !i.contains(&c));
        if v.witness.is_none() {
            v.status = Status::IntersectiveUpTo;
        }
        notes.push(format!("gcd is the constant {c}"));
        v
    } else {
        is_intersective_up_to(&gcd.g, bound, rule, limits)?
    };
    if let Some(w) = &gcd_verdict.witness {
        let delta_in = shares_prime(w, &gcd.delta);
        if delta_in {
            notes.push(format!(
                "witness {w} is not coprime to the Bezout denominator {}; the gcd comparison says nothing there",
                gcd.delta
            ));
        } else if w.norm() <= BigInt::from(bound) && !joint_verdict.is_not_intersective() {
            return Err(Error::Internal(format!(
                "gcd refuted at {w} but the family has a common root there"
            )));
        }
    }
    Ok(GcdReduction {
        gcd,
        gcd_verdict,
        joint_verdict,
        notes,
    })
}

/// Whether some prime ideal containing `w` also contains `x`.
fn shares_prime(w: &Ideal, x: &AlgInt) -> bool {
    let f = w.field();
    let Some(m) = w.min_integer().to_u64() else {
        return true;
    };
    arith::primes_up_to(m)
        .into_iter()
        .filter(|q| m % q == 0)
        .flat_map(|q| ideal::factor_rational_prime(q, f).unwrap_or_default())
        .any(|pf| contains_ideal(&pf.prime_ideal, w) && pf.prime_ideal.contains(x))
}

fn contains_ideal(big: &Ideal, small: &Ideal) -> bool {
    small.basis().iter().all(|b| big.contains(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> Field {
        Field::rational()
    }

    fn g() -> Field {
        Field::gaussian()
    }

    fn poly(s: &str, f: Field) -> OPoly {
        OPoly::parse_with_arity(s, f, 1).unwrap()
    }

    fn zi(n: i64, f: Field) -> Ideal {
        Ideal::principal(&AlgInt::from_i64(n), f).unwrap()
    }

    fn lim() -> Limits {
        Limits::default()
    }

    fn brute_roots(p: &OPoly, i: &Ideal) -> Vec<AlgInt> {
        // Plain nested loops over a box, reduced and deduplicated.
        let (a, _, c) = i.hnf();
        let (a, c) = (a.to_i64().unwrap(), c.to_i64().unwrap());
        let mut out = Vec::new();
        for x in 0..a {
            for y in 0..c {
                let r = AlgInt::new(x, y);
                if i.contains(&p.eval_univariate(&r)) {
                    out.push(r);
                }
            }
        }
        out
    }

    #[test]
    fn roots_mod_examples() {
        assert_eq!(
            roots_mod(&poly("x^2+1", q()), &zi(5, q()), &lim()).unwrap(),
            [AlgInt::from_i64(2), AlgInt::from_i64(3)]
        );
        assert!(roots_mod(&poly("x^2-2", q()), &zi(5, q()), &lim()).unwrap().is_empty());
        for f in [q(), g(), Field::quadratic(5).unwrap()] {
            for i in ideal::ideals_up_to(f, 30) {
                assert_eq!(roots_mod(&poly("x", f), &i, &lim()).unwrap(), [AlgInt::zero()]);
            }
        }
    }

    #[test]
    fn roots_mod_cap() {
        let tiny = Limits { residue_cap: 10 };
        assert!(matches!(
            roots_mod(&poly("x", q()), &zi(11, q()), &tiny),
            Err(Error::ResidueCapExceeded { .. })
        ));
    }

    fn prime(f: Field, p: u64) -> PrimeFactor {
        ideal::factor_rational_prime(p, f).unwrap().remove(0)
    }

    fn check_tree(p: &OPoly, tree: &LiftTree) {
        let pr = &tree.prime.prime_ideal;
        let mut ideal = pr.clone();
        for (k, level) in tree.levels.iter().enumerate() {
            let brute = brute_roots(p, &ideal);
            let got: Vec<AlgInt> = level.iter().map(|n| n.root.clone()).collect();
            assert_eq!(got, brute, "level {}", k + 1);
            if k > 0 {
                let prev_ideal = &tree.levels[k - 1];
                for n in level {
                    let parent = &prev_ideal[n.parent.unwrap()];
                    let below = pr.pow(k as u32);
                    assert_eq!(below.reduce(&n.root), parent.root);
                }
                for (i, parent) in prev_ideal.iter().enumerate() {
                    if parent.kind == RootKind::Nonsingular {
                        assert_eq!(level.iter().filter(|n| n.parent == Some(i)).count(), 1);
                    }
                }
            }
            ideal = ideal.mul(pr);
        }
    }

    #[test]
    fn lift_x2_minus_17_at_2() {
        let p = poly("x^2-17", q());
        let tree = lift_roots(&p, &prime(q(), 2), 6, &lim()).unwrap();
        assert!(tree.levels.iter().all(|l| !l.is_empty()));
        assert_eq!(tree.levels[5].len(), 4);
        check_tree(&p, &tree);
    }

    #[test]
    fn lift_gaussian_exact_root() {
        let p = poly("x^2+1", g());
        let pf = prime(g(), 2);
        let tree = lift_roots(&p, &pf, 3, &lim()).unwrap();
        let mut ideal = pf.prime_ideal.clone();
        for level in &tree.levels {
            let i = ideal.reduce(&AlgInt::omega());
            assert!(level.iter().any(|n| n.root == i));
            ideal = ideal.mul(&pf.prime_ideal);
        }
        check_tree(&p, &tree);
    }

    #[test]
    fn lift_x2_minus_2_dies() {
        let p = poly("x^2-2", q());
        let tree = lift_roots(&p, &prime(q(), 2), 3, &lim()).unwrap();
        assert_eq!(tree.levels[0].len(), 1);
        assert_eq!(tree.levels[0][0].root, AlgInt::zero());
        assert!(tree.levels[2].is_empty());
        assert_eq!(tree.dead_at(), Some(2));
    }

    #[test]
    fn lift_trees_match_brute_force() {
        let cases = [
            ("x^2-17", q(), 2u64, 7u32),
            ("(x^2-13)*(x^2-17)*(x^2-221)", q(), 2, 8),
            ("x^3-x", q(), 3, 5),
            ("x^2+1", g(), 5, 3),
            ("x^2-2*w", g(), 2, 6),
            ("(x-w)^2*(x+1)", Field::quadratic(5).unwrap(), 5, 3),
            ("x^2-w", Field::quadratic(-7).unwrap(), 2, 6),
        ];
        for (s, f, pr, depth) in cases {
            let p = poly(s, f);
            for pf in ideal::factor_rational_prime(pr, f).unwrap() {
                let tree = lift_roots(&p, &pf, depth, &lim()).unwrap();
                check_tree(&p, &tree);
            }
        }
    }

    #[test]
    fn singular_lift_respects_cap() {
        let p = poly("x^4", q());
        let tiny = Limits { residue_cap: 40 };
        assert!(matches!(
            lift_roots(&p, &prime(q(), 7), 4, &tiny),
            Err(Error::ResidueCapExceeded { .. })
        ));
    }

    #[test]
    fn scan_examples() {
        let rule = DepthRule::default();
        let v = is_intersective_up_to(&poly("x^2+1", g()), 1000, &rule, &lim()).unwrap();
        assert_eq!(v.status, Status::IntersectiveUpTo);
        assert_eq!(v.certificate, Some(Certificate::ExactRoot(AlgInt::omega())));
        let ramified = v.scans.iter().find(|s| s.prime.norm() == BigInt::from(2)).unwrap();
        assert!(ramified.depth() >= 5);
        assert!(v.scans.iter().all(|s| s.dead_at.is_none()));

        let v = is_intersective_up_to(&poly("x^2-2", q()), 5, &rule, &lim()).unwrap();
        assert_eq!(v.status, Status::NotIntersective);
        let w = v.witness.unwrap();
        assert!(roots_mod(&poly("x^2-2", q()), &w, &lim()).unwrap().is_empty());
        assert_eq!(w, zi(3, q()));
    }

    #[test]
    fn classical_family_is_intersective_up_to_bound() {
        let p = poly("(x^2-13)*(x^2-17)*(x^2-221)", q());
        let v = is_intersective_up_to(&p, 300, &DepthRule::default(), &lim()).unwrap();
        assert_eq!(v.status, Status::IntersectiveUpTo);
        assert_eq!(v.certificate, None);
    }

    #[test]
    fn scan_rejects_constants() {
        assert!(is_intersective_up_to(&poly("3", q()), 10, &DepthRule::default(), &lim()).is_err());
    }

    #[test]
    fn exact_roots_found_and_verified() {
        assert_eq!(exact_roots(&poly("x^2+1", g())).unwrap(), [-AlgInt::omega(), AlgInt::omega()]);
        assert!(exact_roots(&poly("x^2+1", q())).unwrap().is_empty());
        let f5 = Field::quadratic(5).unwrap();
        let r = exact_roots(&poly("(x-3+2*w)*(x+w)^2*(x^2-3)", f5)).unwrap();
        assert_eq!(r, [AlgInt::new(0, -1), AlgInt::new(3, -2)]);
        assert_eq!(exact_roots(&poly("2*x-6", q())).unwrap(), [AlgInt::from_i64(3)]);
    }

    #[test]
    fn exact_sqrt_oracle() {
        for d in [-1i64, -2, -3, -7, 2, 3, 5, 13] {
            let f = Field::quadratic(d).unwrap();
            for a in -6..=6 {
                for b in -6..=6 {
                    let r = AlgInt::new(a, b);
                    let s = exact_sqrt(&f.square(&r), &f).unwrap();
                    assert_eq!(f.square(&s), f.square(&r));
                }
            }
            // Non-squares stay unresolved.
            assert!(exact_sqrt(&AlgInt::new(2, 0), &f).map_or(true, |s| f.square(&s) == AlgInt::new(2, 0)));
        }
        assert_eq!(exact_sqrt(&AlgInt::from_i64(7), &q()), None);
    }

    #[test]
    fn quadratic_plus_constant_examples() {
        let v = certify_quadratic_plus_constant(&AlgInt::from_i64(1), g(), 100, &lim()).unwrap();
        assert_eq!(v.status, Status::CertifiedIntersective);
        assert_eq!(v.certificate, Some(Certificate::ExactRoot(AlgInt::omega())));
        let v = certify_quadratic_plus_constant(&AlgInt::from_i64(2), q(), 100, &lim()).unwrap();
        assert_eq!(v.status, Status::NotIntersective);
        assert_eq!(v.witness, Some(zi(5, q())));
        let f5 = Field::quadratic(5).unwrap();
        let v = certify_quadratic_plus_constant(&AlgInt::new(-1, -1), f5, 100, &lim()).unwrap();
        assert_eq!(v.certificate, Some(Certificate::ExactRoot(AlgInt::omega())));
        let v = certify_quadratic_plus_constant(&AlgInt::from_i64(2), q(), 2, &lim()).unwrap();
        assert_eq!(v.status, Status::IntersectiveUpTo);
        assert!(v.warning.is_some());
    }

    #[test]
    fn three_quadratics_input_checks() {
        let one_plus_i = AlgInt::new(1, 1);
        let three = AlgInt::from_i64(3);
        assert!(certify_three_quadratics(&one_plus_i, &three, &lim()).is_err());
        assert!(certify_three_quadratics(&AlgInt::new(1, -1), &three, &lim()).is_err());
        assert!(certify_three_quadratics(&AlgInt::from_i64(5), &three, &lim()).is_err());
        let a = AlgInt::new(2, 1);
        assert!(certify_three_quadratics(&a, &AlgInt::new(-1, 2), &lim()).is_err());
    }

    #[test]
    fn three_quadratics_search_and_rejects() {
        let s = search_three_quadratics(200, 1, &lim()).unwrap();
        let (a, b) = s.found[0].clone();
        let v = certify_three_quadratics(&a, &b, &lim()).unwrap();
        let Some(Certificate::ThreeQuadratics(rec)) = &v.certificate else {
            panic!("missing record");
        };
        assert!(rec.verify());
        let check = is_intersective_up_to(&three_quadratics_poly(&a, &b), 100, &DepthRule::default(), &lim()).unwrap();
        assert_eq!(check.status, Status::IntersectiveUpTo);
        for kind in [Reject::ResidueCondition, Reject::TwoAdicCondition] {
            if let Some((a, b, _)) = s.rejects.iter().find(|r| r.2 == kind) {
                assert!(matches!(certify_three_quadratics(a, b, &lim()), Err(Error::ConditionsNotMet(_))));
            }
        }
    }

    #[test]
    fn gaussian_prime_list() {
        let ps = gaussian_primes(10);
        // 3 and its associates (norm 9), and the 8 elements of norm 5.
        assert_eq!(ps.len(), 12);
        assert_eq!(ps[0], AlgInt::new(-2, -1));
    }

    #[test]
    fn joint_examples() {
        let rule = DepthRule::default();
        let v = jointly_intersective_up_to(&[poly("x^2", q()), poly("x^2+x", q())], 200, &rule, &lim()).unwrap();
        assert_eq!(v.status, Status::IntersectiveUpTo);
        assert_eq!(v.certificate, Some(Certificate::ExactRoot(AlgInt::zero())));
        let v = jointly_intersective_up_to(&[poly("x", q()), poly("x+1", q())], 200, &rule, &lim()).unwrap();
        assert_eq!(v.status, Status::NotIntersective);
        assert_eq!(v.witness, Some(zi(2, q())));
        let v = jointly_intersective_up_to(&[poly("x^2+1", g()), poly("x*(x^2+1)", g())], 200, &rule, &lim())
            .unwrap();
        assert_eq!(v.status, Status::IntersectiveUpTo);
        assert_eq!(v.certificate, Some(Certificate::ExactRoot(AlgInt::omega())));
    }

    #[test]
    fn joint_multivariate() {
        let rule = DepthRule::default();
        let ps = [
            OPoly::parse("x1^2+x2^2+1", q()).unwrap(),
            OPoly::parse("x1-x2", q()).unwrap(),
        ];
        // 2*x^2 + 1 = 0 mod 2 has no solution.
        let v = jointly_intersective_up_to(&ps, 30, &rule, &lim()).unwrap();
        assert_eq!(v.witness, Some(zi(2, q())));
        // Sums of two squares miss 3 mod 4.
        let ps = [OPoly::parse("x1^2+x2^2+1", q()).unwrap()];
        let v = jointly_intersective_up_to(&ps, 30, &rule, &lim()).unwrap();
        assert_eq!(v.witness, Some(zi(4, q())));
        let ps = [OPoly::parse("x1^2+x2^2-2", q()).unwrap(), OPoly::parse("x1-x2", q()).unwrap()];
        let v = jointly_intersective_up_to(&ps, 30, &rule, &lim()).unwrap();
        assert_eq!(v.status, Status::IntersectiveUpTo);
    }

    #[test]
    fn gcd_reduction_examples() {
        let rule = DepthRule::default();
        let r = gcd_reduction_check(&[poly("x*(x-1)", q()), poly("x*(x+1)", q())], 50, &rule, &lim()).unwrap();
        assert_eq!(r.gcd.g, poly("x", q()));
        assert_eq!(r.gcd_verdict.status, Status::IntersectiveUpTo);
        assert_eq!(r.joint_verdict.status, Status::IntersectiveUpTo);

        let r = gcd_reduction_check(&[poly("x-1", q()), poly("x+1", q())], 50, &rule, &lim()).unwrap();
        assert!(r.gcd.g.is_constant());
        // x = 1 is a common root mod 2; 3 is the smallest obstruction.
        assert_eq!(r.joint_verdict.witness, Some(zi(3, q())));
        assert!(r.notes.iter().any(|n| n.contains("Bezout denominator")));

        let p = poly("x^2-2", q());
        let r = gcd_reduction_check(&[p.clone(), p], 50, &rule, &lim()).unwrap();
        assert_eq!(r.gcd_verdict.status, r.joint_verdict.status);
        assert_eq!(r.gcd_verdict.witness, r.joint_verdict.witness);
    }

    fn small_poly() -> impl Strategy<Value = OPoly> {
        let field = prop::sample::select(alloc::vec![0i64, -1, 5, -3, 2]).prop_map(|d| {
            if d == 0 {
                Field::rational()
            } else {
                Field::quadratic(d).unwrap()
            }
        });
        (field, prop::collection::vec((-5i64..=5, -5i64..=5), 1..=4)).prop_map(|(f, cs)| {
            let coeffs: Vec<AlgInt> = cs
                .into_iter()
                .map(|(a, b)| if f.is_rational() { AlgInt::from_i64(a) } else { AlgInt::new(a, b) })
                .collect();
            OPoly::from_dense(f, &coeffs)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn roots_mod_matches_brute_force(p in small_poly()) {
            for i in ideal::ideals_up_to(p.field(), 60) {
                prop_assert_eq!(roots_mod(&p, &i, &lim()).unwrap(), brute_roots(&p, &i));
            }
        }

        #[test]
        fn lift_trees_are_consistent(p in small_poly()) {
            prop_assume!(!p.is_constant());
            for pf in ideal::prime_ideals_up_to(p.field(), 7) {
                let tree = lift_roots(&p, &pf, 3, &lim()).unwrap();
                check_tree(&p, &tree);
            }
        }
    }
}
