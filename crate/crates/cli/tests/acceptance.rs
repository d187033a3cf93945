//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero on any failure not listed in `KNOWN_RED`.

use std::time::{Duration, Instant};

use intersective_core::dynamics::{
    self, correlation_monte_carlo, GhkConfig, KroneckerSystem, Method, SampledFunction, Sampling, System, TorusBox,
};
use intersective_core::experiments::ideal_lattice;
use intersective_core::ideal::{self, Ideal};
use intersective_core::intersectivity::{
    self, Certificate, DepthRule, Status,
};
use intersective_core::largeness::{self, Gap, Window};
use intersective_core::{AlgInt, Field, Limits, OPoly};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

type Check = Result<String, String>;

/// Criteria that cannot pass as written; the ledger records why.
const KNOWN_RED: &[u32] = &[2];

const GOLDEN: f64 = 0.618_033_988_749_894_8;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn limits() -> Limits {
    Limits::default()
}

/// `x mod N` for each residue `x`, by plain integer arithmetic over `Q`.
fn brute_force_no_root_mod_n(p: &OPoly, n: u64) -> bool {
    let coeffs = p.to_dense().unwrap();
    (0..n).all(|x| {
        let v = coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * BigInt::from(x) + &c.a);
        !(v % BigInt::from(n)).is_zero()
    })
}

/// Residues `x + y w` with `0 <= x < a`, `0 <= y < c` for the Hermite form
/// `{a, b + c w}`, tested by evaluating over `O_L` and checking membership.
fn brute_force_roots(p: &OPoly, ideal: &Ideal) -> Vec<AlgInt> {
    let f = ideal.field();
    let (a, _, c) = ideal.hnf();
    let a = a.to_i64().unwrap();
    let c = if f.is_rational() { 1 } else { c.to_i64().unwrap() };
    let mut out = Vec::new();
    for x in 0..a {
        for y in 0..c {
            let r = AlgInt::new(x, y);
            if ideal.contains(&p.eval_univariate(&r)) {
                out.push(r);
            }
        }
    }
    out
}

fn criterion_1() -> Check {
    let f = Field::gaussian();
    let p = OPoly::parse("x^2+1", f).map_err(err)?;
    let start = Instant::now();
    let v = intersectivity::is_intersective_up_to(&p, 1000, &DepthRule::default(), &limits()).map_err(err)?;
    let elapsed = start.elapsed();
    ensure(v.status == Status::IntersectiveUpTo, || format!("status {}", v.status.as_str()))?;
    let root = match &v.certificate {
        Some(Certificate::ExactRoot(r)) => r.clone(),
        other => return Err(format!("certificate {other:?}")),
    };
    ensure(root == AlgInt::omega() || root == -AlgInt::omega(), || format!("root {root}"))?;
    let primes = ideal::prime_ideals_up_to(f, 1000);
    ensure(v.scans.len() == primes.len(), || format!("{} scans for {} primes", v.scans.len(), primes.len()))?;
    for s in &v.scans {
        ensure(s.dead_at.is_none() && s.roots_per_level.iter().all(|&n| n > 0), || {
            format!("levels without roots at {}", s.prime)
        })?;
    }
    let ramified = v
        .scans
        .iter()
        .find(|s| s.prime.norm() == BigInt::from(2))
        .ok_or("no scan at (1+i)")?;
    ensure(ramified.depth() >= 5, || format!("depth {} at (1+i)", ramified.depth()))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "root {root}, {} prime ideals, depth {} at (1+i), {elapsed:.2?}",
        v.scans.len(),
        ramified.depth()
    ))
}

fn criterion_2() -> Check {
    let f = Field::rational();
    let five = Ideal::principal(&AlgInt::from_i64(5), f).map_err(err)?;
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for s in ["x^2-2", "x^2+2"] {
        let p = OPoly::parse(s, f).map_err(err)?;
        let v = intersectivity::is_intersective_up_to(&p, 100, &DepthRule::default(), &limits()).map_err(err)?;
        let w = v.witness.clone().ok_or_else(|| format!("{s}: no witness, status {}", v.status.as_str()))?;
        let n = w.norm().to_u64().unwrap();
        let verified = brute_force_no_root_mod_n(&p, n);
        let five_refutes = brute_force_no_root_mod_n(&p, 5);
        ok &= v.status == Status::NotIntersective && verified && w == five;
        notes.push(format!(
            "{s}: witness {w} (brute force {}), <5> refutes: {five_refutes}",
            if verified { "confirms" } else { "REJECTS" }
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(1);
    let detail = format!("{}; {elapsed:.2?}", notes.join("; "));
    if ok {
        Ok(detail)
    } else {
        Err(format!("expected witness <5> for both: {detail}"))
    }
}

fn criterion_3() -> Check {
    let f = Field::rational();
    let p = OPoly::parse("(x^2-13)*(x^2-17)*(x^2-221)", f)
        .or_else(|_| {
            let a = OPoly::parse("x^2-13", f)?;
            let b = OPoly::parse("x^2-17", f)?;
            let c = OPoly::parse("x^2-221", f)?;
            Ok::<_, intersective_core::Error>(a.mul(&b).mul(&c))
        })
        .map_err(err)?;
    let start = Instant::now();
    let v = intersectivity::is_intersective_up_to(&p, 1000, &DepthRule::default(), &limits()).map_err(err)?;
    let elapsed = start.elapsed();
    ensure(v.status == Status::IntersectiveUpTo && v.bound == Some(1000), || {
        format!("status {} witness {:?}", v.status.as_str(), v.witness.as_ref().map(ToString::to_string))
    })?;
    ensure(v.certificate.is_none(), || "unexpected exact root".into())?;
    // A monic integer polynomial has only integer rational roots.
    let dense = p.to_dense().map_err(err)?;
    let root = (-100_000i64..=100_000).find(|&x| {
        dense
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * BigInt::from(x) + &c.a)
            .is_zero()
    });
    ensure(root.is_none(), || format!("integer root {root:?}"))?;
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!("INTERSECTIVE_UP_TO(1000), depth {:?}, {elapsed:.2?}", v.depth_used))
}

fn criterion_4() -> Check {
    let search = intersectivity::search_three_quadratics(200, 1, &limits()).map_err(err)?;
    let (alpha, beta) = search.found.first().cloned().ok_or("search found nothing")?;
    let f = Field::gaussian();
    ensure(f.norm(&alpha) <= BigInt::from(200) && f.norm(&beta) <= BigInt::from(200), || "norm too large".into())?;
    let v = intersectivity::certify_three_quadratics(&alpha, &beta, &limits()).map_err(err)?;
    ensure(v.status == Status::CertifiedIntersective, || format!("status {}", v.status.as_str()))?;
    let Some(Certificate::ThreeQuadratics(rec)) = &v.certificate else {
        return Err("no three-quadratics record".into());
    };
    ensure(rec.conditions_hold() && rec.verify(), || "record does not verify".into())?;
    let p = intersectivity::three_quadratics_poly(&alpha, &beta);
    let cross = intersectivity::is_intersective_up_to(&p, 500, &DepthRule::default(), &limits()).map_err(err)?;
    ensure(cross.status == Status::IntersectiveUpTo, || {
        format!("cross-check {} witness {:?}", cross.status.as_str(), cross.witness.map(|w| w.to_string()))
    })?;
    Ok(format!("alpha = {alpha}, beta = {beta}; scan to 500 agrees"))
}

fn random_poly(rng: &mut ChaCha8Rng, f: Field) -> OPoly {
    let deg = 1 + (rng.next_u64() % 4) as usize;
    let mut small = || (rng.next_u64() % 11) as i64 - 5;
    let mut coeffs: Vec<AlgInt> = (0..deg)
        .map(|_| if f.is_rational() { AlgInt::from_i64(small()) } else { AlgInt::new(small(), small()) })
        .collect();
    coeffs.push(AlgInt::from_i64(1));
    OPoly::from_dense(f, &coeffs)
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let mut pairs = 0usize;
    for f in [Field::rational(), Field::gaussian(), Field::quadratic(5).unwrap(), Field::quadratic(-3).unwrap()] {
        let ideals = ideal::ideals_up_to(f, 500);
        for _ in 0..50 {
            let p = random_poly(&mut rng, f);
            for i in &ideals {
                let mut fast = intersectivity::roots_mod(&p, i, &limits()).map_err(err)?;
                let mut slow = brute_force_roots(&p, i);
                fast.sort();
                slow.sort();
                ensure(fast == slow, || format!("{p} modulo {i} over {f}: {fast:?} vs {slow:?}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("0 mismatches over {pairs} (polynomial, ideal) pairs in 4 fields"))
}

fn random_multi(rng: &mut ChaCha8Rng, f: Field) -> OPoly {
    let arity = 1 + (rng.next_u64() % 2) as usize;
    let nterms = 1 + rng.next_u64() % 4;
    let terms: Vec<(Vec<u32>, AlgInt)> = (0..nterms)
        .map(|_| {
            let m: Vec<u32> = (0..arity).map(|_| (rng.next_u64() % 4) as u32).collect();
            let a = (rng.next_u64() % 19) as i64 - 9;
            let b = if f.is_rational() { 0 } else { (rng.next_u64() % 19) as i64 - 9 };
            (m, AlgInt::new(a, b))
        })
        .collect();
    OPoly::from_terms(f, arity, terms).unwrap()
}

fn criterion_6() -> Check {
    let f = Field::gaussian();
    let p = OPoly::parse("x^2+1", f).map_err(err)?;
    let comps = p.decompose().component_strings();
    ensure(comps == ["a^2-b^2+1", "2*a*b"], || format!("components {comps:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let fields = [Field::rational(), Field::gaussian(), Field::quadratic(5).unwrap(), Field::quadratic(-7).unwrap()];
    for i in 0..1000 {
        let f = fields[i % fields.len()];
        let q = random_multi(&mut rng, f);
        let back = q.decompose().recompose().map_err(err)?;
        ensure(back == q, || format!("round trip failed for {q} over {f}: got {back}"))?;
    }
    Ok("components (a^2-b^2+1, 2*a*b); 1000 round trips".into())
}

fn criterion_7() -> Check {
    let target = TorusBox::new(vec![0.0], vec![0.5]).map_err(err)?;
    let sys = System::Kronecker(KroneckerSystem::new(&[vec![GOLDEN]], target).map_err(err)?);
    let p = vec![OPoly::parse("x^2", Field::rational()).map_err(err)?];
    let w = Window::centered(1, 10_000);
    let exact = Sampling { samples: 1, seed: 0 };
    let scan = dynamics::return_set_scan(&sys, &p, 0.25 - 0.05, &w, &exact, u128::MAX).map_err(err)?;
    ensure(!scan.hits.is_empty(), || "empty return set".into())?;
    let density = scan.density.as_f64();
    ensure(density >= 0.01, || format!("density {density}"))?;
    let gap = match scan.gap {
        Gap::Finite(g) if g <= 200 => g,
        g => return Err(format!("gap {g:?}")),
    };
    let mc = Sampling { samples: 10_000, seed: 7 };
    let mut worst: f64 = 0.0;
    for row in scan.rows.iter().step_by(200) {
        ensure(row.method == Method::Exact, || "expected exact overlaps".into())?;
        let r = correlation_monte_carlo(&sys, &p, &row.u, &mc).map_err(err)?;
        let Method::MonteCarlo { stderr, .. } = r.method else {
            return Err("expected Monte Carlo".into());
        };
        let z = (r.value - row.value).abs() / stderr.max(1.0 / mc.samples as f64);
        worst = worst.max(z);
    }
    ensure(worst < 4.0, || format!("Monte Carlo off by {worst:.2} sigma"))?;
    Ok(format!("density {density:.4}, gap {gap}, worst MC deviation {worst:.2} sigma over 101 shifts"))
}

fn criterion_8() -> Check {
    let full = TorusBox::full(1);
    let sys = System::Kronecker(KroneckerSystem::new(&[vec![GOLDEN]], full).map_err(err)?);
    let w = Window::interval(1, 10_000).map_err(err)?;
    let base = GhkConfig {
        k: 0,
        window: w.clone(),
        samples: 10_000,
        seed: 8,
        u_samples: None,
        budget: u128::MAX,
    };
    for k in 0..=3 {
        let cfg = GhkConfig {
            k,
            samples: 1000,
            u_samples: if k >= 2 { Some(20) } else { None },
            ..base.clone()
        };
        let r = dynamics::ghk_estimate(&sys, &SampledFunction::Constant(1.0), &cfg).map_err(err)?;
        ensure((r.value - 1.0).abs() <= 1e-12, || format!("constant, k = {k}: {}", r.value))?;
    }
    let cos = SampledFunction::Cosine(vec![1]);
    let one = dynamics::ghk_estimate(&sys, &cos, &GhkConfig { k: 1, ..base.clone() }).map_err(err)?;
    ensure(one.value <= 0.05, || format!("k = 1: {}", one.value))?;
    let two = dynamics::ghk_estimate(&sys, &cos, &GhkConfig { k: 2, u_samples: Some(100), ..base }).map_err(err)?;
    // Fourier side: the fourth power of the order-2 seminorm is the sum of
    // |c_n|^4 over the coefficients 1/2 at n = 1 and n = -1.
    let oracle = (2.0 * 0.5f64.powi(4)).powf(0.25);
    ensure((two.value - oracle).abs() <= 0.05, || format!("k = 2: {} vs {oracle}", two.value))?;
    Ok(format!("constant 1 for k <= 3; cos: k=1 {:.4}, k=2 {:.4} (oracle {oracle:.4})", one.value, two.value))
}

fn criterion_9() -> Check {
    let f = Field::gaussian();
    let lattice = ideal_lattice(&Ideal::principal(&AlgInt::new(1, 1), f).map_err(err)?).map_err(err)?;
    let mut parts = Vec::new();
    for side in [100i64, 400, 1600] {
        let w = Window::new(vec![0, 0], vec![side - 1, side - 1]).map_err(err)?;
        let d = largeness::density_profile(&lattice, &[w], u128::MAX).map_err(err)?[0];
        let dev = (d.as_f64() - 0.5).abs();
        ensure(dev <= 2.0 / side as f64, || format!("side {side}: density {}", d.as_f64()))?;
        parts.push(format!("{side}: {}", d.as_f64()));
    }
    Ok(parts.join(", "))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = intersective::run(args.iter().copied(), &mut out, &mut err);
    (code, out)
}

fn criterion_10() -> Check {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/configs");
    let mut lines = Vec::new();
    for cfg in ["heisenberg_squares.json", "kronecker_squares.json"] {
        let path = format!("{dir}/{cfg}");
        let mut outputs = Vec::new();
        for threads in ["1", "4", "16", "1", "4", "16"] {
            let (code, out) = run_cli(&["intersective", "--threads", threads, "scan-returns", "--config", &path]);
            ensure(code == 0, || format!("{cfg} exited {code}"))?;
            outputs.push(out);
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || format!("{cfg}: outputs differ"))?;
        lines.push(format!("{cfg} ({} bytes)", outputs[0].len()));
    }
    Ok(format!("byte-identical for threads 1, 4, 16 twice: {}", lines.join(", ")))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Check); 10] = [
        (1, "Gaussian x^2+1 scan", criterion_1),
        (2, "falsification soundness", criterion_2),
        (3, "classical family", criterion_3),
        (4, "three-quadratics pipeline", criterion_4),
        (5, "oracle equivalence", criterion_5),
        (6, "decomposition identity", criterion_6),
        (7, "Kronecker single recurrence", criterion_7),
        (8, "seminorm estimator sanity", criterion_8),
        (9, "density law", criterion_9),
        (10, "determinism", criterion_10),
    ];
    let mut unexpected = 0;
    for (n, name, check) in criteria {
        let start = Instant::now();
        let result = check();
        let t = start.elapsed();
        match result {
            Ok(detail) => println!("criterion {n:>2} {name}: PASS ({detail}) [{t:.2?}]"),
            Err(detail) if KNOWN_RED.contains(&n) => {
                println!("criterion {n:>2} {name}: FAIL (known, see ledger) ({detail}) [{t:.2?}]")
            }
            Err(detail) => {
                unexpected += 1;
                println!("criterion {n:>2} {name}: FAIL ({detail}) [{t:.2?}]");
            }
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} acceptance criteria failed");
        std::process::exit(1);
    }
}
