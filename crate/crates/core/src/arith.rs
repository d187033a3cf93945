//! Small integer and floating-point helpers shared across modules.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all of `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes `<= limit` by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Residue of a big integer modulo a machine-size modulus, in `[0, m)`.
pub(crate) fn big_mod_u64(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits")
}

/// Euler's criterion, `p` an odd prime: 1, p-1 or 0.
pub(crate) fn legendre(a: u64, p: u64) -> u64 {
    pow_mod(a % p, (p - 1) / 2, p)
}

/// Square root of a quadratic residue modulo an odd prime (Tonelli-Shanks).
pub(crate) fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if legendre(a, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while legendre(z, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

pub(crate) fn is_squarefree(d: i64) -> bool {
    let mut n = d.unsigned_abs();
    let mut f = 2u64;
    while f.saturating_mul(f) <= n {
        if n % f == 0 {
            n /= f;
            if n % f == 0 {
                return false;
            }
        }
        f += 1;
    }
    true
}

/// SplitMix64 finalizer.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based hash of a seed and a lattice point.
pub(crate) fn point_hash(seed: u64, point: &[i64]) -> u64 {
    let mut h = mix64(seed);
    for &c in point {
        h = mix64(h ^ c as u64);
    }
    h
}

/// Uniform value in `[0, 1)` from the top 53 bits of a hash.
pub(crate) fn unit_from_hash(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Fractional part in `[0, 1)`.
pub(crate) fn frac(x: f64) -> f64 {
    let f = x - libm::floor(x);
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// `frac(n * alpha)` treating `alpha` as exact; the rounding error of the
/// product is recovered with a fused multiply-add.
pub(crate) fn frac_mul(n: i64, alpha: f64) -> f64 {
    let nf = n as f64;
    let p = nf * alpha;
    let err = libm::fma(nf, alpha, -p);
    frac(frac(p) + err)
}

/// Distance to the nearest integer.
pub(crate) fn dist_to_int(x: f64) -> f64 {
    let f = frac(x);
    if f > 0.5 {
        1.0 - f
    } else {
        f
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }
    pub fn add(self, o: Self) -> Self {
        Complex::new(self.re + o.re, self.im + o.im)
    }
    pub fn sub(self, o: Self) -> Self {
        Complex::new(self.re - o.re, self.im - o.im)
    }
    pub fn mul(self, o: Self) -> Self {
        Complex::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
    pub fn div(self, o: Self) -> Self {
        let den = o.re * o.re + o.im * o.im;
        Complex::new(
            (self.re * o.re + self.im * o.im) / den,
            (self.im * o.re - self.re * o.im) / den,
        )
    }
    pub fn abs(self) -> f64 {
        libm::hypot(self.re, self.im)
    }
}

/// All complex roots of a polynomial with complex coefficients (lowest degree
/// first) by Durand-Kerner iteration. Approximate; callers verify exactly.
pub(crate) fn complex_roots(coeffs: &[Complex]) -> Vec<Complex> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let monic: Vec<Complex> = coeffs.iter().map(|&c| c.div(lead)).collect();
    let radius = 1.0
        + monic[..n]
            .iter()
            .map(|c| c.abs())
            .fold(0.0f64, f64::max);
    let seed = Complex::new(0.4, 0.9);
    let mut z: Vec<Complex> = Vec::with_capacity(n);
    let mut w = Complex::new(radius, 0.0);
    for _ in 0..n {
        z.push(w);
        w = w.mul(seed);
    }
    let eval = |x: Complex| {
        let mut acc = Complex::new(1.0, 0.0);
        for c in monic[..n].iter().rev() {
            acc = acc.mul(x).add(*c);
        }
        acc
    };
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den = den.mul(z[i].sub(z[j]));
                }
            }
            if den.abs() == 0.0 {
                den = Complex::new(1e-12, 0.0);
            }
            let step = eval(z[i]).div(den);
            z[i] = z[i].sub(step);
            delta = delta.max(step.abs());
        }
        if delta < 1e-14 * radius {
            break;
        }
    }
    z
}
