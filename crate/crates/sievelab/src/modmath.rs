//! Exact integer and modular arithmetic substrate.
//!
//! Everything here is deliberately elementary: trial-division factoring
//! with a 2-3-5 wheel, double-width modular products, extended Euclid.
//! Moduli are capped below 2^63 so that all intermediates fit in `u128`
//! and every result is exact.

/// An integer together with its complete prime factorization.
///
/// `factors` is sorted by prime and every exponent is positive; the empty
/// list represents 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    pub value: u64,
    pub factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    /// Euler's totient φ(n) = Π p^(e-1)(p-1).
    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * p.pow(e - 1) * (p - 1))
    }

    /// ω(n), the number of distinct prime divisors.
    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    /// τ(n), the number of divisors, Π (e+1).
    pub fn tau(&self) -> u64 {
        self.factors.iter().fold(1u64, |acc, &(_, e)| acc * (e as u64 + 1))
    }

    /// All divisors of the value, in ascending order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let prev = std::mem::take(&mut divs);
            for &d in &prev {
                let mut pe = 1u64;
                for _ in 0..=e {
                    divs.push(d * pe);
                    pe = pe.saturating_mul(p);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Factor `n` by trial division with a 2-3-5 wheel.
///
/// `factorize(1)` has an empty factor list. Panics on `n = 0`.
pub fn factorize(n: u64) -> FactoredInteger {
    assert!(n >= 1, "factorize: n must be positive");
    let mut factors = Vec::new();
    let mut rem = n;
    for p in [2u64, 3, 5] {
        if rem % p == 0 {
            let mut e = 0;
            while rem % p == 0 {
                rem /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    // Increments cycling through the residues coprime to 30.
    const WHEEL: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut p = 7u64;
    let mut w = 0usize;
    while p <= rem / p {
        if rem % p == 0 {
            let mut e = 0;
            while rem % p == 0 {
                rem /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += WHEEL[w];
        w = (w + 1) % WHEEL.len();
    }
    if rem > 1 {
        factors.push((rem, 1));
    }
    FactoredInteger { value: n, factors }
}

/// Deterministic primality test by trial division (desk scale).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5] {
        if n % p == 0 {
            return n == p;
        }
    }
    const WHEEL: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut p = 7u64;
    let mut w = 0usize;
    while p <= n / p {
        if n % p == 0 {
            return false;
        }
        p += WHEEL[w];
        w = (w + 1) % WHEEL.len();
    }
    true
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// (a * b) mod m without overflow, for m < 2^63.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// base^exp mod m by binary exponentiation with double-width intermediates.
///
/// Panics on m = 0 or m >= 2^63; exponent 0 gives 1 mod m.
pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    assert!(m >= 1, "mod_pow: modulus must be >= 1");
    assert!(m < 1 << 63, "mod_pow: modulus must be < 2^63");
    let mut b = base % m;
    let mut acc = 1 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse of `a` modulo `m`, or `None` when gcd(a, m) > 1.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    assert!(m >= 1, "mod_inverse: modulus must be >= 1");
    if m == 1 {
        return Some(0);
    }
    let mut t: i128 = 0;
    let mut new_t: i128 = 1;
    let mut r: i128 = m as i128;
    let mut new_r: i128 = (a % m) as i128;
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    if t < 0 {
        t += m as i128;
    }
    Some(t as u64)
}

/// Combine congruences x ≡ rᵢ (mod mᵢ) with pairwise coprime moduli into
/// the unique (residue, product) pair. Panics on non-coprime moduli.
pub fn crt_combine(congruences: &[(u64, u64)]) -> (u64, u64) {
    assert!(!congruences.is_empty(), "crt_combine: empty input");
    let (mut x, mut modulus) = (0u64, 1u64);
    for &(r, m) in congruences {
        assert!(m >= 1, "crt_combine: modulus must be >= 1");
        let r = r % m;
        // x' = x + modulus * ((r - x) * modulus^{-1} mod m)
        let inv = mod_inverse(modulus % m, m)
            .expect("crt_combine: moduli must be pairwise coprime");
        let diff = (r + m - x % m) % m;
        let t = mul_mod(diff, inv, m);
        x += modulus * t;
        modulus = modulus
            .checked_mul(m)
            .expect("crt_combine: modulus product overflows u64");
    }
    (x, modulus)
}

/// Compare a^pa with b^pb, exactly when both bases are integral (big
/// integer powers), otherwise in the log domain.
///
/// Branch thresholds like Q vs N^(7/24) reduce to such comparisons and
/// must not be decided by `powf` rounding at exact seams.
pub fn cmp_powers(a: f64, pa: u32, b: f64, pb: u32) -> std::cmp::Ordering {
    use num_bigint::BigUint;
    let integral = |x: f64| x >= 0.0 && x == x.trunc() && x < 9.0e15;
    if integral(a) && integral(b) {
        let lhs = BigUint::from(a as u64).pow(pa);
        let rhs = BigUint::from(b as u64).pow(pb);
        lhs.cmp(&rhs)
    } else {
        let lhs = pa as f64 * a.ln();
        let rhs = pb as f64 * b.ln();
        lhs.partial_cmp(&rhs).expect("finite comparands")
    }
}

/// Largest integer r with r^k <= n.
pub fn integer_kth_root(n: u64, k: u32) -> u64 {
    assert!(k >= 1);
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u64;
    // Fix up float error with exact checks.
    while r > 0 && (r as u128).pow(k) > n as u128 {
        r -= 1;
    }
    while ((r + 1) as u128).pow(k) <= n as u128 {
        r += 1;
    }
    r
}
