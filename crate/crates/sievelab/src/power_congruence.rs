//! Counting and enumerating solutions of x^k·g ≡ l (mod m).
//!
//! The prime-power case is handled by explicit level-by-level lifting of
//! the solution set of f(x) = x^k − a: a nonsingular solution (f'(x) ≢ 0
//! mod p) lifts uniquely, a singular one lifts to p solutions exactly when
//! p^(e+1) | f(x) and otherwise dies. This is exact for every p, k and a,
//! including p = 2 where the unit group is not cyclic. Composite moduli
//! are assembled by the Chinese remainder theorem.
//!
//! A second, independent route for the kernel counts {x : x^k ≡ 1} goes
//! through the structure of the unit group ((Z/p^e)^* is cyclic for odd p,
//! C2 × C2^(e-2) for p = 2, e ≥ 3); both routes are cross-checked in the
//! tests, and the exhaustive-scan oracle checks them both.

use crate::modmath::{self, factorize, gcd, mod_inverse, mod_pow, mul_mod, FactoredInteger};

/// Root count for x^k·g ≡ l (mod m), with the solution list when requested.
#[derive(Debug, Clone)]
pub struct RootCount {
    pub modulus: FactoredInteger,
    pub k: u64,
    pub g: u64,
    pub l: u64,
    pub count: u64,
    pub roots: Option<Vec<u64>>,
}

/// Number of x mod p^e with x^k ≡ a (mod p^e), for p prime and gcd(a, p) = 1.
///
/// Solves mod p by direct scan, then lifts the solution set one level at a
/// time with the singular/nonsingular case split on f(x) = x^k − a.
pub fn count_power_roots_prime_power(k: u64, a: u64, p: u64, e: u32) -> u64 {
    power_roots_prime_power(k, a, p, e).len() as u64
}

/// The solutions themselves, sorted, same preconditions as the count.
pub fn power_roots_prime_power(k: u64, a: u64, p: u64, e: u32) -> Vec<u64> {
    assert!(modmath::is_prime(p), "count_power_roots: p = {} is not prime", p);
    assert!(e >= 1, "count_power_roots: exponent must be >= 1");
    assert_eq!(gcd(a % p, p), 1, "count_power_roots: gcd(a, p) must be 1");

    // Base level: scan residues mod p.
    let mut sols: Vec<u64> = (0..p).filter(|&x| mod_pow(x, k, p) == a % p).collect();
    let mut pe = p; // current modulus p^level
    for _ in 1..e {
        let pe_next = pe * p;
        let a_next = a % pe_next;
        let mut lifted = Vec::with_capacity(sols.len());
        for &x in &sols {
            let fx = (mod_pow(x, k, pe_next) + pe_next - a_next) % pe_next;
            let deriv = mul_mod(k % p, mod_pow(x, k - 1, p), p);
            if deriv != 0 {
                // Nonsingular: unique lift x - f(x)/f'(x).
                debug_assert_eq!(fx % pe, 0);
                let t = mul_mod(
                    (fx / pe) % p,
                    p - mod_inverse(deriv, p).expect("deriv invertible"),
                    p,
                );
                lifted.push(x + t * pe);
            } else if fx == 0 {
                // Singular and already vanishing mod p^(e+1): p lifts.
                for t in 0..p {
                    lifted.push(x + t * pe);
                }
            }
            // Singular with fx != 0: no lift.
        }
        lifted.sort_unstable();
        sols = lifted;
        pe = pe_next;
    }
    sols
}

/// |ker σ_k| on (Z/p^e)^*, i.e. the number of x with x^k ≡ 1 (mod p^e).
///
/// Computed exactly from the unit-group structure; agrees with
/// `count_power_roots_prime_power(k, 1, p, e)` (asserted in tests).
pub fn kernel_size(k: u64, p: u64, e: u32) -> u64 {
    assert!(modmath::is_prime(p), "kernel_size: p = {} is not prime", p);
    assert!(e >= 1, "kernel_size: exponent must be >= 1");
    assert!(k >= 1, "kernel_size: power must be >= 1");
    if p == 2 {
        match e {
            1 => 1,
            2 => gcd(k, 2),
            _ => gcd(k, 2) * gcd(k, 1 << (e - 2)),
        }
    } else {
        // (Z/p^e)^* is cyclic of order p^(e-1)(p-1).
        gcd(k, p.pow(e - 1) * (p - 1))
    }
}

/// δ_t(m, l): the number of x mod m with x^k·g ≡ l (mod m), for gcd(l, m) = 1.
///
/// Zero whenever gcd(g, m) > 1; otherwise reduces to x^k ≡ ḡl per prime
/// power and multiplies the counts.
pub fn delta_t(k: u64, g: u64, m: u64, l: u64) -> u64 {
    assert!(m >= 1, "delta_t: modulus must be >= 1");
    assert_eq!(gcd(l, m), 1, "delta_t: gcd(l, m) must be 1");
    if m == 1 {
        return 1;
    }
    if gcd(g % m, m) != 1 {
        return 0;
    }
    let fm = factorize(m);
    let mut count = 1u64;
    for &(p, e) in &fm.factors {
        let pe = p.pow(e);
        let g_inv = mod_inverse(g % pe, pe).expect("gcd(g, p^e) = 1");
        let target = mul_mod(g_inv, l % pe, pe);
        count *= count_power_roots_prime_power(k, target, p, e);
        if count == 0 {
            break;
        }
    }
    count
}

/// Full root data for x^k·g ≡ l (mod m): count plus sorted solution list.
pub fn delta_t_with_roots(k: u64, g: u64, m: u64, l: u64) -> RootCount {
    let count = delta_t(k, g, m, l);
    let roots = if m <= 10_000_000 {
        Some(enumerate_power_roots(k, g, m, l))
    } else {
        None
    };
    if let Some(r) = &roots {
        debug_assert_eq!(r.len() as u64, count);
    }
    RootCount { modulus: factorize(m), k, g, l, count, roots }
}

/// All x in [0, m) with x^k·g ≡ l (mod m), by exhaustive scan.
///
/// This is the oracle path; it refuses m > 10^7 to keep runs bounded.
pub fn enumerate_power_roots(k: u64, g: u64, m: u64, l: u64) -> Vec<u64> {
    assert!(m >= 1 && m <= 10_000_000, "enumerate_power_roots: m out of range");
    let l = l % m;
    (0..m)
        .filter(|&x| mul_mod(mod_pow(x, k, m), g % m, m) == l)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn scan_count(k: u64, a: u64, modulus: u64) -> u64 {
        (0..modulus).filter(|&x| mod_pow(x, k, modulus) == a % modulus).count() as u64
    }

    #[test]
    fn prime_power_examples() {
        assert_eq!(count_power_roots_prime_power(3, 1, 5, 1), 1);
        assert_eq!(scan_count(3, 1, 5), 1);
        assert_eq!(count_power_roots_prime_power(2, 1, 2, 3), 4);
        assert_eq!(scan_count(2, 1, 8), 4);
        assert_eq!(count_power_roots_prime_power(3, 1, 7, 2), 3);
        assert_eq!(scan_count(3, 1, 49), 3);
    }

    #[test]
    fn lifting_matches_scan_broadly() {
        for &p in &[2u64, 3, 5, 7, 11] {
            for k in 1..=9u64 {
                let mut e = 1u32;
                while p.pow(e) <= 20_000 {
                    let pe = p.pow(e);
                    for a in (1..p.min(6)).chain([p + 1, 2 * p + 1]) {
                        if gcd(a % p, p) != 1 || a >= pe {
                            continue;
                        }
                        assert_eq!(
                            count_power_roots_prime_power(k, a, p, e),
                            scan_count(k, a, pe),
                            "k={} a={} p={} e={}",
                            k, a, p, e
                        );
                    }
                    e += 1;
                }
            }
        }
    }

    #[test]
    fn kernel_examples_and_cross_route() {
        // gcd(k, p-1) = 1 at e = 1 forces a trivial kernel.
        assert_eq!(kernel_size(3, 5, 1), 1);
        assert_eq!(kernel_size(2, 3, 5), 2);
        // Exhaustive scan of units mod 16 gives 8 (all odd x have x^4 ≡ 1).
        assert_eq!(kernel_size(4, 2, 4), 8);
        assert_eq!(scan_count(4, 1, 16), 8);
        // Structure formula vs the lifting path.
        for &p in &[2u64, 3, 5, 7, 13, 97] {
            for k in 1..=12u64 {
                let mut e = 1u32;
                while p.pow(e) <= 100_000 {
                    assert_eq!(
                        kernel_size(k, p, e),
                        count_power_roots_prime_power(k, 1, p, e),
                        "k={} p={} e={}",
                        k, p, e
                    );
                    e += 1;
                }
            }
        }
    }

    #[test]
    fn kernel_prime_bound_and_stability() {
        for &pi in &[2u64, 3, 5, 7, 11, 13] {
            for &p in &[2u64, 3, 5, 7, 11, 101] {
                let mut e = 1u32;
                while p.pow(e) <= 100_000 {
                    let ker = kernel_size(pi, p, e);
                    assert!(ker <= pi * pi, "kernel {} > {}^2 at p={} e={}", ker, pi, p, e);
                    if p != pi {
                        assert_eq!(ker, kernel_size(pi, p, 1), "p ∤ k case must be flat in e");
                    }
                    e += 1;
                }
            }
        }
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_t(2, 1, 8, 1), 4);
        assert_eq!(delta_t(3, 1, 7, 1), 3);
        assert_eq!(delta_t(3, 2, 4, 1), 0);
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_power_roots(1, 1, 5, 2), vec![2]);
        assert_eq!(enumerate_power_roots(2, 1, 8, 1), vec![1, 3, 5, 7]);
        assert_eq!(enumerate_power_roots(3, 1, 9, 1), vec![1, 4, 7]);
    }

    #[test]
    fn delta_matches_oracle_on_random_instances() {
        let mut rng = SplitMix64::new(0xD1CE);
        for k in 2..=5u64 {
            for _ in 0..200 {
                let m = 2 + rng.next_u64() % 499;
                let g = rng.next_u64() % m;
                let l = loop {
                    let l = 1 + rng.next_u64() % (m - 1).max(1);
                    if gcd(l, m) == 1 {
                        break l;
                    }
                };
                let fast = delta_t(k, g, m, l);
                let slow = enumerate_power_roots(k, g, m, l).len() as u64;
                assert_eq!(fast, slow, "k={} g={} m={} l={}", k, g, m, l);
            }
        }
    }

    #[test]
    fn divisor_bound_and_c6_on_samples() {
        let mut rng = SplitMix64::new(0xBEEF);
        for k in 2..=5u64 {
            for _ in 0..60 {
                let m = 2 + rng.next_u64() % 299;
                let g = 1 + rng.next_u64() % m;
                let fm = factorize(m);
                let bound = (k as f64).powi(2 * fm.omega() as i32);
                let mut sum = 0u64;
                for l in 1..=m {
                    if gcd(l % m, m) == 1 {
                        let d = delta_t(k, g, m, l % m);
                        assert!((d as f64) <= bound, "delta > k^2ω at k={} m={} l={}", k, m, l);
                        sum += d;
                    }
                }
                assert!(sum <= m, "sum of delta over units exceeds m = {}", m);
            }
        }
    }

    #[test]
    fn root_list_consistent() {
        let rc = delta_t_with_roots(3, 2, 35, 3);
        let roots = rc.roots.unwrap();
        assert_eq!(roots.len() as u64, rc.count);
        for &x in &roots {
            assert_eq!(mul_mod(mod_pow(x, 3, 35), 2, 35), 3);
        }
    }
}
