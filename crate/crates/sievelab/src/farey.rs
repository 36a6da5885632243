//! Geometry of Farey fractions with k-th-power denominators: the spacing
//! count K(Δ), window counts P(α), Dirichlet approximation by continued
//! fractions, the lattice count Π(δ, y), and the closed-form right-hand
//! sides it feeds.
//!
//! Points, window widths and approximation errors are exact rationals;
//! membership tests never go through floats. Gaps between neighbouring
//! points can sit orders of magnitude below Δ, where double precision
//! would misclassify the window edges.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::modmath::gcd;

/// Exact fraction type for point geometry. i128 components leave ample
/// headroom for cross-multiplied comparisons at desk scale.
pub type Rat = Ratio<i128>;

pub fn rat(n: i128, d: i128) -> Rat {
    Ratio::new(n, d)
}

/// The Farey fractions a/q with q a k-th power in (Q₀, 2Q₀], 1 ≤ a ≤ q,
/// gcd(a, q) = 1, reduced into [0, 1) and sorted.
pub fn farey_points(q0: f64, k: u32) -> Vec<Rat> {
    let moduli = crate::sieve_eval::dyadic_moduli(q0, k);
    let expected: u128 = moduli.iter().map(|&q| q as u128).sum();
    assert!(expected <= 10_000_000, "farey_points: point count guard exceeded");
    let mut points = Vec::new();
    for &q in &moduli {
        for a in 1..=q {
            if gcd(a, q) == 1 {
                points.push(rat((a % q) as i128, q as i128));
            }
        }
    }
    points.sort_unstable();
    points
}

fn frac_mod_one(x: Rat) -> Rat {
    x - x.floor()
}

/// Count points within closed circular distance Δ of α (distance to the
/// nearest integer metric).
pub fn p_alpha_points(points: &[Rat], alpha: Rat, delta: Rat) -> u64 {
    assert!(delta > Rat::zero() && delta <= rat(1, 2));
    if points.is_empty() {
        return 0;
    }
    if delta == rat(1, 2) {
        return points.len() as u64;
    }
    let a = frac_mod_one(alpha);
    let lo = a - delta;
    let hi = a + delta;
    let count_range = |l: Rat, h: Rat| -> u64 {
        // points with l ≤ p ≤ h, via binary search on the sorted slice
        let start = points.partition_point(|p| *p < l);
        let end = points.partition_point(|p| *p <= h);
        (end - start) as u64
    };
    if lo < Rat::zero() {
        count_range(Rat::zero(), hi) + count_range(lo + Rat::from_integer(1), rat(1, 1))
    } else if hi >= Rat::from_integer(1) {
        count_range(lo, rat(1, 1)) + count_range(Rat::zero(), hi - Rat::from_integer(1))
    } else {
        count_range(lo, hi)
    }
}

/// P(α) for the cubic (or general-k) Farey system at Q₀.
pub fn p_alpha(q0: f64, k: u32, alpha: Rat, delta: Rat) -> u64 {
    p_alpha_points(&farey_points(q0, k), alpha, delta)
}

/// K(Δ) = max over α of the number of points with ‖α_r − α‖ ≤ Δ.
///
/// The maximum is attained with the left window edge on a point, so a
/// sweep over windows [p, p + 2Δ] anchored at each point is exact.
pub fn spacing_count(points: &[Rat], delta: Rat) -> u64 {
    assert!(delta > Rat::zero() && delta <= rat(1, 2));
    if points.is_empty() {
        return 0;
    }
    if delta == rat(1, 2) {
        return points.len() as u64;
    }
    let width = delta * 2;
    let n = points.len();
    let mut best = 0u64;
    for i in 0..n {
        let lo = points[i];
        let hi = lo + width;
        // count points in [lo, hi] circularly
        let in_main = points.partition_point(|p| *p <= hi) - i;
        let wrapped = if hi >= Rat::from_integer(1) {
            points.partition_point(|p| *p <= hi - Rat::from_integer(1))
        } else {
            0
        };
        best = best.max((in_main + wrapped) as u64);
    }
    best.min(n as u64)
}

/// A Dirichlet approximation α = b/r + z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletApprox {
    pub b: i64,
    pub r: u64,
    pub z: f64,
}

/// Decompose α as b/r + z with r ≤ τ, gcd(b, r) = 1 and |z| ≤ 1/(rτ),
/// via continued-fraction convergents of the exact binary value of α.
pub fn dirichlet_approx(alpha: f64, tau: f64) -> DirichletApprox {
    assert!(tau >= 1.0, "dirichlet_approx: tau must be >= 1");
    assert!(alpha.is_finite());
    let exact = BigRational::from_float(alpha).expect("finite float");
    let tau_floor = BigInt::from(tau.floor() as i64);

    // Convergents by the Euclidean recurrence on the exact binary fraction.
    // The first convergent ⌊α⌋/1 is always admissible (τ ≥ 1); we keep the
    // last convergent whose denominator stays ≤ ⌊τ⌋. The denominator of the
    // next one then exceeds τ, which gives |z| ≤ 1/(r·τ).
    let mut num = exact.numer().clone();
    let mut den = exact.denom().clone();
    let a0 = num_integer::Integer::div_floor(&num, &den);
    let (mut p_prev, mut q_prev) = (BigInt::from(1), BigInt::from(0));
    let (mut p_cur, mut q_cur) = (a0.clone(), BigInt::from(1));
    let rem = &num - &a0 * &den;
    num = std::mem::replace(&mut den, rem);
    while !den.is_zero() {
        let a = num_integer::Integer::div_floor(&num, &den);
        let next_p = &a * &p_cur + &p_prev;
        let next_q = &a * &q_cur + &q_prev;
        if next_q > tau_floor {
            break;
        }
        p_prev = std::mem::replace(&mut p_cur, next_p);
        q_prev = std::mem::replace(&mut q_cur, next_q);
        let rem = &num - &a * &den;
        num = std::mem::replace(&mut den, rem);
    }
    let b = p_cur.to_i64().expect("convergent numerator fits i64");
    let r = q_cur.to_u64().expect("convergent denominator fits u64");
    let z = alpha - b as f64 / r as f64;
    DirichletApprox { b, r, z }
}

/// Verify the three Dirichlet constraints exactly for a given α (as the
/// exact value of the float) and rational τ.
pub fn dirichlet_constraints_hold(alpha: f64, tau_num: u64, tau_den: u64, d: &DirichletApprox) -> bool {
    let exact = BigRational::from_float(alpha).expect("finite");
    let tau = BigRational::new(BigInt::from(tau_num), BigInt::from(tau_den));
    let r = BigRational::from_integer(BigInt::from(d.r));
    let b_over_r = BigRational::new(BigInt::from(d.b), BigInt::from(d.r));
    let z_exact = &exact - &b_over_r;
    let coprime = gcd(d.b.unsigned_abs() % d.r, d.r) == 1;
    // r ≤ τ and |z|·r·τ ≤ 1
    coprime && r <= tau && z_exact.abs() * &r * &tau <= BigRational::from_integer(BigInt::from(1))
}

/// A target α = b/r + z with its governing parameters.
///
/// Constraints: r ≤ τ, gcd(b, r) = 1, |z| ≤ 1/(rτ) and 1 ≤ τ ≤ Δ^(-1/2);
/// paths that assume the reduced branch additionally require z ≥ Δ.
#[derive(Debug, Clone)]
pub struct FareyContext {
    pub q0: f64,
    pub k: u32,
    pub tau: Rat,
    pub delta: Rat,
    pub b: i64,
    pub r: u64,
    pub z: Rat,
}

impl FareyContext {
    pub fn new(q0: f64, tau: Rat, delta: Rat, b: i64, r: u64, z: Rat) -> Self {
        let ctx = FareyContext { q0, k: 3, tau, delta, b, r, z };
        ctx.assert_valid();
        ctx
    }

    fn assert_valid(&self) {
        assert!(self.r >= 1);
        assert!(self.tau >= Rat::from_integer(1), "need τ ≥ 1");
        assert!(
            self.tau * self.tau * self.delta <= Rat::from_integer(1),
            "need τ ≤ Δ^(-1/2)"
        );
        assert!(Rat::from_integer(self.r as i128) <= self.tau, "need r ≤ τ");
        assert_eq!(gcd(self.b.unsigned_abs() % self.r, self.r), 1, "need gcd(b, r) = 1");
        let abs_z = if self.z < Rat::zero() { -self.z } else { self.z };
        assert!(
            abs_z * Rat::from_integer(self.r as i128) * self.tau <= Rat::from_integer(1),
            "need |z| ≤ 1/(rτ)"
        );
    }

    /// α = b/r + z.
    pub fn alpha(&self) -> Rat {
        rat(self.b as i128, self.r as i128) + self.z
    }

    pub fn z_f64(&self) -> f64 {
        self.z.to_f64().unwrap()
    }

    pub fn delta_f64(&self) -> f64 {
        self.delta.to_f64().unwrap()
    }
}

/// Π(δ, y): pairs (q, m) with q an integer in
/// I = [y^(1/3) − c₆δ/Q₀^(2/3), y^(1/3) + c₆δ/Q₀^(2/3)], m a nonzero
/// integer in J = [(y−4δ)rz, (y+4δ)rz], and m ≡ −b·q³ (mod r).
///
/// δ must satisfy Q₀Δ/z ≤ δ ≤ Q₀ (checked with 1e-9 relative slack).
pub fn pi_count(ctx: &FareyContext, delta_param: f64, y: f64, c6: f64) -> u64 {
    check_p10(ctx, delta_param);
    let z = ctx.z_f64();
    let rz = ctx.r as f64 * z;
    let w = c6 * delta_param / ctx.q0.powf(2.0 / 3.0);
    let center = y.cbrt();
    let q_lo = (center - w).ceil() as i64;
    let q_hi = (center + w).floor() as i64;
    let j_lo = (y - 4.0 * delta_param) * rz;
    let j_hi = (y + 4.0 * delta_param) * rz;
    let mut total = 0u64;
    for q in q_lo..=q_hi {
        if q < 1 {
            continue;
        }
        let residue = (-(ctx.b as i128) * (q as i128).pow(3)).rem_euclid(ctx.r as i128) as i64;
        total += count_congruent_in_interval(j_lo, j_hi, residue, ctx.r as i64, true);
    }
    total
}

fn check_p10(ctx: &FareyContext, delta_param: f64) {
    let z = ctx.z_f64();
    assert!(z > 0.0, "pi_count: needs z > 0");
    let lower = ctx.q0 * ctx.delta_f64() / z;
    assert!(
        delta_param >= lower * (1.0 - 1e-9) && delta_param <= ctx.q0 * (1.0 + 1e-9),
        "pi_count: δ = {} outside [Q0Δ/z, Q0] = [{}, {}]",
        delta_param,
        lower,
        ctx.q0
    );
}

/// Integers m ∈ [a, b] with m ≡ c (mod r), optionally excluding m = 0.
fn count_congruent_in_interval(a: f64, b: f64, c: i64, r: i64, exclude_zero: bool) -> u64 {
    if b < a {
        return 0;
    }
    let n_lo = ((a - c as f64) / r as f64).ceil() as i64;
    let n_hi = ((b - c as f64) / r as f64).floor() as i64;
    if n_hi < n_lo {
        return 0;
    }
    let mut count = (n_hi - n_lo + 1) as u64;
    if exclude_zero && c.rem_euclid(r) == 0 && a <= 0.0 && 0.0 <= b {
        count = count.saturating_sub(1);
    }
    count
}

/// ∫_{Q₀}^{2Q₀} Π(δ, y) dy, integrated exactly along the step structure.
///
/// Π changes only where an integer q crosses the edge of I (y = (q ∓ w)³)
/// or an integer m crosses the edge of J (y = m/(rz) ∓ 4δ); the cells in
/// between are integrated by midpoint evaluation.
pub fn pi_count_integral(ctx: &FareyContext, delta_param: f64, c6: f64) -> f64 {
    check_p10(ctx, delta_param);
    let q0 = ctx.q0;
    let z = ctx.z_f64();
    let rz = ctx.r as f64 * z;
    let w = c6 * delta_param / q0.powf(2.0 / 3.0);

    let mut cuts = vec![q0, 2.0 * q0];
    let q_min = ((q0.cbrt() - w).floor() as i64 - 1).max(1);
    let q_max = ((2.0 * q0).cbrt() + w).ceil() as i64 + 1;
    for q in q_min..=q_max {
        for s in [-w, w] {
            let edge = q as f64 - s;
            if edge > 0.0 {
                let y = edge * edge * edge;
                if y > q0 && y < 2.0 * q0 {
                    cuts.push(y);
                }
            }
        }
    }
    let m_min = ((q0 - 4.0 * delta_param) * rz).floor() as i64 - 1;
    let m_max = ((2.0 * q0 + 4.0 * delta_param) * rz).ceil() as i64 + 1;
    for m in m_min..=m_max {
        for s in [-4.0 * delta_param, 4.0 * delta_param] {
            let y = m as f64 / rz + s;
            if y > q0 && y < 2.0 * q0 {
                cuts.push(y);
            }
        }
    }
    cuts.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    let mut total = 0.0f64;
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        total += pi_count(ctx, delta_param, mid, c6) as f64 * (b - a);
    }
    total
}

/// 1 + Δ^(-ε)·(Q₀^(4/3)·Δ + Q₀·r·z); requires the reduced branch z ≥ Δ.
pub fn prop1_rhs(ctx: &FareyContext, eps: f64) -> f64 {
    assert!(ctx.z >= ctx.delta, "prop1_rhs: requires z ≥ Δ");
    let d = ctx.delta_f64();
    let z = ctx.z_f64();
    1.0 + d.powf(-eps) * (ctx.q0.powf(4.0 / 3.0) * d + ctx.q0 * ctx.r as f64 * z)
}

/// Δ^(-ε)·(Q₀^(4/3)Δ + Q₀^(1/3)Δ·r^(-1/3)·z^(-1) + Δ^(-1/2)·(rz)^(1/2));
/// requires z ≥ Δ.
pub fn prop2_rhs(ctx: &FareyContext, eps: f64) -> f64 {
    assert!(ctx.z >= ctx.delta, "prop2_rhs: requires z ≥ Δ");
    let d = ctx.delta_f64();
    let z = ctx.z_f64();
    let r = ctx.r as f64;
    d.powf(-eps)
        * (ctx.q0.powf(4.0 / 3.0) * d
            + ctx.q0.powf(1.0 / 3.0) * d * r.powf(-1.0 / 3.0) / z
            + d.powf(-0.5) * (r * z).sqrt())
}

/// The optimal (τ, Δ) choice for the cubic analysis at given N, Q₀:
/// τ = N^(6/5)·Q₀^(-4/5), Δ = 1/N when N^(7/8) ≤ Q₀ ≤ N^(3/2), and
/// τ = Q₀^(4/7), Δ = Q₀^(-8/7) when Q₀ < N^(7/8).
///
/// The branch threshold is decided exactly (integer power comparison when
/// both arguments are integral). Panics when Q₀ > N^(3/2).
pub fn choose_tau_delta(n: f64, q0: f64) -> (f64, f64) {
    assert!(q0 >= 1.0 && n >= 1.0);
    assert!(
        crate::modmath::cmp_powers(q0, 2, n, 3) != std::cmp::Ordering::Greater,
        "choose_tau_delta: requires Q0 ≤ N^(3/2)"
    );
    let upper_branch = crate::modmath::cmp_powers(q0, 8, n, 7) != std::cmp::Ordering::Less;
    let (tau, delta) = if upper_branch {
        (n.powf(1.2) * q0.powf(-0.8), 1.0 / n)
    } else {
        (q0.powf(4.0 / 7.0), q0.powf(-8.0 / 7.0))
    };
    assert!(
        tau <= delta.powf(-0.5) * (1.0 + 1e-12) && tau >= 1.0 - 1e-12,
        "(P1) must hold for the chosen pair"
    );
    (tau, delta)
}

/// Best decomposition found when maximizing P(b/r + z) over the admissible
/// triples of the spacing lemma.
#[derive(Debug, Clone)]
pub struct DecompositionMax {
    pub p_max: u64,
    pub b: i64,
    pub r: u64,
    pub z: Rat,
}

/// max over r ≤ τ, gcd(b, r) = 1, Δ ≤ z ≤ 1/(τr) of P(b/r + z), exact.
///
/// For fixed (b, r) the count only changes when a window edge crosses a
/// point, so z ranges over the finite candidate set {Δ, 1/(τr)} ∪
/// {p − b/r ∓ Δ mod 1}.
pub fn lemma2_max_p(points: &[Rat], delta: Rat, tau: i64) -> DecompositionMax {
    assert!(tau >= 1);
    let mut best = DecompositionMax { p_max: 0, b: 0, r: 1, z: delta };
    for r in 1..=tau {
        let z_hi = rat(1, tau as i128 * r as i128);
        if delta > z_hi {
            continue;
        }
        for b in 0..r.max(1) {
            if r > 1 && gcd(b as u64, r as u64) != 1 {
                continue;
            }
            let base = rat(b as i128, r as i128);
            let mut candidates: Vec<Rat> = vec![delta, z_hi];
            for &p in points {
                for edge in [p - base - delta, p - base + delta] {
                    let z = frac_mod_one(edge);
                    if z >= delta && z <= z_hi {
                        candidates.push(z);
                    }
                }
            }
            candidates.sort_unstable();
            candidates.dedup();
            for &z in &candidates {
                let count = p_alpha_points(points, base + z, delta);
                if count > best.p_max {
                    best = DecompositionMax { p_max: count, b: b as i64, r: r as u64, z };
                }
            }
        }
    }
    best
}
