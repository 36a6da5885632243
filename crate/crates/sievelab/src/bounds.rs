//! Right-hand-side bound formulas, regime comparison, and empirical
//! constant fitting.
//!
//! Every formula is evaluated literally with all implied constants set
//! to 1; fitted constants are outputs of `fit_constant`, never inputs.
//! Regime comparisons run in the log domain so that sweeps at N = 10¹²
//! and beyond stay far from overflow.

use std::cmp::Ordering;

use crate::modmath::cmp_powers;

/// (log log 10NQ)^(k+1) · (Q^(k+1) + N + N^(1/2+ε)·Q^k) · Z.
pub fn thm1_rhs(n: f64, q: f64, k: u32, eps: f64, z: f64) -> f64 {
    assert!(n >= 1.0 && q >= 1.0 && k >= 2);
    let ll = (10.0 * n * q).ln().ln();
    ll.powi(k as i32 + 1) * thm1_rhs_core(n, q, k, eps) * z
}

/// The polynomial core Q^(k+1) + N + N^(1/2+ε)·Q^k without the doubly
/// logarithmic factor; this is what regime comparisons rank (the log-log
/// factor is treated as part of the implied constant there).
pub fn thm1_rhs_core(n: f64, q: f64, k: u32, eps: f64) -> f64 {
    q.powi(k as i32 + 1) + n + n.powf(0.5 + eps) * q.powi(k as i32)
}

/// The cubic-moduli bound: N^ε(Q⁴ + N^(9/10)Q^(6/5))Z for N^(7/24) ≤ Q ≤ √N,
/// and N·Q^(6/7+ε)·Z for Q below the seam. Rejects Q > √N.
pub fn thm2_rhs(n: f64, q: f64, eps: f64, z: f64) -> f64 {
    assert!(n >= 1.0 && q >= 1.0);
    assert!(
        cmp_powers(q, 2, n, 1) != Ordering::Greater,
        "thm2_rhs: requires Q ≤ N^(1/2)"
    );
    let (low, high) = thm2_both(n, q, eps, z);
    if cmp_powers(q, 24, n, 7) != Ordering::Less {
        high
    } else {
        low
    }
}

/// Both branch formulas (below-seam, above-seam), for seam comparisons.
pub fn thm2_both(n: f64, q: f64, eps: f64, z: f64) -> (f64, f64) {
    let low = n * q.powf(6.0 / 7.0 + eps) * z;
    let high = n.powf(eps) * (q.powi(4) + n.powf(0.9) * q.powf(1.2)) * z;
    (low, high)
}

/// (Q^(k+1) + (N·Q^(1−1/κ) + N^(1−1/κ)·Q^(1+k/κ))·N^ε)·Z with κ = 2^(k−1).
/// Rejects k < 2, where κ = 1 degenerates the formula.
pub fn zhao_rhs(n: f64, q: f64, k: u32, eps: f64, z: f64) -> f64 {
    assert!(k >= 2, "zhao_rhs: requires k ≥ 2");
    let kappa = (1u64 << (k - 1)) as f64;
    (q.powi(k as i32 + 1)
        + (n * q.powf(1.0 - 1.0 / kappa) + n.powf(1.0 - 1.0 / kappa) * q.powf(1.0 + k as f64 / kappa))
            * n.powf(eps))
        * z
}

/// The two Davenport–Halberstam style bounds ((Q^(k+1)+QN)Z, (Q^(2k)+N)Z).
pub fn classical_rhs(n: f64, q: f64, k: u32, z: f64) -> (f64, f64) {
    assert!(n >= 1.0 && q >= 1.0 && k >= 1);
    (
        (q.powi(k as i32 + 1) + q * n) * z,
        (q.powi(2 * k as i32) + n) * z,
    )
}

/// A fitted constant: the maximum lhs/rhs ratio and where it occurred.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittedConstant {
    pub c: f64,
    pub argmax: usize,
}

/// C = max lhs/rhs over the measurements. Rejects empty input and
/// non-positive rhs.
pub fn fit_constant(measurements: &[(f64, f64)]) -> FittedConstant {
    assert!(!measurements.is_empty(), "fit_constant: empty input");
    let mut best = FittedConstant { c: f64::NEG_INFINITY, argmax: 0 };
    for (i, &(lhs, rhs)) in measurements.iter().enumerate() {
        assert!(rhs > 0.0, "fit_constant: rhs must be positive");
        let ratio = lhs / rhs;
        if ratio > best.c {
            best = FittedConstant { c: ratio, argmax: i };
        }
    }
    best
}

/// Everything evaluated at one (N, Q, k) point.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub n: f64,
    pub q: f64,
    pub k: u32,
    pub epsilon: f64,
    pub z: f64,
    pub lhs: Option<f64>,
    pub rhs_classical_a: f64,
    pub rhs_classical_b: f64,
    pub rhs_zhao: f64,
    pub rhs_thm1: f64,
    /// Cubic bound; present only for k = 3 with Q ≤ √N.
    pub rhs_thm2: Option<f64>,
}

impl BoundReport {
    pub fn build(n: f64, q: f64, k: u32, epsilon: f64, z: f64, lhs: Option<f64>) -> Self {
        let (ca, cb) = classical_rhs(n, q, k, z);
        let thm2 = (k == 3 && cmp_powers(q, 2, n, 1) != Ordering::Greater)
            .then(|| thm2_rhs(n, q, epsilon, z));
        BoundReport {
            n,
            q,
            k,
            epsilon,
            z,
            lhs,
            rhs_classical_a: ca,
            rhs_classical_b: cb,
            rhs_zhao: zhao_rhs(n, q, k, epsilon, z),
            rhs_thm1: thm1_rhs(n, q, k, epsilon, z),
            rhs_thm2: thm2,
        }
    }

    /// (name, value) pairs of every bound present, in canonical order.
    pub fn named_bounds(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![
            ("classical_a", self.rhs_classical_a),
            ("classical_b", self.rhs_classical_b),
            ("zhao", self.rhs_zhao),
            ("thm1", self.rhs_thm1),
        ];
        if let Some(t2) = self.rhs_thm2 {
            out.push(("thm2", t2));
        }
        out
    }
}

/// One row of a regime sweep at Q = N^θ.
#[derive(Debug, Clone)]
pub struct RegimeRow {
    pub theta: f64,
    pub q: f64,
    /// argmin among classical_b, classical_a, zhao, thm1 (cores, Z = 1;
    /// ties resolved in that order).
    pub winner: &'static str,
    pub best_value: f64,
    /// Cubic bound value when applicable (k = 3, θ ≤ 1/2).
    pub thm2_value: Option<f64>,
    pub thm2_wins: bool,
}

/// Improvement windows (as exponents of N) located by the binding-term
/// crossovers, plus the winner-per-θ table.
#[derive(Debug, Clone)]
pub struct RegimeTable {
    pub n: f64,
    pub k: u32,
    pub epsilon: f64,
    pub rows: Vec<RegimeRow>,
    /// (θ_lo, θ_hi) where the power-moduli bound undercuts the baselines:
    /// lower end against Q^(2k)+N, upper end against the N^(1−1/κ)Q^(1+k/κ)
    /// term of the κ-bound.
    pub thm1_window: (f64, f64),
    /// k = 3 only: window for the cubic bound, lower end against the same
    /// κ-term, upper end against the QN term of the linear classical bound.
    pub thm2_window: Option<(f64, f64)>,
}

fn ln_bound_terms(terms: &[f64]) -> f64 {
    // log-sum-exp over term logarithms
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// ln of thm1 core at Q = N^θ, all in the log domain.
fn ln_thm1_core(ln_n: f64, theta: f64, k: u32, eps: f64) -> f64 {
    ln_bound_terms(&[
        (k as f64 + 1.0) * theta * ln_n,
        ln_n,
        (0.5 + eps) * ln_n + k as f64 * theta * ln_n,
    ])
}

fn ln_classical_a(ln_n: f64, theta: f64, k: u32) -> f64 {
    ln_bound_terms(&[(k as f64 + 1.0) * theta * ln_n, (1.0 + theta) * ln_n])
}

fn ln_classical_b(ln_n: f64, theta: f64, k: u32) -> f64 {
    ln_bound_terms(&[2.0 * k as f64 * theta * ln_n, ln_n])
}

fn ln_zhao(ln_n: f64, theta: f64, k: u32, eps: f64) -> f64 {
    let kappa = (1u64 << (k - 1)) as f64;
    ln_bound_terms(&[
        (k as f64 + 1.0) * theta * ln_n,
        (1.0 + (1.0 - 1.0 / kappa) * theta + eps) * ln_n,
        ((1.0 - 1.0 / kappa) + (1.0 + k as f64 / kappa) * theta + eps) * ln_n,
    ])
}

/// ln of the large-Q term of the κ-bound, N^(1−1/κ+ε)·Q^(1+k/κ).
fn ln_zhao_tail(ln_n: f64, theta: f64, k: u32, eps: f64) -> f64 {
    let kappa = (1u64 << (k - 1)) as f64;
    ((1.0 - 1.0 / kappa) + (1.0 + k as f64 / kappa) * theta + eps) * ln_n
}

fn ln_thm2(ln_n: f64, theta: f64, eps: f64) -> f64 {
    if theta >= 7.0 / 24.0 {
        eps * ln_n + ln_bound_terms(&[4.0 * theta * ln_n, (0.9 + 1.2 * theta) * ln_n])
    } else {
        (1.0 + (6.0 / 7.0 + eps) * theta) * ln_n
    }
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(
        flo * f(hi) <= 0.0,
        "bisect: no sign change on [{}, {}]",
        lo,
        hi
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sweep Q = N^θ over θ ∈ [0, 1/2], rank the bounds, and locate the
/// improvement-window crossovers.
pub fn regime_table(n: f64, k: u32, eps: f64) -> RegimeTable {
    assert!(k >= 2);
    let ln_n = n.ln();

    let mut rows = Vec::new();
    let steps = 100usize;
    for i in 0..=steps {
        let theta = 0.5 * i as f64 / steps as f64;
        // Candidate order fixes tie-breaking: the flat classical bound
        // wins at Q = 1 where the formulas coincide.
        let candidates = [
            ("classical_b", ln_classical_b(ln_n, theta, k)),
            ("classical_a", ln_classical_a(ln_n, theta, k)),
            ("zhao", ln_zhao(ln_n, theta, k, eps)),
            ("thm1", ln_thm1_core(ln_n, theta, k, eps)),
        ];
        let mut winner = candidates[0];
        for &c in &candidates[1..] {
            if c.1 < winner.1 {
                winner = c;
            }
        }
        let thm2_ln = (k == 3).then(|| ln_thm2(ln_n, theta, eps));
        rows.push(RegimeRow {
            theta,
            q: (theta * ln_n).exp(),
            winner: winner.0,
            best_value: winner.1.exp(),
            thm2_value: thm2_ln.map(f64::exp),
            thm2_wins: thm2_ln.is_some_and(|t| t < winner.1),
        });
    }

    // Binding-pair crossovers. Lower end of the thm1 window: the full core
    // against Q^(2k)+N. Upper end: the Q-growing terms of the core
    // (Q^(k+1) + N^(1/2+ε)Q^k) against the κ-bound term that controls
    // large Q. The flat N term is Q-independent and has no say in where
    // the Q-crossover sits; keeping it would mask the crossover entirely
    // at small N.
    let kappa = (1u64 << (k - 1)) as f64;
    let paper_hi = (kappa - 2.0) / (2.0 * (k as f64 - 1.0) * kappa - 2.0 * k as f64);
    let mid = 0.5 * (1.0 / (2.0 * k as f64) + paper_hi);
    let lo = bisect(
        |t| ln_thm1_core(ln_n, t, k, eps) - ln_classical_b(ln_n, t, k),
        0.02,
        mid,
    );
    let ln_thm1_q_terms = |t: f64| {
        ln_bound_terms(&[
            (k as f64 + 1.0) * t * ln_n,
            (0.5 + eps) * ln_n + k as f64 * t * ln_n,
        ])
    };
    let hi = bisect(|t| ln_thm1_q_terms(t) - ln_zhao_tail(ln_n, t, k, eps), mid, 0.49);

    let thm2_window = (k == 3).then(|| {
        // Lower end: the below-seam bound N·Q^(6/7+ε) against the κ-term;
        // upper end: the Q⁴N^ε term against the QN term of the linear
        // classical bound.
        let lo = bisect(
            |t| (1.0 + (6.0 / 7.0 + eps) * t) * ln_n - ln_zhao_tail(ln_n, t, 3, eps),
            0.1,
            0.32,
        );
        let hi = bisect(
            |t| (4.0 * t + eps) * ln_n - (1.0 + t) * ln_n,
            0.25,
            0.49,
        );
        (lo, hi)
    });

    RegimeTable { n, k, epsilon: eps, rows, thm1_window: (lo, hi), thm2_window }
}
