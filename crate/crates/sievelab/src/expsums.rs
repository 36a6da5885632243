//! Trigonometric sums and the Fourier tools around them: S(α) = Σ aₙ e(αn),
//! complete cubic sums Σ e((kd³+ld)/c), the Fejér-type kernel
//! φ(x) = (sin πx / 2x)² with its triangle-function transform, and adaptive
//! quadrature for the oscillatory integrals that bound the cubic analysis.
//!
//! Exponential arguments are reduced mod 1 in exact integer arithmetic
//! before any transcendental call; sums accumulate with compensated
//! (Kahan) addition.

use num_complex::Complex64;

use crate::modmath::gcd;

/// e(x) = exp(2πi x).
#[inline]
pub fn e_of(x: f64) -> Complex64 {
    let (s, c) = (2.0 * std::f64::consts::PI * x).sin_cos();
    Complex64::new(c, s)
}

/// Compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

impl KahanSum {
    pub fn add(&mut self, v: Complex64) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> Complex64 {
        self.sum
    }
}

/// Compensated real accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanReal {
    sum: f64,
    comp: f64,
}

impl KahanReal {
    pub fn add(&mut self, v: f64) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Complex coefficients a_{M+1}, ..., a_{M+N} with their offset.
#[derive(Debug, Clone)]
pub struct CoeffSequence {
    /// Offset M; the n-th coefficient multiplies e(αn) with n = M+1..M+N.
    pub offset: i64,
    pub coeffs: Vec<Complex64>,
}

impl CoeffSequence {
    pub fn new(offset: i64, coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "CoeffSequence: length must be >= 1");
        CoeffSequence { offset, coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Z = Σ |aₙ|².
    pub fn z_norm(&self) -> f64 {
        let mut acc = KahanReal::default();
        for a in &self.coeffs {
            acc.add(a.norm_sqr());
        }
        acc.value()
    }

    /// Iterate (n, aₙ) pairs.
    pub fn indexed(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &a)| (self.offset + 1 + i as i64, a))
    }
}

/// S(α) = Σ_{n=M+1}^{M+N} aₙ e(αn), compensated.
pub fn eval_exp_sum(seq: &CoeffSequence, alpha: f64) -> Complex64 {
    let mut acc = KahanSum::default();
    for (n, a) in seq.indexed() {
        let phase = (alpha * n as f64).fract();
        acc.add(a * e_of(phase));
    }
    acc.value()
}

/// S(a/q) with the phase a·n reduced mod q exactly in integers.
pub fn eval_exp_sum_fraction(seq: &CoeffSequence, num: u64, den: u64) -> Complex64 {
    assert!(den >= 1);
    let mut acc = KahanSum::default();
    for (n, a) in seq.indexed() {
        let r = (num as i128 * n as i128).rem_euclid(den as i128) as u64;
        acc.add(a * e_of(r as f64 / den as f64));
    }
    acc.value()
}

/// Complete cubic sum Σ_{d=1}^{c} e((k·d³ + l·d)/c) for gcd(k, c) = 1.
///
/// The argument k·d³ + l·d is reduced mod c in exact integer arithmetic
/// before the exponential.
pub fn complete_cubic_sum(c: u64, kcoef: i64, l: i64) -> Complex64 {
    assert!(c >= 1, "complete_cubic_sum: modulus must be >= 1");
    let k_red = kcoef.rem_euclid(c as i64) as u64;
    assert_eq!(gcd(k_red, c), 1, "complete_cubic_sum: gcd(kcoef, c) must be 1");
    let c_i = c as i128;
    let mut acc = KahanSum::default();
    for d in 1..=c as i128 {
        let arg = (kcoef as i128 * d * d * d + l as i128 * d).rem_euclid(c_i);
        acc.add(e_of(arg as f64 / c as f64));
    }
    acc.value()
}

/// φ(x) = (sin πx / 2x)², with the removable singularity φ(0) = π²/4.
pub fn kernel_phi(x: f64) -> f64 {
    if x == 0.0 {
        return std::f64::consts::PI * std::f64::consts::PI / 4.0;
    }
    let s = (std::f64::consts::PI * x).sin() / (2.0 * x);
    s * s
}

/// The Fourier transform φ̂(s) = (π²/4)·max{1 − |s|, 0}.
pub fn kernel_phi_hat(s: f64) -> f64 {
    std::f64::consts::PI * std::f64::consts::PI / 4.0 * (1.0 - s.abs()).max(0.0)
}

/// Adaptive-quadrature failure: the panel budget ran out before the
/// tolerance was met.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonConvergent;

impl std::fmt::Display for NonConvergent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "adaptive quadrature did not converge within the panel budget")
    }
}

impl std::error::Error for NonConvergent {}

const PANEL_BUDGET: u64 = 1 << 20;

/// Adaptive Simpson for complex integrands, absolute tolerance on |error|.
pub fn integrate_complex<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<Complex64, NonConvergent>
where
    F: Fn(f64) -> Complex64,
{
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let mut panels = 0u64;
    adapt(f, a, b, fa, fm, fb, whole, tol, 0, &mut panels)
}

fn simpson(a: f64, b: f64, fa: Complex64, fm: Complex64, fb: Complex64) -> Complex64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
    panels: &mut u64,
) -> Result<Complex64, NonConvergent>
where
    F: Fn(f64) -> Complex64,
{
    *panels += 1;
    if *panels > PANEL_BUDGET {
        return Err(NonConvergent);
    }
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    if err.norm() <= 15.0 * tol || depth >= 48 {
        return Ok(left + right + err / 15.0);
    }
    let half = 0.5 * tol;
    Ok(adapt(f, a, m, fa, flm, fm, left, half, depth + 1, panels)?
        + adapt(f, m, b, fm, frm, fb, right, half, depth + 1, panels)?)
}

/// Result of an oscillatory-integral evaluation with the three reference
/// bound values (constants set to 1; constants are fitted downstream).
#[derive(Debug, Clone)]
pub struct OscIntegral {
    pub value: Complex64,
    /// 1/(|j|z), valid when j ≠ 0 (first-derivative bound on the jyz part).
    pub bound_linear_phase: Option<f64>,
    /// Q₀^(2/3)/|l|, valid when j = 0, l ≠ 0.
    pub bound_pure_cubic_root: Option<f64>,
    /// √r̃ · Q₀^(5/6)/√|l|, valid when j ≠ 0, l ≠ 0 (second-derivative bound).
    pub bound_mixed: Option<f64>,
}

/// ∫_{Q₀}^{2Q₀} e(j·y·z − l·y^(1/3)/r̃) dy to absolute tolerance 1e-8.
pub fn oscillatory_integral(
    j: i64,
    z: f64,
    l: i64,
    r_tilde: u64,
    q0: f64,
) -> Result<OscIntegral, NonConvergent> {
    assert!(q0 >= 1.0, "oscillatory_integral: Q0 must be >= 1");
    assert!(r_tilde >= 1);
    let jz = j as f64 * z;
    let lr = l as f64 / r_tilde as f64;
    let value = if j == 0 && l == 0 {
        Complex64::new(q0, 0.0)
    } else {
        integrate_complex(&|y: f64| e_of(jz * y - lr * y.cbrt()), q0, 2.0 * q0, 1e-8)?
    };
    Ok(OscIntegral {
        value,
        bound_linear_phase: (j != 0).then(|| 1.0 / (j.unsigned_abs() as f64 * z.abs())),
        bound_pure_cubic_root: (j == 0 && l != 0)
            .then(|| q0.powf(2.0 / 3.0) / l.unsigned_abs() as f64),
        bound_mixed: (j != 0 && l != 0).then(|| {
            (r_tilde as f64).sqrt() * q0.powf(5.0 / 6.0) / (l.unsigned_abs() as f64).sqrt()
        }),
    })
}

/// Numerical Fourier transform of φ at s: 2∫₀^T φ(y)cos(2πsy) dy plus the
/// analytic tail of the non-oscillatory 1/(8y²) part when s = 0.
///
/// The oscillatory tails decay like 1/T², so T = 2·10⁴ already puts the
/// truncation error well below 1e-7.
pub fn kernel_phi_hat_by_quadrature(s: f64) -> f64 {
    let t_max = 2.0e4;
    // Composite Gauss-Legendre (7-point) on half-unit panels.
    const NODES: [f64; 7] = [
        -0.9491079123427585,
        -0.7415311855993945,
        -0.4058451513773972,
        0.0,
        0.4058451513773972,
        0.7415311855993945,
        0.9491079123427585,
    ];
    const WEIGHTS: [f64; 7] = [
        0.1294849661688697,
        0.2797053914892766,
        0.3818300505051189,
        0.4179591836734694,
        0.3818300505051189,
        0.2797053914892766,
        0.1294849661688697,
    ];
    let panel = 0.5;
    let n_panels = (t_max / panel) as usize;
    let mut acc = KahanReal::default();
    for i in 0..n_panels {
        let a = i as f64 * panel;
        let half = 0.5 * panel;
        let mid = a + half;
        for (node, w) in NODES.iter().zip(WEIGHTS.iter()) {
            let y = mid + half * node;
            acc.add(w * half * kernel_phi(y) * (2.0 * std::f64::consts::PI * s * y).cos());
        }
    }
    let mut value = 2.0 * acc.value();
    if s == 0.0 {
        value += 1.0 / (4.0 * t_max);
    }
    value
}

/// Both sides of the scaled Poisson identity Σ φ(n/σ) = σ Σ φ̂(nσ) for a
/// rational scaling σ = num/den.
///
/// The left side is the headline sum over |n| ≤ 10⁴ completed by the tail
/// up to |n| ≤ 10⁸; (1 − cos 2πn/σ) is periodic in n with period `num`,
/// so the tail costs one cosine per residue class. The right side is
/// finite because φ̂ vanishes outside [−1, 1].
pub fn poisson_check(sigma_num: u64, sigma_den: u64) -> (f64, f64) {
    assert!(sigma_num >= 1 && sigma_den >= 1);
    let sigma = sigma_num as f64 / sigma_den as f64;

    let head_cut = 10_000i64;
    let mut lhs = KahanReal::default();
    lhs.add(kernel_phi(0.0));
    for n in 1..=head_cut {
        let v = kernel_phi(n as f64 / sigma);
        lhs.add(2.0 * v);
    }
    // Tail: φ(n/σ) = (1 − cos(2πn/σ))·σ²/(8n²); the cosine depends only on
    // n mod num.
    let period = sigma_num as i64;
    let mut class_weight = vec![0.0f64; period as usize];
    for (r, w) in class_weight.iter_mut().enumerate() {
        let x = r as f64 / sigma;
        *w = (1.0 - (2.0 * std::f64::consts::PI * x).cos()) * sigma * sigma / 8.0;
    }
    let tail_cut = 100_000_000i64;
    let mut tail = KahanReal::default();
    for r in 0..period {
        let w = class_weight[r as usize];
        if w == 0.0 {
            continue;
        }
        // Sum backward over n ≡ r (mod period), head_cut < n ≤ tail_cut.
        let mut n = tail_cut - (tail_cut - r).rem_euclid(period);
        let mut class_sum = KahanReal::default();
        while n > head_cut {
            class_sum.add(1.0 / (n as f64 * n as f64));
            n -= period;
        }
        tail.add(2.0 * w * class_sum.value());
    }
    lhs.add(tail.value());

    let mut rhs = KahanReal::default();
    for n in -2i64..=2 {
        rhs.add(sigma * kernel_phi_hat(n as f64 * sigma));
    }
    (lhs.value(), rhs.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use std::f64::consts::PI;

    fn random_seq(n: usize, seed: u64) -> CoeffSequence {
        let mut rng = SplitMix64::new(seed);
        CoeffSequence::new(
            0,
            (0..n)
                .map(|_| Complex64::new(2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0))
                .collect(),
        )
    }

    #[test]
    fn single_coefficient_magnitude() {
        let seq = CoeffSequence::new(5, vec![Complex64::new(0.3, -0.4)]);
        for &alpha in &[0.0, 0.17, 0.93] {
            assert!((eval_exp_sum(&seq, alpha).norm() - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn all_ones_at_zero() {
        let seq = CoeffSequence::new(0, vec![Complex64::new(1.0, 0.0); 37]);
        let s = eval_exp_sum(&seq, 0.0);
        assert!((s - Complex64::new(37.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn matches_naive_reference() {
        let seq = random_seq(64, 7);
        let alpha = 0.3;
        let mut naive = Complex64::new(0.0, 0.0);
        for (n, a) in seq.indexed() {
            naive += a * e_of(alpha * n as f64);
        }
        let s = eval_exp_sum(&seq, alpha);
        assert!((s - naive).norm() <= 1e-12 * naive.norm().max(1.0));
    }

    #[test]
    fn conjugate_symmetry_for_real_coeffs() {
        let mut rng = SplitMix64::new(99);
        let seq = CoeffSequence::new(
            3,
            (0..50).map(|_| Complex64::new(rng.next_f64(), 0.0)).collect(),
        );
        for &alpha in &[0.123, 0.499, 0.76] {
            let plus = eval_exp_sum(&seq, alpha);
            let minus = eval_exp_sum(&seq, -alpha);
            assert!((minus - plus.conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn z_norm_recomputation() {
        let seq = random_seq(200, 11);
        let direct: f64 = seq.coeffs.iter().map(|a| a.norm_sqr()).sum();
        assert!((seq.z_norm() - direct).abs() <= 1e-12 * direct);
    }

    #[test]
    fn cubic_sum_examples() {
        let s = complete_cubic_sum(1, 1, 0);
        assert!((s - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        // Cubes mod 7 over d=1..7 are {1,1,6,1,6,6,0}.
        let s = complete_cubic_sum(7, 1, 0);
        let expect = 1.0 + 6.0 * (2.0 * PI / 7.0).cos();
        assert!((s.re - expect).abs() < 1e-12, "re = {}", s.re);
        assert!(s.im.abs() < 1e-12);

        let s = complete_cubic_sum(9, 1, 0);
        let expect = 3.0 * (1.0 + 2.0 * (2.0 * PI / 9.0).cos());
        assert!((s.re - expect).abs() < 1e-12);
        assert!(s.im.abs() < 1e-12);
    }

    #[test]
    fn cubic_sum_direct_summation_oracle() {
        // Unreduced float evaluation as the independent reference.
        for &(c, k, l) in &[(11u64, 2i64, 3i64), (16, 3, 5), (49, 1, 7), (100, 3, 0)] {
            let fast = complete_cubic_sum(c, k, l);
            let mut slow = Complex64::new(0.0, 0.0);
            for d in 1..=c as i64 {
                let arg = (k as f64 * (d as f64).powi(3) + l as f64 * d as f64) / c as f64;
                slow += e_of(arg.fract());
            }
            assert!((fast - slow).norm() < 1e-6 * (c as f64), "c={}", c);
        }
    }

    #[test]
    fn cubic_sum_twisted_multiplicativity() {
        // For coprime c1, c2: S(c1·c2, k, 0) = S(c1, k·c2², 0)·S(c2, k·c1², 0).
        for &(c1, c2, k) in &[(5u64, 7u64, 1i64), (8, 9, 1), (7, 9, 2), (11, 16, 3)] {
            let lhs = complete_cubic_sum(c1 * c2, k, 0);
            let t1 = complete_cubic_sum(c1, k * (c2 * c2) as i64, 0);
            let t2 = complete_cubic_sum(c2, k * (c1 * c1) as i64, 0);
            assert!((lhs - t1 * t2).norm() < 1e-9, "c1={} c2={}", c1, c2);
        }
    }

    #[test]
    #[should_panic]
    fn cubic_sum_rejects_common_factor() {
        complete_cubic_sum(9, 3, 1);
    }

    #[test]
    fn kernel_values() {
        assert!((kernel_phi(0.0) - PI * PI / 4.0).abs() < 1e-15);
        assert_eq!(kernel_phi_hat(1.0), 0.0);
        assert_eq!(kernel_phi_hat(-1.7), 0.0);
        assert!((kernel_phi_hat(0.5) - PI * PI / 8.0).abs() < 1e-15);
        // φ(x) ≥ 1 on |x| ≤ 1/2.
        for i in 0..=100 {
            let x = -0.5 + i as f64 / 100.0;
            assert!(kernel_phi(x) >= 1.0 - 1e-12, "phi({}) = {}", x, kernel_phi(x));
        }
    }

    #[test]
    fn phi_hat_quadrature_matches_closed_form() {
        for &s in &[0.0, 0.25, -0.25, 0.5, -0.5, 0.99, -0.99, 1.5, -1.5] {
            let numeric = kernel_phi_hat_by_quadrature(s);
            let closed = kernel_phi_hat(s);
            assert!(
                (numeric - closed).abs() < 1e-6,
                "s={}: quadrature {} vs closed {}",
                s,
                numeric,
                closed
            );
        }
    }

    #[test]
    fn poisson_identity_scaled() {
        for &(num, den) in &[(1u64, 2u64), (1, 1), (2, 1)] {
            let (lhs, rhs) = poisson_check(num, den);
            assert!(
                (lhs - rhs).abs() < 1e-6,
                "sigma={}/{}: lhs {} rhs {}",
                num,
                den,
                lhs,
                rhs
            );
        }
    }

    #[test]
    fn oscillatory_trivial_and_linear() {
        let r = oscillatory_integral(0, 0.0, 0, 1, 250.0).unwrap();
        assert_eq!(r.value, Complex64::new(250.0, 0.0));

        // Linear phase: closed form (e(2jQ0z) − e(jQ0z))/(2πi·jz).
        let (j, z, q0) = (1i64, 0.01f64, 100.0f64);
        let r = oscillatory_integral(j, z, 0, 1, q0).unwrap();
        let jz = j as f64 * z;
        let closed = (e_of(2.0 * jz * q0) - e_of(jz * q0))
            / (Complex64::new(0.0, 2.0 * PI * jz));
        assert!((r.value - closed).norm() < 1e-8, "got {} want {}", r.value, closed);
        let bound = r.bound_linear_phase.unwrap();
        assert!((bound - 100.0).abs() < 1e-12);
        assert!(r.value.norm() <= bound);
    }

    #[test]
    fn oscillatory_pure_cubic_bound() {
        let r = oscillatory_integral(0, 0.0, 2, 1, 1000.0).unwrap();
        let reference = r.bound_pure_cubic_root.unwrap();
        assert!((reference - 1000.0f64.powf(2.0 / 3.0) / 2.0).abs() < 1e-9);
        assert!(r.value.norm().is_finite());
    }
}
