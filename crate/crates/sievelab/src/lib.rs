//! sievelab: a desk-scale laboratory for large-sieve sums over power moduli.
//!
//! The library evaluates trigonometric sums Σ aₙ e(αn) over Farey fractions
//! a/qᵏ, counts the power congruences x^k·g ≡ l (mod m) that control their
//! distribution, builds the divisibility-structured moduli families behind
//! dyadic decompositions, and compares every measured sum against the
//! candidate upper bounds, fitting the implied constants empirically.
//!
//! Modules:
//! - [`modmath`] — exact factorization, modular powers/inverses, CRT.
//! - [`power_congruence`] — Hensel-lifted root counting, kernel sizes, δ_t.
//! - [`moduli_sets`] — S_t families, f_t/g_t gadgets, window counts, G(r).
//! - [`expsums`] — exponential-sum evaluation, complete cubic sums, the
//!   Fejér-type kernel and its transform, oscillatory integrals.
//! - [`sieve_eval`] — left-hand sides: full power-moduli sums, dyadic
//!   restrictions, classical sums; naive and transform-accelerated paths.
//! - [`farey`] — exact Farey-point geometry: K(Δ), P(α), Dirichlet
//!   approximation, lattice counts Π(δ, y), proposition right-hand sides.
//! - [`bounds`] — every candidate bound formula, regime tables, constant
//!   fitting.
//! - [`harness`] — experiment campaigns, CSV emission, the `sievelab` CLI
//!   engine.
//! - [`rng`] — the pinned SplitMix64 generator for reproducible streams.
//!
//! Every runnable capability has a worked example under `examples/`;
//! `cargo run --example <name>` lists are in the README.

pub mod bounds;
pub mod expsums;
pub mod farey;
pub mod harness;
pub mod modmath;
pub mod moduli_sets;
pub mod power_congruence;
pub mod rng;
pub mod sieve_eval;

pub use expsums::CoeffSequence;
pub use modmath::FactoredInteger;
pub use moduli_sets::PowerModuliFamily;
