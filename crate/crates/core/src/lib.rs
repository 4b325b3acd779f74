//! Numerics for a skew-product system on a countable product space.
//!
//! The state space is the set of sequences (x_0, x_1, x_2, ...) where x_0
//! lives on the circle R/Z and the coordinates x_1 ≤ x_2 ≤ ... are a
//! nondecreasing sequence drawn from ℕ ∪ {∞}. The product metric weights
//! coordinate i by 2^{-i} and measures the integer coordinates through their
//! reciprocals, d_i(a, b) = |1/a - 1/b| with 1/∞ = 0, so deep coordinates
//! and large values both fade out and the whole space is compact. One step
//! of the dynamics shifts every integer coordinate up by one (∞ stays put)
//! and drifts the circle coordinate by the weighted reciprocal sum
//! Σ_{i≥1} 2^{-i}/x_i.
//!
//! Points whose coordinate sequences are eventually ∞, constant, or
//! arithmetic admit exact finite descriptions ([`TailSpec`]) that are closed
//! under the dynamics, so trajectories never need truncation. Over n steps
//! the circle coordinate accumulates partial harmonic sums, which
//! [`evolve`] computes through windowed harmonic numbers instead of
//! stepping; the drift diverges like log n while single-step displacements
//! shrink, which is exactly the regime where nearby points separate slowly
//! but unboundedly.
//!
//! On top of the simulator the crate provides the constructions that make
//! this system interesting:
//!
//! - [`ly_witness`] builds, inside any neighborhood that constrains finitely
//!   many coordinates, a point whose trajectory drifts at a different
//!   harmonic rate than the center's, giving sensitivity witnesses.
//! - [`certify_scrambled`] numerically certifies such a pair as scrambled
//!   with modulus 1/2: the pair comes arbitrarily close infinitely often yet
//!   separates beyond 1/2 - eps infinitely often.
//! - [`predict_limit`] computes the closed-form asymptotic distance of
//!   same-shape pairs, and [`refute_scrambled_set`] uses it to show a
//!   candidate scrambled set contains a convergent (hence non-scrambled)
//!   pair, unless the set has the countable-shaped structure of pairwise
//!   distinct ∞ starts.
//! - [`g_step`] and [`embed`] realize the same dynamics on a connected,
//!   order-complete model built from nonincreasing real sequences, related
//!   to the integer model through a reciprocal staircase.
//!
//! All accumulation uses compensated summation and every randomized search
//! re-verifies its candidates by independent evaluation before reporting
//! them.

pub mod certify;
pub mod circle;
pub mod dynamics;
pub mod harmonic;
pub mod io;
pub mod sample;
pub mod space;
pub mod witness;

pub use certify::{
    certify_scrambled, predict_limit, refute_scrambled_set, CertifyError, LimitCase,
    LimitPrediction, PairCertificate, RefutationReport, RefutationVerdict, TimedDistance,
    ViolationEvidence,
};
pub use circle::{circle_dist, CircleValue, KahanSum};
pub use dynamics::{
    embed, evolve, g_real, g_step, pair_distance_at, staircase, step, ConnectedPoint,
    DynamicsError, RealTail,
};
pub use harmonic::{
    delta_shift, find_mod1_hit, gamma_residual, harmonic_number, harmonic_window, HarmonicError,
    HitRequest,
};
pub use io::IoError;
pub use space::{
    coordinate_dist, in_neighborhood, metric_d, validate_point, ExtNat, NeighborhoodSpec, Point,
    PointError, TailSpec,
};
pub use witness::{
    ly_witness, witness_case1, witness_case2, WitnessError, WitnessKind, WitnessParams,
};
