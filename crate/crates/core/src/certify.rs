//! Numerical certification of scrambled pairs with modulus 1/2, closed-form
//! prediction of asymptotic pair distances, and refutation of candidate
//! scrambled sets.
//!
//! For a mixed pair (one point all finite, one with an ∞ tail from index M)
//! the trajectory distance is dominated by the circle term
//! `2^{-M+1} · harmonic_window(base, n) mod 1`, where `base` is the finite
//! point's coordinate at M; the residual corrections (late-window residuals
//! and the reciprocal coordinate tail `2^{-M+1}/(base + n)`) vanish as n
//! grows. [`certify_scrambled`] sweeps that dominant term toward the targets
//! 0 and 1/2, validates every candidate with the full metric, and reports
//! witnessed times. A certificate is finite evidence: bounds at witnessed
//! times, not a proof about liminf or limsup.
//!
//! For same-shape pairs the distance converges outright and
//! [`predict_limit`] computes the limit in closed form:
//! `|x_0 - y_0 + Σ_{x_i ≤ y_i} 2^{-i}·W(x_i, r_i) - Σ_{x_i > y_i}
//! 2^{-i}·W(y_i, r_i)| mod 1` with `r_i = |x_i - y_i|` and W the harmonic
//! window, summed over all i when both points are finite, or over the
//! agreement region below a shared ∞ start. A convergent distance means the
//! pair is not scrambled, which powers [`refute_scrambled_set`]: any two
//! all-finite points, or two points whose ∞ tails start at the same index,
//! form a provably non-scrambled pair; a genuine scrambled set can therefore
//! hold at most one all-finite point and pairwise distinct ∞ starts, making
//! it countable-shaped.

use crate::circle::{circle_dist, CircleValue, KahanSum};
use crate::dynamics::pair_distance_at;
use crate::harmonic::harmonic_window;
use crate::space::{ExtNat, Point, TailSpec};

/// Tolerance used when re-evaluating the full metric at candidate times.
const EVAL_TOL: f64 = 1e-10;

/// Number of validated times required on each side of a certificate.
const REQUIRED_EVENTS: usize = 3;

/// One validated observation of the pair distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedDistance {
    pub time: u64,
    pub distance: f64,
}

/// Finite evidence that a pair is scrambled with modulus 1/2: times at which
/// the trajectory distance was at most epsilon, and times at which it was at
/// least 1/2 - epsilon.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCertificate {
    /// Times with distance ≤ epsilon, each re-verifiable by direct
    /// evaluation.
    pub proximal: Vec<TimedDistance>,
    /// Times with distance ≥ 1/2 - epsilon.
    pub separation: Vec<TimedDistance>,
    pub epsilon: f64,
    pub budget: u64,
}

impl PairCertificate {
    /// Minimum witnessed distance over the proximal times.
    pub fn liminf_upper_bound(&self) -> Option<f64> {
        self.proximal.iter().map(|td| td.distance).reduce(f64::min)
    }

    /// Maximum witnessed distance over the separation times.
    pub fn limsup_lower_bound(&self) -> Option<f64> {
        self.separation.iter().map(|td| td.distance).reduce(f64::max)
    }

    /// True when both sides carry the required number of validated times.
    pub fn is_complete(&self) -> bool {
        self.proximal.len() >= REQUIRED_EVENTS && self.separation.len() >= REQUIRED_EVENTS
    }
}

/// Which closed-form limit applies to a same-shape pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitCase {
    /// Both points all finite; the sum runs over every coordinate.
    AllFinite,
    /// Both points ∞-tailed from the same index; the sum runs below it.
    SharedInfinityStart,
}

impl LimitCase {
    pub fn label(&self) -> &'static str {
        match self {
            LimitCase::AllFinite => "all-finite",
            LimitCase::SharedInfinityStart => "shared-infinity-start",
        }
    }
}

/// The closed-form asymptotic distance of a same-shape pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitPrediction {
    /// The limiting circle offset before folding, reduced to [0, 1).
    pub limit_circle_raw: f64,
    /// The limiting distance: min(raw, 1 - raw), at most 1/2.
    pub limit_d: f64,
    /// Coordinate gaps r_i = |x_i - y_i| for the leading indices, for
    /// reporting.
    pub r_head: Vec<u64>,
    /// Largest coordinate gap over the evaluated indices; scales the
    /// finite-horizon deviation from the limit, which is about max_r / n.
    pub max_r: u64,
    pub case: LimitCase,
}

/// Errors from certification and prediction.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CertifyError {
    #[error("epsilon must lie in (0, 0.1], got {eps}")]
    InvalidEpsilon { eps: f64 },
    #[error("certification needs exactly one ∞-tailed point in the pair")]
    NotCertifiableShape,
    #[error("limit prediction needs two points of the same shape; this pair is mixed")]
    MixedShape,
    #[error(
        "∞ tails start at different indices ({left} and {right}); no closed-form limit \
         applies and the pair may be scrambled"
    )]
    InfinityStartMismatch { left: usize, right: usize },
    #[error("a candidate set needs at least 2 points, got {count}")]
    TooFewPoints { count: usize },
    #[error(
        "budget exhausted with {} proximal and {} separation times validated",
        partial.proximal.len(),
        partial.separation.len()
    )]
    BudgetExhausted { partial: Box<PairCertificate> },
}

enum Gate {
    /// Accept distances at most this value.
    Proximal(f64),
    /// Accept distances at least this value.
    Separation(f64),
}

impl Gate {
    fn accepts(&self, d: f64) -> bool {
        match *self {
            Gate::Proximal(bound) => d <= bound,
            Gate::Separation(bound) => d >= bound,
        }
    }
}

/// Certifies a mixed pair as scrambled with modulus 1/2 by witnessing at
/// least three times with distance ≤ eps and three with distance
/// ≥ 1/2 - eps within the step budget.
///
/// The forward sweep tracks the dominant circle term
/// `offset + 2^{-M+1} · W(base, n)` where the settled offset collects the
/// raw circle gap and every coordinate's limiting shift; what it leaves out
/// vanishes like 1/n. Every time the dominant term enters the search ball of
/// a target, a few times across the dwell window are evaluated with the full
/// metric and kept only if they pass the gate. Failed candidates simply
/// extend the search, since the corrections that caused them shrink as n
/// grows.
pub fn certify_scrambled(
    x: &Point,
    y: &Point,
    eps: f64,
    n_max: u64,
) -> Result<PairCertificate, CertifyError> {
    if !(eps > 0.0 && eps <= 0.1) {
        return Err(CertifyError::InvalidEpsilon { eps });
    }
    // Distances to the targets 0 and 1/2 are symmetric under negating the
    // difference, so which point is subtracted from which does not matter.
    let (finite, infinite) = match (x.infinity_start(), y.infinity_start()) {
        (None, Some(_)) => (x, y),
        (Some(_), None) => (y, x),
        _ => return Err(CertifyError::NotCertifiableShape),
    };
    let m = infinite.tail().start();
    let base = match finite.coordinate(m) {
        ExtNat::Finite(v) => v,
        ExtNat::Infinity => unreachable!("all-finite point has no ∞ coordinate"),
    };
    let scale = 0.5f64.powi(m as i32 - 1);
    let offset = settled_offset(finite, infinite, m, base);
    // The dominant term must land strictly inside the ball so that the
    // corrections still fit within eps; the full-metric gate decides anyway.
    let eps_search = 0.8 * eps;
    let zero = CircleValue::new(0.0);
    let half = CircleValue::new(0.5);

    let mut proximal: Vec<TimedDistance> = Vec::new();
    let mut separation: Vec<TimedDistance> = Vec::new();
    let mut acc = KahanSum::new();
    let mut prev_near_zero = false;
    let mut prev_near_half = false;

    for v in 1..=n_max {
        acc.add(1.0 / (base + v - 1) as f64);
        let dominant = CircleValue::new(offset + scale * acc.value());
        let near_zero = circle_dist(dominant, zero) < eps_search;
        let near_half = circle_dist(dominant, half) < eps_search;
        if near_zero && !prev_near_zero && proximal.len() < REQUIRED_EVENTS {
            sample_dwell(
                x,
                y,
                v,
                n_max,
                base,
                scale,
                eps_search,
                &Gate::Proximal(eps),
                &mut proximal,
            );
        }
        if near_half && !prev_near_half && separation.len() < REQUIRED_EVENTS {
            sample_dwell(
                x,
                y,
                v,
                n_max,
                base,
                scale,
                eps_search,
                &Gate::Separation(0.5 - eps),
                &mut separation,
            );
        }
        prev_near_zero = near_zero;
        prev_near_half = near_half;
        if proximal.len() >= REQUIRED_EVENTS && separation.len() >= REQUIRED_EVENTS {
            return Ok(PairCertificate { proximal, separation, epsilon: eps, budget: n_max });
        }
    }
    Err(CertifyError::BudgetExhausted {
        partial: Box::new(PairCertificate { proximal, separation, epsilon: eps, budget: n_max }),
    })
}

/// The limiting value of the evolved circle difference minus the dominant
/// window `2^{-M+1} · W(base, n)`, where M is the ∞ start of `infinite` and
/// `base` the finite point's coordinate there.
///
/// Each coordinate's drift difference settles. Below M both points drift
/// and the difference tends to the signed climb shift between their
/// starting values: W(a, n) - W(a + r, n) = δ(a, a + r) - γ(a, a + r, n)
/// with γ vanishing. From M up only the finite point drifts, and the same
/// identity read the other way says each index contributes MINUS the climb
/// shift from `base`, since a coordinate starting higher accumulates less
/// drift. The shifts here are unreduced harmonic windows, so the weighted
/// sum is exact modulo 1; constant tails close the series in one geometric
/// term and arithmetic tails are truncated once the remaining weighted
/// shifts drop below 10^-14.
fn settled_offset(finite: &Point, infinite: &Point, m: usize, base: u64) -> f64 {
    let finite_at = |p: &Point, i: usize| -> u64 {
        match p.coordinate(i) {
            ExtNat::Finite(v) => v,
            ExtNat::Infinity => unreachable!("index below the ∞ start is finite"),
        }
    };
    let mut acc = KahanSum::new();
    acc.add(finite.x0().get() - infinite.x0().get());
    let mut w = 1.0f64;
    for i in 1..m {
        w *= 0.5;
        let fi = finite_at(finite, i);
        let gi = finite_at(infinite, i);
        let (lo, hi) = (fi.min(gi), fi.max(gi));
        let signed = if fi <= gi { 1.0 } else { -1.0 };
        acc.add(signed * w * harmonic_window(lo, hi - lo));
    }
    let settle = finite.tail().start().max(m);
    let mut i = m;
    loop {
        w *= 0.5;
        if i >= settle {
            match *finite.tail() {
                TailSpec::Const { value, .. } => {
                    acc.add(-2.0 * w * harmonic_window(base, value - base));
                    break;
                }
                TailSpec::Arith { .. } => {
                    let shift = harmonic_window(base, finite_at(finite, i) - base);
                    acc.add(-(w * shift));
                    if w * (shift + 1.0) < 1e-14 {
                        break;
                    }
                }
                TailSpec::Infinity { .. } => unreachable!("the finite point has no ∞ tail"),
            }
        } else {
            acc.add(-(w * harmonic_window(base, finite_at(finite, i) - base)));
        }
        i += 1;
    }
    acc.value()
}

/// Evaluates the full pair distance at a few times across the dwell window
/// that starts at `entry`, keeping gate-passing observations.
///
/// The dominant term moves at rate `scale/(base + v)` per step, so the ball
/// of diameter `2 · eps_search` is crossed in about
/// `2 · eps_search · (base + entry) / scale` steps.
#[allow(clippy::too_many_arguments)]
fn sample_dwell(
    x: &Point,
    y: &Point,
    entry: u64,
    n_max: u64,
    base: u64,
    scale: f64,
    eps_search: f64,
    gate: &Gate,
    out: &mut Vec<TimedDistance>,
) {
    let dwell = (2.0 * eps_search * (base + entry) as f64 / scale) as u64;
    let mut times = vec![entry];
    if dwell >= 2 {
        times.push(entry.saturating_add(dwell / 2));
        times.push(entry.saturating_add(dwell));
    } else if dwell == 1 {
        times.push(entry + 1);
    }
    for t in times {
        if t > n_max || out.len() >= REQUIRED_EVENTS {
            break;
        }
        if out.iter().any(|td| td.time == t) {
            continue;
        }
        let d = pair_distance_at(x, y, t, EVAL_TOL);
        if gate.accepts(d) {
            out.push(TimedDistance { time: t, distance: d });
        }
    }
}

/// Computes the closed-form asymptotic distance for a same-shape pair.
///
/// Both-finite pairs sum over every coordinate, closing the series in a
/// geometric term once both tails are constant and truncating it (remainder
/// below 10^-11) when an arithmetic tail keeps the terms varying. Pairs
/// sharing an ∞ start sum over the finite region below it. Exactly one ∞
/// tail, or two ∞ tails with different starts, have no convergent distance
/// to predict and are rejected.
pub fn predict_limit(x: &Point, y: &Point) -> Result<LimitPrediction, CertifyError> {
    let case = match (x.infinity_start(), y.infinity_start()) {
        (None, None) => LimitCase::AllFinite,
        (Some(lx), Some(ly)) if lx == ly => LimitCase::SharedInfinityStart,
        (Some(lx), Some(ly)) => {
            return Err(CertifyError::InfinityStartMismatch { left: lx, right: ly })
        }
        _ => return Err(CertifyError::MixedShape),
    };

    let mut acc = KahanSum::new();
    let mut max_r = 0u64;
    let mut w = 1.0f64;

    match case {
        LimitCase::SharedInfinityStart => {
            let l = x.tail().start().max(y.tail().start());
            for i in 1..l {
                w *= 0.5;
                let (sign, lo, r) = signed_gap(x, y, i);
                max_r = max_r.max(r);
                if r > 0 {
                    acc.add(sign * w * harmonic_window(lo, r));
                }
            }
        }
        LimitCase::AllFinite => {
            let settle = x.tail().start().max(y.tail().start());
            let both_const = matches!(x.tail(), TailSpec::Const { .. })
                && matches!(y.tail(), TailSpec::Const { .. });
            let mut i = 1usize;
            loop {
                if i >= settle && both_const {
                    // One constant signed term from here on; its weights sum
                    // to 2^{-i+1} = 2w after the final halving below.
                    w *= 0.5;
                    let (sign, lo, r) = signed_gap(x, y, i);
                    max_r = max_r.max(r);
                    if r > 0 {
                        acc.add(sign * 2.0 * w * harmonic_window(lo, r));
                    }
                    break;
                }
                w *= 0.5;
                let (sign, lo, r) = signed_gap(x, y, i);
                max_r = max_r.max(r);
                if r > 0 {
                    acc.add(sign * w * harmonic_window(lo, r));
                }
                if i >= settle {
                    // The gaps grow at most 1 per index and the bases are
                    // nondecreasing, so the remainder past i is bounded by
                    // 2^{-i} (r_i + 2) / lo_i.
                    let bound = w * (r as f64 + 2.0) / lo as f64;
                    if bound < 1e-11 {
                        break;
                    }
                }
                i += 1;
            }
        }
    }

    let raw = CircleValue::new(x.x0().get() - y.x0().get() + acc.value()).get();
    let limit_d = raw.min(1.0 - raw);
    let head_len = match case {
        LimitCase::SharedInfinityStart => x.tail().start().saturating_sub(1).min(8),
        LimitCase::AllFinite => 8,
    };
    let r_head = (1..=head_len).map(|i| signed_gap(x, y, i).2).collect();
    Ok(LimitPrediction { limit_circle_raw: raw, limit_d, r_head, max_r, case })
}

/// Signed coordinate gap at index i: (+1, x_i, y_i - x_i) when x_i ≤ y_i,
/// (-1, y_i, x_i - y_i) otherwise. Both coordinates must be finite.
fn signed_gap(x: &Point, y: &Point, i: usize) -> (f64, u64, u64) {
    let xi = match x.coordinate(i) {
        ExtNat::Finite(v) => v,
        ExtNat::Infinity => unreachable!("gap taken over a finite region"),
    };
    let yi = match y.coordinate(i) {
        ExtNat::Finite(v) => v,
        ExtNat::Infinity => unreachable!("gap taken over a finite region"),
    };
    if xi <= yi {
        (1.0, xi, yi - xi)
    } else {
        (-1.0, yi, xi - yi)
    }
}

/// Verdict over a candidate scrambled set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefutationVerdict {
    /// A pair with a convergent (hence non-scrambled) distance was found.
    Violation,
    /// Pairwise distinct ∞ starts and at most one all-finite point: the
    /// structural shape any scrambled set must have.
    StructurallyAdmissible,
}

impl RefutationVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            RefutationVerdict::Violation => "violation",
            RefutationVerdict::StructurallyAdmissible => "structurally-admissible",
        }
    }
}

/// The concrete non-scrambled pair behind a violation, with the predicted
/// limit checked against a finite-horizon simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationEvidence {
    pub index_a: usize,
    pub index_b: usize,
    pub prediction: LimitPrediction,
    pub simulated_distance: f64,
    pub sim_horizon: u64,
    pub agreement_tol: f64,
    pub agrees: bool,
}

/// Outcome of scanning a candidate set for provably non-scrambled pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct RefutationReport {
    pub verdict: RefutationVerdict,
    pub violation: Option<ViolationEvidence>,
    /// Per point: the index where its coordinates become ∞, or None for an
    /// all-finite point.
    pub l_values: Vec<Option<usize>>,
    pub eps: f64,
}

/// Scans all pairs of a candidate set in index order and reports the first
/// pair whose distance provably converges (two all-finite points, or two
/// points with the same ∞ start). Such a pair cannot be scrambled, so the
/// set cannot be a scrambled set. Sets with pairwise distinct ∞ starts and
/// at most one all-finite point are structurally admissible.
pub fn refute_scrambled_set(
    points: &[Point],
    eps: f64,
    n_max: u64,
) -> Result<RefutationReport, CertifyError> {
    if points.len() < 2 {
        return Err(CertifyError::TooFewPoints { count: points.len() });
    }
    let l_values: Vec<Option<usize>> = points.iter().map(|p| p.infinity_start()).collect();
    for a in 0..points.len() {
        for b in (a + 1)..points.len() {
            let convergent = match (l_values[a], l_values[b]) {
                (None, None) => true,
                (Some(la), Some(lb)) => la == lb,
                _ => false,
            };
            if !convergent {
                continue;
            }
            let prediction = predict_limit(&points[a], &points[b])
                .expect("shape compatibility was checked before predicting");
            let sim_horizon = n_max.clamp(1, 1_000_000);
            let simulated_distance = pair_distance_at(&points[a], &points[b], sim_horizon, 1e-9);
            let agreement_tol = eps + prediction.max_r as f64 / sim_horizon as f64;
            let agrees = (simulated_distance - prediction.limit_d).abs() <= agreement_tol;
            return Ok(RefutationReport {
                verdict: RefutationVerdict::Violation,
                violation: Some(ViolationEvidence {
                    index_a: a,
                    index_b: b,
                    prediction,
                    simulated_distance,
                    sim_horizon,
                    agreement_tol,
                    agrees,
                }),
                l_values,
                eps,
            });
        }
    }
    Ok(RefutationReport {
        verdict: RefutationVerdict::StructurallyAdmissible,
        violation: None,
        l_values,
        eps,
    })
}
