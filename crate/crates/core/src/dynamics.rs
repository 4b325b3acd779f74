//! The skew-product map on the space: each step advances every finite
//! coordinate by 1 (∞ stays fixed) and rotates the circle coordinate by the
//! dyadically weighted sum of reciprocals `Σ_{i≥1} 2^{-i}/x_i`.
//!
//! Two evolution routes are provided deliberately. [`step`] applies one
//! exact map application at a time; [`evolve`] fast-forwards n steps at once
//! by replacing the per-step reciprocal sums with harmonic windows,
//! `x_0^n = (x_0 + Σ_i 2^{-i} · Σ_{j=0}^{n-1} 1/(x_i + j)) mod 1`, keeping
//! the circle error bounded by the caller's tolerance rather than letting it
//! accumulate over millions of steps. The two routes cross-check each other
//! in the test suites.
//!
//! The module also hosts the connected enlargement of the space: coordinates
//! relax from {1/k} ∪ {0} to the full interval [0, 1], nonincreasing under
//! the reciprocal embedding k ↦ 1/k, ∞ ↦ 0. The extended coordinate map g
//! sends 1/k to 1/(k+1) and interpolates linearly between those breakpoints
//! via the staircase decomposition `x = 1/k + t·(1/(k-1) - 1/k)`, making it
//! a continuous extension of the successor map. [`embed`] and [`g_step`]
//! realize the commuting square with [`step`].

use crate::circle::{CircleValue, KahanSum};
use crate::harmonic::harmonic_window;
use crate::space::{Point, TailSpec};

/// Errors from the connected extension.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("coordinate {value} admits no staircase decomposition (must lie in [0, 1] with 1/value below 2^53)")]
    DecompositionFailed { value: f64 },
    #[error("coordinate at index {index} is outside [0, 1]")]
    CoordinateOutOfRange { index: usize },
    #[error("coordinate sequence increases at index {index}")]
    NotNonincreasing { index: usize },
    #[error("tail starts at index {start}, so the coordinate list must hold {expected} values, not {actual}")]
    TailStartMismatch { start: usize, expected: usize, actual: usize },
}

/// One application of the map: every finite coordinate is incremented, ∞ is
/// fixed, and the circle coordinate rotates by `Σ_{i≥1} 2^{-i}/x_i`.
///
/// The reciprocal series closes in a single geometric term for constant and
/// all-∞ tails; an arithmetic tail is truncated once the remaining weight is
/// below 10^-17, far below every tolerance used downstream.
pub fn step(p: &Point) -> Point {
    let mut acc = KahanSum::new();
    let mut w = 1.0f64;
    for &v in p.prefix() {
        w *= 0.5;
        acc.add(w / v as f64);
    }
    // w is now 2^{-(start-1)}, the total weight of all tail indices.
    match *p.tail() {
        TailSpec::Infinity { .. } => {}
        TailSpec::Const { value, .. } => acc.add(w / value as f64),
        TailSpec::Arith { a, .. } => {
            let mut k = a;
            loop {
                w *= 0.5;
                acc.add(w / k as f64);
                if w < 1e-17 {
                    break;
                }
                k += 1;
            }
        }
    }
    let x0 = p.x0().shift(acc.value());
    let prefix: Vec<u64> = p.prefix().iter().map(|&v| v + 1).collect();
    let tail = p.tail().advanced(1);
    Point::new(x0.get(), prefix, tail).expect("the map preserves point validity")
}

/// F^n(p) computed in closed form: coordinates advance by n, and the circle
/// coordinate gains `Σ_i 2^{-i} · harmonic_window(x_i, n)` (∞ coordinates
/// contribute nothing). The circle part is within `tol` of exact.
pub fn evolve(p: &Point, n: u64, tol: f64) -> Point {
    assert!(tol > 0.0, "tolerance must be positive");
    if n == 0 {
        return p.clone();
    }
    let mut acc = KahanSum::new();
    let mut w = 1.0f64;
    for &v in p.prefix() {
        w *= 0.5;
        acc.add(w * harmonic_window(v, n));
    }
    match *p.tail() {
        TailSpec::Infinity { .. } => {}
        TailSpec::Const { value, .. } => acc.add(w * harmonic_window(value, n)),
        TailSpec::Arith { a, .. } => {
            // Every window is below 1 + ln n, so the remainder after weight
            // 2^{-i} is bounded by 2^{-i} (1 + ln n); truncate when that
            // drops below tol / 2.
            let cap = 1.0 + (n as f64).ln();
            let mut k = a;
            loop {
                w *= 0.5;
                acc.add(w * harmonic_window(k, n));
                if w * cap <= 0.5 * tol {
                    break;
                }
                k += 1;
            }
        }
    }
    let x0 = p.x0().shift(acc.value());
    let prefix: Vec<u64> = p.prefix().iter().map(|&v| v + n).collect();
    let tail = p.tail().advanced(n);
    Point::new(x0.get(), prefix, tail).expect("the map preserves point validity")
}

/// Distance between the n-step images of two points, within `tol`.
pub fn pair_distance_at(x: &Point, y: &Point, n: u64, tol: f64) -> f64 {
    let fx = evolve(x, n, tol * 0.25);
    let fy = evolve(y, n, tol * 0.25);
    crate::space::metric_d(&fx, &fy, tol * 0.5)
}

/// Tail rule for a connected point, mirroring [`TailSpec`] under the
/// reciprocal embedding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RealTail {
    /// x_i = 0 for all i ≥ start (the image of an all-∞ tail).
    Zero { start: usize },
    /// x_i = value for all i ≥ start.
    ConstReal { start: usize, value: f64 },
    /// x_i = 1/(a + (i - start)) for all i ≥ start (the image of an
    /// arithmetic tail, and exactly closed under the extended map).
    RecipRamp { start: usize, a: u64 },
}

impl RealTail {
    pub fn start(&self) -> usize {
        match *self {
            RealTail::Zero { start } => start,
            RealTail::ConstReal { start, .. } => start,
            RealTail::RecipRamp { start, .. } => start,
        }
    }

    /// Tail value at index `i`; requires `i >= self.start()`.
    pub fn value_at(&self, i: usize) -> f64 {
        debug_assert!(i >= self.start(), "index {i} precedes tail start");
        match *self {
            RealTail::Zero { .. } => 0.0,
            RealTail::ConstReal { value, .. } => value,
            RealTail::RecipRamp { start, a } => 1.0 / (a + (i - start) as u64) as f64,
        }
    }
}

/// A point of the connected enlargement: circle coordinate plus a
/// nonincreasing sequence in [0, 1], finitely described like [`Point`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectedPoint {
    z0: CircleValue,
    coords: Vec<f64>,
    tail: RealTail,
}

impl ConnectedPoint {
    pub fn new(z0: f64, coords: Vec<f64>, tail: RealTail) -> Result<Self, DynamicsError> {
        let start = tail.start();
        if coords.len() != start - 1 {
            return Err(DynamicsError::TailStartMismatch {
                start,
                expected: start - 1,
                actual: coords.len(),
            });
        }
        let mut prev = f64::INFINITY;
        for (idx, &v) in coords.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(DynamicsError::CoordinateOutOfRange { index: idx + 1 });
            }
            if v > prev {
                return Err(DynamicsError::NotNonincreasing { index: idx + 1 });
            }
            prev = v;
        }
        let first_tail = tail.value_at(start);
        if !(0.0..=1.0).contains(&first_tail) {
            return Err(DynamicsError::CoordinateOutOfRange { index: start });
        }
        if first_tail > prev {
            return Err(DynamicsError::NotNonincreasing { index: start });
        }
        Ok(ConnectedPoint { z0: CircleValue::new(z0), coords, tail })
    }

    pub fn z0(&self) -> CircleValue {
        self.z0
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn tail(&self) -> &RealTail {
        &self.tail
    }

    /// Coordinate x_i for i ≥ 1.
    pub fn coordinate(&self, i: usize) -> f64 {
        assert!(i >= 1, "coordinates are indexed from 1");
        if i < self.tail.start() {
            self.coords[i - 1]
        } else {
            self.tail.value_at(i)
        }
    }
}

/// Embeds a point into the connected enlargement: the circle coordinate is
/// kept and every coordinate maps through k ↦ 1/k, ∞ ↦ 0. Nondecreasing
/// integer sequences become nonincreasing real sequences.
pub fn embed(p: &Point) -> ConnectedPoint {
    let coords: Vec<f64> = p.prefix().iter().map(|&v| 1.0 / v as f64).collect();
    let tail = match *p.tail() {
        TailSpec::Infinity { start } => RealTail::Zero { start },
        TailSpec::Const { start, value } => {
            RealTail::ConstReal { start, value: 1.0 / value as f64 }
        }
        TailSpec::Arith { start, a } => RealTail::RecipRamp { start, a },
    };
    ConnectedPoint::new(p.x0().get(), coords, tail)
        .expect("the reciprocal embedding reverses monotone order exactly")
}

/// The staircase decomposition of x ∈ (0, 1]: the unique (k, t) with k ≥ 2
/// and t ∈ (0, 1] such that `x = 1/k + t · (1/(k-1) - 1/k)`.
///
/// Breakpoints x = 1/m are canonicalized to (m + 1, 1). Recomposition
/// reproduces x within 10^-12.
pub fn staircase(x: f64) -> Result<(u64, f64), DynamicsError> {
    if !(x > 0.0 && x <= 1.0) || !x.is_finite() {
        return Err(DynamicsError::DecompositionFailed { value: x });
    }
    let inv = 1.0 / x;
    if inv >= 9.007_199_254_740_992e15 {
        // 1/x at or above 2^53: the segment index is no longer exactly
        // representable, so the decomposition would be meaningless.
        return Err(DynamicsError::DecompositionFailed { value: x });
    }
    let k = inv.floor() as u64 + 1;
    let lo = 1.0 / k as f64;
    let hi = 1.0 / (k - 1) as f64;
    let t = (x - lo) / (hi - lo);
    if t <= 0.0 {
        // x sits exactly on the lower breakpoint 1/k; use the t ∈ (0, 1]
        // convention by describing it from the segment below.
        return Ok((k + 1, 1.0));
    }
    Ok((k, t.min(1.0)))
}

/// The extended coordinate map: 0 ↦ 0, and x = 1/k + t·(1/(k-1) - 1/k) maps
/// to 1/(k+1) + t·(1/k - 1/(k+1)). On reciprocals it is the successor map;
/// between them it interpolates linearly and monotonically.
pub fn g_real(x: f64) -> Result<f64, DynamicsError> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let (k, t) = staircase(x)?;
    let kf = k as f64;
    Ok(1.0 / (kf + 1.0) + t * (1.0 / kf - 1.0 / (kf + 1.0)))
}

/// One application of the extended map: the circle coordinate rotates by
/// `Σ_{i≥1} 2^{-i} x_i` and every coordinate moves through [`g_real`].
///
/// The exact map is monotone, so it preserves nonincreasing order; the
/// floating-point images are additionally clamped to [0, 1] and to the
/// previous coordinate, repairing sub-ulp rounding at segment breakpoints.
pub fn g_step(z: &ConnectedPoint) -> Result<ConnectedPoint, DynamicsError> {
    let mut acc = KahanSum::new();
    let mut w = 1.0f64;
    for &v in z.coords() {
        w *= 0.5;
        acc.add(w * v);
    }
    match *z.tail() {
        RealTail::Zero { .. } => {}
        RealTail::ConstReal { value, .. } => acc.add(w * value),
        RealTail::RecipRamp { a, .. } => {
            let mut k = a;
            loop {
                w *= 0.5;
                acc.add(w / k as f64);
                if w < 1e-17 {
                    break;
                }
                k += 1;
            }
        }
    }
    let z0 = z.z0().shift(acc.value());

    let mut coords = Vec::with_capacity(z.coords().len());
    let mut prev = 1.0f64;
    for &v in z.coords() {
        let image = g_real(v)?;
        let clamped = image.clamp(0.0, prev);
        coords.push(clamped);
        prev = clamped;
    }
    let tail = match *z.tail() {
        RealTail::Zero { start } => RealTail::Zero { start },
        RealTail::ConstReal { start, value } => {
            RealTail::ConstReal { start, value: g_real(value)?.clamp(0.0, prev) }
        }
        RealTail::RecipRamp { start, a } => RealTail::RecipRamp { start, a: a + 1 },
    };
    Ok(ConnectedPoint { z0, coords, tail })
}
