//! The state space: a circle coordinate followed by a nondecreasing sequence
//! over N ∪ {∞}, finitely described by an explicit prefix plus a tail rule,
//! together with the summable product metric over such points.
//!
//! A point is x = (x_0, x_1, x_2, ...) with x_0 on the circle and
//! x_1 ≤ x_2 ≤ ... in N ∪ {∞} (∞ maximal). Coordinate distances are
//! d_0(a, b) = min(|a - b|, 1 - |a - b|) on the circle and
//! d_i(a, b) = |1/a - 1/b| with 1/∞ = 0 for i ≥ 1; the aggregate metric is
//! D(x, y) = Σ_i d_i(x_i, y_i) / 2^i, which is bounded by 3/2.
//!
//! Infinite coordinate sequences are stored as a finite prefix plus a
//! [`TailSpec`]: all-∞, constant, or arithmetic with increment 1. All three
//! shapes are closed under the coordinatewise successor that the dynamics
//! applies, so points stay finitely described forever.

use crate::circle::{circle_dist, CircleValue, KahanSum};

/// An element of N ∪ {∞} with ∞ maximal; coordinates are at least 1 so that
/// reciprocals are finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtNat {
    Finite(u64),
    Infinity,
}

impl ExtNat {
    /// 1/n for finite values, exactly 0 for ∞.
    pub fn reciprocal(self) -> f64 {
        match self {
            ExtNat::Finite(n) => 1.0 / n as f64,
            ExtNat::Infinity => 0.0,
        }
    }

    /// n + 1, with ∞ + 1 = ∞.
    pub fn successor(self) -> ExtNat {
        match self {
            ExtNat::Finite(n) => ExtNat::Finite(n + 1),
            ExtNat::Infinity => ExtNat::Infinity,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtNat::Finite(_))
    }
}

impl std::fmt::Display for ExtNat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtNat::Finite(n) => write!(f, "{n}"),
            ExtNat::Infinity => write!(f, "inf"),
        }
    }
}

/// Coordinate distance d_i(a, b) = |1/a - 1/b| with 1/∞ = 0.
pub fn coordinate_dist(a: ExtNat, b: ExtNat) -> f64 {
    (a.reciprocal() - b.reciprocal()).abs()
}

/// Finite description of all coordinates from some start index on.
///
/// Each shape is closed under the coordinatewise successor: a constant tail
/// of K becomes a constant tail of K + 1, an arithmetic tail shifts its
/// anchor by 1, and an all-∞ tail is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TailSpec {
    /// x_i = ∞ for all i ≥ start.
    Infinity { start: usize },
    /// x_i = value for all i ≥ start.
    Const { start: usize, value: u64 },
    /// x_i = a + (i - start) for all i ≥ start.
    Arith { start: usize, a: u64 },
}

impl TailSpec {
    pub fn infinity(start: usize) -> Self {
        TailSpec::Infinity { start }
    }

    pub fn constant(start: usize, value: u64) -> Self {
        TailSpec::Const { start, value }
    }

    pub fn arith(start: usize, a: u64) -> Self {
        TailSpec::Arith { start, a }
    }

    /// First index governed by the tail rule.
    pub fn start(&self) -> usize {
        match *self {
            TailSpec::Infinity { start } => start,
            TailSpec::Const { start, .. } => start,
            TailSpec::Arith { start, .. } => start,
        }
    }

    /// Tail value at index `i`; requires `i >= self.start()`.
    pub fn value_at(&self, i: usize) -> ExtNat {
        debug_assert!(i >= self.start(), "index {i} precedes tail start");
        match *self {
            TailSpec::Infinity { .. } => ExtNat::Infinity,
            TailSpec::Const { value, .. } => ExtNat::Finite(value),
            TailSpec::Arith { start, a } => ExtNat::Finite(a + (i - start) as u64),
        }
    }

    /// Value at the start index.
    pub fn first_value(&self) -> ExtNat {
        self.value_at(self.start())
    }

    /// The tail after every coordinate is advanced by `n`.
    pub fn advanced(&self, n: u64) -> TailSpec {
        match *self {
            TailSpec::Infinity { start } => TailSpec::Infinity { start },
            TailSpec::Const { start, value } => TailSpec::Const { start, value: value + n },
            TailSpec::Arith { start, a } => TailSpec::Arith { start, a: a + n },
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, TailSpec::Infinity { .. })
    }
}

/// Why a raw (x0, prefix, tail) triple does not describe a valid point.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PointError {
    #[error("coordinate sequence decreases at index {index}")]
    NotNondecreasing { index: usize },
    #[error("prefix holds ∞ at index {index}; describe trailing ∞ with an infinity tail")]
    InfinityInPrefix { index: usize },
    #[error("last prefix value {last} exceeds the tail's first value {tail_first}")]
    TailMismatch { last: u64, tail_first: u64 },
    #[error(
        "tail starts at index {start}, so the prefix must hold {expected} values, not {actual}"
    )]
    PrefixLengthMismatch { start: usize, expected: usize, actual: usize },
    #[error("coordinate at index {index} must be a positive integer")]
    ZeroCoordinate { index: usize },
    #[error("tail start index must be at least 1")]
    InvalidTailStart,
    #[error("circle coordinate must be finite, got {value}")]
    NonFiniteCircle { value: f64 },
}

/// A point of the space: circle coordinate, finite prefix for indices
/// 1..start, and a tail rule from `tail.start()` on.
///
/// Construction validates every invariant (positive coordinates,
/// nondecreasing order including the prefix-to-tail junction, prefix length
/// matching the tail start), so a held `Point` is always well formed.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    x0: CircleValue,
    prefix: Vec<u64>,
    tail: TailSpec,
}

impl Point {
    /// Builds a point from a raw circle value (reduced mod 1), a finite
    /// prefix for indices 1..tail.start(), and a tail rule.
    pub fn new(x0: f64, prefix: Vec<u64>, tail: TailSpec) -> Result<Self, PointError> {
        if !x0.is_finite() {
            return Err(PointError::NonFiniteCircle { value: x0 });
        }
        let start = tail.start();
        if start < 1 {
            return Err(PointError::InvalidTailStart);
        }
        if prefix.len() != start - 1 {
            return Err(PointError::PrefixLengthMismatch {
                start,
                expected: start - 1,
                actual: prefix.len(),
            });
        }
        for (idx, &v) in prefix.iter().enumerate() {
            let index = idx + 1;
            if v == 0 {
                return Err(PointError::ZeroCoordinate { index });
            }
            if idx > 0 && prefix[idx - 1] > v {
                return Err(PointError::NotNondecreasing { index });
            }
        }
        match tail {
            TailSpec::Infinity { .. } => {}
            TailSpec::Const { value, .. } | TailSpec::Arith { a: value, .. } => {
                if value == 0 {
                    return Err(PointError::ZeroCoordinate { index: start });
                }
                if let Some(&last) = prefix.last() {
                    if last > value {
                        return Err(PointError::TailMismatch { last, tail_first: value });
                    }
                }
            }
        }
        Ok(Point { x0: CircleValue::new(x0), prefix, tail })
    }

    pub fn x0(&self) -> CircleValue {
        self.x0
    }

    /// Finite coordinates for indices 1..tail.start().
    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn tail(&self) -> &TailSpec {
        &self.tail
    }

    /// Coordinate x_i for i ≥ 1.
    pub fn coordinate(&self, i: usize) -> ExtNat {
        assert!(i >= 1, "coordinates are indexed from 1");
        if i < self.tail.start() {
            ExtNat::Finite(self.prefix[i - 1])
        } else {
            self.tail.value_at(i)
        }
    }

    /// First index whose coordinate is ∞, if any.
    pub fn infinity_start(&self) -> Option<usize> {
        match self.tail {
            TailSpec::Infinity { start } => Some(start),
            _ => None,
        }
    }

    /// True when every coordinate is finite.
    pub fn all_finite(&self) -> bool {
        self.infinity_start().is_none()
    }

    /// Coordinates 1..=depth spelled out, for brute-force oracles.
    pub fn realize(&self, depth: usize) -> Vec<ExtNat> {
        (1..=depth).map(|i| self.coordinate(i)).collect()
    }
}

/// Validates a raw prefix that may still contain ∞ entries.
///
/// A trailing run of ∞ must be expressed through an infinity tail; an ∞
/// anywhere in the prefix is rejected rather than silently rewritten.
pub fn validate_point(x0: f64, prefix: &[ExtNat], tail: TailSpec) -> Result<Point, PointError> {
    let mut finite = Vec::with_capacity(prefix.len());
    for (idx, &v) in prefix.iter().enumerate() {
        match v {
            ExtNat::Finite(n) => finite.push(n),
            ExtNat::Infinity => return Err(PointError::InfinityInPrefix { index: idx + 1 }),
        }
    }
    Point::new(x0, finite, tail)
}

/// Why a neighborhood description is invalid.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NeighborhoodError {
    #[error("neighborhood radius must lie in (0, 1], got {delta}")]
    DeltaOutOfRange { delta: f64 },
    #[error("free index must be at least 1")]
    FreeIndexZero,
}

/// A basic neighborhood of a point: an open circle ball of radius `delta`
/// around x_0, exact agreement on coordinates 1..free_index, and no
/// constraint from `free_index` on.
///
/// The radius may be up to 1 (a radius above 1/2 covers the whole circle),
/// which keeps degenerate all-of-the-circle neighborhoods expressible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborhoodSpec {
    delta: f64,
    free_index: usize,
}

impl NeighborhoodSpec {
    pub fn new(delta: f64, free_index: usize) -> Result<Self, NeighborhoodError> {
        if !(delta > 0.0 && delta <= 1.0) || !delta.is_finite() {
            return Err(NeighborhoodError::DeltaOutOfRange { delta });
        }
        if free_index < 1 {
            return Err(NeighborhoodError::FreeIndexZero);
        }
        Ok(NeighborhoodSpec { delta, free_index })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// First coordinate index left unconstrained.
    pub fn free_index(&self) -> usize {
        self.free_index
    }
}

/// True when `y` lies in the neighborhood of `x` described by `u`:
/// circle distance below the radius and exact coordinate agreement below
/// the free index.
pub fn in_neighborhood(y: &Point, x: &Point, u: &NeighborhoodSpec) -> bool {
    if circle_dist(y.x0(), x.x0()) >= u.delta() {
        return false;
    }
    (1..u.free_index()).all(|i| y.coordinate(i) == x.coordinate(i))
}

/// The aggregate metric D(a, b) = Σ_i d_i(a_i, b_i) / 2^i within `tol` of
/// its exact value.
///
/// The series is summed term by term until both points are governed by
/// their tails; all-∞ and constant tails then close in a single geometric
/// term, while any arithmetic tail is truncated once the remaining weight
/// 2^{-i} drops below tol / 2 (every coordinate distance is at most 1, so
/// that weight bounds the discarded remainder).
pub fn metric_d(a: &Point, b: &Point, tol: f64) -> f64 {
    assert!(tol > 0.0, "tolerance must be positive");
    let mut acc = KahanSum::new();
    acc.add(circle_dist(a.x0(), b.x0()));

    let settle = a.tail.start().max(b.tail.start());
    let mut w = 1.0f64;
    for i in 1..settle {
        w *= 0.5;
        acc.add(w * coordinate_dist(a.coordinate(i), b.coordinate(i)));
    }
    // w is now 2^{-(settle-1)}, so the total weight of indices >= settle is w.
    match (settled_tail(a), settled_tail(b)) {
        (SettledTail::Infinite, SettledTail::Infinite) => {}
        (SettledTail::Infinite, SettledTail::Constant(k))
        | (SettledTail::Constant(k), SettledTail::Infinite) => {
            acc.add(w / k as f64);
        }
        (SettledTail::Constant(k1), SettledTail::Constant(k2)) => {
            acc.add(w * (1.0 / k1 as f64 - 1.0 / k2 as f64).abs());
        }
        _ => {
            let mut i = settle;
            loop {
                w *= 0.5;
                acc.add(w * coordinate_dist(a.coordinate(i), b.coordinate(i)));
                // Remaining terms are bounded by sum of 2^{-j} for j > i,
                // which equals the current weight w.
                if w <= 0.5 * tol {
                    break;
                }
                i += 1;
            }
        }
    }
    acc.value()
}

/// Tail behavior of a point beyond every tail start index.
enum SettledTail {
    Infinite,
    Constant(u64),
    Varying,
}

fn settled_tail(p: &Point) -> SettledTail {
    match *p.tail() {
        TailSpec::Infinity { .. } => SettledTail::Infinite,
        TailSpec::Const { value, .. } => SettledTail::Constant(value),
        TailSpec::Arith { .. } => SettledTail::Varying,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x0: f64, prefix: &[u64], tail: TailSpec) -> Point {
        Point::new(x0, prefix.to_vec(), tail).expect("test point is valid")
    }

    #[test]
    fn validate_accepts_ordered_input() {
        let p =
            validate_point(0.25, &[ExtNat::Finite(2), ExtNat::Finite(3)], TailSpec::constant(3, 5))
                .unwrap();
        assert_eq!(p.prefix(), &[2, 3]);
        assert_eq!(p.coordinate(3), ExtNat::Finite(5));
    }

    #[test]
    fn validate_rejects_decreasing_prefix() {
        let err =
            validate_point(0.0, &[ExtNat::Finite(3), ExtNat::Finite(2)], TailSpec::constant(3, 5))
                .unwrap_err();
        assert_eq!(err, PointError::NotNondecreasing { index: 2 });
    }

    #[test]
    fn validate_reduces_circle_coordinate() {
        let p = validate_point(1.75, &[], TailSpec::infinity(1)).unwrap();
        assert_eq!(p.x0().get(), 0.75);
    }

    #[test]
    fn validate_rejects_infinity_in_prefix() {
        let err =
            validate_point(0.0, &[ExtNat::Finite(2), ExtNat::Infinity], TailSpec::constant(3, 5))
                .unwrap_err();
        assert_eq!(err, PointError::InfinityInPrefix { index: 2 });
    }

    #[test]
    fn validate_rejects_prefix_above_tail() {
        let err = Point::new(0.0, vec![7], TailSpec::constant(2, 5)).unwrap_err();
        assert_eq!(err, PointError::TailMismatch { last: 7, tail_first: 5 });
    }

    #[test]
    fn validate_rejects_bad_lengths_and_zeros() {
        assert_eq!(
            Point::new(0.0, vec![1, 2], TailSpec::constant(2, 5)).unwrap_err(),
            PointError::PrefixLengthMismatch { start: 2, expected: 1, actual: 2 }
        );
        assert_eq!(
            Point::new(0.0, vec![0], TailSpec::constant(2, 5)).unwrap_err(),
            PointError::ZeroCoordinate { index: 1 }
        );
    }

    #[test]
    fn coordinate_reads_prefix_then_tail() {
        let p = pt(0.0, &[2, 3], TailSpec::constant(3, 5));
        assert_eq!(p.coordinate(2), ExtNat::Finite(3));

        let q = pt(0.0, &[2], TailSpec::arith(2, 4));
        assert_eq!(q.coordinate(6), ExtNat::Finite(8));

        let r = pt(0.0, &[], TailSpec::infinity(1));
        assert_eq!(r.coordinate(100), ExtNat::Infinity);
    }

    #[test]
    fn metric_is_zero_on_equal_points() {
        let p = pt(0.3, &[2, 4], TailSpec::arith(3, 6));
        assert_eq!(metric_d(&p, &p, 1e-12), 0.0);
    }

    #[test]
    fn metric_closes_infinity_vs_constant_tail() {
        // d_i = 1/2 for every i >= 1, so D = sum of 2^{-i} * 1/2 = 1/2.
        let x = pt(0.0, &[], TailSpec::infinity(1));
        let y = pt(0.0, &[], TailSpec::constant(1, 2));
        assert!((metric_d(&x, &y, 1e-12) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn metric_sees_only_circle_gap_for_identical_tails() {
        let x = pt(0.0, &[], TailSpec::constant(1, 1));
        let y = pt(0.75, &[], TailSpec::constant(1, 1));
        assert!((metric_d(&x, &y, 1e-12) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn metric_matches_deep_direct_summation() {
        let x = pt(0.1, &[1, 3], TailSpec::arith(3, 4));
        let y = pt(0.8, &[2], TailSpec::constant(2, 9));
        let tol = 1e-9;
        let mut direct = KahanSum::new();
        direct.add(circle_dist(x.x0(), y.x0()));
        let mut w = 1.0;
        for i in 1..=64 {
            w *= 0.5;
            direct.add(w * coordinate_dist(x.coordinate(i), y.coordinate(i)));
        }
        let d = metric_d(&x, &y, tol);
        assert!((d - direct.value()).abs() <= tol + 2.0f64.powi(-63));
    }

    #[test]
    fn metric_is_bounded_by_three_halves() {
        let x = pt(0.0, &[], TailSpec::infinity(1));
        let y = pt(0.5, &[], TailSpec::constant(1, 1));
        let d = metric_d(&x, &y, 1e-12);
        assert!(d <= 1.5 + 1e-12);
        assert!((d - 1.5).abs() < 1e-12);
    }

    #[test]
    fn neighborhood_requires_agreement_below_free_index() {
        let x = pt(0.0, &[2], TailSpec::infinity(2));
        let u = NeighborhoodSpec::new(0.1, 2).unwrap();
        assert!(in_neighborhood(&x, &x, &u));

        let y = pt(0.0, &[2], TailSpec::constant(2, 9));
        assert!(in_neighborhood(&y, &x, &u));

        let z = pt(0.0, &[3], TailSpec::constant(2, 9));
        assert!(!in_neighborhood(&z, &x, &u));
    }

    #[test]
    fn neighborhood_rejects_bad_parameters() {
        assert!(NeighborhoodSpec::new(0.0, 1).is_err());
        assert!(NeighborhoodSpec::new(1.5, 1).is_err());
        assert!(NeighborhoodSpec::new(0.25, 0).is_err());
        // A radius above 1/2 covers the whole circle and stays expressible.
        assert!(NeighborhoodSpec::new(0.6, 1).is_ok());
    }

    #[test]
    fn circle_gap_outside_radius_fails_membership() {
        let x = pt(0.0, &[], TailSpec::constant(1, 4));
        let y = pt(0.3, &[], TailSpec::constant(1, 4));
        let tight = NeighborhoodSpec::new(0.2, 1).unwrap();
        let loose = NeighborhoodSpec::new(0.4, 1).unwrap();
        assert!(!in_neighborhood(&y, &x, &tight));
        assert!(in_neighborhood(&y, &x, &loose));
    }
}
