//! Construction of proximity witnesses: given a point x and a basic
//! neighborhood of it, build a point y inside that neighborhood whose
//! trajectory comes arbitrarily close to x's while also separating from it
//! by nearly 1/2 infinitely often.
//!
//! The construction splits on the shape of x. When x has an all-∞ tail from
//! index M, the witness keeps everything below M and replaces the tail with
//! a large constant K, chosen as `max(x_{M-1}, ⌈2^{-M+1}/δ⌉ + 1)` so that
//! the initial distance `2^{-M+1}/K` is provably below the radius. When x is
//! all finite, the witness freezes the coordinates below a free index M
//! (with 2^{-M} < δ), replaces everything from M with ∞, and compensates the
//! circle coordinate by the dyadically weighted climb shifts
//! `Σ_{i≥1} 2^{-(i+M)} · delta_shift(x_M, x_{i+M})`, which keeps y within
//! 2^{-M} of x on the circle. Either way exactly one of the pair ends up
//! with an ∞ tail, the configuration the certifier knows how to drive.

use crate::circle::KahanSum;
use crate::harmonic::delta_shift;
use crate::space::{ExtNat, NeighborhoodSpec, Point, TailSpec};

/// Which construction produced a witness, named by the tail the witness
/// receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// x had an ∞ tail; y received a constant tail.
    ConstTail,
    /// x was all finite; y received an ∞ tail.
    InfinityTail,
}

impl WitnessKind {
    pub fn label(&self) -> &'static str {
        match self {
            WitnessKind::ConstTail => "const-tail",
            WitnessKind::InfinityTail => "infinity-tail",
        }
    }
}

/// Parameters of a constructed witness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessParams {
    /// The free index from which y's tail replaces x's coordinates.
    pub m: usize,
    /// The constant tail value, present only for [`WitnessKind::ConstTail`].
    pub k: Option<u64>,
    /// The neighborhood radius the witness was built for.
    pub delta: f64,
    pub kind: WitnessKind,
}

/// Why a witness cannot be built.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WitnessError {
    #[error("point has no ∞ tail; use the all-finite construction")]
    NotConstTailCase,
    #[error("point has ∞ coordinates; use the ∞-tail construction")]
    NotInfinityTailCase,
    #[error(
        "neighborhood pins coordinates up to {free_index}, beyond the ∞ tail starting at \
         {tail_start}; every point agreeing there keeps the same ∞ tail, so no mixed-shape \
         witness exists in this neighborhood"
    )]
    FreeIndexPinsInfinity { free_index: usize, tail_start: usize },
    #[error("radius {delta} is below the dyadic resolution reachable by a free index")]
    DeltaTooSmall { delta: f64 },
}

/// Witness for a point with an ∞ tail starting at M: y agrees with x below
/// M and carries the constant tail `K = max(x_{M-1}, ⌈2^{-M+1}/δ⌉ + 1)`,
/// giving initial distance `2^{-M+1}/K < δ`.
///
/// The neighborhood may not pin any index at or beyond M: an exact-agreement
/// constraint on an ∞ coordinate forces every neighbor to keep the whole ∞
/// tail, and no mixed-shape pair can be formed.
pub fn witness_case1(
    x: &Point,
    u: &NeighborhoodSpec,
) -> Result<(Point, WitnessParams), WitnessError> {
    let Some(tail_start) = x.infinity_start() else {
        return Err(WitnessError::NotConstTailCase);
    };
    if u.free_index() > tail_start {
        return Err(WitnessError::FreeIndexPinsInfinity { free_index: u.free_index(), tail_start });
    }
    let m = tail_start;
    let from_radius = (0.5f64.powi(m as i32 - 1) / u.delta()).ceil() as u64 + 1;
    let last_finite = x.prefix().last().copied().unwrap_or(1);
    let k = last_finite.max(from_radius);
    let y = Point::new(x.x0().get(), x.prefix().to_vec(), TailSpec::constant(m, k))
        .expect("constant tail above the last prefix value is valid");
    let params = WitnessParams { m, k: Some(k), delta: u.delta(), kind: WitnessKind::ConstTail };
    Ok((y, params))
}

/// Witness for an all-finite point: y agrees with x below
/// `M = max(free index, smallest M with 2^{-M} < δ)`, carries an ∞ tail from
/// M, and shifts its circle coordinate by
/// `-Σ_{i≥1} 2^{-(i+M)} · delta_shift(x_M, x_{i+M})`.
///
/// The shift series is below 2^{-M}, so y stays within the radius. It closes
/// exactly when the coordinates at and beyond M are constant (every term is
/// then the same value) and is truncated with remainder below 10^-18
/// otherwise.
pub fn witness_case2(
    x: &Point,
    u: &NeighborhoodSpec,
) -> Result<(Point, WitnessParams), WitnessError> {
    if !x.all_finite() {
        return Err(WitnessError::NotInfinityTailCase);
    }
    let mut m_delta = 1usize;
    let mut w = 0.5f64;
    while w >= u.delta() {
        m_delta += 1;
        w *= 0.5;
        if m_delta > 60 {
            return Err(WitnessError::DeltaTooSmall { delta: u.delta() });
        }
    }
    let m = u.free_index().max(m_delta);

    let base = match x.coordinate(m) {
        ExtNat::Finite(v) => v,
        ExtNat::Infinity => unreachable!("all-finite point has no ∞ coordinate"),
    };
    let tail_start = x.tail().start();
    let const_tail_value = match *x.tail() {
        TailSpec::Const { value, .. } => Some(value),
        _ => None,
    };

    let mut acc = KahanSum::new();
    let mut weight = 0.5f64.powi(m as i32);
    let mut i = 1usize;
    loop {
        weight *= 0.5; // now 2^{-(i+m)}
        let j = m + i;
        if j >= tail_start {
            if let Some(value) = const_tail_value {
                // All remaining shifts equal this one; the weights they
                // carry sum to twice the current weight.
                let shift = delta_shift(base, value)
                    .expect("nondecreasing coordinates keep the climb nonnegative")
                    .get();
                acc.add(shift * weight * 2.0);
                break;
            }
            if weight < 1e-18 {
                // Arithmetic tail: every shift is below 1, so the remainder
                // is bounded by the remaining weight 2^{-(i+m)}.
                break;
            }
        }
        let cj = match x.coordinate(j) {
            ExtNat::Finite(v) => v,
            ExtNat::Infinity => unreachable!("all-finite point has no ∞ coordinate"),
        };
        let shift = delta_shift(base, cj)
            .expect("nondecreasing coordinates keep the climb nonnegative")
            .get();
        acc.add(shift * weight);
        i += 1;
    }

    let y0 = x.x0().shift(-acc.value());
    let prefix: Vec<u64> = (1..m)
        .map(|i| match x.coordinate(i) {
            ExtNat::Finite(v) => v,
            ExtNat::Infinity => unreachable!("all-finite point has no ∞ coordinate"),
        })
        .collect();
    let y = Point::new(y0.get(), prefix, TailSpec::infinity(m))
        .expect("a finite nondecreasing prefix with an ∞ tail is valid");
    let params = WitnessParams { m, k: None, delta: u.delta(), kind: WitnessKind::InfinityTail };
    Ok((y, params))
}

/// Dispatches to the matching construction: ∞-tailed points receive a
/// constant-tail witness, all-finite points an ∞-tail witness. Exactly one
/// point of the returned pair has an ∞ tail.
pub fn ly_witness(x: &Point, u: &NeighborhoodSpec) -> Result<(Point, WitnessParams), WitnessError> {
    if x.infinity_start().is_some() {
        witness_case1(x, u)
    } else {
        witness_case2(x, u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::circle_dist;
    use crate::space::{in_neighborhood, metric_d};

    fn pt(x0: f64, prefix: &[u64], tail: TailSpec) -> Point {
        Point::new(x0, prefix.to_vec(), tail).expect("test point is valid")
    }

    #[test]
    fn const_tail_witness_from_the_radius_formula() {
        let x = pt(0.2, &[], TailSpec::infinity(1));
        let u = NeighborhoodSpec::new(0.1, 1).unwrap();
        let (y, params) = witness_case1(&x, &u).unwrap();
        // K = ceil(2^0 / 0.1) + 1 = 11.
        assert_eq!(params.k, Some(11));
        assert_eq!(*y.tail(), TailSpec::constant(1, 11));
        assert_eq!(y.x0(), x.x0());
        // Initial distance is 2^{-M+1}/K = 1/11, below the radius.
        let d = metric_d(&x, &y, 1e-12);
        assert!((d - 1.0 / 11.0).abs() < 1e-12);
        assert!(d < u.delta());
        assert!(in_neighborhood(&y, &x, &u));
    }

    #[test]
    fn const_tail_witness_respects_the_prefix_floor() {
        let x = pt(0.5, &[3], TailSpec::infinity(2));
        let u = NeighborhoodSpec::new(0.25, 2).unwrap();
        let (y, params) = witness_case1(&x, &u).unwrap();
        // max(3, ceil(2^{-1}/0.25) + 1) = max(3, 3) = 3.
        assert_eq!(params.k, Some(3));
        assert!(in_neighborhood(&y, &x, &u));
        assert!(params.k.unwrap() >= 3);
    }

    #[test]
    fn const_tail_witness_rejects_finite_points() {
        let x = pt(0.1, &[], TailSpec::constant(1, 4));
        let u = NeighborhoodSpec::new(0.1, 1).unwrap();
        assert_eq!(witness_case1(&x, &u).unwrap_err(), WitnessError::NotConstTailCase);
    }

    #[test]
    fn const_tail_witness_rejects_pinned_infinity_coordinates() {
        let x = pt(0.2, &[4], TailSpec::infinity(2));
        let u = NeighborhoodSpec::new(0.1, 4).unwrap();
        assert_eq!(
            witness_case1(&x, &u).unwrap_err(),
            WitnessError::FreeIndexPinsInfinity { free_index: 4, tail_start: 2 }
        );
    }

    #[test]
    fn infinity_tail_witness_with_constant_coordinates_keeps_x0() {
        // All climb shifts vanish because every coordinate from M on equals
        // the coordinate at M.
        let x = pt(0.3, &[], TailSpec::constant(1, 4));
        let u = NeighborhoodSpec::new(0.3, 2).unwrap();
        let (y, params) = witness_case2(&x, &u).unwrap();
        assert_eq!(params.m, 2);
        assert_eq!(y.x0().get(), 0.3);
        assert_eq!(y.prefix(), &[4]);
        assert_eq!(*y.tail(), TailSpec::infinity(2));
        assert!(in_neighborhood(&y, &x, &u));
    }

    #[test]
    fn infinity_tail_witness_with_wrapping_shift() {
        // delta_shift(1, 2) = 1 mod 1 = 0, so the circle coordinate again
        // stays put even though the coordinates climb.
        let x = pt(0.0, &[1], TailSpec::constant(2, 2));
        let u = NeighborhoodSpec::new(0.6, 1).unwrap();
        let (y, params) = witness_case2(&x, &u).unwrap();
        assert_eq!(params.m, 1);
        assert!(y.x0().get() < 1e-15 || y.x0().get() > 1.0 - 1e-15);
        assert_eq!(*y.tail(), TailSpec::infinity(1));
    }

    #[test]
    fn infinity_tail_witness_truncates_arith_series() {
        let x = pt(0.0, &[], TailSpec::arith(1, 2));
        let u = NeighborhoodSpec::new(0.3, 2).unwrap();
        let (y, params) = witness_case2(&x, &u).unwrap();
        assert_eq!(params.m, 2);

        // Depth-64 oracle for the shift series.
        let mut oracle = KahanSum::new();
        let m = params.m;
        let base = match x.coordinate(m) {
            ExtNat::Finite(v) => v,
            ExtNat::Infinity => unreachable!(),
        };
        for i in 1..=64usize {
            let cj = match x.coordinate(m + i) {
                ExtNat::Finite(v) => v,
                ExtNat::Infinity => unreachable!(),
            };
            let w = 0.5f64.powi((i + m) as i32);
            oracle.add(w * delta_shift(base, cj).unwrap().get());
        }
        let expected = x.x0().shift(-oracle.value());
        assert!(circle_dist(y.x0(), expected) < 1e-12);
        assert!(circle_dist(y.x0(), x.x0()) <= 0.25 + 1e-15);
    }

    #[test]
    fn infinity_tail_witness_matches_the_unreduced_formula() {
        // The construction drops a "+1" that the pre-reduction form of the
        // shift carries; on the circle both agree exactly.
        let x = pt(0.41, &[2], TailSpec::arith(2, 5));
        let u = NeighborhoodSpec::new(0.2, 1).unwrap();
        let (y, params) = witness_case2(&x, &u).unwrap();
        let m = params.m;
        let base = match x.coordinate(m) {
            ExtNat::Finite(v) => v,
            ExtNat::Infinity => unreachable!(),
        };
        let mut series = KahanSum::new();
        for i in 1..=64usize {
            let cj = match x.coordinate(m + i) {
                ExtNat::Finite(v) => v,
                ExtNat::Infinity => unreachable!(),
            };
            series.add(0.5f64.powi((i + m) as i32) * delta_shift(base, cj).unwrap().get());
        }
        let with_plus_one = crate::circle::CircleValue::new(x.x0().get() + 1.0 - series.value());
        assert!(circle_dist(y.x0(), with_plus_one) < 1e-12);
    }

    #[test]
    fn infinity_tail_witness_rejects_infinite_points() {
        let x = pt(0.1, &[], TailSpec::infinity(1));
        let u = NeighborhoodSpec::new(0.1, 1).unwrap();
        assert_eq!(witness_case2(&x, &u).unwrap_err(), WitnessError::NotInfinityTailCase);
    }

    #[test]
    fn dispatch_produces_exactly_one_infinite_tail() {
        let u = NeighborhoodSpec::new(0.25, 1).unwrap();
        let cases = [
            pt(0.2, &[], TailSpec::infinity(1)),
            pt(0.2, &[], TailSpec::constant(1, 3)),
            pt(0.9, &[2, 4], TailSpec::arith(3, 4)),
        ];
        for x in cases {
            let (y, params) = ly_witness(&x, &u).unwrap();
            assert_ne!(x.infinity_start().is_some(), y.infinity_start().is_some());
            assert!(in_neighborhood(&y, &x, &u));
            match params.kind {
                WitnessKind::ConstTail => assert!(params.k.is_some()),
                WitnessKind::InfinityTail => assert!(params.k.is_none()),
            }
        }
    }

    #[test]
    fn dispatch_stays_in_neighborhood_across_many_random_inputs() {
        // Simple deterministic pseudo-random coverage: 500 mixed inputs.
        let deltas = [0.6, 0.3, 0.26, 0.11];
        let mut counter = 0u64;
        for round in 0..500u64 {
            counter = counter.wrapping_mul(6364136223846793005).wrapping_add(round + 1);
            let x0 = (counter >> 11) as f64 / (1u64 << 53) as f64;
            let v1 = 1 + (counter % 9);
            let v2 = v1 + (counter >> 7) % 5;
            let delta = deltas[(round % 4) as usize];
            let x = match round % 3 {
                0 => pt(x0, &[v1], TailSpec::infinity(2)),
                1 => pt(x0, &[v1], TailSpec::constant(2, v2)),
                _ => pt(x0, &[v1], TailSpec::arith(2, v2)),
            };
            let max_free = x.infinity_start().unwrap_or(3);
            let u = NeighborhoodSpec::new(delta, 1 + (round as usize % max_free)).unwrap();
            let (y, params) = ly_witness(&x, &u).unwrap();
            assert!(in_neighborhood(&y, &x, &u), "witness left the neighborhood");
            assert_ne!(x.infinity_start().is_some(), y.infinity_start().is_some());
            if params.kind == WitnessKind::InfinityTail {
                // The circle shift is bounded by 2^{-M}.
                assert!(circle_dist(y.x0(), x.x0()) <= 0.5f64.powi(params.m as i32) + 1e-15);
            }
        }
    }
}
