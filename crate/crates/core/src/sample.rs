//! Random generators for points, neighborhoods, and candidate sets.
//!
//! These produce structurally valid inputs across the shapes the library
//! handles: ∞-tailed points for the proximity construction, finite points
//! with constant or arithmetic tails, shape-compatible pairs for limit
//! prediction, and candidate sets with or without a planted violation.

use rand::Rng;

use crate::dynamics::{embed, ConnectedPoint};
use crate::space::{NeighborhoodSpec, Point, TailSpec};

/// Draws a nondecreasing sequence of `len` coordinates in
/// [`first`, `max_value`].
fn nondecreasing_prefix<R: Rng + ?Sized>(
    rng: &mut R,
    len: usize,
    first: u64,
    max_value: u64,
) -> Vec<u64> {
    let mut prefix = Vec::with_capacity(len);
    let mut current = first;
    for _ in 0..len {
        current = rng.random_range(current..=max_value.max(current));
        prefix.push(current);
    }
    prefix
}

/// A point whose coordinates become ∞ at an index in [1, `max_start`], with
/// finite prefix values at most `max_value`.
pub fn random_case1_point<R: Rng + ?Sized>(rng: &mut R, max_start: usize, max_value: u64) -> Point {
    let start = rng.random_range(1..=max_start.max(1));
    let prefix = nondecreasing_prefix(rng, start - 1, 1, max_value);
    Point::new(rng.random_range(0.0..1.0), prefix, TailSpec::infinity(start))
        .expect("generated coordinates are nondecreasing")
}

/// An all-finite point with a constant tail, values at most `max_value`.
pub fn random_const_point<R: Rng + ?Sized>(rng: &mut R, max_start: usize, max_value: u64) -> Point {
    let start = rng.random_range(1..=max_start.max(1));
    let prefix = nondecreasing_prefix(rng, start - 1, 1, max_value);
    let floor = prefix.last().copied().unwrap_or(1);
    let value = rng.random_range(floor..=max_value.max(floor));
    Point::new(rng.random_range(0.0..1.0), prefix, TailSpec::constant(start, value))
        .expect("generated coordinates are nondecreasing")
}

/// An all-finite point with a constant or arithmetic tail.
pub fn random_finite_point<R: Rng + ?Sized>(
    rng: &mut R,
    max_start: usize,
    max_value: u64,
) -> Point {
    if rng.random_bool(0.5) {
        random_const_point(rng, max_start, max_value)
    } else {
        let start = rng.random_range(1..=max_start.max(1));
        let prefix = nondecreasing_prefix(rng, start - 1, 1, max_value);
        let floor = prefix.last().copied().unwrap_or(1);
        let a = rng.random_range(floor..=max_value.max(floor));
        Point::new(rng.random_range(0.0..1.0), prefix, TailSpec::arith(start, a))
            .expect("generated coordinates are nondecreasing")
    }
}

/// Any valid point: ∞-tailed, constant-tailed, or arithmetic-tailed.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, max_start: usize, max_value: u64) -> Point {
    if rng.random_bool(0.4) {
        random_case1_point(rng, max_start, max_value)
    } else {
        random_finite_point(rng, max_start, max_value)
    }
}

/// A neighborhood whose free index does not pin the ∞ tail of `p`, with
/// radius drawn from `deltas`.
pub fn neighborhood_for<R: Rng + ?Sized>(
    rng: &mut R,
    p: &Point,
    deltas: &[f64],
) -> NeighborhoodSpec {
    let max_free = p.infinity_start().unwrap_or(usize::MAX).min(6);
    let free_index = rng.random_range(1..=max_free);
    let delta = deltas[rng.random_range(0..deltas.len())];
    NeighborhoodSpec::new(delta, free_index).expect("generated parameters are in range")
}

/// A shape-compatible pair for limit prediction: both constant-tailed, both
/// arithmetic-tailed, or both ∞-tailed from the same index. Coordinates stay
/// small (at most 20) and gaps stay at most 10 so finite-horizon simulations
/// settle quickly.
pub fn random_applicable_pair<R: Rng + ?Sized>(rng: &mut R) -> (Point, Point) {
    let max_value = 20u64;
    match rng.random_range(0..3u8) {
        0 => {
            let x = random_const_point(rng, 4, max_value);
            let shift = rng.random_range(0..=10u64);
            let y_tail = match *x.tail() {
                TailSpec::Const { start, value } => TailSpec::constant(start, value + shift),
                _ => unreachable!("random_const_point yields constant tails"),
            };
            let y = Point::new(rng.random_range(0.0..1.0), x.prefix().to_vec(), y_tail)
                .expect("shifting a constant tail upward keeps coordinates nondecreasing");
            (x, y)
        }
        1 => {
            let start = rng.random_range(1..=4usize);
            let prefix = nondecreasing_prefix(rng, start - 1, 1, max_value);
            let floor = prefix.last().copied().unwrap_or(1);
            let a = rng.random_range(floor..=max_value.max(floor));
            let shift = rng.random_range(0..=10u64);
            let x =
                Point::new(rng.random_range(0.0..1.0), prefix.clone(), TailSpec::arith(start, a))
                    .expect("generated coordinates are nondecreasing");
            let y =
                Point::new(rng.random_range(0.0..1.0), prefix, TailSpec::arith(start, a + shift))
                    .expect("shifting the tail base upward keeps coordinates nondecreasing");
            (x, y)
        }
        _ => {
            let start = rng.random_range(1..=5usize);
            let x_prefix = nondecreasing_prefix(rng, start - 1, 1, max_value);
            let mut y_prefix = Vec::with_capacity(start - 1);
            let mut floor = 1u64;
            for &xv in &x_prefix {
                let gap = rng.random_range(0..=10u64);
                let yv = (xv + gap).max(floor);
                y_prefix.push(yv);
                floor = yv;
            }
            let x = Point::new(rng.random_range(0.0..1.0), x_prefix, TailSpec::infinity(start))
                .expect("generated coordinates are nondecreasing");
            let y = Point::new(rng.random_range(0.0..1.0), y_prefix, TailSpec::infinity(start))
                .expect("generated coordinates are nondecreasing");
            (x, y)
        }
    }
}

/// A random point of the order-complete model, built by embedding a random
/// point so that every tail shape stays finitely described.
pub fn random_connected_point<R: Rng + ?Sized>(rng: &mut R) -> ConnectedPoint {
    embed(&random_point(rng, 5, 30))
}

/// A candidate set containing exactly one planted violation: either two
/// points sharing an ∞ start, or two all-finite points. All other points
/// carry pairwise distinct ∞ starts.
pub fn random_refutable_set<R: Rng + ?Sized>(rng: &mut R, size: usize) -> Vec<Point> {
    let size = size.max(2);
    let mut points = distinct_start_chain(rng, size - 1);
    if rng.random_bool(0.5) {
        // Duplicate an existing ∞ start with different prefix values.
        let donor = rng.random_range(0..points.len());
        let start = points[donor].tail().start();
        let mut prefix = points[donor].prefix().to_vec();
        for v in prefix.iter_mut() {
            *v += rng.random_range(1..=5u64);
        }
        let mut floor = 1u64;
        for v in prefix.iter_mut() {
            *v = (*v).max(floor);
            floor = *v;
        }
        points.push(
            Point::new(rng.random_range(0.0..1.0), prefix, TailSpec::infinity(start))
                .expect("bumped prefix stays nondecreasing"),
        );
    } else {
        // Two all-finite points; the chain points all carry ∞ tails, so the
        // chain contributes no violation of its own. Replace one chain point
        // to keep the size, then add the finite pair partner.
        points.pop();
        points.push(random_finite_point(rng, 4, 20));
        points.push(random_finite_point(rng, 4, 20));
    }
    points
}

/// A structurally admissible candidate set: pairwise distinct ∞ starts plus
/// at most one all-finite point.
pub fn random_admissible_set<R: Rng + ?Sized>(rng: &mut R, size: usize) -> Vec<Point> {
    let size = size.max(2);
    let mut points = if rng.random_bool(0.3) {
        let mut pts = distinct_start_chain(rng, size - 1);
        pts.push(random_finite_point(rng, 4, 20));
        pts
    } else {
        distinct_start_chain(rng, size)
    };
    use rand::seq::SliceRandom;
    points.shuffle(rng);
    points
}

/// Points whose ∞ starts are 1, 2, ..., `count`.
fn distinct_start_chain<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<Point> {
    (1..=count)
        .map(|start| {
            let prefix = nondecreasing_prefix(rng, start - 1, 1, 20);
            Point::new(rng.random_range(0.0..1.0), prefix, TailSpec::infinity(start))
                .expect("generated coordinates are nondecreasing")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{predict_limit, refute_scrambled_set, RefutationVerdict};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_points_have_the_advertised_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            assert!(random_case1_point(&mut rng, 4, 30).infinity_start().is_some());
            assert!(random_finite_point(&mut rng, 4, 30).all_finite());
        }
    }

    #[test]
    fn applicable_pairs_always_predict() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (x, y) = random_applicable_pair(&mut rng);
            let p = predict_limit(&x, &y).expect("generated pairs are shape compatible");
            assert!(p.limit_d <= 0.5);
            assert!(p.max_r <= 10 + 20);
        }
    }

    #[test]
    fn refutable_sets_refute_and_admissible_sets_admit() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let bad = random_refutable_set(&mut rng, 5);
            let report = refute_scrambled_set(&bad, 1e-4, 1_000_000).unwrap();
            assert_eq!(report.verdict, RefutationVerdict::Violation);

            let good = random_admissible_set(&mut rng, 5);
            let report = refute_scrambled_set(&good, 1e-4, 1_000_000).unwrap();
            assert_eq!(report.verdict, RefutationVerdict::StructurallyAdmissible);
        }
    }

    #[test]
    fn neighborhoods_never_pin_the_infinity_tail() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let p = random_case1_point(&mut rng, 4, 30);
            let u = neighborhood_for(&mut rng, &p, &[0.25, 0.05]);
            assert!(u.free_index() <= p.tail().start());
        }
    }
}
