//! Property checks over randomly generated inputs: metric axioms, truncation
//! accuracy, invariance of the dynamics, witness containment, harmonic
//! identities, and representation round-trips.

use liyorke_core::*;
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn arb_point() -> impl Strategy<Value = Point> {
    (0.0f64..1.0, proptest::collection::vec(1u64..=30, 0..=4), 0u8..3, 1u64..=30).prop_map(
        |(x0, mut prefix, kind, tail_seed)| {
            prefix.sort_unstable();
            let start = prefix.len() + 1;
            let floor = prefix.last().copied().unwrap_or(1);
            let tail = match kind {
                0 => TailSpec::infinity(start),
                1 => TailSpec::constant(start, tail_seed.max(floor)),
                _ => TailSpec::arith(start, tail_seed.max(floor)),
            };
            Point::new(x0, prefix, tail).expect("sorted prefix with clamped tail is valid")
        },
    )
}

/// Direct weighted sum to depth 64; the remainder beyond is below 2^-64.
fn metric_oracle(a: &Point, b: &Point) -> f64 {
    let mut acc = KahanSum::new();
    acc.add(circle_dist(a.x0(), b.x0()));
    let mut w = 1.0;
    for i in 1..=64usize {
        w *= 0.5;
        acc.add(w * coordinate_dist(a.coordinate(i), b.coordinate(i)));
    }
    acc.value()
}

fn ext_plus(v: ExtNat, n: u64) -> ExtNat {
    match v {
        ExtNat::Finite(k) => ExtNat::Finite(k + n),
        ExtNat::Infinity => ExtNat::Infinity,
    }
}

proptest! {
    #[test]
    fn metric_matches_direct_sum(a in arb_point(), b in arb_point()) {
        let d = metric_d(&a, &b, TOL);
        prop_assert!((d - metric_oracle(&a, &b)).abs() <= TOL);
    }

    #[test]
    fn metric_is_symmetric_and_bounded(a in arb_point(), b in arb_point()) {
        prop_assert_eq!(metric_d(&a, &b, TOL), metric_d(&b, &a, TOL));
        prop_assert!(metric_d(&a, &b, TOL) <= 1.5 + TOL);
    }

    #[test]
    fn metric_vanishes_only_on_the_diagonal(a in arb_point(), b in arb_point()) {
        prop_assert_eq!(metric_d(&a, &a, TOL), 0.0);
        // Points that differ visibly in an early coordinate stay apart even
        // after truncation.
        let visible = (1..=8usize).any(|i| {
            coordinate_dist(a.coordinate(i), b.coordinate(i)) > 1e-3
        });
        if visible {
            prop_assert!(metric_d(&a, &b, TOL) > 0.0);
        }
    }

    #[test]
    fn metric_satisfies_the_triangle_inequality(
        a in arb_point(),
        b in arb_point(),
        c in arb_point(),
    ) {
        let ac = metric_d(&a, &c, TOL);
        let ab = metric_d(&a, &b, TOL);
        let bc = metric_d(&b, &c, TOL);
        prop_assert!(ac <= ab + bc + 3.0 * TOL);
    }

    #[test]
    fn step_advances_every_coordinate(p in arb_point()) {
        let q = step(&p);
        for i in 1..=12usize {
            prop_assert_eq!(q.coordinate(i), p.coordinate(i).successor());
        }
        prop_assert_eq!(q.tail().start(), p.tail().start());
    }

    #[test]
    fn evolve_matches_iterated_stepping(p in arb_point(), n in 0u64..=40) {
        let fast = evolve(&p, n, TOL);
        let mut slow = p.clone();
        for _ in 0..n {
            slow = step(&slow);
        }
        prop_assert!(circle_dist(fast.x0(), slow.x0()) <= TOL);
        prop_assert_eq!(fast.realize(16), slow.realize(16));
    }

    #[test]
    fn evolve_composes(p in arb_point(), a in 0u64..=2000, b in 0u64..=2000) {
        let two_hops = evolve(&evolve(&p, a, TOL / 4.0), b, TOL / 4.0);
        let one_hop = evolve(&p, a + b, TOL);
        prop_assert!(circle_dist(two_hops.x0(), one_hop.x0()) <= TOL);
        prop_assert_eq!(two_hops.realize(16), one_hop.realize(16));
    }

    #[test]
    fn tails_close_under_advancement(
        kind in 0u8..3,
        start in 1usize..=6,
        value in 1u64..=30,
        n in 0u64..=1000,
        probe in 0usize..=10,
    ) {
        let tail = match kind {
            0 => TailSpec::infinity(start),
            1 => TailSpec::constant(start, value),
            _ => TailSpec::arith(start, value),
        };
        let i = start + probe;
        prop_assert_eq!(tail.advanced(n).value_at(i), ext_plus(tail.value_at(i), n));
    }

    #[test]
    fn witnesses_live_in_their_neighborhood(
        p in arb_point(),
        delta in prop::sample::select(vec![0.5, 0.25, 0.05]),
        free_seed in 1usize..=6,
    ) {
        let free_index = free_seed.min(p.infinity_start().unwrap_or(usize::MAX));
        let u = NeighborhoodSpec::new(delta, free_index).unwrap();
        let (y, params) = ly_witness(&p, &u).unwrap();
        prop_assert!(in_neighborhood(&y, &p, &u));
        prop_assert!(metric_d(&p, &y, TOL) < delta);
        // The witness always flips the shape: finite centers get ∞-tailed
        // neighbors and vice versa.
        prop_assert_ne!(p.all_finite(), y.all_finite());
        prop_assert!(params.m >= u.free_index());
    }

    #[test]
    fn shift_and_residual_close_the_window_identity(
        a in 1u64..=50,
        gap in 0u64..=50,
        n in 1u64..=1000,
    ) {
        let b = a + gap;
        let lhs = CircleValue::new(delta_shift(a, b).unwrap().get() + harmonic_window(b, n));
        let rhs = CircleValue::new(
            harmonic_window(a, n) + gamma_residual(a, b, n).unwrap().get(),
        );
        prop_assert!(circle_dist(lhs, rhs) <= 1e-9);
        // The residual obeys its uniform decay bound.
        prop_assert!(gamma_residual(a, b, n).unwrap().get() <= gap as f64 / n as f64 + 1e-12);
    }

    #[test]
    fn window_telescopes_against_single_steps(k in 1u64..=30, r in 0u64..=30) {
        let n = 1000u64;
        // Advancing the start by r and adding the skipped reciprocals
        // reproduces the original window.
        let mut skipped = KahanSum::new();
        for t in 0..r {
            skipped.add(1.0 / (k + t) as f64);
        }
        let lhs = harmonic_window(k, n);
        let rhs = skipped.value() + harmonic_window(k + r, n) - harmonic_window(k + n, r);
        prop_assert!((lhs - rhs).abs() <= 1e-10);
    }

    #[test]
    fn found_hits_reverify_independently(
        p in 0u32..=6,
        m in 1u64..=50,
        target in 0.0f64..1.0,
        eps in prop::sample::select(vec![0.01, 0.05, 0.2]),
    ) {
        let req = HitRequest::new(p, m, CircleValue::new(target), eps, 5_000_000).unwrap();
        match find_mod1_hit(&req) {
            Ok(v) => {
                prop_assert!((1..=5_000_000).contains(&v));
                prop_assert!(circle_dist(req.value_at(v), req.target()) < eps);
            }
            Err(HarmonicError::BudgetExhausted { best_dist, .. }) => {
                // Small weights genuinely need enormous budgets; the report
                // must still carry a meaningful closest approach.
                prop_assert!(best_dist.is_finite());
            }
            Err(other) => prop_assert!(false, "unexpected error {other:?}"),
        }
    }

    #[test]
    fn emitted_points_reparse_equal(p in arb_point()) {
        let v = io::point_to_value(&p);
        let back = io::point_from_value(&v).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn formatted_decimals_reparse_closely(v in -1.5f64..1.5) {
        let parsed: f64 = io::format_decimal(v).parse().unwrap();
        // 15 significant digits pin the error to half an ulp of the 15th
        // digit: 5e-16 below 1, 5e-15 up to 10.
        let bound = if v.abs() < 1.0 { 1e-15 } else { 6e-15 };
        prop_assert!((parsed - v).abs() <= bound);
    }

    #[test]
    fn staircase_recomposes_its_input(x in 1e-8f64..=1.0) {
        let (k, t) = staircase(x).unwrap();
        prop_assert!(k >= 1);
        prop_assert!(t > 0.0 && t <= 1.0);
        let left = 1.0 / k as f64;
        let right = 1.0 / (k as f64 - 1.0).max(1.0);
        let rebuilt = if k == 1 { 1.0 } else { left + t * (right - left) };
        prop_assert!((rebuilt - x).abs() <= 1e-12);
    }

    #[test]
    fn order_model_step_commutes_with_embedding(p in arb_point(), n in 0u64..=5) {
        let mut q = p.clone();
        let mut z = embed(&p);
        for _ in 0..n {
            q = step(&q);
            z = g_step(&z).unwrap();
        }
        let direct = embed(&q);
        prop_assert!(circle_dist(z.z0(), direct.z0()) <= 1e-10);
        for i in 1..=12usize {
            prop_assert!((z.coordinate(i) - direct.coordinate(i)).abs() <= 1e-10);
        }
    }
}
