mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{check_zone_op, fed, ZoneOp};
use tst_core::syntax::{CmpOp, Guard};
use tst_core::zones::{fed_to_guard, ClockMap};

fn op() -> impl Strategy<Value = CmpOp> {
    prop_oneof![Just(CmpOp::Lt), Just(CmpOp::Le), Just(CmpOp::Eq), Just(CmpOp::Ge), Just(CmpOp::Gt)]
}

fn guard() -> impl Strategy<Value = Guard> {
    let clock = prop_oneof![Just("x"), Just("y"), Just("z")];
    let atom = prop_oneof![
        (clock.clone(), op(), 0u32..=5).prop_map(|(x, o, c)| Guard::atom(x, o, c)),
        (clock.clone(), clock, op(), 0u32..=5)
            .prop_filter("distinct clocks", |(x, y, _, _)| x != y)
            .prop_map(|(x, y, o, c)| Guard::diag(x, y, o, c)),
        Just(Guard::True),
    ];
    atom.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Guard::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Guard::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Guard::or(a, b)),
        ]
    })
}

fn clocks() -> ClockMap {
    ClockMap::from_names(["x", "y", "z"])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn past_matches_grid(seed: u64) {
        prop_assert_eq!(check_zone_op(&mut ChaCha8Rng::seed_from_u64(seed), ZoneOp::Past, 5), Ok(()));
    }

    #[test]
    fn inverse_reset_matches_grid(seed: u64) {
        prop_assert_eq!(check_zone_op(&mut ChaCha8Rng::seed_from_u64(seed), ZoneOp::InverseReset, 5), Ok(()));
    }

    #[test]
    fn union_matches_grid(seed: u64) {
        prop_assert_eq!(check_zone_op(&mut ChaCha8Rng::seed_from_u64(seed), ZoneOp::Union, 5), Ok(()));
    }

    #[test]
    fn intersect_matches_grid(seed: u64) {
        prop_assert_eq!(check_zone_op(&mut ChaCha8Rng::seed_from_u64(seed), ZoneOp::Intersect, 5), Ok(()));
    }

    #[test]
    fn subtract_matches_grid(seed: u64) {
        prop_assert_eq!(check_zone_op(&mut ChaCha8Rng::seed_from_u64(seed), ZoneOp::Subtract, 5), Ok(()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn guard_round_trip(g in guard()) {
        let c = clocks();
        let f = fed(&g, &c);
        let back = fed(&fed_to_guard(&f, &c), &c);
        prop_assert!(f.set_eq(&back), "{} vs {}", g, fed_to_guard(&f, &c));
    }

    #[test]
    fn past_is_idempotent_and_extensive(g in guard()) {
        let f = fed(&g, &clocks());
        let p = f.past();
        prop_assert!(p.includes(&f));
        prop_assert!(p.past().set_eq(&p));
    }

    #[test]
    fn subtraction_is_set_difference(g in guard(), h in guard()) {
        let c = clocks();
        let (f, k) = (fed(&g, &c), fed(&h, &c));
        let d = f.subtract(&k);
        prop_assert!(d.intersect(&k).is_empty());
        prop_assert!(d.union(&f.intersect(&k)).set_eq(&f));
        prop_assert_eq!(f.includes(&k), k.subtract(&f).is_empty());
    }

    #[test]
    fn every_operation_keeps_parts_canonical(g in guard(), h in guard()) {
        let c = clocks();
        let (f, k) = (fed(&g, &c), fed(&h, &c));
        for r in [f.past(), f.future(), f.inverse_reset(&[1]), f.union(&k), f.intersect(&k), f.subtract(&k), f.complement()] {
            prop_assert!(r.is_canonical());
        }
    }
}
