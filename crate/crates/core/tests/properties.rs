mod common;

use common::{cases, Case};
use proptest::prelude::*;

fn case(i: usize) -> &'static Case {
    &cases()[i]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn hecke_recurrence_holds(which in 0usize..3, a in -400i64..400, m in 1u64..160, qi in 0usize..8) {
        let c = case(which);
        let q = [2u64, 3, 5, 7, 11, 13, 17, 19]
            .into_iter()
            .filter(|&q| common::is_good_prime(c, q))
            .nth(qi % 6)
            .unwrap();
        prop_assert!(common::hecke_recurrence(c, a, m, q).is_ok(), "{:?}", common::hecke_recurrence(c, a, m, q));
    }

    #[test]
    fn any_primitive_root_gives_the_same_valuations(which in 0usize..3, choice in 0usize..4) {
        let r = common::root_change_preserves(case(which), choice);
        prop_assert!(r.is_ok(), "{:?}", r);
    }
}

#[test]
fn hecke_recurrence_on_seeded_triples() {
    for c in cases() {
        for (a, m, q) in common::hecke_triples(c, 20, 7) {
            common::hecke_recurrence(c, a, m, q).unwrap();
        }
    }
}

#[test]
fn wrong_parity_samples_vanish() {
    for c in cases() {
        assert!(common::wrong_parity_vanishes(c).unwrap() > 0);
    }
}

#[test]
fn mazur_tate_top_coefficient_is_delta() {
    for c in cases() {
        assert!(common::mazur_tate_matches(c).unwrap() > 0, "{}", c.name);
    }
}

#[test]
fn character_sums_agree_with_point_counts() {
    for c in cases() {
        assert!(common::character_sums_match(c, 200).unwrap() >= 40);
    }
}

#[test]
fn cuspidal_dimension_is_the_genus() {
    let genera: Vec<u64> = [11, 37, 389, 1058].iter().map(|&n| common::dimension_is_genus(n).unwrap()).collect();
    assert_eq!(&genera[..3], &[1, 2, 32]);
}
