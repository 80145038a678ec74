mod common;

use common::{analytic_crosscheck, describe, log_state, random_log_state};
use proptest::prelude::*;
use rand::SeedableRng;

#[test]
fn literal_monomials_follow_the_exponent_law() {
    for (exponents, control) in [(&[3u32, 2][..], 4), (&[5, 3, 2][..], 4), (&[1, 1, 1][..], 2), (&[7][..], 3), (&[2, 0, 4][..], 3)] {
        let state = log_state(exponents, control);
        let run = analytic_crosscheck(&state, 10_000).unwrap_or_else(|e| panic!("{:?}: {e}", describe(&state)));
        assert!(run.leaves().all(|n| !n.state.is_singular()));
    }
}

#[test]
fn seeded_instances_cross_check() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let state = random_log_state(&mut rng);
        analytic_crosscheck(&state, 10_000).unwrap_or_else(|e| panic!("{:?}: {e}", describe(&state)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn every_chart_matches_its_predicted_monomial(
        exponents in prop::collection::vec(0u32..=6, 1..=4),
        control in 1u32..=8,
    ) {
        let state = log_state(&exponents, control);
        let run = analytic_crosscheck(&state, 10_000).map_err(TestCaseError::fail)?;
        prop_assert!(run.leaves().all(|n| !n.state.is_singular()));
    }
}
