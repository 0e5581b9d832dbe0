//! Randomized checks of the main implications on small reversible networks.

mod common;

use common::random::arb_network;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn balanced_rates_pass_every_cycle(net in arb_network(5), seed in any::<u64>()) {
        common::properties::balanced_rates_pass_every_cycle(&net, seed)?;
    }

    #[test]
    fn product_form_balance_matches_rndb(
        net in arb_network(5),
        seed in any::<u64>(),
        balanced in any::<bool>(),
    ) {
        common::properties::product_form_balance_matches_rndb(&net, seed, balanced)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn stationary_law_is_independent_of_reference_and_exponents(
        net in arb_network(4),
        seed in any::<u64>(),
        start in prop::collection::vec(0i64..=3, 3),
    ) {
        common::properties::stationary_law_is_independent_of_reference_and_exponents(&net, seed, &start)?;
    }
}
