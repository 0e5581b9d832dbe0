//! Fixture networks for the criterion benches.

use crnbal_core::{parse_network, RateAssignment, ReactionNetwork};

pub const BISTABLE: &str = include_str!("../../core/networks/bistable.crn");
pub const PHOSPHOFRUCTOKINASE: &str = include_str!("../../core/networks/phosphofructokinase.crn");
pub const TWO_CYCLES: &str = include_str!("../../core/networks/two-cycle.crn");
pub const SQUARE: &str = include_str!("../../core/networks/mcdb-gap.crn");

pub fn load(text: &str) -> (ReactionNetwork, RateAssignment) {
    parse_network(text).expect("bundled fixture parses")
}
