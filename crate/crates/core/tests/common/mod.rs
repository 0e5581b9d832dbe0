#![allow(dead_code)]

use std::path::PathBuf;

use crnbal_core::algebra::canonicalize;
use crnbal_core::{parse_network, ConstraintSystem, MonomialConstraint, RateAssignment, ReactionNetwork};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("networks").join(name)
}

pub fn load(name: &str) -> (ReactionNetwork, RateAssignment) {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture exists");
    parse_network(&text).expect("fixture parses")
}

pub fn system(net: &ReactionNetwork, relations: &[&str]) -> ConstraintSystem {
    let cs: Vec<MonomialConstraint> = relations
        .iter()
        .map(|r| MonomialConstraint::parse_relation(r).expect("relation parses"))
        .collect();
    canonicalize(&cs, &net.label_order()).expect("labels belong to the network")
}

/// (fixture, RNDB relations, MCDB relations) for the six reference networks.
pub const REFERENCE_NETWORKS: [(&str, &[&str], &[&str]); 6] = [
    (
        "open-two-loop.crn",
        &["k2/k-2 = k3/k-3", "k1 k3 k4 = k-1 k-3 k-4"],
        &["k2/k-2 = k3/k-3", "k1 k3 k4 = k-1 k-3 k-4"],
    ),
    ("open-chain.crn", &["k2/k-2 = k3/k-3"], &["k2/k-2 = k3/k-3"]),
    ("closed-exchange.crn", &["k2/k-2 = k3/k-3"], &[]),
    (
        "mcdb-gap.crn",
        &["k1/k-1 = k2/k-2", "k3/k-3 = k4/k-4"],
        &["k3/k-3 = k4/k-4"],
    ),
    (
        "two-cycle.crn",
        &["k1/k-1 = k2/k-2", "k3 k4 k5 = k-3 k-4 k-5"],
        &["k1/k-1 = k2/k-2", "k3 k4 k5 = k-3 k-4 k-5"],
    ),
    ("decoupled.crn", &["k1/k-1 = k2/k-2", "k3/k-3 = k4/k-4"], &[]),
];

pub mod random;
pub mod oracles;
pub mod properties;
