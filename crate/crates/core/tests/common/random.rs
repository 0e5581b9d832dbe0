use std::collections::HashSet;

use crnbal_core::balance::{find_base_state, CycleStep, ReactionCycle};
use crnbal_core::{parse_network, RateAssignment, ReactionNetwork};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NAMES: [&str; 3] = ["A", "B", "C"];

fn complex_text(c: &[i64]) -> String {
    let terms: Vec<String> = c
        .iter()
        .zip(NAMES)
        .filter(|(&n, _)| n > 0)
        .map(|(&n, name)| if n == 1 { name.to_string() } else { format!("{n}{name}") })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Network text from raw complex pairs, dropping self-loops and repeated pairs.
pub fn network_text(pairs: &[(Vec<i64>, Vec<i64>)]) -> String {
    let mut seen = HashSet::new();
    let mut lines = Vec::new();
    for (y, z) in pairs {
        if y == z {
            continue;
        }
        let key = if y < z { (y.clone(), z.clone()) } else { (z.clone(), y.clone()) };
        if seen.insert(key) {
            lines.push(format!("{} <-> {}", complex_text(y), complex_text(z)));
        }
    }
    if lines.is_empty() {
        lines.push("0 <-> A".into());
    }
    lines.join("\n")
}

/// Up to three species, up to `max_pairs` reversible pairs, coefficients 0..=2.
pub fn arb_network(max_pairs: usize) -> impl Strategy<Value = ReactionNetwork> {
    (1usize..=3).prop_flat_map(move |s| {
        let complex = prop::collection::vec(0i64..=2, s);
        prop::collection::vec((complex.clone(), complex), 1..=max_pairs).prop_map(|pairs| {
            let text = network_text(&pairs);
            parse_network(&text).expect("generated network parses").0
        })
    })
}

fn small_rational(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(rng.random_range(1..=5i64).into(), rng.random_range(1..=5i64).into())
}

fn monomial(x: &[BigRational], y: &[i64]) -> BigRational {
    x.iter().zip(y).fold(BigRational::from_integer(1.into()), |acc, (xi, &e)| {
        acc * (0..e).fold(BigRational::from_integer(1.into()), |p, _| p * xi)
    })
}

/// A random positive point and rates balanced channel by channel at it.
pub fn balanced_rates(net: &ReactionNetwork, seed: u64) -> (RateAssignment, Vec<BigRational>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<BigRational> = (0..net.num_species()).map(|_| small_rational(&mut rng)).collect();
    let mut rates = RateAssignment::new();
    for r in net.reactions() {
        let kf = small_rational(&mut rng);
        let kb = &kf * monomial(&x, &r.reactant.coefficients) / monomial(&x, &r.product.coefficients);
        rates.insert(r.forward_label.clone(), kf);
        rates.insert(r.backward_label.clone(), kb);
    }
    (rates, x)
}

/// Independent random rates; usually not balanced.
pub fn free_rates(net: &ReactionNetwork, seed: u64) -> RateAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rates = RateAssignment::new();
    for label in net.label_order() {
        rates.insert(label, small_rational(&mut rng));
    }
    rates
}

/// A closed walk `s_1 ... s_n, -s_n ... -s_1` based at its minimal base state
/// shifted by `lift`.
pub fn random_closed_walk(net: &ReactionNetwork, seed: u64, lift: &[i64]) -> ReactionCycle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=3usize);
    let mut steps: Vec<CycleStep> = (0..n)
        .map(|_| CycleStep::new(rng.random_range(0..net.classes().len()), rng.random()))
        .collect();
    let back: Vec<CycleStep> = steps.iter().rev().map(|s| s.reversed()).collect();
    steps.extend(back);
    let cycle = ReactionCycle::new(steps);
    let base = find_base_state(net, &cycle).expect("closed walk");
    let base = base.iter().zip(lift).map(|(b, l)| b + l).collect();
    cycle.with_base(base)
}
