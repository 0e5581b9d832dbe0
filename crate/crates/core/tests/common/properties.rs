//! Property bodies shared by the proptest suites and the acceptance run.

use crnbal_core::algebra::{falling_factorial, integer_kernel_basis, vector_factorial};
use crnbal_core::balance::{
    check_mcdb, check_rndb, cycle_functional_raw, cycle_functional_simplified, f_vector, wsdb_holds,
    McdbConfig,
};
use crnbal_core::stochastic::{
    class_states, detailed_balance_certificate, stationary_anderson, stationary_rndb,
    stationary_rndb_with_offset,
};
use crnbal_core::ReactionNetwork;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use super::random::{arb_network, balanced_rates, free_rates, random_closed_walk};

pub type PropResult = Result<(), TestCaseError>;

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn ff(x: &[i64], y: &[i64]) -> BigInt {
    falling_factorial(x, y).unwrap()
}

/// `(a, b, x)` with `x >= a, b` componentwise.
pub fn arb_quotient_inputs() -> impl Strategy<Value = (Vec<i64>, Vec<i64>, Vec<i64>)> {
    (1usize..=3).prop_flat_map(|s| {
        (
            prop::collection::vec(0i64..=6, s),
            prop::collection::vec(0i64..=6, s),
            prop::collection::vec(0i64..=4, s),
        )
            .prop_map(|(a, b, extra)| {
                let x = a.iter().zip(&b).zip(&extra).map(|((p, q), e)| p.max(q) + e).collect();
                (a, b, x)
            })
    })
}

/// `(a, u, x)` with `a >= 0`, `a + u >= 0`, `x >= a`.
pub fn arb_shift_inputs() -> impl Strategy<Value = (Vec<i64>, Vec<i64>, Vec<i64>)> {
    (1usize..=3).prop_flat_map(|s| {
        (
            prop::collection::vec(0i64..=6, s),
            prop::collection::vec(0i64..=6, s),
            prop::collection::vec(0i64..=4, s),
        )
            .prop_map(|(a, target, extra)| {
                let u = sub(&target, &a);
                let x = add(&a, &extra);
                (a, u, x)
            })
    })
}

/// A network with a seed and a per-species lift, the input of the walk-based properties.
pub fn arb_walk_input() -> impl Strategy<Value = (ReactionNetwork, u64, u64, Vec<i64>)> {
    (arb_network(5), any::<u64>(), any::<u64>(), prop::collection::vec(0i64..=3, 3))
}

pub fn quotient_of_falling_factorials(a: &[i64], b: &[i64], x: &[i64]) -> PropResult {
    // (x)_a / (x)_b = (x-b)_{a-b} / (x-a)_{b-a}, denominators cleared
    let lhs = ff(x, a) * ff(&sub(x, a), &sub(b, a));
    let rhs = ff(x, b) * ff(&sub(x, b), &sub(a, b));
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

pub fn shifted_falling_factorials(a: &[i64], u: &[i64], x: &[i64]) -> PropResult {
    // (x)_a / (x+u)_{a+u} = (x)_{-u} / (x+u)_u = x! / (x+u)!
    let xu = add(x, u);
    let neg: Vec<i64> = u.iter().map(|v| -v).collect();
    let first = ff(x, a) * vector_factorial(&xu);
    let second = ff(&xu, &add(a, u)) * vector_factorial(x);
    prop_assert_eq!(&first, &second);
    prop_assert_eq!(ff(x, &neg) * vector_factorial(&xu), ff(&xu, u) * vector_factorial(x));
    Ok(())
}

pub fn backward_reactants_are_shifted_forward_ones(net: &ReactionNetwork) -> PropResult {
    for c in net.classes() {
        let back = c.negated();
        prop_assert_eq!(back.r(), c.r());
        for (y, yb) in c.reactants.iter().zip(&back.reactants) {
            prop_assert_eq!(yb, &add(y, &c.u));
        }
        prop_assert_eq!(&back.m, &add(&c.m, &c.u));
        prop_assert_eq!(&back.forward_labels, &c.backward_labels);
    }
    Ok(())
}

pub fn f_vector_symmetry_and_single_reaction(net: &ReactionNetwork, a: &[i64]) -> PropResult {
    let a = &a[..net.num_species()];
    for c in net.classes() {
        if !c.based_at(a) {
            continue;
        }
        let next = add(a, &c.u);
        prop_assert_eq!(f_vector(&c.negated(), &next).unwrap(), f_vector(c, a).unwrap());
        if c.r() == 1 {
            prop_assert_eq!(f_vector(c, a).unwrap(), vec![BigInt::one()]);
        }
    }
    Ok(())
}

pub fn minimum_factor_products_telescope(net: &ReactionNetwork, seed: u64, lift: &[i64]) -> PropResult {
    let cycle = random_closed_walk(net, seed, &lift[..net.num_species()]);
    let base = cycle.base.clone().unwrap();
    let states: Vec<Vec<i64>> = cycle.partial_sums(net).iter().map(|p| add(&base, p)).collect();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (j, step) in cycle.steps.iter().enumerate() {
        let c = net.classes()[step.class].oriented(step.negative);
        num *= ff(&states[j], &c.m);
        den *= ff(&states[j + 1], &c.negated().m);
    }
    prop_assert_eq!(num, den);
    Ok(())
}

pub fn raw_and_simplified_functionals_agree(
    net: &ReactionNetwork,
    walk_seed: u64,
    rate_seed: u64,
    lift: &[i64],
) -> PropResult {
    let rates = free_rates(net, rate_seed);
    let cycle = random_closed_walk(net, walk_seed, &lift[..net.num_species()]);
    let raw = cycle_functional_raw(net, &rates, &cycle).unwrap();
    let short = cycle_functional_simplified(net, &rates, &cycle).unwrap();
    prop_assert_eq!(&raw, &short);
    let back = cycle_functional_simplified(net, &rates, &cycle.reversed()).unwrap();
    prop_assert_eq!(raw * back, BigRational::one());
    Ok(())
}

fn sample_states(net: &ReactionNetwork) -> Vec<Vec<i64>> {
    let s = net.num_species();
    (0..27)
        .map(|i| (0..s).map(|j| (i / 3i64.pow(j as u32)) % 3 + 1).collect())
        .collect()
}

/// RNDB-consistent rates pass the cycle check on every cycle up to length 6,
/// each tested at 20 base states.
pub fn balanced_rates_pass_every_cycle(net: &ReactionNetwork, seed: u64) -> PropResult {
    let (rates, _) = balanced_rates(net, seed);
    prop_assert!(check_rndb(net, &rates).unwrap());
    let config = McdbConfig { max_len: 6, n_states: 20, ..McdbConfig::default() };
    prop_assert!(check_mcdb(net, &rates, &config).unwrap());
    Ok(())
}

pub fn product_form_balance_matches_rndb(net: &ReactionNetwork, seed: u64, balanced: bool) -> PropResult {
    let rates = if balanced { balanced_rates(net, seed).0 } else { free_rates(net, seed) };
    let states = sample_states(net);
    prop_assert_eq!(wsdb_holds(net, &rates, &states).unwrap(), check_rndb(net, &rates).unwrap());
    Ok(())
}

/// Three reference states, two exponent solutions and the product-form route
/// give the same exact law, and every law passes the pairwise balance check.
pub fn stationary_law_is_independent_of_reference_and_exponents(
    net: &ReactionNetwork,
    seed: u64,
    start: &[i64],
) -> PropResult {
    let cap = 5;
    let (rates, x) = balanced_rates(net, seed);
    let a0 = &start[..net.num_species()];
    let base = stationary_rndb(net, &rates, a0, cap).unwrap();
    prop_assert!(detailed_balance_certificate(net, &rates, &base).unwrap());

    let class = class_states(net, a0, cap).unwrap();
    for k in [class.len() / 2, class.len() - 1] {
        let other = stationary_rndb(net, &rates, &class[k], cap).unwrap();
        prop_assert_eq!(&base.exact, &other.exact);
        prop_assert!(detailed_balance_certificate(net, &rates, &other).unwrap());
    }

    let vectors: Vec<Vec<i64>> = net.classes().iter().map(|c| c.u.clone()).collect();
    let offset = integer_kernel_basis(&vectors)
        .into_iter()
        .next()
        .unwrap_or_else(|| vec![BigInt::zero(); vectors.len()]);
    let shifted = stationary_rndb_with_offset(net, &rates, a0, cap, &offset).unwrap();
    prop_assert_eq!(&base.exact, &shifted.exact);

    let anderson = stationary_anderson(net, &rates, &x, a0, cap).unwrap();
    prop_assert_eq!(&base.exact, &anderson.exact);
    Ok(())
}
