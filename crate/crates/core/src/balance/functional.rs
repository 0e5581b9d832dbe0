use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::cycles::ReactionCycle;
use super::BalanceError;
use crate::algebra::{falling_factorial, falling_factorial_scalar, AlgebraError};
use crate::network::{add, ReactionNetwork, ReactionVectorClass};
use crate::parser::RateAssignment;

/// Shifted falling factorials `<(a - m(u))_{y_i(u) - m(u)}>_i`.
pub type FVector = Vec<BigInt>;

pub fn f_vector(class: &ReactionVectorClass, a: &[i64]) -> Result<FVector, AlgebraError> {
    if a.len() != class.u.len() {
        return Err(AlgebraError::DimensionMismatch {
            expected: class.u.len(),
            found: a.len(),
        });
    }
    Ok(class
        .reactants
        .iter()
        .map(|y| {
            a.iter()
                .zip(y)
                .zip(&class.m)
                .map(|((&ai, &yi), &mi)| falling_factorial_scalar(ai - mi, yi - mi))
                .product()
        })
        .collect())
}

fn rate(rates: &RateAssignment, label: &str) -> BigRational {
    rates.get(label).cloned().expect("checked complete")
}

fn channel_sum(rates: &RateAssignment, labels: &[String], weights: &[BigInt]) -> BigRational {
    labels
        .iter()
        .zip(weights)
        .filter(|(_, w)| !w.is_zero())
        .map(|(l, w)| rate(rates, l) * BigRational::from_integer(w.clone()))
        .sum()
}

/// `rho(a, a + u) = sum_i k_i(u) (a)_{y_i(u)}`, with `negative` selecting `-u`.
pub fn transition_rate(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    a: &[i64],
    class: usize,
    negative: bool,
) -> Result<BigRational, BalanceError> {
    rates.require_complete(net)?;
    Ok(transition_rate_unchecked(net, rates, a, class, negative)?)
}

pub(crate) fn transition_rate_unchecked(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    a: &[i64],
    class: usize,
    negative: bool,
) -> Result<BigRational, AlgebraError> {
    let c = net.classes()[class].oriented(negative);
    let weights = c
        .reactants
        .iter()
        .map(|y| falling_factorial(a, y))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(channel_sum(rates, &c.forward_labels, &weights))
}

fn base_of(cycle: &ReactionCycle) -> Result<&[i64], BalanceError> {
    cycle.base.as_deref().ok_or(BalanceError::NoBaseState)
}

/// The Kolmogorov ratio product along the cycle, straight from transition rates.
pub fn cycle_functional_raw(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    cycle: &ReactionCycle,
) -> Result<BigRational, BalanceError> {
    rates.require_complete(net)?;
    let base = base_of(cycle)?;
    let mut num = BigRational::from_integer(1.into());
    let mut den = BigRational::from_integer(1.into());
    let mut a = base.to_vec();
    for step in &cycle.steps {
        let fwd = transition_rate_unchecked(net, rates, &a, step.class, step.negative)?;
        let next = add(&a, &step.vector(net));
        let bwd = transition_rate_unchecked(net, rates, &next, step.class, !step.negative)?;
        if fwd.is_zero() || bwd.is_zero() {
            return Err(BalanceError::CycleNotBasedAtState(base.to_vec()));
        }
        num *= fwd;
        den *= bwd;
        a = next;
    }
    if a != base {
        return Err(BalanceError::NotACycle);
    }
    Ok(num / den)
}

/// Same value via `prod_j (k(u_j).F(u_j,a_j)) / (k(-u_j).F(u_j,a_j))`, where
/// the falling-factorial prefactors have telescoped away.
pub fn cycle_functional_simplified(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    cycle: &ReactionCycle,
) -> Result<BigRational, BalanceError> {
    rates.require_complete(net)?;
    let base = base_of(cycle)?;
    let mut acc = BigRational::from_integer(1.into());
    let mut a = base.to_vec();
    for step in &cycle.steps {
        let c = net.classes()[step.class].oriented(step.negative);
        if !c.based_at(&a) {
            return Err(BalanceError::CycleNotBasedAtState(base.to_vec()));
        }
        let f = f_vector(&c, &a)?;
        let fwd = channel_sum(rates, &c.forward_labels, &f);
        let bwd = channel_sum(rates, &c.backward_labels, &f);
        acc *= fwd / bwd;
        a = add(&a, &c.u);
    }
    if a != base {
        return Err(BalanceError::NotACycle);
    }
    Ok(acc)
}

/// Evaluates the cycle functional both ways and insists they agree.
pub fn cycle_functional(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    cycle: &ReactionCycle,
) -> Result<BigRational, BalanceError> {
    let raw = cycle_functional_raw(net, rates, cycle)?;
    let simplified = cycle_functional_simplified(net, rates, cycle)?;
    assert_eq!(
        raw, simplified,
        "raw and simplified cycle functionals disagree"
    );
    Ok(raw)
}
