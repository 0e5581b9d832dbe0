use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::ode::check_complex_balance_exact;
use super::{Distribution, StochasticError};
use crate::algebra::{saturated_span_basis, LatticeSolver};
use crate::balance::{check_rndb, transition_rate};
use crate::network::{add, sub, ReactionNetwork, State};
use crate::parser::RateAssignment;

fn validate_state(net: &ReactionNetwork, a: &[i64]) -> Result<(), StochasticError> {
    if a.len() != net.num_species() || a.iter().any(|&x| x < 0) {
        return Err(StochasticError::InvalidState(a.to_vec()));
    }
    Ok(())
}

/// States of `a0`'s compatibility class inside `{0..=cap}^s`, in lexicographic order.
pub fn class_states(net: &ReactionNetwork, a0: &[i64], cap: i64) -> Result<Vec<State>, StochasticError> {
    validate_state(net, a0)?;
    let s = net.num_species();
    let laws = net.conservation_laws();
    let targets: Vec<i64> = laws
        .iter()
        .map(|l| l.iter().zip(a0).map(|(c, x)| c * x).sum())
        .collect();
    let solver = net.lattice_solver();
    let saturated = saturated_span_basis(net.lattice_basis(), s)
        .iter()
        .all(|v| solver.contains_big(v));
    let mut out = Vec::new();
    if cap < 0 {
        return Ok(out);
    }
    let mut b = vec![0i64; s];
    loop {
        let conserved = laws
            .iter()
            .zip(&targets)
            .all(|(l, t)| l.iter().zip(&b).map(|(c, x)| c * x).sum::<i64>() == *t);
        if conserved && (saturated || solver.contains(&sub(&b, a0))) {
            out.push(b.clone());
        }
        // lexicographic odometer, last coordinate fastest
        let mut j = s;
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            if b[j] < cap {
                b[j] += 1;
                break;
            }
            b[j] = 0;
        }
    }
}

fn normalize(
    net: &ReactionNetwork,
    support: Vec<State>,
    weights: Vec<BigInt>,
    cap: i64,
) -> Result<Distribution, StochasticError> {
    if support.is_empty() {
        return Err(StochasticError::EmptyTruncation);
    }
    let total: BigInt = weights.iter().sum();
    let exact: Vec<BigRational> = weights
        .into_iter()
        .map(|w| BigRational::new(w, total.clone()))
        .collect();
    Ok(Distribution::from_exact(
        net.species_names(),
        support,
        exact,
        Some(cap),
    ))
}

/// `cap! / x!` for `x = 0..=cap`, so that `prod_j cap!/b_j!` is an integer
/// multiple of `1/b!` shared by every state of the box.
fn scaled_inverse_factorials(cap: i64) -> Vec<BigInt> {
    let mut out = vec![BigInt::one(); cap as usize + 1];
    for x in (0..cap as usize).rev() {
        out[x] = &out[x + 1] * BigInt::from(x + 1);
    }
    out
}

/// Powers `base^0, ..., base^n`.
fn power_table(base: &BigInt, n: i64) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(BigInt::one());
    for e in 1..=n as usize {
        out.push(&out[e - 1] * base);
    }
    out
}

/// `pi(b) ∝ (1/b!) prod_i kappa_i^{alpha_i}` where `b - a0 = sum_i alpha_i u_i`
/// and `kappa_i = k_1(u_i)/k_1(-u_i)`, over the truncated class of `a0`.
pub fn stationary_rndb(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    a0: &[i64],
    cap: i64,
) -> Result<Distribution, StochasticError> {
    let zero = vec![BigInt::zero(); net.classes().len()];
    stationary_rndb_with_offset(net, rates, a0, cap, &zero)
}

/// As [`stationary_rndb`], shifting every exponent vector by a fixed relation
/// `offset` among the reaction vectors (a different valid choice of `alpha`).
pub fn stationary_rndb_with_offset(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    a0: &[i64],
    cap: i64,
    offset: &[BigInt],
) -> Result<Distribution, StochasticError> {
    if !check_rndb(net, rates)? {
        return Err(StochasticError::NotDetailedBalanced);
    }
    let classes = net.classes();
    let s = net.num_species();
    if offset.len() != classes.len() {
        return Err(StochasticError::NotInKernel);
    }
    let mut combo = vec![BigInt::zero(); s];
    for (o, c) in offset.iter().zip(classes) {
        for (x, &u) in combo.iter_mut().zip(&c.u) {
            *x += o * u;
        }
    }
    if combo.iter().any(|x| !x.is_zero()) {
        return Err(StochasticError::NotInKernel);
    }
    let generators: Vec<Vec<i64>> = classes.iter().map(|c| c.u.clone()).collect();
    let solver = LatticeSolver::new(&generators);
    let support = class_states(net, a0, cap)?;
    let alphas: Vec<Vec<i64>> = support
        .iter()
        .map(|b| {
            let alpha = solver
                .solve(&sub(b, a0))
                .expect("class states differ from a0 by a lattice vector");
            alpha
                .iter()
                .zip(offset)
                .map(|(a, o)| (a + o).to_i64().expect("exponent fits"))
                .collect()
        })
        .collect();
    // kappa_i^alpha_i = p_i^alpha_i / q_i^alpha_i; shift exponents into
    // [0, hi - lo] so every weight is an integer over one common denominator
    let mut tables = Vec::new();
    for (i, c) in classes.iter().enumerate() {
        let kappa = rates.get(&c.forward_labels[0]).cloned().expect("complete")
            / rates.get(&c.backward_labels[0]).cloned().expect("complete");
        let lo = alphas.iter().map(|a| a[i]).min().unwrap_or(0);
        let hi = alphas.iter().map(|a| a[i]).max().unwrap_or(0);
        let p = power_table(kappa.numer(), hi - lo);
        let q = power_table(kappa.denom(), hi - lo);
        tables.push((lo, hi, p, q));
    }
    let fact = scaled_inverse_factorials(cap);
    let weights = support
        .iter()
        .zip(&alphas)
        .map(|(b, alpha)| {
            let mut w: BigInt = b.iter().map(|&x| &fact[x as usize]).product();
            for (&a, (lo, hi, p, q)) in alpha.iter().zip(&tables) {
                w *= &p[(a - lo) as usize];
                w *= &q[(hi - a) as usize];
            }
            w
        })
        .collect();
    normalize(net, support, weights, cap)
}

/// `pi(b) ∝ (x*)^b / b!` over the truncated class, for a complex-balanced `x*`.
pub fn stationary_anderson(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    x_star: &[BigRational],
    a0: &[i64],
    cap: i64,
) -> Result<Distribution, StochasticError> {
    if x_star.len() != net.num_species() || !check_complex_balance_exact(net, rates, x_star)? {
        return Err(StochasticError::NotComplexBalanced);
    }
    let support = class_states(net, a0, cap)?;
    let fact = scaled_inverse_factorials(cap.max(0));
    let tables: Vec<(Vec<BigInt>, Vec<BigInt>)> = x_star
        .iter()
        .map(|x| (power_table(x.numer(), cap), power_table(x.denom(), cap)))
        .collect();
    let weights = support
        .iter()
        .map(|b| {
            b.iter().zip(&tables).fold(BigInt::one(), |acc, (&e, (p, q))| {
                acc * &fact[e as usize] * &p[e as usize] * &q[(cap - e) as usize]
            })
        })
        .collect();
    normalize(net, support, weights, cap)
}

/// One species, one reaction vector of size 1, births possible from 0:
/// `pi(a)/pi(a-1) = rho(a-1, a) / rho(a, a-1)`, normalized on `0..=cap`.
pub fn stationary_birth_death(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    cap: i64,
) -> Result<Distribution, StochasticError> {
    rates.require_complete(net)?;
    let classes = net.classes();
    if net.num_species() != 1 || classes.len() != 1 || classes[0].u != [1] {
        return Err(StochasticError::NotBirthDeathForm);
    }
    if !classes[0].reactants.iter().any(|y| y[0] == 0) {
        return Err(StochasticError::NotBirthDeathForm);
    }
    if cap < 0 {
        return Err(StochasticError::EmptyTruncation);
    }
    let mut ratios = Vec::with_capacity(cap as usize);
    for a in 1..=cap {
        let birth = transition_rate(net, rates, &[a - 1], 0, false)?;
        let death = transition_rate(net, rates, &[a], 0, true)?;
        if birth.is_zero() || death.is_zero() {
            return Err(StochasticError::NotBirthDeathForm);
        }
        ratios.push(birth / death);
    }
    // w(a) = prod_{i<a} n_i/d_i; scale by prod_i d_i so every weight is an integer
    let mut prefix = vec![BigInt::one()];
    for r in &ratios {
        let last = prefix.last().expect("nonempty");
        prefix.push(last * r.numer());
    }
    let mut suffix = vec![BigInt::one(); ratios.len() + 1];
    for i in (0..ratios.len()).rev() {
        suffix[i] = &suffix[i + 1] * ratios[i].denom();
    }
    let weights = prefix.iter().zip(&suffix).map(|(p, s)| p * s).collect();
    let support = (0..=cap).map(|a| vec![a]).collect();
    normalize(net, support, weights, cap)
}

/// Exact check of `pi(a) rho(a, a+u) = pi(a+u) rho(a+u, a)` for every pair of
/// support states joined by a reaction vector.
pub fn detailed_balance_certificate(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    dist: &Distribution,
) -> Result<bool, StochasticError> {
    rates.require_complete(net)?;
    let Some(exact) = dist.exact.as_ref() else {
        return Ok(false);
    };
    for (a, pa) in dist.support.iter().zip(exact) {
        for (idx, c) in net.classes().iter().enumerate() {
            let next = add(a, &c.u);
            let Some(pb) = dist.get_exact(&next) else {
                continue;
            };
            let forward = transition_rate(net, rates, a, idx, false)?;
            let backward = transition_rate(net, rates, &next, idx, true)?;
            if pa * forward != pb * backward {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
