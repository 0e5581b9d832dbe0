//! Closed-form oracles shared by the regular suites and the acceptance run.
//! Each returns a short summary on success and the first mismatch otherwise.

use std::time::Instant;

use crnbal_core::balance::{check_mcdb, check_rndb, classify, mcdb_analysis, rndb_constraints, McdbConfig};
use crnbal_core::stochastic::{
    class_states, deterministic_rhs, detailed_balance_certificate, occupation_distribution,
    stationary_birth_death, stationary_rndb, total_variation,
};
use crnbal_core::{RateAssignment, ReactionNetwork};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::{load, system, REFERENCE_NETWORKS};

pub type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn pow(x: &BigRational, e: i64) -> BigRational {
    let base = if e < 0 { x.recip() } else { x.clone() };
    (0..e.abs()).fold(BigRational::one(), |acc, _| acc * &base)
}

pub fn factorial(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

pub fn binomial(n: i64, k: i64) -> BigRational {
    BigRational::from_integer(factorial(n) / (factorial(k) * factorial(n - k)))
}

/// Rates with every backward constant 1 and forward constants `k^e` in order.
pub fn horn_jackson_rates(net: &ReactionNetwork, k: &BigRational, exponents: [i64; 5]) -> RateAssignment {
    let mut rates = RateAssignment::new();
    for (r, e) in net.reactions().iter().zip(exponents) {
        rates.insert(r.forward_label.clone(), pow(k, e));
        rates.insert(r.backward_label.clone(), BigRational::one());
    }
    rates
}

pub const HORN_JACKSON_EXPONENTS: [i64; 5] = [2, 1, -2, -1, -3];

/// Lattice-equality of both constraint columns for the six reference networks.
pub fn reference_networks() -> Outcome {
    let start = Instant::now();
    for (file, rndb, mcdb) in REFERENCE_NETWORKS {
        let (net, _) = load(file);
        ensure(rndb_constraints(&net) == system(&net, rndb), || format!("{file}: RNDB column differs"))?;
        let report = mcdb_analysis(&net, &McdbConfig::default()).map_err(|e| e.to_string())?;
        ensure(report.mcdb == system(&net, mcdb), || format!("{file}: MCDB column differs"))?;
        ensure(report.rndb.contains(&report.mcdb), || format!("{file}: MCDB not implied by RNDB"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("6 networks, {secs:.2} s (limit 60 s)"))
}

/// The five-species two-cycle network: both systems equal the two stated relations.
pub fn two_cycle_constraints() -> Outcome {
    let (net, _) = load("two-cycle.crn");
    let expected = system(&net, &["k1/k-1 = k2/k-2", "k3 k4 k5 = k-3 k-4 k-5"]);
    ensure(rndb_constraints(&net) == expected, || "RNDB system differs".into())?;
    let report = mcdb_analysis(&net, &McdbConfig::default()).map_err(|e| e.to_string())?;
    ensure(report.mcdb == expected, || "MCDB system differs".into())?;
    Ok("RNDB = MCDB = {k1/k-1 = k2/k-2, k3 k4 k5 = k-3 k-4 k-5}".into())
}

/// `pi(a, 10-a) = C(10, a) k^{-a} (k/(k+1))^10` exactly.
pub fn horn_jackson_binomial(k: &BigRational) -> Outcome {
    let (net, _) = load("horn-jackson.crn");
    let rates = horn_jackson_rates(&net, k, HORN_JACKSON_EXPONENTS);
    ensure(check_rndb(&net, &rates).unwrap(), || format!("k={k}: rates not RNDB"))?;
    let d = stationary_rndb(&net, &rates, &[0, 10], 10).map_err(|e| e.to_string())?;
    ensure(d.len() == 11, || format!("k={k}: {} states, expected 11", d.len()))?;
    let lead = pow(&(k / (k + BigRational::one())), 10);
    for a in 0..=10 {
        let expected = &lead * pow(&k.recip(), a) * binomial(10, a);
        ensure(d.get_exact(&[a, 10 - a]) == Some(&expected), || format!("k={k} a={a}: mass differs"))?;
    }
    Ok(format!("k={k}: 11 masses exact"))
}

/// Product-Poisson comparison at cap 60 per species; integer cross-multiplication
/// for exactness, floats for the relative-error report.
pub fn phosphofructokinase() -> Outcome {
    let (net, rates) = load("phosphofructokinase.crn");
    ensure(classify(&net).single_reaction_per_vector, || {
        "classifier does not report one reaction per vector".into()
    })?;
    ensure(
        rndb_constraints(&net) == system(&net, &["k-1 k2 k4 = k1 k-2 k-4"]),
        || "RNDB system differs".into(),
    )?;
    let cap = 60;
    let d = stationary_rndb(&net, &rates, &[0, 0, 0], cap).map_err(|e| e.to_string())?;
    let k = |l: &str| rates.get(l).unwrap().clone();
    let n1 = k("k1") / k("k-1");
    let means = [n1.clone(), k("k2") / k("k-2"), &n1 * (k("k3") / k("k-3"))];
    let states = class_states(&net, &[0, 0, 0], cap).map_err(|e| e.to_string())?;
    ensure(states.len() == 61 * 61 * 61, || format!("{} states", states.len()))?;
    // n^x / x! scaled by denom(n)^cap * cap! per coordinate stays integral
    let weights: Vec<BigInt> = states
        .iter()
        .map(|s| {
            s.iter().zip(&means).fold(BigInt::one(), |acc, (&x, n)| {
                acc * n.numer().pow(x as u32) * n.denom().pow((cap - x) as u32) * factorial(cap)
                    / factorial(x)
            })
        })
        .collect();
    let total: BigInt = weights.iter().sum();
    let mut worst: f64 = 0.0;
    for (s, w) in states.iter().zip(&weights) {
        let got = d.get_exact(s).ok_or_else(|| format!("{s:?} missing"))?;
        ensure(got.numer() * &total == w * got.denom(), || format!("{s:?}: exact mass differs"))?;
        let e = BigRational::new_raw(w.clone(), total.clone()).to_f64().unwrap();
        if e > 0.0 {
            worst = worst.max((d.get(s) - e).abs() / e);
        }
    }
    ensure(worst < 1e-12, || format!("relative error {worst:.2e}"))?;
    ensure(d.tail_bound < 1e-8, || format!("tail bound {:.2e}", d.tail_bound))?;
    Ok(format!(
        "226981 states exact, float rel. error {worst:.1e} (limit 1e-12), tail {:.1e} (limit 1e-8)",
        d.tail_bound
    ))
}

/// Deterministic roots, exact two-mode stationary law, and the RNDB/MCDB split.
pub fn bistable_bimodal() -> Outcome {
    let start = Instant::now();
    let (net, rates) = load("bistable.crn");
    for x in [5.0, 27.0, 100.0] {
        let v = deterministic_rhs(&net, &rates, &[x]).map_err(|e| e.to_string())?[0];
        ensure(v.abs() < 1e-9, || format!("rhs({x}) = {v:e}"))?;
    }
    let d = stationary_birth_death(&net, &rates, 200).map_err(|e| e.to_string())?;
    // brute scan of the product of birth/death ratios
    let k = |l: &str| rates.get(l).unwrap().clone();
    let mut w = vec![BigRational::one()];
    for a in 1..=200i64 {
        let f = BigRational::from_integer(((a - 1) * (a - 2)).into());
        let num = k("k1") + k("k2") * &f;
        let den = k("k-1") + k("k-2") * &f;
        let prev = w.last().unwrap().clone();
        w.push(prev * num / (den * BigRational::from_integer(a.into())));
    }
    let total: BigRational = w.iter().sum();
    for (a, wa) in w.iter().enumerate() {
        ensure(d.get_exact(&[a as i64]) == Some(&(wa / &total)), || format!("mass at {a} differs"))?;
    }
    let maxima = d.local_maxima();
    ensure(
        maxima.len() == 2 && (maxima[0] - 5).abs() <= 2 && (maxima[1] - 100).abs() <= 2,
        || format!("local maxima {maxima:?}"),
    )?;
    ensure(!check_rndb(&net, &rates).unwrap(), || "rates unexpectedly RNDB".into())?;
    ensure(
        check_mcdb(&net, &rates, &McdbConfig::default()).unwrap(),
        || "MCDB check failed".into(),
    )?;
    ensure(
        detailed_balance_certificate(&net, &rates, &d).unwrap(),
        || "detailed balance certificate failed".into(),
    )?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 5.0, || format!("took {secs:.2} s"))?;
    Ok(format!("rhs zero within 1e-9 at 5, 27, 100, maxima {maxima:?}, RNDB no, MCDB yes, {secs:.2} s (limit 5 s)"))
}

/// Total variation between the time-weighted occupation of one long run and
/// the exact stationary law, with the run time.
pub fn bistable_simulation_tv(t_end: f64, seed: u64) -> Result<(f64, u64, f64), String> {
    let (net, rates) = load("bistable.crn");
    let start = Instant::now();
    let run = occupation_distribution(&net, &rates, &[5], t_end, 0.1, seed).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let exact = stationary_birth_death(&net, &rates, 200).map_err(|e| e.to_string())?;
    Ok((total_variation(&run.distribution, &exact), run.events, secs))
}
