use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::cycles::{enumerate_cycle_types, find_base_state, ReactionCycle};
use super::functional::cycle_functional_simplified;
use super::rndb::{rndb_generators, Generator};
use super::BalanceError;
use crate::algebra::{
    canonicalize, integer_kernel_basis, pow_rational, ConstraintSystem, MonomialConstraint,
};
use crate::network::{ReactionNetwork, State};
use crate::parser::{format_rational, RateAssignment};

pub const DEFAULT_SEED: u64 = 20240101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McdbConfig {
    pub max_len: usize,
    pub n_states: usize,
    pub n_rate_trials: usize,
    pub seed: u64,
}

impl Default for McdbConfig {
    fn default() -> Self {
        McdbConfig {
            max_len: 6,
            n_states: 20,
            n_rate_trials: 5,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "decision", rename_all = "snake_case")]
pub enum GeneratorDecision {
    /// Rates violating only this relation broke the cycle condition on `cycle`
    /// (its base is the witnessing state).
    Necessary {
        cycle: String,
        state: State,
        value: String,
    },
    /// No enumerated cycle touches every label of the relation; dropped.
    NoWitnessCycle,
    /// Every sampled violation still left all cycle functionals equal to 1.
    NotForced,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorVerdict {
    pub generator: Generator,
    pub relation: String,
    #[serde(flatten)]
    pub decision: GeneratorDecision,
}

#[derive(Debug, Clone)]
pub struct McdbReport {
    pub rndb: ConstraintSystem,
    pub mcdb: ConstraintSystem,
    pub verdicts: Vec<GeneratorVerdict>,
    /// Enumerated cycle types, each with its minimal base state.
    pub cycles: Vec<ReactionCycle>,
}

fn random_ratio<R: Rng>(rng: &mut R) -> BigRational {
    loop {
        let n: i64 = rng.random_range(1..=9);
        let d: i64 = rng.random_range(1..=9);
        if n != d {
            return BigRational::new(n.into(), d.into());
        }
    }
}

/// Draws exact positive rates satisfying every relation in `constraints`
/// (a point on the positive torus they cut out), retrying until `avoid`
/// fails when given.
pub fn sample_rates_on_torus<R: Rng>(
    net: &ReactionNetwork,
    constraints: &[MonomialConstraint],
    avoid: Option<&MonomialConstraint>,
    rng: &mut R,
) -> RateAssignment {
    let labels = net.label_order();
    let n = labels.len();
    let directions: Vec<Vec<i64>> = if constraints.is_empty() {
        (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect()
    } else {
        let columns: Vec<Vec<i64>> = labels
            .iter()
            .map(|l| constraints.iter().map(|c| c.exponent(l)).collect())
            .collect();
        integer_kernel_basis(&columns)
            .iter()
            .map(|w| w.iter().map(|x| x.to_i64().expect("small")).collect())
            .collect()
    };
    let mut rates = RateAssignment::new();
    for _ in 0..64 {
        let mut values = vec![BigRational::one(); n];
        for w in &directions {
            let p = random_ratio(rng);
            for (v, &e) in values.iter_mut().zip(w) {
                if e != 0 {
                    *v *= pow_rational(&p, e).expect("nonzero base");
                }
            }
        }
        rates = RateAssignment::from_pairs(labels.iter().cloned().zip(values));
        match avoid {
            Some(z) if z.holds(rates.lookup()) == Some(true) => continue,
            _ => return rates,
        }
    }
    rates
}

/// `base` itself, then random offsets from `{0..=width}^s` above it.
pub(crate) fn sample_states<R: Rng>(base: &[i64], width: i64, n: usize, rng: &mut R) -> Vec<State> {
    let mut out = vec![base.to_vec()];
    while out.len() < n.max(1) {
        out.push(base.iter().map(|&b| b + rng.random_range(0..=width)).collect());
    }
    out
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn based_cycles(net: &ReactionNetwork, max_len: usize) -> Result<Vec<ReactionCycle>, BalanceError> {
    enumerate_cycle_types(net, max_len)
        .into_iter()
        .map(|c| {
            let base = find_base_state(net, &c)?;
            Ok(c.with_base(base))
        })
        .collect()
}

/// First state in the sample where the functional differs from 1.
fn find_violation(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    cycle: &ReactionCycle,
    config: &McdbConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Option<(State, BigRational)>, BalanceError> {
    let base = cycle.base.clone().ok_or(BalanceError::NoBaseState)?;
    let width = net.max_degree() + 2;
    for a in sample_states(&base, width, config.n_states, rng) {
        let at = ReactionCycle {
            steps: cycle.steps.clone(),
            base: Some(a.clone()),
        };
        let value = cycle_functional_simplified(net, rates, &at)?;
        if !value.is_one() {
            return Ok(Some((a, value)));
        }
    }
    Ok(None)
}

/// Runs the constraint-selection procedure and keeps the per-generator evidence.
pub fn mcdb_analysis(net: &ReactionNetwork, config: &McdbConfig) -> Result<McdbReport, BalanceError> {
    let labels = net.label_order();
    let generators = rndb_generators(net);
    let all: Vec<MonomialConstraint> = generators.iter().map(|g| g.constraint.clone()).collect();
    let rndb = canonicalize(&all, &labels)?;
    let cycles = if net.classes().len() == 1 {
        Vec::new()
    } else {
        based_cycles(net, config.max_len)?
    };
    let cycle_labels: Vec<BTreeSet<&str>> = cycles.iter().map(|c| c.labels(net)).collect();

    let mut verdicts = Vec::new();
    let mut kept = Vec::new();
    for (g_idx, g) in generators.iter().enumerate() {
        let needed: BTreeSet<&str> = g.constraint.labels().collect();
        let candidates: Vec<&ReactionCycle> = cycles
            .iter()
            .zip(&cycle_labels)
            .filter(|(_, ls)| needed.is_subset(ls))
            .map(|(c, _)| c)
            .collect();
        let decision = if candidates.is_empty() {
            GeneratorDecision::NoWitnessCycle
        } else {
            let others: Vec<MonomialConstraint> = all
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != g_idx)
                .map(|(_, c)| c.clone())
                .collect();
            let mut found = None;
            'trials: for trial in 0..config.n_rate_trials {
                let mut rng = stream_rng(config.seed, ((g_idx as u64) << 32) | trial as u64);
                let rates = sample_rates_on_torus(net, &others, Some(&g.constraint), &mut rng);
                for cycle in &candidates {
                    if let Some((state, value)) = find_violation(net, &rates, cycle, config, &mut rng)? {
                        found = Some(GeneratorDecision::Necessary {
                            cycle: cycle.describe(),
                            state,
                            value: format_rational(&value),
                        });
                        break 'trials;
                    }
                }
            }
            found.unwrap_or(GeneratorDecision::NotForced)
        };
        if matches!(decision, GeneratorDecision::Necessary { .. }) {
            kept.push(g.constraint.clone());
        }
        verdicts.push(GeneratorVerdict {
            generator: g.clone(),
            relation: g.constraint.to_string(),
            decision,
        });
    }
    let mcdb = canonicalize(&kept, &labels)?;
    Ok(McdbReport {
        rndb,
        mcdb,
        verdicts,
        cycles,
    })
}

pub fn mcdb_constraints(net: &ReactionNetwork, config: &McdbConfig) -> Result<ConstraintSystem, BalanceError> {
    Ok(mcdb_analysis(net, config)?.mcdb)
}

/// Exact cycle-condition test: every enumerated cycle type has functional 1 at
/// its base state and at `n_states - 1` random states above it.
pub fn check_mcdb(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    config: &McdbConfig,
) -> Result<bool, BalanceError> {
    rates.require_complete(net)?;
    if net.classes().len() == 1 {
        return Ok(true);
    }
    for (i, cycle) in based_cycles(net, config.max_len)?.iter().enumerate() {
        let mut rng = stream_rng(config.seed, i as u64);
        if find_violation(net, rates, cycle, config, &mut rng)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}
