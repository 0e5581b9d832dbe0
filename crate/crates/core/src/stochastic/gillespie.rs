use std::collections::HashMap;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Distribution, StochasticError};
use crate::network::{ReactionNetwork, State};
use crate::parser::{IncompleteRates, RateAssignment};

/// Name of the generator behind every simulation, recorded in outputs.
pub const RNG_ALGORITHM: &str = "ChaCha8";

struct Channel {
    delta: Vec<i64>,
    terms: Vec<(Vec<i64>, f64)>,
}

/// Exact-jump simulator with float rates; one channel per class orientation.
pub struct Simulator {
    species: Vec<String>,
    channels: Vec<Channel>,
    propensities: Vec<f64>,
}

fn falling(a: &[i64], y: &[i64]) -> f64 {
    let mut v = 1.0;
    for (&ai, &yi) in a.iter().zip(y) {
        for t in 0..yi {
            if ai - t <= 0 {
                return 0.0;
            }
            v *= (ai - t) as f64;
        }
    }
    v
}

impl Simulator {
    pub fn new(net: &ReactionNetwork, rates: &RateAssignment) -> Result<Self, IncompleteRates> {
        rates.require_complete(net)?;
        let mut channels = Vec::new();
        for class in net.classes() {
            for negative in [false, true] {
                let c = class.oriented(negative);
                let terms = c
                    .reactants
                    .iter()
                    .zip(&c.forward_labels)
                    .map(|(y, l)| (y.clone(), rates.get_f64(l).expect("complete")))
                    .collect();
                channels.push(Channel {
                    delta: c.u.clone(),
                    terms,
                });
            }
        }
        let n = channels.len();
        Ok(Simulator {
            species: net.species_names(),
            channels,
            propensities: vec![0.0; n],
        })
    }

    /// Total jump rate out of `a`, filling the per-channel propensities.
    fn refresh(&mut self, a: &[i64]) -> f64 {
        let mut total = 0.0;
        for (p, ch) in self.propensities.iter_mut().zip(&self.channels) {
            *p = ch.terms.iter().map(|(y, k)| k * falling(a, y)).sum();
            total += *p;
        }
        total
    }

    /// Runs from `a0` until `t_end`, calling `visit(state, dwell)` for every
    /// holding interval (the last one clipped at `t_end`). Returns the number
    /// of jumps and whether the chain reached a state with no way out.
    pub fn run<R: Rng, F: FnMut(&[i64], f64, f64)>(
        &mut self,
        a0: &[i64],
        t_end: f64,
        rng: &mut R,
        mut visit: F,
    ) -> (u64, bool) {
        let mut a = a0.to_vec();
        let mut t = 0.0;
        let mut events = 0u64;
        loop {
            let total = self.refresh(&a);
            if total <= 0.0 {
                visit(&a, t, t_end - t);
                return (events, true);
            }
            let u: f64 = rng.random();
            let dt = -(1.0 - u).ln() / total;
            if t + dt >= t_end {
                visit(&a, t, t_end - t);
                return (events, false);
            }
            visit(&a, t, dt);
            t += dt;
            let mut r = rng.random::<f64>() * total;
            let mut chosen = self.channels.len() - 1;
            for (i, &p) in self.propensities.iter().enumerate() {
                if r < p {
                    chosen = i;
                    break;
                }
                r -= p;
            }
            // guard against rounding landing on a zero-propensity channel
            while self.propensities[chosen] == 0.0 {
                chosen -= 1;
            }
            for (x, d) in a.iter_mut().zip(&self.channels[chosen].delta) {
                *x += d;
            }
            events += 1;
        }
    }
}

/// A recorded path: `states[i]` is held on `[times[i], times[i+1])`, the last
/// state until `t_end`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub species: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub t_end: f64,
    pub seed: u64,
    pub rng: &'static str,
    pub absorbed: bool,
}

fn check_start(net: &ReactionNetwork, a0: &[i64]) -> Result<(), StochasticError> {
    if a0.len() != net.num_species() || a0.iter().any(|&x| x < 0) {
        return Err(StochasticError::InvalidState(a0.to_vec()));
    }
    Ok(())
}

pub fn gillespie(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    a0: &[i64],
    t_end: f64,
    seed: u64,
) -> Result<Trajectory, StochasticError> {
    check_start(net, a0)?;
    let mut sim = Simulator::new(net, rates)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut times = Vec::new();
    let mut states = Vec::new();
    let (_, absorbed) = sim.run(a0, t_end, &mut rng, |a, t, _| {
        times.push(t);
        states.push(a.to_vec());
    });
    Ok(Trajectory {
        species: sim.species,
        times,
        states,
        t_end,
        seed,
        rng: RNG_ALGORITHM,
        absorbed,
    })
}

fn from_occupation(species: Vec<String>, occupation: HashMap<State, f64>) -> Distribution {
    let mut points: Vec<(State, f64)> = occupation.into_iter().collect();
    points.sort_by(|x, y| x.0.cmp(&y.0));
    let total: f64 = points.iter().map(|p| p.1).sum();
    let (support, mass) = points
        .into_iter()
        .map(|(s, w)| (s, if total > 0.0 { w / total } else { 0.0 }))
        .unzip();
    Distribution::new(species, support, mass, None, None)
}

/// Time-weighted occupation after discarding the first `burn_in` fraction of
/// `[0, t_end]`.
pub fn empirical_distribution(traj: &Trajectory, burn_in: f64) -> Distribution {
    let start = burn_in.clamp(0.0, 1.0) * traj.t_end;
    let mut occupation: HashMap<State, f64> = HashMap::new();
    for (i, s) in traj.states.iter().enumerate() {
        let lo = traj.times[i].max(start);
        let hi = traj.times.get(i + 1).copied().unwrap_or(traj.t_end);
        if hi > lo {
            *occupation.entry(s.clone()).or_default() += hi - lo;
        }
    }
    from_occupation(traj.species.clone(), occupation)
}

/// Result of a simulation that keeps only occupation times.
#[derive(Debug, Clone)]
pub struct OccupationRun {
    pub distribution: Distribution,
    pub events: u64,
    pub absorbed: bool,
    pub seed: u64,
    pub rng: &'static str,
}

/// Same path as [`gillespie`] with the same seed, but accumulates occupation
/// times on the fly so memory does not grow with the number of jumps.
pub fn occupation_distribution(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    a0: &[i64],
    t_end: f64,
    burn_in: f64,
    seed: u64,
) -> Result<OccupationRun, StochasticError> {
    simulate_with(net, rates, a0, t_end, seed, None, burn_in, |_, _| {})
}

/// One pass that both reports the path and accumulates occupation times.
///
/// `row(t, state)` is called at every jump (`sample_interval` of `None` or 0)
/// or at `0, dt, 2dt, ..., t_end`. The path equals [`gillespie`]'s for the
/// same seed.
#[allow(clippy::too_many_arguments)]
pub fn simulate_with<F: FnMut(f64, &[i64])>(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    a0: &[i64],
    t_end: f64,
    seed: u64,
    sample_interval: Option<f64>,
    burn_in: f64,
    mut row: F,
) -> Result<OccupationRun, StochasticError> {
    check_start(net, a0)?;
    let mut sim = Simulator::new(net, rates)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = burn_in.clamp(0.0, 1.0) * t_end;
    let dt = sample_interval.filter(|d| *d > 0.0);
    let mut k = 0u64;
    let mut last = a0.to_vec();
    let mut occupation: HashMap<State, f64> = HashMap::new();
    let (events, absorbed) = sim.run(a0, t_end, &mut rng, |a, t, dwell| {
        match dt {
            Some(dt) => {
                while (k as f64) * dt < t + dwell {
                    row(k as f64 * dt, a);
                    k += 1;
                }
            }
            None => row(t, a),
        }
        let counted = (t + dwell - t.max(start)).max(0.0);
        if counted > 0.0 {
            match occupation.get_mut(a) {
                Some(w) => *w += counted,
                None => {
                    occupation.insert(a.to_vec(), counted);
                }
            }
        }
        last.clear();
        last.extend_from_slice(a);
    });
    if let Some(dt) = dt {
        while (k as f64) * dt <= t_end {
            row(k as f64 * dt, &last);
            k += 1;
        }
    }
    Ok(OccupationRun {
        distribution: from_occupation(sim.species, occupation),
        events,
        absorbed,
        seed,
        rng: RNG_ALGORITHM,
    })
}

/// `t,<species...>` rows. With `sample_interval`, writes the state at
/// `0, dt, 2dt, ..., t_end` instead of every jump.
pub fn write_trajectory_csv<W: Write>(
    traj: &Trajectory,
    mut out: W,
    sample_interval: Option<f64>,
) -> io::Result<()> {
    writeln!(out, "t,{}", traj.species.join(","))?;
    let row = |out: &mut W, t: f64, s: &[i64]| -> io::Result<()> {
        let cells: Vec<String> = s.iter().map(|x| x.to_string()).collect();
        writeln!(out, "{t},{}", cells.join(","))
    };
    match sample_interval {
        Some(dt) if dt > 0.0 => {
            let mut i = 0;
            let mut k = 0u64;
            loop {
                let t = k as f64 * dt;
                if t > traj.t_end {
                    break;
                }
                while i + 1 < traj.times.len() && traj.times[i + 1] <= t {
                    i += 1;
                }
                row(&mut out, t, &traj.states[i])?;
                k += 1;
            }
        }
        _ => {
            for (t, s) in traj.times.iter().zip(&traj.states) {
                row(&mut out, *t, s)?;
            }
        }
    }
    Ok(())
}
