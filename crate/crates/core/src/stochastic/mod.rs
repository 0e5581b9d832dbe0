//! Markov-chain and ODE views of a network: exact stationary distributions,
//! exact-jump simulation, and the deterministic mass-action vector field.

mod distribution;
mod gillespie;
mod ode;
mod stationary;

pub use distribution::{total_variation, Distribution};
pub use gillespie::{
    empirical_distribution, gillespie, occupation_distribution, simulate_with, write_trajectory_csv,
    OccupationRun, Simulator, Trajectory, RNG_ALGORITHM,
};
pub use ode::{
    check_complex_balance, check_complex_balance_exact, deterministic_rhs, find_positive_steady_state,
    jacobian, FloatRates,
};
pub use stationary::{
    class_states, detailed_balance_certificate, stationary_anderson, stationary_birth_death,
    stationary_rndb, stationary_rndb_with_offset,
};

use thiserror::Error;

use crate::balance::BalanceError;
use crate::parser::IncompleteRates;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StochasticError {
    #[error(transparent)]
    IncompleteRates(#[from] IncompleteRates),
    #[error("steady-state search did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("rates do not satisfy reaction-network detailed balance")]
    NotDetailedBalanced,
    #[error("rates are not complex balanced at the given equilibrium")]
    NotComplexBalanced,
    #[error("no state of the compatibility class lies inside the truncation box")]
    EmptyTruncation,
    #[error("network is not a one-species birth-death network with steps of size 1 from 0")]
    NotBirthDeathForm,
    #[error("state {0:?} has the wrong length or a negative entry")]
    InvalidState(Vec<i64>),
    #[error("exponent offset is not a relation among the reaction vectors")]
    NotInKernel,
    #[error(transparent)]
    Balance(#[from] BalanceError),
}
