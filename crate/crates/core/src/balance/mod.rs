//! Detailed-balance conditions: rate-constant relations for the deterministic
//! model, the Kolmogorov cycle functional for the stochastic model, and the
//! analysis that separates the two.

mod classify;
mod cycles;
mod functional;
mod mcdb;
mod rndb;
mod wsdb;

pub use classify::{classify, ClassFlags, Classification};
pub use cycles::{
    classify_cycle, enumerate_cycle_types, find_base_state, CycleClassification, CycleStep,
    ReactionCycle,
};
pub use functional::{
    cycle_functional, cycle_functional_raw, cycle_functional_simplified, f_vector,
    transition_rate, FVector,
};
pub use mcdb::{
    check_mcdb, mcdb_analysis, mcdb_constraints, sample_rates_on_torus, GeneratorDecision, DEFAULT_SEED,
    GeneratorVerdict, McdbConfig, McdbReport,
};
pub use rndb::{check_rndb, rndb_constraints, rndb_generators, Generator, GeneratorKind};
pub use wsdb::{check_wsdb, check_wsdb_at, equilibrium_from_ratios, wsdb_holds, Equilibrium};

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::parser::IncompleteRates;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BalanceError {
    #[error(transparent)]
    IncompleteRates(#[from] IncompleteRates),
    #[error("cycle is not based at {0:?}: some transition along it has rate zero")]
    CycleNotBasedAtState(Vec<i64>),
    #[error("no state supports every step of the cycle")]
    NoBaseState,
    #[error("cycle steps do not sum to zero")]
    NotACycle,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
