//! Detailed-balance analysis for reversible mass-action reaction networks.
//!
//! The crate derives the exact rate-constant relations under which the
//! deterministic model is detailed balanced (RNDB) and under which the
//! stochastic model's Markov chain is detailed balanced (MCDB), and computes
//! stationary distributions when they hold.

pub mod algebra;
pub mod balance;
pub mod network;
pub mod parser;
pub mod stochastic;

pub use algebra::{AlgebraError, ConstraintSystem, MonomialConstraint};
pub use network::{
    build_network, Complex, NetworkError, ReactionNetwork, ReactionVectorClass,
    ReversibleReaction, Species, State,
};
pub use parser::{parse_network, serialize_network, IncompleteRates, ParseError, RateAssignment};
pub use stochastic::{Distribution, StochasticError};
