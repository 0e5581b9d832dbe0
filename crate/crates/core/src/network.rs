//! Reversible reaction networks, reaction-vector classes and compatibility classes.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{hermite_normal_form, integer_kernel_basis, to_big, LatticeSolver};

/// A population vector `a` in `Z^s_{>=0}`.
pub type State = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("network needs at least one species and one reaction")]
    Empty,
    #[error("species `{0}` declared twice")]
    DuplicateSpecies(String),
    #[error("species `{0}` appears in no complex")]
    OrphanSpecies(String),
    #[error("reaction {0} has identical reactant and product")]
    SelfLoop(usize),
    #[error("rate-constant label `{0}` used more than once")]
    DuplicateRateLabel(String),
    #[error("reaction {0} duplicates an earlier reaction")]
    DuplicateReaction(usize),
    #[error("complex in reaction {0} has the wrong length or a negative coefficient")]
    InvalidComplex(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Species {
    pub name: String,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Complex {
    pub coefficients: Vec<i64>,
}

impl Complex {
    pub fn new(coefficients: Vec<i64>) -> Self {
        Complex { coefficients }
    }

    pub fn zero(s: usize) -> Self {
        Complex {
            coefficients: vec![0; s],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0)
    }

    pub fn degree(&self) -> i64 {
        self.coefficients.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReversibleReaction {
    pub reactant: Complex,
    pub product: Complex,
    pub forward_label: String,
    pub backward_label: String,
}

impl ReversibleReaction {
    pub fn new(
        reactant: Vec<i64>,
        product: Vec<i64>,
        forward_label: impl Into<String>,
        backward_label: impl Into<String>,
    ) -> Self {
        ReversibleReaction {
            reactant: Complex::new(reactant),
            product: Complex::new(product),
            forward_label: forward_label.into(),
            backward_label: backward_label.into(),
        }
    }

    pub fn vector(&self) -> Vec<i64> {
        sub(&self.product.coefficients, &self.reactant.coefficients)
    }
}

/// All reactions sharing the reaction vector `u` (up to sign).
///
/// `reactants[i] + u` is the product of channel `i`; `forward_labels[i]` names
/// `k_i(u)` and `backward_labels[i]` names the reverse channel `k_i(-u)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReactionVectorClass {
    pub u: Vec<i64>,
    pub reactants: Vec<Vec<i64>>,
    pub forward_labels: Vec<String>,
    pub backward_labels: Vec<String>,
    pub m: Vec<i64>,
}

impl ReactionVectorClass {
    /// Number of channels `r(u)`.
    pub fn r(&self) -> usize {
        self.reactants.len()
    }

    pub fn products(&self) -> Vec<Vec<i64>> {
        self.reactants.iter().map(|y| add(y, &self.u)).collect()
    }

    /// The same class seen from `-u`: `y_i(-u) = y_i(u) + u`, `m(-u) = m(u) + u`.
    pub fn negated(&self) -> ReactionVectorClass {
        ReactionVectorClass {
            u: self.u.iter().map(|x| -x).collect(),
            reactants: self.products(),
            forward_labels: self.backward_labels.clone(),
            backward_labels: self.forward_labels.clone(),
            m: add(&self.m, &self.u),
        }
    }

    /// Oriented view: `negative = true` gives the `-u` class.
    pub fn oriented(&self, negative: bool) -> ReactionVectorClass {
        if negative {
            self.negated()
        } else {
            self.clone()
        }
    }

    /// `u` is based at `a` if some channel's reactant fits inside `a`.
    pub fn based_at(&self, a: &[i64]) -> bool {
        self.reactants.iter().any(|y| leq(y, a))
    }

    pub fn labels(&self) -> impl Iterator<Item = &String> {
        self.forward_labels.iter().chain(&self.backward_labels)
    }

    pub fn max_degree(&self) -> i64 {
        self.reactants
            .iter()
            .chain(self.products().iter())
            .map(|y| y.iter().sum::<i64>())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct ReactionNetwork {
    species: Vec<Species>,
    reactions: Vec<ReversibleReaction>,
    complexes: Vec<Complex>,
    classes: Vec<ReactionVectorClass>,
    lattice_basis: Vec<Vec<i64>>,
    solver: LatticeSolver,
}

pub(crate) fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub(crate) fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn leq(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn canonical_sign(v: &[i64]) -> bool {
    v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

/// Validates a reversible network: unique species and labels, no self loops,
/// every species used.
pub fn build_network(
    species: Vec<String>,
    reactions: Vec<ReversibleReaction>,
) -> Result<ReactionNetwork, NetworkError> {
    if species.is_empty() || reactions.is_empty() {
        return Err(NetworkError::Empty);
    }
    let s = species.len();
    let mut seen = BTreeSet::new();
    for name in &species {
        if !seen.insert(name.as_str()) {
            return Err(NetworkError::DuplicateSpecies(name.clone()));
        }
    }
    let mut labels = BTreeSet::new();
    let mut pairs = BTreeSet::new();
    for (idx, rxn) in reactions.iter().enumerate() {
        for c in [&rxn.reactant, &rxn.product] {
            if c.coefficients.len() != s || c.coefficients.iter().any(|&x| x < 0) {
                return Err(NetworkError::InvalidComplex(idx + 1));
            }
        }
        if rxn.reactant == rxn.product {
            return Err(NetworkError::SelfLoop(idx + 1));
        }
        for l in [&rxn.forward_label, &rxn.backward_label] {
            if !labels.insert(l.clone()) {
                return Err(NetworkError::DuplicateRateLabel(l.clone()));
            }
        }
        let key = if rxn.reactant < rxn.product {
            (rxn.reactant.clone(), rxn.product.clone())
        } else {
            (rxn.product.clone(), rxn.reactant.clone())
        };
        if !pairs.insert(key) {
            return Err(NetworkError::DuplicateReaction(idx + 1));
        }
    }
    for (j, name) in species.iter().enumerate() {
        let used = reactions
            .iter()
            .any(|r| r.reactant.coefficients[j] > 0 || r.product.coefficients[j] > 0);
        if !used {
            return Err(NetworkError::OrphanSpecies(name.clone()));
        }
    }

    let mut complexes = Vec::new();
    for rxn in &reactions {
        for c in [&rxn.reactant, &rxn.product] {
            if !complexes.contains(c) {
                complexes.push(c.clone());
            }
        }
    }

    let mut classes: Vec<ReactionVectorClass> = Vec::new();
    let mut by_vector: HashMap<Vec<i64>, usize> = HashMap::new();
    for rxn in &reactions {
        let v = rxn.vector();
        let (u, y, fwd, bwd) = if canonical_sign(&v) {
            (v, &rxn.reactant, &rxn.forward_label, &rxn.backward_label)
        } else {
            (
                v.iter().map(|x| -x).collect(),
                &rxn.product,
                &rxn.backward_label,
                &rxn.forward_label,
            )
        };
        let idx = *by_vector.entry(u.clone()).or_insert_with(|| {
            classes.push(ReactionVectorClass {
                u,
                reactants: Vec::new(),
                forward_labels: Vec::new(),
                backward_labels: Vec::new(),
                m: Vec::new(),
            });
            classes.len() - 1
        });
        let class = &mut classes[idx];
        class.reactants.push(y.coefficients.clone());
        class.forward_labels.push(fwd.clone());
        class.backward_labels.push(bwd.clone());
    }
    for class in &mut classes {
        class.m = (0..s)
            .map(|j| class.reactants.iter().map(|y| y[j]).min().unwrap_or(0))
            .collect();
    }

    let vectors: Vec<_> = classes.iter().map(|c| to_big(&c.u)).collect();
    let lattice_basis = hermite_normal_form(&vectors, s)
        .iter()
        .map(|row| row.iter().map(|x| x.to_i64().expect("small lattice")).collect())
        .collect::<Vec<Vec<i64>>>();
    let solver = LatticeSolver::new(&lattice_basis);

    Ok(ReactionNetwork {
        species: species
            .into_iter()
            .enumerate()
            .map(|(index, name)| Species { name, index })
            .collect(),
        reactions,
        complexes,
        classes,
        lattice_basis,
        solver,
    })
}

impl ReactionNetwork {
    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn species_names(&self) -> Vec<String> {
        self.species.iter().map(|s| s.name.clone()).collect()
    }

    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    pub fn reactions(&self) -> &[ReversibleReaction] {
        &self.reactions
    }

    /// Distinct complexes in order of first appearance.
    pub fn complexes(&self) -> &[Complex] {
        &self.complexes
    }

    pub fn classes(&self) -> &[ReactionVectorClass] {
        &self.classes
    }

    /// Rate labels in reaction order: forward then backward for each line.
    pub fn label_order(&self) -> Vec<String> {
        self.reactions
            .iter()
            .flat_map(|r| [r.forward_label.clone(), r.backward_label.clone()])
            .collect()
    }

    /// Largest total stoichiometric coefficient of any complex.
    pub fn max_degree(&self) -> i64 {
        self.complexes.iter().map(Complex::degree).max().unwrap_or(0)
    }

    /// Hermite basis of the stoichiometric lattice.
    pub fn lattice_basis(&self) -> &[Vec<i64>] {
        &self.lattice_basis
    }

    pub fn lattice_solver(&self) -> &LatticeSolver {
        &self.solver
    }

    /// Integer vectors `c` with `c . u = 0` for every reaction vector.
    pub fn conservation_laws(&self) -> Vec<Vec<i64>> {
        let s = self.num_species();
        let columns: Vec<Vec<i64>> = (0..s)
            .map(|j| self.classes.iter().map(|c| c.u[j]).collect())
            .collect();
        integer_kernel_basis(&columns)
            .iter()
            .map(|row| row.iter().map(|x| x.to_i64().expect("small")).collect())
            .collect()
    }

    pub fn same_compatibility_class(&self, a: &[i64], b: &[i64]) -> bool {
        a.len() == b.len() && self.solver.contains(&sub(a, b))
    }

    pub fn format_complex(&self, c: &[i64]) -> String {
        let terms: Vec<String> = c
            .iter()
            .zip(&self.species)
            .filter(|(&n, _)| n > 0)
            .map(|(&n, sp)| {
                if n == 1 {
                    sp.name.clone()
                } else {
                    format!("{n}{}", sp.name)
                }
            })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }
}

pub fn reaction_vector_classes(net: &ReactionNetwork) -> Vec<ReactionVectorClass> {
    net.classes().to_vec()
}

pub fn stoichiometric_lattice_basis(net: &ReactionNetwork) -> Vec<Vec<i64>> {
    net.lattice_basis().to_vec()
}

pub fn same_compatibility_class(net: &ReactionNetwork, a: &[i64], b: &[i64]) -> bool {
    net.same_compatibility_class(a, b)
}

impl fmt::Display for ReactionNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.reactions {
            writeln!(
                f,
                "{} <-> {}",
                self.format_complex(&r.reactant.coefficients),
                self.format_complex(&r.product.coefficients)
            )?;
        }
        Ok(())
    }
}
