use num_traits::ToPrimitive;
use serde::Serialize;

use super::BalanceError;
use crate::algebra::{canonicalize, integer_kernel_basis, ConstraintSystem, MonomialConstraint};
use crate::network::ReactionNetwork;
use crate::parser::RateAssignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// `k_1(u) k_i(-u) = k_1(-u) k_i(u)` within one class.
    Ratio,
    /// `prod_j (k_1(u_j) / k_1(-u_j))^{alpha_j} = 1` for a kernel vector `alpha`.
    Circuit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub kind: GeneratorKind,
    #[serde(serialize_with = "ser_constraint")]
    pub constraint: MonomialConstraint,
}

fn ser_constraint<S: serde::Serializer>(c: &MonomialConstraint, s: S) -> Result<S::Ok, S::Error> {
    c.to_json().serialize(s)
}

/// The natural, linearly independent generators of the RNDB relations: one
/// ratio relation per extra channel of each class, then one circuit relation
/// per basis vector of the integer kernel of the class vectors.
pub fn rndb_generators(net: &ReactionNetwork) -> Vec<Generator> {
    let classes = net.classes();
    let mut out = Vec::new();
    for c in classes {
        for i in 1..c.r() {
            out.push(Generator {
                kind: GeneratorKind::Ratio,
                constraint: MonomialConstraint::new([
                    (c.forward_labels[0].clone(), 1),
                    (c.backward_labels[i].clone(), 1),
                    (c.backward_labels[0].clone(), -1),
                    (c.forward_labels[i].clone(), -1),
                ]),
            });
        }
    }
    let columns: Vec<Vec<i64>> = classes.iter().map(|c| c.u.clone()).collect();
    for alpha in integer_kernel_basis(&columns) {
        let mut terms = Vec::new();
        for (c, a) in classes.iter().zip(&alpha) {
            let a = a.to_i64().expect("small kernel entry");
            terms.push((c.forward_labels[0].clone(), a));
            terms.push((c.backward_labels[0].clone(), -a));
        }
        out.push(Generator {
            kind: GeneratorKind::Circuit,
            constraint: MonomialConstraint::new(terms),
        });
    }
    out
}

pub fn rndb_constraints(net: &ReactionNetwork) -> ConstraintSystem {
    let gens: Vec<_> = rndb_generators(net)
        .into_iter()
        .map(|g| g.constraint)
        .collect();
    canonicalize(&gens, &net.label_order()).expect("generators use network labels")
}

/// Exact test of every RNDB relation at the given rates.
pub fn check_rndb(net: &ReactionNetwork, rates: &RateAssignment) -> Result<bool, BalanceError> {
    rates.require_complete(net)?;
    Ok(rndb_constraints(net)
        .holds(rates.lookup())
        .expect("rates are complete"))
}
