use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::{Serialize, Serializer};
use serde_json::{json, Value};

use super::lattice::{hermite_normal_form, LatticeSolver};
use super::AlgebraError;

/// A relation `prod_l k_l^{e_l} = 1` between rate constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MonomialConstraint {
    exponents: BTreeMap<String, i64>,
}

impl MonomialConstraint {
    pub fn new<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = (S, i64)>,
        S: Into<String>,
    {
        let mut exponents = BTreeMap::new();
        for (label, e) in terms {
            *exponents.entry(label.into()).or_insert(0) += e;
        }
        exponents.retain(|_, e| *e != 0);
        MonomialConstraint { exponents }
    }

    pub fn exponents(&self) -> &BTreeMap<String, i64> {
        &self.exponents
    }

    pub fn exponent(&self, label: &str) -> i64 {
        self.exponents.get(label).copied().unwrap_or(0)
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.exponents.keys().map(String::as_str)
    }

    pub fn inverse(&self) -> Self {
        MonomialConstraint {
            exponents: self.exponents.iter().map(|(l, e)| (l.clone(), -e)).collect(),
        }
    }

    pub fn to_vector(&self, label_order: &[String]) -> Result<Vec<BigInt>, AlgebraError> {
        let mut v = vec![BigInt::zero(); label_order.len()];
        for (label, &e) in &self.exponents {
            let idx = label_order
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| AlgebraError::UnknownLabel(label.clone()))?;
            v[idx] = BigInt::from(e);
        }
        Ok(v)
    }

    /// Panics if an exponent does not fit in `i64`; lattice bases of rate
    /// relations never come close.
    pub fn from_vector(v: &[BigInt], label_order: &[String]) -> Self {
        Self::new(
            label_order
                .iter()
                .zip(v)
                .map(|(l, e)| (l.clone(), e.to_i64().expect("exponent fits in i64"))),
        )
    }

    /// Value of the monomial; `None` if a label has no rate.
    pub fn evaluate<F>(&self, rate: F) -> Option<BigRational>
    where
        F: Fn(&str) -> Option<BigRational>,
    {
        let mut acc = BigRational::one();
        for (label, &e) in &self.exponents {
            let k = rate(label)?;
            let p = pow_rational(&k, e)?;
            acc *= p;
        }
        Some(acc)
    }

    pub fn holds<F>(&self, rate: F) -> Option<bool>
    where
        F: Fn(&str) -> Option<BigRational>,
    {
        self.evaluate(rate).map(|v| v.is_one())
    }

    /// Parses relations such as `k2/k-2 = k3/k-3`, `k1 k3 k4 = k-1 k-3 k-4`
    /// or `k^2 * a = b`. Labels may contain `-`.
    pub fn parse_relation(text: &str) -> Result<Self, AlgebraError> {
        let malformed = || AlgebraError::MalformedRelation(text.to_string());
        let mut sides = text.split('=');
        let lhs = sides.next().ok_or_else(malformed)?;
        let rhs = sides.next().unwrap_or("1");
        if sides.next().is_some() {
            return Err(malformed());
        }
        let mut terms = parse_side(lhs).ok_or_else(malformed)?;
        for (l, e) in parse_side(rhs).ok_or_else(malformed)? {
            terms.push((l, -e));
        }
        Ok(Self::new(terms))
    }

    pub fn to_json(&self) -> Value {
        Value::Object(
            self.exponents
                .iter()
                .map(|(l, e)| (l.clone(), json!(e)))
                .collect(),
        )
    }
}

pub(crate) fn pow_rational(k: &BigRational, e: i64) -> Option<BigRational> {
    if e < 0 && k.is_zero() {
        return None;
    }
    let base = if e < 0 { k.recip() } else { k.clone() };
    let mut acc = BigRational::one();
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    Some(acc)
}

fn parse_side(side: &str) -> Option<Vec<(String, i64)>> {
    let mut out = Vec::new();
    let mut sign = 1;
    let cleaned: String = side
        .chars()
        .map(|c| match c {
            '*' | '·' | '(' | ')' => ' ',
            c => c,
        })
        .collect();
    for (part_idx, part) in cleaned.split('/').enumerate() {
        if part_idx > 0 {
            sign = -1;
        }
        let tokens: Vec<&str> = part.split_whitespace().collect();
        if tokens.is_empty() && part_idx > 0 {
            return None;
        }
        for tok in tokens {
            let (label, power) = match tok.split_once('^') {
                Some((l, p)) => (l, p.parse::<i64>().ok()?),
                None => (tok, 1),
            };
            if label.is_empty() {
                return None;
            }
            if label == "1" {
                continue;
            }
            if label.chars().all(|c| c.is_ascii_digit() || c == '.') {
                return None;
            }
            out.push((label.to_string(), sign * power));
        }
    }
    Some(out)
}

fn format_side(terms: &[(&String, i64)]) -> String {
    if terms.is_empty() {
        return "1".to_string();
    }
    terms
        .iter()
        .map(|(l, e)| if *e == 1 { l.to_string() } else { format!("{l}^{e}") })
        .collect::<Vec<_>>()
        .join(" ")
}

impl MonomialConstraint {
    /// `k1 k-1^-1 k2^-1 k-2 = 1`, factors in `label_order` (others last).
    pub fn product_form(&self, label_order: &[String]) -> String {
        let mut factors: Vec<(&str, i64)> = label_order
            .iter()
            .filter_map(|l| self.exponents.get(l).map(|e| (l.as_str(), *e)))
            .collect();
        for (l, e) in &self.exponents {
            if !label_order.contains(l) {
                factors.push((l, *e));
            }
        }
        if factors.is_empty() {
            return "1 = 1".into();
        }
        let text: Vec<String> = factors
            .iter()
            .map(|(l, e)| if *e == 1 { l.to_string() } else { format!("{l}^{e}") })
            .collect();
        format!("{} = 1", text.join(" "))
    }
}

impl fmt::Display for MonomialConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lhs: Vec<_> = self
            .exponents
            .iter()
            .filter(|(_, e)| **e > 0)
            .map(|(l, e)| (l, *e))
            .collect();
        let rhs: Vec<_> = self
            .exponents
            .iter()
            .filter(|(_, e)| **e < 0)
            .map(|(l, e)| (l, -*e))
            .collect();
        write!(f, "{} = {}", format_side(&lhs), format_side(&rhs))
    }
}

/// A finite set of monomial relations, compared by the lattice of exponent
/// vectors they generate.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    label_order: Vec<String>,
    constraints: Vec<MonomialConstraint>,
    canonical_basis: Vec<Vec<BigInt>>,
}

/// Builds a constraint system whose canonical basis is the Hermite normal form
/// of the exponent lattice. Two systems are equal iff their lattices coincide.
pub fn canonicalize(
    constraints: &[MonomialConstraint],
    label_order: &[String],
) -> Result<ConstraintSystem, AlgebraError> {
    let rows = constraints
        .iter()
        .map(|c| c.to_vector(label_order))
        .collect::<Result<Vec<_>, _>>()?;
    let canonical_basis = hermite_normal_form(&rows, label_order.len());
    Ok(ConstraintSystem {
        label_order: label_order.to_vec(),
        constraints: constraints
            .iter()
            .filter(|c| !c.is_trivial())
            .cloned()
            .collect(),
        canonical_basis,
    })
}

impl ConstraintSystem {
    pub fn empty(label_order: &[String]) -> Self {
        ConstraintSystem {
            label_order: label_order.to_vec(),
            constraints: Vec::new(),
            canonical_basis: Vec::new(),
        }
    }

    pub fn label_order(&self) -> &[String] {
        &self.label_order
    }

    /// The generators as supplied (trivial relations dropped).
    pub fn constraints(&self) -> &[MonomialConstraint] {
        &self.constraints
    }

    pub fn canonical_basis(&self) -> &[Vec<BigInt>] {
        &self.canonical_basis
    }

    pub fn basis_constraints(&self) -> Vec<MonomialConstraint> {
        self.canonical_basis
            .iter()
            .map(|v| MonomialConstraint::from_vector(v, &self.label_order))
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.canonical_basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.canonical_basis.is_empty()
    }

    fn solver(&self) -> LatticeSolver {
        LatticeSolver::from_big(&self.canonical_basis, self.label_order.len())
    }

    /// Whether `c` lies in the exponent lattice, i.e. is implied multiplicatively.
    pub fn implies(&self, c: &MonomialConstraint) -> Result<bool, AlgebraError> {
        let v = c.to_vector(&self.label_order)?;
        Ok(self.solver().contains_big(&v))
    }

    /// Lattice containment `other ⊆ self`.
    pub fn contains(&self, other: &ConstraintSystem) -> bool {
        if self.label_order != other.label_order {
            return false;
        }
        let solver = self.solver();
        other
            .canonical_basis
            .iter()
            .all(|v| solver.contains_big(v))
    }

    pub fn strictly_contains(&self, other: &ConstraintSystem) -> bool {
        self.contains(other) && !other.contains(self)
    }

    /// Whether every relation holds exactly at the given rates.
    pub fn holds<F>(&self, rate: F) -> Option<bool>
    where
        F: Fn(&str) -> Option<BigRational>,
    {
        for c in self.basis_constraints() {
            if !c.holds(&rate)? {
                return Some(false);
            }
        }
        Some(true)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "constraints": self.constraints.iter().map(MonomialConstraint::to_json).collect::<Vec<_>>(),
            "canonical_basis": self
                .canonical_basis
                .iter()
                .map(|row| row.iter().map(bigint_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "label_order": self.label_order,
        })
    }
}

fn bigint_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

impl PartialEq for ConstraintSystem {
    fn eq(&self, other: &Self) -> bool {
        self.label_order == other.label_order && self.canonical_basis == other.canonical_basis
    }
}

impl Eq for ConstraintSystem {}

impl Serialize for ConstraintSystem {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl fmt::Display for ConstraintSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.constraints.is_empty() {
            return write!(f, "(none)");
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
