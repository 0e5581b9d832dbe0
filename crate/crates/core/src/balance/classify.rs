use num_traits::ToPrimitive;
use serde::Serialize;

use super::functional::f_vector;
use crate::algebra::{matrix_rank, saturated_span_basis};
use crate::network::{add, ReactionNetwork, State};

/// Structural tests on one class `u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassFlags {
    pub class: usize,
    pub u: Vec<i64>,
    pub r: usize,
    /// `u` is outside the rational span of the other class vectors.
    pub span_excluded: bool,
    /// `F(u, a) = F(u, a + v)` for every tested `a` in the box and every
    /// `v = ±` lattice basis vector of that span, wherever `u` is based at both.
    pub f_invariant_on_box: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    /// Every reaction vector carries exactly one reaction, so RNDB and MCDB
    /// impose the same conditions.
    pub single_reaction_per_vector: bool,
    /// One class only: the chain moves along a line and is always detailed balanced.
    pub birth_death: bool,
    /// Every class passes both structural tests, so MCDB holds for all rates.
    /// The invariance test is checked on a finite box, not proved.
    pub unconditional_mcdb: bool,
    /// Classes passing both tests with more than one reaction: their RNDB ratio
    /// relations are not needed for MCDB.
    pub strict_gap_classes: Vec<usize>,
    pub box_width: i64,
    pub classes: Vec<ClassFlags>,
}

fn box_states(s: usize, width: i64) -> Vec<State> {
    let mut out = vec![vec![0i64; s]];
    for j in 0..s {
        let mut next = Vec::with_capacity(out.len() * (width as usize + 1));
        for a in &out {
            for x in 0..=width {
                let mut b = a.clone();
                b[j] = x;
                next.push(b);
            }
        }
        out = next;
    }
    out
}

pub fn classify(net: &ReactionNetwork) -> Classification {
    let classes = net.classes();
    let s = net.num_species();
    let width = classes.iter().map(|c| c.max_degree()).max().unwrap_or(0) + 2;
    let states = box_states(s, width);
    let mut flags = Vec::new();
    for (idx, c) in classes.iter().enumerate() {
        let others: Vec<Vec<i64>> = classes
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != idx)
            .map(|(_, o)| o.u.clone())
            .collect();
        let mut with_u = others.clone();
        with_u.push(c.u.clone());
        let span_excluded = others.is_empty() || matrix_rank(&with_u) > matrix_rank(&others);
        let directions: Vec<Vec<i64>> = saturated_span_basis(&others, s)
            .iter()
            .map(|v| v.iter().map(|x| x.to_i64().expect("small")).collect::<Vec<i64>>())
            .flat_map(|v| {
                let neg = v.iter().map(|x| -x).collect();
                [v, neg]
            })
            .collect();
        let f_invariant_on_box = directions.iter().all(|v| {
            states.iter().all(|a| {
                let b = add(a, v);
                if b.iter().any(|&x| x < 0) || !c.based_at(a) || !c.based_at(&b) {
                    return true;
                }
                f_vector(c, a).ok() == f_vector(c, &b).ok()
            })
        });
        flags.push(ClassFlags {
            class: idx,
            u: c.u.clone(),
            r: c.r(),
            span_excluded,
            f_invariant_on_box,
        });
    }
    let passes = |f: &ClassFlags| f.span_excluded && f.f_invariant_on_box;
    Classification {
        single_reaction_per_vector: classes.iter().all(|c| c.r() == 1),
        birth_death: classes.len() == 1,
        unconditional_mcdb: flags.iter().all(passes),
        strict_gap_classes: flags
            .iter()
            .filter(|f| passes(f) && f.r > 1)
            .map(|f| f.class)
            .collect(),
        box_width: width,
        classes: flags,
    }
}
