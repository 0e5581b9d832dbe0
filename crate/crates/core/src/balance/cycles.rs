use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use super::BalanceError;
use crate::network::{add, ReactionNetwork, State};

/// One step of a cycle: class index and orientation (`negative` means `-u`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CycleStep {
    pub class: usize,
    pub negative: bool,
}

impl CycleStep {
    pub fn new(class: usize, negative: bool) -> Self {
        CycleStep { class, negative }
    }

    fn from_symbol(sym: usize) -> Self {
        CycleStep {
            class: sym / 2,
            negative: sym % 2 == 1,
        }
    }

    pub fn reversed(self) -> Self {
        CycleStep {
            class: self.class,
            negative: !self.negative,
        }
    }

    pub fn vector(self, net: &ReactionNetwork) -> Vec<i64> {
        let u = &net.classes()[self.class].u;
        if self.negative {
            u.iter().map(|x| -x).collect()
        } else {
            u.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReactionCycle {
    pub steps: Vec<CycleStep>,
    pub base: Option<State>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CycleClassification {
    pub trivial: bool,
    pub irreducible: bool,
}

impl ReactionCycle {
    pub fn new(steps: Vec<CycleStep>) -> Self {
        ReactionCycle { steps, base: None }
    }

    pub fn with_base(mut self, base: State) -> Self {
        self.base = Some(base);
        self
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Traverses the cycle backwards; its functional is the reciprocal.
    pub fn reversed(&self) -> ReactionCycle {
        ReactionCycle {
            steps: self.steps.iter().rev().map(|s| s.reversed()).collect(),
            base: self.base.clone(),
        }
    }

    /// `p_0 = 0, p_j = u_1 + ... + u_j`; the last entry closes the cycle.
    pub fn partial_sums(&self, net: &ReactionNetwork) -> Vec<Vec<i64>> {
        let mut p = vec![vec![0; net.num_species()]];
        for step in &self.steps {
            let next = add(p.last().unwrap(), &step.vector(net));
            p.push(next);
        }
        p
    }

    /// All rate labels of the classes the cycle touches.
    pub fn labels<'a>(&self, net: &'a ReactionNetwork) -> BTreeSet<&'a str> {
        self.steps
            .iter()
            .flat_map(|s| net.classes()[s.class].labels().map(String::as_str))
            .collect()
    }

    /// Compact display, e.g. `(+u0, -u1, -u2)`.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .steps
            .iter()
            .map(|s| format!("{}u{}", if s.negative { "-" } else { "+" }, s.class))
            .collect();
        format!("({})", parts.join(", "))
    }
}

pub fn classify_cycle(net: &ReactionNetwork, cycle: &ReactionCycle) -> CycleClassification {
    let trivial = cycle.len() == 2
        && cycle.steps[0].class == cycle.steps[1].class
        && cycle.steps[0].negative != cycle.steps[1].negative;
    let p = cycle.partial_sums(net);
    let distinct: HashSet<&Vec<i64>> = p[..p.len() - 1].iter().collect();
    CycleClassification {
        trivial,
        irreducible: distinct.len() == cycle.len(),
    }
}

fn canonical_key(seq: &[usize]) -> Vec<usize> {
    let n = seq.len();
    let rev: Vec<usize> = seq.iter().rev().map(|s| s ^ 1).collect();
    let mut best: Option<Vec<usize>> = None;
    for base in [seq, rev.as_slice()] {
        for r in 0..n {
            let rot: Vec<usize> = base[r..].iter().chain(&base[..r]).copied().collect();
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

struct Search<'a> {
    vectors: &'a [Vec<i64>],
    max_len: usize,
    path: Vec<usize>,
    visited: Vec<Vec<i64>>,
    found: BTreeSet<(usize, Vec<usize>)>,
}

impl Search<'_> {
    fn extend(&mut self, pos: &[i64]) {
        for sym in 0..self.vectors.len() {
            let next = add(pos, &self.vectors[sym]);
            let len = self.path.len() + 1;
            if next.iter().all(|&x| x == 0) {
                if len >= 3 {
                    self.path.push(sym);
                    let key = canonical_key(&self.path);
                    self.found.insert((len, key));
                    self.path.pop();
                }
                continue;
            }
            if len >= self.max_len || self.visited.contains(&next) {
                continue;
            }
            self.path.push(sym);
            self.visited.push(next.clone());
            self.extend(&next);
            self.visited.pop();
            self.path.pop();
        }
    }
}

/// Irreducible, nontrivial cycles of length `<= max_len` over the signed class
/// vectors, one representative per rotation/reversal orbit, sorted by length.
///
/// A cycle is irreducible exactly when its partial sums `p_0, ..., p_{c-1}`
/// are pairwise distinct, so the search is over closed self-avoiding walks.
pub fn enumerate_cycle_types(net: &ReactionNetwork, max_len: usize) -> Vec<ReactionCycle> {
    let vectors: Vec<Vec<i64>> = (0..2 * net.classes().len())
        .map(|sym| CycleStep::from_symbol(sym).vector(net))
        .collect();
    let zero = vec![0; net.num_species()];
    let mut search = Search {
        vectors: &vectors,
        max_len,
        path: Vec::new(),
        visited: vec![zero.clone()],
        found: BTreeSet::new(),
    };
    for (start, first) in vectors.iter().enumerate() {
        search.path.push(start);
        search.visited.push(first.clone());
        search.extend(first);
        search.visited.pop();
        search.path.pop();
    }
    search
        .found
        .into_iter()
        .map(|(_, key)| {
            ReactionCycle::new(key.into_iter().map(CycleStep::from_symbol).collect())
        })
        .collect()
}

/// The lexicographically smallest state at which every step (and hence every
/// reverse step) has a reactant available.
///
/// Each step needs `a + p_{j-1} >= y_i(u_j)` for one of its channels; the
/// minimal states are the componentwise maxima over one channel choice per step.
pub fn find_base_state(net: &ReactionNetwork, cycle: &ReactionCycle) -> Result<State, BalanceError> {
    if cycle.is_empty() {
        return Err(BalanceError::NoBaseState);
    }
    let p = cycle.partial_sums(net);
    if p.last().unwrap().iter().any(|&x| x != 0) {
        return Err(BalanceError::NotACycle);
    }
    let s = net.num_species();
    let needs: Vec<Vec<Vec<i64>>> = cycle
        .steps
        .iter()
        .zip(&p)
        .map(|(step, pj)| {
            let c = net.classes()[step.class].oriented(step.negative);
            c.reactants
                .iter()
                .map(|y| y.iter().zip(pj).map(|(yi, pi)| yi - pi).collect())
                .collect()
        })
        .collect();
    let mut best: Option<State> = None;
    let mut choice = vec![0usize; needs.len()];
    loop {
        let mut a = vec![0i64; s];
        for (j, &i) in choice.iter().enumerate() {
            for (ak, nk) in a.iter_mut().zip(&needs[j][i]) {
                *ak = (*ak).max(*nk);
            }
        }
        if best.as_ref().is_none_or(|b| a < *b) {
            best = Some(a);
        }
        // odometer over channel choices
        let mut j = 0;
        loop {
            if j == choice.len() {
                return best.ok_or(BalanceError::NoBaseState);
            }
            choice[j] += 1;
            if choice[j] < needs[j].len() {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_network;

    #[test]
    fn network_three_has_no_cycles() {
        let (net, _) = parse_network("2A <-> A + B\nA + B <-> 2B").unwrap();
        assert!(enumerate_cycle_types(&net, 8).is_empty());
    }

    #[test]
    fn network_six_square_cycle() {
        let (net, _) = parse_network("0 <-> A\n2A <-> 3A\n0 <-> B\n2B <-> 3B").unwrap();
        let cycles = enumerate_cycle_types(&net, 4);
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].len(), 4);
        assert_eq!(enumerate_cycle_types(&net, 6).len(), 3);
    }

    #[test]
    fn base_states() {
        let (net, _) = parse_network("0 <-> A\n2A <-> A + B\nA + B <-> 2B\nB <-> 0\n").unwrap();
        let type_one = ReactionCycle::new(vec![
            CycleStep::new(0, false),
            CycleStep::new(1, true),
            CycleStep::new(2, true),
        ]);
        assert_eq!(find_base_state(&net, &type_one).unwrap(), vec![0, 1]);

        let (open, _) = parse_network("0 <-> A\n0 <-> B\n2A <-> A + B\nA + B <-> 2B").unwrap();
        let square = ReactionCycle::new(vec![
            CycleStep::new(0, false),
            CycleStep::new(1, false),
            CycleStep::new(0, true),
            CycleStep::new(1, true),
        ]);
        assert_eq!(find_base_state(&open, &square).unwrap(), vec![0, 0]);
    }

    #[test]
    fn classification_flags() {
        let (net, _) = parse_network("0 <-> A\n0 <-> B").unwrap();
        let trivial = ReactionCycle::new(vec![CycleStep::new(0, false), CycleStep::new(0, true)]);
        assert!(classify_cycle(&net, &trivial).trivial);
        let reducible = ReactionCycle::new(vec![
            CycleStep::new(0, false),
            CycleStep::new(0, true),
            CycleStep::new(1, false),
            CycleStep::new(1, true),
        ]);
        let c = classify_cycle(&net, &reducible);
        assert!(!c.trivial && !c.irreducible);
    }
}
