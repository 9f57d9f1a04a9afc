//! Brute-force comparison of three term sets for a represented term `w`:
//! what rewriting reaches, what the saturated E-graph puts in `w`'s class,
//! and the congruence generated by the rules together with the input graph.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::egraph::EGraph;
use crate::term::{all_terms_up_to, rewrite_closure, Signature, Term, TermError, Trs};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepresentationError {
    #[error("term {0} is not represented in the saturated E-graph")]
    NotRepresented(Term),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// Blocks of a partition over a finite set of terms.
#[derive(Debug, Clone, Default)]
pub struct Partition {
    block: BTreeMap<Term, usize>,
}

impl Partition {
    pub fn same(&self, a: &Term, b: &Term) -> bool {
        match (self.block.get(a), self.block.get(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    pub fn block_of(&self, t: &Term) -> BTreeSet<Term> {
        match self.block.get(t) {
            None => BTreeSet::new(),
            Some(&b) => self
                .block
                .iter()
                .filter(|(_, &x)| x == b)
                .map(|(t, _)| t.clone())
                .collect(),
        }
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.block.contains_key(t)
    }
}

/// Least congruence on `universe` containing `pairs`, closed only under
/// congruence steps whose terms all lie in `universe`. Pairs mentioning a
/// term outside the universe are ignored.
pub fn congruence_closure(universe: &BTreeSet<Term>, pairs: impl IntoIterator<Item = (Term, Term)>) -> Partition {
    let terms: Vec<&Term> = universe.iter().collect();
    let index: BTreeMap<&Term, usize> = terms.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let mut parent: Vec<usize> = (0..terms.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    fn union(parent: &mut [usize], a: usize, b: usize) -> bool {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra == rb {
            return false;
        }
        parent[ra.max(rb)] = ra.min(rb);
        true
    }
    for (a, b) in pairs {
        if let (Some(&i), Some(&j)) = (index.get(&a), index.get(&b)) {
            union(&mut parent, i, j);
        }
    }
    // children indices, when every child is itself in the universe
    let kids: Vec<Option<Vec<usize>>> = terms
        .iter()
        .map(|t| t.children().iter().map(|c| index.get(c).copied()).collect())
        .collect();
    loop {
        let mut changed = false;
        let mut sig: BTreeMap<(&str, Vec<usize>), usize> = BTreeMap::new();
        for (i, t) in terms.iter().enumerate() {
            let Some(ks) = &kids[i] else { continue };
            let key = (t.head().as_str(), ks.iter().map(|&k| find(&mut parent, k)).collect());
            match sig.get(&key) {
                Some(&j) => changed |= union(&mut parent, i, j),
                None => {
                    sig.insert(key, i);
                }
            }
        }
        if !changed {
            break;
        }
    }
    let block = terms
        .iter()
        .enumerate()
        .map(|(i, t)| ((*t).clone(), find(&mut parent, i)))
        .collect();
    Partition { block }
}

/// `≈_R ∨ ≈_G` restricted to terms of size at most `size_bound`.
pub fn closure_oracle(trs: &Trs, g0: &EGraph, size_bound: usize) -> Result<Partition, TermError> {
    let mut sig: Signature = trs.signature().clone();
    sig.merge(g0.signature())?;
    let universe = all_terms_up_to(&sig, size_bound);
    let mut pairs = Vec::new();
    for u in &universe {
        for r in trs.rules() {
            if let Some(s) = r.lhs().match_term(u) {
                let v = r.rhs().substitute(&s)?;
                pairs.push((u.clone(), v));
            }
        }
    }
    for (_, terms) in g0.enumerate_all(size_bound) {
        let mut it = terms.into_iter();
        if let Some(first) = it.next() {
            pairs.extend(it.map(|t| (first.clone(), t)));
        }
    }
    Ok(congruence_closure(&universe, pairs))
}

#[derive(Debug, Clone)]
pub struct RepresentationReport {
    pub size_bound: usize,
    /// `R*(w)`, terms of size at most the bound.
    pub closure: BTreeSet<Term>,
    /// `[w]` in the saturated graph.
    pub class: BTreeSet<Term>,
    /// `[w]` under the congruence generated by the rules and the input graph.
    pub oracle: BTreeSet<Term>,
    /// A term of `closure` missing from `class`, if any.
    pub closure_not_in_class: Option<Term>,
    /// A term of `class` missing from `oracle`, if any.
    pub class_not_in_oracle: Option<Term>,
}

impl RepresentationReport {
    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.closure.len(), self.class.len(), self.oracle.len())
    }

    pub fn containments_hold(&self) -> bool {
        self.closure_not_in_class.is_none() && self.class_not_in_oracle.is_none()
    }

    pub fn all_equal(&self) -> bool {
        self.closure == self.class && self.class == self.oracle
    }
}

/// Compare the three sets for `w` at `size_bound`, exploring rewrite paths
/// and the oracle universe up to `explore_bound` (at least `size_bound`).
pub fn verify_representation(
    trs: &Trs,
    g0: &EGraph,
    h: &EGraph,
    w: &Term,
    size_bound: usize,
    explore_bound: usize,
) -> Result<RepresentationReport, RepresentationError> {
    let explore_bound = explore_bound.max(size_bound);
    let c = h
        .accepts(w)
        .ok_or_else(|| RepresentationError::NotRepresented(w.clone()))?;
    let within = |s: BTreeSet<Term>| -> BTreeSet<Term> { s.into_iter().filter(|t| t.size() <= size_bound).collect() };
    let closure = within(rewrite_closure(trs, w, explore_bound));
    let class = h.enumerate_terms(c, size_bound);
    let oracle = within(closure_oracle(trs, g0, explore_bound)?.block_of(w));
    Ok(RepresentationReport {
        size_bound,
        closure_not_in_class: closure.difference(&class).next().cloned(),
        class_not_in_oracle: class.difference(&oracle).next().cloned(),
        closure,
        class,
        oracle,
    })
}
