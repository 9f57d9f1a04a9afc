//! Acceptance, term enumeration, ranks, homomorphisms and least upper bounds.

use std::collections::{BTreeMap, BTreeSet};

use super::{rebuild, Automaton, ClassId, EGraph, EGraphError, ENode};
use crate::term::rewrite::compositions;
use crate::term::{Signature, Term};

/// A map from the classes of one E-graph to the classes of another.
pub type Homomorphism = BTreeMap<ClassId, ClassId>;

impl EGraph {
    /// The class that accepts `t`, if any. Bottom-up evaluation.
    pub fn accepts(&self, t: &Term) -> Option<ClassId> {
        let children = t
            .children()
            .iter()
            .map(|c| self.accepts(c))
            .collect::<Option<Vec<_>>>()?;
        self.lookup(&ENode::new(t.head().clone(), children))
    }

    /// `t1 ≈_G t2`: both terms are accepted by the same class.
    pub fn pcr_related(&self, t1: &Term, t2: &Term) -> bool {
        match (self.accepts(t1), self.accepts(t2)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }

    /// Terms accepted by every class, grouped by class, with size at most
    /// `size_bound`.
    pub fn enumerate_all(&self, size_bound: usize) -> BTreeMap<ClassId, BTreeSet<Term>> {
        // exact[n][c] = terms of size n accepted by c
        let mut exact: Vec<BTreeMap<ClassId, Vec<Term>>> = vec![BTreeMap::new(); size_bound + 1];
        for n in 1..=size_bound {
            let mut here: BTreeMap<ClassId, Vec<Term>> = BTreeMap::new();
            for (node, &c) in &self.nodes {
                let k = node.children.len();
                if k == 0 {
                    if n == 1 {
                        here.entry(c).or_default().push(Term::leaf(node.head.clone()));
                    }
                    continue;
                }
                if n < k + 1 {
                    continue;
                }
                for sizes in compositions(n - 1, k) {
                    let mut partial: Vec<Vec<Term>> = vec![Vec::new()];
                    for (ch, &s) in node.children.iter().zip(&sizes) {
                        let Some(options) = exact[s].get(ch) else {
                            partial.clear();
                            break;
                        };
                        let mut grown = Vec::with_capacity(partial.len() * options.len());
                        for prefix in &partial {
                            for o in options {
                                let mut p = prefix.clone();
                                p.push(o.clone());
                                grown.push(p);
                            }
                        }
                        partial = grown;
                    }
                    let bucket = here.entry(c).or_default();
                    bucket.extend(partial.into_iter().map(|cs| Term::new(node.head.clone(), cs)));
                }
            }
            exact[n] = here;
        }
        let mut out: BTreeMap<ClassId, BTreeSet<Term>> = self.classes.iter().map(|&c| (c, BTreeSet::new())).collect();
        for layer in exact {
            for (c, ts) in layer {
                out.entry(c).or_default().extend(ts);
            }
        }
        out
    }

    /// `{t ∈ L(c) | size(t) ≤ size_bound}`.
    pub fn enumerate_terms(&self, c: ClassId, size_bound: usize) -> BTreeSet<Term> {
        self.enumerate_all(size_bound).remove(&c).unwrap_or_default()
    }

    /// Smallest depth of a term accepted by each class.
    pub fn ranks(&self) -> BTreeMap<ClassId, usize> {
        let mut rank: BTreeMap<ClassId, usize> = BTreeMap::new();
        loop {
            let mut changed = false;
            for (node, c) in &self.nodes {
                let Some(inner) = node
                    .children
                    .iter()
                    .map(|ch| rank.get(ch).copied())
                    .try_fold(0usize, |acc, r| r.map(|r| acc.max(r)))
                else {
                    continue;
                };
                let r = 1 + inner;
                if rank.get(c).is_none_or(|&old| r < old) {
                    rank.insert(*c, r);
                    changed = true;
                }
            }
            if !changed {
                return rank;
            }
        }
    }

    pub fn rank(&self, c: ClassId) -> Option<usize> {
        self.ranks().get(&c).copied()
    }

    /// One minimal-rank term per class, ties broken by symbol name and then
    /// by the chosen children.
    pub fn witness_terms(&self) -> BTreeMap<ClassId, Term> {
        let ranks = self.ranks();
        let mut order: Vec<ClassId> = self.classes.iter().copied().collect();
        order.sort_by_key(|c| (ranks.get(c).copied().unwrap_or(usize::MAX), *c));
        let mut out: BTreeMap<ClassId, Term> = BTreeMap::new();
        for c in order {
            let r = ranks[&c];
            let best = self
                .nodes_of(c)
                .iter()
                .filter(|n| 1 + n.children.iter().map(|ch| ranks[ch]).max().unwrap_or(0) == r)
                .map(|n| Term::new(n.head.clone(), n.children.iter().map(|ch| out[ch].clone()).collect()))
                .min()
                .expect("a class of finite rank has a node achieving it");
            out.insert(c, best);
        }
        out
    }
}

/// The unique homomorphism `G → H`, if it exists.
///
/// Classes are visited by increasing rank; each is mapped through the
/// target of its minimal node, then every node of `G` is verified.
pub fn find_homomorphism(g: &EGraph, h: &EGraph) -> Option<Homomorphism> {
    let ranks = g.ranks();
    let mut order: Vec<ClassId> = g.classes.iter().copied().collect();
    order.sort_by_key(|c| (ranks[c], *c));
    let mut hom = Homomorphism::new();
    for c in order {
        let r = ranks[&c];
        let node = g
            .nodes_of(c)
            .iter()
            .filter(|n| 1 + n.children.iter().map(|ch| ranks[ch]).max().unwrap_or(0) == r)
            .min()?;
        let image = node.map_children(|ch| hom[&ch]);
        hom.insert(c, h.lookup(&image)?);
    }
    for (n, c) in &g.nodes {
        if h.lookup(&n.map_children(|ch| hom[&ch])) != Some(hom[c]) {
            return None;
        }
    }
    Some(hom)
}

/// Homomorphisms exist in both directions and are mutually inverse.
pub fn is_isomorphic(g: &EGraph, h: &EGraph) -> bool {
    if g.class_count() != h.class_count() || g.node_count() != h.node_count() {
        return false;
    }
    let (Some(gh), Some(hg)) = (find_homomorphism(g, h), find_homomorphism(h, g)) else {
        return false;
    };
    gh.iter().all(|(a, b)| hg.get(b) == Some(a))
}

/// Least upper bound: rebuild of the disjoint union.
///
/// Returns the bound and, for each input, the renaming of its classes into
/// the union before rebuilding composed with the merge map.
pub fn lub(graphs: &[EGraph]) -> Result<(EGraph, Vec<Homomorphism>), EGraphError> {
    let mut sig = Signature::new();
    for g in graphs {
        sig.merge(g.signature())?;
    }
    let mut union = Automaton::new(sig);
    let mut offset = 0u32;
    let mut renamings = Vec::new();
    for g in graphs {
        let rename: Homomorphism = g
            .classes
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, ClassId(offset + i as u32)))
            .collect();
        offset += g.class_count() as u32;
        union.states.extend(rename.values().copied());
        for (n, c) in &g.nodes {
            union.add_transition(n.map_children(|ch| rename[&ch]), rename[c])?;
        }
        renamings.push(rename);
    }
    let rebuilt = rebuild(&union)?;
    let embeddings = renamings
        .into_iter()
        .map(|r| r.into_iter().map(|(c, u)| (c, rebuilt.merge_map[&u])).collect())
        .collect();
    Ok((rebuilt.egraph, embeddings))
}
