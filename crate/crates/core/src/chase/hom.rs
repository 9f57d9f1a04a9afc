//! Homomorphisms between instances: constants are fixed, nulls and Skolem
//! terms may map anywhere.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{Atom, Elem, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("homomorphism search abandoned after {nodes} nodes")]
pub struct SearchAbandoned {
    pub nodes: usize,
}

/// Backtracking search settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomSearch {
    pub node_limit: usize,
    /// Require an injective map sending nulls to nulls.
    pub injective: bool,
}

impl Default for HomSearch {
    fn default() -> Self {
        HomSearch {
            node_limit: 2_000_000,
            injective: false,
        }
    }
}

fn flexible(e: &Elem) -> bool {
    !e.is_const()
}

struct Search<'a> {
    order: Vec<&'a Atom>,
    by_rel: BTreeMap<&'a crate::term::Symbol, Vec<&'a Atom>>,
    injective: bool,
    limit: usize,
    nodes: usize,
}

impl Search<'_> {
    fn go(
        &mut self,
        i: usize,
        map: &mut BTreeMap<Elem, Elem>,
        used: &mut BTreeSet<Elem>,
    ) -> Result<bool, SearchAbandoned> {
        let Some(&atom) = self.order.get(i) else {
            return Ok(true);
        };
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(SearchAbandoned { nodes: self.nodes });
        }
        let cands = self.by_rel.get(&atom.rel).cloned().unwrap_or_default();
        for target in cands {
            if target.args.len() != atom.args.len() {
                continue;
            }
            let mut added = Vec::new();
            let mut ok = true;
            for (s, t) in atom.args.iter().zip(&target.args) {
                if !flexible(s) {
                    if s != t {
                        ok = false;
                        break;
                    }
                    continue;
                }
                match map.get(s) {
                    Some(m) if m != t => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        if self.injective && (!flexible(t) || used.contains(t)) {
                            ok = false;
                            break;
                        }
                        map.insert(s.clone(), t.clone());
                        used.insert(t.clone());
                        added.push(s.clone());
                    }
                }
            }
            if ok && self.go(i + 1, map, used)? {
                return Ok(true);
            }
            for s in added {
                if let Some(t) = map.remove(&s) {
                    used.remove(&t);
                }
            }
        }
        Ok(false)
    }
}

/// Order atoms so that each one shares as many elements as possible with
/// those placed before it.
fn plan<'a>(from: &'a Instance, to: &Instance) -> Vec<&'a Atom> {
    let mut fanout: BTreeMap<&crate::term::Symbol, usize> = BTreeMap::new();
    for a in to.iter() {
        *fanout.entry(&a.rel).or_default() += 1;
    }
    let mut left: Vec<&Atom> = from.iter().collect();
    let mut seen: BTreeSet<&Elem> = BTreeSet::new();
    let mut out = Vec::with_capacity(left.len());
    while !left.is_empty() {
        let best = (0..left.len())
            .max_by_key(|&i| {
                let a = left[i];
                let bound = a.args.iter().filter(|e| !flexible(e) || seen.contains(e)).count();
                let free = a.args.len() - bound;
                let fan = fanout.get(&a.rel).copied().unwrap_or(0);
                (free == 0, bound, std::cmp::Reverse(fan), std::cmp::Reverse(i))
            })
            .expect("nonempty");
        let a = left.remove(best);
        seen.extend(a.args.iter());
        out.push(a);
    }
    out
}

impl HomSearch {
    /// A homomorphism `from → to`, as a map on the flexible elements of `from`.
    pub fn find(&self, from: &Instance, to: &Instance) -> Result<Option<BTreeMap<Elem, Elem>>, SearchAbandoned> {
        let mut by_rel: BTreeMap<_, Vec<&Atom>> = BTreeMap::new();
        for a in to.iter() {
            by_rel.entry(&a.rel).or_default().push(a);
        }
        let mut s = Search {
            order: plan(from, to),
            by_rel,
            injective: self.injective,
            limit: self.node_limit,
            nodes: 0,
        };
        let mut map = BTreeMap::new();
        let mut used = BTreeSet::new();
        Ok(s.go(0, &mut map, &mut used)?.then_some(map))
    }
}

pub fn find_instance_hom(from: &Instance, to: &Instance) -> Result<Option<BTreeMap<Elem, Elem>>, SearchAbandoned> {
    HomSearch::default().find(from, to)
}

/// Equal up to a bijective renaming of nulls.
pub fn instances_isomorphic(a: &Instance, b: &Instance) -> Result<bool, SearchAbandoned> {
    if a.len() != b.len() {
        return Ok(false);
    }
    let search = HomSearch {
        injective: true,
        ..HomSearch::default()
    };
    Ok(search.find(a, b)?.is_some())
}

/// Whether no homomorphism maps `i` into a proper subinstance of itself.
pub fn is_core(i: &Instance) -> Result<bool, SearchAbandoned> {
    for atom in i.iter() {
        let mut smaller = i.clone();
        smaller.remove(atom);
        if find_instance_hom(i, &smaller)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chase::parse_instance;

    fn inst(t: &str) -> Instance {
        parse_instance(t).unwrap()
    }

    #[test]
    fn homs_fix_constants() {
        let a = inst("R(a, _n1)");
        assert!(find_instance_hom(&a, &inst("R(a, b)")).unwrap().is_some());
        assert!(find_instance_hom(&a, &inst("R(c, b)")).unwrap().is_none());
        assert!(find_instance_hom(&inst("R(a, b)"), &a).unwrap().is_none());
    }

    #[test]
    fn joins_are_respected() {
        let path = inst("E(_n1, _n2)\nE(_n2, _n3)");
        assert!(find_instance_hom(&path, &inst("E(a, a)")).unwrap().is_some());
        assert!(find_instance_hom(&path, &inst("E(a, b)\nE(c, d)")).unwrap().is_none());
    }

    #[test]
    fn isomorphism() {
        assert!(instances_isomorphic(&inst("R(a, _n1)\nS(_n1)"), &inst("R(a, _n7)\nS(_n7)")).unwrap());
        assert!(!instances_isomorphic(&inst("R(a, _n1)\nR(a, _n2)"), &inst("R(a, _n1)\nR(a, b)")).unwrap());
        assert!(!instances_isomorphic(&inst("R(_n1, _n2)"), &inst("R(_n1, _n1)")).unwrap());
        // hom-equivalent but not isomorphic
        assert!(!instances_isomorphic(&inst("R(a, _n1)\nR(a, _n2)"), &inst("R(a, _n1)")).unwrap());
    }

    #[test]
    fn cores() {
        assert!(!is_core(&inst("R(a, _n1)\nR(a, b)")).unwrap());
        assert!(is_core(&inst("R(a, _n1)\nS(_n1)\nR(a, b)")).unwrap());
    }

    #[test]
    fn node_limit() {
        let big: String = (0..12).map(|i| format!("E(_n{i}, _n{})\n", i + 1)).collect();
        let target = inst("E(a, b)\nE(b, a)\nE(c, d)\nE(d, c)\nE(a, c)");
        let s = HomSearch {
            node_limit: 3,
            injective: false,
        };
        assert!(s.find(&inst(&big), &target).is_err());
    }
}
