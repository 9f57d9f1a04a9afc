//! Congruence closure of a tree automaton.

use std::collections::{BTreeMap, HashMap};

use log::trace;

use super::{Automaton, ClassId, EGraph, EGraphError, ENode};

/// Output of [`rebuild`].
#[derive(Debug, Clone)]
pub struct Rebuilt {
    pub egraph: EGraph,
    /// Every state of the input automaton to its class in `egraph`.
    pub merge_map: BTreeMap<ClassId, ClassId>,
    /// Number of successful unions performed.
    pub merges: usize,
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Returns `(winner, loser)` if the sets were distinct. Larger set wins,
    /// then the lower index.
    fn union(&mut self, a: usize, b: usize) -> Option<(usize, usize)> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let (w, l) = match self.size[ra].cmp(&self.size[rb]) {
            std::cmp::Ordering::Greater => (ra, rb),
            std::cmp::Ordering::Less => (rb, ra),
            std::cmp::Ordering::Equal => (ra.min(rb), ra.max(rb)),
        };
        self.parent[l] = w;
        self.size[w] += self.size[l];
        Some((w, l))
    }
}

/// `CC(A)`: the least E-graph above `a`.
///
/// Worklist congruence closure. Transitions are re-canonicalized whenever a
/// child class is absorbed by a union; a canonical node already owned by a
/// different class triggers another union.
pub fn rebuild(a: &Automaton) -> Result<Rebuilt, EGraphError> {
    let grounded = a.grounded_states();
    if let Some(s) = a.states.iter().find(|s| !grounded.contains(s)) {
        return Err(EGraphError::Unreachable(*s));
    }
    for (n, _) in &a.transitions {
        match a.signature.arity(&n.head) {
            Some(k) if k == n.children.len() => {}
            Some(k) => {
                return Err(crate::term::TermError::ArityMismatch {
                    symbol: n.head.clone(),
                    expected: k,
                    found: n.children.len(),
                }
                .into())
            }
            None => return Err(crate::term::TermError::UnknownSymbol(n.head.clone()).into()),
        }
    }

    // Dense indices; states are sorted so index order matches id order.
    let states: Vec<ClassId> = a.states.iter().copied().collect();
    let index: HashMap<ClassId, usize> = states.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let transitions: Vec<(ENode, usize)> = a
        .transitions
        .iter()
        .map(|(n, c)| (n.map_children(|ch| ClassId(index[&ch] as u32)), index[c]))
        .collect();

    let mut uf = UnionFind::new(states.len());
    let mut uses: Vec<Vec<usize>> = vec![Vec::new(); states.len()];
    for (ti, (n, _)) in transitions.iter().enumerate() {
        for ch in &n.children {
            uses[ch.0 as usize].push(ti);
        }
    }

    let mut merges = 0;
    let mut pending: Vec<usize> = (0..transitions.len()).rev().collect();
    let absorb = |uf: &mut UnionFind, uses: &mut Vec<Vec<usize>>, pending: &mut Vec<usize>, x: usize, y: usize| {
        if let Some((w, l)) = uf.union(x, y) {
            trace!("merge {} into {}", states[l], states[w]);
            let moved = std::mem::take(&mut uses[l]);
            pending.extend(moved.iter().copied());
            uses[w].extend(moved);
            true
        } else {
            false
        }
    };

    for (from, to) in &a.equations {
        if absorb(&mut uf, &mut uses, &mut pending, index[from], index[to]) {
            merges += 1;
        }
    }

    let mut memo: HashMap<ENode, usize> = HashMap::new();
    while let Some(ti) = pending.pop() {
        let (node, target) = &transitions[ti];
        let canon = node.map_children(|c| ClassId(uf.find(c.0 as usize) as u32));
        let target = uf.find(*target);
        match memo.get(&canon) {
            Some(&other) => {
                let other = uf.find(other);
                if other != target && absorb(&mut uf, &mut uses, &mut pending, other, target) {
                    merges += 1;
                }
            }
            None => {
                memo.insert(canon, target);
            }
        }
    }

    let rep = |uf: &mut UnionFind, i: usize| states[uf.find(i)];
    let mut merge_map = BTreeMap::new();
    for (i, &s) in states.iter().enumerate() {
        merge_map.insert(s, rep(&mut uf, i));
    }
    let mut nodes = BTreeMap::new();
    for (n, t) in &transitions {
        let canon = n.map_children(|c| rep(&mut uf, c.0 as usize));
        let target = rep(&mut uf, *t);
        let prev = nodes.insert(canon, target);
        debug_assert!(
            prev.is_none() || prev == Some(target),
            "congruence closure left a conflict"
        );
    }
    let classes = merge_map.values().copied().collect();
    Ok(Rebuilt {
        egraph: EGraph::from_parts(a.signature.clone(), classes, nodes),
        merge_map,
        merges,
    })
}
