//! Sufficient conditions for termination: weak term acyclicity of rewrite
//! systems and classic weak acyclicity of dependency sets.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graphmap::DiGraphMap;

use crate::chase::Dependency;
use crate::term::{Pattern, RewriteRule, Symbol, TermError, Trs, Var};

/// Argument slot `index` (1-based) of `symbol`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub symbol: Symbol,
    pub index: usize,
}

impl Position {
    pub fn new(symbol: impl Into<Symbol>, index: usize) -> Self {
        Position {
            symbol: symbol.into(),
            index,
        }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.symbol, self.index)
    }
}

/// All `(f, i)` such that `f(…, sub, …)` with `sub` at slot `i` is a
/// sub-pattern of `p`.
pub fn positions_of(p: &Pattern, sub: &Pattern) -> BTreeSet<Position> {
    let mut out = BTreeSet::new();
    for q in p.subpatterns() {
        if let Pattern::App(f, cs) = q {
            for (i, c) in cs.iter().enumerate() {
                if c == sub {
                    out.insert(Position::new(f.clone(), i + 1));
                }
            }
        }
    }
    out
}

fn occurs_in(p: &Pattern, whole: &Pattern) -> bool {
    whole.subpatterns().contains(&p)
}

/// Replace each rule `x → rhs` by `f(x1, …, xn) → rhs[x := f(x1, …, xn)]`
/// for every symbol `f`.
pub fn expand_degenerate(trs: &Trs) -> Result<Trs, TermError> {
    let mut rules = Vec::new();
    for rule in trs.rules() {
        let Pattern::Var(x) = rule.lhs() else {
            rules.push(rule.clone());
            continue;
        };
        for (f, n) in trs.signature().iter() {
            let mut names = Vec::new();
            let mut k = 1;
            while names.len() < n {
                let v = Var::from(format!("x{k}").as_str());
                if &v != x {
                    names.push(Pattern::Var(v));
                }
                k += 1;
            }
            let lhs = Pattern::app(f.clone(), names);
            let rhs = rule
                .rhs()
                .map_vars(&mut |v| if v == x { lhs.clone() } else { Pattern::Var(v.clone()) });
            let r = RewriteRule::new(lhs, rhs)?;
            if !rules.contains(&r) {
                rules.push(r);
            }
        }
    }
    Trs::new(trs.signature().clone(), rules)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("rule `{0}` has a bare variable on the left")]
pub struct DegenerateRule(pub RewriteRule);

/// Positions as nodes; edges `(src, dst, special)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    pub nodes: BTreeSet<Position>,
    pub edges: BTreeSet<(Position, Position, bool)>,
}

/// A cycle through a special edge; `special[i]` marks the edge leaving
/// `path[i]`. The first and last positions coincide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub path: Vec<Position>,
    pub special: Vec<bool>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.path.iter().enumerate() {
            write!(f, "{p}")?;
            if let Some(&s) = self.special.get(i) {
                f.write_str(if s { "*->" } else { "->" })?;
            }
        }
        Ok(())
    }
}

impl DependencyGraph {
    fn add(&mut self, src: Position, dst: Position, special: bool) {
        self.edges.insert((src, dst, special));
    }

    /// A cycle containing a special edge, if there is one.
    pub fn special_cycle(&self) -> Option<Witness> {
        let index: BTreeMap<&Position, usize> = self.nodes.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let nodes: Vec<&Position> = self.nodes.iter().collect();
        let mut g: DiGraphMap<usize, ()> = DiGraphMap::new();
        for i in 0..nodes.len() {
            g.add_node(i);
        }
        for (s, d, _) in &self.edges {
            g.add_edge(index[s], index[d], ());
        }
        let mut component = vec![0; nodes.len()];
        for (k, scc) in tarjan_scc(&g).into_iter().enumerate() {
            for n in scc {
                component[n] = k;
            }
        }
        let (u, v) = self
            .edges
            .iter()
            .filter(|(_, _, special)| *special)
            .map(|(s, d, _)| (index[s], index[d]))
            .find(|(s, d)| component[*s] == component[*d])?;
        // shortest path v ⇝ u inside the component closes the cycle
        let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
        let mut queue = VecDeque::from([v]);
        let mut seen = BTreeSet::from([v]);
        while let Some(n) = queue.pop_front() {
            if n == u {
                break;
            }
            for m in g.neighbors(n) {
                if component[m] == component[v] && seen.insert(m) {
                    prev.insert(m, n);
                    queue.push_back(m);
                }
            }
        }
        let mut back = vec![u];
        let mut cur = u;
        while cur != v {
            cur = prev[&cur];
            back.push(cur);
        }
        back.reverse();
        back.push(v);
        let mut special = Vec::new();
        for w in back.windows(2) {
            let (a, b) = (nodes[w[0]], nodes[w[1]]);
            let is_special = (w[0], w[1]) == (u, v) || !self.edges.contains(&(a.clone(), b.clone(), false));
            special.push(is_special);
        }
        Some(Witness {
            path: back.into_iter().map(|i| nodes[i].clone()).collect(),
            special,
        })
    }

    /// Graphviz source; special edges are labelled `*`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph positions {\n");
        for n in &self.nodes {
            out.push_str(&format!("  \"{n}\";\n"));
        }
        for (s, d, special) in &self.edges {
            let label = if *special { " [label=\"*\"]" } else { "" };
            out.push_str(&format!("  \"{s}\" -> \"{d}\"{label};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// The weak term dependency graph of a system without degenerate rules.
pub fn build_wtdg(trs: &Trs) -> Result<DependencyGraph, DegenerateRule> {
    let mut g = DependencyGraph::default();
    for (f, n) in trs.signature().iter() {
        for i in 1..=n {
            g.nodes.insert(Position::new(f.clone(), i));
        }
    }
    for rule in trs.rules() {
        let (lhs, rhs) = (rule.lhs(), rule.rhs());
        if lhs.is_var() {
            return Err(DegenerateRule(rule.clone()));
        }
        for x in rhs.vars() {
            let x = Pattern::Var(x);
            for u in positions_of(lhs, &x) {
                for v in positions_of(rhs, &x) {
                    g.add(u.clone(), v, false);
                }
            }
        }
        for p in rhs.subpatterns() {
            if p == rhs || p.is_var() || occurs_in(p, lhs) {
                continue;
            }
            let targets = positions_of(rhs, p);
            for x in p.vars() {
                for u in positions_of(rhs, &Pattern::Var(x)) {
                    for v in &targets {
                        g.add(u.clone(), v.clone(), true);
                    }
                }
            }
        }
    }
    Ok(g)
}

/// `Ok(None)` when weakly term acyclic, else a witness cycle.
pub fn is_weakly_term_acyclic(trs: &Trs) -> Result<Option<Witness>, TermError> {
    let expanded = expand_degenerate(trs)?;
    let g = build_wtdg(&expanded).expect("degenerate rules were expanded");
    Ok(g.special_cycle())
}

/// The classic position graph of the TGDs in `deps`; EGDs contribute nothing.
pub fn dependency_position_graph(deps: &[Dependency]) -> DependencyGraph {
    let mut g = DependencyGraph::default();
    for d in deps {
        let Dependency::Tgd {
            body,
            head,
            existentials,
        } = d
        else {
            continue;
        };
        let at = |atoms: &[crate::chase::AtomPattern], v: &Var| -> Vec<Position> {
            atoms
                .iter()
                .flat_map(|a| {
                    a.args
                        .iter()
                        .enumerate()
                        .filter(move |(_, w)| *w == v)
                        .map(move |(i, _)| Position::new(a.rel.clone(), i + 1))
                })
                .collect()
        };
        for a in body.iter().chain(head) {
            for i in 1..=a.args.len() {
                g.nodes.insert(Position::new(a.rel.clone(), i));
            }
        }
        let fresh: Vec<Position> = existentials.iter().flat_map(|z| at(head, z)).collect();
        for x in d.frontier() {
            for u in at(body, &x) {
                for v in at(head, &x) {
                    g.add(u.clone(), v, false);
                }
                for v in &fresh {
                    g.add(u.clone(), v.clone(), true);
                }
            }
        }
    }
    g
}

/// `None` when the TGDs of `deps` are weakly acyclic, else a witness cycle.
pub fn is_weakly_acyclic_deps(deps: &[Dependency]) -> Option<Witness> {
    dependency_position_graph(deps).special_cycle()
}
