//! E-graphs as deterministic, reachable bottom-up tree automata.
//!
//! States are E-classes and transitions are E-nodes. An [`Automaton`] is the
//! unrestricted (possibly nondeterministic) form produced by insertion; it is
//! turned back into an [`EGraph`] by [`rebuild`].

mod ops;
mod rebuild;
mod text;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::term::{Signature, Symbol, Term, TermError};

pub use ops::{find_homomorphism, is_isomorphic, lub, Homomorphism};
pub use rebuild::{rebuild, Rebuilt};
pub use text::{parse_automaton, parse_egraph, to_dot, write_egraph, NamedEGraph};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassId(pub u32);

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

impl fmt::Debug for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ENode {
    pub head: Symbol,
    pub children: Vec<ClassId>,
}

impl ENode {
    pub fn new(head: impl Into<Symbol>, children: Vec<ClassId>) -> Self {
        ENode {
            head: head.into(),
            children,
        }
    }

    pub fn leaf(head: impl Into<Symbol>) -> Self {
        ENode::new(head, Vec::new())
    }

    pub fn map_children(&self, mut f: impl FnMut(ClassId) -> ClassId) -> ENode {
        ENode {
            head: self.head.clone(),
            children: self.children.iter().map(|&c| f(c)).collect(),
        }
    }
}

impl fmt::Display for ENode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ENode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EGraphError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("state {0} is not reachable")]
    Unreachable(ClassId),
    #[error("node {node} has several target classes")]
    Nondeterministic { node: ENode },
    #[error("state {0} is not a state of the automaton")]
    UnknownState(ClassId),
    #[error("automaton has pending state equations")]
    PendingEquations,
}

/// A term over `Σ ∪ Q`: function symbols applied to terms, or a bare state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ClassTerm {
    Class(ClassId),
    App(Symbol, Vec<ClassTerm>),
}

impl ClassTerm {
    pub fn app(head: impl Into<Symbol>, children: Vec<ClassTerm>) -> Self {
        ClassTerm::App(head.into(), children)
    }

    pub fn leaf(head: impl Into<Symbol>) -> Self {
        ClassTerm::App(head.into(), Vec::new())
    }
}

impl From<&Term> for ClassTerm {
    fn from(t: &Term) -> Self {
        ClassTerm::App(t.head().clone(), t.children().iter().map(ClassTerm::from).collect())
    }
}

/// A finite bottom-up tree automaton without final states.
///
/// `equations` are state pairs `(c, d)` meaning `c →* d` (an epsilon
/// transition). They arise from flattening a bare state and are resolved by
/// rebuilding, which merges both sides.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Automaton {
    pub signature: Signature,
    pub states: BTreeSet<ClassId>,
    pub transitions: BTreeSet<(ENode, ClassId)>,
    pub equations: BTreeSet<(ClassId, ClassId)>,
}

impl Automaton {
    pub fn new(signature: Signature) -> Self {
        Automaton {
            signature,
            ..Automaton::default()
        }
    }

    pub fn next_fresh(&self) -> u32 {
        self.states.iter().next_back().map_or(0, |c| c.0 + 1)
    }

    pub fn fresh_state(&mut self) -> ClassId {
        let c = ClassId(self.next_fresh());
        self.states.insert(c);
        c
    }

    /// Add a transition, registering its symbol and states.
    pub fn add_transition(&mut self, node: ENode, target: ClassId) -> Result<(), TermError> {
        self.signature.declare(node.head.clone(), node.children.len())?;
        self.states.extend(node.children.iter().copied());
        self.states.insert(target);
        self.transitions.insert((node, target));
        Ok(())
    }

    pub fn add_equation(&mut self, from: ClassId, to: ClassId) {
        self.states.insert(from);
        self.states.insert(to);
        if from != to {
            self.equations.insert((from, to));
        }
    }

    pub fn union_with(&mut self, other: &Automaton) -> Result<(), TermError> {
        self.signature.merge(&other.signature)?;
        self.states.extend(other.states.iter().copied());
        self.transitions.extend(other.transitions.iter().cloned());
        self.equations.extend(other.equations.iter().copied());
        Ok(())
    }

    /// States grounded by the fixpoint "some transition into the state has
    /// only grounded children" (equations propagate groundedness forward).
    pub fn grounded_states(&self) -> BTreeSet<ClassId> {
        // worklist over "children still ungrounded" counters
        let targets: Vec<ClassId> = self.transitions.iter().map(|(_, c)| *c).collect();
        let mut waiting: Vec<usize> = self.transitions.iter().map(|(n, _)| n.children.len()).collect();
        let mut users: HashMap<ClassId, Vec<usize>> = HashMap::new();
        for (ti, (n, _)) in self.transitions.iter().enumerate() {
            for ch in &n.children {
                users.entry(*ch).or_default().push(ti);
            }
        }
        let mut eq_out: HashMap<ClassId, Vec<ClassId>> = HashMap::new();
        for (from, to) in &self.equations {
            eq_out.entry(*from).or_default().push(*to);
        }
        let mut grounded = BTreeSet::new();
        let mut stack: Vec<ClassId> = Vec::new();
        for (ti, &w) in waiting.iter().enumerate() {
            if w == 0 && grounded.insert(targets[ti]) {
                stack.push(targets[ti]);
            }
        }
        while let Some(c) = stack.pop() {
            for &ti in users.get(&c).into_iter().flatten() {
                waiting[ti] -= 1;
                if waiting[ti] == 0 && grounded.insert(targets[ti]) {
                    stack.push(targets[ti]);
                }
            }
            for &d in eq_out.get(&c).into_iter().flatten() {
                if grounded.insert(d) {
                    stack.push(d);
                }
            }
        }
        grounded
    }

    /// Flatten `t` with root `root`, allocating fresh states above every
    /// state already present. Returns the number of transitions added.
    ///
    /// A bare state `t = c` contributes the equation `c →* root`.
    pub fn insert_term(&mut self, t: &ClassTerm, root: ClassId) -> Result<usize, TermError> {
        self.states.insert(root);
        let before = self.transitions.len();
        let mut memo: BTreeMap<ClassTerm, ClassId> = BTreeMap::new();
        match t {
            ClassTerm::Class(c) => self.add_equation(*c, root),
            ClassTerm::App(f, cs) => {
                let kids = cs
                    .iter()
                    .map(|c| self.flatten_sub(c, &mut memo))
                    .collect::<Result<Vec<_>, _>>()?;
                self.add_transition(ENode::new(f.clone(), kids), root)?;
            }
        }
        Ok(self.transitions.len() - before)
    }

    fn flatten_sub(&mut self, t: &ClassTerm, memo: &mut BTreeMap<ClassTerm, ClassId>) -> Result<ClassId, TermError> {
        match t {
            ClassTerm::Class(c) => {
                self.states.insert(*c);
                Ok(*c)
            }
            ClassTerm::App(f, cs) => {
                if let Some(&q) = memo.get(t) {
                    return Ok(q);
                }
                let kids = cs
                    .iter()
                    .map(|c| self.flatten_sub(c, memo))
                    .collect::<Result<Vec<_>, _>>()?;
                let q = self.fresh_state();
                self.add_transition(ENode::new(f.clone(), kids), q)?;
                memo.insert(t.clone(), q);
                Ok(q)
            }
        }
    }

    /// Violations of the E-graph conditions: arity, determinism,
    /// reachability, and stray states or equations.
    pub fn check_invariants(&self) -> Vec<EGraphError> {
        let mut out = Vec::new();
        let mut targets: BTreeMap<&ENode, BTreeSet<ClassId>> = BTreeMap::new();
        for (n, c) in &self.transitions {
            match self.signature.arity(&n.head) {
                None => out.push(TermError::UnknownSymbol(n.head.clone()).into()),
                Some(a) if a != n.children.len() => out.push(
                    TermError::ArityMismatch {
                        symbol: n.head.clone(),
                        expected: a,
                        found: n.children.len(),
                    }
                    .into(),
                ),
                Some(_) => {}
            }
            for s in n.children.iter().chain(std::iter::once(c)) {
                if !self.states.contains(s) {
                    out.push(EGraphError::UnknownState(*s));
                }
            }
            targets.entry(n).or_default().insert(*c);
        }
        for (n, ts) in targets {
            if ts.len() > 1 {
                out.push(EGraphError::Nondeterministic { node: n.clone() });
            }
        }
        let grounded = self.grounded_states();
        out.extend(
            self.states
                .iter()
                .filter(|s| !grounded.contains(s))
                .map(|s| EGraphError::Unreachable(*s)),
        );
        if !self.equations.is_empty() {
            out.push(EGraphError::PendingEquations);
        }
        out
    }
}

/// A deterministic, reachable tree automaton. Immutable once built.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EGraph {
    signature: Signature,
    classes: BTreeSet<ClassId>,
    nodes: BTreeMap<ENode, ClassId>,
    by_class: BTreeMap<ClassId, Vec<ENode>>,
}

impl EGraph {
    pub fn empty(signature: Signature) -> Self {
        EGraph {
            signature,
            ..EGraph::default()
        }
    }

    /// Accepts an automaton that already satisfies every E-graph invariant.
    pub fn from_automaton(a: &Automaton) -> Result<Self, EGraphError> {
        if let Some(v) = a.check_invariants().into_iter().next() {
            return Err(v);
        }
        Ok(Self::from_parts(
            a.signature.clone(),
            a.states.clone(),
            a.transitions.iter().cloned().collect(),
        ))
    }

    pub(crate) fn from_parts(
        signature: Signature,
        classes: BTreeSet<ClassId>,
        nodes: BTreeMap<ENode, ClassId>,
    ) -> Self {
        let mut by_class: BTreeMap<ClassId, Vec<ENode>> = classes.iter().map(|&c| (c, Vec::new())).collect();
        for (n, c) in &nodes {
            by_class.entry(*c).or_default().push(n.clone());
        }
        EGraph {
            signature,
            classes,
            nodes,
            by_class,
        }
    }

    /// `FL(t →* root)` on an empty graph; returns the graph and the root.
    pub fn from_term(t: &Term) -> Result<(Self, ClassId), EGraphError> {
        let mut sig = Signature::new();
        t.infer_signature(&mut sig)?;
        Self::from_term_with(sig, t)
    }

    pub fn from_term_with(signature: Signature, t: &Term) -> Result<(Self, ClassId), EGraphError> {
        t.check(&signature)?;
        let mut a = Automaton::new(signature);
        let root = a.fresh_state();
        a.insert_term(&ClassTerm::from(t), root)?;
        Ok((EGraph::from_automaton(&a)?, root))
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn classes(&self) -> &BTreeSet<ClassId> {
        &self.classes
    }

    pub fn nodes(&self) -> &BTreeMap<ENode, ClassId> {
        &self.nodes
    }

    pub fn nodes_of(&self, c: ClassId) -> &[ENode] {
        self.by_class.get(&c).map_or(&[], Vec::as_slice)
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn lookup(&self, node: &ENode) -> Option<ClassId> {
        self.nodes.get(node).copied()
    }

    pub fn to_automaton(&self) -> Automaton {
        Automaton {
            signature: self.signature.clone(),
            states: self.classes.clone(),
            transitions: self.nodes.iter().map(|(n, c)| (n.clone(), *c)).collect(),
            equations: BTreeSet::new(),
        }
    }

    /// `G ∪ FL(t →* c)`.
    pub fn insert(&self, t: &ClassTerm, c: ClassId) -> Result<Automaton, EGraphError> {
        let mut a = self.to_automaton();
        a.insert_term(t, c)?;
        Ok(a)
    }

    /// Same graph with the signature widened by `extra`.
    pub fn with_signature(mut self, extra: &Signature) -> Result<Self, TermError> {
        self.signature.merge(extra)?;
        Ok(self)
    }

    /// Violations of the E-graph conditions; empty for any value built
    /// through this module's constructors.
    pub fn check_invariants(&self) -> Vec<EGraphError> {
        self.to_automaton().check_invariants()
    }
}
