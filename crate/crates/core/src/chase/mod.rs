//! Relational instances, tuple- and equality-generating dependencies, and
//! the standard and Skolem chase.

mod hom;
mod skolem;
mod standard;
mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::term::{Signature, Symbol, TermError, Var};

pub use hom::{find_instance_hom, instances_isomorphic, is_core, HomSearch, SearchAbandoned};
pub use skolem::{run_skolem_chase, singularize, skolem_name, skolemize, SkolemRule, SkolemTerm, EQ_RELATION};
pub use standard::{
    run_standard_chase, run_standard_chase_observed, ChaseConfig, ChaseOutcome, ChaseStatus, Scheduler, StepRecord,
};
pub use text::{parse_dependencies, parse_instance, write_dependencies, write_instance};

/// Relation names with arities.
pub type Schema = Signature;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Const(Symbol),
    Null(u32),
    /// Only produced by the Skolem chase.
    Skolem(Symbol, Vec<Elem>),
}

impl Elem {
    pub fn constant(name: &str) -> Self {
        Elem::Const(Symbol::new(name))
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Elem::Const(_))
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Elem::Null(_))
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Const(c) => write!(f, "{c}"),
            Elem::Null(n) => write!(f, "_n{n}"),
            Elem::Skolem(s, args) => {
                write!(f, "{s}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub rel: Symbol,
    pub args: Vec<Elem>,
}

impl Atom {
    pub fn new(rel: impl Into<Symbol>, args: Vec<Elem>) -> Self {
        Atom { rel: rel.into(), args }
    }

    pub fn map(&self, mut f: impl FnMut(&Elem) -> Elem) -> Atom {
        Atom {
            rel: self.rel.clone(),
            args: self.args.iter().map(&mut f).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.rel)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

type PositionKey = (Symbol, usize, Elem);

/// A finite set of atoms, indexed by (relation, position, element).
#[derive(Clone, Default)]
pub struct Instance {
    atoms: BTreeSet<Atom>,
    index: BTreeMap<PositionKey, BTreeSet<Atom>>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms
    }
}

impl Eq for Instance {}

impl Instance {
    pub fn new() -> Self {
        Instance::default()
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let mut out = Instance::new();
        for a in atoms {
            out.insert(a);
        }
        out
    }

    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.atoms
    }

    pub fn insert(&mut self, atom: Atom) -> bool {
        if self.atoms.contains(&atom) {
            return false;
        }
        for (i, e) in atom.args.iter().enumerate() {
            self.index
                .entry((atom.rel.clone(), i, e.clone()))
                .or_default()
                .insert(atom.clone());
        }
        self.atoms.insert(atom)
    }

    pub fn remove(&mut self, atom: &Atom) -> bool {
        if !self.atoms.remove(atom) {
            return false;
        }
        for (i, e) in atom.args.iter().enumerate() {
            let key = (atom.rel.clone(), i, e.clone());
            if let Some(set) = self.index.get_mut(&key) {
                set.remove(atom);
                if set.is_empty() {
                    self.index.remove(&key);
                }
            }
        }
        true
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> + '_ {
        self.atoms.iter()
    }

    /// Every element occurring in some atom.
    pub fn domain(&self) -> BTreeSet<Elem> {
        self.atoms.iter().flat_map(|a| a.args.iter().cloned()).collect()
    }

    pub fn max_null(&self) -> Option<u32> {
        self.domain()
            .into_iter()
            .filter_map(|e| match e {
                Elem::Null(n) => Some(n),
                _ => None,
            })
            .max()
    }

    pub fn schema(&self) -> Result<Schema, TermError> {
        let mut s = Schema::new();
        for a in &self.atoms {
            s.declare(a.rel.clone(), a.args.len())?;
        }
        Ok(s)
    }

    /// Replace every occurrence of `from` by `to`.
    pub fn replace(&mut self, from: &Elem, to: &Elem) {
        let affected: Vec<Atom> = self.atoms.iter().filter(|a| a.args.contains(from)).cloned().collect();
        for a in affected {
            self.remove(&a);
            self.insert(a.map(|e| if e == from { to.clone() } else { e.clone() }));
        }
    }

    /// Atoms of `rel`.
    pub fn relation<'a>(&'a self, rel: &'a Symbol) -> impl Iterator<Item = &'a Atom> + 'a {
        let start = Atom {
            rel: rel.clone(),
            args: Vec::new(),
        };
        self.atoms.range(start..).take_while(move |a| &a.rel == rel)
    }

    /// Atoms that could match `p` under `h`: looked up through the most
    /// selective bound position, or the whole relation if none is bound.
    pub(crate) fn candidates<'a>(&'a self, p: &'a AtomPattern, h: &Assignment) -> Vec<&'a Atom> {
        let mut best: Option<&BTreeSet<Atom>> = None;
        for (i, v) in p.args.iter().enumerate() {
            if let Some(e) = h.get(v) {
                match self.index.get(&(p.rel.clone(), i, e.clone())) {
                    None => return Vec::new(),
                    Some(set) if best.is_none_or(|b| set.len() < b.len()) => best = Some(set),
                    Some(_) => {}
                }
            }
        }
        match best {
            Some(set) => set.iter().collect(),
            None => self.relation(&p.rel).collect(),
        }
    }
}

/// Extend `h` so that `p` maps onto `atom`, if possible.
pub(crate) fn unify(p: &AtomPattern, atom: &Atom, h: &Assignment) -> Option<Assignment> {
    if atom.args.len() != p.args.len() {
        return None;
    }
    let mut h2 = h.clone();
    for (v, e) in p.args.iter().zip(&atom.args) {
        match h2.get(v) {
            Some(b) if b != e => return None,
            Some(_) => {}
            None => {
                h2.insert(v.clone(), e.clone());
            }
        }
    }
    Some(h2)
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.atoms {
            writeln!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.atoms.iter()).finish()
    }
}

/// An atom over variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomPattern {
    pub rel: Symbol,
    pub args: Vec<Var>,
}

impl AtomPattern {
    pub fn new(rel: impl Into<Symbol>, args: &[&str]) -> Self {
        AtomPattern {
            rel: rel.into(),
            args: args.iter().map(|v| Var::new(v)).collect(),
        }
    }

    fn ground(&self, h: &Assignment) -> Option<Atom> {
        Some(Atom {
            rel: self.rel.clone(),
            args: self.args.iter().map(|v| h.get(v).cloned()).collect::<Option<_>>()?,
        })
    }
}

impl fmt::Display for AtomPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<&str> = self.args.iter().map(Var::name).collect();
        write!(f, "{}({})", self.rel, args.join(", "))
    }
}

impl fmt::Debug for AtomPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn vars_of(atoms: &[AtomPattern]) -> BTreeSet<Var> {
    atoms.iter().flat_map(|a| a.args.iter().cloned()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChaseError {
    #[error("head variable {0} is neither in the body nor existential")]
    UnboundHeadVariable(Var),
    #[error("existential variable {0} also occurs in the body")]
    ExistentialInBody(Var),
    #[error("equated variable {0} does not occur in the body")]
    UnboundEqualityVariable(Var),
    #[error("dependency {0} is not a tuple-generating dependency")]
    NotATgd(usize),
    #[error("trigger is not active")]
    InactiveTrigger,
    #[error("relation `{0}` is reserved")]
    ReservedRelation(Symbol),
    #[error("cannot equate Skolem term {0} in the standard chase")]
    SkolemInStandardChase(Elem),
    #[error(transparent)]
    Schema(#[from] TermError),
}

/// `body → ∃ existentials. head` or `body → left = right`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dependency {
    Tgd {
        body: Vec<AtomPattern>,
        head: Vec<AtomPattern>,
        existentials: Vec<Var>,
    },
    Egd {
        body: Vec<AtomPattern>,
        left: Var,
        right: Var,
    },
}

impl Dependency {
    /// A TGD; existentials are the head variables absent from the body.
    pub fn tgd(body: Vec<AtomPattern>, head: Vec<AtomPattern>) -> Self {
        let bv = vars_of(&body);
        let mut existentials = Vec::new();
        for v in head.iter().flat_map(|a| a.args.iter()) {
            if !bv.contains(v) && !existentials.contains(v) {
                existentials.push(v.clone());
            }
        }
        Dependency::Tgd {
            body,
            head,
            existentials,
        }
    }

    pub fn egd(body: Vec<AtomPattern>, left: &str, right: &str) -> Self {
        Dependency::Egd {
            body,
            left: Var::new(left),
            right: Var::new(right),
        }
    }

    pub fn body(&self) -> &[AtomPattern] {
        match self {
            Dependency::Tgd { body, .. } | Dependency::Egd { body, .. } => body,
        }
    }

    pub fn is_tgd(&self) -> bool {
        matches!(self, Dependency::Tgd { .. })
    }

    /// Body variables that also occur in the head.
    pub fn frontier(&self) -> Vec<Var> {
        match self {
            Dependency::Tgd { body, head, .. } => {
                let hv = vars_of(head);
                let mut out = Vec::new();
                for v in body.iter().flat_map(|a| a.args.iter()) {
                    if hv.contains(v) && !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                out
            }
            Dependency::Egd { left, right, .. } => {
                let mut out = vec![left.clone()];
                if right != left {
                    out.push(right.clone());
                }
                out
            }
        }
    }

    pub fn validate(&self) -> Result<(), ChaseError> {
        let bv = vars_of(self.body());
        match self {
            Dependency::Tgd { head, existentials, .. } => {
                if let Some(z) = existentials.iter().find(|z| bv.contains(*z)) {
                    return Err(ChaseError::ExistentialInBody(z.clone()));
                }
                for v in vars_of(head) {
                    if !bv.contains(&v) && !existentials.contains(&v) {
                        return Err(ChaseError::UnboundHeadVariable(v));
                    }
                }
            }
            Dependency::Egd { left, right, .. } => {
                for v in [left, right] {
                    if !bv.contains(v) {
                        return Err(ChaseError::UnboundEqualityVariable(v.clone()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn declare_relations(&self, schema: &mut Schema) -> Result<(), TermError> {
        let heads: &[AtomPattern] = match self {
            Dependency::Tgd { head, .. } => head,
            Dependency::Egd { .. } => &[],
        };
        for a in self.body().iter().chain(heads) {
            schema.declare(a.rel.clone(), a.args.len())?;
        }
        Ok(())
    }
}

fn join(atoms: &[AtomPattern], sep: &str) -> String {
    atoms.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

impl fmt::Display for Dependency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dependency::Tgd {
                body,
                head,
                existentials,
            } => {
                write!(f, "{} -> ", join(body, ", "))?;
                if !existentials.is_empty() {
                    let zs: Vec<&str> = existentials.iter().map(Var::name).collect();
                    write!(f, "exists {}. ", zs.join(", "))?;
                }
                write!(f, "{}", join(head, ", "))
            }
            Dependency::Egd { body, left, right } => {
                write!(f, "{} -> {} = {}", join(body, ", "), left.name(), right.name())
            }
        }
    }
}

impl fmt::Debug for Dependency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn schema_of(deps: &[Dependency], instance: &Instance) -> Result<Schema, TermError> {
    let mut s = instance.schema()?;
    for d in deps {
        d.declare_relations(&mut s)?;
    }
    Ok(s)
}

/// Variable assignment; a trigger when restricted to a body.
pub type Assignment = BTreeMap<Var, Elem>;

pub fn format_assignment(h: &Assignment) -> String {
    let parts: Vec<String> = h.iter().map(|(v, e)| format!("{}={e}", v.name())).collect();
    format!("{{{}}}", parts.join(","))
}

/// All homomorphisms from `body` into `instance`.
pub fn eval_cq(instance: &Instance, body: &[AtomPattern]) -> Vec<Assignment> {
    eval_cq_from(instance, body, &Assignment::new())
}

/// All extensions of `start` mapping `body` into `instance`.
pub fn eval_cq_from(instance: &Instance, body: &[AtomPattern], start: &Assignment) -> Vec<Assignment> {
    let mut out = Vec::new();
    extend(instance, body, start, &mut out, false);
    out
}

fn extend(instance: &Instance, rest: &[AtomPattern], h: &Assignment, out: &mut Vec<Assignment>, first_only: bool) {
    let Some((first, rest)) = rest.split_first() else {
        out.push(h.clone());
        return;
    };
    for atom in instance.candidates(first, h) {
        if let Some(h2) = unify(first, atom, h) {
            extend(instance, rest, &h2, out, first_only);
            if first_only && !out.is_empty() {
                return;
            }
        }
    }
}

/// Whether some extension of `start` maps `body` into `instance`.
pub fn satisfiable_from(instance: &Instance, body: &[AtomPattern], start: &Assignment) -> bool {
    let mut out = Vec::new();
    extend(instance, body, start, &mut out, true);
    !out.is_empty()
}

fn restrict(h: &Assignment, vars: &BTreeSet<Var>) -> Assignment {
    h.iter()
        .filter(|(v, _)| vars.contains(*v))
        .map(|(v, e)| (v.clone(), e.clone()))
        .collect()
}

/// Whether the trigger `h` of `d` is active in `instance`.
pub fn is_active(instance: &Instance, d: &Dependency, h: &Assignment) -> bool {
    if !d
        .body()
        .iter()
        .all(|a| a.ground(h).is_some_and(|g| instance.contains(&g)))
    {
        return false;
    }
    match d {
        Dependency::Tgd { head, .. } => {
            let start = restrict(h, &vars_of(d.body()));
            !satisfiable_from(instance, head, &start)
        }
        Dependency::Egd { left, right, .. } => h.get(left) != h.get(right),
    }
}

/// Active triggers of `d` in `instance`, restricted to body variables and
/// in a deterministic order.
pub fn active_triggers(instance: &Instance, d: &Dependency) -> Vec<Assignment> {
    let bv = vars_of(d.body());
    let all: BTreeSet<Assignment> = eval_cq(instance, d.body()).iter().map(|h| restrict(h, &bv)).collect();
    // the body holds for every match, so only the head needs checking
    all.into_iter()
        .filter(|h| match d {
            Dependency::Tgd { head, .. } => !satisfiable_from(instance, head, h),
            Dependency::Egd { left, right, .. } => h.get(left) != h.get(right),
        })
        .collect()
}

/// Whether no dependency has an active trigger.
pub fn is_model(instance: &Instance, deps: &[Dependency]) -> bool {
    deps.iter().all(|d| active_triggers(instance, d).is_empty())
}

/// Result of a single chase step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepResult {
    /// The instance was extended or collapsed; for EGD steps `replaced`
    /// records `(old, new)`.
    Applied { replaced: Option<(Elem, Elem)> },
    /// An EGD demanded two distinct constants be equal.
    Failure,
}

/// Apply one step of `d` with trigger `h`, drawing fresh nulls from
/// `next_null`.
pub fn chase_step(
    instance: &mut Instance,
    d: &Dependency,
    h: &Assignment,
    next_null: &mut u32,
) -> Result<StepResult, ChaseError> {
    if !is_active(instance, d, h) {
        return Err(ChaseError::InactiveTrigger);
    }
    match d {
        Dependency::Tgd { head, existentials, .. } => {
            let mut h = h.clone();
            for z in existentials {
                h.insert(z.clone(), Elem::Null(*next_null));
                *next_null += 1;
            }
            for a in head {
                instance.insert(a.ground(&h).expect("head vars bound"));
            }
            Ok(StepResult::Applied { replaced: None })
        }
        Dependency::Egd { left, right, .. } => {
            let (l, r) = (h[left].clone(), h[right].clone());
            let (old, new) = match (&l, &r) {
                (Elem::Const(_), Elem::Const(_)) => return Ok(StepResult::Failure),
                (Elem::Null(_), Elem::Const(_)) => (l, r),
                (Elem::Const(_), Elem::Null(_)) => (r, l),
                (Elem::Null(a), Elem::Null(b)) => {
                    if a > b {
                        (l, r)
                    } else {
                        (r, l)
                    }
                }
                (Elem::Skolem(..), _) => return Err(ChaseError::SkolemInStandardChase(l)),
                (_, Elem::Skolem(..)) => return Err(ChaseError::SkolemInStandardChase(r)),
            };
            instance.replace(&old, &new);
            Ok(StepResult::Applied {
                replaced: Some((old, new)),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Elem {
        Elem::constant(s)
    }

    fn inst(text: &str) -> Instance {
        parse_instance(text).unwrap()
    }

    fn deps(text: &str) -> Vec<Dependency> {
        parse_dependencies(text).unwrap()
    }

    #[test]
    fn eval_cq_examples() {
        let i = inst("R(a, b)");
        let got = eval_cq(&i, &[AtomPattern::new("R", &["x", "y"])]);
        assert_eq!(got, vec![[(Var::new("x"), c("a")), (Var::new("y"), c("b"))].into()]);

        let i = inst("R(a, b)\nR(b, c)");
        let got = eval_cq(
            &i,
            &[AtomPattern::new("R", &["x", "y"]), AtomPattern::new("R", &["y", "z"])],
        );
        assert_eq!(got.len(), 1);
        assert_eq!(got[0][&Var::new("z")], c("c"));

        assert!(eval_cq(&i, &[AtomPattern::new("S", &["x"])]).is_empty());
    }

    #[test]
    fn active_trigger_examples() {
        let d = &deps("R(x) -> exists z. S(x, z)")[0];
        assert_eq!(active_triggers(&inst("R(a)"), d).len(), 1);
        assert!(active_triggers(&inst("R(a)\nS(a, _n1)"), d).is_empty());

        let e = &deps("R(x, y), R(x, w) -> y = w")[0];
        assert_eq!(active_triggers(&inst("R(a, _n1)\nR(a, _n2)"), e).len(), 2);
        assert!(active_triggers(&inst("R(a, _n1)"), e).is_empty());
    }

    #[test]
    fn chase_step_examples() {
        let d = &deps("R(x) -> exists z. S(x, z)")[0];
        let mut i = inst("R(a)");
        let mut next = 7;
        let h = active_triggers(&i, d).remove(0);
        chase_step(&mut i, d, &h, &mut next).unwrap();
        assert_eq!(i, inst("R(a)\nS(a, _n7)"));
        assert_eq!(chase_step(&mut i, d, &h, &mut next), Err(ChaseError::InactiveTrigger));

        let e = &deps("R(x, y), R(x, w) -> y = w")[0];
        let mut i = inst("R(a, _n1)\nR(a, _n2)");
        let h = active_triggers(&i, e).remove(0);
        chase_step(&mut i, e, &h, &mut next).unwrap();
        assert_eq!(i, inst("R(a, _n1)"));

        let mut i = inst("R(k, a)\nR(k, b)");
        let h = active_triggers(&i, e).remove(0);
        assert_eq!(chase_step(&mut i, e, &h, &mut next), Ok(StepResult::Failure));
    }

    #[test]
    fn validation() {
        let bad = Dependency::Egd {
            body: vec![AtomPattern::new("R", &["x"])],
            left: Var::new("x"),
            right: Var::new("y"),
        };
        assert_eq!(bad.validate(), Err(ChaseError::UnboundEqualityVariable(Var::new("y"))));
        let d = Dependency::tgd(
            vec![AtomPattern::new("R", &["x"])],
            vec![AtomPattern::new("S", &["x", "z"])],
        );
        assert_eq!(d.frontier(), vec![Var::new("x")]);
        assert!(d.validate().is_ok());
    }
}
