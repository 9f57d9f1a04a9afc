//! Signatures, ground terms, patterns, substitutions and term rewriting
//! systems.

mod parse;
pub(crate) mod rewrite;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use parse::{parse_pattern, parse_term, parse_term_infer, parse_trs, write_trs};
pub use rewrite::{all_terms_up_to, one_step_rewrites, rewrite_closure};

/// An interned-by-refcount function symbol name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl From<String> for Symbol {
    fn from(s: String) -> Self {
        Symbol(Arc::from(s))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A pattern variable. Printed with a leading `?`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(Symbol),
    #[error("symbol `{symbol}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        symbol: Symbol,
        expected: usize,
        found: usize,
    },
    #[error("symbol `{symbol}` used with arities {first} and {second}")]
    ArityConflict {
        symbol: Symbol,
        first: usize,
        second: usize,
    },
    #[error("unbound variable {0}")]
    UnboundVariable(Var),
    #[error("right-hand side variable {0} does not occur in the left-hand side")]
    RhsVariableNotInLhs(Var),
    #[error("rule `{0}` is not variable-preserving")]
    NotVariablePreserving(RewriteRule),
}

/// Function symbols with fixed arities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    arities: BTreeMap<Symbol, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, usize)>) -> Result<Self, TermError> {
        let mut sig = Signature::new();
        for (name, arity) in pairs {
            sig.declare(Symbol::new(name), arity)?;
        }
        Ok(sig)
    }

    /// Add `symbol` with `arity`; redeclaring with the same arity is a no-op.
    pub fn declare(&mut self, symbol: Symbol, arity: usize) -> Result<(), TermError> {
        match self.arities.get(&symbol) {
            Some(&existing) if existing != arity => Err(TermError::ArityConflict {
                symbol,
                first: existing,
                second: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(symbol, arity);
                Ok(())
            }
        }
    }

    pub fn merge(&mut self, other: &Signature) -> Result<(), TermError> {
        for (s, &a) in &other.arities {
            self.declare(s.clone(), a)?;
        }
        Ok(())
    }

    pub fn arity(&self, symbol: &Symbol) -> Option<usize> {
        self.arities.get(symbol).copied()
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        self.arities.contains_key(symbol)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, usize)> + '_ {
        self.arities.iter().map(|(s, &a)| (s, a))
    }

    pub fn len(&self) -> usize {
        self.arities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arities.is_empty()
    }

    fn check_use(&self, symbol: &Symbol, found: usize) -> Result<(), TermError> {
        match self.arity(symbol) {
            None => Err(TermError::UnknownSymbol(symbol.clone())),
            Some(expected) if expected != found => Err(TermError::ArityMismatch {
                symbol: symbol.clone(),
                expected,
                found,
            }),
            Some(_) => Ok(()),
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("sig")?;
        for (s, a) in self.iter() {
            write!(f, " {s}/{a}")?;
        }
        Ok(())
    }
}

/// A ground term.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    head: Symbol,
    children: Vec<Term>,
}

impl Term {
    pub fn new(head: impl Into<Symbol>, children: Vec<Term>) -> Self {
        Term {
            head: head.into(),
            children,
        }
    }

    pub fn leaf(head: impl Into<Symbol>) -> Self {
        Term::new(head, Vec::new())
    }

    pub fn head(&self) -> &Symbol {
        &self.head
    }

    pub fn children(&self) -> &[Term] {
        &self.children
    }

    /// Number of symbol occurrences.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Term::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn check(&self, sig: &Signature) -> Result<(), TermError> {
        sig.check_use(&self.head, self.children.len())?;
        self.children.iter().try_for_each(|c| c.check(sig))
    }

    /// Signature of the symbols used, or a conflict if one symbol appears at two arities.
    pub fn infer_signature(&self, sig: &mut Signature) -> Result<(), TermError> {
        sig.declare(self.head.clone(), self.children.len())?;
        self.children.iter().try_for_each(|c| c.infer_signature(sig))
    }

    /// All distinct subterms, including `self`.
    pub fn subterms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        fn go(t: &Term, out: &mut BTreeSet<Term>) {
            if out.insert(t.clone()) {
                t.children.iter().for_each(|c| go(c, out));
            }
        }
        go(self, &mut out);
        out
    }

    pub fn to_pattern(&self) -> Pattern {
        Pattern::App(self.head.clone(), self.children.iter().map(Term::to_pattern).collect())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.children.is_empty() {
            write!(f, "{}", self.head)
        } else {
            write!(f, "({}", self.head)?;
            for c in &self.children {
                write!(f, " {c}")?;
            }
            f.write_str(")")
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub type Subst = BTreeMap<Var, Term>;

/// A term with variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pattern {
    Var(Var),
    App(Symbol, Vec<Pattern>),
}

impl Pattern {
    pub fn var(name: &str) -> Self {
        Pattern::Var(Var::new(name))
    }

    pub fn app(head: impl Into<Symbol>, children: Vec<Pattern>) -> Self {
        Pattern::App(head.into(), children)
    }

    pub fn leaf(head: impl Into<Symbol>) -> Self {
        Pattern::App(head.into(), Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Pattern::Var(_))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Pattern::Var(v) => Some(v),
            Pattern::App(..) => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Pattern::Var(v) => {
                out.insert(v.clone());
            }
            Pattern::App(_, cs) => cs.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Pattern::Var(_) => 1,
            Pattern::App(_, cs) => 1 + cs.iter().map(Pattern::size).sum::<usize>(),
        }
    }

    pub fn check(&self, sig: &Signature) -> Result<(), TermError> {
        match self {
            Pattern::Var(_) => Ok(()),
            Pattern::App(f, cs) => {
                sig.check_use(f, cs.len())?;
                cs.iter().try_for_each(|c| c.check(sig))
            }
        }
    }

    pub fn infer_signature(&self, sig: &mut Signature) -> Result<(), TermError> {
        match self {
            Pattern::Var(_) => Ok(()),
            Pattern::App(f, cs) => {
                sig.declare(f.clone(), cs.len())?;
                cs.iter().try_for_each(|c| c.infer_signature(sig))
            }
        }
    }

    /// `self[σ]`.
    pub fn substitute(&self, subst: &Subst) -> Result<Term, TermError> {
        match self {
            Pattern::Var(v) => subst
                .get(v)
                .cloned()
                .ok_or_else(|| TermError::UnboundVariable(v.clone())),
            Pattern::App(f, cs) => Ok(Term::new(
                f.clone(),
                cs.iter().map(|c| c.substitute(subst)).collect::<Result<_, _>>()?,
            )),
        }
    }

    /// Syntactic matching. Repeated variables must bind equal subterms.
    pub fn match_term(&self, term: &Term) -> Option<Subst> {
        let mut subst = Subst::new();
        self.match_into(term, &mut subst).then_some(subst)
    }

    fn match_into(&self, term: &Term, subst: &mut Subst) -> bool {
        match self {
            Pattern::Var(v) => match subst.get(v) {
                Some(bound) => bound == term,
                None => {
                    subst.insert(v.clone(), term.clone());
                    true
                }
            },
            Pattern::App(f, cs) => {
                f == term.head()
                    && cs.len() == term.children().len()
                    && cs.iter().zip(term.children()).all(|(p, t)| p.match_into(t, subst))
            }
        }
    }

    /// Rename variables through `f`.
    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Pattern) -> Pattern {
        match self {
            Pattern::Var(v) => f(v),
            Pattern::App(h, cs) => Pattern::App(h.clone(), cs.iter().map(|c| c.map_vars(f)).collect()),
        }
    }

    /// All distinct sub-patterns including `self`, in pre-order of first occurrence.
    pub fn subpatterns(&self) -> Vec<&Pattern> {
        let mut out: Vec<&Pattern> = Vec::new();
        fn go<'a>(p: &'a Pattern, out: &mut Vec<&'a Pattern>) {
            if !out.contains(&p) {
                out.push(p);
            }
            if let Pattern::App(_, cs) = p {
                cs.iter().for_each(|c| go(c, out));
            }
        }
        go(self, &mut out);
        out
    }

    pub fn to_term(&self) -> Option<Term> {
        match self {
            Pattern::Var(_) => None,
            Pattern::App(f, cs) => Some(Term::new(
                f.clone(),
                cs.iter().map(Pattern::to_term).collect::<Option<_>>()?,
            )),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Var(v) => write!(f, "{v}"),
            Pattern::App(h, cs) if cs.is_empty() => write!(f, "{h}"),
            Pattern::App(h, cs) => {
                write!(f, "({h}")?;
                for c in cs {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `lhs -> rhs` with `Var(rhs) ⊆ Var(lhs)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RewriteRule {
    lhs: Pattern,
    rhs: Pattern,
}

impl RewriteRule {
    pub fn new(lhs: Pattern, rhs: Pattern) -> Result<Self, TermError> {
        let lv = lhs.vars();
        if let Some(v) = rhs.vars().into_iter().find(|v| !lv.contains(v)) {
            return Err(TermError::RhsVariableNotInLhs(v));
        }
        Ok(RewriteRule { lhs, rhs })
    }

    pub fn lhs(&self) -> &Pattern {
        &self.lhs
    }

    pub fn rhs(&self) -> &Pattern {
        &self.rhs
    }

    pub fn is_variable_preserving(&self) -> bool {
        self.lhs.vars() == self.rhs.vars()
    }

    /// A rule whose left-hand side is a bare variable.
    pub fn is_degenerate(&self) -> bool {
        self.lhs.is_var()
    }

    /// `rhs -> lhs`; only defined for variable-preserving rules.
    pub fn flipped(&self) -> Result<RewriteRule, TermError> {
        if !self.is_variable_preserving() {
            return Err(TermError::NotVariablePreserving(self.clone()));
        }
        Ok(RewriteRule {
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
        })
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

impl fmt::Debug for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A term rewriting system over a fixed signature.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trs {
    signature: Signature,
    rules: Vec<RewriteRule>,
}

impl Trs {
    pub fn new(signature: Signature, rules: Vec<RewriteRule>) -> Result<Self, TermError> {
        for r in &rules {
            r.lhs.check(&signature)?;
            r.rhs.check(&signature)?;
        }
        Ok(Trs { signature, rules })
    }

    /// Build with the signature inferred from the rules.
    pub fn from_rules(rules: Vec<RewriteRule>) -> Result<Self, TermError> {
        let mut signature = Signature::new();
        for r in &rules {
            r.lhs.infer_signature(&mut signature)?;
            r.rhs.infer_signature(&mut signature)?;
        }
        Ok(Trs { signature, rules })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    /// Widen the signature, e.g. with symbols of an input term.
    pub fn with_signature(mut self, extra: &Signature) -> Result<Self, TermError> {
        self.signature.merge(extra)?;
        Ok(self)
    }

    pub fn is_variable_preserving(&self) -> bool {
        self.rules.iter().all(RewriteRule::is_variable_preserving)
    }

    /// `R ∪ R⁻¹`, deduplicated, original rules first.
    pub fn symmetric_closure(&self) -> Result<Trs, TermError> {
        let mut seen = BTreeSet::new();
        let mut rules = Vec::new();
        let flipped = self
            .rules
            .iter()
            .map(RewriteRule::flipped)
            .collect::<Result<Vec<_>, _>>()?;
        for r in self.rules.iter().cloned().chain(flipped) {
            if seen.insert(r.clone()) {
                rules.push(r);
            }
        }
        Ok(Trs {
            signature: self.signature.clone(),
            rules,
        })
    }
}

impl fmt::Display for Trs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_trs(self))
    }
}
