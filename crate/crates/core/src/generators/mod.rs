//! Rewrite systems built from Turing machines and Post correspondence
//! problems, with strings encoded as chains of unary symbols.

mod pcp;
mod tm;

use std::collections::BTreeSet;
use std::fmt;

use crate::term::{Pattern, RewriteRule, Signature, Symbol, Term, TermError, Trs};

pub use pcp::{parse_pcp, pcp_start_term, pcp_to_trs, PcpInstance};
pub use tm::{parse_tm, tm_to_srs, Move, TmEncoding, TmError, Transition, TuringMachine};

/// End of an encoded string.
pub const EPS: &str = "eps";

pub type Word = Vec<Symbol>;

pub fn word(symbols: &[&str]) -> Word {
    symbols.iter().map(|s| Symbol::new(s)).collect()
}

fn show(w: &[Symbol]) -> String {
    w.iter().map(Symbol::as_str).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringRule {
    pub lhs: Word,
    pub rhs: Word,
}

impl fmt::Display for StringRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", show(&self.lhs), show(&self.rhs))
    }
}

/// A string rewriting system.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Srs {
    pub alphabet: BTreeSet<Symbol>,
    pub rules: Vec<StringRule>,
}

impl Srs {
    pub fn push(&mut self, lhs: Word, rhs: Word) {
        assert!(!lhs.is_empty(), "string rules need a nonempty left-hand side");
        self.alphabet.extend(lhs.iter().chain(&rhs).cloned());
        let r = StringRule { lhs, rhs };
        if !self.rules.contains(&r) {
            self.rules.push(r);
        }
    }

    /// Every string reachable from `w` in one step.
    pub fn successors(&self, w: &[Symbol]) -> Vec<Word> {
        let mut out = Vec::new();
        for r in &self.rules {
            let n = r.lhs.len();
            if n > w.len() {
                continue;
            }
            for i in 0..=w.len() - n {
                if w[i..i + n] == r.lhs[..] {
                    let mut next = w[..i].to_vec();
                    next.extend(r.rhs.iter().cloned());
                    next.extend(w[i + n..].iter().cloned());
                    out.push(next);
                }
            }
        }
        out
    }
}

/// `uvw` becomes `u(v(w(eps)))`.
pub fn string_to_term(w: &[Symbol]) -> Term {
    w.iter()
        .rev()
        .fold(Term::leaf(EPS), |acc, s| Term::new(s.clone(), vec![acc]))
}

/// Inverse of [`string_to_term`].
pub fn term_to_string(t: &Term) -> Option<Word> {
    let mut out = Vec::new();
    let mut cur = t;
    loop {
        match cur.children() {
            [] if cur.head().as_str() == EPS => return Some(out),
            [c] => {
                out.push(cur.head().clone());
                cur = c;
            }
            _ => return None,
        }
    }
}

pub(crate) fn string_pattern(w: &[Symbol], tail: Pattern) -> Pattern {
    w.iter().rev().fold(tail, |acc, s| Pattern::app(s.clone(), vec![acc]))
}

/// Rule `uvw → vuw` becomes `u(v(w(x))) → v(u(w(x)))`.
pub fn srs_to_trs(srs: &Srs) -> Result<Trs, TermError> {
    let mut sig = Signature::new();
    sig.declare(Symbol::new(EPS), 0)?;
    for s in &srs.alphabet {
        sig.declare(s.clone(), 1)?;
    }
    let x = || Pattern::var("x");
    let rules = srs
        .rules
        .iter()
        .map(|r| RewriteRule::new(string_pattern(&r.lhs, x()), string_pattern(&r.rhs, x())))
        .collect::<Result<Vec<_>, _>>()?;
    Trs::new(sig, rules)
}
