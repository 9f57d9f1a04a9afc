//! Post correspondence problems as rewrite systems whose saturation from
//! `k(eps, eps)` terminates exactly when a solution exists.
//!
//! Files list one pair per line: `pair ab : a`. Each character of a word
//! is one letter.

use std::collections::BTreeSet;

use super::{string_pattern, Word, EPS};
use crate::syntax::ParseError;
use crate::term::{Pattern, RewriteRule, Signature, Symbol, Term, TermError, Trs};

const RESERVED: [&str; 4] = ["k", "r", "goal", EPS];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcpInstance {
    pub pairs: Vec<(Word, Word)>,
}

impl PcpInstance {
    pub fn alphabet(&self) -> BTreeSet<Symbol> {
        self.pairs
            .iter()
            .flat_map(|(a, b)| a.iter().chain(b))
            .cloned()
            .collect()
    }

    /// Whether `indices` (1-based) is a solution.
    pub fn solves(&self, indices: &[usize]) -> bool {
        let cat = |pick: fn(&(Word, Word)) -> &Word| -> Word {
            indices
                .iter()
                .flat_map(|&i| pick(&self.pairs[i - 1]).iter().cloned())
                .collect()
        };
        !indices.is_empty() && cat(|p| &p.0) == cat(|p| &p.1)
    }
}

pub fn parse_pcp(text: &str) -> Result<PcpInstance, ParseError> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.split('#').next().unwrap_or("").trim();
        if raw.is_empty() {
            continue;
        }
        let err = |m: &str| ParseError::new(line, 1, m.to_string());
        let rest = raw
            .strip_prefix("pair")
            .ok_or_else(|| err("expected `pair <word> : <word>`"))?;
        let (a, b) = rest
            .split_once(':')
            .ok_or_else(|| err("expected `:` between the two words"))?;
        let letters = |w: &str| -> Result<Word, ParseError> {
            let w = w.trim();
            if w.is_empty() {
                return Err(err("words must be nonempty"));
            }
            w.chars()
                .map(|c| {
                    let s = c.to_string();
                    if !c.is_alphanumeric() || RESERVED.contains(&s.as_str()) {
                        Err(err(&format!("letter `{c}` is not allowed")))
                    } else {
                        Ok(Symbol::from(s))
                    }
                })
                .collect()
        };
        pairs.push((letters(a)?, letters(b)?));
    }
    if pairs.is_empty() {
        return Err(ParseError::new(1, 1, "no pairs"));
    }
    Ok(PcpInstance { pairs })
}

fn index_symbol(i: usize) -> Symbol {
    Symbol::from(format!("i{i}"))
}

/// The start term `k(eps, eps)`.
pub fn pcp_start_term() -> Term {
    Term::new("k", vec![Term::leaf(EPS), Term::leaf(EPS)])
}

/// Search rules, goal propagation, and start normalization.
pub fn pcp_to_trs(p: &PcpInstance) -> Result<Trs, TermError> {
    let mut sig = Signature::new();
    for (s, n) in [("k", 2), ("r", 2), ("goal", 0), (EPS, 0)] {
        sig.declare(Symbol::new(s), n)?;
    }
    for a in p.alphabet() {
        sig.declare(a, 1)?;
    }
    for i in 1..=p.pairs.len() {
        sig.declare(index_symbol(i), 1)?;
    }
    let v = Pattern::var;
    let app = |f: &str, cs: Vec<Pattern>| Pattern::app(f, cs);
    let leaf = |f: &str| Pattern::leaf(f);
    let mut rules = Vec::new();
    for (i, (alpha, beta)) in p.pairs.iter().enumerate() {
        let idx = |x: Pattern| Pattern::app(index_symbol(i + 1), vec![x]);
        rules.push(RewriteRule::new(
            app("k", vec![v("x"), v("y")]),
            app("k", vec![idx(v("x")), string_pattern(alpha, v("y"))]),
        )?);
        rules.push(RewriteRule::new(
            app("k", vec![idx(v("x")), v("y")]),
            app("r", vec![idx(v("x")), v("y")]),
        )?);
        rules.push(RewriteRule::new(
            app("r", vec![idx(v("x")), string_pattern(beta, v("z"))]),
            app("r", vec![v("x"), v("z")]),
        )?);
    }
    rules.push(RewriteRule::new(app("r", vec![leaf(EPS), leaf(EPS)]), leaf("goal"))?);
    rules.push(RewriteRule::new(leaf("goal"), leaf(EPS))?);
    let goal = || leaf("goal");
    for i in 1..=p.pairs.len() {
        rules.push(RewriteRule::new(goal(), Pattern::app(index_symbol(i), vec![goal()]))?);
    }
    for a in p.alphabet() {
        rules.push(RewriteRule::new(goal(), Pattern::app(a, vec![goal()]))?);
    }
    rules.push(RewriteRule::new(goal(), app("k", vec![goal(), goal()]))?);
    rules.push(RewriteRule::new(goal(), app("r", vec![goal(), goal()]))?);
    let start = || app("k", vec![leaf(EPS), leaf(EPS)]);
    rules.push(RewriteRule::new(app("k", vec![v("x"), v("y")]), start())?);
    rules.push(RewriteRule::new(app("r", vec![v("x"), v("y")]), start())?);
    Trs::new(sig, rules)
}
