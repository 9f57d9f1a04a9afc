//! S-expression syntax for terms, patterns and TRS files.
//!
//! ```text
//! sig f/2 g/1 a/0          ; optional header
//! (f (f ?x ?y) ?z) -> (g (f ?z ?x))
//! ```

use std::fmt::Write as _;

use super::{Pattern, RewriteRule, Signature, Symbol, Term, TermError, Trs, Var};
use crate::syntax::{tokenize, Cursor, ParseError, Token};

fn pattern_expr(cur: &mut Cursor<'_>) -> Result<Pattern, ParseError> {
    match cur.peek() {
        Some(Token::Var(v)) => {
            let v = Var::new(v);
            cur.advance();
            Ok(Pattern::Var(v))
        }
        Some(Token::Ident(_)) => Ok(Pattern::leaf(cur.ident()?)),
        Some(Token::LParen) => {
            cur.advance();
            let head = cur.ident()?;
            let mut children = Vec::new();
            while !cur.eat(&Token::RParen) {
                if cur.is_done() {
                    return Err(cur.error("unclosed `(`"));
                }
                children.push(pattern_expr(cur)?);
            }
            Ok(Pattern::app(head, children))
        }
        Some(t) => Err(cur.error(format!("expected a term, found {t}"))),
        None => Err(cur.error("expected a term, found end of input")),
    }
}

fn term_error(err: TermError, line: usize) -> ParseError {
    ParseError::new(line, 1, err.to_string())
}

fn parse_pattern_raw(text: &str, line: usize) -> Result<Pattern, ParseError> {
    let tokens = tokenize(text, line)?;
    let mut cur = Cursor::new(&tokens, line);
    let p = pattern_expr(&mut cur)?;
    cur.finish()?;
    Ok(p)
}

/// Parse a pattern and check it against `sig`.
pub fn parse_pattern(text: &str, sig: &Signature) -> Result<Pattern, ParseError> {
    let p = parse_pattern_raw(text, 1)?;
    p.check(sig).map_err(|e| term_error(e, 1))?;
    Ok(p)
}

fn ground(p: Pattern, line: usize) -> Result<Term, ParseError> {
    match p.vars().into_iter().next() {
        Some(v) => Err(ParseError::new(
            line,
            1,
            format!("ground term expected, found variable {v}"),
        )),
        None => Ok(p.to_term().expect("no variables")),
    }
}

/// Parse a ground term and check it against `sig`.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    let t = ground(parse_pattern_raw(text, 1)?, 1)?;
    t.check(sig).map_err(|e| term_error(e, 1))?;
    Ok(t)
}

/// Parse a ground term, inferring the signature from its symbols.
pub fn parse_term_infer(text: &str) -> Result<(Term, Signature), ParseError> {
    let t = ground(parse_pattern_raw(text, 1)?, 1)?;
    let mut sig = Signature::new();
    t.infer_signature(&mut sig).map_err(|e| term_error(e, 1))?;
    Ok((t, sig))
}

fn parse_sig_header(text: &str, line: usize) -> Result<Signature, ParseError> {
    let tokens = tokenize(text, line)?;
    let mut cur = Cursor::new(&tokens, line);
    cur.ident()?; // `sig`
    let mut sig = Signature::new();
    while !cur.is_done() {
        let name = cur.ident()?;
        cur.expect(&Token::Slash)?;
        let arity = cur
            .ident()?
            .parse::<usize>()
            .map_err(|_| ParseError::new(line, 1, format!("bad arity for `{name}`")))?;
        sig.declare(Symbol::new(name), arity).map_err(|e| term_error(e, line))?;
    }
    Ok(sig)
}

/// Parse a TRS file. Without a `sig` header the signature is inferred and
/// inconsistent arities are reported at the offending line.
pub fn parse_trs(text: &str) -> Result<Trs, ParseError> {
    let mut declared: Option<Signature> = None;
    let mut inferred = Signature::new();
    let mut rules = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split(';').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if body.starts_with("sig ") || body == "sig" {
            if declared.is_some() || !rules.is_empty() {
                return Err(ParseError::new(line, 1, "`sig` header must come first and only once"));
            }
            declared = Some(parse_sig_header(body, line)?);
            continue;
        }
        let tokens = tokenize(body, line)?;
        let mut cur = Cursor::new(&tokens, line);
        let lhs = pattern_expr(&mut cur)?;
        cur.expect(&Token::Arrow)?;
        let rhs = pattern_expr(&mut cur)?;
        cur.finish()?;
        let check = |p: &Pattern, inferred: &mut Signature| match &declared {
            Some(sig) => p.check(sig),
            None => p.infer_signature(inferred),
        };
        check(&lhs, &mut inferred).map_err(|e| term_error(e, line))?;
        check(&rhs, &mut inferred).map_err(|e| term_error(e, line))?;
        rules.push(RewriteRule::new(lhs, rhs).map_err(|e| term_error(e, line))?);
    }
    let signature = declared.unwrap_or(inferred);
    Ok(Trs { signature, rules })
}

/// Serialize with an explicit `sig` header so nullary-only symbols survive.
pub fn write_trs(trs: &Trs) -> String {
    let mut out = String::new();
    if !trs.signature.is_empty() {
        let _ = writeln!(out, "{}", trs.signature);
    }
    for r in &trs.rules {
        let _ = writeln!(out, "{r}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_term_examples() {
        let sig = Signature::from_pairs([("f", 1), ("g", 1), ("a", 0)]).unwrap();
        let t = parse_term("(f (g a))", &sig).unwrap();
        assert_eq!(t, Term::new("f", vec![Term::new("g", vec![Term::leaf("a")])]));

        let sig2 = Signature::from_pairs([("f", 2), ("a", 0)]).unwrap();
        let err = parse_term("(f a)", &sig2).unwrap_err();
        assert!(err.message.contains("expects 2"), "{err}");

        let t8 = parse_term("(f (f (f a a) (f a a)) (f (f a a) (f a a)))", &sig2).unwrap();
        assert_eq!(t8.size(), 15);
        assert_eq!(t8.subterms().len(), 4);
    }

    #[test]
    fn terms_reject_variables_and_unknown_symbols() {
        let sig = Signature::from_pairs([("f", 1), ("a", 0)]).unwrap();
        assert!(parse_term("(f ?x)", &sig).is_err());
        assert!(parse_term("(h a)", &sig).is_err());
        assert!(parse_term("(f a", &sig).is_err());
    }

    #[test]
    fn trs_file_with_and_without_header() {
        let trs = parse_trs("; comment\n(f (f ?x ?y) ?z) -> (g (f ?z ?x))\n").unwrap();
        assert_eq!(trs.signature().arity(&Symbol::new("f")), Some(2));
        assert_eq!(trs.signature().arity(&Symbol::new("g")), Some(1));

        let trs = parse_trs("sig f/2 g/1 a/0\n(f ?x ?x) -> (g ?x)\n").unwrap();
        assert_eq!(trs.signature().len(), 3);

        let err = parse_trs("sig f/2\n(f ?x) -> ?x\n").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn inference_conflict_reports_line() {
        let err = parse_trs("(f ?x ?y) -> ?x\n\n(f ?x) -> ?x\n").unwrap_err();
        assert_eq!(err.line, 3);
    }

    #[test]
    fn write_then_parse_round_trips() {
        let trs = parse_trs("sig f/2 g/1 a/0\n(f ?x a) -> (g ?x)\n").unwrap();
        assert_eq!(parse_trs(&write_trs(&trs)).unwrap(), trs);
    }
}
