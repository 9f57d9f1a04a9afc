//! Line formats for dependencies and instances.
//!
//! ```text
//! R(x,y), S(y,z) -> exists w. T(x,w)
//! Rf(x,y,r), Rf(x,y,s) -> r = s
//! ```
//!
//! Instances list atoms, one or more per line: `R(a, _n1)`. Arguments
//! starting with `_` are labelled nulls; `_n<k>` is null number `k`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Atom, AtomPattern, Dependency, Elem, Instance};
use crate::syntax::{tokenize, Cursor, ParseError, Token};
use crate::term::{Symbol, Var};

fn atom_pattern(cur: &mut Cursor<'_>) -> Result<AtomPattern, ParseError> {
    let rel = cur.ident()?;
    let mut args = Vec::new();
    if cur.eat(&Token::LParen) && !cur.eat(&Token::RParen) {
        loop {
            args.push(Var::new(cur.ident()?));
            if cur.eat(&Token::RParen) {
                break;
            }
            cur.expect(&Token::Comma)?;
        }
    }
    Ok(AtomPattern {
        rel: Symbol::new(rel),
        args,
    })
}

fn atom_list(cur: &mut Cursor<'_>) -> Result<Vec<AtomPattern>, ParseError> {
    let mut out = vec![atom_pattern(cur)?];
    while cur.eat(&Token::Comma) {
        out.push(atom_pattern(cur)?);
    }
    Ok(out)
}

fn dependency(cur: &mut Cursor<'_>) -> Result<Dependency, ParseError> {
    let body = atom_list(cur)?;
    cur.expect(&Token::Arrow)?;
    if matches!(cur.peek_at(1), Some(Token::Equals)) {
        let left = cur.ident()?;
        cur.expect(&Token::Equals)?;
        let right = cur.ident()?;
        return Ok(Dependency::egd(body, left, right));
    }
    let mut declared = Vec::new();
    if cur.peek() == Some(&Token::Ident("exists".into())) && !matches!(cur.peek_at(1), Some(Token::LParen)) {
        cur.advance();
        loop {
            declared.push(Var::new(cur.ident()?));
            if !cur.eat(&Token::Comma) {
                break;
            }
        }
        cur.expect(&Token::Dot)?;
    }
    let head = atom_list(cur)?;
    let d = Dependency::tgd(body, head);
    if let Dependency::Tgd { existentials, .. } = &d {
        let mut a = existentials.clone();
        let mut b = declared.clone();
        a.sort();
        b.sort();
        if a != b {
            let names: Vec<&str> = existentials.iter().map(Var::name).collect();
            return Err(cur.error(format!(
                "existential variables must be exactly the new head variables [{}]",
                names.join(", ")
            )));
        }
    }
    Ok(match d {
        Dependency::Tgd { body, head, .. } => Dependency::Tgd {
            body,
            head,
            existentials: declared,
        },
        egd => egd,
    })
}

/// Parse one dependency per non-empty line.
pub fn parse_dependencies(text: &str) -> Result<Vec<Dependency>, ParseError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens = tokenize(raw, line)?;
        if tokens.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(&tokens, line);
        let d = dependency(&mut cur)?;
        cur.finish()?;
        d.validate().map_err(|e| ParseError::new(line, 1, e.to_string()))?;
        out.push(d);
    }
    Ok(out)
}

struct NullNames {
    named: BTreeMap<String, u32>,
    pending: Vec<String>,
}

fn element(cur: &mut Cursor<'_>, nulls: &mut NullNames) -> Result<Elem, ParseError> {
    let name = cur.ident()?;
    if let Some(rest) = name.strip_prefix('_') {
        if let Some(k) = rest.strip_prefix('n').and_then(|d| d.parse::<u32>().ok()) {
            return Ok(Elem::Null(k));
        }
        if !nulls.named.contains_key(name) && !nulls.pending.iter().any(|p| p == name) {
            nulls.pending.push(name.to_string());
        }
        // resolved once all numbered nulls are known
        return Ok(Elem::Const(Symbol::new(name)));
    }
    if cur.eat(&Token::LParen) {
        let mut args = Vec::new();
        if !cur.eat(&Token::RParen) {
            loop {
                args.push(element(cur, nulls)?);
                if cur.eat(&Token::RParen) {
                    break;
                }
                cur.expect(&Token::Comma)?;
            }
        }
        return Ok(Elem::Skolem(Symbol::new(name), args));
    }
    Ok(Elem::Const(Symbol::new(name)))
}

/// Parse an instance file.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut nulls = NullNames {
        named: BTreeMap::new(),
        pending: Vec::new(),
    };
    let mut atoms = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens = tokenize(raw, line)?;
        let mut cur = Cursor::new(&tokens, line);
        while !cur.is_done() {
            let rel = cur.ident()?;
            let mut args = Vec::new();
            if cur.eat(&Token::LParen) && !cur.eat(&Token::RParen) {
                loop {
                    args.push(element(&mut cur, &mut nulls)?);
                    if cur.eat(&Token::RParen) {
                        break;
                    }
                    cur.expect(&Token::Comma)?;
                }
            }
            atoms.push(Atom::new(rel, args));
            if !cur.eat(&Token::Comma) {
                cur.eat(&Token::Dot);
            }
        }
    }
    let mut inst = Instance::from_atoms(atoms);
    let first = inst.max_null().map_or(1, |n| n + 1);
    for (name, id) in nulls.pending.into_iter().zip(first..) {
        inst.replace(&Elem::Const(Symbol::new(&name)), &Elem::Null(id));
        nulls.named.insert(name, id);
    }
    Ok(inst)
}

pub fn write_dependencies(deps: &[Dependency]) -> String {
    let mut out = String::new();
    for d in deps {
        let _ = writeln!(out, "{d}");
    }
    out
}

pub fn write_instance(inst: &Instance) -> String {
    inst.to_string()
}
