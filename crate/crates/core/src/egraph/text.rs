//! Line format for E-graphs and DOT rendering.
//!
//! ```text
//! a -> c1
//! f(c1,c1) -> c2
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Automaton, ClassId, EGraph, ENode};
use crate::syntax::{tokenize, Cursor, ParseError, Token};

/// A parsed E-graph together with the class names used in the file.
#[derive(Debug, Clone)]
pub struct NamedEGraph {
    pub egraph: EGraph,
    pub names: BTreeMap<String, ClassId>,
}

impl NamedEGraph {
    pub fn class(&self, name: &str) -> Option<ClassId> {
        self.names.get(name).copied()
    }
}

/// Parse a possibly nondeterministic automaton. Class names get ids in
/// order of first appearance.
pub fn parse_automaton(text: &str) -> Result<(Automaton, BTreeMap<String, ClassId>), ParseError> {
    let mut names: BTreeMap<String, ClassId> = BTreeMap::new();
    let mut a = Automaton::default();
    let id = |name: &str, names: &mut BTreeMap<String, ClassId>| {
        let next = ClassId(names.len() as u32);
        *names.entry(name.to_string()).or_insert(next)
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens = tokenize(raw, line)?;
        if tokens.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(&tokens, line);
        let head = cur.ident()?;
        let mut children = Vec::new();
        if cur.eat(&Token::LParen) && !cur.eat(&Token::RParen) {
            loop {
                children.push(id(cur.ident()?, &mut names));
                if cur.eat(&Token::RParen) {
                    break;
                }
                cur.expect(&Token::Comma)?;
            }
        }
        cur.expect(&Token::Arrow)?;
        let target = id(cur.ident()?, &mut names);
        cur.finish()?;
        a.add_transition(ENode::new(head, children), target)
            .map_err(|e| ParseError::new(line, 1, e.to_string()))?;
    }
    Ok((a, names))
}

/// Parse an E-graph; the file must already be deterministic and reachable.
pub fn parse_egraph(text: &str) -> Result<NamedEGraph, ParseError> {
    let (a, names) = parse_automaton(text)?;
    let egraph = EGraph::from_automaton(&a).map_err(|e| {
        let line = match &e {
            super::EGraphError::Nondeterministic { node } => line_of_node(text, node),
            _ => 0,
        };
        ParseError::new(line, 1, e.to_string())
    })?;
    Ok(NamedEGraph { egraph, names })
}

fn line_of_node(text: &str, node: &ENode) -> usize {
    // Report the second occurrence of the node's head with the same arity.
    let mut seen = 0;
    for (i, raw) in text.lines().enumerate() {
        let trimmed = raw.trim_start();
        if trimmed.starts_with(node.head.as_str()) {
            seen += 1;
            if seen == 2 {
                return i + 1;
            }
        }
    }
    0
}

pub fn write_egraph(g: &EGraph) -> String {
    let mut out = String::new();
    for (n, c) in g.nodes() {
        let _ = write!(out, "{}", n.head);
        if !n.children.is_empty() {
            let kids: Vec<String> = n.children.iter().map(ToString::to_string).collect();
            let _ = write!(out, "({})", kids.join(","));
        }
        let _ = writeln!(out, " -> {c}");
    }
    out
}

/// One cluster per class holding its nodes; edges run from a node to the
/// clusters of its arguments.
pub fn to_dot(g: &EGraph) -> String {
    let mut out = String::from("digraph egraph {\n  compound=true;\n  node [shape=ellipse];\n");
    let mut node_ids: BTreeMap<&ENode, usize> = BTreeMap::new();
    for &c in g.classes() {
        let _ = writeln!(
            out,
            "  subgraph cluster_{} {{\n    style=dotted;\n    label=\"{c}\";",
            c.0
        );
        let _ = writeln!(out, "    anchor_{} [shape=point, style=invis];", c.0);
        for n in g.nodes_of(c) {
            let k = node_ids.len();
            node_ids.insert(n, k);
            let _ = writeln!(out, "    n{k} [label=\"{}\"];", n.head);
        }
        out.push_str("  }\n");
    }
    for (n, &k) in &node_ids {
        for (i, ch) in n.children.iter().enumerate() {
            let _ = writeln!(
                out,
                "  n{k} -> anchor_{} [lhead=cluster_{}, label=\"{}\"];",
                ch.0,
                ch.0,
                i + 1
            );
        }
    }
    out.push_str("}\n");
    out
}
