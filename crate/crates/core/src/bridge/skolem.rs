//! Skolem chase to equality saturation: relational atoms become nodes in
//! the class of `top`, conjunctions become right-nested `and` chains.

use std::collections::{BTreeMap, BTreeSet};
use std::thread;

use super::{BridgeError, Report};
use crate::chase::{
    run_skolem_chase, schema_of, skolemize, Atom, ChaseError, ChaseStatus, Dependency, Elem, Instance, Schema,
    SkolemTerm,
};
use crate::egraph::{ClassId, EGraph};
use crate::eqsat::{eqsat, Limits, Status};
use crate::term::{Pattern, RewriteRule, Signature, Symbol, Term, Trs};

pub const TOP: &str = "top";
pub const AND: &str = "and";

#[derive(Debug, Clone)]
pub struct SkolemEncoding {
    pub schema: Schema,
    pub signature: Signature,
    pub trs: Trs,
    /// Always `top`.
    pub term: Term,
}

fn conjunction(atoms: Vec<Pattern>) -> Pattern {
    atoms
        .into_iter()
        .rev()
        .fold(Pattern::leaf(TOP), |acc, a| Pattern::app(AND, vec![a, acc]))
}

fn declare_domain(sig: &mut Signature, schema: &Schema, name: Symbol, arity: usize) -> Result<(), BridgeError> {
    if schema.contains(&name) {
        return Err(BridgeError::NameClash(name));
    }
    sig.declare(name, arity)?;
    Ok(())
}

/// Build the signature, rewrite system and start term simulating the Skolem
/// chase of `deps` (TGDs only) on `start`.
pub fn encode_skolem_to_eqsat(deps: &[Dependency], start: &Instance) -> Result<SkolemEncoding, BridgeError> {
    let schema = schema_of(deps, start)?;
    for reserved in [TOP, AND] {
        if schema.contains(&Symbol::new(reserved)) {
            return Err(BridgeError::Reserved(Symbol::new(reserved)));
        }
    }
    let mut sig = Signature::new();
    sig.declare(Symbol::new(TOP), 0)?;
    sig.declare(Symbol::new(AND), 2)?;
    sig.merge(&schema)?;

    let skolemized = deps
        .iter()
        .enumerate()
        .map(|(i, d)| {
            if !d.is_tgd() {
                return Err(BridgeError::Chase(ChaseError::NotATgd(i)));
            }
            Ok(skolemize(d, i)?)
        })
        .collect::<Result<Vec<_>, BridgeError>>()?;
    for r in &skolemized {
        for (f, n) in r.functions() {
            declare_domain(&mut sig, &schema, f, n)?;
        }
    }
    for e in start.domain() {
        match e {
            Elem::Const(c) => declare_domain(&mut sig, &schema, c, 0)?,
            other => return Err(BridgeError::NonConstant(other)),
        }
    }

    let mut rules = vec![RewriteRule::new(
        Pattern::leaf(TOP),
        Pattern::app(AND, vec![Pattern::leaf(TOP), Pattern::leaf(TOP)]),
    )?];
    for (rel, n) in schema.iter() {
        let xs = (1..=n).map(|i| Pattern::var(&format!("x{i}"))).collect();
        rules.push(RewriteRule::new(Pattern::app(rel.clone(), xs), Pattern::leaf(TOP))?);
    }
    for r in &skolemized {
        let body = r
            .body
            .iter()
            .map(|a| Pattern::app(a.rel.clone(), a.args.iter().map(|v| Pattern::Var(v.clone())).collect()))
            .collect();
        let head = r
            .head
            .iter()
            .map(|(rel, args)| {
                let args = args
                    .iter()
                    .map(|t| match t {
                        SkolemTerm::Var(v) => Pattern::Var(v.clone()),
                        SkolemTerm::Fn(f, vs) => {
                            Pattern::app(f.clone(), vs.iter().map(|v| Pattern::Var(v.clone())).collect())
                        }
                    })
                    .collect();
                Pattern::app(rel.clone(), args)
            })
            .collect();
        rules.push(RewriteRule::new(conjunction(body), conjunction(head))?);
    }
    for atom in start.iter() {
        let args = atom
            .args
            .iter()
            .map(|e| match e {
                Elem::Const(c) => Pattern::leaf(c.clone()),
                _ => unreachable!("checked above"),
            })
            .collect();
        rules.push(RewriteRule::new(
            Pattern::leaf(TOP),
            Pattern::app(atom.rel.clone(), args),
        )?);
    }
    Ok(SkolemEncoding {
        schema,
        trs: Trs::new(sig.clone(), rules)?,
        signature: sig,
        term: Term::leaf(TOP),
    })
}

struct Readback<'a> {
    g: &'a EGraph,
    schema: &'a Schema,
    memo: BTreeMap<ClassId, Vec<Elem>>,
    visiting: BTreeSet<ClassId>,
}

impl Readback<'_> {
    fn is_domain(&self, f: &Symbol) -> bool {
        !self.schema.contains(f) && f.as_str() != TOP && f.as_str() != AND
    }

    /// Constants and Skolem terms represented by `c`.
    fn domain_terms(&mut self, c: ClassId) -> Result<Vec<Elem>, BridgeError> {
        if let Some(v) = self.memo.get(&c) {
            return Ok(v.clone());
        }
        if !self.visiting.insert(c) {
            return Err(BridgeError::CyclicDomain(c));
        }
        let mut out = BTreeSet::new();
        for node in self.g.nodes_of(c).to_vec() {
            if !self.is_domain(&node.head) {
                continue;
            }
            let args = self.tuples(&node.children)?;
            for a in args {
                out.insert(if node.children.is_empty() {
                    Elem::Const(node.head.clone())
                } else {
                    Elem::Skolem(node.head.clone(), a)
                });
            }
        }
        self.visiting.remove(&c);
        let out: Vec<Elem> = out.into_iter().collect();
        self.memo.insert(c, out.clone());
        Ok(out)
    }

    fn tuples(&mut self, classes: &[ClassId]) -> Result<Vec<Vec<Elem>>, BridgeError> {
        let mut acc: Vec<Vec<Elem>> = vec![Vec::new()];
        for &c in classes {
            let ds = self.domain_terms(c)?;
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    ds.iter().map(move |d| {
                        let mut p = prefix.clone();
                        p.push(d.clone());
                        p
                    })
                })
                .collect();
        }
        Ok(acc)
    }
}

/// The relational atoms represented by `g`: every term `R(d1, …, dk)` in
/// its language with `R` a relation and each `di` a constant or Skolem term.
pub fn xi(g: &EGraph, schema: &Schema) -> Result<Instance, BridgeError> {
    let mut rb = Readback {
        g,
        schema,
        memo: BTreeMap::new(),
        visiting: BTreeSet::new(),
    };
    let mut out = Instance::new();
    for node in g.nodes().keys() {
        if !schema.contains(&node.head) {
            continue;
        }
        for &c in &node.children {
            if rb.domain_terms(c)?.is_empty() {
                return Err(BridgeError::NoDomainTerm(c));
            }
        }
        for args in rb.tuples(&node.children)? {
            out.insert(Atom::new(node.head.clone(), args));
        }
    }
    Ok(out)
}

fn diff(a: &Instance, b: &Instance) -> String {
    let show = |x: &Instance, y: &Instance| {
        x.iter()
            .filter(|t| !y.contains(t))
            .take(3)
            .map(|t| t.to_string().replace(' ', ""))
            .collect::<Vec<_>>()
            .join(";")
    };
    format!("only_eqsat=[{}] only_chase=[{}]", show(a, b), show(b, a))
}

/// Run equality saturation on the encoding and the Skolem chase directly,
/// then compare termination and, if both stop, the atom sets.
pub fn verify_skolem_equiv(
    deps: &[Dependency],
    start: &Instance,
    limits: Limits,
    chase_rounds: usize,
) -> Result<Report, BridgeError> {
    let enc = encode_skolem_to_eqsat(deps, start)?;
    let (g, _) = EGraph::from_term_with(enc.signature.clone(), &enc.term)?;
    let (eq, ch) = thread::scope(|s| {
        let eq = s.spawn(|| eqsat(&enc.trs, &g, limits));
        let ch = s.spawn(|| run_skolem_chase(deps, start, chase_rounds));
        (eq.join().expect("eqsat thread"), ch.join().expect("chase thread"))
    });
    let (eq, ch) = (eq?, ch?);
    let mut report = Report::default();
    let eq_done = eq.status == Status::Terminated;
    let ch_done = ch.status == ChaseStatus::Terminated;
    report.push(
        "skolem_equiv.termination",
        eq_done == ch_done,
        format!("eqsat={} skolem_chase={}", eq.status, ch.status),
    );
    if eq_done && ch_done {
        let read = xi(&eq.egraph, &enc.schema)?;
        report.push(
            "skolem_equiv.atoms",
            read == ch.instance,
            if read == ch.instance {
                format!("atoms={}", read.len())
            } else {
                diff(&read, &ch.instance)
            },
        );
    }
    Ok(report)
}
