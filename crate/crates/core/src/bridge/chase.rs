//! Equality saturation to the standard chase: classes become nulls, nodes
//! become tuples of `R_f`, rules become dependencies.

use std::collections::{BTreeMap, BTreeSet};
use std::thread;

use super::{BridgeError, Report};
use crate::chase::{
    instances_isomorphic, is_core, run_standard_chase, Atom, AtomPattern, ChaseConfig, ChaseOutcome, ChaseStatus,
    Dependency, Elem, Instance, Scheduler, Schema,
};
use crate::egraph::{Automaton, ClassId, EGraph, ENode};
use crate::eqsat::{eqsat, Limits, Status};
use crate::term::{Pattern, Signature, Symbol, Trs, Var};

const PREFIX: &str = "R_";

/// `R_f` for the function symbol `f`.
pub fn relation_for(f: &Symbol) -> Symbol {
    Symbol::from(format!("{PREFIX}{f}"))
}

fn schema_for(sig: &Signature) -> Schema {
    let mut s = Schema::new();
    for (f, n) in sig.iter() {
        s.declare(relation_for(f), n + 1).expect("fresh relation names");
    }
    s
}

/// Each node `f(c1, …, cn) → c` becomes the tuple `R_f(c1, …, cn, c)`.
pub fn encode_egraph_to_instance(g: &EGraph) -> (Schema, Instance) {
    let null = |c: &ClassId| Elem::Null(c.0);
    let atoms = g.nodes().iter().map(|(node, c)| {
        let mut args: Vec<Elem> = node.children.iter().map(null).collect();
        args.push(null(c));
        Atom::new(relation_for(&node.head), args)
    });
    (schema_for(g.signature()), Instance::from_atoms(atoms))
}

/// Read an instance over `R_f` relations back as an E-graph; null `_n<k>`
/// becomes class `c<k>`.
pub fn decode_instance_to_egraph(inst: &Instance) -> Result<EGraph, BridgeError> {
    let mut a = Automaton::new(Signature::new());
    for atom in inst.iter() {
        let f = atom
            .rel
            .as_str()
            .strip_prefix(PREFIX)
            .filter(|f| !f.is_empty() && !atom.args.is_empty())
            .ok_or_else(|| BridgeError::NotEncodedRelation(atom.rel.clone()))?;
        let ids = atom
            .args
            .iter()
            .map(|e| match e {
                Elem::Null(n) => Ok(ClassId(*n)),
                other => Err(BridgeError::NonNull(other.clone())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let (target, children) = ids.split_last().expect("nonempty");
        a.states.extend(ids.iter().copied());
        a.add_transition(ENode::new(f, children.to_vec()), *target)?;
    }
    Ok(EGraph::from_automaton(&a)?)
}

struct Namer {
    taken: BTreeSet<String>,
    next_w: usize,
}

impl Namer {
    fn fresh(&mut self, base: &str) -> Var {
        let mut name = base.to_string();
        while self.taken.contains(&name) {
            name.push('\'');
        }
        self.taken.insert(name.clone());
        Var::new(&name)
    }

    fn internal(&mut self) -> Var {
        self.next_w += 1;
        self.fresh(&format!("w{}", self.next_w))
    }
}

/// Flatten `p` into atoms, children before parents. Repeated sub-patterns
/// share one variable; `root` names the variable of `p` itself.
fn flatten(
    p: &Pattern,
    root: Option<&Var>,
    namer: &mut Namer,
    memo: &mut BTreeMap<Pattern, Var>,
    atoms: &mut Vec<AtomPattern>,
) -> Var {
    match p {
        Pattern::Var(v) => v.clone(),
        Pattern::App(f, cs) => {
            if root.is_none() {
                if let Some(v) = memo.get(p) {
                    return v.clone();
                }
            }
            let mut args: Vec<Var> = cs.iter().map(|c| flatten(c, None, namer, memo, atoms)).collect();
            let v = root.cloned().unwrap_or_else(|| namer.internal());
            memo.insert(p.clone(), v.clone());
            args.push(v.clone());
            atoms.push(AtomPattern {
                rel: relation_for(f),
                args,
            });
            v
        }
    }
}

fn side(p: &Pattern, root: &Var, namer: &mut Namer) -> Vec<AtomPattern> {
    let mut atoms = Vec::new();
    flatten(p, Some(root), namer, &mut BTreeMap::new(), &mut atoms);
    atoms
}

/// Functional-dependency EGDs for every symbol, then the dependencies of
/// every rule in order.
pub fn encode_trs_to_deps(trs: &Trs) -> Vec<Dependency> {
    let mut deps = Vec::new();
    for (f, n) in trs.signature().iter() {
        let xs: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let atom = |last: &str| {
            let mut args: Vec<&str> = xs.iter().map(String::as_str).collect();
            args.push(last);
            AtomPattern::new(relation_for(f), &args)
        };
        deps.push(Dependency::egd(vec![atom("x"), atom("x'")], "x", "x'"));
    }
    for rule in trs.rules() {
        let mut namer = Namer {
            taken: rule.lhs().vars().iter().map(|v| v.name().to_string()).collect(),
            next_w: 0,
        };
        match (rule.lhs(), rule.rhs()) {
            // x → x says nothing
            (Pattern::Var(_), Pattern::Var(_)) => {}
            (Pattern::Var(x), rhs) => {
                for (f, n) in trs.signature().iter() {
                    let mut namer = Namer {
                        taken: namer.taken.clone(),
                        next_w: 0,
                    };
                    let mut args: Vec<Var> = (1..=n).map(|i| namer.fresh(&format!("y{i}"))).collect();
                    args.push(x.clone());
                    let body = vec![AtomPattern {
                        rel: relation_for(f),
                        args,
                    }];
                    deps.push(Dependency::tgd(body, side(rhs, x, &mut namer)));
                }
            }
            (lhs, Pattern::Var(x)) => {
                let r = namer.fresh("r");
                let body = side(lhs, &r, &mut namer);
                deps.push(Dependency::Egd {
                    body,
                    left: x.clone(),
                    right: r,
                });
            }
            (lhs, rhs) => {
                let r = namer.fresh("r");
                let body = side(lhs, &r, &mut namer);
                deps.push(Dependency::tgd(body, side(rhs, &r, &mut namer)));
            }
        }
    }
    deps
}

#[derive(Debug, Clone)]
pub struct ChaseEncoding {
    pub schema: Schema,
    pub deps: Vec<Dependency>,
    pub instance: Instance,
}

pub fn encode_eqsat_to_chase(trs: &Trs, g: &EGraph) -> Result<ChaseEncoding, BridgeError> {
    let g = g.clone().with_signature(trs.signature())?;
    let (schema, instance) = encode_egraph_to_instance(&g);
    Ok(ChaseEncoding {
        schema,
        deps: encode_trs_to_deps(&Trs::new(g.signature().clone(), trs.rules().to_vec())?),
        instance,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChaseVerifyConfig {
    pub limits: Limits,
    /// Step budget of each chase run.
    pub chase_budget: usize,
    /// One seeded random chase per entry, besides the EGD-fair one.
    pub seeds: Vec<u64>,
}

impl Default for ChaseVerifyConfig {
    fn default() -> Self {
        ChaseVerifyConfig {
            limits: Limits::default(),
            chase_budget: 100_000,
            seeds: vec![1, 2, 3],
        }
    }
}

fn label(s: Scheduler) -> String {
    match s {
        Scheduler::Random(seed) => format!("random_{seed}"),
        other => other.to_string(),
    }
}

/// Run equality saturation and the standard chase of the encoding under the
/// EGD-fair scheduler and each seeded random scheduler, and compare.
pub fn verify_chase_equiv(trs: &Trs, g: &EGraph, config: &ChaseVerifyConfig) -> Result<Report, BridgeError> {
    let enc = encode_eqsat_to_chase(trs, g)?;
    let mut schedulers = vec![Scheduler::EgdFair];
    schedulers.extend(config.seeds.iter().map(|&s| Scheduler::Random(s)));
    let (eq, chases) = thread::scope(|s| {
        let eq = s.spawn(|| eqsat(trs, g, config.limits));
        let handles: Vec<_> = schedulers
            .iter()
            .map(|&sch| {
                let enc = &enc;
                s.spawn(move || {
                    run_standard_chase(&enc.deps, &enc.instance, ChaseConfig::new(sch, config.chase_budget))
                })
            })
            .collect();
        let chases: Vec<_> = handles.into_iter().map(|h| h.join().expect("chase thread")).collect();
        (eq.join().expect("eqsat thread"), chases)
    });
    let eq = eq?;
    let chases: Vec<ChaseOutcome> = chases.into_iter().collect::<Result<_, _>>()?;
    let eq_done = eq.status == Status::Terminated;
    let (_, expected) = encode_egraph_to_instance(&eq.egraph);
    let mut report = Report::default();
    for (sch, out) in schedulers.iter().zip(&chases) {
        let name = label(*sch);
        let done = out.status == ChaseStatus::Terminated;
        report.push(
            format!("chase_equiv.termination.{name}"),
            done == eq_done,
            format!("eqsat={} chase={} steps={}", eq.status, out.status, out.steps.len()),
        );
        if done && eq_done {
            let (pass, detail) = match instances_isomorphic(&out.instance, &expected) {
                Ok(iso) => (iso, format!("atoms={} expected={}", out.instance.len(), expected.len())),
                Err(e) => (false, e.to_string()),
            };
            report.push(format!("chase_equiv.isomorphic.{name}"), pass, detail);
        }
        if done && *sch == Scheduler::EgdFair {
            let (pass, detail) = match is_core(&out.instance) {
                Ok(c) => (c, format!("atoms={}", out.instance.len())),
                Err(e) => (false, e.to_string()),
            };
            report.push(format!("chase_equiv.core.{name}"), pass, detail);
        }
    }
    Ok(report)
}
