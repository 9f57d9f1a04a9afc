//! Skolemization, the Skolem chase (semi-naive), and singularization of
//! equality-generating dependencies.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use log::debug;

use super::standard::{ChaseOutcome, ChaseStatus, StepRecord};
use super::{unify, Assignment, Atom, AtomPattern, ChaseError, Dependency, Elem, Instance};
use crate::term::{Symbol, Var};

/// Name of the relation standing for equality after singularization.
pub const EQ_RELATION: &str = "Eq";

/// A head argument of a skolemized rule.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SkolemTerm {
    Var(Var),
    /// A Skolem function applied to the frontier variables.
    Fn(Symbol, Vec<Var>),
}

impl fmt::Display for SkolemTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkolemTerm::Var(v) => write!(f, "{}", v.name()),
            SkolemTerm::Fn(s, args) => {
                let names: Vec<&str> = args.iter().map(Var::name).collect();
                write!(f, "{s}({})", names.join(","))
            }
        }
    }
}

/// `body → head` with existentials replaced by Skolem terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkolemRule {
    pub dep: usize,
    pub body: Vec<AtomPattern>,
    pub head: Vec<(Symbol, Vec<SkolemTerm>)>,
}

impl SkolemRule {
    /// Skolem function names used by the head.
    pub fn functions(&self) -> BTreeSet<(Symbol, usize)> {
        self.head
            .iter()
            .flat_map(|(_, args)| args.iter())
            .filter_map(|t| match t {
                SkolemTerm::Fn(s, a) => Some((s.clone(), a.len())),
                SkolemTerm::Var(_) => None,
            })
            .collect()
    }

    fn ground_head(&self, h: &Assignment) -> Vec<Atom> {
        self.head
            .iter()
            .map(|(rel, args)| {
                Atom::new(
                    rel.clone(),
                    args.iter()
                        .map(|t| match t {
                            SkolemTerm::Var(v) => h[v].clone(),
                            SkolemTerm::Fn(s, vs) => Elem::Skolem(s.clone(), vs.iter().map(|v| h[v].clone()).collect()),
                        })
                        .collect(),
                )
            })
            .collect()
    }
}

impl fmt::Display for SkolemRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.body.iter().map(ToString::to_string).collect();
        let head: Vec<String> = self
            .head
            .iter()
            .map(|(r, args)| {
                let a: Vec<String> = args.iter().map(ToString::to_string).collect();
                format!("{r}({})", a.join(", "))
            })
            .collect();
        write!(f, "{} -> {}", body.join(", "), head.join(", "))
    }
}

/// Skolem function name for existential `z` of dependency number `dep`.
pub fn skolem_name(dep: usize, z: &Var) -> Symbol {
    Symbol::from(format!("sk{dep}_{}", z.name()))
}

/// Replace each existential `z` by `sk<dep>_z(frontier)`.
pub fn skolemize(d: &Dependency, dep: usize) -> Result<SkolemRule, ChaseError> {
    let Dependency::Tgd {
        body,
        head,
        existentials,
    } = d
    else {
        return Err(ChaseError::NotATgd(dep));
    };
    let frontier = d.frontier();
    let head = head
        .iter()
        .map(|a| {
            let args = a
                .args
                .iter()
                .map(|v| {
                    if existentials.contains(v) {
                        SkolemTerm::Fn(skolem_name(dep, v), frontier.clone())
                    } else {
                        SkolemTerm::Var(v.clone())
                    }
                })
                .collect();
            (a.rel.clone(), args)
        })
        .collect();
    Ok(SkolemRule {
        dep,
        body: body.clone(),
        head,
    })
}

/// Matches of `body` where atom `pivot` comes from `delta` and the rest from `all`.
fn join(body: &[AtomPattern], pivot: usize, delta: &Instance, all: &Instance, out: &mut BTreeSet<Assignment>) {
    fn go(
        body: &[AtomPattern],
        i: usize,
        pivot: usize,
        delta: &Instance,
        all: &Instance,
        h: &Assignment,
        out: &mut BTreeSet<Assignment>,
    ) {
        let Some(p) = body.get(i) else {
            out.insert(h.clone());
            return;
        };
        let source = if i == pivot { delta } else { all };
        for atom in source.candidates(p, h) {
            if let Some(h2) = unify(p, atom, h) {
                go(body, i + 1, pivot, delta, all, &h2, out);
            }
        }
    }
    go(body, 0, pivot, delta, all, &Assignment::new(), out);
}

/// Least fixpoint of the skolemized rules above `start`, computed round by
/// round; `budget` bounds the number of rounds.
pub fn run_skolem_chase(deps: &[Dependency], start: &Instance, budget: usize) -> Result<ChaseOutcome, ChaseError> {
    let rules = deps
        .iter()
        .enumerate()
        .map(|(i, d)| {
            d.validate()?;
            skolemize(d, i)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut all = start.clone();
    let mut delta = start.clone();
    let mut steps = Vec::new();
    let mut rounds = 0;
    loop {
        let mut fresh: BTreeSet<Atom> = BTreeSet::new();
        for r in &rules {
            let mut matches = BTreeSet::new();
            for pivot in 0..r.body.len() {
                join(&r.body, pivot, &delta, &all, &mut matches);
            }
            for h in matches {
                let produced: Vec<Atom> = r.ground_head(&h).into_iter().filter(|a| !all.contains(a)).collect();
                if !produced.is_empty() {
                    steps.push(StepRecord {
                        dep: r.dep,
                        trigger: h,
                        egd: false,
                    });
                    fresh.extend(produced);
                }
            }
        }
        if fresh.is_empty() {
            debug!("skolem chase reached its fixpoint after {rounds} rounds");
            return Ok(ChaseOutcome {
                status: ChaseStatus::Terminated,
                instance: all,
                steps,
            });
        }
        if rounds == budget {
            return Ok(ChaseOutcome {
                status: ChaseStatus::BudgetExceeded,
                instance: all,
                steps,
            });
        }
        rounds += 1;
        for a in &fresh {
            all.insert(a.clone());
        }
        delta = Instance::from_atoms(fresh);
    }
}

/// Replace EGDs by TGDs over an explicit `Eq` relation.
///
/// Repeated body variables are split into distinct copies joined by `Eq`
/// atoms; an EGD `body → x = y` becomes `body' → Eq(x, y)`. The result also
/// axiomatizes `Eq`: reflexivity at every position of every relation,
/// symmetry, transitivity, and substitution at every position of every
/// other relation.
pub fn singularize(deps: &[Dependency]) -> Result<Vec<Dependency>, ChaseError> {
    let eq = Symbol::new(EQ_RELATION);
    let mut schema = super::Schema::new();
    for d in deps {
        d.declare_relations(&mut schema)?;
    }
    if schema.contains(&eq) {
        return Err(ChaseError::ReservedRelation(eq));
    }
    let eq_atom = |a: &Var, b: &Var| AtomPattern {
        rel: eq.clone(),
        args: vec![a.clone(), b.clone()],
    };
    let mut out = Vec::new();
    for d in deps {
        let mut count: BTreeMap<Var, usize> = BTreeMap::new();
        for v in d.body().iter().flat_map(|a| a.args.iter()) {
            *count.entry(v.clone()).or_default() += 1;
        }
        let copy = |v: &Var, k: usize| Var::from(format!("{}#{k}", v.name()).as_str());
        let mut seen: BTreeMap<Var, usize> = BTreeMap::new();
        let mut body = Vec::new();
        for a in d.body() {
            let args = a
                .args
                .iter()
                .map(|v| {
                    if count[v] == 1 {
                        return v.clone();
                    }
                    let k = seen.entry(v.clone()).or_default();
                    *k += 1;
                    copy(v, *k)
                })
                .collect();
            body.push(AtomPattern {
                rel: a.rel.clone(),
                args,
            });
        }
        for (v, &n) in &count {
            for k in 2..=n {
                body.push(eq_atom(&copy(v, 1), &copy(v, k)));
            }
        }
        let rename = |v: &Var| {
            if count.get(v).copied().unwrap_or(0) > 1 {
                copy(v, 1)
            } else {
                v.clone()
            }
        };
        out.push(match d {
            Dependency::Tgd { head, existentials, .. } => Dependency::Tgd {
                body,
                head: head
                    .iter()
                    .map(|a| AtomPattern {
                        rel: a.rel.clone(),
                        args: a.args.iter().map(rename).collect(),
                    })
                    .collect(),
                existentials: existentials.clone(),
            },
            Dependency::Egd { left, right, .. } => Dependency::Tgd {
                body,
                head: vec![eq_atom(&rename(left), &rename(right))],
                existentials: Vec::new(),
            },
        });
    }
    let (x, y, z) = (Var::new("x"), Var::new("y"), Var::new("z"));
    let mut relations: Vec<(Symbol, usize)> = schema.iter().map(|(s, a)| (s.clone(), a)).collect();
    relations.push((eq.clone(), 2));
    for (rel, n) in &relations {
        let xs: Vec<Var> = (1..=*n).map(|i| Var::from(format!("x{i}").as_str())).collect();
        let atom = AtomPattern {
            rel: rel.clone(),
            args: xs.clone(),
        };
        for xi in &xs {
            out.push(Dependency::tgd(vec![atom.clone()], vec![eq_atom(xi, xi)]));
        }
        if rel == &eq {
            continue;
        }
        for i in 0..*n {
            let mut moved = xs.clone();
            moved[i] = y.clone();
            out.push(Dependency::tgd(
                vec![atom.clone(), eq_atom(&xs[i], &y)],
                vec![AtomPattern {
                    rel: rel.clone(),
                    args: moved,
                }],
            ));
        }
    }
    out.push(Dependency::tgd(vec![eq_atom(&x, &y)], vec![eq_atom(&y, &x)]));
    out.push(Dependency::tgd(
        vec![eq_atom(&x, &y), eq_atom(&y, &z)],
        vec![eq_atom(&x, &z)],
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chase::{
        find_instance_hom, is_model, parse_dependencies, parse_instance, run_standard_chase, ChaseConfig, Scheduler,
    };

    #[test]
    fn skolemize_examples() {
        let deps =
            parse_dependencies("R(x) -> exists z. S(x, z)\nR(x) -> S(x, x)\nR(x) -> exists z, w. T(z, w)").unwrap();
        assert_eq!(skolemize(&deps[0], 0).unwrap().to_string(), "R(x) -> S(x, sk0_z(x))");
        assert_eq!(skolemize(&deps[1], 1).unwrap().to_string(), "R(x) -> S(x, x)");
        let r = skolemize(&deps[2], 2).unwrap();
        assert_eq!(r.functions().len(), 2);
        let egd = parse_dependencies("R(x, y) -> x = y").unwrap();
        assert!(skolemize(&egd[0], 0).is_err());
    }

    #[test]
    fn skolem_chase_examples() {
        let i = parse_instance("R(a)").unwrap();
        let deps = parse_dependencies("R(x) -> exists z. S(x, z)\nS(x, z) -> R(z)").unwrap();
        let out = run_skolem_chase(&deps, &i, 20).unwrap();
        assert_eq!(out.status, ChaseStatus::BudgetExceeded);

        let deps = parse_dependencies("E(x, y) -> P(x, y)\nP(x, y), E(y, z) -> P(x, z)").unwrap();
        let i = parse_instance("E(a, b)\nE(b, c)\nE(c, d)").unwrap();
        let out = run_skolem_chase(&deps, &i, 20).unwrap();
        assert_eq!(out.status, ChaseStatus::Terminated);
        assert_eq!(out.instance.atoms().iter().filter(|a| a.rel.as_str() == "P").count(), 6);

        let out = run_skolem_chase(&[], &i, 0).unwrap();
        assert_eq!(out.status, ChaseStatus::Terminated);
        assert_eq!(out.instance, i);
    }

    #[test]
    fn skolem_chase_creates_terms() {
        let deps = parse_dependencies("R(x) -> exists z. S(x, z)").unwrap();
        let out = run_skolem_chase(&deps, &parse_instance("R(a)").unwrap(), 5).unwrap();
        assert_eq!(out.instance, parse_instance("R(a)\nS(a, sk0_z(a))").unwrap());
    }

    #[test]
    fn singularize_shapes() {
        let deps = parse_dependencies("R(x, y), R(x, w) -> y = w").unwrap();
        let s = singularize(&deps).unwrap();
        assert_eq!(s[0].to_string(), "R(x#1, y), R(x#2, w), Eq(x#1, x#2) -> Eq(y, w)");
        let shown: Vec<String> = s.iter().map(ToString::to_string).collect();
        assert!(shown.contains(&"Eq(x, y) -> Eq(y, x)".to_string()));
        assert!(shown.contains(&"Eq(x, y), Eq(y, z) -> Eq(x, z)".to_string()));
        assert!(s.iter().all(Dependency::is_tgd));

        // no EGDs: only axioms are added
        let deps = parse_dependencies("A(x) -> B(x)").unwrap();
        let s = singularize(&deps).unwrap();
        assert_eq!(s[0], deps[0]);
    }

    #[test]
    fn singularized_skolem_chase_matches_standard_chase_modulo_eq() {
        let deps =
            parse_dependencies("A(x) -> exists y. R(x, y)\nA(x) -> exists y. R(x, y), B(y)\nR(x, y), R(x, w) -> y = w")
                .unwrap();
        let i = parse_instance("A(a)").unwrap();
        let std = run_standard_chase(&deps, &i, ChaseConfig::new(Scheduler::EgdFair, 100)).unwrap();
        let sk = run_skolem_chase(&singularize(&deps).unwrap(), &i, 50).unwrap();
        assert_eq!(sk.status, ChaseStatus::Terminated);
        // Drop Eq atoms; the remaining instance maps onto the standard result
        // and contains it.
        let plain = Instance::from_atoms(sk.instance.iter().filter(|a| a.rel.as_str() != EQ_RELATION).cloned());
        assert!(find_instance_hom(&plain, &std.instance).unwrap().is_some());
        assert!(find_instance_hom(&std.instance, &plain).unwrap().is_some());
        assert!(is_model(&std.instance, &deps));
    }
}
