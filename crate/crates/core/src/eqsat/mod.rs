//! E-matching, the match/apply operator, the immediate consequence operator
//! (rebuild after match/apply) and equality saturation as its iteration.

mod representation;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use log::{debug, info};

use crate::egraph::{rebuild, Automaton, ClassId, ClassTerm, EGraph, EGraphError, ENode};
use crate::term::{Pattern, Trs, Var};

pub use representation::{
    closure_oracle, congruence_closure, verify_representation, Partition, RepresentationError, RepresentationReport,
};

pub type ClassSubst = BTreeMap<Var, ClassId>;

/// One E-matching result: `lhs[subst] →* root` for rule number `rule`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Match {
    pub rule: usize,
    pub subst: ClassSubst,
    pub root: ClassId,
}

/// All `(σ, c)` with `pattern[σ] →*_G c`. A bare variable matches every class.
pub fn ematch(g: &EGraph, pattern: &Pattern) -> BTreeSet<(ClassSubst, ClassId)> {
    let mut out = BTreeSet::new();
    for &c in g.classes() {
        for s in match_in(g, pattern, c, ClassSubst::new()) {
            out.insert((s, c));
        }
    }
    out
}

fn match_in(g: &EGraph, p: &Pattern, c: ClassId, subst: ClassSubst) -> Vec<ClassSubst> {
    match p {
        Pattern::Var(v) => match subst.get(v) {
            Some(&bound) if bound != c => Vec::new(),
            Some(_) => vec![subst],
            None => {
                let mut s = subst;
                s.insert(v.clone(), c);
                vec![s]
            }
        },
        Pattern::App(f, ps) => {
            let mut out = Vec::new();
            for node in g.nodes_of(c) {
                if &node.head != f || node.children.len() != ps.len() {
                    continue;
                }
                let mut partial = vec![subst.clone()];
                for (child_pat, &child) in ps.iter().zip(&node.children) {
                    partial = partial
                        .into_iter()
                        .flat_map(|s| match_in(g, child_pat, child, s))
                        .collect();
                    if partial.is_empty() {
                        break;
                    }
                }
                out.extend(partial);
            }
            out
        }
    }
}

/// Matches of every rule's left-hand side, in rule order.
pub fn find_matches(g: &EGraph, trs: &Trs) -> Vec<Match> {
    let mut out = Vec::new();
    for (rule, r) in trs.rules().iter().enumerate() {
        for (subst, root) in ematch(g, r.lhs()) {
            out.push(Match { rule, subst, root });
        }
    }
    out
}

fn instantiate(p: &Pattern, subst: &ClassSubst) -> ClassTerm {
    match p {
        Pattern::Var(v) => ClassTerm::Class(subst[v]),
        Pattern::App(f, cs) => ClassTerm::App(f.clone(), cs.iter().map(|c| instantiate(c, subst)).collect()),
    }
}

/// Evaluate `p[σ]` bottom-up in `g`.
pub fn eval_pattern(g: &EGraph, p: &Pattern, subst: &ClassSubst) -> Option<ClassId> {
    match p {
        Pattern::Var(v) => subst.get(v).copied(),
        Pattern::App(f, cs) => {
            let kids = cs
                .iter()
                .map(|c| eval_pattern(g, c, subst))
                .collect::<Option<Vec<_>>>()?;
            g.lookup(&ENode::new(f.clone(), kids))
        }
    }
}

/// `T_R(G)`: `G ∪ ⋃ FL(rhs[σ] →* c)` over all matches.
pub fn apply_matches(g: &EGraph, trs: &Trs) -> Result<Automaton, EGraphError> {
    apply_given(g, trs, &find_matches(g, trs))
}

/// Match/apply using an explicit list of matches, inserted in list order.
pub fn apply_given(g: &EGraph, trs: &Trs, matches: &[Match]) -> Result<Automaton, EGraphError> {
    let mut a = g.to_automaton();
    a.signature.merge(trs.signature())?;
    for m in matches {
        let rhs = trs.rules()[m.rule].rhs();
        a.insert_term(&instantiate(rhs, &m.subst), m.root)?;
    }
    Ok(a)
}

/// Counts after one round, plus whether the round changed anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundStats {
    pub classes: usize,
    pub nodes: usize,
    /// Pairs of pre-existing classes that were identified.
    pub merges: usize,
    pub changed: bool,
}

impl fmt::Display for RoundStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "classes={} nodes={} merges={}",
            self.classes, self.nodes, self.merges
        )
    }
}

/// `ICO_R(G) = CC(T_R(G))`, with statistics relative to `g`.
pub fn ico_step(g: &EGraph, trs: &Trs) -> Result<(EGraph, RoundStats), EGraphError> {
    let a = apply_matches(g, trs)?;
    let rebuilt = rebuild(&a)?;
    let images: BTreeSet<ClassId> = g.classes().iter().map(|c| rebuilt.merge_map[c]).collect();
    let h = rebuilt.egraph;
    let merges = g.class_count() - images.len();
    let changed = merges > 0 || h.class_count() != g.class_count() || h.node_count() != g.node_count();
    let stats = RoundStats {
        classes: h.class_count(),
        nodes: h.node_count(),
        merges,
        changed,
    };
    Ok((h, stats))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Terminated,
    BudgetExceeded,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Terminated => "terminated",
            Status::BudgetExceeded => "budget",
        })
    }
}

#[derive(Debug, Clone)]
pub struct EqSatOutcome {
    pub status: Status,
    pub egraph: EGraph,
    pub iterations: usize,
    pub history: Vec<RoundStats>,
}

impl EqSatOutcome {
    /// `iter=… classes=… nodes=… merges=…` per round, then `status=…`.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for (i, h) in self.history.iter().enumerate() {
            out.push_str(&format!("iter={} {h}\n", i + 1));
        }
        out.push_str(&format!("status={}\n", self.status));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of rounds.
    pub budget: usize,
    /// Stop once the E-graph has more nodes than this.
    pub node_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            budget: 1000,
            node_cap: 100_000,
        }
    }
}

impl Limits {
    pub fn budget(budget: usize) -> Self {
        Limits {
            budget,
            ..Limits::default()
        }
    }
}

/// Iterate the ICO from `g` until a round changes nothing, or the limits
/// are hit. A graph left at the budget that is already a model also counts
/// as terminated.
pub fn eqsat(trs: &Trs, g: &EGraph, limits: Limits) -> Result<EqSatOutcome, EGraphError> {
    let mut cur = g.clone().with_signature(trs.signature())?;
    let mut history = Vec::new();
    for i in 1..=limits.budget {
        let (next, stats) = ico_step(&cur, trs)?;
        debug!("iter={i} {stats}");
        history.push(stats);
        cur = next;
        if !stats.changed {
            info!("saturated after {i} rounds");
            return Ok(EqSatOutcome {
                status: Status::Terminated,
                egraph: cur,
                iterations: i,
                history,
            });
        }
        if cur.node_count() > limits.node_cap {
            info!("node cap {} exceeded after {i} rounds", limits.node_cap);
            return Ok(EqSatOutcome {
                status: Status::BudgetExceeded,
                egraph: cur,
                iterations: i,
                history,
            });
        }
    }
    let status = if check_model(&cur, trs).is_empty() {
        Status::Terminated
    } else {
        Status::BudgetExceeded
    };
    Ok(EqSatOutcome {
        status,
        egraph: cur,
        iterations: history.len(),
        history,
    })
}

/// A place where `g` fails to be a model: `lhs[σ] →* root` but `rhs[σ]`
/// does not reach `root`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelViolation {
    pub rule: usize,
    pub subst: ClassSubst,
    pub root: ClassId,
}

pub fn check_model(g: &EGraph, trs: &Trs) -> Vec<ModelViolation> {
    find_matches(g, trs)
        .into_iter()
        .filter(|m| eval_pattern(g, trs.rules()[m.rule].rhs(), &m.subst) != Some(m.root))
        .map(|m| ModelViolation {
            rule: m.rule,
            subst: m.subst,
            root: m.root,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::egraph::{is_isomorphic, parse_egraph};
    use crate::term::{parse_term_infer, parse_trs, Term};

    fn fig1_left() -> crate::egraph::NamedEGraph {
        parse_egraph("a -> c1\nf(c1,c1) -> c2\nf(c2,c2) -> c3\nf(c3,c3) -> c4\n").unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term_infer(s).unwrap().0
    }

    #[test]
    fn ematch_chain() {
        let g = fig1_left();
        let p = parse_trs("(f ?x ?x) -> (g ?x ?x)").unwrap().rules()[0].lhs().clone();
        let got = ematch(&g.egraph, &p);
        let want: BTreeSet<_> = [("c1", "c2"), ("c2", "c3"), ("c3", "c4")]
            .iter()
            .map(|(x, r)| ([(Var::new("x"), g.class(x).unwrap())].into(), g.class(r).unwrap()))
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn ematch_bare_variable_and_nonlinear_failure() {
        let g = fig1_left();
        assert_eq!(ematch(&g.egraph, &Pattern::var("x")).len(), 4);
        let h = parse_egraph("a -> ca\nb -> cb\nf(ca,cb) -> c\n").unwrap();
        let p = parse_trs("(f ?x ?x) -> ?x").unwrap().rules()[0].lhs().clone();
        assert!(ematch(&h.egraph, &p).is_empty());
    }

    #[test]
    fn one_round_produces_fig1_right() {
        let g = fig1_left();
        let r = parse_trs("(f ?x ?x) -> (g ?x ?x)").unwrap();
        let a = apply_matches(&g.egraph, &r).unwrap();
        assert_eq!(a.transitions.len(), 7);
        let (h, stats) = ico_step(&g.egraph, &r).unwrap();
        assert_eq!((stats.classes, stats.nodes, stats.merges), (4, 7, 0));
        let right = parse_egraph(
            "a -> c1\nf(c1,c1) -> c2\nf(c2,c2) -> c3\nf(c3,c3) -> c4\n\
             g(c1,c1) -> c2\ng(c2,c2) -> c3\ng(c3,c3) -> c4\n",
        )
        .unwrap();
        assert!(is_isomorphic(&h, &right.egraph));
        let (again, stats) = ico_step(&h, &r).unwrap();
        assert!(!stats.changed);
        assert!(is_isomorphic(&h, &again));
    }

    #[test]
    fn empty_trs_is_identity() {
        let g = fig1_left().egraph;
        let (h, stats) = ico_step(&g, &Trs::default()).unwrap();
        assert!(!stats.changed);
        assert_eq!(h, g);
        assert!(check_model(&g, &Trs::default()).is_empty());
    }

    #[test]
    fn bare_variable_rhs_merges_root() {
        let (g, root) = EGraph::from_term(&t("(f a b)")).unwrap();
        let r = parse_trs("(f ?x ?y) -> ?x").unwrap();
        let (h, stats) = ico_step(&g, &r).unwrap();
        assert_eq!(stats.merges, 1);
        assert_eq!(h.accepts(&t("a")), h.accepts(&t("(f a b)")));
        let _ = root;
    }

    #[test]
    fn check_model_examples() {
        let g = fig1_left();
        let r = parse_trs("(f ?x ?x) -> (g ?x ?x)").unwrap();
        let v = check_model(&g.egraph, &r);
        assert_eq!(v.len(), 3);
        assert!(v.iter().any(|m| m.subst[&Var::new("x")] == g.class("c1").unwrap()));
        let out = eqsat(&r, &g.egraph, Limits::default()).unwrap();
        assert!(check_model(&out.egraph, &r).is_empty());
    }

    #[test]
    fn eqsat_commutation_example() {
        let r = parse_trs("(f (g ?x)) -> (g (f ?x))").unwrap();
        let (g, _) = EGraph::from_term(&t("(f (g a))")).unwrap();
        let out = eqsat(&r, &g, Limits::default()).unwrap();
        assert_eq!(out.status, Status::Terminated);
        assert!(out.egraph.pcr_related(&t("(f (g a))"), &t("(g (f a))")));
    }

    #[test]
    fn eqsat_cyclic_example_diverges() {
        let r = parse_trs("(f (g ?x)) -> (g (f ?x))").unwrap();
        let g = parse_egraph("g(cf) -> cg\nf(cg) -> cf\na -> cf\n").unwrap().egraph;
        let out = eqsat(&r, &g, Limits::budget(30)).unwrap();
        assert_eq!(out.status, Status::BudgetExceeded);
        assert_eq!(out.iterations, 30);
    }

    #[test]
    fn budget_zero_checks_model_only() {
        let r = parse_trs("(f ?x ?x) -> (g ?x ?x)").unwrap();
        let g = fig1_left().egraph;
        assert_eq!(eqsat(&r, &g, Limits::budget(0)).unwrap().status, Status::BudgetExceeded);
        let h = eqsat(&r, &g, Limits::default()).unwrap().egraph;
        let again = eqsat(&r, &h, Limits::budget(0)).unwrap();
        assert_eq!(again.status, Status::Terminated);
        assert_eq!(again.iterations, 0);
    }

    #[test]
    fn report_format() {
        let r = parse_trs("(f ?x ?x) -> (g ?x ?x)").unwrap();
        let out = eqsat(&r, &fig1_left().egraph, Limits::default()).unwrap();
        assert_eq!(
            out.report(),
            "iter=1 classes=4 nodes=7 merges=0\niter=2 classes=4 nodes=7 merges=0\nstatus=terminated\n"
        );
    }
}
