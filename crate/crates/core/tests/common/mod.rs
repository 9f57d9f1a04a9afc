//! Seeded generators and property checks shared by the acceptance suite
//! and the proptest suites. Each check returns `Err` describing the first
//! counterexample.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use saturachase::chase::{
    find_instance_hom, is_model, run_standard_chase, Atom, AtomPattern, ChaseConfig, ChaseStatus, Dependency, Elem,
    Instance, Scheduler,
};
use saturachase::egraph::{find_homomorphism, is_isomorphic, rebuild, Automaton, ClassId, ClassTerm, EGraph, ENode};
use saturachase::eqsat::congruence_closure;
use saturachase::generators::{Move, TmEncoding, Transition, TuringMachine};
use saturachase::term::{Pattern, RewriteRule, Signature, Symbol, Term, Trs};
use saturachase::termination::is_weakly_acyclic_deps;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", name]
        .iter()
        .collect();
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

pub fn sig(pairs: &[(&str, usize)]) -> Signature {
    Signature::from_pairs(pairs.iter().copied()).unwrap()
}

pub fn random_term(rng: &mut ChaCha8Rng, sig: &Signature, max_size: usize) -> Term {
    let symbols: Vec<(Symbol, usize)> = sig.iter().map(|(s, n)| (s.clone(), n)).collect();
    let leaves: Vec<&Symbol> = symbols.iter().filter(|(_, n)| *n == 0).map(|(s, _)| s).collect();
    fn go(rng: &mut ChaCha8Rng, symbols: &[(Symbol, usize)], leaves: &[&Symbol], budget: usize) -> Term {
        let fits: Vec<&(Symbol, usize)> = symbols.iter().filter(|(_, n)| *n > 0 && *n < budget).collect();
        if fits.is_empty() || rng.gen_bool(0.3) {
            return Term::leaf((*leaves.choose(rng).unwrap()).clone());
        }
        let (f, n) = fits.choose(rng).unwrap();
        let mut left = budget - 1;
        let mut kids = Vec::new();
        for i in 0..*n {
            let reserve = n - i - 1;
            let share = rng.gen_range(1..=left - reserve);
            let k = go(rng, symbols, leaves, share);
            left -= k.size();
            kids.push(k);
        }
        Term::new(f.clone(), kids)
    }
    go(rng, &symbols, &leaves, max_size.max(1))
}

/// An E-graph with at most `max_classes` classes: each state gets one node
/// over earlier states, then a few extra nodes anywhere, then rebuilding.
pub fn random_egraph(rng: &mut ChaCha8Rng, sig: &Signature, max_classes: usize) -> EGraph {
    let symbols: Vec<(Symbol, usize)> = sig.iter().map(|(s, n)| (s.clone(), n)).collect();
    let leaves: Vec<&Symbol> = symbols.iter().filter(|(_, n)| *n == 0).map(|(s, _)| s).collect();
    let n = rng.gen_range(1..=max_classes);
    let mut a = Automaton::new(sig.clone());
    let pick = |rng: &mut ChaCha8Rng, below: u32| -> ENode {
        let (f, k) = symbols.choose(rng).unwrap();
        if below == 0 || *k == 0 {
            return ENode::leaf((*leaves.choose(rng).unwrap()).clone());
        }
        ENode::new(f.clone(), (0..*k).map(|_| ClassId(rng.gen_range(0..below))).collect())
    };
    for i in 0..n as u32 {
        let node = pick(rng, i);
        a.add_transition(node, ClassId(i)).unwrap();
    }
    for _ in 0..rng.gen_range(0..=n) {
        let node = pick(rng, n as u32);
        let target = ClassId(rng.gen_range(0..n as u32));
        a.add_transition(node, target).unwrap();
    }
    rebuild(&a).unwrap().egraph
}

/// `f(x, y)`-style patterns over variables `x` and `y`.
fn random_pattern(rng: &mut ChaCha8Rng, symbols: &[(Symbol, usize)], depth: usize) -> Pattern {
    let vars = ["x", "y"];
    if depth == 0 || rng.gen_bool(0.35) {
        if rng.gen_bool(0.75) {
            return Pattern::var(vars.choose(rng).unwrap());
        }
        let leaves: Vec<&Symbol> = symbols.iter().filter(|(_, n)| *n == 0).map(|(s, _)| s).collect();
        return Pattern::leaf((*leaves.choose(rng).unwrap()).clone());
    }
    let (f, n) = symbols.choose(rng).unwrap();
    Pattern::app(
        f.clone(),
        (0..*n).map(|_| random_pattern(rng, symbols, depth - 1)).collect(),
    )
}

/// A variable-preserving TRS with one constant and one function symbol;
/// neither side of any rule is a bare variable.
pub fn random_vp_trs(rng: &mut ChaCha8Rng) -> Trs {
    let arity = rng.gen_range(1..=2);
    let signature = sig(&[("a", 0), ("f", arity)]);
    let symbols: Vec<(Symbol, usize)> = signature.iter().map(|(s, n)| (s.clone(), n)).collect();
    let want = rng.gen_range(1..=3);
    let mut rules = Vec::new();
    while rules.len() < want {
        let l = random_pattern(rng, &symbols, 2);
        let r = random_pattern(rng, &symbols, 2);
        if l.is_var() || r.is_var() || l == r || l.vars() != r.vars() {
            continue;
        }
        rules.push(RewriteRule::new(l, r).unwrap());
    }
    Trs::new(signature, rules).unwrap()
}

fn class_term(rng: &mut ChaCha8Rng, g: &EGraph, sig: &Signature, depth: usize) -> ClassTerm {
    let classes: Vec<ClassId> = g.classes().iter().copied().collect();
    if depth == 0 || rng.gen_bool(0.4) {
        return ClassTerm::Class(*classes.choose(rng).unwrap());
    }
    let symbols: Vec<(Symbol, usize)> = sig.iter().map(|(s, n)| (s.clone(), n)).collect();
    let (f, n) = symbols.choose(rng).unwrap();
    ClassTerm::app(f.clone(), (0..*n).map(|_| class_term(rng, g, sig, depth - 1)).collect())
}

/// `G` and a graph above it obtained by inserting random equations.
fn graph_pair(seed: u64) -> (EGraph, EGraph) {
    let mut r = rng(seed);
    let s = sig(&[("a", 0), ("b", 0), ("f", 1), ("g", 2)]);
    let g = random_egraph(&mut r, &s, 6);
    let mut a = g.to_automaton();
    for _ in 0..r.gen_range(1..=3) {
        let t = class_term(&mut r, &g, &s, 2);
        let c = *g.classes().iter().collect::<Vec<_>>().choose(&mut r).unwrap();
        a.insert_term(&t, *c).unwrap();
    }
    let h = rebuild(&a).unwrap().egraph;
    (g, h)
}

/// Homomorphisms are unique and an E-graph is rigid: the only
/// endomorphism is the identity.
pub fn check_hom_uniqueness(seed: u64) -> Result<(), String> {
    let (g, h) = graph_pair(seed);
    let id = find_homomorphism(&g, &g).ok_or("no endomorphism")?;
    if id.iter().any(|(a, b)| a != b) {
        return Err(format!("non-identity endomorphism {id:?}"));
    }
    let hom = find_homomorphism(&g, &h).ok_or("no homomorphism into a larger graph")?;
    // any homomorphism must send c to the class accepting c's witness
    for (c, w) in g.witness_terms() {
        if h.accepts(&w) != Some(hom[&c]) {
            return Err(format!("class {c} witness {w} not sent to {}", hom[&c]));
        }
    }
    Ok(())
}

/// Accepted terms travel along homomorphisms.
pub fn check_hom_transport(seed: u64) -> Result<(), String> {
    let (g, h) = graph_pair(seed);
    let hom = find_homomorphism(&g, &h).ok_or("no homomorphism")?;
    for (c, terms) in g.enumerate_all(6) {
        for t in terms {
            if h.accepts(&t) != Some(hom[&c]) {
                return Err(format!("{t} in class {c} not accepted at {}", hom[&c]));
            }
        }
    }
    Ok(())
}

/// Rebuilding a rebuilt graph changes nothing, and renaming the states of
/// the input gives an isomorphic result.
pub fn check_rebuild(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let s = sig(&[("a", 0), ("b", 0), ("f", 1), ("g", 2)]);
    let g = random_egraph(&mut r, &s, 6);
    let mut a = g.to_automaton();
    for _ in 0..r.gen_range(1..=3) {
        let t = class_term(&mut r, &g, &s, 2);
        let c = *g.classes().iter().collect::<Vec<_>>().choose(&mut r).unwrap();
        a.insert_term(&t, *c).unwrap();
    }
    let once = rebuild(&a).map_err(|e| e.to_string())?.egraph;
    let twice = rebuild(&once.to_automaton()).map_err(|e| e.to_string())?.egraph;
    if once != twice {
        return Err("rebuild is not idempotent".into());
    }
    let mut states: Vec<ClassId> = a.states.iter().copied().collect();
    let original = states.clone();
    states.shuffle(&mut r);
    let rename: BTreeMap<ClassId, ClassId> = original.into_iter().zip(states).collect();
    let mut b = Automaton::new(a.signature.clone());
    b.states = a.states.iter().map(|c| rename[c]).collect();
    b.transitions = a
        .transitions
        .iter()
        .map(|(n, c)| (n.map_children(|x| rename[&x]), rename[c]))
        .collect();
    b.equations = a.equations.iter().map(|(x, y)| (rename[x], rename[y])).collect();
    let renamed = rebuild(&b).map_err(|e| e.to_string())?.egraph;
    if !is_isomorphic(&once, &renamed) {
        return Err("renaming states changed the rebuilt graph".into());
    }
    Ok(())
}

/// Homomorphisms never increase rank.
pub fn check_rank_decrease(seed: u64) -> Result<(), String> {
    let (g, h) = graph_pair(seed);
    let hom = find_homomorphism(&g, &h).ok_or("no homomorphism")?;
    let (rg, rh) = (g.ranks(), h.ranks());
    for (c, d) in &hom {
        if rh[d] > rg[c] {
            return Err(format!("rank of {c} is {} but of its image {d} is {}", rg[c], rh[d]));
        }
    }
    Ok(())
}

/// The E-graph of a finite set of ground identities relates two subterms
/// exactly when congruence closure over the subterms does.
pub fn check_pcr_oracle(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let s = sig(&[("a", 0), ("b", 0), ("f", 1), ("g", 2)]);
    let n = r.gen_range(1..=3);
    let pairs: Vec<(Term, Term)> = (0..n)
        .map(|_| (random_term(&mut r, &s, 5), random_term(&mut r, &s, 5)))
        .collect();
    let mut a = Automaton::new(s.clone());
    for (t, u) in &pairs {
        let root = a.fresh_state();
        a.insert_term(&ClassTerm::from(t), root).unwrap();
        a.insert_term(&ClassTerm::from(u), root).unwrap();
    }
    let g = rebuild(&a).map_err(|e| e.to_string())?.egraph;
    let universe: BTreeSet<Term> = pairs
        .iter()
        .flat_map(|(t, u)| t.subterms().into_iter().chain(u.subterms()))
        .collect();
    let oracle = congruence_closure(&universe, pairs.iter().cloned());
    for t in &universe {
        for u in &universe {
            if g.pcr_related(t, u) != oracle.same(t, u) {
                return Err(format!("disagree on {t} ~ {u} under {pairs:?}"));
            }
        }
    }
    Ok(())
}

fn random_deps(rng: &mut ChaCha8Rng) -> Vec<Dependency> {
    let rels = [("P", 1), ("Q", 2), ("S", 2)];
    let vars = ["x", "y", "z"];
    let atom = |rng: &mut ChaCha8Rng, pool: &[&str]| {
        let (r, n) = rels.choose(rng).unwrap();
        let args: Vec<&str> = (0..*n).map(|_| *pool.choose(rng).unwrap()).collect();
        AtomPattern::new(*r, &args)
    };
    loop {
        let deps: Vec<Dependency> = (0..rng.gen_range(1..=3))
            .map(|_| {
                let body: Vec<AtomPattern> = (0..rng.gen_range(1..=2)).map(|_| atom(rng, &vars[..2])).collect();
                let head: Vec<AtomPattern> = (0..rng.gen_range(1..=2)).map(|_| atom(rng, &vars)).collect();
                Dependency::tgd(body, head)
            })
            .collect();
        if is_weakly_acyclic_deps(&deps).is_none() {
            return deps;
        }
    }
}

fn random_instance(rng: &mut ChaCha8Rng, domain: &[&str], atoms: usize) -> Instance {
    let rels = [("P", 1), ("Q", 2), ("S", 2)];
    Instance::from_atoms((0..atoms).map(|_| {
        let (r, n) = rels.choose(rng).unwrap();
        Atom::new(
            *r,
            (0..*n).map(|_| Elem::constant(domain.choose(rng).unwrap())).collect(),
        )
    }))
}

/// A terminating chase result maps into every model of the dependencies
/// containing the start instance.
pub fn check_chase_universal(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let deps = random_deps(&mut r);
    let size = r.gen_range(1..=4);
    let start = random_instance(&mut r, &["a", "b", "c"], size);
    let out =
        run_standard_chase(&deps, &start, ChaseConfig::new(Scheduler::EgdFair, 10_000)).map_err(|e| e.to_string())?;
    if out.status != ChaseStatus::Terminated {
        return Err(format!("weakly acyclic program did not terminate: {deps:?}"));
    }
    // the full instance over the active domain plus one extra constant
    let mut dom: Vec<Elem> = start.domain().into_iter().collect();
    dom.push(Elem::constant("star"));
    let mut full = Instance::new();
    for (rel, n) in [("P", 1), ("Q", 2), ("S", 2)] {
        let mut tuples: Vec<Vec<Elem>> = vec![vec![]];
        for _ in 0..n {
            tuples = tuples
                .into_iter()
                .flat_map(|t| dom.iter().map(move |e| [t.clone(), vec![e.clone()]].concat()))
                .collect();
        }
        for t in tuples {
            full.insert(Atom::new(rel, t));
        }
    }
    // a different chase of a larger instance
    let mut bigger = start.clone();
    for a in random_instance(&mut r, &["a", "b", "c", "d"], 3).iter() {
        bigger.insert(a.clone());
    }
    let other = run_standard_chase(&deps, &bigger, ChaseConfig::new(Scheduler::Random(seed), 10_000))
        .map_err(|e| e.to_string())?;
    for model in [&full, &other.instance] {
        if !is_model(model, &deps) {
            return Err("hand-built instance is not a model".into());
        }
        match find_instance_hom(&out.instance, model) {
            Ok(Some(_)) => {}
            Ok(None) => return Err(format!("no homomorphism into a model of {deps:?}")),
            Err(e) => return Err(format!("search abandoned after {} nodes", e.nodes)),
        }
    }
    Ok(())
}

pub fn random_tm(rng: &mut ChaCha8Rng) -> TuringMachine {
    let states: Vec<Symbol> = (0..rng.gen_range(1..=3))
        .map(|i| Symbol::from(format!("q{i}")))
        .collect();
    let tape = ["a", "b", "_"];
    let mut trans = Vec::new();
    for q in &states {
        for s in tape {
            if rng.gen_bool(0.7) {
                trans.push(Transition {
                    from: q.clone(),
                    read: Symbol::new(s),
                    write: Symbol::new(tape.choose(rng).unwrap()),
                    dir: if rng.gen_bool(0.5) { Move::L } else { Move::R },
                    to: states.choose(rng).unwrap().clone(),
                });
            }
        }
    }
    let input = (0..rng.gen_range(0..=3))
        .map(|_| Symbol::new(["a", "b"].choose(rng).unwrap()))
        .collect();
    TuringMachine::new(states, Symbol::new("_"), input, trans).unwrap()
}

/// Following the string rules from the initial configuration stays inside
/// the encoded configurations, and the projection follows the machine.
pub fn check_tm_trace(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let tm = random_tm(&mut r);
    let enc = TmEncoding::new(tm.clone());
    let mut w = tm.initial_config();
    let mut cfg = w.clone();
    for _ in 0..40 {
        let next = enc.srs.successors(&w);
        if next.len() > 1 {
            return Err(format!("{} successors of {w:?} for\n{tm}", next.len()));
        }
        let Some(n) = next.into_iter().next() else {
            return match tm.step(&cfg) {
                None => Ok(()),
                Some(_) => Err(format!("rewriting stopped before the machine\n{tm}")),
            };
        };
        if !enc.in_config(&n) {
            return Err(format!("{n:?} left the configuration language\n{tm}"));
        }
        if enc.is_type_a(&w) {
            cfg = tm
                .step(&cfg)
                .ok_or_else(|| format!("rewrote past a halted machine\n{tm}"))?;
        }
        let projected = enc.pi(&n).map_err(|e| e.to_string())?;
        if tm.normalize(&projected) != tm.normalize(&cfg) {
            return Err(format!("projection {projected:?} differs from {cfg:?}\n{tm}"));
        }
        w = n;
    }
    Ok(())
}

/// `n` cases of `check` from consecutive seeds.
pub fn run_cases(n: u64, base: u64, check: fn(u64) -> Result<(), String>) -> Result<(), String> {
    for i in 0..n {
        check(base + i).map_err(|e| format!("seed {}: {e}", base + i))?;
    }
    Ok(())
}
