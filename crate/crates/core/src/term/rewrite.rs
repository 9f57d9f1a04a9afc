//! Brute-force rewriting: one-step successors, bounded closure, and
//! enumeration of every term up to a size.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{Signature, Term, Trs};

/// All `u` with `t →_R u`, rewriting at every position.
pub fn one_step_rewrites(trs: &Trs, t: &Term) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    for rule in trs.rules() {
        if let Some(subst) = rule.lhs().match_term(t) {
            // rhs vars ⊆ lhs vars, so this cannot fail
            out.insert(rule.rhs().substitute(&subst).expect("rhs vars bound by lhs"));
        }
    }
    for (i, child) in t.children().iter().enumerate() {
        for replaced in one_step_rewrites(trs, child) {
            let mut children = t.children().to_vec();
            children[i] = replaced;
            out.insert(Term::new(t.head().clone(), children));
        }
    }
    out
}

/// Terms reachable from `t` whose size is at most `size_bound`.
///
/// Only paths whose intermediate terms also respect the bound are explored;
/// this keeps the search finite.
pub fn rewrite_closure(trs: &Trs, t: &Term, size_bound: usize) -> BTreeSet<Term> {
    let mut seen = BTreeSet::new();
    if t.size() > size_bound {
        return seen;
    }
    let mut queue = VecDeque::new();
    seen.insert(t.clone());
    queue.push_back(t.clone());
    while let Some(cur) = queue.pop_front() {
        for next in one_step_rewrites(trs, &cur) {
            if next.size() <= size_bound && !seen.contains(&next) {
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    seen
}

/// Every ground term over `sig` with size at most `size_bound`.
pub fn all_terms_up_to(sig: &Signature, size_bound: usize) -> BTreeSet<Term> {
    // by_size[n] = terms of size exactly n
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); size_bound + 1];
    for n in 1..=size_bound {
        let mut here = Vec::new();
        for (f, arity) in sig.iter() {
            if arity == 0 {
                if n == 1 {
                    here.push(Term::leaf(f.clone()));
                }
                continue;
            }
            if n < 1 + arity {
                continue;
            }
            for sizes in compositions(n - 1, arity) {
                let mut partial: Vec<Vec<Term>> = vec![Vec::new()];
                for &s in &sizes {
                    let mut grown = Vec::new();
                    for prefix in &partial {
                        for c in &by_size[s] {
                            let mut p = prefix.clone();
                            p.push(c.clone());
                            grown.push(p);
                        }
                    }
                    partial = grown;
                }
                here.extend(partial.into_iter().map(|cs| Term::new(f.clone(), cs)));
            }
        }
        by_size[n] = here;
    }
    by_size.into_iter().flatten().collect()
}

/// Ordered ways to write `total` as `parts` positive summands.
pub(crate) fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut memo: BTreeMap<(usize, usize), Vec<Vec<usize>>> = BTreeMap::new();
    fn go(total: usize, parts: usize, memo: &mut BTreeMap<(usize, usize), Vec<Vec<usize>>>) -> Vec<Vec<usize>> {
        if parts == 0 {
            return if total == 0 { vec![Vec::new()] } else { Vec::new() };
        }
        if let Some(v) = memo.get(&(total, parts)) {
            return v.clone();
        }
        let mut out = Vec::new();
        for first in 1..=total.saturating_sub(parts - 1) {
            for mut rest in go(total - first, parts - 1, memo) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        memo.insert((total, parts), out.clone());
        out
    }
    go(total, parts, &mut memo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_term_infer, parse_trs};

    fn t(s: &str) -> Term {
        parse_term_infer(s).unwrap().0
    }

    fn set(items: &[&str]) -> BTreeSet<Term> {
        items.iter().map(|s| t(s)).collect()
    }

    #[test]
    fn one_step_examples() {
        let r = parse_trs("a -> b").unwrap();
        assert_eq!(one_step_rewrites(&r, &t("(f a a)")), set(&["(f b a)", "(f a b)"]));

        let r = parse_trs("(f ?x ?x) -> (g ?x ?x)").unwrap();
        assert!(one_step_rewrites(&r, &t("(f a b)")).is_empty());

        let r = parse_trs("(f (g ?x)) -> (g (f ?x))").unwrap();
        assert_eq!(
            one_step_rewrites(&r, &t("(f (g (f (g a))))")),
            set(&["(g (f (f (g a))))", "(f (g (g (f a))))"])
        );
    }

    #[test]
    fn closure_examples() {
        let r = parse_trs("a -> b\nc -> b").unwrap();
        assert_eq!(rewrite_closure(&r, &t("(f a b)"), 3), set(&["(f a b)", "(f b b)"]));

        let empty = Trs::default();
        assert_eq!(rewrite_closure(&empty, &t("(g a)"), 5), set(&["(g a)"]));

        let r = parse_trs("(f ?x ?x) -> (g ?x ?x)").unwrap();
        assert_eq!(rewrite_closure(&r, &t("(f a a)"), 3), set(&["(f a a)", "(g a a)"]));
    }

    #[test]
    fn closure_respects_size_bound() {
        let r = parse_trs("?x -> (s ?x)").unwrap();
        let got = rewrite_closure(&r, &t("z"), 3);
        assert_eq!(got, set(&["z", "(s z)", "(s (s z))"]));
    }

    #[test]
    fn enumerates_all_small_terms() {
        let sig = Signature::from_pairs([("f", 2), ("a", 0), ("b", 0)]).unwrap();
        // size 1: 2, size 3: 4, size 5: 2*(2*4)=16
        assert_eq!(all_terms_up_to(&sig, 1).len(), 2);
        assert_eq!(all_terms_up_to(&sig, 3).len(), 6);
        assert_eq!(all_terms_up_to(&sig, 5).len(), 22);
        assert_eq!(compositions(4, 2), vec![vec![1, 3], vec![2, 2], vec![3, 1]]);
    }
}
