//! Turing machines and their string rewriting encoding.
//!
//! Machine files hold one directive per line (or separated by `;`):
//!
//! ```text
//! states q0 q1
//! blank _
//! input a a
//! trans q0 a b R q1
//! ```
//!
//! The first listed state is initial.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::{Srs, Word};
use crate::syntax::ParseError;
use crate::term::Symbol;

pub const LMARK: &str = "lmark";
pub const RMARK: &str = "rmark";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Move {
    L,
    R,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Transition {
    pub from: Symbol,
    pub read: Symbol,
    pub write: Symbol,
    pub dir: Move,
    pub to: Symbol,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TmError {
    #[error("two transitions for state {state} reading {symbol}")]
    Nondeterministic { state: Symbol, symbol: Symbol },
    #[error("unknown state {0}")]
    UnknownState(Symbol),
    #[error("machine has no states")]
    NoStates,
    #[error("`{0}` is used both as a state and a tape symbol, or is reserved")]
    SymbolClash(Symbol),
    #[error("string is not an encoded configuration")]
    NotInConfig,
}

/// A deterministic machine on a two-way infinite tape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuringMachine {
    states: Vec<Symbol>,
    blank: Symbol,
    input: Word,
    transitions: BTreeMap<(Symbol, Symbol), Transition>,
}

impl TuringMachine {
    pub fn new(states: Vec<Symbol>, blank: Symbol, input: Word, transitions: Vec<Transition>) -> Result<Self, TmError> {
        if states.is_empty() {
            return Err(TmError::NoStates);
        }
        let mut map = BTreeMap::new();
        for t in transitions {
            for q in [&t.from, &t.to] {
                if !states.contains(q) {
                    return Err(TmError::UnknownState(q.clone()));
                }
            }
            let key = (t.from.clone(), t.read.clone());
            if map.get(&key).is_some_and(|old| old != &t) {
                return Err(TmError::Nondeterministic {
                    state: t.from,
                    symbol: t.read,
                });
            }
            map.insert(key, t);
        }
        let tm = TuringMachine {
            states,
            blank,
            input,
            transitions: map,
        };
        let tape = tm.tape_alphabet();
        for s in tm.states.iter().chain(&tape) {
            let reserved = [LMARK, RMARK, super::EPS].contains(&s.as_str())
                || s.as_str().starts_with("L__")
                || s.as_str().starts_with("R__")
                || s.as_str().starts_with("bar");
            if reserved || (tape.contains(s) && tm.states.contains(s)) {
                return Err(TmError::SymbolClash(s.clone()));
            }
        }
        Ok(tm)
    }

    pub fn states(&self) -> &[Symbol] {
        &self.states
    }

    pub fn blank(&self) -> &Symbol {
        &self.blank
    }

    pub fn transitions(&self) -> impl Iterator<Item = &Transition> {
        self.transitions.values()
    }

    pub fn transition(&self, state: &Symbol, read: &Symbol) -> Option<&Transition> {
        self.transitions.get(&(state.clone(), read.clone()))
    }

    pub fn tape_alphabet(&self) -> BTreeSet<Symbol> {
        let mut out: BTreeSet<Symbol> = self.input.iter().cloned().collect();
        out.insert(self.blank.clone());
        for t in self.transitions.values() {
            out.insert(t.read.clone());
            out.insert(t.write.clone());
        }
        out
    }

    /// `▷ q0 input ◁`.
    pub fn initial_config(&self) -> Word {
        let mut w = vec![Symbol::new(LMARK), self.states[0].clone()];
        w.extend(self.input.iter().cloned());
        w.push(Symbol::new(RMARK));
        w
    }

    /// Successor of a configuration `▷ u q v ◁`, or `None` if it halts.
    pub fn step(&self, config: &[Symbol]) -> Option<Word> {
        let k = config.iter().position(|s| self.states.contains(s))?;
        let q = &config[k];
        let left = &config[1..k];
        let right = &config[k + 1..config.len() - 1];
        let scanned = right.first().unwrap_or(&self.blank);
        let t = self.transition(q, scanned)?;
        let rest = if right.is_empty() { &[][..] } else { &right[1..] };
        let mut out = vec![Symbol::new(LMARK)];
        match t.dir {
            Move::R => {
                out.extend(left.iter().cloned());
                out.push(t.write.clone());
                out.push(t.to.clone());
            }
            Move::L => match left.split_last() {
                Some((c, u)) => {
                    out.extend(u.iter().cloned());
                    out.push(t.to.clone());
                    out.push(c.clone());
                    out.push(t.write.clone());
                }
                None => {
                    out.push(t.to.clone());
                    out.push(self.blank.clone());
                    out.push(t.write.clone());
                }
            },
        }
        out.extend(rest.iter().cloned());
        out.push(Symbol::new(RMARK));
        Some(out)
    }

    /// Drop blanks at the far ends of the tape.
    pub fn normalize(&self, config: &[Symbol]) -> Word {
        let Some(k) = config.iter().position(|s| self.states.contains(s)) else {
            return config.to_vec();
        };
        let left: Vec<Symbol> = config[1..k].iter().skip_while(|s| **s == self.blank).cloned().collect();
        let mut right: Vec<Symbol> = config[k + 1..config.len() - 1].to_vec();
        while right.last() == Some(&self.blank) {
            right.pop();
        }
        let mut out = vec![Symbol::new(LMARK)];
        out.extend(left);
        out.push(config[k].clone());
        out.extend(right);
        out.push(Symbol::new(RMARK));
        out
    }
}

impl fmt::Display for TuringMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let states: Vec<&str> = self.states.iter().map(Symbol::as_str).collect();
        writeln!(f, "states {}", states.join(" "))?;
        writeln!(f, "blank {}", self.blank)?;
        if !self.input.is_empty() {
            writeln!(f, "input {}", super::show(&self.input))?;
        }
        for t in self.transitions.values() {
            writeln!(f, "trans {} {} {} {:?} {}", t.from, t.read, t.write, t.dir, t.to)?;
        }
        Ok(())
    }
}

pub fn parse_tm(text: &str) -> Result<TuringMachine, ParseError> {
    let mut states = Vec::new();
    let mut blank = None;
    let mut input = Vec::new();
    let mut trans = Vec::new();
    let mut last_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let raw = raw.split('#').next().unwrap_or("");
        for directive in raw.split(';') {
            let words: Vec<&str> = directive.split_whitespace().collect();
            let err = |m: &str| ParseError::new(line, 1, m.to_string());
            match words.as_slice() {
                [] => {}
                ["states", qs @ ..] => states.extend(qs.iter().map(|q| Symbol::new(q))),
                ["blank", b] => blank = Some(Symbol::new(b)),
                ["input", xs @ ..] => input.extend(xs.iter().map(|x| Symbol::new(x))),
                ["trans", q, a, b, d, p] => {
                    let dir = match *d {
                        "L" => Move::L,
                        "R" => Move::R,
                        _ => return Err(err("direction must be L or R")),
                    };
                    trans.push(Transition {
                        from: Symbol::new(q),
                        read: Symbol::new(a),
                        write: Symbol::new(b),
                        dir,
                        to: Symbol::new(p),
                    });
                }
                ["trans", ..] => return Err(err("expected `trans <state> <read> <write> L|R <state>`")),
                [other, ..] => return Err(err(&format!("unknown directive `{other}`"))),
            }
        }
    }
    let blank = blank.ok_or_else(|| ParseError::new(last_line, 1, "missing `blank` line"))?;
    TuringMachine::new(states, blank, input, trans).map_err(|e| ParseError::new(last_line, 1, e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    LMark,
    RMark,
    State,
    BarState,
    Tape,
    BarTape,
    LDummy,
    RDummy,
}

/// A machine together with its string rewriting system and the symbol
/// classes needed to read encoded configurations back.
#[derive(Debug, Clone)]
pub struct TmEncoding {
    pub tm: TuringMachine,
    pub srs: Srs,
    kinds: BTreeMap<Symbol, Kind>,
    plain: BTreeMap<Symbol, Symbol>,
}

fn bar(a: &Symbol) -> Symbol {
    Symbol::from(format!("bar_{a}"))
}

fn barq(q: &Symbol) -> Symbol {
    Symbol::from(format!("bar{q}"))
}

fn dummy(side: char, x: &Symbol, y: &Symbol) -> Symbol {
    Symbol::from(format!("{side}__{x}_{y}"))
}

/// The rewriting system simulating `tm`; see [`TmEncoding`].
pub fn tm_to_srs(tm: &TuringMachine) -> Srs {
    TmEncoding::new(tm.clone()).srs
}

impl TmEncoding {
    pub fn new(tm: TuringMachine) -> Self {
        let (lm, rm) = (Symbol::new(LMARK), Symbol::new(RMARK));
        let mut srs = Srs::default();
        // dummy indices, as pairs of the symbols they record
        let mut zs: BTreeSet<(Symbol, Symbol)> = BTreeSet::new();
        for t in tm.transitions() {
            let (qi, a, b, qj) = (&t.from, &t.read, &t.write, &t.to);
            let mut rows = vec![(vec![qi.clone(), a.clone()], false), (vec![bar(a), barq(qi)], true)];
            if a == tm.blank() {
                rows.push((vec![qi.clone(), rm.clone()], false));
                rows.push((vec![lm.clone(), barq(qi)], true));
            }
            for (lhs, barred) in rows {
                let (x, y) = (lhs[0].clone(), lhs[1].clone());
                zs.insert((x.clone(), y.clone()));
                // keep the end marker that the left-hand side consumed
                let (pre, post): (Vec<Symbol>, Vec<Symbol>) = match (barred, lhs[0] == lm, lhs[1] == rm) {
                    (true, true, _) => (vec![lm.clone()], vec![]),
                    (false, _, true) => (vec![], vec![rm.clone()]),
                    _ => (vec![], vec![]),
                };
                let mid = match t.dir {
                    Move::R => vec![dummy('L', &x, &y), bar(b), qj.clone()],
                    Move::L => vec![barq(qj), b.clone(), dummy('R', &x, &y)],
                };
                let rhs: Word = pre.into_iter().chain(mid).chain(post).collect();
                srs.push(lhs, rhs);
            }
        }
        for q in tm.states() {
            for (x, y) in &zs {
                let (l, r) = (dummy('L', x, y), dummy('R', x, y));
                srs.push(vec![q.clone(), r.clone()], vec![l.clone(), l.clone(), q.clone()]);
                srs.push(vec![l.clone(), barq(q)], vec![barq(q), r.clone(), r]);
            }
        }

        let mut kinds = BTreeMap::new();
        let mut plain = BTreeMap::new();
        kinds.insert(lm, Kind::LMark);
        kinds.insert(rm, Kind::RMark);
        for q in tm.states() {
            kinds.insert(q.clone(), Kind::State);
            kinds.insert(barq(q), Kind::BarState);
            plain.insert(barq(q), q.clone());
        }
        for a in tm.tape_alphabet() {
            kinds.insert(a.clone(), Kind::Tape);
            kinds.insert(bar(&a), Kind::BarTape);
            plain.insert(bar(&a), a);
        }
        for (x, y) in &zs {
            kinds.insert(dummy('L', x, y), Kind::LDummy);
            kinds.insert(dummy('R', x, y), Kind::RDummy);
        }
        srs.alphabet.extend(kinds.keys().cloned());
        TmEncoding { tm, srs, kinds, plain }
    }

    fn kind(&self, s: &Symbol) -> Option<Kind> {
        self.kinds.get(s).copied()
    }

    /// Membership in `▷ (Π̄ ∪ D_L)* (Q ∪ Q̄) (Π ∪ D_R)* ◁`.
    pub fn in_config(&self, w: &[Symbol]) -> bool {
        let kinds: Option<Vec<Kind>> = w.iter().map(|s| self.kind(s)).collect();
        let Some(kinds) = kinds else { return false };
        let n = kinds.len();
        if n < 3 || kinds[0] != Kind::LMark || kinds[n - 1] != Kind::RMark {
            return false;
        }
        let mid = &kinds[1..n - 1];
        let Some(k) = mid.iter().position(|k| matches!(k, Kind::State | Kind::BarState)) else {
            return false;
        };
        mid[..k].iter().all(|k| matches!(k, Kind::BarTape | Kind::LDummy))
            && mid[k + 1..].iter().all(|k| matches!(k, Kind::Tape | Kind::RDummy))
    }

    /// Whether the state symbol sits next to the cell it scans.
    pub fn is_type_a(&self, w: &[Symbol]) -> bool {
        w.windows(2).any(|p| {
            matches!(
                (self.kind(&p[0]), self.kind(&p[1])),
                (Some(Kind::State), Some(Kind::Tape | Kind::RMark))
                    | (Some(Kind::BarTape | Kind::LMark), Some(Kind::BarState))
            )
        })
    }

    /// The configuration an encoded string stands for.
    pub fn pi(&self, w: &[Symbol]) -> Result<Word, TmError> {
        if !self.in_config(w) {
            return Err(TmError::NotInConfig);
        }
        let kept: Vec<&Symbol> = w
            .iter()
            .filter(|s| !matches!(self.kind(s), Some(Kind::LDummy | Kind::RDummy)))
            .collect();
        let mut out: Word = Vec::new();
        for s in &kept {
            match self.kind(s) {
                Some(Kind::BarState) => {
                    let q = self.plain[*s].clone();
                    match out.pop() {
                        Some(prev) if prev.as_str() == LMARK => {
                            out.extend([prev, q, self.tm.blank().clone()]);
                        }
                        Some(a) => out.extend([q, a]),
                        None => unreachable!("in_config checked the left marker"),
                    }
                }
                Some(Kind::BarTape) => out.push(self.plain[*s].clone()),
                _ => out.push((*s).clone()),
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::super::word;
    use super::*;

    fn machine(text: &str) -> TuringMachine {
        parse_tm(text).unwrap()
    }

    #[test]
    fn parse_formats() {
        let a = machine("states q0 q1; blank _; trans q0 a b R q1");
        let b = machine("states q0 q1\nblank _\n# comment\ntrans q0 a b R q1\n");
        assert_eq!(a, b);
        assert_eq!(parse_tm(&a.to_string()).unwrap(), a);
        assert!(parse_tm("states q0\nblank _\ntrans q0 a b R q0\ntrans q0 a c R q0").is_err());
        assert!(parse_tm("states q0\nblank _\ntrans q0 a b X q0").is_err());
        assert!(parse_tm("states q0").is_err());
        assert!(parse_tm("states q0\nblank _\ntrans q0 a b R q9").is_err());
    }

    #[test]
    fn right_move_rules() {
        let tm = machine("states q0 q1; blank _; trans q0 a b R q1");
        let srs = tm_to_srs(&tm);
        let shown: Vec<String> = srs.rules.iter().map(ToString::to_string).collect();
        assert_eq!(shown[0], "q0 a -> L__q0_a bar_b q1");
        assert_eq!(shown[1], "bar_a barq0 -> L__bar_a_barq0 bar_b q1");
        assert!(shown.contains(&"q1 R__q0_a -> L__q0_a L__q0_a q1".to_string()));
        assert!(shown.contains(&"L__q0_a barq1 -> barq1 R__q0_a R__q0_a".to_string()));
        // 2 transition rules, 2 states × 2 dummies × 2 shuffles
        assert_eq!(srs.rules.len(), 2 + 8);
        assert!(srs.rules.iter().all(|r| r.rhs.len() > r.lhs.len()));
    }

    #[test]
    fn blank_and_left_rows() {
        let tm = machine("states q0 q1; blank _; trans q0 _ b L q1");
        let shown: Vec<String> = tm_to_srs(&tm).rules.iter().map(ToString::to_string).collect();
        assert_eq!(
            &shown[..4],
            &[
                "q0 _ -> barq1 b R__q0__",
                "bar__ barq0 -> barq1 b R__bar___barq0",
                "q0 rmark -> barq1 b R__q0_rmark rmark",
                "lmark barq0 -> lmark barq1 b R__lmark_barq0",
            ]
        );
    }

    #[test]
    fn empty_machine_has_no_rules() {
        let tm = machine("states q0; blank _");
        assert!(tm_to_srs(&tm).rules.is_empty());
    }

    #[test]
    fn projection() {
        assert!(parse_tm("states q0; blank _; trans q0 rmark a L q0").is_err());
        let tm =
            machine("states q0 q1 q3 qi; blank _; input d; trans q0 a b R q1; trans q1 b c R q3; trans qi _ a L q0");
        let enc = TmEncoding::new(tm);
        let w = word(&[
            "lmark",
            "L__q0_a",
            "bar_b",
            "L__q1_b",
            "bar_c",
            "barq3",
            "d",
            "R__qi_rmark",
            "rmark",
        ]);
        assert!(enc.in_config(&w));
        assert_eq!(enc.pi(&w).unwrap(), word(&["lmark", "b", "q3", "c", "d", "rmark"]));
        let init = word(&["lmark", "q0", "rmark"]);
        assert_eq!(enc.pi(&init).unwrap(), init);
        assert_eq!(
            enc.pi(&word(&["lmark", "barq0", "rmark"])).unwrap(),
            word(&["lmark", "q0", "_", "rmark"])
        );
    }

    #[test]
    fn config_membership() {
        let enc = TmEncoding::new(machine("states q0 q1; blank _; trans q0 a b R q1"));
        assert!(enc.in_config(&word(&["lmark", "q0", "a", "rmark"])));
        assert!(!enc.in_config(&word(&["lmark", "q0", "a"])));
        assert!(!enc.in_config(&word(&["lmark", "q0", "q1", "rmark"])));
        assert!(!enc.in_config(&word(&["lmark", "a", "q0", "rmark"])));
        assert!(enc.in_config(&word(&["lmark", "bar_a", "L__q0_a", "q0", "R__q0_a", "a", "rmark"])));
    }

    #[test]
    fn machine_steps() {
        let tm = machine("states q0 q1; blank _; trans q0 a b R q1; trans q1 _ c L q0");
        let c0 = tm.initial_config();
        assert_eq!(c0, word(&["lmark", "q0", "rmark"]));
        let tm = TuringMachine::new(
            tm.states().to_vec(),
            Symbol::new("_"),
            word(&["a"]),
            tm.transitions().cloned().collect(),
        )
        .unwrap();
        let c1 = tm.step(&tm.initial_config()).unwrap();
        assert_eq!(c1, word(&["lmark", "b", "q1", "rmark"]));
        let c2 = tm.step(&c1).unwrap();
        assert_eq!(c2, word(&["lmark", "q0", "b", "c", "rmark"]));
        assert_eq!(tm.step(&c2), None);
    }

    #[test]
    fn rewriting_follows_the_machine() {
        let tm = machine("states q0 q1; blank _; input a; trans q0 a b R q1; trans q1 _ c L q0");
        let enc = TmEncoding::new(tm.clone());
        let mut w = tm.initial_config();
        let mut cfg = w.clone();
        for _ in 0..10 {
            let next = enc.srs.successors(&w);
            assert!(next.len() <= 1);
            let Some(n) = next.into_iter().next() else {
                assert_eq!(tm.step(&cfg), None);
                return;
            };
            assert!(enc.in_config(&n));
            if enc.is_type_a(&w) {
                cfg = tm.step(&cfg).unwrap();
            }
            assert_eq!(tm.normalize(&enc.pi(&n).unwrap()), tm.normalize(&cfg));
            w = n;
        }
        panic!("machine should halt");
    }
}
