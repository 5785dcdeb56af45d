//! Symbolic encoding of a one-sided check as an SMT-LIB 2 script.
//!
//! Every (signal, cycle) pair becomes a Boolean constant. Three-valued
//! results are carried as two formulas, "definitely true" and "definitely
//! false". Sequence matches are kept per absolute end cycle. Shared
//! subterms are hash-consed and emitted once with `define-fun`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::rc::Rc;
use std::time::Instant;

use super::eval::TraceAssignment;
use super::ir::{BoolIr, Lowered, PropIr, SeqIr};
use super::solver::{solve, SolveResult};
use super::{BmcOutcome, CheckConfig, CheckError};

pub type TermId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Term {
    True,
    False,
    Var(usize, usize),
    Not(TermId),
    And(Vec<TermId>),
    Or(Vec<TermId>),
    Xor(TermId, TermId),
}

const TRUE: TermId = 0;
const FALSE: TermId = 1;

struct Dag {
    terms: Vec<Term>,
    ids: HashMap<Term, TermId>,
}

impl Dag {
    fn new() -> Self {
        let mut d = Dag {
            terms: Vec::new(),
            ids: HashMap::new(),
        };
        d.intern(Term::True);
        d.intern(Term::False);
        d
    }

    fn intern(&mut self, t: Term) -> TermId {
        if let Some(&id) = self.ids.get(&t) {
            return id;
        }
        let id = self.terms.len();
        self.terms.push(t.clone());
        self.ids.insert(t, id);
        id
    }

    fn var(&mut self, sig: usize, cycle: usize) -> TermId {
        self.intern(Term::Var(sig, cycle))
    }

    fn not(&mut self, x: TermId) -> TermId {
        match &self.terms[x] {
            Term::True => FALSE,
            Term::False => TRUE,
            Term::Not(y) => *y,
            _ => self.intern(Term::Not(x)),
        }
    }

    fn and(&mut self, xs: &[TermId]) -> TermId {
        let mut set = BTreeSet::new();
        for &x in xs {
            match &self.terms[x] {
                Term::False => return FALSE,
                Term::True => {}
                Term::And(inner) => set.extend(inner.iter().copied()),
                _ => {
                    set.insert(x);
                }
            }
        }
        match set.len() {
            0 => TRUE,
            1 => *set.iter().next().expect("one element"),
            _ => self.intern(Term::And(set.into_iter().collect())),
        }
    }

    fn or(&mut self, xs: &[TermId]) -> TermId {
        let mut set = BTreeSet::new();
        for &x in xs {
            match &self.terms[x] {
                Term::True => return TRUE,
                Term::False => {}
                Term::Or(inner) => set.extend(inner.iter().copied()),
                _ => {
                    set.insert(x);
                }
            }
        }
        match set.len() {
            0 => FALSE,
            1 => *set.iter().next().expect("one element"),
            _ => self.intern(Term::Or(set.into_iter().collect())),
        }
    }

    fn xor(&mut self, a: TermId, b: TermId) -> TermId {
        match (a, b) {
            (FALSE, x) | (x, FALSE) => x,
            (TRUE, x) | (x, TRUE) => self.not(x),
            _ if a == b => FALSE,
            _ => self.intern(Term::Xor(a.min(b), a.max(b))),
        }
    }
}

/// Three-valued formula pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Tv {
    yes: TermId,
    no: TermId,
}

const T: Tv = Tv { yes: TRUE, no: FALSE };
const F: Tv = Tv { yes: FALSE, no: TRUE };
const U: Tv = Tv { yes: FALSE, no: FALSE };

type Ends = Rc<BTreeMap<i64, Tv>>;

struct Encoder<'a> {
    dag: Dag,
    depth: usize,
    sigs: &'a BTreeMap<String, usize>,
    /// Per cycle: the current attempt may still read atoms here.
    readable: Vec<TermId>,
    seq_cache: HashMap<(*const SeqIr, i64), Ends>,
    rep_cache: HashMap<(*const SeqIr, u32, i64), Ends>,
    prop_cache: HashMap<(*const PropIr, i64), Tv>,
}

impl<'a> Encoder<'a> {
    fn kand(&mut self, a: Tv, b: Tv) -> Tv {
        Tv {
            yes: self.dag.and(&[a.yes, b.yes]),
            no: self.dag.or(&[a.no, b.no]),
        }
    }

    fn kor(&mut self, a: Tv, b: Tv) -> Tv {
        Tv {
            yes: self.dag.or(&[a.yes, b.yes]),
            no: self.dag.and(&[a.no, b.no]),
        }
    }

    fn knot(a: Tv) -> Tv {
        Tv { yes: a.no, no: a.yes }
    }

    fn bool_at(&mut self, b: &BoolIr, cycle: i64) -> TermId {
        match b {
            BoolIr::Const(v) => {
                if *v {
                    TRUE
                } else {
                    FALSE
                }
            }
            BoolIr::Var(name) => match self.sigs.get(name) {
                Some(&s) => self.dag.var(s, cycle as usize),
                None => FALSE,
            },
            BoolIr::Past(x) => {
                if cycle == 0 {
                    FALSE
                } else {
                    self.bool_at(x, cycle - 1)
                }
            }
            BoolIr::Not(x) => {
                let v = self.bool_at(x, cycle);
                self.dag.not(v)
            }
            BoolIr::And(xs) => {
                let v: Vec<TermId> = xs.iter().map(|x| self.bool_at(x, cycle)).collect();
                self.dag.and(&v)
            }
            BoolIr::Or(xs) => {
                let v: Vec<TermId> = xs.iter().map(|x| self.bool_at(x, cycle)).collect();
                self.dag.or(&v)
            }
            BoolIr::Xor(a, b) => {
                let (a, b) = (self.bool_at(a, cycle), self.bool_at(b, cycle));
                self.dag.xor(a, b)
            }
            BoolIr::Ite(c, a, b) => {
                let (c, a, b) = (self.bool_at(c, cycle), self.bool_at(a, cycle), self.bool_at(b, cycle));
                let nc = self.dag.not(c);
                let l = self.dag.and(&[c, a]);
                let r = self.dag.and(&[nc, b]);
                self.dag.or(&[l, r])
            }
        }
    }

    fn atom(&mut self, b: &BoolIr, cycle: i64) -> Tv {
        if cycle < 0 || cycle as usize >= self.depth {
            return U;
        }
        let r = self.readable[cycle as usize];
        let v = self.bool_at(b, cycle);
        let nv = self.dag.not(v);
        Tv {
            yes: self.dag.and(&[r, v]),
            no: self.dag.and(&[r, nv]),
        }
    }

    fn merge(&mut self, into: &mut BTreeMap<i64, Tv>, end: i64, v: Tv) {
        let cur = into.get(&end).copied().unwrap_or(F);
        let m = self.kor(cur, v);
        into.insert(end, m);
    }

    /// Match ends (absolute cycles) of `s` started at `start`; an end of
    /// `start - 1` is the empty match.
    fn seq(&mut self, s: &SeqIr, start: i64) -> Ends {
        if let Some(e) = self.seq_cache.get(&(s as *const _, start)) {
            return e.clone();
        }
        let mut out: BTreeMap<i64, Tv> = BTreeMap::new();
        match s {
            SeqIr::Bool(b) => {
                let a = self.atom(b, start);
                out.insert(start, a);
            }
            SeqIr::Concat { lhs, lo, hi, rhs } => {
                let left = self.seq(lhs, start);
                for (&e1, &lv) in left.iter() {
                    for d in *lo..=*hi {
                        let d = i64::from(d);
                        // fusion needs a non-empty match on both sides
                        if d == 0 && e1 < start {
                            continue;
                        }
                        let rs = e1 + d;
                        let right = self.seq(rhs, rs);
                        for (&e, &rv) in right.iter() {
                            if d == 0 && e < rs {
                                continue;
                            }
                            let v = self.kand(lv, rv);
                            self.merge(&mut out, e, v);
                        }
                    }
                }
            }
            SeqIr::Repeat { body, lo, hi } => {
                for n in *lo..=*hi {
                    let p = self.repeat_exact(body, n, start);
                    for (&e, &v) in p.iter() {
                        self.merge(&mut out, e, v);
                    }
                }
            }
            SeqIr::Throughout { cond, body } => {
                let m = self.seq(body, start);
                for (&e, &v) in m.iter() {
                    let mut all = T;
                    for c in start..=e {
                        let a = self.atom(cond, c);
                        all = self.kand(all, a);
                    }
                    let r = self.kand(v, all);
                    out.insert(e, r);
                }
            }
            SeqIr::Within { inner, outer } => {
                let o = self.seq(outer, start);
                for (&e, &ov) in o.iter() {
                    let mut any = F;
                    for t1 in start..=e + 1 {
                        let inn = self.seq(inner, t1);
                        for (_, &iv) in inn.range(..=e) {
                            any = self.kor(any, iv);
                        }
                    }
                    let r = self.kand(ov, any);
                    out.insert(e, r);
                }
            }
            SeqIr::Intersect(a, b) => {
                let (a, b) = (self.seq(a, start), self.seq(b, start));
                for (&e, &av) in a.iter() {
                    if let Some(&bv) = b.get(&e) {
                        let r = self.kand(av, bv);
                        out.insert(e, r);
                    }
                }
            }
            SeqIr::And(a, b) => {
                let (a, b) = (self.seq(a, start), self.seq(b, start));
                for (&e1, &av) in a.iter() {
                    for (&e2, &bv) in b.iter() {
                        let v = self.kand(av, bv);
                        self.merge(&mut out, e1.max(e2), v);
                    }
                }
            }
            SeqIr::Or(a, b) => {
                let (a, b) = (self.seq(a, start), self.seq(b, start));
                for (&e, &v) in a.iter().chain(b.iter()) {
                    self.merge(&mut out, e, v);
                }
            }
        }
        let out = Rc::new(out);
        self.seq_cache.insert((s as *const _, start), out.clone());
        out
    }

    fn repeat_exact(&mut self, body: &SeqIr, n: u32, start: i64) -> Ends {
        if n == 0 {
            return Rc::new(BTreeMap::from([(start - 1, T)]));
        }
        if let Some(e) = self.rep_cache.get(&(body as *const _, n, start)) {
            return e.clone();
        }
        let mut out = BTreeMap::new();
        let first = self.seq(body, start);
        for (&e1, &v1) in first.iter() {
            let rest = self.repeat_exact(body, n - 1, e1 + 1);
            for (&e, &v2) in rest.iter() {
                let v = self.kand(v1, v2);
                self.merge(&mut out, e, v);
            }
        }
        let out = Rc::new(out);
        self.rep_cache.insert((body as *const _, n, start), out.clone());
        out
    }

    fn prop(&mut self, p: &PropIr, start: i64) -> Tv {
        if let Some(v) = self.prop_cache.get(&(p as *const _, start)) {
            return *v;
        }
        let v = match p {
            PropIr::Seq(s) => {
                let m = self.seq(s, start);
                let mut acc = F;
                for (_, &v) in m.range(start..) {
                    acc = self.kor(acc, v);
                }
                acc
            }
            PropIr::Implication {
                antecedent,
                nonoverlap,
                consequent,
            } => {
                let m = self.seq(antecedent, start);
                let mut acc = T;
                for (&e, &av) in m.range(start..) {
                    let c = self.prop(consequent, e + i64::from(*nonoverlap));
                    let ok = self.kor(Self::knot(av), c);
                    acc = self.kand(acc, ok);
                }
                acc
            }
            PropIr::Not(q) => Self::knot(self.prop(q, start)),
            PropIr::And(a, b) => {
                let (a, b) = (self.prop(a, start), self.prop(b, start));
                self.kand(a, b)
            }
            PropIr::Or(a, b) => {
                let (a, b) = (self.prop(a, start), self.prop(b, start));
                self.kor(a, b)
            }
        };
        self.prop_cache.insert((p as *const _, start), v);
        v
    }

    /// Formula that is true when `l` is violated at some start cycle.
    fn violated(&mut self, l: &Lowered) -> TermId {
        let mut bad = Vec::new();
        self.seq_cache.clear();
        self.rep_cache.clear();
        self.prop_cache.clear();
        self.readable = vec![TRUE; self.depth];
        for t in 0..self.depth {
            if let Some(a) = &l.abort {
                // atoms become unreadable from the first abort cycle on
                self.seq_cache.clear();
                self.rep_cache.clear();
                self.prop_cache.clear();
                let mut live = TRUE;
                for c in t..self.depth {
                    let fired = self.bool_at(a, c as i64);
                    let nf = self.dag.not(fired);
                    live = self.dag.and(&[live, nf]);
                    self.readable[c] = live;
                }
            }
            bad.push(self.prop(&l.body, t as i64).no);
        }
        self.dag.or(&bad)
    }
}

/// SMT-LIB symbol for a signal at a cycle.
fn symbol(name: &str, cycle: usize) -> String {
    let clean: String = name.chars().map(|c| if c == '|' || c == '\\' { '_' } else { c }).collect();
    format!("|{clean}@{cycle}|")
}

/// Script plus the symbol table needed to read a model back.
pub struct Script {
    pub text: String,
    /// `(symbol, signal, cycle)` for every declared constant.
    pub vars: Vec<(String, String, usize)>,
    pub depth: usize,
}

pub fn emit(assumed: &Lowered, asserted: &Lowered, depth: usize) -> Script {
    let mut names: BTreeSet<String> = assumed.signals();
    names.extend(asserted.signals());
    let sigs: BTreeMap<String, usize> = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
    let mut enc = Encoder {
        dag: Dag::new(),
        depth,
        sigs: &sigs,
        readable: vec![TRUE; depth],
        seq_cache: HashMap::new(),
        rep_cache: HashMap::new(),
        prop_cache: HashMap::new(),
    };
    let assumed_bad = enc.violated(assumed);
    let asserted_bad = enc.violated(asserted);
    let holds = enc.dag.not(assumed_bad);
    let goal = enc.dag.and(&[holds, asserted_bad]);

    let mut text = String::new();
    let _ = writeln!(text, "; assume(p1) and assert(p2), depth {depth}");
    let _ = writeln!(text, "; p1: {assumed}");
    let _ = writeln!(text, "; p2: {asserted}");
    text.push_str("(set-logic QF_UF)\n(set-option :produce-models true)\n");
    let mut vars = Vec::new();
    for (name, _) in &sigs {
        for c in 0..depth {
            let sym = symbol(name, c);
            let _ = writeln!(text, "(declare-const {sym} Bool)");
            vars.push((sym.trim_matches('|').to_string(), name.clone(), c));
        }
    }
    let names_by_index: Vec<&String> = sigs.keys().collect();
    let order = reachable(&enc.dag, goal);
    let mut rendered: HashMap<TermId, String> = HashMap::new();
    for id in order {
        let s = match &enc.dag.terms[id] {
            Term::True => "true".to_string(),
            Term::False => "false".to_string(),
            Term::Var(s, c) => symbol(names_by_index[*s], *c),
            Term::Not(x) => format!("(not {})", rendered[x]),
            Term::And(xs) => format!("(and {})", xs.iter().map(|x| rendered[x].as_str()).collect::<Vec<_>>().join(" ")),
            Term::Or(xs) => format!("(or {})", xs.iter().map(|x| rendered[x].as_str()).collect::<Vec<_>>().join(" ")),
            Term::Xor(a, b) => format!("(xor {} {})", rendered[a], rendered[b]),
        };
        let compound = matches!(enc.dag.terms[id], Term::And(_) | Term::Or(_) | Term::Xor(..));
        if compound {
            let _ = writeln!(text, "(define-fun t{id} () Bool {s})");
            rendered.insert(id, format!("t{id}"));
        } else {
            rendered.insert(id, s);
        }
    }
    let _ = writeln!(text, "(assert {})", rendered[&goal]);
    text.push_str("(check-sat)\n(get-model)\n");
    Script { text, vars, depth }
}

/// Terms reachable from `root`, children before parents.
fn reachable(dag: &Dag, root: TermId) -> Vec<TermId> {
    let mut seen = vec![false; dag.terms.len()];
    let mut order = Vec::new();
    let mut stack = vec![(root, false)];
    while let Some((id, expanded)) = stack.pop() {
        if expanded {
            order.push(id);
            continue;
        }
        if seen[id] {
            continue;
        }
        seen[id] = true;
        stack.push((id, true));
        match &dag.terms[id] {
            Term::Not(x) => stack.push((*x, false)),
            Term::And(xs) | Term::Or(xs) => stack.extend(xs.iter().map(|x| (*x, false))),
            Term::Xor(a, b) => {
                stack.push((*a, false));
                stack.push((*b, false));
            }
            _ => {}
        }
    }
    order
}

impl Script {
    /// Trace from a solver model; constants missing from the model read 0.
    pub fn trace(&self, model: &BTreeMap<String, bool>) -> TraceAssignment {
        let mut t = TraceAssignment::new(self.depth);
        for (sym, name, cycle) in &self.vars {
            let v = model.get(sym).copied().unwrap_or(false);
            t.signals.entry(name.clone()).or_insert_with(|| vec![false; self.depth])[*cycle] = v;
        }
        t
    }
}

pub fn bmc(assumed: &Lowered, asserted: &Lowered, cfg: &CheckConfig, deadline: Instant) -> Result<BmcOutcome, CheckError> {
    let script = emit(assumed, asserted, cfg.depth);
    let left = deadline.saturating_duration_since(Instant::now());
    if left.is_zero() {
        return Ok(BmcOutcome::Timeout);
    }
    match solve(&script.text, cfg.solver, left).map_err(|e| CheckError::Solver(e.0))? {
        SolveResult::Sat(model) => Ok(BmcOutcome::Fail(script.trace(&model))),
        SolveResult::Unsat => Ok(BmcOutcome::Pass),
        SolveResult::Unknown => Ok(BmcOutcome::Timeout),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pec::eval::eval_property;
    use crate::pec::lower::lower;
    use crate::pec::solver::solve_builtin;
    use crate::syntax::parse;
    use std::time::Duration;

    fn low(s: &str) -> Lowered {
        lower(&parse(s).unwrap()).unwrap()
    }

    fn run(p: &str, q: &str, depth: usize) -> SolveResult {
        let s = emit(&low(p), &low(q), depth);
        solve_builtin(&s.text, Duration::from_secs(10)).unwrap()
    }

    #[test]
    fn self_implication_is_unsat() {
        assert_eq!(run("a", "a", 2), SolveResult::Unsat);
        assert_eq!(run("a |-> ##[1:2] b", "a |-> ##[1:2] b", 4), SolveResult::Unsat);
    }

    #[test]
    fn swapped_implication_is_sat() {
        assert!(matches!(run("a |-> b", "b |-> a", 2), SolveResult::Sat(_)));
    }

    #[test]
    fn script_shape() {
        let s = emit(&low("a |-> b"), &low("b |-> a"), 2);
        assert!(s.text.contains("(declare-const |a@0| Bool)"));
        assert!(s.text.contains("(declare-const |b@1| Bool)"));
        assert!(s.text.trim_end().ends_with("(check-sat)\n(get-model)"));
        assert_eq!(s.vars.len(), 4);
    }

    #[test]
    fn model_replays() {
        let (p, q) = (low("a |-> b"), low("a |=> b"));
        let s = emit(&p, &q, 3);
        let SolveResult::Sat(m) = solve_builtin(&s.text, Duration::from_secs(10)).unwrap() else {
            panic!("expected sat")
        };
        let t = s.trace(&m);
        assert!(eval_property(&p, &t));
        assert!(!eval_property(&q, &t));
    }
}
