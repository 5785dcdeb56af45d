//! Direct evaluation of lowered properties on concrete traces.
//!
//! Values are three-valued (true, false, unknown) and computed for 64
//! traces at once: every signal value is a `u64` with one bit per trace.
//! An atom read at or beyond the trace bound is unknown, and so is an atom
//! read once the abort condition of the current attempt has fired. A
//! property holds on a trace when no start cycle evaluates to false.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::ir::{BoolIr, Lowered, PropIr, SeqIr};

/// Per-signal values over `depth` cycles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceAssignment {
    pub depth: usize,
    pub signals: BTreeMap<String, Vec<bool>>,
}

impl TraceAssignment {
    pub fn new(depth: usize) -> Self {
        Self {
            depth,
            signals: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, name: &str, values: &[bool]) -> &mut Self {
        let mut v = values.to_vec();
        v.resize(self.depth, false);
        self.signals.insert(name.to_string(), v);
        self
    }

    /// Compact `name=0110` form.
    pub fn describe(&self) -> String {
        self.signals
            .iter()
            .map(|(n, v)| {
                let bits: String = v.iter().map(|b| if *b { '1' } else { '0' }).collect();
                format!("{n}={bits}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A three-valued value per lane: `t` marks lanes that are true, `f` lanes
/// that are false; lanes in neither are unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct V {
    t: u64,
    f: u64,
}

impl V {
    fn and(self, o: V) -> V {
        V {
            t: self.t & o.t,
            f: self.f | o.f,
        }
    }
    fn or(self, o: V) -> V {
        V {
            t: self.t | o.t,
            f: self.f & o.f,
        }
    }
    fn not(self) -> V {
        V { t: self.f, f: self.t }
    }
}

/// Signal values for a batch of traces.
pub struct Lanes<'a> {
    pub depth: usize,
    pub valid: u64,
    pub index: &'a HashMap<String, usize>,
    /// `masks[signal][cycle]`
    pub masks: &'a [Vec<u64>],
}

struct Eval<'a, 'b> {
    lanes: &'b Lanes<'a>,
    tv: V,
    fv: V,
    /// Lanes whose atoms are still readable at each cycle of the attempt.
    known: Vec<u64>,
    bools: HashMap<(usize, usize), u64>,
    seqs: HashMap<(usize, usize), Rc<Vec<V>>>,
    reps: HashMap<(usize, u32, usize), Rc<Vec<V>>>,
    props: HashMap<(usize, usize), V>,
}

fn key<T>(x: &T) -> usize {
    x as *const T as usize
}

impl<'a, 'b> Eval<'a, 'b> {
    fn new(lanes: &'b Lanes<'a>) -> Self {
        let valid = lanes.valid;
        Self {
            lanes,
            tv: V { t: valid, f: 0 },
            fv: V { t: 0, f: valid },
            known: vec![valid; lanes.depth],
            bools: HashMap::new(),
            seqs: HashMap::new(),
            reps: HashMap::new(),
            props: HashMap::new(),
        }
    }

    fn boolean(&mut self, b: &BoolIr, i: usize) -> u64 {
        if let Some(v) = self.bools.get(&(key(b), i)) {
            return *v;
        }
        let valid = self.lanes.valid;
        let v = match b {
            BoolIr::Const(true) => valid,
            BoolIr::Const(false) => 0,
            BoolIr::Var(name) => match self.lanes.index.get(name) {
                Some(&s) => self.lanes.masks[s][i],
                None => 0,
            },
            BoolIr::Past(x) => {
                if i == 0 {
                    0
                } else {
                    self.boolean(x, i - 1)
                }
            }
            BoolIr::Not(x) => !self.boolean(x, i) & valid,
            BoolIr::And(xs) => xs.iter().fold(valid, |acc, x| acc & self.boolean(x, i)),
            BoolIr::Or(xs) => xs.iter().fold(0, |acc, x| acc | self.boolean(x, i)),
            BoolIr::Xor(a, b) => self.boolean(a, i) ^ self.boolean(b, i),
            BoolIr::Ite(c, a, b) => {
                let c = self.boolean(c, i);
                (c & self.boolean(a, i)) | (!c & self.boolean(b, i))
            }
        };
        self.bools.insert((key(b), i), v);
        v
    }

    fn atom(&mut self, b: &BoolIr, i: usize) -> V {
        if i >= self.lanes.depth {
            return V { t: 0, f: 0 };
        }
        let k = self.known[i];
        if k == 0 {
            return V { t: 0, f: 0 };
        }
        let v = self.boolean(b, i);
        V { t: k & v, f: k & !v }
    }

    /// Matches of `s` starting at `x`; entry `k` is the match ending at
    /// cycle `x + k - 1` (entry 0 is the empty match).
    fn seq(&mut self, s: &SeqIr, x: usize) -> Rc<Vec<V>> {
        if let Some(v) = self.seqs.get(&(key(s), x)) {
            return v.clone();
        }
        let fv = self.fv;
        let out: Vec<V> = match s {
            SeqIr::Bool(b) => vec![fv, self.atom(b, x)],
            SeqIr::Concat { lhs, lo, hi, rhs } => {
                let l = self.seq(lhs, x);
                let mut res: Vec<V> = Vec::new();
                for (k1, lv) in l.iter().enumerate() {
                    if lv.t == 0 && lv.f == self.lanes.valid {
                        continue;
                    }
                    for d in *lo..=*hi {
                        let d = d as usize;
                        if d == 0 && k1 == 0 {
                            continue;
                        }
                        let rs = x + k1 + d - 1;
                        let r = self.seq(rhs, rs);
                        for (k2, rv) in r.iter().enumerate() {
                            if d == 0 && k2 == 0 {
                                continue;
                            }
                            let k = k1 + d + k2 - 1;
                            if res.len() <= k {
                                res.resize(k + 1, fv);
                            }
                            res[k] = res[k].or(lv.and(*rv));
                        }
                    }
                }
                if res.is_empty() {
                    res.push(fv);
                }
                res
            }
            SeqIr::Repeat { body, lo, hi } => {
                let mut res: Vec<V> = vec![fv];
                for n in *lo..=*hi {
                    let p = self.power(body, n, x);
                    if res.len() < p.len() {
                        res.resize(p.len(), fv);
                    }
                    for (k, v) in p.iter().enumerate() {
                        res[k] = res[k].or(*v);
                    }
                }
                res
            }
            SeqIr::Throughout { cond, body } => {
                let m = self.seq(body, x);
                let mut acc = self.tv;
                let mut res = Vec::with_capacity(m.len());
                for (k, v) in m.iter().enumerate() {
                    if k > 0 {
                        acc = acc.and(self.atom(cond, x + k - 1));
                    }
                    res.push(v.and(acc));
                }
                res
            }
            SeqIr::Within { inner, outer } => {
                let o = self.seq(outer, x);
                let mut c = vec![fv; o.len()];
                for t1 in x..x + o.len() {
                    let inn = self.seq(inner, t1);
                    for (k1, v) in inn.iter().enumerate() {
                        let k = t1 - x + k1;
                        if k < c.len() {
                            c[k] = c[k].or(*v);
                        }
                    }
                }
                let mut acc = fv;
                o.iter()
                    .zip(c)
                    .map(|(ov, cv)| {
                        acc = acc.or(cv);
                        ov.and(acc)
                    })
                    .collect()
            }
            SeqIr::Intersect(a, b) => {
                let (a, b) = (self.seq(a, x), self.seq(b, x));
                a.iter().zip(b.iter()).map(|(p, q)| p.and(*q)).collect()
            }
            SeqIr::And(a, b) => {
                let (a, b) = (self.seq(a, x), self.seq(b, x));
                let mut res = vec![fv; a.len().max(b.len())];
                for (k1, p) in a.iter().enumerate() {
                    for (k2, q) in b.iter().enumerate() {
                        let k = k1.max(k2);
                        res[k] = res[k].or(p.and(*q));
                    }
                }
                res
            }
            SeqIr::Or(a, b) => {
                let (a, b) = (self.seq(a, x), self.seq(b, x));
                let mut res = vec![fv; a.len().max(b.len())];
                for (k, v) in a.iter().enumerate() {
                    res[k] = res[k].or(*v);
                }
                for (k, v) in b.iter().enumerate() {
                    res[k] = res[k].or(*v);
                }
                res
            }
        };
        let out = Rc::new(out);
        self.seqs.insert((key(s), x), out.clone());
        out
    }

    /// `body` repeated exactly `n` times back to back.
    fn power(&mut self, body: &SeqIr, n: u32, x: usize) -> Rc<Vec<V>> {
        if n == 0 {
            return Rc::new(vec![self.tv]);
        }
        if let Some(v) = self.reps.get(&(key(body), n, x)) {
            return v.clone();
        }
        let b = self.seq(body, x);
        let mut res = vec![self.fv];
        for (k1, bv) in b.iter().enumerate() {
            if bv.t == 0 && bv.f == self.lanes.valid {
                continue;
            }
            let rest = self.power(body, n - 1, x + k1);
            for (k2, rv) in rest.iter().enumerate() {
                let k = k1 + k2;
                if res.len() <= k {
                    res.resize(k + 1, self.fv);
                }
                res[k] = res[k].or(bv.and(*rv));
            }
        }
        let res = Rc::new(res);
        self.reps.insert((key(body), n, x), res.clone());
        res
    }

    fn prop(&mut self, p: &PropIr, x: usize) -> V {
        if let Some(v) = self.props.get(&(key(p), x)) {
            return *v;
        }
        let v = match p {
            PropIr::Seq(s) => {
                let m = self.seq(s, x);
                m.iter().skip(1).fold(self.fv, |acc, v| acc.or(*v))
            }
            PropIr::Implication {
                antecedent,
                nonoverlap,
                consequent,
            } => {
                let a = self.seq(antecedent, x);
                let mut acc = self.tv;
                for (k, av) in a.iter().enumerate().skip(1) {
                    if av.t == 0 && av.f == self.lanes.valid {
                        continue;
                    }
                    let c = self.prop(consequent, x + k - 1 + usize::from(*nonoverlap));
                    acc = acc.and(av.not().or(c));
                }
                acc
            }
            PropIr::Not(q) => self.prop(q, x).not(),
            PropIr::And(a, b) => self.prop(a, x).and(self.prop(b, x)),
            PropIr::Or(a, b) => self.prop(a, x).or(self.prop(b, x)),
        };
        self.props.insert((key(p), x), v);
        v
    }
}

/// Lanes on which `l` is violated at some start cycle.
pub fn violated_lanes(l: &Lowered, lanes: &Lanes<'_>) -> u64 {
    let mut ev = Eval::new(lanes);
    let mut bad = 0;
    for t in 0..lanes.depth {
        if let Some(abort) = &l.abort {
            // the attempt started at t stops reading atoms once abort fires
            ev.seqs.clear();
            ev.reps.clear();
            ev.props.clear();
            let mut live = lanes.valid;
            for i in 0..lanes.depth {
                if i < t {
                    ev.known[i] = 0;
                } else {
                    live &= !ev.boolean(abort, i);
                    ev.known[i] = live;
                }
            }
        }
        bad |= ev.prop(&l.body, t).f;
    }
    bad & lanes.valid
}

/// Whether `l` holds on `trace`. Signals missing from the trace read as 0.
pub fn eval_property(l: &Lowered, trace: &TraceAssignment) -> bool {
    let names: Vec<&String> = trace.signals.keys().collect();
    let index: HashMap<String, usize> = names.iter().enumerate().map(|(i, n)| ((*n).clone(), i)).collect();
    let masks: Vec<Vec<u64>> = names
        .iter()
        .map(|n| {
            let v = &trace.signals[*n];
            (0..trace.depth).map(|c| u64::from(v.get(c).copied().unwrap_or(false))).collect()
        })
        .collect();
    let lanes = Lanes {
        depth: trace.depth,
        valid: 1,
        index: &index,
        masks: &masks,
    };
    violated_lanes(l, &lanes) == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pec::lower::lower;
    use crate::syntax::parse;

    fn holds(src: &str, trace: &TraceAssignment) -> bool {
        eval_property(&lower(&parse(src).unwrap()).unwrap(), trace)
    }

    fn tr(depth: usize, sigs: &[(&str, &str)]) -> TraceAssignment {
        let mut t = TraceAssignment::new(depth);
        for (n, bits) in sigs {
            let v: Vec<bool> = bits.chars().map(|c| c == '1').collect();
            t.set(n, &v);
        }
        t
    }

    #[test]
    fn implication_basics() {
        assert!(holds("a |-> b", &tr(3, &[("a", "111"), ("b", "111")])));
        assert!(!holds("a |-> b", &tr(3, &[("a", "100"), ("b", "011")])));
        assert!(holds("a |-> b", &tr(3, &[("a", "000"), ("b", "010")])));
        assert!(!holds("a |=> b", &tr(3, &[("a", "100"), ("b", "100")])));
        // the obligation at cycle 3 is beyond the bound
        assert!(holds("a |=> b", &tr(3, &[("a", "001"), ("b", "000")])));
    }

    #[test]
    fn sampled_at_cycle_zero() {
        assert!(holds("a |-> $rose(a)", &tr(1, &[("a", "1")])));
        assert!(!holds("a |-> $stable(a)", &tr(1, &[("a", "1")])));
        assert!(!holds("$past(a)", &tr(2, &[("a", "11")])));
    }

    #[test]
    fn ranged_delay() {
        let src = "req |-> ##[1:2] ack";
        assert!(holds(src, &tr(4, &[("req", "1000"), ("ack", "0010")])));
        assert!(!holds(src, &tr(4, &[("req", "1000"), ("ack", "0001")])));
    }

    #[test]
    fn sequence_operators() {
        assert!(holds("s |-> (a throughout (b ##1 c))", &tr(3, &[("s", "100"), ("a", "110"), ("b", "100"), ("c", "010")])));
        assert!(!holds("s |-> (a throughout (b ##1 c))", &tr(3, &[("s", "100"), ("a", "100"), ("b", "100"), ("c", "010")])));
        assert!(holds("s |-> (b within (a[*3]))", &tr(4, &[("s", "1000"), ("a", "1110"), ("b", "0100")])));
        assert!(!holds("s |-> (b within (a[*3]))", &tr(4, &[("s", "1000"), ("a", "1110"), ("b", "0001")])));
        assert!(!holds("s |-> ((a ##1 b) intersect (c[*1]))", &tr(3, &[("s", "100"), ("a", "111"), ("b", "111"), ("c", "111")])));
        assert!(holds("s |-> (a[*2] and b)", &tr(3, &[("s", "100"), ("a", "110"), ("b", "100")])));
    }

    #[test]
    fn disable_iff_cancels_pending_attempt() {
        let src = "disable iff (rst) a |=> b";
        assert!(holds(src, &tr(3, &[("a", "100"), ("b", "000"), ("rst", "010")])));
        assert!(!holds(src, &tr(3, &[("a", "100"), ("b", "000"), ("rst", "001")])));
    }

    #[test]
    fn lanes_agree_with_single_traces() {
        let l = lower(&parse("a ##1 b |-> ##[0:1] (a || !b)").unwrap()).unwrap();
        let index: HashMap<String, usize> = [("a".to_string(), 0), ("b".to_string(), 1)].into();
        // 3 cycles, 2 signals: all 64 traces in one word
        let mut masks = vec![vec![0u64; 3]; 2];
        for lane in 0..64u64 {
            for s in 0..2 {
                for c in 0..3 {
                    if lane >> (s * 3 + c) & 1 == 1 {
                        masks[s][c] |= 1 << lane;
                    }
                }
            }
        }
        let lanes = Lanes {
            depth: 3,
            valid: u64::MAX,
            index: &index,
            masks: &masks,
        };
        let bad = violated_lanes(&l, &lanes);
        for lane in 0..64u64 {
            let mut t = TraceAssignment::new(3);
            for (s, n) in ["a", "b"].iter().enumerate() {
                let v: Vec<bool> = (0..3).map(|c| lane >> (s * 3 + c) & 1 == 1).collect();
                t.set(n, &v);
            }
            assert_eq!(eval_property(&l, &t), bad >> lane & 1 == 0, "lane {lane}");
        }
    }
}
