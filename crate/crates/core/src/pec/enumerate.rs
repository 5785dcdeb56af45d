//! Exhaustive search over every trace of the bound.
//!
//! Traces are visited in lexicographic order of the signal-major bit string
//! `s0@0 s0@1 .. s0@K-1 s1@0 ..`, 64 at a time, so the reported
//! counterexample is the smallest failing trace in that order.

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use super::eval::{violated_lanes, Lanes, TraceAssignment};
use super::ir::Lowered;
use super::{BmcOutcome, CheckConfig, CheckError};

/// Batches between deadline checks (1024 traces).
const DEADLINE_STRIDE: u64 = 16;

struct Space {
    names: Vec<String>,
    index: HashMap<String, usize>,
    depth: usize,
    bits: u32,
}

impl Space {
    fn new(props: &[&Lowered], cfg: &CheckConfig) -> Result<Space, CheckError> {
        let mut set = BTreeSet::new();
        for p in props {
            set.extend(p.signals());
        }
        let names: Vec<String> = set.into_iter().collect();
        let bits = names.len() * cfg.depth;
        if bits > cfg.max_enum_bits as usize {
            return Err(CheckError::Capacity {
                signals: names.len(),
                depth: cfg.depth,
                max: cfg.max_enum_bits,
            });
        }
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        Ok(Space {
            names,
            index,
            depth: cfg.depth,
            bits: bits as u32,
        })
    }

    /// Weight of the bit for `signal` at `cycle` in the trace index.
    fn weight(&self, signal: usize, cycle: usize) -> u32 {
        self.bits - 1 - (signal * self.depth + cycle) as u32
    }

    fn fill(&self, batch: u64, masks: &mut [Vec<u64>]) {
        for (s, row) in masks.iter_mut().enumerate() {
            for (c, m) in row.iter_mut().enumerate() {
                let w = self.weight(s, c);
                *m = if w < 6 {
                    lane_pattern(w)
                } else if batch >> (w - 6) & 1 == 1 {
                    u64::MAX
                } else {
                    0
                };
            }
        }
    }

    fn trace(&self, index: u64) -> TraceAssignment {
        let mut t = TraceAssignment::new(self.depth);
        for (s, name) in self.names.iter().enumerate() {
            let v: Vec<bool> = (0..self.depth).map(|c| index >> self.weight(s, c) & 1 == 1).collect();
            t.set(name, &v);
        }
        t
    }
}

/// Lanes whose index has bit `w` set.
fn lane_pattern(w: u32) -> u64 {
    (0..64u64).filter(|l| l >> w & 1 == 1).fold(0, |m, l| m | 1 << l)
}

/// Searches for `[assume a, assert b]` and `[assume b, assert a]` failures
/// in one pass; `want` selects which directions are searched.
fn search(a: &Lowered, b: &Lowered, want: [bool; 2], cfg: &CheckConfig, deadline: Instant) -> Result<[BmcOutcome; 2], CheckError> {
    let space = Space::new(&[a, b], cfg)?;
    let (batches, valid) = if space.bits >= 6 {
        (1u64 << (space.bits - 6), u64::MAX)
    } else {
        (1, (1u64 << (1u32 << space.bits)).wrapping_sub(1))
    };
    let mut masks = vec![vec![0u64; space.depth]; space.names.len()];
    let mut found: [Option<TraceAssignment>; 2] = [None, None];
    for batch in 0..batches {
        if batch % DEADLINE_STRIDE == DEADLINE_STRIDE - 1 && Instant::now() > deadline {
            let mut done = |i: usize| match found[i].take() {
                Some(t) => BmcOutcome::Fail(t),
                None if want[i] => BmcOutcome::Timeout,
                None => BmcOutcome::Pass,
            };
            return Ok([done(0), done(1)]);
        }
        space.fill(batch, &mut masks);
        let lanes = Lanes {
            depth: space.depth,
            valid,
            index: &space.index,
            masks: &masks,
        };
        let bad_a = violated_lanes(a, &lanes);
        let bad_b = violated_lanes(b, &lanes);
        let fails = [!bad_a & bad_b & valid, !bad_b & bad_a & valid];
        for i in 0..2 {
            if want[i] && found[i].is_none() && fails[i] != 0 {
                let lane = u64::from(fails[i].trailing_zeros());
                found[i] = Some(space.trace(batch * 64 + lane));
            }
        }
        if (0..2).all(|i| !want[i] || found[i].is_some()) {
            break;
        }
    }
    let [f0, f1] = found;
    let out = |f: Option<TraceAssignment>| f.map_or(BmcOutcome::Pass, BmcOutcome::Fail);
    Ok([out(f0), out(f1)])
}

pub fn bmc(assumed: &Lowered, asserted: &Lowered, cfg: &CheckConfig, deadline: Instant) -> Result<BmcOutcome, CheckError> {
    let [fwd, _] = search(assumed, asserted, [true, false], cfg, deadline)?;
    Ok(fwd)
}

/// Both directions for a candidate/reference pair.
pub fn both(cand: &Lowered, refr: &Lowered, cfg: &CheckConfig, deadline: Instant) -> Result<(BmcOutcome, BmcOutcome), CheckError> {
    let [fwd, bwd] = search(cand, refr, [true, true], cfg, deadline)?;
    Ok((fwd, bwd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pec::eval::eval_property;
    use crate::pec::lower::lower;
    use crate::syntax::parse;
    use std::time::Duration;

    fn low(s: &str) -> Lowered {
        lower(&parse(s).unwrap()).unwrap()
    }

    /// Reference search: one trace at a time through the public evaluator.
    fn naive(a: &Lowered, b: &Lowered, depth: usize) -> Option<TraceAssignment> {
        let mut names: BTreeSet<String> = a.signals();
        names.extend(b.signals());
        let names: Vec<_> = names.into_iter().collect();
        let bits = names.len() * depth;
        for idx in 0..1u64 << bits {
            let mut t = TraceAssignment::new(depth);
            for (s, n) in names.iter().enumerate() {
                let v: Vec<bool> = (0..depth).map(|c| idx >> (bits - 1 - s * depth - c) & 1 == 1).collect();
                t.set(n, &v);
            }
            if eval_property(a, &t) && !eval_property(b, &t) {
                return Some(t);
            }
        }
        None
    }

    #[test]
    fn matches_single_trace_search() {
        let cfg = CheckConfig::default();
        let far = Instant::now() + Duration::from_secs(60);
        let pairs = [
            ("a |-> b", "a |=> b"),
            ("a ##1 b", "a && b"),
            ("a[*2] |-> b", "a |-> b"),
            ("$rose(a) |-> b", "a |-> b"),
            ("a", "1"),
        ];
        for depth in 1..=4 {
            for (p, q) in pairs {
                let (a, b) = (low(p), low(q));
                let c = CheckConfig { depth, ..cfg };
                let got = bmc(&a, &b, &c, far).unwrap();
                let want = naive(&a, &b, depth).map_or(BmcOutcome::Pass, BmcOutcome::Fail);
                assert_eq!(got, want, "{p} vs {q} at depth {depth}");
            }
        }
    }

    #[test]
    fn capacity_is_enforced() {
        let c = CheckConfig::default().with_depth(11);
        let e = bmc(&low("a"), &low("b"), &c, Instant::now()).unwrap_err();
        assert!(matches!(e, CheckError::Capacity { signals: 2, depth: 11, max: 20 }));
    }

    #[test]
    fn constant_properties() {
        let c = CheckConfig::default().with_depth(2);
        let far = Instant::now() + Duration::from_secs(5);
        assert_eq!(bmc(&low("1"), &low("0"), &c, far).unwrap(), BmcOutcome::Fail(TraceAssignment::new(2)));
        assert_eq!(bmc(&low("0"), &low("1"), &c, far).unwrap(), BmcOutcome::Pass);
    }
}
