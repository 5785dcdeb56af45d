//! From the parsed tree to the checked form.
//!
//! Clocking events collapse onto one global tick, `disable iff` becomes an
//! explicit abort condition, fixed delays become shifted cycle indices and
//! `$onehot`/`$onehot0` expand into predicates over the listed bits.

use std::collections::BTreeSet;

use super::ir::{BoolIr, Lowered, PropIr, SeqIr};
use super::{Unsupported, UnsupportedReason};
use crate::syntax::{
    BinaryOp, Count, CycleRange, Edge, ImplicationKind, Node, NodeClass, ReductionKind, RepeatKind,
    SampledKind, Select, SeqOp, UnaryOp, Upper,
};

/// Delay and repetition counts above this are refused.
pub const MAX_COUNT: u64 = 1024;

fn unsupported(detail: impl Into<String>) -> Unsupported {
    Unsupported {
        reason: UnsupportedReason::UnsupportedFn,
        detail: detail.into(),
    }
}

/// Reasons visible on the tree before lowering, strongest first.
fn scan_reasons(ast: &Node) -> Option<Unsupported> {
    let mut found: BTreeSet<UnsupportedReason> = BTreeSet::new();
    let mut clocks: BTreeSet<(String, &'static str)> = BTreeSet::new();
    ast.walk(&mut |n| match n {
        Node::Liveness { .. } => {
            found.insert(UnsupportedReason::Liveness);
        }
        Node::Clocked { edge, clock, .. } => {
            let e = match edge {
                Edge::Pos => "posedge",
                Edge::Neg => "negedge",
                Edge::Any => "edge",
            };
            clocks.insert((clock.flattened(), e));
        }
        Node::Delay { range, .. } if range.hi == Upper::Unbounded => {
            found.insert(UnsupportedReason::UnboundedRange);
        }
        Node::Repeat { kind, range, .. } => {
            if range.hi == Upper::Unbounded {
                found.insert(UnsupportedReason::UnboundedRange);
            }
            if *kind != RepeatKind::Consecutive {
                found.insert(UnsupportedReason::GotoRepeat);
            }
        }
        _ => {}
    });
    if clocks.len() > 1 {
        found.insert(UnsupportedReason::MultiClock);
    }
    found.into_iter().next().map(|reason| Unsupported {
        reason,
        detail: reason.as_str().to_string(),
    })
}

pub fn lower(ast: &Node) -> Result<Lowered, Unsupported> {
    if let Some(u) = scan_reasons(ast) {
        return Err(u);
    }
    let mut node = ast;
    let mut abort = None;
    loop {
        match node {
            Node::Labeled { body, .. } | Node::Clocked { body, .. } => node = body,
            Node::DisableIff { cond, body } if abort.is_none() => {
                abort = Some(lower_bool(cond)?);
                node = body;
            }
            _ => break,
        }
    }
    Ok(Lowered {
        abort,
        body: lower_prop(node)?,
    })
}

fn is_property(n: &Node) -> bool {
    n.class() == NodeClass::Property
}

fn lower_prop(n: &Node) -> Result<PropIr, Unsupported> {
    Ok(match n {
        Node::Clocked { body, .. } | Node::Labeled { body, .. } => lower_prop(body)?,
        Node::PropNot(p) => PropIr::Not(Box::new(lower_prop(p)?)),
        Node::Implication {
            kind,
            antecedent,
            consequent,
        } => PropIr::Implication {
            antecedent: lower_seq(antecedent)?,
            nonoverlap: *kind == ImplicationKind::NonOverlap,
            consequent: Box::new(lower_prop(consequent)?),
        },
        Node::SeqBinop {
            kind: kind @ (SeqOp::And | SeqOp::Or),
            lhs,
            rhs,
        } if is_property(lhs) || is_property(rhs) => {
            let (a, b) = (Box::new(lower_prop(lhs)?), Box::new(lower_prop(rhs)?));
            if *kind == SeqOp::And {
                PropIr::And(a, b)
            } else {
                PropIr::Or(a, b)
            }
        }
        Node::DisableIff { .. } => return Err(unsupported("nested disable iff")),
        Node::Liveness { kind, .. } => {
            return Err(Unsupported {
                reason: UnsupportedReason::Liveness,
                detail: kind.keyword().to_string(),
            })
        }
        other => PropIr::Seq(lower_seq(other)?),
    })
}

fn count(c: &Count) -> Result<u32, Unsupported> {
    match c {
        Count::Const(n) if *n <= MAX_COUNT => Ok(*n as u32),
        Count::Const(n) => Err(unsupported(format!("count {n} exceeds {MAX_COUNT}"))),
        Count::Expr(e) => Err(unsupported(format!("symbolic count {e}"))),
    }
}

fn bounds(r: &CycleRange) -> Result<(u32, u32), Unsupported> {
    let lo = count(&r.lo)?;
    let hi = match &r.hi {
        Upper::Bounded(c) => count(c)?,
        Upper::Unbounded => {
            return Err(Unsupported {
                reason: UnsupportedReason::UnboundedRange,
                detail: "$ bound".into(),
            })
        }
    };
    Ok((lo, hi))
}

fn lower_seq(n: &Node) -> Result<SeqIr, Unsupported> {
    Ok(match n {
        Node::Clocked { body, .. } => lower_seq(body)?,
        Node::Delay { range, lhs, rhs } => {
            let (lo, hi) = bounds(range)?;
            let lhs = match lhs {
                Some(l) => lower_seq(l)?,
                None => SeqIr::Bool(BoolIr::Const(true)),
            };
            SeqIr::Concat {
                lhs: Box::new(lhs),
                lo,
                hi,
                rhs: Box::new(lower_seq(rhs)?),
            }
        }
        Node::Repeat { kind, range, body } => {
            if *kind != RepeatKind::Consecutive {
                return Err(Unsupported {
                    reason: UnsupportedReason::GotoRepeat,
                    detail: "nonconsecutive or goto repetition".into(),
                });
            }
            let (lo, hi) = bounds(range)?;
            SeqIr::Repeat {
                body: Box::new(lower_seq(body)?),
                lo,
                hi,
            }
        }
        Node::SeqBinop { kind, lhs, rhs } => {
            if *kind == SeqOp::Throughout {
                return Ok(SeqIr::Throughout {
                    cond: lower_bool(lhs)?,
                    body: Box::new(lower_seq(rhs)?),
                });
            }
            let (a, b) = (Box::new(lower_seq(lhs)?), Box::new(lower_seq(rhs)?));
            match kind {
                SeqOp::Within => SeqIr::Within { inner: a, outer: b },
                SeqOp::Intersect => SeqIr::Intersect(a, b),
                SeqOp::And => SeqIr::And(a, b),
                SeqOp::Or => SeqIr::Or(a, b),
                SeqOp::Throughout => unreachable!(),
            }
        }
        other if other.class() == NodeClass::Expr => SeqIr::Bool(lower_bool(other)?),
        other => return Err(unsupported(format!("property operator inside a sequence: {other}"))),
    })
}

fn var_name(n: &Node) -> Result<String, Unsupported> {
    let Node::Signal(id) = n else {
        unreachable!("var_name on a non-signal")
    };
    let mut name = id.flattened();
    for sel in id.trailing_selects() {
        let lit = |x: &Node| match x {
            Node::Literal(l) => Ok(l.value),
            other => Err(unsupported(format!("non-constant select {other}"))),
        };
        match sel {
            Select::Index(i) => name.push_str(&format!("[{}]", lit(i)?)),
            Select::Range(a, b) => name.push_str(&format!("[{}:{}]", lit(a)?, lit(b)?)),
        }
    }
    Ok(name)
}

/// Bits of a concatenation, most significant first.
fn bits(n: &Node) -> Result<Vec<BoolIr>, Unsupported> {
    match n {
        Node::Concat(items) => {
            let mut out = Vec::new();
            for i in items {
                out.extend(bits(i)?);
            }
            Ok(out)
        }
        Node::Replicate { count: c, body } => {
            let times = match c.as_ref() {
                Node::Literal(l) if l.value <= MAX_COUNT => l.value,
                other => return Err(unsupported(format!("replication count {other}"))),
            };
            let mut one = Vec::new();
            for b in body {
                one.extend(bits(b)?);
            }
            Ok((0..times).flat_map(|_| one.clone()).collect())
        }
        other => Ok(vec![lower_bool(other)?]),
    }
}

pub fn onehot(bits: &[BoolIr]) -> BoolIr {
    match bits {
        [] => BoolIr::Const(false),
        [b] => b.clone(),
        [a, b] => BoolIr::xor(a.clone(), b.clone()),
        _ => BoolIr::Or(
            (0..bits.len())
                .map(|i| {
                    BoolIr::And(
                        bits.iter()
                            .enumerate()
                            .map(|(j, b)| if i == j { b.clone() } else { b.clone().not() })
                            .collect(),
                    )
                })
                .collect(),
        ),
    }
}

pub fn onehot0(bits: &[BoolIr]) -> BoolIr {
    let mut terms = Vec::new();
    for i in 0..bits.len() {
        for j in i + 1..bits.len() {
            terms.push(BoolIr::And(vec![bits[i].clone(), bits[j].clone()]).not());
        }
    }
    match terms.len() {
        0 => BoolIr::Const(true),
        1 => terms.pop().expect("one term"),
        _ => BoolIr::And(terms),
    }
}

fn lower_bool(n: &Node) -> Result<BoolIr, Unsupported> {
    use BinaryOp::*;
    Ok(match n {
        Node::Signal(_) => BoolIr::Var(var_name(n)?),
        Node::Literal(l) => BoolIr::Const(l.value % 2 == 1),
        Node::Unary { op, arg } => {
            let x = lower_bool(arg)?;
            match op {
                UnaryOp::LogNot | UnaryOp::BitNot | UnaryOp::RedNand | UnaryOp::RedNor | UnaryOp::RedXnor => {
                    x.not()
                }
                UnaryOp::Neg | UnaryOp::Plus | UnaryOp::RedAnd | UnaryOp::RedOr | UnaryOp::RedXor => x,
            }
        }
        Node::Binary { op, lhs, rhs } => {
            let (a, b) = (lower_bool(lhs)?, lower_bool(rhs)?);
            match op {
                LogAnd | BitAnd | Mul => BoolIr::And(vec![a, b]),
                LogOr | BitOr => BoolIr::Or(vec![a, b]),
                BitXor | Neq | CaseNeq | WildNeq | Add | Sub => BoolIr::xor(a, b),
                BitXnor | Eq | CaseEq | WildEq | LogEquiv => BoolIr::xor(a, b).not(),
                LogImplies | Le => BoolIr::Or(vec![a.not(), b]),
                Ge => BoolIr::Or(vec![a, b.not()]),
                Lt => BoolIr::And(vec![a.not(), b]),
                Gt => BoolIr::And(vec![a, b.not()]),
                Shl | Shr | AShl | AShr | Div | Mod | Pow => {
                    return Err(unsupported(format!("operator {}", op.symbol())))
                }
            }
        }
        Node::Ternary { cond, then, els } => BoolIr::Ite(
            Box::new(lower_bool(cond)?),
            Box::new(lower_bool(then)?),
            Box::new(lower_bool(els)?),
        ),
        Node::Concat(_) | Node::Replicate { .. } => bits(n)?
            .pop()
            .unwrap_or(BoolIr::Const(false)),
        Node::Sampled { kind, arg, depth } => {
            if let Some(d) = depth {
                if !matches!(d.as_ref(), Node::Literal(l) if l.value == 1) || *kind != SampledKind::Past {
                    return Err(unsupported(format!("${}(_, {d})", kind.name())));
                }
            }
            let x = lower_bool(arg)?;
            let past = BoolIr::Past(Box::new(x.clone()));
            match kind {
                SampledKind::Past => past,
                SampledKind::Rose => BoolIr::And(vec![x, past.not()]),
                SampledKind::Fell => BoolIr::And(vec![x.not(), past]),
                SampledKind::Stable => BoolIr::xor(x, past).not(),
                SampledKind::Changed => BoolIr::xor(x, past),
            }
        }
        Node::Reduction { kind, arg } => {
            let b = bits(arg)?;
            match kind {
                ReductionKind::Onehot => onehot(&b),
                ReductionKind::Onehot0 => onehot0(&b),
            }
        }
        Node::Call { name, .. } => return Err(unsupported(format!("function {}", name.flattened()))),
        Node::SysCall { name, .. } => return Err(unsupported(format!("system function {name}"))),
        other => return Err(unsupported(format!("not a boolean expression: {other}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn low(s: &str) -> Result<Lowered, Unsupported> {
        lower(&parse(s).unwrap())
    }

    fn reason(s: &str) -> UnsupportedReason {
        low(s).unwrap_err().reason
    }

    #[test]
    fn disable_iff_is_extracted() {
        let l = low("@(posedge clk) disable iff (rst) (a |-> b)").unwrap();
        assert_eq!(l.abort, Some(BoolIr::Var("rst".into())));
        assert_eq!(l.to_string(), "accept_on(rst) (a |-> b)");
        assert!(!l.signals().contains("clk"));
    }

    #[test]
    fn onehot_expands() {
        assert_eq!(low("$onehot({a,b})").unwrap().to_string(), "(a ^ b)");
        assert_eq!(low("$onehot0({a,b})").unwrap().to_string(), "!(a && b)");
        assert_eq!(
            low("$onehot({a,b,c})").unwrap().to_string(),
            "((a && !b && !c) || (!a && b && !c) || (!a && !b && c))"
        );
    }

    #[test]
    fn reasons() {
        use UnsupportedReason::*;
        assert_eq!(reason("s_eventually a"), Liveness);
        assert_eq!(reason("a |-> ##[1:$] b"), UnboundedRange);
        assert_eq!(reason("a[=2] |-> b"), GotoRepeat);
        assert_eq!(reason("a[->1] |-> b"), GotoRepeat);
        assert_eq!(reason("@(posedge c1) a |-> @(posedge c2) b"), MultiClock);
        assert_eq!(reason("$past(a, 2)"), UnsupportedFn);
        assert_eq!(reason("f(a)"), UnsupportedFn);
        assert_eq!(reason("a |-> ##[1:N] b"), UnsupportedFn);
        // liveness outranks the rest
        assert_eq!(reason("a[=2] |-> s_eventually b ##[1:$] c"), Liveness);
    }

    #[test]
    fn one_bit_arithmetic() {
        assert_eq!(low("cnt == 4'd3").unwrap().to_string(), "!(cnt ^ 1'b1)");
        assert_eq!(low("a[0] && b[3:2]").unwrap().to_string(), "(a[0] && b[3:2])");
        assert_eq!(low("$rose(a)").unwrap().to_string(), "(a && !$past(a))");
    }
}
