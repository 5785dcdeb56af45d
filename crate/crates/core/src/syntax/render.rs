//! Canonical pretty-printer. Output re-parses to the same tree.

use super::ast::*;

// Property binding levels, mirroring the parser (larger binds tighter).
const L_PREFIX: u8 = 0;
const L_IMPL: u8 = 1;
const L_UNTIL: u8 = 2;
const L_OR: u8 = 3;
const L_AND: u8 = 4;
const L_NOT: u8 = 5;
const L_INTERSECT: u8 = 6;
const L_WITHIN: u8 = 7;
const L_THROUGHOUT: u8 = 8;
const L_DELAY: u8 = 9;
const L_REPEAT: u8 = 10;
const L_PRIMARY: u8 = 11;

// Expression levels.
const E_IMPLIES: u8 = 1;
const E_COND: u8 = 2;
const E_UNARY: u8 = 14;
const E_PRIMARY: u8 = 15;

pub fn render(node: &Node) -> String {
    prop(node, L_PREFIX)
}

pub fn render_identifier(id: &Identifier) -> String {
    let mut out = String::new();
    if id.macro_ref {
        out.push('`');
    }
    if let Some(pkg) = &id.package {
        out.push_str(pkg);
        out.push_str("::");
    }
    for (i, seg) in id.segments.iter().enumerate() {
        if i > 0 {
            out.push('.');
        }
        out.push_str(&seg.name);
        if seg.name.starts_with('\\') {
            // escaped identifiers end at whitespace
            out.push(' ');
        }
        for sel in &seg.selects {
            match sel {
                Select::Index(n) => out.push_str(&format!("[{}]", expr(n, 0))),
                Select::Range(a, b) => out.push_str(&format!("[{}:{}]", expr(a, 0), expr(b, 0))),
            }
        }
    }
    out
}

fn prop_level(node: &Node) -> u8 {
    match node {
        Node::Clocked { .. } | Node::DisableIff { .. } | Node::Labeled { .. } => L_PREFIX,
        Node::Liveness { kind, .. } if !kind.is_binary() => L_PREFIX,
        Node::Liveness { .. } => L_UNTIL,
        Node::Implication { .. } => L_IMPL,
        Node::SeqBinop { kind, .. } => match kind {
            SeqOp::Or => L_OR,
            SeqOp::And => L_AND,
            SeqOp::Intersect => L_INTERSECT,
            SeqOp::Within => L_WITHIN,
            SeqOp::Throughout => L_THROUGHOUT,
        },
        Node::PropNot(_) => L_NOT,
        Node::Delay { .. } => L_DELAY,
        Node::Repeat { .. } => L_REPEAT,
        _ => L_PRIMARY,
    }
}

fn paren(s: String, wrap: bool) -> String {
    if wrap {
        format!("({s})")
    } else {
        s
    }
}

fn prop(node: &Node, min: u8) -> String {
    let level = prop_level(node);
    let body = match node {
        Node::Clocked { edge, clock, body } => {
            let edge = match edge {
                Edge::Pos => "posedge ",
                Edge::Neg => "negedge ",
                Edge::Any => "",
            };
            format!("@({edge}{}) {}", render_identifier(clock), prop(body, L_PREFIX))
        }
        Node::DisableIff { cond, body } => {
            format!("disable iff ({}) {}", expr(cond, 0), prop(body, L_PREFIX))
        }
        Node::Labeled { label, body } => format!("{label}: {}", prop(body, L_PREFIX)),
        Node::Liveness { kind, operands } if !kind.is_binary() => {
            format!("{} {}", kind.keyword(), prop(&operands[0], L_PREFIX))
        }
        Node::Liveness { kind, operands } => format!(
            "{} {} {}",
            prop(&operands[0], L_OR),
            kind.keyword(),
            prop(&operands[1], L_UNTIL)
        ),
        Node::Implication {
            kind,
            antecedent,
            consequent,
        } => {
            let op = match kind {
                ImplicationKind::Overlap => "|->",
                ImplicationKind::NonOverlap => "|=>",
            };
            format!("{} {op} {}", prop(antecedent, L_UNTIL), prop(consequent, L_PREFIX))
        }
        Node::SeqBinop { kind, lhs, rhs } => {
            let (l, r) = match kind {
                SeqOp::Throughout => (L_DELAY, L_THROUGHOUT),
                _ => (level, level + 1),
            };
            format!("{} {} {}", prop(lhs, l), kind.keyword(), prop(rhs, r))
        }
        Node::PropNot(arg) => format!("not {}", prop(arg, L_NOT)),
        Node::Delay { range, lhs, rhs } => {
            let d = delay_text(range);
            match lhs {
                Some(l) => format!("{} {d} {}", prop(l, L_DELAY), prop(rhs, L_REPEAT)),
                None => format!("{d} {}", prop(rhs, L_REPEAT)),
            }
        }
        Node::Repeat { kind, range, body } => {
            let open = match kind {
                RepeatKind::Consecutive => "[*",
                RepeatKind::Nonconsecutive => "[=",
                RepeatKind::Goto => "[->",
            };
            let b = match &**body {
                Node::Unary { .. } | Node::Binary { .. } | Node::Ternary { .. } => {
                    format!("({})", expr(body, 0))
                }
                other => prop(other, L_PRIMARY),
            };
            format!("{b}{open}{}]", range_text(range))
        }
        other => expr(other, 0),
    };
    paren(body, level < min)
}

fn count_text(c: &Count) -> String {
    match c {
        Count::Const(n) => n.to_string(),
        Count::Expr(e) => match &**e {
            Node::Signal(_) | Node::Literal(_) => expr(e, 0),
            other => format!("({})", expr(other, 0)),
        },
    }
}

fn range_text(r: &CycleRange) -> String {
    match &r.hi {
        Upper::Unbounded => format!("{}:$", count_text(&r.lo)),
        Upper::Bounded(h) if *h == r.lo => count_text(h),
        Upper::Bounded(h) => format!("{}:{}", count_text(&r.lo), count_text(h)),
    }
}

fn delay_text(r: &CycleRange) -> String {
    if r.is_single() {
        match &r.lo {
            Count::Const(n) => format!("##{n}"),
            c => format!("##{}", count_text(c)),
        }
    } else {
        format!("##[{}]", range_text(r))
    }
}

fn expr_level(node: &Node) -> u8 {
    match node {
        Node::Binary { op, .. } => match op {
            BinaryOp::LogImplies | BinaryOp::LogEquiv => E_IMPLIES,
            other => other.precedence(),
        },
        Node::Ternary { .. } => E_COND,
        Node::Unary { .. } => E_UNARY,
        _ => E_PRIMARY,
    }
}

fn list(items: &[Node]) -> String {
    items.iter().map(|n| expr(n, 0)).collect::<Vec<_>>().join(", ")
}

fn expr(node: &Node, min: u8) -> String {
    let level = expr_level(node);
    let body = match node {
        Node::Binary { op, lhs, rhs } => {
            let p = expr_level(node);
            let (l, r) = if op.right_assoc() { (p + 1, p) } else { (p, p + 1) };
            format!("{} {} {}", expr(lhs, l), op.symbol(), expr(rhs, r))
        }
        Node::Ternary { cond, then, els } => format!(
            "{} ? {} : {}",
            expr(cond, E_COND + 1),
            expr(then, 0),
            expr(els, E_COND)
        ),
        Node::Unary { op, arg } => {
            let inner = if matches!(**arg, Node::Unary { .. }) {
                format!("({})", expr(arg, 0))
            } else {
                expr(arg, E_UNARY)
            };
            format!("{}{inner}", op.symbol())
        }
        Node::Signal(id) => render_identifier(id),
        Node::Literal(l) => l.text.clone(),
        Node::Concat(items) => format!("{{{}}}", list(items)),
        Node::Replicate { count, body } => format!("{{{}{{{}}}}}", expr(count, E_PRIMARY), list(body)),
        Node::Call { name, args } => format!("{}({})", render_identifier(name), list(args)),
        Node::SysCall { name, args } => {
            if args.is_empty() {
                name.clone()
            } else {
                format!("{name}({})", list(args))
            }
        }
        Node::Sampled { kind, arg, depth } => match depth {
            Some(d) => format!("{}({}, {})", kind.name(), expr(arg, 0), expr(d, 0)),
            None => format!("{}({})", kind.name(), expr(arg, 0)),
        },
        Node::Reduction { kind, arg } => format!("{}({})", kind.name(), expr(arg, 0)),
        // Temporal nodes never sit inside expressions in a well-formed tree.
        other => return format!("({})", prop(other, L_PREFIX)),
    };
    paren(body, level < min)
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn rt(src: &str) -> String {
        render(&parse(src).unwrap())
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(rt("a|->b"), "a |-> b");
        assert_eq!(rt("a ##[1:3]b"), "a ##[1:3] b");
        assert_eq!(rt("disable iff(rst) a |=> b"), "disable iff (rst) a |=> b");
        assert_eq!(rt("@(posedge clk) a"), "@(posedge clk) a");
    }

    #[test]
    fn parens_kept_where_needed() {
        assert_eq!(rt("(a || b) && c"), "(a || b) && c");
        assert_eq!(rt("a ##1 (b ##1 c)"), "a ##1 (b ##1 c)");
        assert_eq!(rt("(a |-> b) and c"), "(a |-> b) and c");
        assert_eq!(rt("(a && b)[*2]"), "(a && b)[*2]");
    }

    #[test]
    fn round_trip_samples() {
        for src in [
            "L: @(negedge c) disable iff (r) x ##[0:$] y |=> z[->1] ##1 w[=2:3]",
            "a ? b : c -> d",
            "$past(a, 2) == {b, {2{c}}}",
            "en throughout (a ##1 b) within c intersect d",
            "not (a and b) or s_eventually c",
            "a until b s_until_with c",
            "##1 a ##2 b",
            "top.u[1].s[3:0] != pkg::K",
            "!(~a)",
        ] {
            let a = parse(src).unwrap();
            let text = render(&a);
            let b = parse(&text).unwrap_or_else(|e| panic!("{text}: {e}"));
            assert_eq!(a, b, "{src} -> {text}");
        }
    }
}
