//! Lowered form checked by both backends.
//!
//! Signals are one bit wide. Boolean leaves are evaluated two-valued at a
//! cycle; sequences and properties are evaluated three-valued over a bounded
//! trace.

use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolIr {
    Const(bool),
    Var(String),
    /// Value one cycle earlier; zero at cycle 0.
    Past(Box<BoolIr>),
    Not(Box<BoolIr>),
    And(Vec<BoolIr>),
    Or(Vec<BoolIr>),
    Xor(Box<BoolIr>, Box<BoolIr>),
    Ite(Box<BoolIr>, Box<BoolIr>, Box<BoolIr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SeqIr {
    Bool(BoolIr),
    /// `lhs ##[lo:hi] rhs`; a zero delay fuses the two ends.
    Concat {
        lhs: Box<SeqIr>,
        lo: u32,
        hi: u32,
        rhs: Box<SeqIr>,
    },
    /// Consecutive repetition `body[*lo:hi]`.
    Repeat { body: Box<SeqIr>, lo: u32, hi: u32 },
    Throughout { cond: BoolIr, body: Box<SeqIr> },
    Within { inner: Box<SeqIr>, outer: Box<SeqIr> },
    Intersect(Box<SeqIr>, Box<SeqIr>),
    And(Box<SeqIr>, Box<SeqIr>),
    Or(Box<SeqIr>, Box<SeqIr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PropIr {
    Seq(SeqIr),
    Implication {
        antecedent: SeqIr,
        nonoverlap: bool,
        consequent: Box<PropIr>,
    },
    Not(Box<PropIr>),
    And(Box<PropIr>, Box<PropIr>),
    Or(Box<PropIr>, Box<PropIr>),
}

/// A property with its abort condition pulled out of `disable iff`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lowered {
    pub abort: Option<BoolIr>,
    pub body: PropIr,
}

impl BoolIr {
    pub fn not(self) -> BoolIr {
        match self {
            BoolIr::Const(b) => BoolIr::Const(!b),
            BoolIr::Not(x) => *x,
            x => BoolIr::Not(Box::new(x)),
        }
    }

    pub fn xor(a: BoolIr, b: BoolIr) -> BoolIr {
        BoolIr::Xor(Box::new(a), Box::new(b))
    }

    fn collect(&self, out: &mut BTreeSet<String>) {
        match self {
            BoolIr::Const(_) => {}
            BoolIr::Var(v) => {
                out.insert(v.clone());
            }
            BoolIr::Past(x) | BoolIr::Not(x) => x.collect(out),
            BoolIr::And(xs) | BoolIr::Or(xs) => xs.iter().for_each(|x| x.collect(out)),
            BoolIr::Xor(a, b) => {
                a.collect(out);
                b.collect(out);
            }
            BoolIr::Ite(c, a, b) => {
                c.collect(out);
                a.collect(out);
                b.collect(out);
            }
        }
    }
}

impl SeqIr {
    fn collect(&self, out: &mut BTreeSet<String>) {
        match self {
            SeqIr::Bool(b) => b.collect(out),
            SeqIr::Concat { lhs, rhs, .. } => {
                lhs.collect(out);
                rhs.collect(out);
            }
            SeqIr::Repeat { body, .. } => body.collect(out),
            SeqIr::Throughout { cond, body } => {
                cond.collect(out);
                body.collect(out);
            }
            SeqIr::Within { inner: a, outer: b }
            | SeqIr::Intersect(a, b)
            | SeqIr::And(a, b)
            | SeqIr::Or(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }
}

impl PropIr {
    fn collect(&self, out: &mut BTreeSet<String>) {
        match self {
            PropIr::Seq(s) => s.collect(out),
            PropIr::Implication {
                antecedent,
                consequent,
                ..
            } => {
                antecedent.collect(out);
                consequent.collect(out);
            }
            PropIr::Not(p) => p.collect(out),
            PropIr::And(a, b) | PropIr::Or(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }
}

impl Lowered {
    /// Free one-bit signals, sorted.
    pub fn signals(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        if let Some(a) = &self.abort {
            a.collect(&mut out);
        }
        self.body.collect(&mut out);
        out
    }
}

impl fmt::Display for BoolIr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, xs: &[BoolIr], op: &str| -> fmt::Result {
            write!(f, "(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")
        };
        match self {
            BoolIr::Const(b) => write!(f, "1'b{}", u8::from(*b)),
            BoolIr::Var(v) => write!(f, "{v}"),
            BoolIr::Past(x) => write!(f, "$past({x})"),
            BoolIr::Not(x) => write!(f, "!{x}"),
            BoolIr::And(xs) => join(f, xs, "&&"),
            BoolIr::Or(xs) => join(f, xs, "||"),
            BoolIr::Xor(a, b) => write!(f, "({a} ^ {b})"),
            BoolIr::Ite(c, a, b) => write!(f, "({c} ? {a} : {b})"),
        }
    }
}

impl fmt::Display for SeqIr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeqIr::Bool(b) => write!(f, "{b}"),
            SeqIr::Concat { lhs, lo, hi, rhs } if lo == hi => write!(f, "({lhs} ##{lo} {rhs})"),
            SeqIr::Concat { lhs, lo, hi, rhs } => write!(f, "({lhs} ##[{lo}:{hi}] {rhs})"),
            SeqIr::Repeat { body, lo, hi } if lo == hi => write!(f, "{body}[*{lo}]"),
            SeqIr::Repeat { body, lo, hi } => write!(f, "{body}[*{lo}:{hi}]"),
            SeqIr::Throughout { cond, body } => write!(f, "({cond} throughout {body})"),
            SeqIr::Within { inner, outer } => write!(f, "({inner} within {outer})"),
            SeqIr::Intersect(a, b) => write!(f, "({a} intersect {b})"),
            SeqIr::And(a, b) => write!(f, "({a} and {b})"),
            SeqIr::Or(a, b) => write!(f, "({a} or {b})"),
        }
    }
}

impl fmt::Display for PropIr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropIr::Seq(s) => write!(f, "{s}"),
            PropIr::Implication {
                antecedent,
                nonoverlap,
                consequent,
            } => {
                let op = if *nonoverlap { "|=>" } else { "|->" };
                write!(f, "({antecedent} {op} {consequent})")
            }
            PropIr::Not(p) => write!(f, "(not {p})"),
            PropIr::And(a, b) => write!(f, "({a} and {b})"),
            PropIr::Or(a, b) => write!(f, "({a} or {b})"),
        }
    }
}

impl fmt::Display for Lowered {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.abort {
            Some(a) => write!(f, "accept_on({a}) {}", self.body),
            None => write!(f, "{}", self.body),
        }
    }
}
