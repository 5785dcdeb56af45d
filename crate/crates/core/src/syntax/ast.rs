//! Typed tree for the supported assertion fragment.

use std::fmt;

/// Path segment of a (possibly hierarchical) signal reference.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub name: String,
    pub selects: Vec<Select>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Select {
    Index(Node),
    Range(Node, Node),
}

impl Select {
    pub fn is_constant(&self) -> bool {
        match self {
            Select::Index(n) => n.is_constant(),
            Select::Range(a, b) => a.is_constant() && b.is_constant(),
        }
    }
}

/// A referenced name: `a`, `pkg::a`, `` `A ``, `a.b[0].c[3]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Identifier {
    pub package: Option<String>,
    pub macro_ref: bool,
    pub segments: Vec<Segment>,
}

impl Identifier {
    pub fn simple(name: impl Into<String>) -> Self {
        Self {
            package: None,
            macro_ref: false,
            segments: vec![Segment {
                name: name.into(),
                selects: Vec::new(),
            }],
        }
    }

    pub fn is_hierarchical(&self) -> bool {
        self.segments.len() > 1
    }

    /// Selects applied to the last segment (bit/part selects of the signal).
    pub fn trailing_selects(&self) -> &[Select] {
        &self.segments.last().expect("identifier has a segment").selects
    }

    /// Name with hierarchy folded into underscores and the package and macro
    /// markers dropped: `a.b[0].c[3]` becomes `a_b_0_c`. Selects on the last
    /// segment are not part of the name.
    pub fn flattened(&self) -> String {
        let mut out = String::new();
        let last = self.segments.len() - 1;
        for (i, seg) in self.segments.iter().enumerate() {
            if i > 0 {
                out.push('_');
            }
            out.push_str(seg.name.trim_start_matches('\\'));
            if i < last {
                for sel in &seg.selects {
                    out.push('_');
                    out.push_str(&flatten_select(sel));
                }
            }
        }
        out
    }
}

fn flatten_select(sel: &Select) -> String {
    let raw = match sel {
        Select::Index(n) => n.to_string(),
        Select::Range(a, b) => format!("{a}_{b}"),
    };
    let mut out = String::new();
    for c in raw.chars() {
        if c.is_ascii_alphanumeric() || c == '_' {
            out.push(c);
        } else if !out.ends_with('_') && !c.is_whitespace() {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    /// Lexeme as written (`1`, `32'd4`, `'1`).
    pub text: String,
    pub value: u64,
}

impl Literal {
    pub fn from_value(value: u64) -> Self {
        Self {
            text: value.to_string(),
            value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    LogNot,
    BitNot,
    Neg,
    Plus,
    RedAnd,
    RedOr,
    RedXor,
    RedNand,
    RedNor,
    RedXnor,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::LogNot => "!",
            UnaryOp::BitNot => "~",
            UnaryOp::Neg => "-",
            UnaryOp::Plus => "+",
            UnaryOp::RedAnd => "&",
            UnaryOp::RedOr => "|",
            UnaryOp::RedXor => "^",
            UnaryOp::RedNand => "~&",
            UnaryOp::RedNor => "~|",
            UnaryOp::RedXnor => "~^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    LogImplies,
    LogEquiv,
    LogOr,
    LogAnd,
    BitOr,
    BitXor,
    BitXnor,
    BitAnd,
    Eq,
    Neq,
    CaseEq,
    CaseNeq,
    WildEq,
    WildNeq,
    Lt,
    Le,
    Gt,
    Ge,
    Shl,
    Shr,
    AShl,
    AShr,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        use BinaryOp::*;
        match self {
            LogImplies => "->",
            LogEquiv => "<->",
            LogOr => "||",
            LogAnd => "&&",
            BitOr => "|",
            BitXor => "^",
            BitXnor => "~^",
            BitAnd => "&",
            Eq => "==",
            Neq => "!=",
            CaseEq => "===",
            CaseNeq => "!==",
            WildEq => "==?",
            WildNeq => "!=?",
            Lt => "<",
            Le => "<=",
            Gt => ">",
            Ge => ">=",
            Shl => "<<",
            Shr => ">>",
            AShl => "<<<",
            AShr => ">>>",
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Mod => "%",
            Pow => "**",
        }
    }

    /// Binding strength inside expressions; larger binds tighter.
    pub fn precedence(self) -> u8 {
        use BinaryOp::*;
        match self {
            LogImplies | LogEquiv => 1,
            LogOr => 3,
            LogAnd => 4,
            BitOr => 5,
            BitXor | BitXnor => 6,
            BitAnd => 7,
            Eq | Neq | CaseEq | CaseNeq | WildEq | WildNeq => 8,
            Lt | Le | Gt | Ge => 9,
            Shl | Shr | AShl | AShr => 10,
            Add | Sub => 11,
            Mul | Div | Mod => 12,
            Pow => 13,
        }
    }

    pub fn right_assoc(self) -> bool {
        matches!(self, BinaryOp::LogImplies | BinaryOp::LogEquiv)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampledKind {
    Rose,
    Fell,
    Stable,
    Changed,
    Past,
}

impl SampledKind {
    pub fn name(self) -> &'static str {
        match self {
            SampledKind::Rose => "$rose",
            SampledKind::Fell => "$fell",
            SampledKind::Stable => "$stable",
            SampledKind::Changed => "$changed",
            SampledKind::Past => "$past",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "$rose" => SampledKind::Rose,
            "$fell" => SampledKind::Fell,
            "$stable" => SampledKind::Stable,
            "$changed" => SampledKind::Changed,
            "$past" => SampledKind::Past,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReductionKind {
    Onehot,
    Onehot0,
}

impl ReductionKind {
    pub fn name(self) -> &'static str {
        match self {
            ReductionKind::Onehot => "$onehot",
            ReductionKind::Onehot0 => "$onehot0",
        }
    }
}

/// Cycle count in a delay or repetition range.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Count {
    Const(u64),
    /// Symbolic count such as a parameter name.
    Expr(Box<Node>),
}

impl Count {
    pub fn as_const(&self) -> Option<u64> {
        match self {
            Count::Const(n) => Some(*n),
            Count::Expr(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Upper {
    Bounded(Count),
    /// `$`
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleRange {
    pub lo: Count,
    pub hi: Upper,
}

impl CycleRange {
    pub fn exact(n: u64) -> Self {
        Self {
            lo: Count::Const(n),
            hi: Upper::Bounded(Count::Const(n)),
        }
    }

    pub fn bounded(lo: u64, hi: u64) -> Self {
        Self {
            lo: Count::Const(lo),
            hi: Upper::Bounded(Count::Const(hi)),
        }
    }

    pub fn is_single(&self) -> bool {
        matches!(&self.hi, Upper::Bounded(h) if *h == self.lo)
    }

    /// Both bounds as constants, or `None` for symbolic or unbounded ranges.
    pub fn const_bounds(&self) -> Option<(u64, u64)> {
        match (&self.lo, &self.hi) {
            (Count::Const(lo), Upper::Bounded(Count::Const(hi))) => Some((*lo, *hi)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RepeatKind {
    /// `[*a:b]`
    Consecutive,
    /// `[=a:b]`
    Nonconsecutive,
    /// `[->a:b]`
    Goto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImplicationKind {
    Overlap,
    NonOverlap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeqOp {
    Throughout,
    Within,
    Intersect,
    And,
    Or,
}

impl SeqOp {
    pub fn keyword(self) -> &'static str {
        match self {
            SeqOp::Throughout => "throughout",
            SeqOp::Within => "within",
            SeqOp::Intersect => "intersect",
            SeqOp::And => "and",
            SeqOp::Or => "or",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LivenessKind {
    SEventually,
    SUntil,
    SUntilWith,
    SAlways,
    UntilWith,
    Until,
    Eventually,
}

impl LivenessKind {
    pub fn keyword(self) -> &'static str {
        match self {
            LivenessKind::SEventually => "s_eventually",
            LivenessKind::SUntil => "s_until",
            LivenessKind::SUntilWith => "s_until_with",
            LivenessKind::SAlways => "s_always",
            LivenessKind::UntilWith => "until_with",
            LivenessKind::Until => "until",
            LivenessKind::Eventually => "eventually",
        }
    }

    pub fn is_binary(self) -> bool {
        matches!(
            self,
            LivenessKind::SUntil
                | LivenessKind::SUntilWith
                | LivenessKind::UntilWith
                | LivenessKind::Until
        )
    }

    pub fn from_keyword(kw: &str) -> Option<Self> {
        Some(match kw {
            "s_eventually" => LivenessKind::SEventually,
            "s_until" => LivenessKind::SUntil,
            "s_until_with" => LivenessKind::SUntilWith,
            "s_always" => LivenessKind::SAlways,
            "until_with" => LivenessKind::UntilWith,
            "until" => LivenessKind::Until,
            "eventually" => LivenessKind::Eventually,
            _ => return None,
        })
    }

    pub const ALL: [LivenessKind; 7] = [
        LivenessKind::SEventually,
        LivenessKind::SUntil,
        LivenessKind::SUntilWith,
        LivenessKind::SAlways,
        LivenessKind::UntilWith,
        LivenessKind::Until,
        LivenessKind::Eventually,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Edge {
    Pos,
    Neg,
    Any,
}

/// One node of a parsed assertion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Unary {
        op: UnaryOp,
        arg: Box<Node>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Node>,
        rhs: Box<Node>,
    },
    Ternary {
        cond: Box<Node>,
        then: Box<Node>,
        els: Box<Node>,
    },
    Signal(Identifier),
    Literal(Literal),
    Concat(Vec<Node>),
    Replicate {
        count: Box<Node>,
        body: Vec<Node>,
    },
    /// User function call `f(a, b)`.
    Call {
        name: Identifier,
        args: Vec<Node>,
    },
    /// System function other than the sampled and reduction families.
    SysCall {
        name: String,
        args: Vec<Node>,
    },
    Sampled {
        kind: SampledKind,
        arg: Box<Node>,
        /// Second argument of `$past(x, n)`.
        depth: Option<Box<Node>>,
    },
    Reduction {
        kind: ReductionKind,
        arg: Box<Node>,
    },
    /// `lhs ##[lo:hi] rhs`; a leading delay has no `lhs`.
    Delay {
        range: CycleRange,
        lhs: Option<Box<Node>>,
        rhs: Box<Node>,
    },
    Repeat {
        kind: RepeatKind,
        range: CycleRange,
        body: Box<Node>,
    },
    Implication {
        kind: ImplicationKind,
        antecedent: Box<Node>,
        consequent: Box<Node>,
    },
    SeqBinop {
        kind: SeqOp,
        lhs: Box<Node>,
        rhs: Box<Node>,
    },
    /// Property negation `not p`.
    PropNot(Box<Node>),
    Liveness {
        kind: LivenessKind,
        operands: Vec<Node>,
    },
    DisableIff {
        cond: Box<Node>,
        body: Box<Node>,
    },
    Clocked {
        edge: Edge,
        clock: Identifier,
        body: Box<Node>,
    },
    Labeled {
        label: String,
        body: Box<Node>,
    },
}

/// Coarse typing used to reject ill-formed operator nesting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeClass {
    Expr,
    Sequence,
    Property,
}

impl Node {
    pub fn signal(name: &str) -> Node {
        Node::Signal(Identifier::simple(name))
    }

    pub fn lit(value: u64) -> Node {
        Node::Literal(Literal::from_value(value))
    }

    pub fn class(&self) -> NodeClass {
        match self {
            Node::Unary { .. }
            | Node::Binary { .. }
            | Node::Ternary { .. }
            | Node::Signal(_)
            | Node::Literal(_)
            | Node::Concat(_)
            | Node::Replicate { .. }
            | Node::Call { .. }
            | Node::SysCall { .. }
            | Node::Sampled { .. }
            | Node::Reduction { .. } => NodeClass::Expr,
            Node::Delay { .. } | Node::Repeat { .. } => NodeClass::Sequence,
            Node::SeqBinop { lhs, rhs, .. } => {
                if lhs.class() == NodeClass::Property || rhs.class() == NodeClass::Property {
                    NodeClass::Property
                } else {
                    NodeClass::Sequence
                }
            }
            Node::Implication { .. }
            | Node::PropNot(_)
            | Node::Liveness { .. }
            | Node::DisableIff { .. }
            | Node::Clocked { .. }
            | Node::Labeled { .. } => NodeClass::Property,
        }
    }

    pub fn is_sequence_like(&self) -> bool {
        self.class() != NodeClass::Property
    }

    /// True for literals and expressions built only from literals.
    pub fn is_constant(&self) -> bool {
        match self {
            Node::Literal(_) => true,
            Node::Unary { arg, .. } => arg.is_constant(),
            Node::Binary { lhs, rhs, .. } => lhs.is_constant() && rhs.is_constant(),
            Node::Ternary { cond, then, els } => {
                cond.is_constant() && then.is_constant() && els.is_constant()
            }
            _ => false,
        }
    }

    /// Direct children in source order, including select and count subtrees.
    pub fn children(&self) -> Vec<&Node> {
        let mut out: Vec<&Node> = Vec::new();
        fn push_ident<'a>(out: &mut Vec<&'a Node>, id: &'a Identifier) {
            for seg in &id.segments {
                for sel in &seg.selects {
                    match sel {
                        Select::Index(n) => out.push(n),
                        Select::Range(a, b) => {
                            out.push(a);
                            out.push(b);
                        }
                    }
                }
            }
        }
        fn push_range<'a>(out: &mut Vec<&'a Node>, r: &'a CycleRange) {
            if let Count::Expr(e) = &r.lo {
                out.push(e);
            }
            if let Upper::Bounded(Count::Expr(e)) = &r.hi {
                out.push(e);
            }
        }
        match self {
            Node::Unary { arg, .. } => out.push(arg),
            Node::Binary { lhs, rhs, .. } => {
                out.push(lhs);
                out.push(rhs);
            }
            Node::Ternary { cond, then, els } => {
                out.push(cond);
                out.push(then);
                out.push(els);
            }
            Node::Signal(id) => push_ident(&mut out, id),
            Node::Literal(_) => {}
            Node::Concat(items) => out.extend(items.iter()),
            Node::Replicate { count, body } => {
                out.push(count);
                out.extend(body.iter());
            }
            Node::Call { name, args } => {
                push_ident(&mut out, name);
                out.extend(args.iter());
            }
            Node::SysCall { args, .. } => out.extend(args.iter()),
            Node::Sampled { arg, depth, .. } => {
                out.push(arg);
                if let Some(d) = depth {
                    out.push(d);
                }
            }
            Node::Reduction { arg, .. } => out.push(arg),
            Node::Delay { range, lhs, rhs } => {
                if let Some(l) = lhs {
                    out.push(l);
                }
                push_range(&mut out, range);
                out.push(rhs);
            }
            Node::Repeat { range, body, .. } => {
                out.push(body);
                push_range(&mut out, range);
            }
            Node::Implication {
                antecedent,
                consequent,
                ..
            } => {
                out.push(antecedent);
                out.push(consequent);
            }
            Node::SeqBinop { lhs, rhs, .. } => {
                out.push(lhs);
                out.push(rhs);
            }
            Node::PropNot(p) => out.push(p),
            Node::Liveness { operands, .. } => out.extend(operands.iter()),
            Node::DisableIff { cond, body } => {
                out.push(cond);
                out.push(body);
            }
            Node::Clocked { clock, body, .. } => {
                push_ident(&mut out, clock);
                out.push(body);
            }
            Node::Labeled { body, .. } => out.push(body),
        }
        out
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Node)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    /// Rebuilds the tree bottom-up, rewriting every signal reference with `f`.
    pub fn map_signals(&self, f: &mut dyn FnMut(&Identifier) -> Identifier) -> Node {
        fn map_ident(id: &Identifier, f: &mut dyn FnMut(&Identifier) -> Identifier) -> Identifier {
            let mapped = Identifier {
                package: id.package.clone(),
                macro_ref: id.macro_ref,
                segments: id
                    .segments
                    .iter()
                    .map(|s| Segment {
                        name: s.name.clone(),
                        selects: s.selects.iter().map(|sel| map_select(sel, f)).collect(),
                    })
                    .collect(),
            };
            f(&mapped)
        }
        fn map_select(sel: &Select, f: &mut dyn FnMut(&Identifier) -> Identifier) -> Select {
            match sel {
                Select::Index(n) => Select::Index(n.map_signals(f)),
                Select::Range(a, b) => Select::Range(a.map_signals(f), b.map_signals(f)),
            }
        }
        fn map_count(c: &Count, f: &mut dyn FnMut(&Identifier) -> Identifier) -> Count {
            match c {
                Count::Const(n) => Count::Const(*n),
                Count::Expr(e) => Count::Expr(Box::new(e.map_signals(f))),
            }
        }
        fn map_range(r: &CycleRange, f: &mut dyn FnMut(&Identifier) -> Identifier) -> CycleRange {
            CycleRange {
                lo: map_count(&r.lo, f),
                hi: match &r.hi {
                    Upper::Bounded(c) => Upper::Bounded(map_count(c, f)),
                    Upper::Unbounded => Upper::Unbounded,
                },
            }
        }
        let b = |n: &Node, f: &mut dyn FnMut(&Identifier) -> Identifier| Box::new(n.map_signals(f));
        match self {
            Node::Unary { op, arg } => Node::Unary {
                op: *op,
                arg: b(arg, f),
            },
            Node::Binary { op, lhs, rhs } => Node::Binary {
                op: *op,
                lhs: b(lhs, f),
                rhs: b(rhs, f),
            },
            Node::Ternary { cond, then, els } => Node::Ternary {
                cond: b(cond, f),
                then: b(then, f),
                els: b(els, f),
            },
            Node::Signal(id) => Node::Signal(map_ident(id, f)),
            Node::Literal(l) => Node::Literal(l.clone()),
            Node::Concat(items) => Node::Concat(items.iter().map(|n| n.map_signals(f)).collect()),
            Node::Replicate { count, body } => Node::Replicate {
                count: b(count, f),
                body: body.iter().map(|n| n.map_signals(f)).collect(),
            },
            Node::Call { name, args } => Node::Call {
                name: map_ident(name, f),
                args: args.iter().map(|n| n.map_signals(f)).collect(),
            },
            Node::SysCall { name, args } => Node::SysCall {
                name: name.clone(),
                args: args.iter().map(|n| n.map_signals(f)).collect(),
            },
            Node::Sampled { kind, arg, depth } => Node::Sampled {
                kind: *kind,
                arg: b(arg, f),
                depth: depth.as_ref().map(|d| b(d, f)),
            },
            Node::Reduction { kind, arg } => Node::Reduction {
                kind: *kind,
                arg: b(arg, f),
            },
            Node::Delay { range, lhs, rhs } => Node::Delay {
                range: map_range(range, f),
                lhs: lhs.as_ref().map(|l| b(l, f)),
                rhs: b(rhs, f),
            },
            Node::Repeat { kind, range, body } => Node::Repeat {
                kind: *kind,
                range: map_range(range, f),
                body: b(body, f),
            },
            Node::Implication {
                kind,
                antecedent,
                consequent,
            } => Node::Implication {
                kind: *kind,
                antecedent: b(antecedent, f),
                consequent: b(consequent, f),
            },
            Node::SeqBinop { kind, lhs, rhs } => Node::SeqBinop {
                kind: *kind,
                lhs: b(lhs, f),
                rhs: b(rhs, f),
            },
            Node::PropNot(p) => Node::PropNot(b(p, f)),
            Node::Liveness { kind, operands } => Node::Liveness {
                kind: *kind,
                operands: operands.iter().map(|n| n.map_signals(f)).collect(),
            },
            Node::DisableIff { cond, body } => Node::DisableIff {
                cond: b(cond, f),
                body: b(body, f),
            },
            Node::Clocked { edge, clock, body } => Node::Clocked {
                edge: *edge,
                clock: map_ident(clock, f),
                body: b(body, f),
            },
            Node::Labeled { label, body } => Node::Labeled {
                label: label.clone(),
                body: b(body, f),
            },
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::render::render(self))
    }
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::render::render_identifier(self))
    }
}
