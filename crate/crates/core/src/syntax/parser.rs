//! Recursive-descent parser for the assertion fragment.
//!
//! Property levels, loosest first: clocking / `disable iff` prefixes,
//! implication, the until family, `or`, `and`, `not` and unary liveness,
//! `intersect`, `within`, `throughout`, `##`, repetition postfixes, and
//! finally plain expressions, which use Verilog operator precedence.

use thiserror::Error;

use super::ast::*;
use super::lexer::{tokenize, LexError, Token, TokenKind};

const MAX_DEPTH: usize = 256;

/// Words that never name a signal inside an assertion.
const RESERVED: &[&str] = &[
    "and",
    "or",
    "not",
    "throughout",
    "within",
    "intersect",
    "until",
    "until_with",
    "s_until",
    "s_until_with",
    "eventually",
    "s_eventually",
    "s_always",
    "always",
    "nexttime",
    "s_nexttime",
    "disable",
    "iff",
    "posedge",
    "negedge",
    "edge",
    "property",
    "endproperty",
    "sequence",
    "endsequence",
    "assert",
    "assume",
    "cover",
    "else",
    "implies",
    "first_match",
];

pub fn is_reserved(word: &str) -> bool {
    RESERVED.contains(&word)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {position}: expected {expected}")]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
}

impl From<LexError> for ParseError {
    fn from(e: LexError) -> Self {
        ParseError {
            position: e.position,
            expected: format!("valid token ({})", e.message),
        }
    }
}

/// Parses one assertion, optionally wrapped in a label and an
/// `assert|assume|cover property (...)` directive with an action block.
pub fn parse(src: &str) -> Result<Node, ParseError> {
    let tokens: Vec<Token> = tokenize(src)?
        .into_iter()
        .filter(|t| !t.kind.is_trivia())
        .collect();
    let mut p = Parser {
        tokens,
        pos: 0,
        depth: 0,
        eof: src.len(),
    };
    let node = p.parse_assertion()?;
    while p.eat(&TokenKind::Semi) {}
    if p.pos < p.tokens.len() {
        return Err(p.error("end of input"));
    }
    Ok(node)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    depth: usize,
    eof: usize,
}

impl Parser {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, off: usize) -> Option<&TokenKind> {
        self.tokens.get(self.pos + off).map(|t| &t.kind)
    }

    fn position(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|t| t.span.start)
            .unwrap_or(self.eof)
    }

    fn error(&self, expected: impl Into<String>) -> ParseError {
        ParseError {
            position: self.position(),
            expected: expected.into(),
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: &TokenKind) -> Result<(), ParseError> {
        if self.eat(kind) {
            Ok(())
        } else {
            Err(self.error(format!("'{kind}'")))
        }
    }

    fn at_kw(&self, kw: &str) -> bool {
        self.peek().and_then(TokenKind::ident) == Some(kw)
    }

    fn at_kw_off(&self, off: usize, kw: &str) -> bool {
        self.peek_at(off).and_then(TokenKind::ident) == Some(kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error("shallower nesting"));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    // ---- top level ------------------------------------------------------

    fn parse_assertion(&mut self) -> Result<Node, ParseError> {
        if let (Some(TokenKind::Ident(name)), Some(TokenKind::Colon)) = (self.peek(), self.peek_at(1)) {
            if !is_reserved(name) {
                let label = name.clone();
                self.pos += 2;
                let body = self.parse_assertion()?;
                return Ok(Node::Labeled {
                    label,
                    body: Box::new(body),
                });
            }
        }
        if self.at_directive() {
            return self.parse_directive();
        }
        self.parse_prop()
    }

    fn at_directive(&self) -> bool {
        let verb = ["assert", "assume", "cover"].iter().any(|k| self.at_kw(k));
        verb && (self.at_kw_off(1, "property") || self.peek_at(1) == Some(&TokenKind::LParen))
    }

    fn parse_directive(&mut self) -> Result<Node, ParseError> {
        self.pos += 1;
        self.eat_kw("property");
        self.expect(&TokenKind::LParen)?;
        self.enter()?;
        let body = if self.at_directive() {
            let inner = self.parse_directive()?;
            while self.eat(&TokenKind::Semi) {}
            inner
        } else {
            self.parse_prop()?
        };
        self.leave();
        self.expect(&TokenKind::RParen)?;
        self.skip_action_block();
        Ok(body)
    }

    /// Skips a pass/else action block up to its terminating `;`.
    fn skip_action_block(&mut self) {
        let mut nest = 0i32;
        while let Some(k) = self.peek() {
            match k {
                TokenKind::Semi if nest == 0 => return,
                TokenKind::RParen if nest == 0 => return,
                TokenKind::LParen | TokenKind::LBrace | TokenKind::LBracket => nest += 1,
                TokenKind::RParen | TokenKind::RBrace | TokenKind::RBracket => nest -= 1,
                TokenKind::Ident(w) if w == "begin" => nest += 1,
                TokenKind::Ident(w) if w == "end" => {
                    nest -= 1;
                    if nest == 0 {
                        self.pos += 1;
                        return;
                    }
                }
                _ => {}
            }
            self.pos += 1;
        }
    }

    // ---- properties -----------------------------------------------------

    fn parse_prop(&mut self) -> Result<Node, ParseError> {
        self.enter()?;
        let out = self.parse_prop_inner();
        self.leave();
        out
    }

    fn parse_prop_inner(&mut self) -> Result<Node, ParseError> {
        if self.peek() == Some(&TokenKind::At) {
            let (edge, clock) = self.parse_clocking_event()?;
            let body = self.parse_prop()?;
            return Ok(Node::Clocked {
                edge,
                clock,
                body: Box::new(body),
            });
        }
        if self.at_kw("disable") {
            self.pos += 1;
            if !self.eat_kw("iff") {
                return Err(self.error("'iff'"));
            }
            self.expect(&TokenKind::LParen)?;
            let cond = self.parse_expr()?;
            self.expect(&TokenKind::RParen)?;
            let body = self.parse_prop()?;
            return Ok(Node::DisableIff {
                cond: Box::new(cond),
                body: Box::new(body),
            });
        }
        self.parse_implication()
    }

    fn parse_clocking_event(&mut self) -> Result<(Edge, Identifier), ParseError> {
        self.expect(&TokenKind::At)?;
        self.expect(&TokenKind::LParen)?;
        let edge = if self.eat_kw("posedge") {
            Edge::Pos
        } else if self.eat_kw("negedge") {
            Edge::Neg
        } else {
            self.eat_kw("edge");
            Edge::Any
        };
        let clock = self.parse_identifier()?;
        self.expect(&TokenKind::RParen)?;
        Ok((edge, clock))
    }

    fn parse_implication(&mut self) -> Result<Node, ParseError> {
        let start = self.position();
        let lhs = self.parse_until()?;
        let kind = match self.peek() {
            Some(TokenKind::OverlapImpl) => ImplicationKind::Overlap,
            Some(TokenKind::NonOverlapImpl) => ImplicationKind::NonOverlap,
            _ => return Ok(lhs),
        };
        if !lhs.is_sequence_like() {
            return Err(ParseError {
                position: start,
                expected: "sequence before implication".into(),
            });
        }
        self.pos += 1;
        let rhs = self.parse_prop()?;
        Ok(Node::Implication {
            kind,
            antecedent: Box::new(lhs),
            consequent: Box::new(rhs),
        })
    }

    fn parse_until(&mut self) -> Result<Node, ParseError> {
        let lhs = self.parse_or()?;
        let kind = match self.peek().and_then(TokenKind::ident) {
            Some(w) => match LivenessKind::from_keyword(w) {
                Some(k) if k.is_binary() => k,
                _ => return Ok(lhs),
            },
            None => return Ok(lhs),
        };
        self.pos += 1;
        self.enter()?;
        let rhs = self.parse_until();
        self.leave();
        Ok(Node::Liveness {
            kind,
            operands: vec![lhs, rhs?],
        })
    }

    fn parse_or(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.parse_and()?;
        while self.eat_kw("or") {
            let rhs = self.parse_and()?;
            lhs = Node::SeqBinop {
                kind: SeqOp::Or,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.parse_not()?;
        while self.eat_kw("and") {
            let rhs = self.parse_not()?;
            lhs = Node::SeqBinop {
                kind: SeqOp::And,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn parse_not(&mut self) -> Result<Node, ParseError> {
        if self.eat_kw("not") {
            self.enter()?;
            let arg = self.parse_not();
            self.leave();
            return Ok(Node::PropNot(Box::new(arg?)));
        }
        if let Some(kind) = self
            .peek()
            .and_then(TokenKind::ident)
            .and_then(LivenessKind::from_keyword)
        {
            if !kind.is_binary() {
                self.pos += 1;
                let arg = self.parse_prop()?;
                return Ok(Node::Liveness {
                    kind,
                    operands: vec![arg],
                });
            }
        }
        self.parse_intersect()
    }

    fn seq_binop(&mut self, kind: SeqOp, lhs: Node, rhs: Node, at: usize) -> Result<Node, ParseError> {
        let ok = match kind {
            SeqOp::Throughout => lhs.class() == NodeClass::Expr && rhs.is_sequence_like(),
            SeqOp::Within | SeqOp::Intersect => lhs.is_sequence_like() && rhs.is_sequence_like(),
            SeqOp::And | SeqOp::Or => true,
        };
        if !ok {
            return Err(ParseError {
                position: at,
                expected: format!("sequence operands for '{}'", kind.keyword()),
            });
        }
        Ok(Node::SeqBinop {
            kind,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        })
    }

    fn parse_intersect(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.parse_within()?;
        loop {
            let at = self.position();
            if !self.eat_kw("intersect") {
                return Ok(lhs);
            }
            let rhs = self.parse_within()?;
            lhs = self.seq_binop(SeqOp::Intersect, lhs, rhs, at)?;
        }
    }

    fn parse_within(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.parse_throughout()?;
        loop {
            let at = self.position();
            if !self.eat_kw("within") {
                return Ok(lhs);
            }
            let rhs = self.parse_throughout()?;
            lhs = self.seq_binop(SeqOp::Within, lhs, rhs, at)?;
        }
    }

    fn parse_throughout(&mut self) -> Result<Node, ParseError> {
        let start = self.position();
        let lhs = self.parse_delay_seq()?;
        if !self.eat_kw("throughout") {
            return Ok(lhs);
        }
        self.enter()?;
        let rhs = self.parse_throughout();
        self.leave();
        self.seq_binop(SeqOp::Throughout, lhs, rhs?, start)
    }

    fn at_delay(&self) -> bool {
        matches!(
            self.peek(),
            Some(TokenKind::DelayConst(_) | TokenKind::DelayRange { .. } | TokenKind::HashHash)
        )
    }

    fn parse_delay_seq(&mut self) -> Result<Node, ParseError> {
        let mut node = if self.at_delay() {
            let range = self.parse_delay_range()?;
            let rhs = self.seq_operand()?;
            Node::Delay {
                range,
                lhs: None,
                rhs: Box::new(rhs),
            }
        } else {
            self.parse_repeat()?
        };
        while self.at_delay() {
            if !node.is_sequence_like() {
                return Err(self.error("sequence before '##'"));
            }
            let range = self.parse_delay_range()?;
            let rhs = self.seq_operand()?;
            node = Node::Delay {
                range,
                lhs: Some(Box::new(node)),
                rhs: Box::new(rhs),
            };
        }
        Ok(node)
    }

    fn seq_operand(&mut self) -> Result<Node, ParseError> {
        let at = self.position();
        let n = self.parse_repeat()?;
        if !n.is_sequence_like() {
            return Err(ParseError {
                position: at,
                expected: "sequence operand".into(),
            });
        }
        Ok(n)
    }

    fn parse_delay_range(&mut self) -> Result<CycleRange, ParseError> {
        let at = self.position();
        let kind = self.peek().cloned();
        self.pos += 1;
        let range = match kind {
            Some(TokenKind::DelayConst(n)) => CycleRange::exact(n),
            Some(TokenKind::DelayRange { lo, hi }) => CycleRange {
                lo: Count::Const(lo),
                hi: hi.map_or(Upper::Unbounded, |h| Upper::Bounded(Count::Const(h))),
            },
            Some(TokenKind::HashHash) => match self.peek() {
                Some(TokenKind::LBracket) => {
                    self.pos += 1;
                    let r = self.parse_range_body()?;
                    self.expect(&TokenKind::RBracket)?;
                    r
                }
                Some(TokenKind::RepStar) => {
                    self.pos += 1;
                    self.expect(&TokenKind::RBracket)?;
                    CycleRange {
                        lo: Count::Const(0),
                        hi: Upper::Unbounded,
                    }
                }
                Some(TokenKind::RepPlus) => {
                    self.pos += 1;
                    CycleRange {
                        lo: Count::Const(1),
                        hi: Upper::Unbounded,
                    }
                }
                _ => {
                    let e = self.parse_primary()?;
                    let c = count_of(e);
                    CycleRange {
                        lo: c.clone(),
                        hi: Upper::Bounded(c),
                    }
                }
            },
            _ => return Err(self.error("delay")),
        };
        check_range(&range, at)?;
        Ok(range)
    }

    /// `lo`, `lo:hi` or `lo:$` up to (not including) the closing bracket.
    fn parse_range_body(&mut self) -> Result<CycleRange, ParseError> {
        let lo = count_of(self.parse_cond()?);
        if !self.eat(&TokenKind::Colon) {
            return Ok(CycleRange {
                lo: lo.clone(),
                hi: Upper::Bounded(lo),
            });
        }
        if self.eat(&TokenKind::Dollar) {
            return Ok(CycleRange {
                lo,
                hi: Upper::Unbounded,
            });
        }
        let hi = count_of(self.parse_cond()?);
        Ok(CycleRange {
            lo,
            hi: Upper::Bounded(hi),
        })
    }

    fn parse_repeat(&mut self) -> Result<Node, ParseError> {
        let start = self.position();
        let mut node = self.parse_primary_seq()?;
        loop {
            let at = self.position();
            let (kind, range) = match self.peek() {
                Some(TokenKind::RepStar) => {
                    self.pos += 1;
                    if self.eat(&TokenKind::RBracket) {
                        (
                            RepeatKind::Consecutive,
                            CycleRange {
                                lo: Count::Const(0),
                                hi: Upper::Unbounded,
                            },
                        )
                    } else {
                        let r = self.parse_range_body()?;
                        self.expect(&TokenKind::RBracket)?;
                        (RepeatKind::Consecutive, r)
                    }
                }
                Some(TokenKind::RepPlus) => {
                    self.pos += 1;
                    (
                        RepeatKind::Consecutive,
                        CycleRange {
                            lo: Count::Const(1),
                            hi: Upper::Unbounded,
                        },
                    )
                }
                Some(TokenKind::RepEq) | Some(TokenKind::RepGoto) => {
                    let kind = if self.peek() == Some(&TokenKind::RepEq) {
                        RepeatKind::Nonconsecutive
                    } else {
                        RepeatKind::Goto
                    };
                    self.pos += 1;
                    let r = self.parse_range_body()?;
                    self.expect(&TokenKind::RBracket)?;
                    (kind, r)
                }
                _ => return Ok(node),
            };
            check_range(&range, at)?;
            let body_ok = match kind {
                RepeatKind::Consecutive => node.is_sequence_like(),
                _ => node.class() == NodeClass::Expr,
            };
            if !body_ok {
                return Err(ParseError {
                    position: start,
                    expected: "repeatable operand".into(),
                });
            }
            node = Node::Repeat {
                kind,
                range,
                body: Box::new(node),
            };
        }
    }

    fn parse_primary_seq(&mut self) -> Result<Node, ParseError> {
        self.enter()?;
        let out = self.parse_primary_seq_inner();
        self.leave();
        out
    }

    fn parse_primary_seq_inner(&mut self) -> Result<Node, ParseError> {
        if self.peek() != Some(&TokenKind::LParen) {
            return self.parse_expr();
        }
        let save = self.pos;
        if let Ok(e) = self.parse_expr() {
            return Ok(e);
        }
        self.pos = save;
        self.expect(&TokenKind::LParen)?;
        let inner = self.parse_prop()?;
        self.expect(&TokenKind::RParen)?;
        Ok(inner)
    }

    // ---- expressions ----------------------------------------------------

    fn parse_expr(&mut self) -> Result<Node, ParseError> {
        self.enter()?;
        let out = self.parse_expr_inner();
        self.leave();
        out
    }

    fn parse_expr_inner(&mut self) -> Result<Node, ParseError> {
        let lhs = self.parse_cond()?;
        let op = match self.peek() {
            Some(TokenKind::Arrow) => BinaryOp::LogImplies,
            Some(TokenKind::Equiv) => BinaryOp::LogEquiv,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.parse_expr()?;
        Ok(Node::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        })
    }

    fn parse_cond(&mut self) -> Result<Node, ParseError> {
        let cond = self.parse_binary(BinaryOp::LogOr.precedence())?;
        if !self.eat(&TokenKind::Question) {
            return Ok(cond);
        }
        let then = self.parse_expr()?;
        self.expect(&TokenKind::Colon)?;
        self.enter()?;
        let els = self.parse_cond();
        self.leave();
        Ok(Node::Ternary {
            cond: Box::new(cond),
            then: Box::new(then),
            els: Box::new(els?),
        })
    }

    fn peek_binary(&self) -> Option<BinaryOp> {
        use TokenKind as T;
        Some(match self.peek()? {
            T::PipePipe => BinaryOp::LogOr,
            T::AmpAmp => BinaryOp::LogAnd,
            T::Pipe => BinaryOp::BitOr,
            T::Caret => BinaryOp::BitXor,
            T::TildeCaret => BinaryOp::BitXnor,
            T::Amp => BinaryOp::BitAnd,
            T::EqEq => BinaryOp::Eq,
            T::Neq => BinaryOp::Neq,
            T::CaseEq => BinaryOp::CaseEq,
            T::CaseNeq => BinaryOp::CaseNeq,
            T::WildEq => BinaryOp::WildEq,
            T::WildNeq => BinaryOp::WildNeq,
            T::Lt => BinaryOp::Lt,
            T::Le => BinaryOp::Le,
            T::Gt => BinaryOp::Gt,
            T::Ge => BinaryOp::Ge,
            T::Shl => BinaryOp::Shl,
            T::Shr => BinaryOp::Shr,
            T::AShl => BinaryOp::AShl,
            T::AShr => BinaryOp::AShr,
            T::Plus => BinaryOp::Add,
            T::Minus => BinaryOp::Sub,
            T::Star => BinaryOp::Mul,
            T::Slash => BinaryOp::Div,
            T::Percent => BinaryOp::Mod,
            T::StarStar => BinaryOp::Pow,
            _ => return None,
        })
    }

    fn parse_binary(&mut self, min_prec: u8) -> Result<Node, ParseError> {
        let mut lhs = self.parse_unary()?;
        while let Some(op) = self.peek_binary() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let rhs = self.parse_binary(prec + 1)?;
            lhs = Node::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Node, ParseError> {
        use TokenKind as T;
        let op = match self.peek() {
            Some(T::Bang) => UnaryOp::LogNot,
            Some(T::Tilde) => UnaryOp::BitNot,
            Some(T::Minus) => UnaryOp::Neg,
            Some(T::Plus) => UnaryOp::Plus,
            Some(T::Amp) => UnaryOp::RedAnd,
            Some(T::Pipe) => UnaryOp::RedOr,
            Some(T::Caret) => UnaryOp::RedXor,
            Some(T::TildeAmp) => UnaryOp::RedNand,
            Some(T::TildePipe) => UnaryOp::RedNor,
            Some(T::TildeCaret) => UnaryOp::RedXnor,
            _ => return self.parse_primary(),
        };
        self.pos += 1;
        self.enter()?;
        let arg = self.parse_unary();
        self.leave();
        Ok(Node::Unary {
            op,
            arg: Box::new(arg?),
        })
    }

    fn parse_args(&mut self) -> Result<Vec<Node>, ParseError> {
        self.expect(&TokenKind::LParen)?;
        let mut args = Vec::new();
        if self.eat(&TokenKind::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.parse_expr()?);
            if self.eat(&TokenKind::Comma) {
                continue;
            }
            self.expect(&TokenKind::RParen)?;
            return Ok(args);
        }
    }

    fn parse_primary(&mut self) -> Result<Node, ParseError> {
        let at = self.position();
        match self.peek().cloned() {
            Some(TokenKind::Number { text, value }) => {
                self.pos += 1;
                if self.eat(&TokenKind::Apostrophe) {
                    return self.parse_cast_body();
                }
                Ok(Node::Literal(Literal { text, value }))
            }
            Some(TokenKind::LParen) => {
                self.pos += 1;
                let e = self.parse_expr()?;
                self.expect(&TokenKind::RParen)?;
                Ok(e)
            }
            Some(TokenKind::LBrace) => {
                self.pos += 1;
                let first = self.parse_expr()?;
                if self.peek() == Some(&TokenKind::LBrace) {
                    self.pos += 1;
                    let mut body = vec![self.parse_expr()?];
                    while self.eat(&TokenKind::Comma) {
                        body.push(self.parse_expr()?);
                    }
                    self.expect(&TokenKind::RBrace)?;
                    self.expect(&TokenKind::RBrace)?;
                    return Ok(Node::Replicate {
                        count: Box::new(first),
                        body,
                    });
                }
                let mut items = vec![first];
                while self.eat(&TokenKind::Comma) {
                    items.push(self.parse_expr()?);
                }
                self.expect(&TokenKind::RBrace)?;
                Ok(Node::Concat(items))
            }
            Some(TokenKind::SysIdent(name)) => {
                self.pos += 1;
                let args = if self.peek() == Some(&TokenKind::LParen) {
                    self.parse_args()?
                } else {
                    Vec::new()
                };
                self.system_call(name, args, at)
            }
            Some(TokenKind::Ident(_) | TokenKind::EscapedIdent(_) | TokenKind::Macro(_)) => {
                let id = self.parse_identifier()?;
                if self.eat(&TokenKind::Apostrophe) {
                    return self.parse_cast_body();
                }
                if self.peek() == Some(&TokenKind::LParen) {
                    let simple = id.segments.len() == 1 && id.segments[0].selects.is_empty();
                    if !simple {
                        return Err(self.error("operator"));
                    }
                    let args = self.parse_args()?;
                    return Ok(Node::Call { name: id, args });
                }
                Ok(Node::Signal(id))
            }
            _ => Err(self.error("expression")),
        }
    }

    /// Body of a `T'(x)` cast; the cast itself is dropped.
    fn parse_cast_body(&mut self) -> Result<Node, ParseError> {
        self.expect(&TokenKind::LParen)?;
        let e = self.parse_expr()?;
        self.expect(&TokenKind::RParen)?;
        Ok(e)
    }

    fn system_call(&self, name: String, mut args: Vec<Node>, at: usize) -> Result<Node, ParseError> {
        let arity_err = |n: &str| ParseError {
            position: at,
            expected: format!("argument list for {name} ({n})"),
        };
        if let Some(kind) = SampledKind::from_name(&name) {
            let max = if kind == SampledKind::Past { 2 } else { 1 };
            if args.is_empty() || args.len() > max {
                return Err(arity_err(if max == 2 { "1 or 2 arguments" } else { "1 argument" }));
            }
            let depth = if args.len() == 2 { args.pop().map(Box::new) } else { None };
            let arg = Box::new(args.pop().expect("checked arity"));
            return Ok(Node::Sampled { kind, arg, depth });
        }
        let reduction = match name.as_str() {
            "$onehot" => Some(ReductionKind::Onehot),
            "$onehot0" => Some(ReductionKind::Onehot0),
            _ => None,
        };
        if let Some(kind) = reduction {
            if args.len() != 1 {
                return Err(arity_err("1 argument"));
            }
            return Ok(Node::Reduction {
                kind,
                arg: Box::new(args.pop().expect("checked arity")),
            });
        }
        Ok(Node::SysCall { name, args })
    }

    fn parse_identifier(&mut self) -> Result<Identifier, ParseError> {
        let mut package = None;
        let mut macro_ref = false;
        let first = match self.peek().cloned() {
            Some(TokenKind::Macro(name)) => {
                macro_ref = true;
                name
            }
            Some(TokenKind::Ident(name)) if !is_reserved(&name) => {
                if self.peek_at(1) == Some(&TokenKind::ColonColon) {
                    self.pos += 2;
                    package = Some(name);
                    match self.peek().cloned() {
                        Some(TokenKind::Ident(n)) if !is_reserved(&n) => n,
                        _ => return Err(self.error("identifier after '::'")),
                    }
                } else {
                    name
                }
            }
            Some(TokenKind::EscapedIdent(name)) => name,
            _ => return Err(self.error("identifier")),
        };
        self.pos += 1;
        let mut segments = vec![Segment {
            name: first,
            selects: self.parse_selects()?,
        }];
        while self.peek() == Some(&TokenKind::Dot) {
            match self.peek_at(1).cloned() {
                Some(TokenKind::Ident(n)) if !is_reserved(&n) => {
                    self.pos += 2;
                    segments.push(Segment {
                        name: n,
                        selects: self.parse_selects()?,
                    });
                }
                Some(TokenKind::EscapedIdent(n)) => {
                    self.pos += 2;
                    segments.push(Segment {
                        name: n,
                        selects: self.parse_selects()?,
                    });
                }
                _ => return Err(self.error("identifier after '.'")),
            }
        }
        Ok(Identifier {
            package,
            macro_ref,
            segments,
        })
    }

    fn parse_selects(&mut self) -> Result<Vec<Select>, ParseError> {
        let mut out = Vec::new();
        while self.eat(&TokenKind::LBracket) {
            let a = self.parse_expr()?;
            if self.eat(&TokenKind::Colon) {
                let b = self.parse_expr()?;
                self.expect(&TokenKind::RBracket)?;
                out.push(Select::Range(a, b));
            } else {
                self.expect(&TokenKind::RBracket)?;
                out.push(Select::Index(a));
            }
        }
        Ok(out)
    }
}

fn count_of(e: Node) -> Count {
    match e {
        Node::Literal(l) => Count::Const(l.value),
        other => Count::Expr(Box::new(other)),
    }
}

fn check_range(r: &CycleRange, at: usize) -> Result<(), ParseError> {
    if let (Count::Const(lo), Upper::Bounded(Count::Const(hi))) = (&r.lo, &r.hi) {
        if lo > hi {
            return Err(ParseError {
                position: at,
                expected: format!("range with lo <= hi (got {lo}:{hi})"),
            });
        }
    }
    Ok(())
}
