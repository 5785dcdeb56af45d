//! Lexing, parsing and printing of the assertion fragment.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod render;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ast::*;
pub use lexer::{tokenize, LexError, Span, Token, TokenKind};
pub use parser::{is_reserved, parse, ParseError};
pub use render::render;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Reference,
    Candidate,
    Synthetic,
}

/// Raw assertion text as it arrives from a benchmark row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceText {
    raw: String,
    origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("assertion text is empty")]
pub struct EmptySource;

impl SourceText {
    pub fn new(raw: impl Into<String>, origin: Origin) -> Result<Self, EmptySource> {
        let raw = raw.into();
        if raw.trim().is_empty() {
            return Err(EmptySource);
        }
        Ok(Self { raw, origin })
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn parse(&self) -> Result<Node, ParseError> {
        parse(&self.raw)
    }
}

/// Every referenced name in the tree (signals, clocks, called functions),
/// deduplicated by flattened name. Selects on the final path segment are
/// dropped; the result is ordered by flattened name.
pub fn free_identifiers(ast: &Node) -> Vec<Identifier> {
    let mut seen: BTreeMap<String, Identifier> = BTreeMap::new();
    let mut add = |id: &Identifier| {
        let mut base = id.clone();
        if let Some(last) = base.segments.last_mut() {
            last.selects.clear();
        }
        seen.entry(base.flattened()).or_insert(base);
    };
    ast.walk(&mut |n| match n {
        Node::Signal(id) => add(id),
        Node::Call { name, .. } => add(name),
        Node::Clocked { clock, .. } => add(clock),
        _ => {}
    });
    seen.into_values().collect()
}

/// Operator kinds that can be queried with [`contains_operator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Delay,
    ConsecutiveRepeat,
    NonconsecutiveRepeat,
    GotoRepeat,
    OverlapImplication,
    NonOverlapImplication,
    Throughout,
    Within,
    Intersect,
    SeqAnd,
    SeqOr,
    PropNot,
    Liveness(LivenessKind),
    Sampled(SampledKind),
    Reduction(ReductionKind),
    DisableIff,
    Clocking,
}

pub const LIVENESS_OPS: [OperatorKind; 7] = [
    OperatorKind::Liveness(LivenessKind::SEventually),
    OperatorKind::Liveness(LivenessKind::SUntil),
    OperatorKind::Liveness(LivenessKind::SUntilWith),
    OperatorKind::Liveness(LivenessKind::SAlways),
    OperatorKind::Liveness(LivenessKind::UntilWith),
    OperatorKind::Liveness(LivenessKind::Until),
    OperatorKind::Liveness(LivenessKind::Eventually),
];

/// Bounded temporal operators (sampled-value functions are not among them).
pub const BOUNDED_TEMPORAL_OPS: [OperatorKind; 9] = [
    OperatorKind::Delay,
    OperatorKind::ConsecutiveRepeat,
    OperatorKind::NonconsecutiveRepeat,
    OperatorKind::GotoRepeat,
    OperatorKind::OverlapImplication,
    OperatorKind::NonOverlapImplication,
    OperatorKind::Throughout,
    OperatorKind::Within,
    OperatorKind::Intersect,
];

/// Operator kind of a single node, if it is an operator.
pub fn node_operator(n: &Node) -> Option<OperatorKind> {
    Some(match n {
        Node::Delay { .. } => OperatorKind::Delay,
        Node::Repeat { kind, .. } => match kind {
            RepeatKind::Consecutive => OperatorKind::ConsecutiveRepeat,
            RepeatKind::Nonconsecutive => OperatorKind::NonconsecutiveRepeat,
            RepeatKind::Goto => OperatorKind::GotoRepeat,
        },
        Node::Implication { kind, .. } => match kind {
            ImplicationKind::Overlap => OperatorKind::OverlapImplication,
            ImplicationKind::NonOverlap => OperatorKind::NonOverlapImplication,
        },
        Node::SeqBinop { kind, .. } => match kind {
            SeqOp::Throughout => OperatorKind::Throughout,
            SeqOp::Within => OperatorKind::Within,
            SeqOp::Intersect => OperatorKind::Intersect,
            SeqOp::And => OperatorKind::SeqAnd,
            SeqOp::Or => OperatorKind::SeqOr,
        },
        Node::PropNot(_) => OperatorKind::PropNot,
        Node::Liveness { kind, .. } => OperatorKind::Liveness(*kind),
        Node::Sampled { kind, .. } => OperatorKind::Sampled(*kind),
        Node::Reduction { kind, .. } => OperatorKind::Reduction(*kind),
        Node::DisableIff { .. } => OperatorKind::DisableIff,
        Node::Clocked { .. } => OperatorKind::Clocking,
        _ => return None,
    })
}

pub fn contains_operator(ast: &Node, ops: &[OperatorKind]) -> bool {
    let mut found = false;
    ast.walk(&mut |n| {
        if let Some(k) = node_operator(n) {
            found |= ops.contains(&k);
        }
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(src: &str) -> Vec<String> {
        free_identifiers(&parse(src).unwrap())
            .iter()
            .map(|i| i.to_string())
            .collect()
    }

    #[test]
    fn free_identifier_sets() {
        assert_eq!(names("a && b"), ["a", "b"]);
        assert_eq!(names("@(posedge clk) a |-> b"), ["a", "b", "clk"]);
        assert_eq!(names("x.y[0].z |-> q"), ["q", "x.y[0].z"]);
        assert_eq!(names("a[0] && a[1] && chk(a[WIDTH-1])"), ["WIDTH", "a", "chk"]);
    }

    #[test]
    fn operator_queries() {
        let ast = parse("a |-> b").unwrap();
        assert!(!contains_operator(&ast, &LIVENESS_OPS));
        let ast = parse("a |-> s_eventually b").unwrap();
        assert!(contains_operator(&ast, &LIVENESS_OPS));
        let ast = parse("$rose(a)").unwrap();
        assert!(!contains_operator(&ast, &BOUNDED_TEMPORAL_OPS));
    }

    #[test]
    fn empty_source_rejected() {
        assert!(SourceText::new("  \n", Origin::Candidate).is_err());
        assert!(SourceText::new("a", Origin::Reference).is_ok());
    }
}
