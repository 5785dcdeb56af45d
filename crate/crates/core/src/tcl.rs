//! Temporal complexity classes.
//!
//! The class of an assertion is set by the strongest temporal operator it
//! contains: C1 has none, C2 has bounded delays, repetitions, implications or
//! sequence composition, C3 has a liveness operator. Inputs that parse are
//! classified on the tree; anything else falls back to operator patterns
//! over the comment- and label-stripped text.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{self, Node, SeqOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TclClass {
    C1,
    C2,
    C3,
}

impl TclClass {
    pub const ALL: [TclClass; 3] = [TclClass::C1, TclClass::C2, TclClass::C3];

    pub fn as_str(self) -> &'static str {
        match self {
            TclClass::C1 => "C1",
            TclClass::C2 => "C2",
            TclClass::C3 => "C3",
        }
    }
}

impl fmt::Display for TclClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot classify: {0}")]
pub struct ClassifyError(pub String);

/// Class of one parsed node tree.
pub fn classify_ast(ast: &Node) -> TclClass {
    let mut class = TclClass::C1;
    ast.walk(&mut |n| {
        let c = match n {
            Node::Liveness { .. } => TclClass::C3,
            Node::Delay { .. } | Node::Repeat { .. } | Node::Implication { .. } => TclClass::C2,
            Node::SeqBinop { kind, .. } => match kind {
                SeqOp::Throughout | SeqOp::Within | SeqOp::Intersect => TclClass::C2,
                SeqOp::And | SeqOp::Or => TclClass::C1,
            },
            _ => TclClass::C1,
        };
        class = class.max(c);
    });
    class
}

fn liveness_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"\b(s_eventually|s_until_with|s_until|s_always|until_with|until|eventually)\b")
            .expect("valid pattern")
    })
}

fn bounded_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"##|\[\*|\[=|\[->|\[\+\]|\|->|\|=>|\b(throughout|within|intersect)\b")
            .expect("valid pattern")
    })
}

fn label_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\s*[A-Za-z_][A-Za-z0-9_$]*\s*:[^:]").expect("valid pattern"))
}

/// Removes comments and string literals, then a leading `LABEL:` prefix.
pub fn strip_comments_and_labels(src: &str) -> String {
    let mut out = String::with_capacity(src.len());
    let b = src.as_bytes();
    let mut i = 0;
    while i < b.len() {
        if b[i] == b'/' && b.get(i + 1) == Some(&b'/') {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if b[i] == b'/' && b.get(i + 1) == Some(&b'*') {
            i = src[i + 2..].find("*/").map_or(b.len(), |r| i + 2 + r + 2);
            out.push(' ');
            continue;
        }
        if b[i] == b'"' {
            i += 1;
            while i < b.len() && b[i] != b'"' {
                i += if b[i] == b'\\' { 2 } else { 1 };
            }
            i += 1;
            out.push_str("\"\"");
            continue;
        }
        let ch = src[i..].chars().next().expect("in bounds");
        out.push(ch);
        i += ch.len_utf8();
    }
    let mut text = out;
    while let Some(m) = label_re().find(&text) {
        // keep the character after the colon
        let cut = m.end() - 1;
        text = text[cut..].to_string();
    }
    text
}

/// Pattern-based class of raw text; used when the parser rejects the input.
pub fn classify_text(src: &str) -> Result<TclClass, ClassifyError> {
    let text = strip_comments_and_labels(src);
    if !text.chars().any(|c| c.is_ascii_alphanumeric()) {
        return Err(ClassifyError("no assertion body after stripping comments and labels".into()));
    }
    if liveness_re().is_match(&text) {
        return Ok(TclClass::C3);
    }
    if bounded_re().is_match(&text) {
        return Ok(TclClass::C2);
    }
    Ok(TclClass::C1)
}

pub fn classify(src: &str) -> Result<TclClass, ClassifyError> {
    match syntax::parse(src) {
        Ok(ast) => Ok(classify_ast(&ast)),
        Err(_) => classify_text(src),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Histogram {
    pub counts: BTreeMap<TclClass, usize>,
    /// Row index and error for rows that could not be classified.
    pub errors: Vec<(usize, String)>,
}

impl Histogram {
    pub fn get(&self, c: TclClass) -> usize {
        self.counts.get(&c).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }
}

pub fn class_histogram<S: AsRef<str>>(rows: &[S]) -> Histogram {
    let mut h = Histogram::default();
    for c in TclClass::ALL {
        h.counts.insert(c, 0);
    }
    for (i, row) in rows.iter().enumerate() {
        match classify(row.as_ref()) {
            Ok(c) => *h.counts.entry(c).or_default() += 1,
            Err(e) => h.errors.push((i, e.to_string())),
        }
    }
    h
}
