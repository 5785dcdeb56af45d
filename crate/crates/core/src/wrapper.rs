//! Free-input wrapper module.
//!
//! Every name an assertion references is declared in a synthesized
//! `module sva_check` so that the assertion can be compiled on its own.
//! The kind of each name decides its declaration:
//!
//! | kind          | test (first match wins)                  | declaration                              |
//! |---------------|------------------------------------------|------------------------------------------|
//! | Clock         | used as a clocking event                 | `input logic X`                          |
//! | Parameter     | ALL_CAPS, at least three characters      | `parameter logic [31:0] X = 32'd4`       |
//! | FunctionStub  | used in call position `X(`               | function with eight defaulted arguments  |
//! | Mda           | indexed with two or more brackets        | `input logic [31:0][31:0][31:0] X`       |
//! | Wire          | anything else                            | `input logic [31:0] X`                   |

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{self, free_identifiers, Edge, Identifier, Node, ParseError, Segment, TokenKind};

pub const MODULE_NAME: &str = "sva_check";
pub const DEFAULT_CLOCK: &str = "clk";
pub const FALLBACK_CLOCK: &str = "__pec_clk";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum IdentifierKind {
    Clock,
    Parameter,
    FunctionStub,
    Mda,
    Wire,
}

impl fmt::Display for IdentifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WrapError {
    #[error("assertion does not parse: {0}")]
    Parse(#[from] ParseError),
    #[error("malformed wrapper module: {0}")]
    Shell(String),
}

/// ALL_CAPS test used for parameters: a leading letter, no lowercase
/// letters, at least three characters.
pub fn is_all_caps(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && name.len() >= 3
        && name
            .chars()
            .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

pub fn classify_identifier(id: &Identifier, context: &Node) -> IdentifierKind {
    let key = base_key(id);
    let mut clock = false;
    let mut called = false;
    let mut max_brackets = 0usize;
    context.walk(&mut |n| match n {
        Node::Clocked { clock: c, .. } if base_key(c) == key => clock = true,
        Node::Call { name, .. } if base_key(name) == key => called = true,
        Node::Signal(s) if base_key(s) == key => {
            max_brackets = max_brackets.max(s.trailing_selects().len());
        }
        _ => {}
    });
    if clock {
        IdentifierKind::Clock
    } else if is_all_caps(&key) {
        IdentifierKind::Parameter
    } else if called {
        IdentifierKind::FunctionStub
    } else if max_brackets >= 2 {
        IdentifierKind::Mda
    } else {
        IdentifierKind::Wire
    }
}

fn base_key(id: &Identifier) -> String {
    id.flattened()
}

const SV_KEYWORDS: &[&str] = &[
    "accept_on", "alias", "always", "always_comb", "always_ff", "always_latch", "and", "assert", "assign",
    "assume", "automatic", "before", "begin", "bind", "bins", "binsof", "bit", "break", "buf", "bufif0",
    "bufif1", "byte", "case", "casex", "casez", "cell", "chandle", "checker", "class", "clocking", "cmos",
    "config", "const", "constraint", "context", "continue", "cover", "covergroup", "coverpoint", "cross",
    "deassign", "default", "defparam", "design", "disable", "dist", "do", "edge", "else", "end", "endcase",
    "endchecker", "endclass", "endclocking", "endconfig", "endfunction", "endgenerate", "endgroup",
    "endinterface", "endmodule", "endpackage", "endprimitive", "endprogram", "endproperty", "endspecify",
    "endsequence", "endtable", "endtask", "enum", "event", "eventually", "expect", "export", "extends",
    "extern", "final", "first_match", "for", "force", "foreach", "forever", "fork", "forkjoin", "function",
    "generate", "genvar", "global", "highz0", "highz1", "if", "iff", "ifnone", "ignore_bins",
    "illegal_bins", "implements", "implies", "import", "incdir", "include", "initial", "inout", "input",
    "inside", "instance", "int", "integer", "interconnect", "interface", "intersect", "join", "join_any",
    "join_none", "large", "let", "liblist", "library", "local", "localparam", "logic", "longint",
    "macromodule", "matches", "medium", "modport", "module", "nand", "negedge", "nettype", "new", "nexttime",
    "nmos", "nor", "noshowcancelled", "not", "notif0", "notif1", "null", "or", "output", "package", "packed",
    "parameter", "pmos", "posedge", "primitive", "priority", "program", "property", "protected", "pull0",
    "pull1", "pulldown", "pullup", "pulsestyle_ondetect", "pulsestyle_onevent", "pure", "rand", "randc",
    "randcase", "randsequence", "rcmos", "real", "realtime", "ref", "reg", "reject_on", "release", "repeat",
    "restrict", "return", "rnmos", "rpmos", "rtran", "rtranif0", "rtranif1", "s_always", "s_eventually",
    "s_nexttime", "s_until", "s_until_with", "scalared", "sequence", "shortint", "shortreal",
    "showcancelled", "signed", "small", "soft", "solve", "specify", "specparam", "static", "string",
    "strong", "strong0", "strong1", "struct", "super", "supply0", "supply1", "sync_accept_on",
    "sync_reject_on", "table", "tagged", "task", "this", "throughout", "time", "timeprecision", "timeunit",
    "tran", "tranif0", "tranif1", "tri", "tri0", "tri1", "triand", "trior", "trireg", "type", "typedef",
    "union", "unique", "unique0", "unsigned", "until", "until_with", "untyped", "use", "uwire", "var",
    "vectored", "virtual", "void", "wait", "wait_order", "wand", "weak", "weak0", "weak1", "while",
    "wildcard", "wire", "with", "within", "wor", "xnor", "xor",
];

pub fn is_sv_keyword(name: &str) -> bool {
    SV_KEYWORDS.contains(&name)
}

/// Name used in the wrapper for a flattened identifier. Keywords and
/// escaped names get a `_w` suffix.
fn emitted_name(flat: &str) -> String {
    let plain = flat.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_')
        && flat.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$');
    if plain && !is_sv_keyword(flat) {
        return flat.to_string();
    }
    let mut s: String = flat
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if !s.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
        s.insert(0, '_');
    }
    format!("{s}_w")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Declaration {
    /// Flattened source name.
    pub source: String,
    /// Name as declared in the wrapper.
    pub name: String,
    pub kind: IdentifierKind,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WrapperModule {
    pub module_name: String,
    pub declarations: Vec<Declaration>,
    /// Clock added because the assertion had none.
    pub injected_clock: Option<String>,
    /// The directive placed in the module.
    pub body: String,
}

fn declaration_text(kind: IdentifierKind, name: &str) -> String {
    match kind {
        IdentifierKind::Clock => format!("input logic {name}"),
        IdentifierKind::Parameter => format!("parameter logic [31:0] {name} = 32'd4"),
        IdentifierKind::FunctionStub => {
            let args: Vec<String> = (0..8).map(|i| format!("input logic [31:0] a{i} = 32'd0")).collect();
            format!(
                "function automatic logic [31:0] {name}({}); return 32'd0; endfunction",
                args.join(", ")
            )
        }
        IdentifierKind::Mda => format!("input logic [31:0][31:0][31:0] {name}"),
        IdentifierKind::Wire => format!("input logic [31:0] {name}"),
    }
}

fn has_clock(ast: &Node) -> bool {
    let mut found = false;
    ast.walk(&mut |n| found |= matches!(n, Node::Clocked { .. }));
    found
}

pub fn synthesize_wrapper(src: &str) -> Result<WrapperModule, WrapError> {
    let ast = syntax::parse(src)?;
    Ok(wrap_ast(&ast))
}

pub fn wrap_ast(ast: &Node) -> WrapperModule {
    let ids = free_identifiers(ast);
    let mut names: BTreeMap<String, String> = BTreeMap::new();
    let mut used: BTreeSet<String> = BTreeSet::new();
    let mut decls = Vec::new();
    for id in &ids {
        let flat = id.flattened();
        let mut name = emitted_name(&flat);
        while used.contains(&name) {
            name.push_str("_w");
        }
        used.insert(name.clone());
        names.insert(flat.clone(), name.clone());
        let kind = classify_identifier(id, ast);
        decls.push(Declaration {
            source: flat,
            text: declaration_text(kind, &name),
            name,
            kind,
        });
    }

    let mut body_ast = ast.map_signals(&mut |id| {
        let name = names
            .get(&id.flattened())
            .cloned()
            .unwrap_or_else(|| id.flattened());
        Identifier {
            package: None,
            macro_ref: false,
            segments: vec![Segment {
                name,
                selects: id.trailing_selects().to_vec(),
            }],
        }
    });
    let mut label = None;
    if let Node::Labeled { label: l, body } = body_ast {
        label = Some(l);
        body_ast = *body;
    }

    let mut injected = None;
    if !has_clock(&body_ast) {
        let clk = if used.contains(DEFAULT_CLOCK) {
            FALLBACK_CLOCK
        } else {
            DEFAULT_CLOCK
        };
        injected = Some(clk.to_string());
        body_ast = Node::Clocked {
            edge: Edge::Pos,
            clock: Identifier::simple(clk),
            body: Box::new(body_ast),
        };
        decls.push(Declaration {
            source: clk.to_string(),
            name: clk.to_string(),
            kind: IdentifierKind::Clock,
            text: declaration_text(IdentifierKind::Clock, clk),
        });
    }
    decls.sort_by(|a, b| (a.kind, &a.name).cmp(&(b.kind, &b.name)));

    let prefix = label.map(|l| format!("{l}: ")).unwrap_or_default();
    let body = format!("{prefix}assert property ({});", syntax::render(&body_ast));
    WrapperModule {
        module_name: MODULE_NAME.to_string(),
        declarations: decls,
        injected_clock: injected,
        body,
    }
}

impl WrapperModule {
    pub fn ports(&self) -> Vec<&str> {
        self.declarations
            .iter()
            .filter(|d| d.text.starts_with("input"))
            .map(|d| d.name.as_str())
            .collect()
    }

    pub fn to_sv(&self) -> String {
        let mut out = format!("module {} ({});\n", self.module_name, self.ports().join(", "));
        for d in &self.declarations {
            out.push_str("  ");
            out.push_str(&d.text);
            if !d.text.ends_with("endfunction") {
                out.push(';');
            }
            out.push('\n');
        }
        out.push_str("  ");
        out.push_str(&self.body);
        out.push_str("\nendmodule\n");
        out
    }

    /// Flattened source names declared for the assertion itself (the
    /// injected clock excluded).
    pub fn declared_sources(&self) -> BTreeSet<String> {
        self.declarations
            .iter()
            .filter(|d| Some(&d.name) != self.injected_clock.as_ref())
            .map(|d| d.source.clone())
            .collect()
    }
}

impl fmt::Display for WrapperModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sv())
    }
}

/// Result of reading a wrapper module back.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedWrapper {
    pub module_name: String,
    pub ports: Vec<String>,
    pub declarations: Vec<(String, IdentifierKind)>,
    pub label: Option<String>,
    pub property: Node,
}

/// Reads back the module shell emitted by [`WrapperModule::to_sv`].
pub fn parse_wrapper(text: &str) -> Result<ParsedWrapper, WrapError> {
    let toks: Vec<_> = syntax::tokenize(text)
        .map_err(|e| WrapError::Shell(e.to_string()))?
        .into_iter()
        .filter(|t| !t.kind.is_trivia())
        .collect();
    let mut i = 0;
    let err = |i: usize, what: &str| {
        WrapError::Shell(format!(
            "expected {what} at token {i} ({})",
            toks.get(i).map(|t| t.kind.to_string()).unwrap_or_else(|| "end".into())
        ))
    };
    let ident = |i: usize| toks.get(i).and_then(|t| t.kind.ident().map(str::to_string));
    let is = |i: usize, k: &TokenKind| toks.get(i).map(|t| &t.kind) == Some(k);

    if ident(i).as_deref() != Some("module") {
        return Err(err(i, "'module'"));
    }
    let module_name = ident(i + 1).ok_or_else(|| err(i + 1, "module name"))?;
    i += 2;
    let mut ports = Vec::new();
    if !is(i, &TokenKind::LParen) {
        return Err(err(i, "'('"));
    }
    i += 1;
    while !is(i, &TokenKind::RParen) {
        ports.push(ident(i).ok_or_else(|| err(i, "port name"))?);
        i += 1;
        if is(i, &TokenKind::Comma) {
            i += 1;
        }
    }
    i += 1;
    if !is(i, &TokenKind::Semi) {
        return Err(err(i, "';'"));
    }
    i += 1;

    let mut declarations = Vec::new();
    let packed_dims = |i: &mut usize| {
        let mut n = 0;
        while is(*i, &TokenKind::LBracket) {
            while *i < toks.len() && !is(*i, &TokenKind::RBracket) {
                *i += 1;
            }
            *i += 1;
            n += 1;
        }
        n
    };
    loop {
        match ident(i).as_deref() {
            Some("input") => {
                i += 1;
                if ident(i).as_deref() == Some("logic") {
                    i += 1;
                }
                let kind = match packed_dims(&mut i) {
                    0 => IdentifierKind::Clock,
                    1 => IdentifierKind::Wire,
                    _ => IdentifierKind::Mda,
                };
                let name = ident(i).ok_or_else(|| err(i, "input name"))?;
                i += 1;
                if !is(i, &TokenKind::Semi) {
                    return Err(err(i, "';'"));
                }
                i += 1;
                declarations.push((name, kind));
            }
            Some("parameter") => {
                i += 1;
                if ident(i).as_deref() == Some("logic") {
                    i += 1;
                }
                packed_dims(&mut i);
                let name = ident(i).ok_or_else(|| err(i, "parameter name"))?;
                while i < toks.len() && !is(i, &TokenKind::Semi) {
                    i += 1;
                }
                i += 1;
                declarations.push((name, IdentifierKind::Parameter));
            }
            Some("function") => {
                i += 1;
                if ident(i).as_deref() == Some("automatic") {
                    i += 1;
                }
                if ident(i).as_deref() == Some("logic") {
                    i += 1;
                }
                packed_dims(&mut i);
                let name = ident(i).ok_or_else(|| err(i, "function name"))?;
                while i < toks.len() && ident(i).as_deref() != Some("endfunction") {
                    i += 1;
                }
                if i >= toks.len() {
                    return Err(err(i, "'endfunction'"));
                }
                i += 1;
                declarations.push((name, IdentifierKind::FunctionStub));
            }
            _ => break,
        }
    }

    let mut label = None;
    if ident(i).is_some() && is(i + 1, &TokenKind::Colon) {
        label = ident(i);
        i += 2;
    }
    if ident(i).as_deref() != Some("assert") || ident(i + 1).as_deref() != Some("property") {
        return Err(err(i, "'assert property'"));
    }
    i += 2;
    if !is(i, &TokenKind::LParen) {
        return Err(err(i, "'('"));
    }
    let open = i;
    let mut depth = 0;
    let mut close = None;
    for (j, t) in toks.iter().enumerate().skip(open) {
        match t.kind {
            TokenKind::LParen => depth += 1,
            TokenKind::RParen => {
                depth -= 1;
                if depth == 0 {
                    close = Some(j);
                    break;
                }
            }
            _ => {}
        }
    }
    let close = close.ok_or_else(|| err(open, "closing ')'"))?;
    let src = &text[toks[open].span.end..toks[close].span.start];
    let property = syntax::parse(src)?;
    i = close + 1;
    if !is(i, &TokenKind::Semi) || ident(i + 1).as_deref() != Some("endmodule") || i + 2 != toks.len() {
        return Err(err(i, "'; endmodule'"));
    }
    Ok(ParsedWrapper {
        module_name,
        ports,
        declarations,
        label,
        property,
    })
}
