//! Tokenizer for the assertion fragment.
//!
//! Comments are kept as trivia tokens so that callers can report them; the
//! parser filters them out. Backtick macro references get their own token
//! class so they remain visible to the normalizer.

use std::fmt;

use thiserror::Error;

/// Byte range of a token inside the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("lex error at byte {position}: {message}")]
pub struct LexError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    /// `\name ` escaped identifier; the stored name keeps the backslash.
    EscapedIdent(String),
    /// `$rose`, `$onehot`, ...
    SysIdent(String),
    /// `` `NAME `` macro reference (stored without the backtick).
    Macro(String),
    /// Integer literal, plain decimal or sized/based (`32'd4`, `'1`).
    Number { text: String, value: u64 },
    Str(String),
    Comment(String),

    /// `##N`
    DelayConst(u64),
    /// `##[lo:hi]` with constant bounds; `hi == None` is `$`.
    DelayRange { lo: u64, hi: Option<u64> },
    /// `##` followed by something other than a constant count or range.
    HashHash,
    /// `[*`
    RepStar,
    /// `[=`
    RepEq,
    /// `[->`
    RepGoto,
    /// `[+]`
    RepPlus,

    OverlapImpl,
    NonOverlapImpl,

    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    ColonColon,
    Dot,
    At,
    Question,
    Dollar,
    Apostrophe,
    Assign,

    Bang,
    Tilde,
    Amp,
    AmpAmp,
    Pipe,
    PipePipe,
    Caret,
    TildeCaret,
    TildeAmp,
    TildePipe,
    Plus,
    Minus,
    Star,
    StarStar,
    Slash,
    Percent,
    Shl,
    Shr,
    AShl,
    AShr,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Neq,
    CaseEq,
    CaseNeq,
    WildEq,
    WildNeq,
    Arrow,
    Equiv,
}

impl TokenKind {
    pub fn is_trivia(&self) -> bool {
        matches!(self, TokenKind::Comment(_))
    }

    /// Returns the identifier text when this token is a plain identifier.
    pub fn ident(&self) -> Option<&str> {
        match self {
            TokenKind::Ident(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TokenKind::*;
        let s: &str = match self {
            Ident(s) | EscapedIdent(s) | SysIdent(s) => return f.write_str(s),
            Macro(s) => return write!(f, "`{s}"),
            Number { text, .. } => return f.write_str(text),
            Str(s) => return write!(f, "\"{s}\""),
            Comment(_) => "comment",
            DelayConst(n) => return write!(f, "##{n}"),
            DelayRange { lo, hi: Some(hi) } => return write!(f, "##[{lo}:{hi}]"),
            DelayRange { lo, hi: None } => return write!(f, "##[{lo}:$]"),
            HashHash => "##",
            RepStar => "[*",
            RepEq => "[=",
            RepGoto => "[->",
            RepPlus => "[+]",
            OverlapImpl => "|->",
            NonOverlapImpl => "|=>",
            LParen => "(",
            RParen => ")",
            LBracket => "[",
            RBracket => "]",
            LBrace => "{",
            RBrace => "}",
            Comma => ",",
            Semi => ";",
            Colon => ":",
            ColonColon => "::",
            Dot => ".",
            At => "@",
            Question => "?",
            Dollar => "$",
            Apostrophe => "'",
            Assign => "=",
            Bang => "!",
            Tilde => "~",
            Amp => "&",
            AmpAmp => "&&",
            Pipe => "|",
            PipePipe => "||",
            Caret => "^",
            TildeCaret => "~^",
            TildeAmp => "~&",
            TildePipe => "~|",
            Plus => "+",
            Minus => "-",
            Star => "*",
            StarStar => "**",
            Slash => "/",
            Percent => "%",
            Shl => "<<",
            Shr => ">>",
            AShl => "<<<",
            AShr => ">>>",
            Lt => "<",
            Le => "<=",
            Gt => ">",
            Ge => ">=",
            EqEq => "==",
            Neq => "!=",
            CaseEq => "===",
            CaseNeq => "!==",
            WildEq => "==?",
            WildNeq => "!=?",
            Arrow => "->",
            Equiv => "<->",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

/// Tokenizes `src`, including comment trivia.
pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    Lexer::new(src).run()
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    out: Vec<Token>,
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_'
}

fn is_ident_char(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'$'
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            out: Vec::new(),
        }
    }

    fn peek(&self, off: usize) -> Option<u8> {
        self.bytes.get(self.pos + off).copied()
    }

    fn err(&self, position: usize, message: impl Into<String>) -> LexError {
        LexError {
            position,
            message: message.into(),
        }
    }

    fn push(&mut self, kind: TokenKind, start: usize) {
        self.out.push(Token {
            kind,
            span: Span {
                start,
                end: self.pos,
            },
        });
    }

    fn run(mut self) -> Result<Vec<Token>, LexError> {
        while let Some(b) = self.peek(0) {
            let start = self.pos;
            if b.is_ascii_whitespace() {
                self.pos += 1;
                continue;
            }
            if b == b'/' && self.peek(1) == Some(b'/') {
                let end = self.src[start..]
                    .find('\n')
                    .map(|i| start + i)
                    .unwrap_or(self.src.len());
                self.pos = end;
                let text = self.src[start + 2..end].to_string();
                self.push(TokenKind::Comment(text), start);
                continue;
            }
            if b == b'/' && self.peek(1) == Some(b'*') {
                let Some(rel) = self.src[start + 2..].find("*/") else {
                    return Err(self.err(start, "unterminated block comment"));
                };
                self.pos = start + 2 + rel + 2;
                let text = self.src[start + 2..start + 2 + rel].to_string();
                self.push(TokenKind::Comment(text), start);
                continue;
            }
            if is_ident_start(b) {
                self.lex_ident_or_cast(start);
                continue;
            }
            if b.is_ascii_digit() {
                self.lex_number(start)?;
                continue;
            }
            match b {
                b'\\' => {
                    self.pos += 1;
                    while let Some(c) = self.peek(0) {
                        if c.is_ascii_whitespace() {
                            break;
                        }
                        self.pos += 1;
                    }
                    if self.pos == start + 1 {
                        return Err(self.err(start, "empty escaped identifier"));
                    }
                    let name = self.src[start..self.pos].to_string();
                    self.push(TokenKind::EscapedIdent(name), start);
                }
                b'$' => {
                    if self.peek(1).is_some_and(is_ident_start) {
                        self.pos += 1;
                        while self.peek(0).is_some_and(is_ident_char) {
                            self.pos += 1;
                        }
                        let name = self.src[start..self.pos].to_string();
                        self.push(TokenKind::SysIdent(name), start);
                    } else {
                        self.pos += 1;
                        self.push(TokenKind::Dollar, start);
                    }
                }
                b'`' => {
                    if !self.peek(1).is_some_and(is_ident_start) {
                        return Err(self.err(start, "backtick without macro name"));
                    }
                    self.pos += 1;
                    while self.peek(0).is_some_and(is_ident_char) {
                        self.pos += 1;
                    }
                    let name = self.src[start + 1..self.pos].to_string();
                    self.push(TokenKind::Macro(name), start);
                }
                b'"' => {
                    self.pos += 1;
                    loop {
                        match self.peek(0) {
                            None | Some(b'\n') => {
                                return Err(self.err(start, "unterminated string literal"))
                            }
                            Some(b'\\') => self.pos += 2,
                            Some(b'"') => {
                                self.pos += 1;
                                break;
                            }
                            Some(_) => self.pos += 1,
                        }
                    }
                    let body = self.src[start + 1..self.pos - 1].to_string();
                    self.push(TokenKind::Str(body), start);
                }
                b'\'' => self.lex_apostrophe(start)?,
                b'#' => self.lex_hash(start)?,
                b'[' => self.lex_bracket(start),
                b'@' => {
                    // Only event controls `@(` belong to the fragment.
                    let mut look = self.pos + 1;
                    while self.bytes.get(look).is_some_and(|c| c.is_ascii_whitespace()) {
                        look += 1;
                    }
                    if self.bytes.get(look) != Some(&b'(') {
                        return Err(self.err(start, "unexpected '@'"));
                    }
                    self.pos += 1;
                    self.push(TokenKind::At, start);
                }
                _ => self.lex_operator(start)?,
            }
        }
        Ok(self.out)
    }

    fn lex_ident_or_cast(&mut self, start: usize) {
        while self.peek(0).is_some_and(is_ident_char) {
            self.pos += 1;
        }
        let name = self.src[start..self.pos].to_string();
        self.push(TokenKind::Ident(name), start);
    }

    fn lex_digits(&mut self, allow: impl Fn(u8) -> bool) {
        while self.peek(0).is_some_and(|c| allow(c) || c == b'_') {
            self.pos += 1;
        }
    }

    fn lex_number(&mut self, start: usize) -> Result<(), LexError> {
        self.lex_digits(|c| c.is_ascii_digit());
        let size_end = self.pos;
        // Sized based literal: 32'd4, 4'b1010. A bare `4'(` is a size cast.
        if self.peek(0) == Some(b'\'') && self.peek(1) != Some(b'(') {
            self.pos += 1;
            return self.lex_based_tail(start);
        }
        let text = &self.src[start..size_end];
        let digits: String = text.chars().filter(|c| *c != '_').collect();
        let value = digits
            .parse::<u64>()
            .map_err(|_| self.err(start, "integer literal out of range"))?;
        self.push(
            TokenKind::Number {
                text: text.to_string(),
                value,
            },
            start,
        );
        Ok(())
    }

    /// Continues after the apostrophe of a based literal.
    fn lex_based_tail(&mut self, start: usize) -> Result<(), LexError> {
        if matches!(self.peek(0), Some(b's' | b'S')) {
            self.pos += 1;
        }
        let radix = match self.peek(0).map(|c| c.to_ascii_lowercase()) {
            Some(b'b') => 2,
            Some(b'o') => 8,
            Some(b'd') => 10,
            Some(b'h') => 16,
            _ => return Err(self.err(start, "malformed based literal")),
        };
        self.pos += 1;
        let digits_start = self.pos;
        self.lex_digits(|c| c.is_ascii_hexdigit() || matches!(c, b'x' | b'X' | b'z' | b'Z' | b'?'));
        if self.pos == digits_start {
            return Err(self.err(start, "based literal without digits"));
        }
        let mut value: u64 = 0;
        for c in self.src[digits_start..self.pos].chars() {
            if c == '_' {
                continue;
            }
            // Two-valued semantics: x/z/? digits read as zero.
            let d = c.to_digit(radix).unwrap_or(0) as u64;
            value = value.wrapping_mul(radix as u64).wrapping_add(d);
        }
        let text = self.src[start..self.pos].to_string();
        self.push(TokenKind::Number { text, value }, start);
        Ok(())
    }

    fn lex_apostrophe(&mut self, start: usize) -> Result<(), LexError> {
        match self.peek(1) {
            Some(b'0' | b'1') if !self.peek(2).is_some_and(is_ident_char) => {
                let value = (self.peek(1) == Some(b'1')) as u64;
                self.pos += 2;
                let text = self.src[start..self.pos].to_string();
                self.push(TokenKind::Number { text, value }, start);
                Ok(())
            }
            Some(b'b' | b'B' | b'o' | b'O' | b'd' | b'D' | b'h' | b'H' | b's' | b'S') => {
                self.pos += 1;
                self.lex_based_tail(start)
            }
            Some(b'(') => {
                self.pos += 1;
                self.push(TokenKind::Apostrophe, start);
                Ok(())
            }
            _ => Err(self.err(start, "stray apostrophe")),
        }
    }

    fn lex_hash(&mut self, start: usize) -> Result<(), LexError> {
        if self.peek(1) != Some(b'#') {
            return Err(self.err(start, "single '#' is not part of the assertion fragment"));
        }
        self.pos += 2;
        // ##N
        if self.peek(0).is_some_and(|c| c.is_ascii_digit()) {
            let num_start = self.pos;
            self.lex_digits(|c| c.is_ascii_digit());
            if self.peek(0) == Some(b'\'') {
                // sized literal as delay count: fall back to bare ##
                self.pos = num_start;
                self.push(TokenKind::HashHash, start);
                return Ok(());
            }
            let digits: String = self.src[num_start..self.pos]
                .chars()
                .filter(|c| *c != '_')
                .collect();
            let n = digits
                .parse::<u64>()
                .map_err(|_| self.err(start, "delay out of range"))?;
            self.push(TokenKind::DelayConst(n), start);
            return Ok(());
        }
        // ##[lo:hi] with constant bounds
        if let Some((lo, hi, end)) = self.scan_const_range(self.pos) {
            self.pos = end;
            self.push(TokenKind::DelayRange { lo, hi }, start);
            return Ok(());
        }
        self.push(TokenKind::HashHash, start);
        Ok(())
    }

    /// Matches `[ ws* digits ws* : ws* (digits|$) ws* ]` starting at `at`.
    fn scan_const_range(&self, at: usize) -> Option<(u64, Option<u64>, usize)> {
        let b = self.bytes;
        let mut i = at;
        let skip_ws = |i: &mut usize| {
            while b.get(*i).is_some_and(|c| c.is_ascii_whitespace()) {
                *i += 1;
            }
        };
        let number = |i: &mut usize| -> Option<u64> {
            let s = *i;
            while b.get(*i).is_some_and(|c| c.is_ascii_digit() || *c == b'_') {
                *i += 1;
            }
            if *i == s || b.get(*i).is_some_and(|c| is_ident_char(*c) || *c == b'\'') {
                return None;
            }
            self.src[s..*i].replace('_', "").parse().ok()
        };
        if b.get(i) != Some(&b'[') {
            return None;
        }
        i += 1;
        skip_ws(&mut i);
        let lo = number(&mut i)?;
        skip_ws(&mut i);
        if b.get(i) != Some(&b':') {
            return None;
        }
        i += 1;
        skip_ws(&mut i);
        let hi = if b.get(i) == Some(&b'$') {
            i += 1;
            None
        } else {
            Some(number(&mut i)?)
        };
        skip_ws(&mut i);
        if b.get(i) != Some(&b']') {
            return None;
        }
        Some((lo, hi, i + 1))
    }

    fn lex_bracket(&mut self, start: usize) {
        let kind = match (self.peek(1), self.peek(2), self.peek(3)) {
            (Some(b'*'), _, _) => {
                self.pos += 2;
                TokenKind::RepStar
            }
            (Some(b'='), _, _) => {
                self.pos += 2;
                TokenKind::RepEq
            }
            (Some(b'-'), Some(b'>'), _) => {
                self.pos += 3;
                TokenKind::RepGoto
            }
            (Some(b'+'), Some(b']'), _) => {
                self.pos += 3;
                TokenKind::RepPlus
            }
            _ => {
                self.pos += 1;
                TokenKind::LBracket
            }
        };
        self.push(kind, start);
    }

    fn lex_operator(&mut self, start: usize) -> Result<(), LexError> {
        use TokenKind::*;
        const TABLE: &[(&str, TokenKind)] = &[
            ("<<<", AShl),
            (">>>", AShr),
            ("===", CaseEq),
            ("!==", CaseNeq),
            ("==?", WildEq),
            ("!=?", WildNeq),
            ("|->", OverlapImpl),
            ("|=>", NonOverlapImpl),
            ("<->", Equiv),
            ("&&", AmpAmp),
            ("||", PipePipe),
            ("~^", TildeCaret),
            ("^~", TildeCaret),
            ("~&", TildeAmp),
            ("~|", TildePipe),
            ("**", StarStar),
            ("<<", Shl),
            (">>", Shr),
            ("<=", Le),
            (">=", Ge),
            ("==", EqEq),
            ("!=", Neq),
            ("->", Arrow),
            ("::", ColonColon),
            ("(", LParen),
            (")", RParen),
            ("]", RBracket),
            ("{", LBrace),
            ("}", RBrace),
            (",", Comma),
            (";", Semi),
            (":", Colon),
            (".", Dot),
            ("?", Question),
            ("=", Assign),
            ("!", Bang),
            ("~", Tilde),
            ("&", Amp),
            ("|", Pipe),
            ("^", Caret),
            ("+", Plus),
            ("-", Minus),
            ("*", Star),
            ("/", Slash),
            ("%", Percent),
            ("<", Lt),
            (">", Gt),
        ];
        let rest = &self.src[start..];
        for (text, kind) in TABLE {
            if rest.starts_with(text) {
                self.pos += text.len();
                self.push(kind.clone(), start);
                return Ok(());
            }
        }
        let ch = rest.chars().next().unwrap_or('?');
        Err(self.err(start, format!("unexpected character {ch:?}")))
    }
}
