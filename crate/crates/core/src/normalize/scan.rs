//! Text helpers that know where comments and string literals are.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanKind {
    LineComment,
    BlockComment,
    Str,
}

/// Byte ranges of comments and string literals, in order.
pub fn trivia_spans(s: &str) -> Vec<(usize, usize, SpanKind)> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let start = i;
        let kind = if b[i] == b'/' && b.get(i + 1) == Some(&b'/') {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
            SpanKind::LineComment
        } else if b[i] == b'/' && b.get(i + 1) == Some(&b'*') {
            i = s[i + 2..].find("*/").map_or(b.len(), |r| i + 2 + r + 2);
            SpanKind::BlockComment
        } else if b[i] == b'"' {
            i += 1;
            while i < b.len() && b[i] != b'"' && b[i] != b'\n' {
                i += if b[i] == b'\\' { 2 } else { 1 };
            }
            i = (i + 1).min(b.len());
            SpanKind::Str
        } else {
            i += 1;
            continue;
        };
        out.push((start, i.min(b.len()), kind));
    }
    out
}

/// `true` for each byte that is ordinary code (outside comments and strings).
pub fn code_mask(s: &str) -> Vec<bool> {
    let mut mask = vec![true; s.len()];
    for (a, b, _) in trivia_spans(s) {
        for m in &mut mask[a..b] {
            *m = false;
        }
    }
    mask
}

/// Index of the parenthesis closing the one at `open`, ignoring comments
/// and strings.
pub fn matching_paren(s: &str, mask: &[bool], open: usize) -> Option<usize> {
    let b = s.as_bytes();
    let mut depth = 0usize;
    for i in open..b.len() {
        if !mask[i] {
            continue;
        }
        match b[i] {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

pub fn parens_balanced(s: &str) -> bool {
    let mask = code_mask(s);
    let mut depth = 0i64;
    for (i, c) in s.bytes().enumerate() {
        if !mask[i] {
            continue;
        }
        match c {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

pub fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

pub fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'$'
}

/// End of the identifier starting at `i`.
pub fn ident_end(b: &[u8], mut i: usize) -> usize {
    while i < b.len() && is_ident_char(b[i]) {
        i += 1;
    }
    i
}

pub fn skip_ws(b: &[u8], mut i: usize) -> usize {
    while i < b.len() && b[i].is_ascii_whitespace() {
        i += 1;
    }
    i
}

/// End (exclusive) of a balanced `[...]` group starting at `open`.
pub fn bracket_end(b: &[u8], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (i, &c) in b.iter().enumerate().skip(open) {
        match c {
            b'[' => depth += 1,
            b']' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i + 1);
                }
            }
            _ => {}
        }
    }
    None
}

/// A `assert|assume|cover property (` directive found in code.
#[derive(Debug, Clone, Copy)]
pub struct Directive {
    pub start: usize,
    pub open: usize,
    pub close: Option<usize>,
}

pub fn find_directives(s: &str) -> Vec<Directive> {
    let mask = code_mask(s);
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        if !mask[i] || !is_ident_start(b[i]) || (i > 0 && is_ident_char(b[i - 1])) {
            i += 1;
            continue;
        }
        let end = ident_end(b, i);
        let word = &s[i..end];
        if matches!(word, "assert" | "assume" | "cover") {
            let j = skip_ws(b, end);
            let k = ident_end(b, j);
            if &s[j..k] == "property" {
                let open = skip_ws(b, k);
                if b.get(open) == Some(&b'(') {
                    out.push(Directive {
                        start: i,
                        open,
                        close: matching_paren(s, &mask, open),
                    });
                }
            }
        }
        i = end;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_hides_comments_and_strings() {
        let s = "a // (\n\"(\" b /* ) */";
        let m = code_mask(s);
        assert!(m[0]);
        assert!(!m[2]);
        assert!(!m[s.find('"').unwrap() + 1]);
        assert!(m[s.find('b').unwrap()]);
        assert!(parens_balanced(s));
    }

    #[test]
    fn directives_and_parens() {
        let s = "assert property (a |-> (b)) else $error(\"x\");";
        let d = find_directives(s);
        assert_eq!(d.len(), 1);
        assert_eq!(&s[d[0].open..=d[0].close.unwrap()], "(a |-> (b))");
    }
}
