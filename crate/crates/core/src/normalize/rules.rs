//! The individual rewrites. Each takes the current text and returns the
//! rewritten text plus the number of places it changed.

use std::sync::OnceLock;

use regex::{Captures, Regex};

use super::scan::*;
use super::{CollapseBound, NormalizeOptions};

pub type Outcome = (String, usize);

fn re(cell: &'static OnceLock<Regex>, pat: &str) -> &'static Regex {
    cell.get_or_init(|| Regex::new(pat).expect("valid pattern"))
}

/// Regex replacement restricted to matches that start in code.
fn replace_in_code(s: &str, re: &Regex, mut f: impl FnMut(&Captures) -> String) -> Outcome {
    let mask = code_mask(s);
    let mut out = String::with_capacity(s.len());
    let mut last = 0;
    let mut n = 0;
    for caps in re.captures_iter(s) {
        let m = caps.get(0).expect("group 0");
        if !mask[m.start()] {
            continue;
        }
        out.push_str(&s[last..m.start()]);
        out.push_str(&f(&caps));
        last = m.end();
        n += 1;
    }
    out.push_str(&s[last..]);
    (out, n)
}

/// R1: `` `SIG `` becomes `SIG`.
pub fn strip_macros(s: &str, _: &NormalizeOptions) -> Outcome {
    static RE: OnceLock<Regex> = OnceLock::new();
    replace_in_code(s, re(&RE, r"`([A-Za-z_][A-Za-z0-9_$]*)"), |c| c[1].to_string())
}

/// Folds a select's text into an identifier fragment: `[i+1]` gives `i_1`.
pub fn fold_select(inner: &str) -> String {
    let mut out = String::new();
    for c in inner.chars() {
        if c.is_ascii_alphanumeric() || c == '_' {
            out.push(c);
        } else if !c.is_whitespace() && !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

/// R2 and R9 together: dotted paths are joined with `_`, and selects on
/// inner segments are folded into the name. Returns (text, R2 count, R9 count).
pub fn flatten_paths(s: &str) -> (String, usize, usize) {
    let mask = code_mask(s);
    let b = s.as_bytes();
    let mut out = String::with_capacity(s.len());
    let (mut r2, mut r9) = (0, 0);
    let mut i = 0;
    let mut last = 0;
    while i < b.len() {
        let boundary = i == 0 || !(is_ident_char(b[i - 1]) || matches!(b[i - 1], b'\'' | b'\\' | b'`' | b'.'));
        if !mask[i] || !is_ident_start(b[i]) || !boundary {
            if b[i] == b'\\' {
                // escaped identifier: skip to whitespace
                while i < b.len() && !b[i].is_ascii_whitespace() {
                    i += 1;
                }
                continue;
            }
            i += 1;
            continue;
        }
        // segments: (name, selects as inner texts, full select text)
        let mut segs: Vec<(String, Vec<String>, String)> = Vec::new();
        let mut j = i;
        loop {
            let name_end = ident_end(b, j);
            let name = s[j..name_end].to_string();
            let mut k = name_end;
            let mut sels = Vec::new();
            while b.get(k) == Some(&b'[') {
                match bracket_end(b, k) {
                    Some(e) => {
                        sels.push(s[k + 1..e - 1].to_string());
                        k = e;
                    }
                    None => break,
                }
            }
            let sel_text = s[name_end..k].to_string();
            segs.push((name, sels, sel_text));
            j = k;
            if b.get(j) == Some(&b'.') && b.get(j + 1).is_some_and(|c| is_ident_start(*c)) {
                j += 1;
                continue;
            }
            break;
        }
        if segs.len() < 2 {
            i = ident_end(b, i).max(i + 1);
            continue;
        }
        let mut flat = String::new();
        let mut middle_select = false;
        let n = segs.len();
        for (idx, (name, sels, sel_text)) in segs.iter().enumerate() {
            if idx > 0 {
                flat.push('_');
            }
            flat.push_str(name);
            if idx + 1 < n {
                for sel in sels {
                    middle_select = true;
                    flat.push('_');
                    flat.push_str(&fold_select(sel));
                }
            } else {
                flat.push_str(sel_text);
            }
        }
        out.push_str(&s[last..i]);
        out.push_str(&flat);
        last = j;
        i = j;
        r2 += 1;
        if middle_select {
            r9 += 1;
        }
    }
    out.push_str(&s[last..]);
    (out, r2, r9)
}

/// R3: drop `pkg::` scope prefixes.
pub fn strip_packages(s: &str, _: &NormalizeOptions) -> Outcome {
    static RE: OnceLock<Regex> = OnceLock::new();
    replace_in_code(s, re(&RE, r"\$?\b[A-Za-z_][A-Za-z0-9_]*\s*::\s*"), |_| String::new())
}

/// R4: remove `else $task(...)` clauses.
pub fn strip_else_tasks(s: &str, _: &NormalizeOptions) -> Outcome {
    static RE: OnceLock<Regex> = OnceLock::new();
    let pat = re(&RE, r"\s*\belse\s*\$[A-Za-z_][A-Za-z0-9_$]*\s*");
    let mut text = s.to_string();
    let mut n = 0;
    let mut from = 0;
    loop {
        let mask = code_mask(&text);
        let Some(m) = pat.find_at(&text, from) else {
            break;
        };
        let (m_start, m_end) = (m.start(), m.end());
        let kw = m_start + m.as_str().find("else").expect("pattern has else");
        if !mask[kw] {
            from = m_end;
            continue;
        }
        let mut end = m_end;
        if text.as_bytes().get(end) == Some(&b'(') {
            match matching_paren(&text, &mask, end) {
                Some(c) => end = c + 1,
                None => end = text.len(),
            }
        }
        text.replace_range(m_start..end, "");
        from = m_start;
        n += 1;
    }
    (text, n)
}

/// R5: `s_eventually` / `eventually` (with an optional range) become `##1`.
pub fn rewrite_eventually(s: &str, _: &NormalizeOptions) -> Outcome {
    static RE: OnceLock<Regex> = OnceLock::new();
    replace_in_code(
        s,
        re(&RE, r"\b(s_eventually|eventually)\b(\s*\[[^\]]*\])?"),
        |_| "##1".into(),
    )
}

/// R6: unwrap directives nested inside another directive's parentheses.
pub fn strip_nested_directives(s: &str, _: &NormalizeOptions) -> Outcome {
    let mut text = s.to_string();
    let mut n = 0;
    loop {
        let dirs = find_directives(&text);
        let inner = dirs.iter().find(|d| {
            d.close.is_some()
                && dirs.iter().any(|o| match o.close {
                    Some(c) => o.open < d.start && d.start < c,
                    None => false,
                })
        });
        let Some(d) = inner.copied() else { break };
        let close = d.close.expect("filtered");
        let body = text[d.open + 1..close].to_string();
        let b = text.as_bytes();
        let mut end = close + 1;
        let after = skip_ws(b, end);
        if b.get(after) == Some(&b';') {
            end = after + 1;
        }
        text.replace_range(d.start..end, &format!("({body})"));
        n += 1;
    }
    (text, n)
}

/// R7: `s_until` / `s_until_with` become `##1`.
pub fn rewrite_strong_until(s: &str, _: &NormalizeOptions) -> Outcome {
    static RE: OnceLock<Regex> = OnceLock::new();
    replace_in_code(s, re(&RE, r"\b(s_until_with|s_until)\b"), |_| "##1".into())
}

/// R8: give unclocked directive bodies a `@(posedge clk)` event.
pub fn wrap_unclocked(s: &str, _: &NormalizeOptions) -> Outcome {
    let mut text = s.to_string();
    let mut n = 0;
    let dirs = find_directives(&text);
    for d in dirs.iter().rev() {
        let Some(close) = d.close else { continue };
        let mask = code_mask(&text);
        let clocked = (d.open + 1..close).any(|i| mask[i] && text.as_bytes()[i] == b'@');
        if clocked {
            continue;
        }
        let at = skip_ws(text.as_bytes(), d.open + 1);
        text.insert_str(at, "@(posedge clk) ");
        n += 1;
    }
    (text, n)
}

/// R10: `T'(x)` and `N'(x)` casts become `(x)`.
pub fn strip_casts(s: &str, _: &NormalizeOptions) -> Outcome {
    static RE: OnceLock<Regex> = OnceLock::new();
    replace_in_code(s, re(&RE, r"(\b[A-Za-z_][A-Za-z0-9_$]*|\b[0-9]+)'\("), |_| "(".into())
}

/// R11: remove comments.
pub fn strip_comments(s: &str, _: &NormalizeOptions) -> Outcome {
    let spans: Vec<_> = trivia_spans(s)
        .into_iter()
        .filter(|(_, _, k)| *k != SpanKind::Str)
        .collect();
    if spans.is_empty() {
        return (s.to_string(), 0);
    }
    let mut out = String::with_capacity(s.len());
    let mut last = 0;
    for (a, b, kind) in &spans {
        out.push_str(&s[last..*a]);
        if *kind == SpanKind::BlockComment {
            out.push(' ');
        }
        last = *b;
    }
    out.push_str(&s[last..]);
    (out, spans.len())
}

/// R12: drop unmatched `)` and close unmatched `(` at the end.
pub fn balance_parens(s: &str, _: &NormalizeOptions) -> Outcome {
    let mask = code_mask(s);
    let mut out = String::with_capacity(s.len() + 4);
    let mut depth = 0usize;
    let mut n = 0;
    for (i, ch) in s.char_indices() {
        if mask[i] {
            if ch == '(' {
                depth += 1;
            } else if ch == ')' {
                if depth == 0 {
                    n += 1;
                    continue;
                }
                depth -= 1;
            }
        }
        out.push(ch);
    }
    // A trailing line comment would swallow the closers.
    if depth > 0 && mask.last() == Some(&false) {
        out.push('\n');
    }
    for _ in 0..depth {
        out.push(')');
    }
    (out, n + depth)
}

fn pick_bound<'a>(lo: &'a str, hi: &'a str, opts: &NormalizeOptions) -> &'a str {
    match opts.collapse {
        CollapseBound::Lower => lo,
        CollapseBound::Upper if hi.trim() == "$" => lo,
        CollapseBound::Upper => hi,
    }
}

/// A plain decimal count or a bare identifier.
fn simple_count(t: &str) -> bool {
    let b = t.as_bytes();
    match b.first() {
        Some(c) if c.is_ascii_digit() => b.iter().all(|c| c.is_ascii_digit()),
        Some(c) if is_ident_start(*c) => b.iter().all(|c| is_ident_char(*c)),
        _ => false,
    }
}

/// R13: `##[a:b]` becomes `##a` (or `##b` with the upper-bound option).
pub fn collapse_delay_ranges(s: &str, opts: &NormalizeOptions) -> Outcome {
    static RE: OnceLock<Regex> = OnceLock::new();
    let pat = re(
        &RE,
        r"##\s*\[\s*(?:(\*)|(\+)|([^:\]\[]+?)\s*:\s*([^\]\[]+?))\s*\]",
    );
    replace_in_code(s, pat, |c| {
        if c.get(1).is_some() {
            return "##0".into();
        }
        if c.get(2).is_some() {
            return "##1".into();
        }
        let n = pick_bound(&c[3], &c[4], opts).trim();
        if simple_count(n) {
            format!("##{n}")
        } else {
            format!("##({n})")
        }
    })
}

/// R14: `[*a:b]` becomes `[*a]`; `[*]` and `[+]` get their lower bounds.
pub fn collapse_repeat_ranges(s: &str, opts: &NormalizeOptions) -> Outcome {
    static RE: OnceLock<Regex> = OnceLock::new();
    let pat = re(
        &RE,
        r"\[\*\s*\]|\[\+\]|\[\*\s*([^:\]\[]+?)\s*:\s*([^\]\[]+?)\s*\]",
    );
    replace_in_code(s, pat, |c| {
        let whole = &c[0];
        if whole.starts_with("[+") {
            return "[*1]".into();
        }
        match (c.get(1), c.get(2)) {
            (Some(lo), Some(hi)) => format!("[*{}]", pick_bound(lo.as_str(), hi.as_str(), opts).trim()),
            _ => "[*0]".into(),
        }
    })
}

/// R15: `[=a:b]` and `[->a:b]` keep one bound.
pub fn collapse_goto_ranges(s: &str, opts: &NormalizeOptions) -> Outcome {
    static RE: OnceLock<Regex> = OnceLock::new();
    let pat = re(&RE, r"\[(=|->)\s*([^:\]\[]+?)\s*:\s*([^\]\[]+?)\s*\]");
    replace_in_code(s, pat, |c| {
        format!("[{}{}]", &c[1], pick_bound(&c[2], &c[3], opts).trim())
    })
}

/// R16: `until` / `until_with` become `##1`.
pub fn rewrite_weak_until(s: &str, _: &NormalizeOptions) -> Outcome {
    static RE: OnceLock<Regex> = OnceLock::new();
    replace_in_code(s, re(&RE, r"\b(until_with|until)\b"), |_| "##1".into())
}

/// End of a pass/else action statement starting at `from`.
fn action_end(s: &str, mask: &[bool], from: usize) -> usize {
    let b = s.as_bytes();
    let mut nest = 0i32;
    let mut i = from;
    while i < b.len() {
        if !mask[i] {
            i += 1;
            continue;
        }
        match b[i] {
            b';' if nest <= 0 => return i,
            b'(' | b'[' | b'{' => nest += 1,
            b')' | b']' | b'}' => {
                if nest == 0 {
                    return i;
                }
                nest -= 1;
            }
            c if is_ident_start(c) && (i == 0 || !is_ident_char(b[i - 1])) => {
                let e = ident_end(b, i);
                match &s[i..e] {
                    "begin" => nest += 1,
                    "end" => {
                        nest -= 1;
                        if nest <= 0 {
                            return e;
                        }
                    }
                    _ => {}
                }
                i = e;
                continue;
            }
            _ => {}
        }
        i += 1;
    }
    b.len()
}

/// R17: drop pass and else action statements after a directive.
pub fn strip_action_blocks(s: &str, _: &NormalizeOptions) -> Outcome {
    let mut text = s.to_string();
    let mut n = 0;
    let dirs = find_directives(&text);
    for d in dirs.iter().rev() {
        let Some(close) = d.close else { continue };
        let mask = code_mask(&text);
        let b = text.as_bytes();
        let start = skip_ws(b, close + 1);
        if start >= b.len() || b[start] == b';' || b[start] == b')' || !mask[start] {
            continue;
        }
        let end = action_end(&text, &mask, start);
        text.replace_range(close + 1..end, "");
        n += 1;
    }
    (text, n)
}
