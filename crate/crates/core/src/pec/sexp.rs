//! Minimal S-expression reader for SMT-LIB text.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    /// Symbol, keyword or numeral. Quoted symbols keep their bars stripped.
    Atom(String),
    Str(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(l) => Some(l),
            _ => None,
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => write!(f, "{a}"),
            Sexp::Str(s) => write!(f, "\"{s}\""),
            Sexp::List(items) => {
                write!(f, "(")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("s-expression error at byte {pos}: {msg}")]
pub struct SexpError {
    pub pos: usize,
    pub msg: String,
}

/// Reads every top-level expression in `src`.
pub fn parse_all(src: &str) -> Result<Vec<Sexp>, SexpError> {
    let b = src.as_bytes();
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let mut i = 0;
    let err = |pos, msg: &str| SexpError {
        pos,
        msg: msg.to_string(),
    };
    while i < b.len() {
        match b[i] {
            c if c.is_ascii_whitespace() => i += 1,
            b';' => {
                while i < b.len() && b[i] != b'\n' {
                    i += 1;
                }
            }
            b'(' => {
                stack.push(Vec::new());
                i += 1;
            }
            b')' => {
                if stack.len() < 2 {
                    return Err(err(i, "unbalanced ')'"));
                }
                let done = stack.pop().expect("checked depth");
                stack.last_mut().expect("outer level").push(Sexp::List(done));
                i += 1;
            }
            b'|' => {
                let end = src[i + 1..].find('|').ok_or_else(|| err(i, "unterminated quoted symbol"))?;
                stack
                    .last_mut()
                    .expect("outer level")
                    .push(Sexp::Atom(src[i + 1..i + 1 + end].to_string()));
                i += end + 2;
            }
            b'"' => {
                let mut j = i + 1;
                let mut s = String::new();
                loop {
                    match b.get(j) {
                        None => return Err(err(i, "unterminated string")),
                        Some(b'"') if b.get(j + 1) == Some(&b'"') => {
                            s.push('"');
                            j += 2;
                        }
                        Some(b'"') => break,
                        Some(_) => {
                            let ch = src[j..].chars().next().expect("in bounds");
                            s.push(ch);
                            j += ch.len_utf8();
                        }
                    }
                }
                stack.last_mut().expect("outer level").push(Sexp::Str(s));
                i = j + 1;
            }
            _ => {
                let start = i;
                while i < b.len() && !b[i].is_ascii_whitespace() && !matches!(b[i], b'(' | b')' | b';' | b'"' | b'|') {
                    i += 1;
                }
                stack
                    .last_mut()
                    .expect("outer level")
                    .push(Sexp::Atom(src[start..i].to_string()));
            }
        }
    }
    if stack.len() != 1 {
        return Err(err(b.len(), "unclosed '('"));
    }
    Ok(stack.pop().expect("top level"))
}
