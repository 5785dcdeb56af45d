//! Running an SMT-LIB script: through `z3` in a child process, or through a
//! builtin reader that bit-blasts the Boolean fragment into a SAT solver.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use varisat::{ExtendFormula, Lit, Solver};

use super::sexp::{parse_all, Sexp};
use super::SolverKind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Sat(BTreeMap<String, bool>),
    Unsat,
    /// Solver gave up or ran out of time.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct SolverError(pub String);

/// Path of `z3` on `PATH`, if any.
pub fn find_z3() -> Option<PathBuf> {
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path)
        .map(|d| d.join("z3"))
        .find(|p| p.is_file())
}

pub fn solve(script: &str, kind: SolverKind, timeout: Duration) -> Result<SolveResult, SolverError> {
    match kind {
        SolverKind::Builtin => solve_builtin(script, timeout),
        SolverKind::Z3 => {
            let z3 = find_z3().ok_or_else(|| SolverError("z3 not found on PATH".into()))?;
            solve_external(&z3, script, timeout)
        }
        SolverKind::Auto => match find_z3() {
            Some(z3) => solve_external(&z3, script, timeout),
            None => solve_builtin(script, timeout),
        },
    }
}

pub fn solve_external(bin: &PathBuf, script: &str, timeout: Duration) -> Result<SolveResult, SolverError> {
    let mut child = Command::new(bin)
        .args(["-in", "-smt2"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| SolverError(format!("cannot start {}: {e}", bin.display())))?;
    let mut stdin = child.stdin.take().expect("piped stdin");
    let input = script.to_string();
    let writer = thread::spawn(move || {
        let _ = stdin.write_all(input.as_bytes());
    });
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let deadline = Instant::now() + timeout;
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) if Instant::now() >= deadline => {
                let _ = child.kill();
                let _ = child.wait();
                let _ = writer.join();
                let _ = reader.join();
                return Ok(SolveResult::Unknown);
            }
            Ok(None) => thread::sleep(Duration::from_millis(2)),
            Err(e) => return Err(SolverError(e.to_string())),
        }
    }
    let _ = writer.join();
    let out = reader.join().map_err(|_| SolverError("reader thread panicked".into()))?;
    parse_response(&out)
}

/// Reads `sat`/`unsat`/`unknown` followed by an optional model.
pub fn parse_response(out: &str) -> Result<SolveResult, SolverError> {
    let exprs = parse_all(out).map_err(|e| SolverError(format!("unreadable solver output: {e}")))?;
    let mut it = exprs.iter();
    let status = it.next().and_then(Sexp::atom);
    match status {
        Some("unsat") => Ok(SolveResult::Unsat),
        Some("unknown") => Ok(SolveResult::Unknown),
        Some("sat") => {
            let mut model = BTreeMap::new();
            if let Some(Sexp::List(defs)) = it.next() {
                for d in defs {
                    // (define-fun name () Bool value)
                    if let Some([Sexp::Atom(kw), Sexp::Atom(name), _, _, value]) = d.list() {
                        if kw == "define-fun" {
                            if let Some(v) = value.atom().and_then(|v| v.parse::<bool>().ok()) {
                                model.insert(name.clone(), v);
                            }
                        }
                    }
                }
            }
            Ok(SolveResult::Sat(model))
        }
        _ => Err(SolverError(format!("unexpected solver output: {}", out.trim()))),
    }
}

#[derive(Clone, Copy)]
enum Val {
    Const(bool),
    Lit(Lit),
}

struct Blaster {
    solver: Solver<'static>,
    env: HashMap<String, Val>,
    declared: Vec<(String, Lit)>,
}

impl Blaster {
    fn fresh(&mut self) -> Lit {
        self.solver.new_lit()
    }

    fn not(v: Val) -> Val {
        match v {
            Val::Const(b) => Val::Const(!b),
            Val::Lit(l) => Val::Lit(!l),
        }
    }

    fn and(&mut self, xs: Vec<Val>) -> Val {
        let mut lits = Vec::new();
        for x in xs {
            match x {
                Val::Const(false) => return Val::Const(false),
                Val::Const(true) => {}
                Val::Lit(l) => lits.push(l),
            }
        }
        match lits.len() {
            0 => Val::Const(true),
            1 => Val::Lit(lits[0]),
            _ => {
                let g = self.fresh();
                let mut big = vec![g];
                for &l in &lits {
                    self.solver.add_clause(&[!g, l]);
                    big.push(!l);
                }
                self.solver.add_clause(&big);
                Val::Lit(g)
            }
        }
    }

    fn or(&mut self, xs: Vec<Val>) -> Val {
        let neg = xs.into_iter().map(Self::not).collect();
        Self::not(self.and(neg))
    }

    fn xor(&mut self, a: Val, b: Val) -> Val {
        match (a, b) {
            (Val::Const(x), Val::Const(y)) => Val::Const(x ^ y),
            (Val::Const(c), v) | (v, Val::Const(c)) => {
                if c {
                    Self::not(v)
                } else {
                    v
                }
            }
            (Val::Lit(x), Val::Lit(y)) => {
                let g = self.fresh();
                self.solver.add_clause(&[!g, x, y]);
                self.solver.add_clause(&[!g, !x, !y]);
                self.solver.add_clause(&[g, !x, y]);
                self.solver.add_clause(&[g, x, !y]);
                Val::Lit(g)
            }
        }
    }

    fn ite(&mut self, c: Val, a: Val, b: Val) -> Val {
        let t = self.and(vec![c, a]);
        let e = self.and(vec![Self::not(c), b]);
        self.or(vec![t, e])
    }

    fn expr(&mut self, e: &Sexp) -> Result<Val, SolverError> {
        match e {
            Sexp::Atom(a) => match a.as_str() {
                "true" => Ok(Val::Const(true)),
                "false" => Ok(Val::Const(false)),
                name => self
                    .env
                    .get(name)
                    .copied()
                    .ok_or_else(|| SolverError(format!("unknown symbol {name}"))),
            },
            Sexp::Str(_) => Err(SolverError("string in Boolean term".into())),
            Sexp::List(items) => {
                let (head, args) = items
                    .split_first()
                    .ok_or_else(|| SolverError("empty application".into()))?;
                let op = head.atom().ok_or_else(|| SolverError(format!("bad operator {head}")))?;
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.expr(a)?);
                }
                let arity = |n: usize| {
                    if vals.len() == n {
                        Ok(())
                    } else {
                        Err(SolverError(format!("{op} expects {n} arguments")))
                    }
                };
                Ok(match op {
                    "not" => {
                        arity(1)?;
                        Self::not(vals[0])
                    }
                    "and" => self.and(vals),
                    "or" => self.or(vals),
                    "xor" => {
                        let mut acc = Val::Const(false);
                        for v in vals {
                            acc = self.xor(acc, v);
                        }
                        acc
                    }
                    "=>" => {
                        let (last, init) = vals.split_last().ok_or_else(|| SolverError("=> needs arguments".into()))?;
                        let mut disj: Vec<Val> = init.iter().map(|v| Self::not(*v)).collect();
                        disj.push(*last);
                        self.or(disj)
                    }
                    "=" => {
                        let mut eqs = Vec::new();
                        for w in vals.windows(2) {
                            let x = self.xor(w[0], w[1]);
                            eqs.push(Self::not(x));
                        }
                        self.and(eqs)
                    }
                    "distinct" => {
                        arity(2)?;
                        self.xor(vals[0], vals[1])
                    }
                    "ite" => {
                        arity(3)?;
                        self.ite(vals[0], vals[1], vals[2])
                    }
                    other => return Err(SolverError(format!("unsupported operator {other}"))),
                })
            }
        }
    }
}

/// Everything needed to run the SAT search on another thread.
struct Problem {
    solver: Solver<'static>,
    declared: Vec<(String, Lit)>,
    trivially_unsat: bool,
}

fn build(script: &str) -> Result<Problem, SolverError> {
    let cmds = parse_all(script).map_err(|e| SolverError(e.to_string()))?;
    let mut bl = Blaster {
        solver: Solver::new(),
        env: HashMap::new(),
        declared: Vec::new(),
    };
    let mut unsat = false;
    let mut checked = false;
    for cmd in &cmds {
        let items = cmd.list().ok_or_else(|| SolverError(format!("not a command: {cmd}")))?;
        let name = items.first().and_then(Sexp::atom).unwrap_or("");
        match (name, items) {
            ("declare-const", [_, Sexp::Atom(sym), Sexp::Atom(sort)]) | ("declare-fun", [_, Sexp::Atom(sym), Sexp::List(_), Sexp::Atom(sort)])
                if sort == "Bool" =>
            {
                let l = bl.fresh();
                bl.env.insert(sym.clone(), Val::Lit(l));
                bl.declared.push((sym.clone(), l));
            }
            ("define-fun", [_, Sexp::Atom(sym), Sexp::List(params), Sexp::Atom(sort), body]) if params.is_empty() && sort == "Bool" => {
                let v = bl.expr(body)?;
                bl.env.insert(sym.clone(), v);
            }
            ("assert", [_, body]) => match bl.expr(body)? {
                Val::Const(true) => {}
                Val::Const(false) => unsat = true,
                Val::Lit(l) => bl.solver.add_clause(&[l]),
            },
            ("check-sat", _) => {
                if checked {
                    return Err(SolverError("only one check-sat is supported".into()));
                }
                checked = true;
            }
            ("set-logic" | "set-option" | "set-info" | "get-model" | "exit", _) => {}
            _ => return Err(SolverError(format!("unsupported command {cmd}"))),
        }
    }
    if !checked {
        return Err(SolverError("script has no check-sat".into()));
    }
    Ok(Problem {
        solver: bl.solver,
        declared: bl.declared,
        trivially_unsat: unsat,
    })
}

/// Solves with the builtin SAT backend. The SAT search cannot be
/// interrupted, so on timeout it is left to finish on its own thread.
pub fn solve_builtin(script: &str, timeout: Duration) -> Result<SolveResult, SolverError> {
    let (tx, rx) = mpsc::channel();
    let script = script.to_string();
    thread::spawn(move || {
        let _ = tx.send(run_builtin(&script));
    });
    match rx.recv_timeout(timeout) {
        Ok(r) => r,
        Err(mpsc::RecvTimeoutError::Timeout) => Ok(SolveResult::Unknown),
        Err(mpsc::RecvTimeoutError::Disconnected) => Err(SolverError("solver thread panicked".into())),
    }
}

fn run_builtin(script: &str) -> Result<SolveResult, SolverError> {
    let mut p = build(script)?;
    if p.trivially_unsat {
        return Ok(SolveResult::Unsat);
    }
    match p.solver.solve() {
        Ok(true) => {
            let pos: HashSet<Lit> = p.solver.model().unwrap_or_default().into_iter().collect();
            let m = p.declared.iter().map(|(n, l)| (n.clone(), pos.contains(l))).collect();
            Ok(SolveResult::Sat(m))
        }
        Ok(false) => Ok(SolveResult::Unsat),
        Err(e) => Err(SolverError(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const T: Duration = Duration::from_secs(10);

    #[test]
    fn builtin_sat_and_unsat() {
        let sat = "(declare-const x Bool)(declare-const y Bool)(define-fun g () Bool (and x (not y)))(assert g)(check-sat)(get-model)";
        assert_eq!(
            solve_builtin(sat, T).unwrap(),
            SolveResult::Sat(BTreeMap::from([("x".into(), true), ("y".into(), false)]))
        );
        let unsat = "(declare-const x Bool)(assert (and x (not x)))(check-sat)";
        assert_eq!(solve_builtin(unsat, T).unwrap(), SolveResult::Unsat);
        let xor = "(declare-const a Bool)(declare-const b Bool)(assert (xor a b))(assert (= a true))(check-sat)";
        assert_eq!(
            solve_builtin(xor, T).unwrap(),
            SolveResult::Sat(BTreeMap::from([("a".into(), true), ("b".into(), false)]))
        );
        assert!(solve_builtin("(assert (foo))(check-sat)", T).is_err());
    }

    #[test]
    fn response_parsing() {
        let out = "sat\n(\n  (define-fun |b@1| () Bool\n    false)\n  (define-fun |a@0| () Bool\n    true)\n)\n";
        assert_eq!(
            parse_response(out).unwrap(),
            SolveResult::Sat(BTreeMap::from([("a@0".into(), true), ("b@1".into(), false)]))
        );
        assert_eq!(parse_response("unsat\n(error \"model is not available\")").unwrap(), SolveResult::Unsat);
    }
}
