//! Property-equivalence checking over free-input bounded traces.
//!
//! Two one-sided checks decide the verdict. Check 1 assumes the candidate
//! and asserts the reference; check 2 swaps them. Each check fails when some
//! trace of `depth` cycles satisfies the assumed property and violates the
//! asserted one.
//!
//! | check 1 | check 2 | verdict            |
//! |---------|---------|--------------------|
//! | pass    | pass    | `EQUIVALENT`       |
//! | pass    | fail    | `IMPLIES_REF_TO_LM`|
//! | fail    | pass    | `IMPLIES_LM_TO_REF`|
//! | fail    | fail    | `NOT_EQUIVALENT`   |
//!
//! A timeout on either side, or a construct outside the bounded fragment,
//! yields `UNSUPPORTED` with a reason.

pub mod enumerate;
pub mod eval;
pub mod ir;
pub mod lower;
pub mod sexp;
pub mod smt;
pub mod solver;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{self, ParseError};

pub use eval::{eval_property, TraceAssignment};
pub use ir::Lowered;
pub use lower::lower;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnsupportedReason {
    Liveness,
    MultiClock,
    UnboundedRange,
    GotoRepeat,
    UnsupportedFn,
    Timeout,
}

impl UnsupportedReason {
    pub fn as_str(self) -> &'static str {
        match self {
            UnsupportedReason::Liveness => "liveness",
            UnsupportedReason::MultiClock => "multi_clock",
            UnsupportedReason::UnboundedRange => "unbounded_range",
            UnsupportedReason::GotoRepeat => "goto_repeat",
            UnsupportedReason::UnsupportedFn => "unsupported_fn",
            UnsupportedReason::Timeout => "timeout",
        }
    }
}

impl fmt::Display for UnsupportedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A construct the bounded engine refuses.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unsupported ({reason}): {detail}")]
pub struct Unsupported {
    pub reason: UnsupportedReason,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Equivalent,
    /// Candidate is strictly stricter than the reference.
    ImpliesRefToLm,
    /// Candidate is strictly more permissive than the reference.
    ImpliesLmToRef,
    NotEquivalent,
    Unsupported(UnsupportedReason),
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Equivalent => "EQUIVALENT",
            Verdict::ImpliesRefToLm => "IMPLIES_REF_TO_LM",
            Verdict::ImpliesLmToRef => "IMPLIES_LM_TO_REF",
            Verdict::NotEquivalent => "NOT_EQUIVALENT",
            Verdict::Unsupported(_) => "UNSUPPORTED",
        }
    }

    pub fn is_decided(self) -> bool {
        !matches!(self, Verdict::Unsupported(_))
    }

    pub fn is_one_sided(self) -> bool {
        matches!(self, Verdict::ImpliesRefToLm | Verdict::ImpliesLmToRef)
    }

    /// The verdict with candidate and reference exchanged.
    pub fn swapped(self) -> Verdict {
        match self {
            Verdict::ImpliesRefToLm => Verdict::ImpliesLmToRef,
            Verdict::ImpliesLmToRef => Verdict::ImpliesRefToLm,
            v => v,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Unsupported(r) => write!(f, "UNSUPPORTED({r})"),
            v => f.write_str(v.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Enumerate,
    Smt,
}

impl FromStr for Backend {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "enumerate" => Ok(Backend::Enumerate),
            "smt" => Ok(Backend::Smt),
            other => Err(format!("unknown backend '{other}' (expected enumerate or smt)")),
        }
    }
}

/// Which solver reads the emitted SMT-LIB script.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// `z3` from `PATH` when present, otherwise the builtin solver.
    #[default]
    Auto,
    Builtin,
    Z3,
}

impl FromStr for SolverKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(SolverKind::Auto),
            "builtin" => Ok(SolverKind::Builtin),
            "z3" => Ok(SolverKind::Z3),
            other => Err(format!("unknown solver '{other}' (expected auto, builtin or z3)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub depth: usize,
    pub timeout: Duration,
    pub backend: Backend,
    pub max_enum_bits: u32,
    pub solver: SolverKind,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            depth: 20,
            timeout: Duration::from_secs(60),
            backend: Backend::Enumerate,
            max_enum_bits: 20,
            solver: SolverKind::Auto,
        }
    }
}

impl CheckConfig {
    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn validate(&self) -> Result<(), CheckError> {
        if self.depth == 0 {
            return Err(CheckError::Config("depth must be at least 1".into()));
        }
        if self.timeout.is_zero() {
            return Err(CheckError::Config("timeout must be positive".into()));
        }
        if self.max_enum_bits > 40 {
            return Err(CheckError::Config("max_enum_bits above 40 is not enumerable".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", content = "counterexample", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BmcOutcome {
    Pass,
    Fail(TraceAssignment),
    Timeout,
}

impl BmcOutcome {
    pub fn is_fail(&self) -> bool {
        matches!(self, BmcOutcome::Fail(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Candidate,
    Reference,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Candidate => "candidate",
            Side::Reference => "reference",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("{side} does not parse: {error}")]
    Syntax { side: Side, error: ParseError },
    #[error("{signals} signals x depth {depth} exceeds the enumeration limit of {max} bits")]
    Capacity { signals: usize, depth: usize, max: u32 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(String),
}

/// Pure mapping from the two one-sided outcomes to a verdict.
pub fn verdict_from(forward: &BmcOutcome, backward: &BmcOutcome) -> Verdict {
    use BmcOutcome::*;
    match (forward, backward) {
        (Timeout, _) | (_, Timeout) => Verdict::Unsupported(UnsupportedReason::Timeout),
        (Pass, Pass) => Verdict::Equivalent,
        (Pass, Fail(_)) => Verdict::ImpliesRefToLm,
        (Fail(_), Pass) => Verdict::ImpliesLmToRef,
        (Fail(_), Fail(_)) => Verdict::NotEquivalent,
    }
}

/// Verdict with the evidence behind it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    #[serde(flatten)]
    pub verdict: Verdict,
    /// Assume candidate, assert reference.
    pub forward: Option<BmcOutcome>,
    /// Assume reference, assert candidate.
    pub backward: Option<BmcOutcome>,
    pub detail: Option<String>,
}

fn parse_side(src: &str, side: Side) -> Result<syntax::Node, CheckError> {
    syntax::parse(src).map_err(|error| CheckError::Syntax { side, error })
}

/// Lowers both sides; the stronger refusal reason wins when both refuse.
fn lower_pair(cand: &syntax::Node, refr: &syntax::Node) -> Result<(Lowered, Lowered), Unsupported> {
    match (lower(cand), lower(refr)) {
        (Ok(c), Ok(r)) => Ok((c, r)),
        (Err(a), Err(b)) => Err(if b.reason < a.reason { b } else { a }),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

/// One direction: FAIL when some trace satisfies `assumed` and violates
/// `asserted`.
pub fn bmc_check(assumed: &Lowered, asserted: &Lowered, cfg: &CheckConfig) -> Result<BmcOutcome, CheckError> {
    cfg.validate()?;
    let deadline = Instant::now() + cfg.timeout;
    match cfg.backend {
        Backend::Enumerate => enumerate::bmc(assumed, asserted, cfg, deadline),
        Backend::Smt => smt::bmc(assumed, asserted, cfg, deadline),
    }
}

pub fn check_lowered(cand: &Lowered, refr: &Lowered, cfg: &CheckConfig) -> Result<(BmcOutcome, BmcOutcome), CheckError> {
    cfg.validate()?;
    let deadline = Instant::now() + cfg.timeout;
    match cfg.backend {
        Backend::Enumerate => enumerate::both(cand, refr, cfg, deadline),
        Backend::Smt => {
            let fwd = smt::bmc(cand, refr, cfg, deadline)?;
            if fwd == BmcOutcome::Timeout {
                return Ok((fwd, BmcOutcome::Timeout));
            }
            let bwd = smt::bmc(refr, cand, cfg, deadline)?;
            Ok((fwd, bwd))
        }
    }
}

pub fn check_equivalence_report(candidate: &str, reference: &str, cfg: &CheckConfig) -> Result<CheckReport, CheckError> {
    cfg.validate()?;
    let cand = parse_side(candidate, Side::Candidate)?;
    let refr = parse_side(reference, Side::Reference)?;
    let (c, r) = match lower_pair(&cand, &refr) {
        Ok(pair) => pair,
        Err(u) => {
            return Ok(CheckReport {
                verdict: Verdict::Unsupported(u.reason),
                forward: None,
                backward: None,
                detail: Some(u.detail),
            })
        }
    };
    let (fwd, bwd) = check_lowered(&c, &r, cfg)?;
    Ok(CheckReport {
        verdict: verdict_from(&fwd, &bwd),
        forward: Some(fwd),
        backward: Some(bwd),
        detail: None,
    })
}

pub fn check_equivalence(candidate: &str, reference: &str, cfg: &CheckConfig) -> Result<Verdict, CheckError> {
    check_equivalence_report(candidate, reference, cfg).map(|r| r.verdict)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(depth: usize) -> CheckConfig {
        CheckConfig::default().with_depth(depth)
    }

    #[test]
    fn matrix() {
        let t = TraceAssignment::new(1);
        let f = || BmcOutcome::Fail(t.clone());
        assert_eq!(verdict_from(&BmcOutcome::Pass, &BmcOutcome::Pass), Verdict::Equivalent);
        assert_eq!(verdict_from(&BmcOutcome::Pass, &f()), Verdict::ImpliesRefToLm);
        assert_eq!(verdict_from(&f(), &BmcOutcome::Pass), Verdict::ImpliesLmToRef);
        assert_eq!(verdict_from(&f(), &f()), Verdict::NotEquivalent);
        assert_eq!(
            verdict_from(&BmcOutcome::Timeout, &f()),
            Verdict::Unsupported(UnsupportedReason::Timeout)
        );
    }

    #[test]
    fn smoke_pairs() {
        let c = cfg(6);
        assert_eq!(check_equivalence("a |-> b", "a |-> b", &c).unwrap(), Verdict::Equivalent);
        assert_eq!(check_equivalence("b |-> a", "a |-> b", &c).unwrap(), Verdict::NotEquivalent);
        assert_eq!(check_equivalence("a |=> b", "a |-> b", &c).unwrap(), Verdict::NotEquivalent);
        assert_eq!(check_equivalence("a && b", "b && a", &c).unwrap(), Verdict::Equivalent);
        assert_eq!(check_equivalence("a |-> ##1 b", "a |=> b", &c).unwrap(), Verdict::Equivalent);
        assert_eq!(
            check_equivalence("a |-> (b && c)", "a |-> b", &cfg(4)).unwrap(),
            Verdict::ImpliesRefToLm
        );
        assert_eq!(
            check_equivalence("a |-> b", "a |-> (b && c)", &cfg(4)).unwrap(),
            Verdict::ImpliesLmToRef
        );
        assert_eq!(
            check_equivalence("a", "s_eventually a", &c).unwrap(),
            Verdict::Unsupported(UnsupportedReason::Liveness)
        );
    }

    #[test]
    fn counterexample_is_lexicographically_first() {
        let a = lower(&syntax::parse("a |-> b").unwrap()).unwrap();
        let b = lower(&syntax::parse("a |=> b").unwrap()).unwrap();
        let out = bmc_check(&a, &b, &cfg(3)).unwrap();
        let BmcOutcome::Fail(t) = out else { panic!("expected a failure") };
        assert!(eval_property(&a, &t));
        assert!(!eval_property(&b, &t));
        assert_eq!(t.describe(), "a=010 b=010");
    }

    #[test]
    fn syntax_errors_name_the_side() {
        let e = check_equivalence("a |-> |-> b", "a", &cfg(2)).unwrap_err();
        assert!(matches!(e, CheckError::Syntax { side: Side::Candidate, .. }));
    }

    #[test]
    fn verdict_json() {
        let v = serde_json::to_string(&Verdict::Unsupported(UnsupportedReason::Liveness)).unwrap();
        assert_eq!(v, r#"{"verdict":"UNSUPPORTED","reason":"liveness"}"#);
        assert_eq!(serde_json::to_string(&Verdict::Equivalent).unwrap(), r#"{"verdict":"EQUIVALENT"}"#);
    }
}
