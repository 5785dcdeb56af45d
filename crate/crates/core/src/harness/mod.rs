//! Batch evaluation over JSONL benchmark rows.

pub mod config;
pub mod report;

use std::collections::HashSet;
use std::fs;
use std::io;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::normalize::{self, NormalizationReport, Profile};
use crate::pec::{self, CheckConfig, CheckError, Side, Verdict};
use crate::reward::{rlvf_reward, rwopd_weight};
use crate::syntax;
use crate::tcl::{self, TclClass};
use crate::wrapper;

pub use config::{Denominator, EvalSettings};
pub use report::{report, EvalReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalRow {
    pub id: String,
    #[serde(default)]
    pub nl: Option<String>,
    pub reference_sva: String,
    #[serde(default)]
    pub rtl_context: Option<String>,
    pub candidates: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemaError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Ingested {
    pub rows: Vec<EvalRow>,
    pub errors: Vec<SchemaError>,
    pub warnings: Vec<String>,
}

pub fn ingest(path: &Path) -> io::Result<Ingested> {
    Ok(ingest_str(&fs::read_to_string(path)?))
}

/// Parses one row per non-blank line. Bad lines are collected with their
/// 1-based line number and skipped.
pub fn ingest_str(text: &str) -> Ingested {
    let mut out = Ingested::default();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fail = |message: String| out.errors.push(SchemaError { line: line_no, message });
        let row: EvalRow = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => {
                fail(e.to_string());
                continue;
            }
        };
        if row.reference_sva.trim().is_empty() {
            fail("reference_sva is empty".into());
        } else if row.candidates.is_empty() {
            fail("candidates is empty".into());
        } else if !seen.insert(row.id.clone()) {
            fail(format!("duplicate id '{}'", row.id));
        } else {
            out.rows.push(row);
        }
    }
    if out.rows.is_empty() && out.errors.is_empty() {
        out.warnings.push("input has no rows".into());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateResult {
    pub index: usize,
    pub verdict: Option<Verdict>,
    pub syntax_ok: bool,
    pub reward_eq2: f64,
    pub reward_eq6: f64,
    /// Seconds.
    pub wall_time: f64,
    pub error: Option<String>,
    #[serde(skip)]
    pub normalization: Option<NormalizationReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowResult {
    pub id: String,
    pub reference_class: Option<TclClass>,
    pub candidates: Vec<CandidateResult>,
}

impl RowResult {
    pub fn first(&self) -> Option<&CandidateResult> {
        self.candidates.first()
    }
}

/// Normalize, parse and wrap. Returns the normalized text.
pub fn compile_gate(src: &str) -> Result<(String, NormalizationReport), String> {
    let (text, rep) = normalize::normalize(src, Profile::Pec).map_err(|e| e.to_string())?;
    let ast = syntax::parse(&text).map_err(|e| e.to_string())?;
    wrapper::wrap_ast(&ast);
    Ok((text, rep))
}

fn prepare_reference(src: &str) -> String {
    normalize::normalize(src, Profile::Pec).map_or_else(|_| src.to_string(), |(t, _)| t)
}

/// Scores one candidate against an already normalized reference.
pub fn evaluate_candidate(index: usize, candidate: &str, reference: &str, cfg: &CheckConfig) -> CandidateResult {
    let start = Instant::now();
    let mut res = CandidateResult {
        index,
        verdict: None,
        syntax_ok: false,
        reward_eq2: 0.0,
        reward_eq6: 0.0,
        wall_time: 0.0,
        error: None,
        normalization: None,
    };
    match compile_gate(candidate) {
        Err(e) => res.error = Some(format!("candidate: {e}")),
        Ok((text, rep)) => {
            res.syntax_ok = true;
            res.normalization = Some(rep);
            match pec::check_equivalence(&text, reference, cfg) {
                Ok(v) => res.verdict = Some(v),
                Err(CheckError::Syntax { side: Side::Candidate, error }) => {
                    res.syntax_ok = false;
                    res.error = Some(format!("candidate: {error}"));
                }
                Err(e) => res.error = Some(e.to_string()),
            }
        }
    }
    res.reward_eq2 = rwopd_weight(res.verdict, res.syntax_ok);
    res.reward_eq6 = rlvf_reward(res.verdict, res.syntax_ok);
    res.wall_time = start.elapsed().as_secs_f64();
    res
}

fn panic_message(p: &(dyn std::any::Any + Send)) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}

/// Checks every (row, candidate) pair on a fixed pool of `workers` threads.
/// Output is ordered by row id, then candidate index.
pub fn run_batch(rows: &[EvalRow], cfg: &CheckConfig, workers: usize) -> Vec<RowResult> {
    let refs: Vec<String> = rows.iter().map(|r| prepare_reference(&r.reference_sva)).collect();
    let tasks: Vec<(usize, usize)> = rows
        .iter()
        .enumerate()
        .flat_map(|(r, row)| (0..row.candidates.len()).map(move |c| (r, c)))
        .collect();
    let slots: Vec<Mutex<Option<CandidateResult>>> = tasks.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..workers.max(1).min(tasks.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(r, c)) = tasks.get(i) else { break };
                let cand = &rows[r].candidates[c];
                let start = Instant::now();
                let res = panic::catch_unwind(AssertUnwindSafe(|| evaluate_candidate(c, cand, &refs[r], cfg)))
                    .unwrap_or_else(|p| CandidateResult {
                        index: c,
                        verdict: None,
                        syntax_ok: false,
                        reward_eq2: 0.0,
                        reward_eq6: 0.0,
                        wall_time: start.elapsed().as_secs_f64(),
                        error: Some(format!("internal error: {}", panic_message(p.as_ref()))),
                        normalization: None,
                    });
                *slots[i].lock().unwrap_or_else(|e| e.into_inner()) = Some(res);
            });
        }
    });
    let mut results: Vec<RowResult> = rows
        .iter()
        .map(|row| RowResult {
            id: row.id.clone(),
            reference_class: tcl::classify(&row.reference_sva).ok(),
            candidates: Vec::with_capacity(row.candidates.len()),
        })
        .collect();
    for (slot, &(r, _)) in slots.into_iter().zip(&tasks) {
        let res = slot.into_inner().unwrap_or_else(|e| e.into_inner()).expect("every task ran");
        results[r].candidates.push(res);
    }
    for r in &mut results {
        r.candidates.sort_by_key(|c| c.index);
    }
    results.sort_by(|a, b| a.id.cmp(&b.id));
    results
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, reference: &str, cands: &[&str]) -> EvalRow {
        EvalRow {
            id: id.into(),
            nl: None,
            reference_sva: reference.into(),
            rtl_context: None,
            candidates: cands.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn ingest_reports_lines() {
        let text = concat!(
            r#"{"id":"a","reference_sva":"x |-> y","candidates":["x |-> y"]}"#,
            "\n\n",
            r#"{"id":"b","candidates":["x"]}"#,
            "\nnot json\n",
            r#"{"id":"a","reference_sva":"x","candidates":["x"]}"#,
            "\n",
        );
        let got = ingest_str(text);
        assert_eq!(got.rows.len(), 1);
        let lines: Vec<usize> = got.errors.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![3, 4, 5]);
        assert!(got.errors[2].message.contains("duplicate"));
        let empty = ingest_str("");
        assert!(empty.rows.is_empty() && !empty.warnings.is_empty());
    }

    #[test]
    fn garbage_candidate() {
        let r = evaluate_candidate(0, "###garbage", "a |-> b", &CheckConfig::default().with_depth(4));
        assert!(!r.syntax_ok);
        assert_eq!((r.reward_eq2, r.reward_eq6), (0.0, 0.0));
        assert!(r.verdict.is_none());
    }

    #[test]
    fn workers_agree() {
        let rows = vec![
            row("r2", "a |-> b", &["b |-> a", "a |-> b"]),
            row("r1", "a && b", &["b && a"]),
            row("r3", "a |-> b", &["a |=> b"]),
            row("r4", "s_eventually a", &["a"]),
        ];
        let cfg = CheckConfig::default().with_depth(6);
        let strip = |rs: Vec<RowResult>| -> Vec<(String, Vec<Option<Verdict>>)> {
            rs.into_iter()
                .map(|r| (r.id, r.candidates.iter().map(|c| c.verdict).collect()))
                .collect()
        };
        let one = strip(run_batch(&rows, &cfg, 1));
        assert_eq!(one, strip(run_batch(&rows, &cfg, 3)));
        assert_eq!(one[0].0, "r1");
        assert_eq!(one[1].1, vec![Some(Verdict::NotEquivalent), Some(Verdict::Equivalent)]);
    }
}
