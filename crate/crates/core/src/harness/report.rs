//! Aggregation of batch results into Func@1, abstention and pass@k figures.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;

use serde::Serialize;

use super::config::Denominator;
use super::RowResult;
use crate::metrics::{pass_at_k_table, PassAtKEntry, TaskOutcome};
use crate::normalize::RuleStats;
use crate::pec::Verdict;

pub const SCHEMA_VERSION: u32 = 1;
pub const PASS_AT_K: [u64; 3] = [1, 5, 10];
const BOOTSTRAP_REPLICATES: usize = 10_000;
const BOOTSTRAP_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Rates {
    pub denominator: usize,
    pub strict_count: usize,
    pub relaxed_count: usize,
    pub strict: f64,
    pub relaxed: f64,
}

impl Rates {
    fn new(strict_count: usize, relaxed_count: usize, denominator: usize) -> Self {
        let frac = |n: usize| if denominator == 0 { 0.0 } else { n as f64 / denominator as f64 };
        Rates {
            denominator,
            strict_count,
            relaxed_count,
            strict: frac(strict_count),
            relaxed: frac(relaxed_count),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ClassBreakdown {
    pub rows: usize,
    pub strict: usize,
    pub relaxed: usize,
    pub abstentions: usize,
    pub syntax_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassAtK {
    pub k: u64,
    pub strict: PassAtKEntry,
    pub relaxed: PassAtKEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub rows: usize,
    pub candidates: usize,
    pub denominator: Denominator,
    /// Headline figures under `denominator`.
    pub strict_func_at_1: f64,
    pub relaxed_func_at_1: f64,
    pub all: Rates,
    pub supported: Rates,
    pub abstentions: usize,
    pub abstention_reasons: BTreeMap<String, usize>,
    /// First candidates that passed the compile gate but got no verdict.
    pub errors: usize,
    pub syntax_failures: usize,
    pub verdicts: BTreeMap<String, usize>,
    pub per_class: BTreeMap<String, ClassBreakdown>,
    pub pass_at_k: Vec<PassAtK>,
    pub mean_reward_eq2: f64,
    pub mean_reward_eq6: f64,
    pub rule_stats: RuleStats,
}

fn is_strict(v: Option<Verdict>) -> bool {
    v == Some(Verdict::Equivalent)
}

fn is_relaxed(v: Option<Verdict>) -> bool {
    matches!(v, Some(Verdict::Equivalent | Verdict::ImpliesRefToLm | Verdict::ImpliesLmToRef))
}

pub fn report(results: &[RowResult], denominator: Denominator) -> EvalReport {
    let mut strict = 0;
    let mut relaxed = 0;
    let mut abstentions = 0;
    let mut errors = 0;
    let mut syntax_failures = 0;
    let mut reasons = BTreeMap::new();
    let mut verdicts = BTreeMap::new();
    let mut per_class: BTreeMap<String, ClassBreakdown> = BTreeMap::new();
    let mut rule_stats = RuleStats::default();
    let mut rewards = (0.0, 0.0, 0usize);

    for row in results {
        for c in &row.candidates {
            rewards.0 += c.reward_eq2;
            rewards.1 += c.reward_eq6;
            rewards.2 += 1;
            match &c.normalization {
                Some(rep) => rule_stats.add(rep),
                None => {
                    rule_stats.rows += 1;
                    rule_stats.errors += 1;
                }
            }
        }
        let key = row.reference_class.map_or("unclassified".to_string(), |c| c.to_string());
        let class = per_class.entry(key).or_default();
        class.rows += 1;
        let Some(first) = row.first() else { continue };
        let v = first.verdict;
        *verdicts.entry(v.map_or("NONE".to_string(), |v| v.name().to_string())).or_insert(0) += 1;
        if is_strict(v) {
            strict += 1;
            class.strict += 1;
        }
        if is_relaxed(v) {
            relaxed += 1;
            class.relaxed += 1;
        }
        match v {
            Some(Verdict::Unsupported(r)) => {
                abstentions += 1;
                class.abstentions += 1;
                *reasons.entry(r.as_str().to_string()).or_insert(0) += 1;
            }
            None if first.syntax_ok => errors += 1,
            None => {
                syntax_failures += 1;
                class.syntax_failures += 1;
            }
            _ => {}
        }
    }

    let n = results.len();
    let all = Rates::new(strict, relaxed, n);
    let supported = Rates::new(strict, relaxed, n - abstentions - errors);
    let headline = match denominator {
        Denominator::All => all,
        Denominator::Supported => supported,
    };
    let mean = |x: f64| if rewards.2 == 0 { 0.0 } else { x / rewards.2 as f64 };
    EvalReport {
        schema_version: SCHEMA_VERSION,
        rows: n,
        candidates: rewards.2,
        denominator,
        strict_func_at_1: headline.strict,
        relaxed_func_at_1: headline.relaxed,
        all,
        supported,
        abstentions,
        abstention_reasons: reasons,
        errors,
        syntax_failures,
        verdicts,
        per_class,
        pass_at_k: pass_at_k_rows(results),
        mean_reward_eq2: mean(rewards.0),
        mean_reward_eq6: mean(rewards.1),
        rule_stats,
    }
}

fn pass_at_k_rows(results: &[RowResult]) -> Vec<PassAtK> {
    if results.iter().all(|r| r.candidates.len() <= 1) {
        return Vec::new();
    }
    let outcomes = |pred: fn(Option<Verdict>) -> bool| -> Vec<TaskOutcome> {
        results
            .iter()
            .filter(|r| !r.candidates.is_empty())
            .map(|r| TaskOutcome {
                task_id: r.id.clone(),
                n: r.candidates.len() as u64,
                c: r.candidates.iter().filter(|c| pred(c.verdict)).count() as u64,
            })
            .collect()
    };
    let table = |tasks: Vec<TaskOutcome>| {
        pass_at_k_table(&tasks, &PASS_AT_K, BOOTSTRAP_REPLICATES, BOOTSTRAP_SEED, 0.95).expect("tasks are well formed")
    };
    let s = table(outcomes(is_strict));
    let r = table(outcomes(is_relaxed));
    s.into_iter()
        .zip(r)
        .map(|(strict, relaxed)| PassAtK {
            k: strict.k,
            strict,
            relaxed,
        })
        .collect()
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let pct = |x: f64| format!("{:6.2}%", 100.0 * x);
        let _ = writeln!(s, "rows {}  candidates {}", self.rows, self.candidates);
        let _ = writeln!(s, "{:<22}{:>10}{:>10}{:>8}", "", "strict", "relaxed", "denom");
        for (name, r) in [("Func@1 (all)", &self.all), ("Func@1 (supported)", &self.supported)] {
            let _ = writeln!(s, "{:<22}{:>10}{:>10}{:>8}", name, pct(r.strict), pct(r.relaxed), r.denominator);
        }
        let _ = writeln!(
            s,
            "abstentions {}  errors {}  syntax failures {}",
            self.abstentions, self.errors, self.syntax_failures
        );
        for (reason, n) in &self.abstention_reasons {
            let _ = writeln!(s, "  {reason:<20}{n:>6}");
        }
        let _ = writeln!(
            s,
            "{:<14}{:>6}{:>8}{:>9}{:>8}{:>8}",
            "class", "rows", "strict", "relaxed", "abst", "syntax"
        );
        for (class, b) in &self.per_class {
            let _ = writeln!(
                s,
                "{:<14}{:>6}{:>8}{:>9}{:>8}{:>8}",
                class, b.rows, b.strict, b.relaxed, b.abstentions, b.syntax_failures
            );
        }
        for p in &self.pass_at_k {
            let _ = writeln!(
                s,
                "pass@{:<3} strict {:.3} [{:.3}, {:.3}]  relaxed {:.3} [{:.3}, {:.3}]  tasks {}",
                p.k,
                p.strict.estimate,
                p.strict.ci_lo,
                p.strict.ci_hi,
                p.relaxed.estimate,
                p.relaxed.ci_lo,
                p.relaxed.ci_hi,
                p.strict.tasks
            );
        }
        let _ = writeln!(
            s,
            "mean reward  eq2 {:.3}  eq6 {:.3}  normalization fired on {:.1}% of candidates",
            self.mean_reward_eq2,
            self.mean_reward_eq6,
            100.0 * self.rule_stats.any_fired_fraction()
        );
        s
    }
}

/// One CSV line per candidate.
pub fn write_csv<W: io::Write>(results: &[RowResult], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "candidate", "class", "verdict", "syntax_ok", "reward_eq2", "reward_eq6", "wall_time", "error"])?;
    for row in results {
        let class = row.reference_class.map_or("unclassified".to_string(), |c| c.to_string());
        for c in &row.candidates {
            w.write_record([
                row.id.as_str(),
                &c.index.to_string(),
                &class,
                &c.verdict.map_or(String::new(), |v| v.to_string()),
                &c.syntax_ok.to_string(),
                &c.reward_eq2.to_string(),
                &c.reward_eq6.to_string(),
                &format!("{:.6}", c.wall_time),
                c.error.as_deref().unwrap_or(""),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
