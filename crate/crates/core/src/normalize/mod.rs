//! Rewrite rules that bring scraped assertions into lint-clean form.
//!
//! Rules run in ascending order and the whole sequence repeats until a pass
//! changes nothing (at most ten passes). The `pec` profile keeps only the
//! rewrites that cannot change the meaning of a property.

mod rules;
pub mod scan;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use rules::fold_select;

const MAX_PASSES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    R11,
    R12,
    R13,
    R14,
    R15,
    R16,
    R17,
}

impl RuleId {
    pub const ALL: [RuleId; 17] = [
        RuleId::R1,
        RuleId::R2,
        RuleId::R3,
        RuleId::R4,
        RuleId::R5,
        RuleId::R6,
        RuleId::R7,
        RuleId::R8,
        RuleId::R9,
        RuleId::R10,
        RuleId::R11,
        RuleId::R12,
        RuleId::R13,
        RuleId::R14,
        RuleId::R15,
        RuleId::R16,
        RuleId::R17,
    ];

    pub fn description(self) -> &'static str {
        match self {
            RuleId::R1 => "remove the backtick from macro references",
            RuleId::R2 => "join hierarchical path segments with underscores",
            RuleId::R3 => "drop package scope prefixes",
            RuleId::R4 => "remove else clauses that call a system task",
            RuleId::R5 => "replace s_eventually/eventually with ##1",
            RuleId::R6 => "unwrap directives nested in another directive",
            RuleId::R7 => "replace s_until/s_until_with with ##1",
            RuleId::R8 => "clock unclocked directive bodies on posedge clk",
            RuleId::R9 => "fold selects on inner path segments into the name",
            RuleId::R10 => "remove type and size casts",
            RuleId::R11 => "remove comments",
            RuleId::R12 => "balance parentheses",
            RuleId::R13 => "collapse ranged delays to one count",
            RuleId::R14 => "collapse consecutive repetition ranges to one count",
            RuleId::R15 => "collapse goto and nonconsecutive repetition ranges to one count",
            RuleId::R16 => "replace until/until_with with ##1",
            RuleId::R17 => "remove pass and else action blocks",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[default]
    Lint,
    Pec,
}

impl Profile {
    pub fn includes(self, rule: RuleId) -> bool {
        match self {
            Profile::Lint => true,
            Profile::Pec => matches!(
                rule,
                RuleId::R1
                    | RuleId::R2
                    | RuleId::R9
                    | RuleId::R3
                    | RuleId::R4
                    | RuleId::R6
                    | RuleId::R10
                    | RuleId::R11
                    | RuleId::R12
                    | RuleId::R17
            ),
        }
    }
}

impl FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lint" => Ok(Profile::Lint),
            "pec" => Ok(Profile::Pec),
            other => Err(format!("unknown profile '{other}' (expected lint or pec)")),
        }
    }
}

/// Which end of a range the collapse rules keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CollapseBound {
    #[default]
    Lower,
    /// Upper bound; `$` still falls back to the lower bound.
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NormalizeOptions {
    pub collapse: CollapseBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalizationReport {
    pub fired: Vec<(RuleId, usize)>,
    pub before: String,
    pub after: String,
    pub profile: Profile,
}

impl NormalizationReport {
    pub fn count(&self, rule: RuleId) -> usize {
        self.fired
            .iter()
            .find(|(r, _)| *r == rule)
            .map_or(0, |(_, n)| *n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("parentheses still unbalanced after R12: {0}")]
    Unbalanced(String),
    #[error("rewrites did not settle within {MAX_PASSES} passes")]
    NoFixpoint,
}

pub fn normalize(src: &str, profile: Profile) -> Result<(String, NormalizationReport), NormalizeError> {
    normalize_with(src, profile, &NormalizeOptions::default())
}

fn run_pass(text: &mut String, profile: Profile, opts: &NormalizeOptions, counts: &mut BTreeMap<RuleId, usize>) -> bool {
    let mut changed = false;
    let mut record = |rule: RuleId, n: usize, counts: &mut BTreeMap<RuleId, usize>| {
        if n > 0 {
            *counts.entry(rule).or_default() += n;
            changed = true;
        }
    };
    for rule in RuleId::ALL {
        if !profile.includes(rule) {
            continue;
        }
        let f: fn(&str, &NormalizeOptions) -> rules::Outcome = match rule {
            RuleId::R1 => rules::strip_macros,
            RuleId::R2 => {
                let (t, r2, r9) = rules::flatten_paths(text);
                *text = t;
                record(RuleId::R2, r2, counts);
                record(RuleId::R9, r9, counts);
                continue;
            }
            // handled together with R2
            RuleId::R9 => continue,
            RuleId::R3 => rules::strip_packages,
            RuleId::R4 => rules::strip_else_tasks,
            RuleId::R5 => rules::rewrite_eventually,
            RuleId::R6 => rules::strip_nested_directives,
            RuleId::R7 => rules::rewrite_strong_until,
            RuleId::R8 => rules::wrap_unclocked,
            RuleId::R10 => rules::strip_casts,
            RuleId::R11 => rules::strip_comments,
            RuleId::R12 => rules::balance_parens,
            RuleId::R13 => rules::collapse_delay_ranges,
            RuleId::R14 => rules::collapse_repeat_ranges,
            RuleId::R15 => rules::collapse_goto_ranges,
            RuleId::R16 => rules::rewrite_weak_until,
            RuleId::R17 => rules::strip_action_blocks,
        };
        let (t, n) = f(text, opts);
        *text = t;
        record(rule, n, counts);
    }
    changed
}

pub fn normalize_with(
    src: &str,
    profile: Profile,
    opts: &NormalizeOptions,
) -> Result<(String, NormalizationReport), NormalizeError> {
    let mut text = src.to_string();
    let mut counts = BTreeMap::new();
    let mut settled = false;
    for _ in 0..MAX_PASSES {
        if !run_pass(&mut text, profile, opts, &mut counts) {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(NormalizeError::NoFixpoint);
    }
    let after = text.trim().to_string();
    if !scan::parens_balanced(&after) {
        return Err(NormalizeError::Unbalanced(after));
    }
    let report = NormalizationReport {
        fired: counts.into_iter().collect(),
        before: src.to_string(),
        after: after.clone(),
        profile,
    };
    Ok((after, report))
}

/// Aggregated firing counts over many rows.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RuleStats {
    pub counts: BTreeMap<RuleId, usize>,
    pub rows: usize,
    pub rows_fired: usize,
    pub errors: usize,
}

impl RuleStats {
    pub fn any_fired_fraction(&self) -> f64 {
        if self.rows == 0 {
            0.0
        } else {
            self.rows_fired as f64 / self.rows as f64
        }
    }

    pub fn add(&mut self, report: &NormalizationReport) {
        self.rows += 1;
        if !report.fired.is_empty() {
            self.rows_fired += 1;
        }
        for (r, n) in &report.fired {
            *self.counts.entry(*r).or_default() += n;
        }
    }

    pub fn merge(&mut self, other: &RuleStats) {
        self.rows += other.rows;
        self.rows_fired += other.rows_fired;
        self.errors += other.errors;
        for (r, n) in &other.counts {
            *self.counts.entry(*r).or_default() += n;
        }
    }
}

pub fn rule_fire_stats<S: AsRef<str>>(rows: &[S], profile: Profile) -> RuleStats {
    let mut stats = RuleStats::default();
    for row in rows {
        match normalize(row.as_ref(), profile) {
            Ok((_, report)) => stats.add(&report),
            Err(_) => {
                stats.rows += 1;
                stats.errors += 1;
            }
        }
    }
    stats
}
