//! Verdict-to-reward mappings and the reward-weighted loss aggregation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pec::Verdict;

/// Distillation weight: one-sided verdicts get partial weight, everything
/// else (abstentions included) gets none.
pub fn rwopd_weight(verdict: Option<Verdict>, _syntax_ok: bool) -> f64 {
    match verdict {
        Some(Verdict::Equivalent) => 1.0,
        Some(Verdict::ImpliesRefToLm) => 0.6,
        Some(Verdict::ImpliesLmToRef) => 0.4,
        _ => 0.0,
    }
}

/// Policy-optimization reward: as [`rwopd_weight`], plus a 0.15 floor for
/// syntactically valid candidates the checker abstained on.
pub fn rlvf_reward(verdict: Option<Verdict>, syntax_ok: bool) -> f64 {
    match verdict {
        Some(Verdict::Unsupported(_)) if syntax_ok => 0.15,
        v => rwopd_weight(v, syntax_ok),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RolloutScore {
    pub verdict: Option<Verdict>,
    pub syntax_ok: bool,
    pub opd_loss: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewardError {
    #[error("rollout {0} has no loss")]
    MissingLoss(usize),
    #[error("length mismatch: {0} losses, {1} weights")]
    LengthMismatch(usize, usize),
}

/// Weighted mean of the losses of rollouts with positive weight, or `None`
/// when no rollout has positive weight.
pub fn rwopd_aggregate(scores: &[RolloutScore]) -> Result<Option<f64>, RewardError> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, s) in scores.iter().enumerate() {
        let w = rwopd_weight(s.verdict, s.syntax_ok);
        if w > 0.0 {
            let loss = s.opd_loss.ok_or(RewardError::MissingLoss(i))?;
            num += w * loss;
            den += w;
        }
    }
    Ok(weighted_mean(num, den))
}

/// Same aggregation over explicit `(weight, loss)` pairs.
pub fn aggregate_weighted(pairs: &[(f64, f64)]) -> Option<f64> {
    let (num, den) = pairs
        .iter()
        .filter(|(w, _)| *w > 0.0)
        .fold((0.0, 0.0), |(n, d), (w, l)| (n + w * l, d + w));
    weighted_mean(num, den)
}

fn weighted_mean(num: f64, den: f64) -> Option<f64> {
    if den > 0.0 {
        Some(num / den)
    } else {
        None
    }
}

/// Operator substrings whose presence marks a temporal token.
pub const TEMPORAL_OPS: [&str; 15] = [
    "##",
    "[*",
    "[=",
    "|->",
    "|=>",
    "until",
    "eventually",
    "s_eventually",
    "s_until",
    "s_always",
    "throughout",
    "within",
    "intersect",
    "$rose",
    "$fell",
];

pub fn is_temporal_token(token: &str) -> bool {
    TEMPORAL_OPS.iter().any(|op| token.contains(op))
}

pub fn temporal_token_weights<S: AsRef<str>>(tokens: &[S], alpha: f64) -> Vec<f64> {
    tokens
        .iter()
        .map(|t| if is_temporal_token(t.as_ref()) { alpha } else { 1.0 })
        .collect()
}

pub fn weighted_ce(per_token_ce: &[f64], weights: &[f64]) -> Result<f64, RewardError> {
    if per_token_ce.len() != weights.len() {
        return Err(RewardError::LengthMismatch(per_token_ce.len(), weights.len()));
    }
    if per_token_ce.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = per_token_ce.iter().zip(weights).map(|(c, w)| c * w).sum();
    Ok(sum / per_token_ce.len() as f64)
}
