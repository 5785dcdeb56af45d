//! pass@k and bootstrap confidence intervals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskOutcome {
    pub task_id: String,
    pub n: u64,
    pub c: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("pass@k needs 1 <= k <= n and c <= n (n={n}, c={c}, k={k})")]
    Domain { n: u64, c: u64, k: u64 },
    #[error("no tasks")]
    Empty,
    #[error("confidence level must be in (0, 1), got {0}")]
    Level(f64),
}

/// Unbiased pass@k: `1 - C(n-c, k) / C(n, k)`, computed as a product.
pub fn pass_at_k(n: u64, c: u64, k: u64) -> Result<f64, MetricsError> {
    if k == 0 || k > n || c > n {
        return Err(MetricsError::Domain { n, c, k });
    }
    if n - c < k {
        return Ok(1.0);
    }
    let mut miss = 1.0;
    for i in (n - c + 1)..=n {
        miss *= 1.0 - k as f64 / i as f64;
    }
    Ok(1.0 - miss)
}

pub fn mean_pass_at_k(tasks: &[TaskOutcome], k: u64) -> Result<f64, MetricsError> {
    if tasks.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut sum = 0.0;
    for t in tasks {
        sum += pass_at_k(t.n, t.c, k)?;
    }
    Ok(sum / tasks.len() as f64)
}

/// Percentile interval of the mean pass@k under resampling of tasks with
/// replacement. Replicate `r` draws from ChaCha20 stream `r` of `seed`.
pub fn bootstrap_ci(tasks: &[TaskOutcome], k: u64, replicates: usize, seed: u64, level: f64) -> Result<(f64, f64), MetricsError> {
    if tasks.is_empty() || replicates == 0 {
        return Err(MetricsError::Empty);
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(MetricsError::Level(level));
    }
    let scores = tasks
        .iter()
        .map(|t| pass_at_k(t.n, t.c, k))
        .collect::<Result<Vec<_>, _>>()?;
    let n = scores.len();
    let mut means: Vec<f64> = (0..replicates)
        .map(|r| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let total: f64 = (0..n).map(|_| scores[rng.gen_range(0..n)]).sum();
            total / n as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    Ok(percentile_interval(&means, level))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassAtKEntry {
    pub k: u64,
    /// Tasks with at least `k` samples; the others are left out for this `k`.
    pub tasks: usize,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// pass@k with bootstrap intervals for each `k`, skipping any `k` no task
/// has enough samples for.
pub fn pass_at_k_table(tasks: &[TaskOutcome], ks: &[u64], replicates: usize, seed: u64, level: f64) -> Result<Vec<PassAtKEntry>, MetricsError> {
    let mut out = Vec::new();
    for &k in ks {
        let eligible: Vec<TaskOutcome> = tasks.iter().filter(|t| t.n >= k).cloned().collect();
        if eligible.is_empty() {
            continue;
        }
        let (ci_lo, ci_hi) = bootstrap_ci(&eligible, k, replicates, seed, level)?;
        out.push(PassAtKEntry {
            k,
            tasks: eligible.len(),
            estimate: mean_pass_at_k(&eligible, k)?,
            ci_lo,
            ci_hi,
        });
    }
    Ok(out)
}

/// `(sorted[floor(a/2 R)], sorted[ceil((1-a/2) R) - 1])` with `a = 1 - level`.
pub fn percentile_interval(sorted: &[f64], level: f64) -> (f64, f64) {
    let r = sorted.len();
    let alpha = 1.0 - level;
    let lo = ((alpha / 2.0 * r as f64).floor() as usize).min(r - 1);
    let hi = ((((1.0 - alpha / 2.0) * r as f64).ceil() as usize).max(1) - 1).min(r - 1);
    (sorted[lo], sorted[hi])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn task(n: u64, c: u64) -> TaskOutcome {
        TaskOutcome {
            task_id: format!("t{n}_{c}"),
            n,
            c,
        }
    }

    #[test]
    fn pass_at_k_values() {
        assert_eq!(pass_at_k(10, 10, 1).unwrap(), 1.0);
        assert_eq!(pass_at_k(10, 0, 5).unwrap(), 0.0);
        assert!((pass_at_k(4, 1, 2).unwrap() - 0.5).abs() < 1e-12);
        assert!((pass_at_k(10, 3, 1).unwrap() - 0.3).abs() < 1e-12);
        assert!(pass_at_k(3, 1, 4).is_err());
        assert!(pass_at_k(3, 4, 1).is_err());
    }

    #[test]
    fn bootstrap_degenerate_and_seeded() {
        let all = vec![task(5, 5), task(3, 3)];
        assert_eq!(bootstrap_ci(&all, 1, 500, 7, 0.95).unwrap(), (1.0, 1.0));
        let none = vec![task(5, 0), task(3, 0)];
        assert_eq!(bootstrap_ci(&none, 1, 500, 7, 0.95).unwrap(), (0.0, 0.0));
        let mix = vec![task(4, 4), task(4, 0)];
        let a = bootstrap_ci(&mix, 1, 2000, 11, 0.95).unwrap();
        assert_eq!(a, bootstrap_ci(&mix, 1, 2000, 11, 0.95).unwrap());
        assert_eq!(a, (0.0, 1.0));
        assert!(bootstrap_ci(&[], 1, 10, 0, 0.95).is_err());
    }

    #[test]
    fn table_skips_short_tasks() {
        let tasks = vec![task(10, 3), task(2, 1)];
        let t = pass_at_k_table(&tasks, &[1, 5, 20], 200, 1, 0.95).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!((t[0].k, t[0].tasks), (1, 2));
        assert!((t[0].estimate - 0.4).abs() < 1e-12);
        assert_eq!((t[1].k, t[1].tasks), (5, 1));
    }

    #[test]
    fn interval_indices() {
        let v: Vec<f64> = (0..100).map(f64::from).collect();
        assert_eq!(percentile_interval(&v, 0.95), (2.0, 97.0));
        assert_eq!(percentile_interval(&[3.0], 0.95), (3.0, 3.0));
    }
}
