//! Benchmark oracle and expected-regret bookkeeping.
//!
//! Expectations under the true context distribution are estimated on a single
//! frozen Monte-Carlo context panel per (environment, seed). The oracle
//! decision and every per-step regret use the same panel, so regret
//! differences between algorithms reflect decisions, not evaluation noise.

use rand::Rng;

use crate::acquisition::{multistart_maximize, LocalSearch, MultiStartConfig};
use crate::environments::Environment;
use crate::error::Result;

/// Default decision-grid density for the oracle search, by dimension.
pub fn default_oracle_grid(dx: usize) -> usize {
    match dx {
        1 => 2001,
        2 => 201,
        _ => 31,
    }
}

/// Default panel size for expectation estimates.
pub const DEFAULT_PANEL_SIZE: usize = 20_000;

/// Draw the frozen context panel.
pub fn context_panel<R: Rng>(env: &Environment, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..n).map(|_| env.sample_context(rng)).collect()
}

/// Monte-Carlo estimate of `E_c[f(x, c)]` on the panel.
pub fn panel_expectation(env: &Environment, x: &[f64], panel: &[Vec<f64>]) -> f64 {
    let mut acc = 0.0;
    for c in panel {
        acc += env.objective(x, c);
    }
    acc / panel.len() as f64
}

/// The benchmark decision: argmax of the panel expectation.
#[derive(Debug, Clone)]
pub struct OracleBest {
    pub x: Vec<f64>,
    pub value: f64,
}

/// Dense-grid search over the decision box refined by pattern search, all on
/// the same panel expectation. Deterministic given the panel.
pub fn oracle_best(env: &Environment, panel: &[Vec<f64>], grid_per_dim: usize) -> Result<OracleBest> {
    let config = MultiStartConfig {
        n_starts: 1,
        n_grid_per_dim: grid_per_dim,
        local_search: LocalSearch::PatternSearch {
            max_iters: 80,
            shrink: 0.5,
        },
        rng_seed: 0,
    };
    let (x, value) = multistart_maximize(
        |x| Ok(panel_expectation(env, x, panel)),
        &env.x_bounds,
        &config,
    )?;
    Ok(OracleBest { x, value })
}

/// Instantaneous expected regret of decision `x` against the oracle, on the
/// oracle's own panel. Returns `(raw, clamped)`: panel noise can make the raw
/// difference slightly negative, so the reported regret clamps at zero while
/// the raw value stays available for logging.
pub fn instantaneous_regret(
    env: &Environment,
    x: &[f64],
    oracle: &OracleBest,
    panel: &[Vec<f64>],
) -> (f64, f64) {
    let raw = oracle.value - panel_expectation(env, x, panel);
    (raw, raw.max(0.0))
}

/// Prefix sums of per-step regret.
pub fn cumulative(per_step: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    per_step
        .iter()
        .map(|r| {
            acc += r;
            acc
        })
        .collect()
}

/// One row of a run trace.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// 1-based step index.
    pub t: usize,
    pub x: Vec<f64>,
    pub c: Vec<f64>,
    pub y: f64,
    /// Ambiguity radius used at this step (zero for non-robust algorithms).
    pub epsilon: f64,
    /// Clamped instantaneous expected regret.
    pub regret: f64,
    /// Unclamped value, kept for logging.
    pub regret_raw: f64,
    /// Running sum of `regret`.
    pub cumulative: f64,
    /// Fit + acquisition wall time for this step.
    pub elapsed_ms: f64,
    /// Data-driven concentration correction `(1 + 2 L Bbar) / t`; reported,
    /// never used by the acquisition.
    pub correction: f64,
}

/// Per-seed run record.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub seed: u64,
    pub steps: Vec<StepRecord>,
}

impl RegretTrace {
    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    pub fn cumulative_series(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.cumulative).collect()
    }

    pub fn total_wall_ms(&self) -> f64 {
        self.steps.iter().map(|s| s.elapsed_ms).sum()
    }
}
