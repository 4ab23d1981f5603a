//! Per-seed execution of the optimization loop.
//!
//! Each step fits the surrogate on the data so far, maximizes the configured
//! acquisition, then observes the environment at the realized context. The
//! realized context stream, observation noise, evaluation panel, and the
//! Monte-Carlo draws standing in for parametric centers are all derived from
//! the seed through fixed stream ids, independently of the algorithm, so a
//! comparison at the same seed feeds every algorithm the identical world.

use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Algorithm, ResolvedConfig};
use crate::acquisition::{
    gpucb_select, stableopt_context_box, stableopt_select, AcquisitionProblem,
};
use crate::ambiguity::correction_term;
use crate::environments::Environment;
use crate::error::{Error, Result};
use crate::regret::{
    context_panel, instantaneous_regret, oracle_best, OracleBest, RegretTrace, StepRecord,
};
use crate::surrogate::SurrogateModel;

/// Stream id of the realized context sequence.
pub const STREAM_CONTEXT: u64 = 1;
/// Stream id of the frozen evaluation panel.
pub const STREAM_PANEL: u64 = 2;
/// Per-step observation-noise streams start here.
const STREAM_NOISE_BASE: u64 = 1 << 20;
/// Per-step center Monte-Carlo streams start here.
const STREAM_CENTER_BASE: u64 = 1 << 21;

/// Deterministic substream of a seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// All traces of one algorithm, plus per-seed failures (a numerical failure
/// aborts that seed only).
#[derive(Debug)]
pub struct AlgoRuns {
    pub algo: Algorithm,
    pub traces: Vec<RegretTrace>,
    pub failures: Vec<(u64, String)>,
}

/// World shared by every algorithm at one seed.
struct SeedWorld {
    contexts: Vec<Vec<f64>>,
    panel: Vec<Vec<f64>>,
    oracle: OracleBest,
}

fn build_world(env: &Environment, rc: &ResolvedConfig, seed: u64) -> Result<SeedWorld> {
    let mut ctx_rng = stream_rng(seed, STREAM_CONTEXT);
    let contexts = (0..rc.horizon)
        .map(|_| env.sample_context(&mut ctx_rng))
        .collect();
    let mut panel_rng = stream_rng(seed, STREAM_PANEL);
    let panel = context_panel(env, rc.panel_size, &mut panel_rng);
    let oracle = oracle_best(env, &panel, rc.oracle_grid)?;
    Ok(SeedWorld {
        contexts,
        panel,
        oracle,
    })
}

type SeedOutcome = (u64, Result<Vec<(Algorithm, Result<RegretTrace>)>>);

/// Execute every configured algorithm over every seed. Seeds run in parallel;
/// within a seed the loop is strictly sequential.
pub fn run_experiment(rc: &ResolvedConfig) -> Result<Vec<AlgoRuns>> {
    let env = rc.environment()?;
    let per_seed: Vec<SeedOutcome> = rc
        .seeds
        .par_iter()
        .map(|&seed| {
            let outcome = build_world(&env, rc, seed).map(|world| {
                rc.algos
                    .iter()
                    .map(|&algo| (algo, run_seed(&env, rc, algo, seed, &world)))
                    .collect()
            });
            (seed, outcome)
        })
        .collect();

    let mut runs: Vec<AlgoRuns> = rc
        .algos
        .iter()
        .map(|&algo| AlgoRuns {
            algo,
            traces: Vec::new(),
            failures: Vec::new(),
        })
        .collect();
    for (seed, outcome) in per_seed {
        match outcome {
            Ok(by_algo) => {
                for (slot, (algo, result)) in runs.iter_mut().zip(by_algo) {
                    debug_assert_eq!(slot.algo, algo);
                    match result {
                        Ok(trace) => slot.traces.push(trace),
                        Err(e) => slot.failures.push((seed, e.to_string())),
                    }
                }
            }
            Err(e) => {
                for slot in runs.iter_mut() {
                    slot.failures.push((seed, format!("world setup failed: {e}")));
                }
            }
        }
    }
    for run in &runs {
        if run.traces.is_empty() {
            return Err(Error::numerical(format!(
                "every seed of `{}` failed; first reason: {}",
                run.algo,
                run.failures
                    .first()
                    .map(|(s, r)| format!("seed {s}: {r}"))
                    .unwrap_or_default()
            )));
        }
    }
    Ok(runs)
}

fn run_seed(
    env: &Environment,
    rc: &ResolvedConfig,
    algo: Algorithm,
    seed: u64,
    world: &SeedWorld,
) -> Result<RegretTrace> {
    let params = rc.surrogate_params();
    let kernel = match algo {
        Algorithm::GpUcb => rc.decision_kernel(env)?,
        _ => rc.joint_kernel(env)?,
    };
    let kernel_lipschitz = kernel.lipschitz_constant();
    let mut surrogate = SurrogateModel::prior(kernel, params)?;
    let mut ambiguity = rc.ambiguity_model(&env.c_bounds)?;
    let optimizer = rc.optimizer();
    let lipschitz_mode = rc.lipschitz_mode();

    let mut steps = Vec::with_capacity(rc.horizon);
    let mut pending: Option<(Vec<f64>, f64)> = None;
    let mut cumulative = 0.0;

    for t in 1..=rc.horizon {
        let timer = Instant::now();
        if let Some((z, y)) = pending.take() {
            surrogate = surrogate.update(&z, y)?;
        }
        let beta = surrogate.beta();

        let (x, epsilon) = match algo {
            Algorithm::Wdrbo | Algorithm::Erbo => {
                let epsilon = match algo {
                    Algorithm::Wdrbo => ambiguity.radius_at(t)?,
                    _ => 0.0,
                };
                let center = ambiguity.center_at(t);
                let mut mc_rng = stream_rng(seed, STREAM_CENTER_BASE + t as u64);
                let samples = center.integration_samples(rc.center_mc_samples, &mut mc_rng);
                let problem = AcquisitionProblem::new(
                    &surrogate,
                    beta,
                    env.x_bounds.clone(),
                    env.c_bounds.clone(),
                    samples,
                    epsilon,
                    lipschitz_mode,
                    optimizer,
                )?;
                (problem.maximize()?.0, epsilon)
            }
            Algorithm::GpUcb => (
                gpucb_select(&surrogate, beta, &env.x_bounds, &optimizer)?.0,
                0.0,
            ),
            Algorithm::StableOpt => {
                let ct = stableopt_context_box(ambiguity.observed(), &env.c_bounds);
                (
                    stableopt_select(
                        &surrogate,
                        beta,
                        &env.x_bounds,
                        &ct,
                        rc.stableopt_grid,
                        &optimizer,
                    )?
                    .0,
                    0.0,
                )
            }
        };
        let elapsed_ms = timer.elapsed().as_secs_f64() * 1e3;

        let c = world.contexts[t - 1].clone();
        let mut noise_rng = stream_rng(seed, STREAM_NOISE_BASE + t as u64);
        let y = env.observe(&x, &c, &mut noise_rng)?;
        ambiguity.record_context(&c);

        let (raw, clamped) = instantaneous_regret(env, &x, &world.oracle, &world.panel);
        cumulative += clamped;
        let correction = match algo {
            Algorithm::GpUcb => 0.0,
            _ => correction_term(t, kernel_lipschitz, surrogate.mean_norm_bound()),
        };

        let z = match algo {
            Algorithm::GpUcb => x.clone(),
            _ => {
                let mut z = x.clone();
                z.extend_from_slice(&c);
                z
            }
        };
        pending = Some((z, y));

        steps.push(StepRecord {
            t,
            x,
            c,
            y,
            epsilon,
            regret: clamped,
            regret_raw: raw,
            cumulative,
            elapsed_ms,
            correction,
        });
    }

    Ok(RegretTrace { seed, steps })
}
