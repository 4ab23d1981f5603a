//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Wall-clock-derived values (the `elapsed_ms` trace column and the wall-time
//! summary columns) are excluded from the byte-equality checks; they are
//! measurements, not decisions, and the metadata sidecar is the only other
//! place wall-clock data appears.

mod common;

use std::time::Instant;

use common::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use wdrbo::acquisition::{AcquisitionProblem, LipschitzMode, MultiStartConfig};
use wdrbo::ambiguity::wasserstein_1d;
use wdrbo::domain::BoxDomain;
use wdrbo::environments::{ContextSampler, Environment};
use wdrbo::harness::{
    aggregate, emit, run_experiment, trace_csv, ExperimentConfig,
};
use wdrbo::kernel::KernelSpec;
use wdrbo::regret::{context_panel, oracle_best};
use wdrbo::surrogate::{BetaMode, SurrogateModel, SurrogateParams};

struct Criterion {
    id: usize,
    name: &'static str,
}

impl Criterion {
    fn new(id: usize, name: &'static str) -> Self {
        Criterion { id, name }
    }

    fn finish(self, ok: bool, detail: String) {
        println!(
            "acceptance {:02} [{}] {}: {}",
            self.id,
            if ok { "PASS" } else { "FAIL" },
            self.name,
            detail
        );
        assert!(ok, "criterion {:02} failed: {detail}", self.id);
    }
}

fn pooled_stderr(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

fn strip_last_column(csv: &str) -> String {
    csv.lines()
        .map(|line| match line.rfind(',') {
            Some(pos) => &line[..pos],
            None => line,
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Drop the wall-time columns (5 and 6) of the summary CSV.
fn strip_wall_columns(csv: &str) -> String {
    csv.lines()
        .map(|line| line.split(',').take(4).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn criterion_01_general_setting_wdrbo_beats_erbo() {
    let c = Criterion::new(1, "general setting: robust rule beats plain expected-UCB");
    let start = Instant::now();
    let rc = ExperimentConfig::from_json(
        r#"{
            "env": "general",
            "algos": ["wdrbo", "erbo"],
            "acquisition": {"beta": 1.5},
            "ambiguity": {"center": {"normal": [0.5, 0.1]}, "radius": {"constant": 0.1}},
            "horizon": 100,
            "seeds": [1,2,3,4,5,6,7,8,9,10,11,12,13,14,15],
            "output_dir": "unused"
        }"#,
    )
    .unwrap()
    .resolve(false)
    .unwrap();
    let runs = run_experiment(&rc).unwrap();
    let wdrbo = aggregate("wdrbo", &runs[0].traces).unwrap();
    let erbo = aggregate("erbo", &runs[1].traces).unwrap();
    let t = rc.horizon - 1;
    let gap = erbo.mean_cumulative[t] - wdrbo.mean_cumulative[t];
    let pooled = pooled_stderr(wdrbo.stderr_cumulative[t], erbo.stderr_cumulative[t]);
    let elapsed = start.elapsed().as_secs_f64();
    let ok = gap > 0.0 && gap > pooled && elapsed < 600.0;
    c.finish(
        ok,
        format!(
            "wdrbo R100 = {:.3} ± {:.3}, erbo R100 = {:.3} ± {:.3}, gap = {:.3} ({:.1}x pooled stderr), {:.0} s",
            wdrbo.mean_cumulative[t],
            wdrbo.stderr_cumulative[t],
            erbo.mean_cumulative[t],
            erbo.stderr_cumulative[t],
            gap,
            gap / pooled,
            elapsed
        ),
    );
}

#[test]
fn criterion_02_zero_radius_degenerates_to_plain_rule() {
    let c = Criterion::new(2, "zero ambiguity radius reproduces the plain rule bit for bit");
    let config = |algo: &str| {
        ExperimentConfig::from_json(&format!(
            r#"{{
                "env": "three_humps",
                "algos": ["{algo}"],
                "ambiguity": {{"center": "empirical", "radius": {{"constant": 0.0}}}},
                "horizon": 15,
                "seeds": [1, 2, 3],
                "panel_size": 2000,
                "output_dir": "unused"
            }}"#
        ))
        .unwrap()
        .resolve(true)
        .unwrap()
    };
    let robust = run_experiment(&config("wdrbo")).unwrap();
    let plain = run_experiment(&config("erbo")).unwrap();
    let mut identical = true;
    for (a, b) in robust[0].traces.iter().zip(&plain[0].traces) {
        // Bit-identical apart from the measured wall-time column.
        if strip_last_column(&trace_csv(a)) != strip_last_column(&trace_csv(b)) {
            identical = false;
        }
    }
    c.finish(
        identical,
        format!(
            "3 seeds x 15 steps of the camel environment, all decision bytes equal: {identical}"
        ),
    );
}

#[test]
fn criterion_03_confidence_coverage() {
    let c = Criterion::new(3, "confidence width covers RKHS members at the stated rate");
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(301);
    let kernel = KernelSpec::squared_exponential(0.3).unwrap();
    let noise_bound = 0.2;
    let params = SurrogateParams {
        lambda: 0.5,
        noise_bound,
        norm_bound: 1.0,
        delta: 0.05,
        beta_mode: BetaMode::Theoretical,
    };
    let n_runs = 200;
    let mut covered_runs = 0;
    for _ in 0..n_runs {
        let (anchors, weights) = rkhs_function(&kernel, 2, 8, 1.0, &mut rng);
        let probes: Vec<Vec<f64>> = (0..25)
            .map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])
            .collect();
        let mut model = SurrogateModel::prior(kernel.clone(), params).unwrap();
        let mut covered = true;
        'run: for _t in 1..=30 {
            let beta = model.beta();
            for p in &probes {
                let (mean, std) = model.posterior(p).unwrap();
                let truth = rkhs_eval(&kernel, &anchors, &weights, p);
                if (mean - truth).abs() > beta * std {
                    covered = false;
                    break 'run;
                }
            }
            let z = vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
            let noise: f64 = {
                // Gaussian with std exactly R.
                let u: f64 = rng.random_range(f64::EPSILON..1.0);
                let v: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                noise_bound * (-2.0 * u.ln()).sqrt() * v.cos()
            };
            let y = rkhs_eval(&kernel, &anchors, &weights, &z) + noise;
            model = model.update(&z, y).unwrap();
        }
        if covered {
            covered_runs += 1;
        }
    }
    let coverage = covered_runs as f64 / n_runs as f64;
    let elapsed = start.elapsed().as_secs_f64();
    c.finish(
        coverage >= 0.95 && elapsed < 300.0,
        format!("coverage {coverage:.3} over {n_runs} runs of 30 steps ({elapsed:.0} s)"),
    );
}

#[test]
fn criterion_04_wasserstein_lipschitz_gap_bound() {
    let c = Criterion::new(4, "expectation gaps bounded by wasserstein distance times lipschitz");
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    let mut violations = 0;
    for _ in 0..100 {
        let n_knots = rng.random_range(3..8);
        let mut knots: Vec<f64> = (0..n_knots).map(|_| rng.random_range(-1.0..1.0)).collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        let values: Vec<f64> = knots.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
        let g = |x: f64| -> f64 {
            if x <= knots[0] {
                return values[0];
            }
            for w in 0..knots.len() - 1 {
                if x <= knots[w + 1] {
                    let f = (x - knots[w]) / (knots[w + 1] - knots[w]);
                    return values[w] + f * (values[w + 1] - values[w]);
                }
            }
            *values.last().unwrap()
        };
        let lip = knots
            .windows(2)
            .zip(values.windows(2))
            .map(|(k, v)| ((v[1] - v[0]) / (k[1] - k[0])).abs())
            .fold(0.0, f64::max);
        let m = 50;
        let p: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let q: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let w = wasserstein_1d(&p, &q).unwrap();
        let gap = (q.iter().map(|&x| g(x)).sum::<f64>() / m as f64
            - p.iter().map(|&x| g(x)).sum::<f64>() / m as f64)
            .abs();
        if gap > w * lip + 1e-9 {
            violations += 1;
        }
    }
    c.finish(violations == 0, format!("{violations} violations in 100 pairs"));
}

#[test]
fn criterion_05_lipschitz_estimates_dominated_by_norm_bound() {
    let c = Criterion::new(5, "numeric context-lipschitz estimates stay under the norm bound");
    let mut rng = ChaCha8Rng::seed_from_u64(501);
    let kernel = KernelSpec::squared_exponential(0.3).unwrap();
    let kernel_lip = kernel.lipschitz_constant();
    let unit = BoxDomain::unit(1);
    let params = SurrogateParams {
        lambda: 0.5,
        noise_bound: 0.5,
        norm_bound: 1.0,
        delta: 0.05,
        beta_mode: BetaMode::Theoretical,
    };
    let mut worst_ucb_margin = f64::NEG_INFINITY;
    let mut worst_mean_margin = f64::NEG_INFINITY;
    let mut ok = true;
    for _ in 0..100 {
        let n = rng.random_range(1..=30);
        let (anchors, weights) = rkhs_function(&kernel, 2, 6, 1.0, &mut rng);
        let data: Vec<(Vec<f64>, f64)> = (0..n)
            .map(|_| {
                let z = vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
                let y =
                    rkhs_eval(&kernel, &anchors, &weights, &z) + rng.random_range(-0.25..0.25);
                (z, y)
            })
            .collect();
        let model = SurrogateModel::fit(kernel.clone(), &data, params).unwrap();
        let bound = model.mean_norm_bound() * kernel_lip;

        let problem = AcquisitionProblem::new(
            &model,
            model.beta(),
            unit.clone(),
            unit.clone(),
            vec![vec![0.2], vec![0.5], vec![0.8]],
            0.1,
            LipschitzMode::Numeric { grid_per_dim: 16 },
            MultiStartConfig::default(),
        )
        .unwrap();
        for _ in 0..3 {
            let x = vec![rng.random_range(0.0..1.0)];
            let numeric = problem.ucb_context_lipschitz(&x).unwrap();
            worst_ucb_margin = worst_ucb_margin.max(numeric - 2.0 * bound);
            if numeric > 2.0 * bound + 1e-6 {
                ok = false;
            }
            // Finite-difference slopes of the mean alone.
            let h = 1e-5;
            for i in 0..8 {
                let cq = 0.1 + 0.8 * i as f64 / 7.0;
                let up = model.posterior_mean(&[x[0], cq + h]).unwrap();
                let dn = model.posterior_mean(&[x[0], cq - h]).unwrap();
                let slope = ((up - dn) / (2.0 * h)).abs();
                worst_mean_margin = worst_mean_margin.max(slope - bound);
                if slope > bound + 1e-6 {
                    ok = false;
                }
            }
        }
    }
    c.finish(
        ok,
        format!(
            "worst UCB-estimate margin {worst_ucb_margin:.3e}, worst mean-slope margin {worst_mean_margin:.3e} (both should be <= 1e-6)"
        ),
    );
}

#[test]
fn criterion_06_data_driven_average_regret_decreases() {
    let c = Criterion::new(6, "data-driven camel run: average regret falls from t=50 to t=100");
    let rc = ExperimentConfig::from_json(
        r#"{
            "env": "three_humps",
            "algos": ["wdrbo"],
            "ambiguity": {"center": "empirical", "radius": {"inv_sqrt": 1.0}},
            "horizon": 100,
            "seeds": [1,2,3,4,5,6,7,8,9,10,11,12,13,14,15],
            "output_dir": "unused"
        }"#,
    )
    .unwrap()
    .resolve(true)
    .unwrap();
    let runs = run_experiment(&rc).unwrap();
    let summary = aggregate("wdrbo", &runs[0].traces).unwrap();
    let avg_50 = summary.mean_cumulative[49] / 50.0;
    let avg_100 = summary.mean_cumulative[99] / 100.0;
    let reduction = (avg_50 - avg_100) / avg_50;
    c.finish(
        reduction >= 0.10,
        format!(
            "mean R_t/t: {avg_50:.4} at t=50 vs {avg_100:.4} at t=100 ({:.1}% reduction, need >= 10%)",
            100.0 * reduction
        ),
    );
}

#[test]
fn criterion_07_kernel_and_surrogate_invariants() {
    let c = Criterion::new(7, "kernel PSD/Lipschitz and surrogate monotonicity invariants");
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(701);

    // Gram PSD on 100 random point sets.
    let mut min_eig_seen = f64::INFINITY;
    for trial in 0..100 {
        let kernel = if trial % 2 == 0 {
            KernelSpec::squared_exponential(rng.random_range(0.1..1.0)).unwrap()
        } else {
            KernelSpec::matern52(rng.random_range(0.1..1.0)).unwrap()
        };
        let n = rng.random_range(1..=20);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])
            .collect();
        let gram = kernel.gram(&pts).unwrap();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| gram.get(i, j)).collect())
            .collect();
        let min_eig = jacobi_eigenvalues(rows)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        min_eig_seen = min_eig_seen.min(min_eig);
    }
    let psd_ok = min_eig_seen >= -1e-9;

    // Feature-map Lipschitz property over 10^4 random pairs.
    let kernel = KernelSpec::squared_exponential(0.3).unwrap();
    let lip = kernel.lipschitz_constant();
    let mut lip_ok = true;
    for _ in 0..10_000 {
        let a = vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
        let b = vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
        let d: f64 = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        if kernel.feature_distance(&a, &b).unwrap() > lip * d + 1e-9 {
            lip_ok = false;
        }
    }

    // Posterior-scale monotonicity under updates.
    let mut model = SurrogateModel::prior(kernel.clone(), SurrogateParams::default()).unwrap();
    let probes: Vec<Vec<f64>> = (0..30)
        .map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])
        .collect();
    let mut last: Vec<f64> = probes
        .iter()
        .map(|p| model.posterior_std(p).unwrap())
        .collect();
    let mut mono_ok = true;
    for _ in 0..20 {
        let z = vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
        model = model.update(&z, rng.random_range(-1.0..1.0)).unwrap();
        for (i, p) in probes.iter().enumerate() {
            let s = model.posterior_std(p).unwrap();
            if s > last[i] + 1e-9 {
                mono_ok = false;
            }
            last[i] = s;
        }
    }

    // Interpolation at small regularization on noise-free data.
    let interp_data = vec![(vec![0.1, 0.2], 0.4), (vec![0.6, 0.5], -0.3), (vec![0.9, 0.9], 0.7)];
    let interp = SurrogateModel::fit(
        kernel.clone(),
        &interp_data,
        SurrogateParams {
            lambda: 1e-8,
            ..SurrogateParams::default()
        },
    )
    .unwrap();
    let interp_ok = interp_data
        .iter()
        .all(|(z, y)| (interp.posterior_mean(z).unwrap() - y).abs() < 1e-3);

    // UCB slope in the context dimension bounded by twice the norm bound.
    let params = SurrogateParams {
        lambda: 0.5,
        noise_bound: 0.5,
        norm_bound: 1.0,
        delta: 0.05,
        beta_mode: BetaMode::Theoretical,
    };
    let mut ucb_ok = true;
    for _ in 0..20 {
        let (anchors, weights) = rkhs_function(&kernel, 2, 6, 1.0, &mut rng);
        let data: Vec<(Vec<f64>, f64)> = (0..15)
            .map(|_| {
                let z = vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
                let y =
                    rkhs_eval(&kernel, &anchors, &weights, &z) + rng.random_range(-0.25..0.25);
                (z, y)
            })
            .collect();
        let m = SurrogateModel::fit(kernel.clone(), &data, params).unwrap();
        let bound = 2.0 * m.mean_norm_bound() * lip;
        let beta = m.beta();
        for _ in 0..50 {
            let x: f64 = rng.random_range(0.0..1.0);
            let c1: f64 = rng.random_range(0.0..1.0);
            let c2: f64 = rng.random_range(0.0..1.0);
            if (c1 - c2).abs() < 1e-9 {
                continue;
            }
            let u1 = m.ucb(&[x, c1], beta).unwrap();
            let u2 = m.ucb(&[x, c2], beta).unwrap();
            if (u1 - u2).abs() / (c1 - c2).abs() > bound + 1e-6 {
                ucb_ok = false;
            }
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    let ok = psd_ok && lip_ok && mono_ok && interp_ok && ucb_ok && elapsed < 120.0;
    c.finish(
        ok,
        format!(
            "psd {psd_ok} (min eig {min_eig_seen:.2e}), lipschitz {lip_ok}, monotone {mono_ok}, interpolation {interp_ok}, ucb slope {ucb_ok} ({elapsed:.0} s)"
        ),
    );
}

#[test]
fn criterion_08_robust_overhead_within_factor_two() {
    let c = Criterion::new(8, "per-step cost of the robust rule at most twice the plain rule");
    let rc = ExperimentConfig::from_json(
        r#"{
            "env": "ackley",
            "algos": ["wdrbo", "erbo"],
            "acquisition": {"lipschitz": "numeric"},
            "horizon": 100,
            "seeds": [1, 2, 3],
            "output_dir": "unused"
        }"#,
    )
    .unwrap()
    .resolve(false)
    .unwrap();
    let runs = run_experiment(&rc).unwrap();
    let wdrbo = aggregate("wdrbo", &runs[0].traces).unwrap();
    let erbo = aggregate("erbo", &runs[1].traces).unwrap();
    let ratio = wdrbo.wall_ms_mean / erbo.wall_ms_mean;
    c.finish(
        ratio <= 2.0,
        format!(
            "mean per-step {:.2} ms vs {:.2} ms, ratio {ratio:.2} (need <= 2)",
            wdrbo.wall_ms_mean / 100.0,
            erbo.wall_ms_mean / 100.0
        ),
    );
}

#[test]
fn criterion_09_oracle_sanity_on_analytic_cases() {
    let c = Criterion::new(9, "benchmark oracle recovers analytic optima");
    let quadratic = Environment::new(
        "quadratic",
        |x: &[f64], _c: &[f64]| -(x[0] - 0.3) * (x[0] - 0.3),
        BoxDomain::new(&[(-1.0, 1.0)]).unwrap(),
        BoxDomain::unit(1),
        ContextSampler::Uniform { lo: 0.0, hi: 1.0 },
        0.0,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(901);
    let panel = context_panel(&quadratic, 20_000, &mut rng);
    let o1 = oracle_best(&quadratic, &panel, 2001).unwrap();
    let quad_ok = (o1.x[0] - 0.3).abs() < 1e-3 && o1.value.abs() < 1e-6;

    let tracking = Environment::new(
        "tracking",
        |x: &[f64], c: &[f64]| -(x[0] - c[0]) * (x[0] - c[0]),
        BoxDomain::new(&[(-1.0, 2.0)]).unwrap(),
        BoxDomain::new(&[(-1.0, 2.0)]).unwrap(),
        ContextSampler::Normal {
            mean: 0.6,
            std: 0.2,
        },
        0.0,
    );
    let panel = context_panel(&tracking, 20_000, &mut rng);
    let o2 = oracle_best(&tracking, &panel, 2001).unwrap();
    let track_ok = (o2.x[0] - 0.6).abs() < 2e-2 && (o2.value + 0.04).abs() < 5e-3;

    c.finish(
        quad_ok && track_ok,
        format!(
            "context-free x* = {:.5} (want 0.3 ± 1e-3), tracking x* = {:.4}, value {:.4} (want 0.6 ± 2e-2, -0.04)",
            o1.x[0], o2.x[0], o2.value
        ),
    );
}

#[test]
fn criterion_10_reruns_emit_identical_bytes() {
    let c = Criterion::new(10, "rerunning a config emits identical bytes (wall time aside)");
    let rc = ExperimentConfig::from_json(
        r#"{
            "env": "three_humps",
            "algos": ["wdrbo"],
            "horizon": 10,
            "seeds": [5, 6],
            "panel_size": 2000,
            "oracle_grid": 501,
            "output_dir": "unused"
        }"#,
    )
    .unwrap()
    .resolve(true)
    .unwrap();

    let mut outputs: Vec<(String, String, String)> = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let mut rc_run = rc.clone();
        rc_run.output_dir = dir.path().to_path_buf();
        let runs = run_experiment(&rc_run).unwrap();
        emit(&rc_run, &runs).unwrap();
        let seed_csvs: String = rc_run
            .seeds
            .iter()
            .map(|s| {
                std::fs::read_to_string(dir.path().join("wdrbo").join(format!("seed_{s}.csv")))
                    .unwrap()
            })
            .collect::<Vec<_>>()
            .join("\n====\n");
        let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        let svg = std::fs::read_to_string(dir.path().join("regret.svg")).unwrap();
        outputs.push((seed_csvs, summary, svg));
    }
    let traces_equal =
        strip_last_column(&outputs[0].0) == strip_last_column(&outputs[1].0);
    let summaries_equal =
        strip_wall_columns(&outputs[0].1) == strip_wall_columns(&outputs[1].1);
    let svg_equal = outputs[0].2 == outputs[1].2;
    c.finish(
        traces_equal && summaries_equal && svg_equal,
        format!("traces {traces_equal}, summary {summaries_equal}, plot {svg_equal}"),
    );
}
