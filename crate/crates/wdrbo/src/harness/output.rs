//! Aggregation and file emission: per-seed trace CSVs, the cross-seed
//! summary, the regret plot, and the metadata sidecar.
//!
//! Everything written here is a pure function of (config, seeds) except the
//! timestamp, which lives only in `meta.json`, and the measured `elapsed_ms`
//! column of the trace CSVs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::runner::AlgoRuns;
use super::ResolvedConfig;
use crate::error::{Error, Result};
use crate::regret::RegretTrace;

/// Cross-seed summary of one algorithm: pointwise mean and standard error of
/// the cumulative regret, and total wall-time statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgoSummary {
    pub algo: String,
    pub horizon: usize,
    pub mean_cumulative: Vec<f64>,
    pub stderr_cumulative: Vec<f64>,
    pub wall_ms_mean: f64,
    pub wall_ms_stderr: f64,
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Pointwise mean and standard error over seeds.
pub fn aggregate(algo: &str, traces: &[RegretTrace]) -> Result<AlgoSummary> {
    let Some(first) = traces.first() else {
        return Err(Error::input("cannot aggregate an empty trace set"));
    };
    let horizon = first.horizon();
    for t in traces {
        if t.horizon() != horizon {
            return Err(Error::input(format!(
                "trace horizons differ: {} vs {horizon}",
                t.horizon()
            )));
        }
    }
    let mut mean_cumulative = Vec::with_capacity(horizon);
    let mut stderr_cumulative = Vec::with_capacity(horizon);
    for i in 0..horizon {
        let column: Vec<f64> = traces.iter().map(|t| t.steps[i].cumulative).collect();
        let (m, s) = mean_and_stderr(&column);
        mean_cumulative.push(m);
        stderr_cumulative.push(s);
    }
    let walls: Vec<f64> = traces.iter().map(|t| t.total_wall_ms()).collect();
    let (wall_ms_mean, wall_ms_stderr) = mean_and_stderr(&walls);
    Ok(AlgoSummary {
        algo: algo.to_string(),
        horizon,
        mean_cumulative,
        stderr_cumulative,
        wall_ms_mean,
        wall_ms_stderr,
    })
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn write_all(path: &Path, text: &str) -> Result<()> {
    let mut f = create(path)?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Render one per-seed trace as CSV with the fixed column layout
/// `seed,t,x_0..,c_0..,y,eps,r_inst,r_cum,elapsed_ms`.
pub fn trace_csv(trace: &RegretTrace) -> String {
    let (dx, dc) = trace
        .steps
        .first()
        .map(|s| (s.x.len(), s.c.len()))
        .unwrap_or((0, 0));
    let mut out = String::from("seed,t");
    for i in 0..dx {
        out.push_str(&format!(",x_{i}"));
    }
    for i in 0..dc {
        out.push_str(&format!(",c_{i}"));
    }
    out.push_str(",y,eps,r_inst,r_cum,elapsed_ms\n");
    for s in &trace.steps {
        out.push_str(&format!("{},{}", trace.seed, s.t));
        for v in &s.x {
            out.push_str(&format!(",{v}"));
        }
        for v in &s.c {
            out.push_str(&format!(",{v}"));
        }
        out.push_str(&format!(
            ",{},{},{},{},{}\n",
            s.y, s.epsilon, s.regret, s.cumulative, s.elapsed_ms
        ));
    }
    out
}

fn summary_csv(summaries: &[AlgoSummary]) -> String {
    let mut out =
        String::from("algo,t,mean_r_cum,stderr_r_cum,wall_ms_mean,wall_ms_stderr\n");
    for s in summaries {
        for t in 0..s.horizon {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                s.algo,
                t + 1,
                s.mean_cumulative[t],
                s.stderr_cumulative[t],
                s.wall_ms_mean,
                s.wall_ms_stderr
            ));
        }
    }
    out
}

/// Parse the summary CSV back; inverse of the emitter.
pub fn parse_summary_csv(text: &str) -> Result<Vec<AlgoSummary>> {
    let mut summaries: Vec<AlgoSummary> = Vec::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 6 {
            return Err(Error::input(format!(
                "summary line {} has {} fields, expected 6",
                lineno + 1,
                parts.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::input(format!("bad float `{s}` on line {}", lineno + 1)))
        };
        let algo = parts[0];
        let mean = parse(parts[2])?;
        let stderr = parse(parts[3])?;
        let wall_mean = parse(parts[4])?;
        let wall_stderr = parse(parts[5])?;
        match summaries.last_mut() {
            Some(last) if last.algo == algo => {
                last.mean_cumulative.push(mean);
                last.stderr_cumulative.push(stderr);
                last.horizon += 1;
            }
            _ => summaries.push(AlgoSummary {
                algo: algo.to_string(),
                horizon: 1,
                mean_cumulative: vec![mean],
                stderr_cumulative: vec![stderr],
                wall_ms_mean: wall_mean,
                wall_ms_stderr: wall_stderr,
            }),
        }
    }
    Ok(summaries)
}

fn meta_json(rc: &ResolvedConfig, runs: &[AlgoRuns]) -> String {
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let failures: Vec<serde_json::Value> = runs
        .iter()
        .flat_map(|r| {
            r.failures.iter().map(move |(seed, reason)| {
                serde_json::json!({"algo": r.algo.name(), "seed": seed, "reason": reason})
            })
        })
        .collect();
    let value = serde_json::json!({
        "library_version": env!("CARGO_PKG_VERSION"),
        "timestamp_unix": timestamp,
        "resolved_config": rc,
        "failures": failures,
    });
    serde_json::to_string_pretty(&value).expect("static structure serializes")
}

/// Write every output file. Refuses to touch the filesystem when any
/// algorithm has an empty trace set, so failures leave no partial files.
pub fn emit(rc: &ResolvedConfig, runs: &[AlgoRuns]) -> Result<Vec<PathBuf>> {
    if runs.is_empty() || runs.iter().any(|r| r.traces.is_empty()) {
        return Err(Error::input("emit requires at least one trace per algorithm"));
    }
    let summaries: Vec<AlgoSummary> = runs
        .iter()
        .map(|r| aggregate(r.algo.name(), &r.traces))
        .collect::<Result<_>>()?;

    let outdir = &rc.output_dir;
    fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    let mut written = Vec::new();

    for run in runs {
        let algo_dir = outdir.join(run.algo.name());
        fs::create_dir_all(&algo_dir).map_err(|e| Error::io(&algo_dir, e))?;
        for trace in &run.traces {
            let path = algo_dir.join(format!("seed_{}.csv", trace.seed));
            write_all(&path, &trace_csv(trace))?;
            written.push(path);
        }
    }

    let summary_path = outdir.join("summary.csv");
    write_all(&summary_path, &summary_csv(&summaries))?;
    written.push(summary_path);

    let svg_path = outdir.join("regret.svg");
    write_all(&svg_path, &super::plot::regret_svg(&summaries))?;
    written.push(svg_path);

    let meta_path = outdir.join("meta.json");
    write_all(&meta_path, &meta_json(rc, runs))?;
    written.push(meta_path);

    Ok(written)
}
