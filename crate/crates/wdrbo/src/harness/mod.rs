//! Experiment harness: JSON configuration, the per-seed run loop, mean and
//! standard-error aggregation, and CSV/SVG/metadata emission.
//!
//! Defaults follow the benchmark protocol: horizon 100, 15 seeds, fixed UCB
//! width 1.5. Where the protocol is silent the harness declares defaults
//! (`lambda = 0.1`, squared-exponential kernel with lengthscale 0.2 per
//! normalized input dimension) and echoes every resolved value into the run
//! metadata. Inputs are min-max normalized to the unit box before kernel
//! evaluation; the normalization is folded into per-dimension lengthscales,
//! which yields identical kernel values while keeping every reported
//! quantity in environment units.

mod output;
mod plot;
mod runner;
mod selftest;

pub use output::{aggregate, emit, parse_summary_csv, trace_csv, AlgoSummary};
pub use plot::write_regret_svg;
pub use runner::{run_experiment, stream_rng, AlgoRuns, STREAM_CONTEXT, STREAM_PANEL};
pub use selftest::run_selftest;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::ambiguity::{CenterSpec, RadiusSchedule};
use crate::domain::BoxDomain;
use crate::environments::{by_name, Environment};
use crate::error::{Error, Result};
use crate::kernel::{KernelFamily, KernelSpec};
use crate::surrogate::BetaMode;

/// Algorithms the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Algorithm {
    #[serde(rename = "wdrbo")]
    Wdrbo,
    #[serde(rename = "erbo")]
    Erbo,
    #[serde(rename = "gpucb")]
    GpUcb,
    #[serde(rename = "stableopt")]
    StableOpt,
}

impl Algorithm {
    pub fn parse(s: &str) -> Option<Algorithm> {
        match s {
            "wdrbo" => Some(Algorithm::Wdrbo),
            "erbo" => Some(Algorithm::Erbo),
            "gpucb" => Some(Algorithm::GpUcb),
            "stableopt" => Some(Algorithm::StableOpt),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Wdrbo => "wdrbo",
            Algorithm::Erbo => "erbo",
            Algorithm::GpUcb => "gpucb",
            Algorithm::StableOpt => "stableopt",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Raw JSON configuration. Unknown keys are rejected.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub env: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_std: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Sub-Gaussian noise bound R used by the confidence machinery.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_bound: Option<f64>,
    /// RKHS norm bound B used by the confidence machinery.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rkhs_norm_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acquisition: Option<AcquisitionConfig>,
    /// Algorithms for `compare`; `run` takes the single acquisition algo.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algos: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ambiguity: Option<AmbiguityConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub panel_size: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub family: String,
    /// Lengthscale(s) in normalized units: one entry (isotropic) or one per
    /// joint input dimension.
    pub lengthscale: Vec<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcquisitionConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algo: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<BetaConfig>,
    /// "numeric" or "analytic".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lipschitz_grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerConfig>,
    /// Monte-Carlo samples standing in for a parametric center.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_mc_samples: Option<usize>,
    /// Context-grid density of the min-over-context baseline.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stableopt_grid: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetaConfig {
    Fixed(f64),
    /// The string "theoretical".
    Named(String),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbiguityConfig {
    pub center: CenterConfig,
    pub radius: RadiusConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CenterConfig {
    /// The string "empirical".
    Named(String),
    Normal { normal: (f64, f64) },
    Uniform { uniform: (f64, f64) },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RadiusConfig {
    Constant { constant: f64 },
    InvSqrt { inv_sqrt: f64 },
    Explicit { explicit: Vec<f64> },
}

/// Lipschitz-mode selector after resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LipschitzChoice {
    Numeric,
    Analytic,
}

/// Fully resolved configuration: every default applied, every name parsed.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub env: String,
    pub noise_std: f64,
    pub kernel_family: KernelFamily,
    /// Normalized-unit lengthscales as configured.
    pub kernel_lengthscale: Vec<f64>,
    pub lambda: f64,
    pub noise_bound: f64,
    pub rkhs_norm_bound: f64,
    pub delta: f64,
    pub beta_fixed: Option<f64>,
    pub algos: Vec<Algorithm>,
    pub lipschitz: LipschitzChoice,
    pub lipschitz_grid: usize,
    pub optimizer_starts: usize,
    pub optimizer_grid: usize,
    pub center_mc_samples: usize,
    pub stableopt_grid: usize,
    pub center: CenterSpec,
    pub radius: RadiusSchedule,
    pub horizon: usize,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub oracle_grid: usize,
    pub panel_size: usize,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::config("<root>", format!("invalid config JSON: {e}")))
    }

    /// Apply defaults and validate. `require_single_algo` is set by `run`,
    /// which executes exactly one algorithm.
    pub fn resolve(&self, require_single_algo: bool) -> Result<ResolvedConfig> {
        let env = by_name(&self.env).map_err(|e| Error::config("env", e.to_string()))?;
        let dx = env.x_bounds.dim();
        let dc = env.c_bounds.dim();
        let d = dx + dc;

        let noise_std = self.noise_std.unwrap_or(env.noise_std);
        if !(noise_std >= 0.0) || !noise_std.is_finite() {
            return Err(Error::config("noise_std", "must be finite and >= 0"));
        }

        let (kernel_family, kernel_lengthscale) = match &self.kernel {
            None => (KernelFamily::SquaredExponential, vec![0.2]),
            Some(kc) => {
                let family = match kc.family.as_str() {
                    "se" => KernelFamily::SquaredExponential,
                    "matern52" => KernelFamily::Matern52,
                    other => {
                        return Err(Error::config(
                            "kernel.family",
                            format!("unknown family `{other}` (expected se or matern52)"),
                        ))
                    }
                };
                if kc.lengthscale.is_empty() {
                    return Err(Error::config("kernel.lengthscale", "must be nonempty"));
                }
                if kc.lengthscale.len() != 1 && kc.lengthscale.len() != d {
                    return Err(Error::config(
                        "kernel.lengthscale",
                        format!(
                            "expected 1 or {d} entries for this environment, got {}",
                            kc.lengthscale.len()
                        ),
                    ));
                }
                if kc.lengthscale.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
                    return Err(Error::config(
                        "kernel.lengthscale",
                        "entries must be strictly positive",
                    ));
                }
                (family, kc.lengthscale.clone())
            }
        };

        let lambda = self.lambda.unwrap_or(0.5);
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::config("lambda", "must be strictly positive"));
        }
        let noise_bound = self.noise_bound.unwrap_or(1.0);
        let rkhs_norm_bound = self.rkhs_norm_bound.unwrap_or(1.0);
        let delta = self.delta.unwrap_or(0.05);
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::config("delta", "must lie strictly inside (0, 1)"));
        }

        let acq = self.acquisition.clone().unwrap_or_default();
        let beta_fixed = match &acq.beta {
            None => Some(1.5),
            Some(BetaConfig::Fixed(v)) => {
                if !v.is_finite() {
                    return Err(Error::config("acquisition.beta", "must be finite"));
                }
                Some(*v)
            }
            Some(BetaConfig::Named(s)) if s == "theoretical" => None,
            Some(BetaConfig::Named(s)) => {
                return Err(Error::config(
                    "acquisition.beta",
                    format!("expected a number or \"theoretical\", got `{s}`"),
                ))
            }
        };

        let lipschitz = match acq.lipschitz.as_deref() {
            None | Some("numeric") => LipschitzChoice::Numeric,
            Some("analytic") => LipschitzChoice::Analytic,
            Some(other) => {
                return Err(Error::config(
                    "acquisition.lipschitz",
                    format!("expected numeric or analytic, got `{other}`"),
                ))
            }
        };
        let lipschitz_grid = acq.lipschitz_grid.unwrap_or(16);
        if lipschitz_grid < 2 {
            return Err(Error::config("acquisition.lipschitz_grid", "must be >= 2"));
        }

        let opt = acq.optimizer.unwrap_or_default();
        let optimizer_starts = opt.starts.unwrap_or(8);
        if optimizer_starts == 0 {
            return Err(Error::config("acquisition.optimizer.starts", "must be >= 1"));
        }
        let optimizer_grid = opt.grid.unwrap_or(if dx <= 2 { 25 } else { 7 });
        if optimizer_grid < 2 {
            return Err(Error::config("acquisition.optimizer.grid", "must be >= 2"));
        }
        let center_mc_samples = acq.center_mc_samples.unwrap_or(64);
        if center_mc_samples == 0 {
            return Err(Error::config("acquisition.center_mc_samples", "must be >= 1"));
        }
        let stableopt_grid = acq.stableopt_grid.unwrap_or(32);
        if stableopt_grid == 0 {
            return Err(Error::config("acquisition.stableopt_grid", "must be >= 1"));
        }

        let single = acq.algo.as_deref();
        let algo_names: Vec<String> = match (&self.algos, single) {
            (Some(list), _) if !list.is_empty() => list.clone(),
            (Some(_), _) => return Err(Error::config("algos", "must be nonempty when present")),
            (None, Some(one)) => vec![one.to_string()],
            (None, None) => vec!["wdrbo".to_string()],
        };
        let mut algos = Vec::with_capacity(algo_names.len());
        for (i, name) in algo_names.iter().enumerate() {
            match Algorithm::parse(name) {
                Some(a) => algos.push(a),
                None => {
                    return Err(Error::config(
                        format!("algos[{i}]"),
                        format!("unknown algorithm `{name}` (expected wdrbo, erbo, gpucb, stableopt)"),
                    ))
                }
            }
        }
        if require_single_algo && algos.len() != 1 {
            return Err(Error::config(
                "algos",
                "`run` executes one algorithm; use `compare` for several",
            ));
        }

        let (center, radius) = match &self.ambiguity {
            None => (CenterSpec::Empirical, RadiusSchedule::InverseSqrt(1.0)),
            Some(a) => {
                let center = match &a.center {
                    CenterConfig::Named(s) if s == "empirical" => CenterSpec::Empirical,
                    CenterConfig::Named(s) => {
                        return Err(Error::config(
                            "ambiguity.center",
                            format!("expected \"empirical\" or a distribution object, got `{s}`"),
                        ))
                    }
                    CenterConfig::Normal { normal } => CenterSpec::Normal {
                        mean: normal.0,
                        std: normal.1,
                    },
                    CenterConfig::Uniform { uniform } => CenterSpec::Uniform {
                        lo: uniform.0,
                        hi: uniform.1,
                    },
                };
                let radius = match &a.radius {
                    RadiusConfig::Constant { constant } => RadiusSchedule::Constant(*constant),
                    RadiusConfig::InvSqrt { inv_sqrt } => RadiusSchedule::InverseSqrt(*inv_sqrt),
                    RadiusConfig::Explicit { explicit } => {
                        RadiusSchedule::Explicit(explicit.clone())
                    }
                };
                (center, radius)
            }
        };
        crate::ambiguity::AmbiguityModel::new(center.clone(), radius.clone(), env.c_bounds.clone())
            .map_err(|e| Error::config("ambiguity", e.to_string()))?;

        let horizon = self.horizon.unwrap_or(100);
        if horizon == 0 {
            return Err(Error::config("horizon", "must be >= 1"));
        }
        let seeds = self.seeds.clone().unwrap_or_else(|| (1..=15).collect());
        if seeds.is_empty() {
            return Err(Error::config("seeds", "must be nonempty"));
        }
        {
            let mut sorted = seeds.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != seeds.len() {
                return Err(Error::config("seeds", "must be distinct"));
            }
        }

        let output_dir = PathBuf::from(self.output_dir.clone().unwrap_or_else(|| "runs".into()));
        let oracle_grid = self
            .oracle_grid
            .unwrap_or_else(|| crate::regret::default_oracle_grid(dx));
        if oracle_grid < 2 {
            return Err(Error::config("oracle_grid", "must be >= 2"));
        }
        let panel_size = self.panel_size.unwrap_or(crate::regret::DEFAULT_PANEL_SIZE);
        if panel_size == 0 {
            return Err(Error::config("panel_size", "must be >= 1"));
        }

        Ok(ResolvedConfig {
            env: self.env.clone(),
            noise_std,
            kernel_family,
            kernel_lengthscale,
            lambda,
            noise_bound,
            rkhs_norm_bound,
            delta,
            beta_fixed,
            algos,
            lipschitz,
            lipschitz_grid,
            optimizer_starts,
            optimizer_grid,
            center_mc_samples,
            stableopt_grid,
            center,
            radius,
            horizon,
            seeds,
            output_dir,
            oracle_grid,
            panel_size,
        })
    }
}

impl ResolvedConfig {
    /// Instantiate the environment with the resolved noise level.
    pub fn environment(&self) -> Result<Environment> {
        let mut env = by_name(&self.env)?;
        env.noise_std = self.noise_std;
        Ok(env)
    }

    /// Kernel over the joint `(x, c)` input, with the min-max normalization
    /// folded into per-dimension lengthscales.
    pub fn joint_kernel(&self, env: &Environment) -> Result<KernelSpec> {
        let mut widths = env.x_bounds.widths();
        widths.extend(env.c_bounds.widths());
        self.kernel_over(&widths, 0)
    }

    /// Kernel over the decision input only (context-blind baseline).
    pub fn decision_kernel(&self, env: &Environment) -> Result<KernelSpec> {
        self.kernel_over(&env.x_bounds.widths(), 0)
    }

    fn kernel_over(&self, widths: &[f64], offset: usize) -> Result<KernelSpec> {
        for (i, w) in widths.iter().enumerate() {
            if !(w > &0.0) {
                return Err(Error::config(
                    "env",
                    format!("input dimension {i} has zero width; cannot normalize"),
                ));
            }
        }
        let scales: Vec<f64> = widths
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let base = if self.kernel_lengthscale.len() == 1 {
                    self.kernel_lengthscale[0]
                } else {
                    self.kernel_lengthscale[offset + i]
                };
                base * w
            })
            .collect();
        KernelSpec::new(self.kernel_family, scales)
    }

    pub fn beta_mode(&self) -> BetaMode {
        match self.beta_fixed {
            Some(v) => BetaMode::Fixed(v),
            None => BetaMode::Theoretical,
        }
    }

    pub fn surrogate_params(&self) -> crate::surrogate::SurrogateParams {
        crate::surrogate::SurrogateParams {
            lambda: self.lambda,
            noise_bound: self.noise_bound,
            norm_bound: self.rkhs_norm_bound,
            delta: self.delta,
            beta_mode: self.beta_mode(),
        }
    }

    pub fn ambiguity_model(&self, c_bounds: &BoxDomain) -> Result<crate::ambiguity::AmbiguityModel> {
        crate::ambiguity::AmbiguityModel::new(
            self.center.clone(),
            self.radius.clone(),
            c_bounds.clone(),
        )
    }

    pub fn lipschitz_mode(&self) -> crate::acquisition::LipschitzMode {
        match self.lipschitz {
            LipschitzChoice::Numeric => crate::acquisition::LipschitzMode::Numeric {
                grid_per_dim: self.lipschitz_grid,
            },
            LipschitzChoice::Analytic => crate::acquisition::LipschitzMode::Analytic,
        }
    }

    pub fn optimizer(&self) -> crate::acquisition::MultiStartConfig {
        crate::acquisition::MultiStartConfig {
            n_starts: self.optimizer_starts,
            n_grid_per_dim: self.optimizer_grid,
            ..crate::acquisition::MultiStartConfig::default()
        }
    }
}
