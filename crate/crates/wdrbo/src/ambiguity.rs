//! Wasserstein ambiguity sets: center distributions and radius schedules.
//!
//! The ambiguity set at step `t` is the ball of radius `epsilon_t` around a
//! center distribution, in the type-1 Wasserstein distance. For a function
//! that is `L`-Lipschitz in the context, the worst-case expectation over the
//! ball moves by at most `epsilon_t * L` from the center expectation; that
//! product is the additive penalty used by the robust acquisition.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::domain::BoxDomain;
use crate::error::{Error, Result};

/// How the center of the ambiguity ball is formed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CenterSpec {
    /// Empirical distribution of the contexts observed before the current step.
    #[serde(rename = "empirical")]
    Empirical,
    /// Independent normal per context dimension.
    #[serde(rename = "normal")]
    Normal { mean: f64, std: f64 },
    /// Independent uniform per context dimension.
    #[serde(rename = "uniform")]
    Uniform { lo: f64, hi: f64 },
}

/// Radius schedule `epsilon_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RadiusSchedule {
    #[serde(rename = "constant")]
    Constant(f64),
    /// `epsilon_0 / sqrt(t)`, the practical data-driven schedule.
    #[serde(rename = "inv_sqrt")]
    InverseSqrt(f64),
    #[serde(rename = "explicit")]
    Explicit(Vec<f64>),
}

impl RadiusSchedule {
    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        match self {
            RadiusSchedule::Constant(v) | RadiusSchedule::InverseSqrt(v) if ok(*v) => Ok(()),
            RadiusSchedule::Explicit(vs) if vs.iter().all(|&v| ok(v)) => Ok(()),
            _ => Err(Error::input("ambiguity radii must be finite and >= 0")),
        }
    }
}

/// Center + radius schedule + the context history feeding empirical centers.
#[derive(Debug, Clone)]
pub struct AmbiguityModel {
    center: CenterSpec,
    radius: RadiusSchedule,
    context_box: BoxDomain,
    history: Vec<Vec<f64>>,
}

/// A concrete center distribution at a given step. Supports sampling always,
/// and enumeration of atoms when the center is empirical.
#[derive(Debug, Clone)]
pub enum CenterDistribution {
    /// Uniform over the listed atoms.
    Empirical(Vec<Vec<f64>>),
    /// Point mass; the empty-history fallback.
    Dirac(Vec<f64>),
    Normal { mean: f64, std: f64, dim: usize },
    Uniform { lo: f64, hi: f64, dim: usize },
}

impl CenterDistribution {
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            CenterDistribution::Empirical(atoms) => {
                atoms[rng.random_range(0..atoms.len())].clone()
            }
            CenterDistribution::Dirac(p) => p.clone(),
            CenterDistribution::Normal { mean, std, dim } => {
                let n = Normal::new(*mean, *std).expect("validated std");
                (0..*dim).map(|_| n.sample(rng)).collect()
            }
            CenterDistribution::Uniform { lo, hi, dim } => {
                (0..*dim).map(|_| rng.random_range(*lo..=*hi)).collect()
            }
        }
    }

    /// The exact atoms when the distribution has finite support.
    pub fn atoms(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            CenterDistribution::Empirical(atoms) => Some(atoms.clone()),
            CenterDistribution::Dirac(p) => Some(vec![p.clone()]),
            _ => None,
        }
    }

    /// Atoms when finite, otherwise `n` Monte-Carlo draws.
    pub fn integration_samples<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
        match self.atoms() {
            Some(atoms) => atoms,
            None => (0..n).map(|_| self.sample(rng)).collect(),
        }
    }
}

impl AmbiguityModel {
    pub fn new(center: CenterSpec, radius: RadiusSchedule, context_box: BoxDomain) -> Result<Self> {
        radius.validate()?;
        if let CenterSpec::Normal { std, .. } = center {
            if !(std > 0.0) || !std.is_finite() {
                return Err(Error::input(format!(
                    "normal center std must be positive, got {std}"
                )));
            }
        }
        if let CenterSpec::Uniform { lo, hi } = center {
            if !(lo <= hi) {
                return Err(Error::input(format!(
                    "uniform center interval is empty: [{lo}, {hi}]"
                )));
            }
        }
        Ok(AmbiguityModel {
            center,
            radius,
            context_box,
            history: Vec::new(),
        })
    }

    pub fn center_spec(&self) -> &CenterSpec {
        &self.center
    }

    pub fn observed(&self) -> &[Vec<f64>] {
        &self.history
    }

    /// Record a realized context; feeds empirical centers at later steps.
    pub fn record_context(&mut self, c: &[f64]) {
        self.history.push(c.to_vec());
    }

    /// Center distribution at step `t` (1-based).
    ///
    /// Empirical centers are uniform over the contexts observed before step
    /// `t`; before anything is observed the center degenerates to a Dirac at
    /// the context-box midpoint so the first acquisition is well defined.
    pub fn center_at(&self, t: usize) -> CenterDistribution {
        let dim = self.context_box.dim();
        match &self.center {
            CenterSpec::Empirical => {
                let seen = self.history.len().min(t.saturating_sub(1));
                if seen == 0 {
                    CenterDistribution::Dirac(self.context_box.midpoint())
                } else {
                    CenterDistribution::Empirical(self.history[..seen].to_vec())
                }
            }
            CenterSpec::Normal { mean, std } => CenterDistribution::Normal {
                mean: *mean,
                std: *std,
                dim,
            },
            CenterSpec::Uniform { lo, hi } => CenterDistribution::Uniform {
                lo: *lo,
                hi: *hi,
                dim,
            },
        }
    }

    /// Radius at step `t` (1-based).
    pub fn radius_at(&self, t: usize) -> Result<f64> {
        if t == 0 {
            return Err(Error::input("step index is 1-based"));
        }
        match &self.radius {
            RadiusSchedule::Constant(v) => Ok(*v),
            RadiusSchedule::InverseSqrt(e0) => Ok(e0 / (t as f64).sqrt()),
            RadiusSchedule::Explicit(vs) => vs.get(t - 1).copied().ok_or_else(|| {
                Error::input(format!(
                    "explicit radius schedule has {} entries, step {t} requested",
                    vs.len()
                ))
            }),
        }
    }
}

/// Worst-case expectation gap over a radius-`epsilon` ball for an
/// `lipschitz`-Lipschitz integrand: `epsilon * lipschitz`.
pub fn robust_gap_bound(epsilon: f64, lipschitz: f64) -> f64 {
    epsilon * lipschitz
}

/// The `(1 + 2 L Bbar) / t` correction term of the data-driven concentration
/// bound. Tracked for reporting; it never enters the acquisition.
pub fn correction_term(t: usize, kernel_lipschitz: f64, mean_norm_bound: f64) -> f64 {
    (1.0 + 2.0 * kernel_lipschitz * mean_norm_bound) / t as f64
}

/// Type-1 Wasserstein distance between two equal-size empirical distributions
/// on the line: sort both samples and average the absolute differences.
pub fn wasserstein_1d(samples_a: &[f64], samples_b: &[f64]) -> Result<f64> {
    if samples_a.is_empty() || samples_b.is_empty() {
        return Err(Error::input("wasserstein_1d needs nonempty samples"));
    }
    if samples_a.len() != samples_b.len() {
        return Err(Error::input(format!(
            "wasserstein_1d needs equal sample counts, got {} vs {}",
            samples_a.len(),
            samples_b.len()
        )));
    }
    let mut a = samples_a.to_vec();
    let mut b = samples_b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let n = a.len() as f64;
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() / n)
}
