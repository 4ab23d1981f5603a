//! Regularized least-squares surrogate in the kernel's RKHS.
//!
//! Holds the observed data, the Cholesky factor of `K + lambda I`, and the
//! dual weights `alpha = (K + lambda I)^{-1} y`. From these it answers the
//! posterior mean, the posterior scale
//! `sigma^2(z) = (k(z,z) - k(z)^T (K + lambda I)^{-1} k(z)) / lambda`,
//! the confidence width `beta`, the high-probability bound on the RKHS norm
//! of the fitted mean, and the log-det information gain.

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::linalg::{dot, CholeskyFactor};

/// How the UCB trade-off parameter is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaMode {
    /// A constant width, the usual engineering choice.
    Fixed(f64),
    /// The self-normalized concentration width
    /// `R sqrt(2 ln(det(I + lambda^{-1} K)^{1/2} / delta)) + sqrt(lambda) B`.
    Theoretical,
}

/// Scalar hyperparameters of the surrogate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateParams {
    /// Ridge regularizer, strictly positive.
    pub lambda: f64,
    /// Sub-Gaussian bound `R` on the observation noise.
    pub noise_bound: f64,
    /// Bound `B` on the RKHS norm of the unknown objective.
    pub norm_bound: f64,
    /// Failure probability for the confidence machinery.
    pub delta: f64,
    pub beta_mode: BetaMode,
}

impl Default for SurrogateParams {
    fn default() -> Self {
        SurrogateParams {
            lambda: 0.5,
            noise_bound: 1.0,
            norm_bound: 1.0,
            delta: 0.05,
            beta_mode: BetaMode::Fixed(1.5),
        }
    }
}

/// Fitted surrogate. Immutable; `update` returns a new value.
#[derive(Debug, Clone)]
pub struct SurrogateModel {
    kernel: KernelSpec,
    params: SurrogateParams,
    points: Vec<Vec<f64>>,
    targets: Vec<f64>,
    chol: CholeskyFactor,
    alpha: Vec<f64>,
    jitter: f64,
}

impl SurrogateModel {
    /// Fit on a dataset. Empty data yields the prior-only model.
    ///
    /// Cholesky is attempted with zero jitter first, then with an escalating
    /// diagonal shift (`1e-10 * trace`, growing tenfold up to `1e-4 * trace`);
    /// duplicate query points are routine in the optimization loop and land on
    /// this path only in near-singular regimes.
    pub fn fit(
        kernel: KernelSpec,
        data: &[(Vec<f64>, f64)],
        params: SurrogateParams,
    ) -> Result<Self> {
        if !(params.lambda > 0.0) || !params.lambda.is_finite() {
            return Err(Error::input(format!(
                "lambda must be strictly positive, got {}",
                params.lambda
            )));
        }
        if !(params.delta > 0.0 && params.delta < 1.0) {
            return Err(Error::input(format!(
                "delta must lie in (0, 1), got {}",
                params.delta
            )));
        }
        for (i, (_, y)) in data.iter().enumerate() {
            if !y.is_finite() {
                return Err(Error::input(format!("observation {i} is not finite")));
            }
        }
        let points: Vec<Vec<f64>> = data.iter().map(|(z, _)| z.clone()).collect();
        let targets: Vec<f64> = data.iter().map(|&(_, y)| y).collect();
        let gram = kernel.gram(&points)?;
        let n = gram.n_rows();
        let trace = gram.trace() + params.lambda * n as f64;

        let mut jitter = 0.0;
        let chol = loop {
            match CholeskyFactor::factor(&gram, params.lambda + jitter) {
                Ok(c) => break c,
                Err(err) => {
                    let next = if jitter == 0.0 {
                        1e-10 * trace
                    } else {
                        jitter * 10.0
                    };
                    if next > 1e-4 * trace {
                        return Err(Error::numerical(format!(
                            "cholesky failed after jitter escalation \
                             (n={n}, trace={trace:.3e}, last jitter={jitter:.3e}, \
                             condition estimate ~ {:.3e}): {err}",
                            trace / params.lambda
                        )));
                    }
                    jitter = next;
                }
            }
        };
        let alpha = chol.solve(&targets);
        Ok(SurrogateModel {
            kernel,
            params,
            points,
            targets,
            chol,
            alpha,
            jitter,
        })
    }

    /// Prior-only model with no observations.
    pub fn prior(kernel: KernelSpec, params: SurrogateParams) -> Result<Self> {
        Self::fit(kernel, &[], params)
    }

    /// Absorb one observation, extending the Cholesky factor by a row in
    /// O(t^2). Falls back to a full refit if the extension loses positivity.
    pub fn update(&self, z: &[f64], y: f64) -> Result<Self> {
        if !y.is_finite() {
            return Err(Error::input("observation is not finite"));
        }
        let mut next = self.clone();
        let cross = next.kernel_column(z)?;
        let diag = next.kernel.output_scale() + next.params.lambda + next.jitter;
        next.points.push(z.to_vec());
        next.targets.push(y);
        if next.chol.append_row(&cross, diag).is_err() {
            let data: Vec<(Vec<f64>, f64)> = next
                .points
                .iter()
                .cloned()
                .zip(next.targets.iter().copied())
                .collect();
            return Self::fit(next.kernel, &data, next.params);
        }
        next.alpha = next.chol.solve(&next.targets);
        Ok(next)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn params(&self) -> &SurrogateParams {
        &self.params
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Cross-kernel column `[k(z, z_1), ..., k(z, z_t)]`.
    pub fn kernel_column(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.points.iter().map(|p| self.kernel.eval(z, p)).collect()
    }

    /// Posterior mean and scale from a precomputed cross column and `k(z, z)`.
    ///
    /// This is the batching hook for acquisition code that assembles columns
    /// from cached partial distances.
    pub fn posterior_from_column(&self, column: &[f64], k_zz: f64) -> Result<(f64, f64)> {
        debug_assert_eq!(column.len(), self.len());
        let mean = dot(column, &self.alpha);
        let w = self.chol.forward_solve(column);
        let radicand = (k_zz - dot(&w, &w)) / self.params.lambda;
        if radicand < -1e-10 {
            return Err(Error::numerical(format!(
                "posterior variance radicand {radicand:.3e} below tolerance"
            )));
        }
        Ok((mean, radicand.max(0.0).sqrt()))
    }

    /// Posterior mean and scale at a point.
    pub fn posterior(&self, z: &[f64]) -> Result<(f64, f64)> {
        let column = self.kernel_column(z)?;
        self.posterior_from_column(&column, self.kernel.output_scale())
    }

    pub fn posterior_mean(&self, z: &[f64]) -> Result<f64> {
        let column = self.kernel_column(z)?;
        Ok(dot(&column, &self.alpha))
    }

    pub fn posterior_std(&self, z: &[f64]) -> Result<f64> {
        Ok(self.posterior(z)?.1)
    }

    /// `ln det(I + lambda^{-1} K)`; zero for the empty model.
    pub fn information_gain(&self) -> f64 {
        let n = self.len();
        if n == 0 {
            return 0.0;
        }
        self.chol.log_det() - n as f64 * self.params.lambda.ln()
    }

    /// The UCB trade-off width for the current data.
    pub fn beta(&self) -> f64 {
        match self.params.beta_mode {
            BetaMode::Fixed(v) => v,
            BetaMode::Theoretical => {
                let p = &self.params;
                p.noise_bound
                    * (self.information_gain() + 2.0 * (1.0 / p.delta).ln()).sqrt()
                    + p.lambda.sqrt() * p.norm_bound
            }
        }
    }

    /// High-probability bound on the RKHS norm of the fitted mean:
    /// `lambda^{-1/2} R sqrt(ln det(I + lambda^{-1} K) + 2 ln(1/delta)) + B`.
    pub fn mean_norm_bound(&self) -> f64 {
        let p = &self.params;
        p.noise_bound / p.lambda.sqrt()
            * (self.information_gain() + 2.0 * (1.0 / p.delta).ln()).sqrt()
            + p.norm_bound
    }

    pub fn ucb(&self, z: &[f64], beta: f64) -> Result<f64> {
        let (mean, std) = self.posterior(z)?;
        Ok(mean + beta * std)
    }

    pub fn lcb(&self, z: &[f64], beta: f64) -> Result<f64> {
        let (mean, std) = self.posterior(z)?;
        Ok(mean - beta * std)
    }
}
