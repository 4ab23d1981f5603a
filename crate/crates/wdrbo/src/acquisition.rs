//! Acquisition functions and their maximizer.
//!
//! The robust acquisition scores a decision `x` by the expected UCB under the
//! ambiguity-ball center minus the ball radius times the UCB's Lipschitz
//! constant in the context variable:
//!
//! ```text
//! A(x) = E_{c ~ center}[ UCB(x, c) ] - epsilon * L_ucb(x)
//! ```
//!
//! With `epsilon = 0` this degenerates to the plain expected-UCB rule. The
//! min-over-context and context-blind UCB baselines live here too, sharing
//! the same deterministic multi-start pattern-search maximizer.

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::surrogate::SurrogateModel;

/// How the context-Lipschitz constant of the UCB is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LipschitzMode {
    /// The x-independent bound `2 * mean_norm_bound * kernel_lipschitz`.
    Analytic,
    /// Max finite-difference gradient norm of `c -> UCB(x, c)` over a
    /// per-dimension context grid, inflated by a 1.1 safety factor.
    Numeric { grid_per_dim: usize },
}

impl Default for LipschitzMode {
    fn default() -> Self {
        LipschitzMode::Numeric { grid_per_dim: 16 }
    }
}

/// Local refinement used by the multi-start maximizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalSearch {
    PatternSearch { max_iters: usize, shrink: f64 },
}

/// Deterministic multi-start optimizer configuration: the best `n_starts`
/// points of a coarse grid seed local pattern searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiStartConfig {
    pub n_starts: usize,
    pub n_grid_per_dim: usize,
    pub local_search: LocalSearch,
    /// Reserved for stochastic restarts; the default search is fully
    /// deterministic and does not consume randomness.
    pub rng_seed: u64,
}

impl Default for MultiStartConfig {
    fn default() -> Self {
        MultiStartConfig {
            n_starts: 8,
            n_grid_per_dim: 25,
            local_search: LocalSearch::PatternSearch {
                max_iters: 60,
                shrink: 0.5,
            },
            rng_seed: 0,
        }
    }
}

impl MultiStartConfig {
    /// Default grid density by decision dimension (dense grids are
    /// unaffordable past two dimensions).
    pub fn for_dim(dx: usize) -> Self {
        MultiStartConfig {
            n_grid_per_dim: if dx <= 2 { 25 } else { 7 },
            ..MultiStartConfig::default()
        }
    }
}

/// Cross-kernel cache: lengthscale-weighted squared distances between the
/// model's data contexts and a fixed probe-context list, so each acquisition
/// evaluation only pays for the decision part.
struct CrossCache {
    m: usize,
    sq: Vec<f64>,
    /// `exp(-sq/2)` per entry for the squared-exponential fast path.
    exp_half: Option<Vec<f64>>,
}

impl CrossCache {
    fn new(model: &SurrogateModel, probes: &[Vec<f64>], dx: usize) -> Self {
        let kernel = model.kernel();
        let t = model.len();
        let m = probes.len();
        let mut sq = Vec::with_capacity(t * m);
        for p in model.points() {
            let data_c = &p[dx..];
            for probe in probes {
                sq.push(kernel.scaled_sqdist_slice(data_c, probe, dx));
            }
        }
        let exp_half = matches!(
            kernel.family,
            crate::kernel::KernelFamily::SquaredExponential
        )
        .then(|| sq.iter().map(|s| (-0.5 * s).exp()).collect());
        CrossCache { m, sq, exp_half }
    }

    /// Write `[k((x, c_j), z_i)]_i` into `out` for probe index `j`.
    fn fill_column(&self, model: &SurrogateModel, xpart: &XPart, j: usize, out: &mut [f64]) {
        let kernel = model.kernel();
        match (&self.exp_half, &xpart.exp_half) {
            (Some(ec), Some(ex)) => {
                let os = kernel.output_scale();
                for (i, slot) in out.iter_mut().enumerate() {
                    *slot = os * ex[i] * ec[i * self.m + j];
                }
            }
            _ => {
                for (i, slot) in out.iter_mut().enumerate() {
                    *slot = kernel.eval_scaled_sqdist(xpart.sq[i] + self.sq[i * self.m + j]);
                }
            }
        }
    }
}

/// Per-decision precomputation shared by every probe context.
struct XPart {
    sq: Vec<f64>,
    exp_half: Option<Vec<f64>>,
}

impl XPart {
    fn new(model: &SurrogateModel, x: &[f64], dx: usize, want_exp: bool) -> XPart {
        let kernel = model.kernel();
        let sq: Vec<f64> = model
            .points()
            .iter()
            .map(|p| kernel.scaled_sqdist_slice(x, &p[..dx], 0))
            .collect();
        let exp_half = want_exp.then(|| sq.iter().map(|s| (-0.5 * s).exp()).collect());
        XPart { sq, exp_half }
    }
}

/// One step's robust acquisition problem over a fixed surrogate.
pub struct AcquisitionProblem<'a> {
    model: &'a SurrogateModel,
    beta: f64,
    x_bounds: BoxDomain,
    c_bounds: BoxDomain,
    center_samples: Vec<Vec<f64>>,
    epsilon: f64,
    lipschitz_mode: LipschitzMode,
    optimizer: MultiStartConfig,
    center_cache: CrossCache,
    /// Stencil probes for the numeric Lipschitz estimate: for each grid point
    /// and context dimension, the plus and minus finite-difference points.
    lip_stencil: Option<LipStencil>,
}

struct LipStencil {
    n_grid: usize,
    dc: usize,
    step: f64,
    cache: CrossCache,
}

impl<'a> AcquisitionProblem<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        model: &'a SurrogateModel,
        beta: f64,
        x_bounds: BoxDomain,
        c_bounds: BoxDomain,
        center_samples: Vec<Vec<f64>>,
        epsilon: f64,
        lipschitz_mode: LipschitzMode,
        optimizer: MultiStartConfig,
    ) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::input(format!(
                "ambiguity radius must be finite and >= 0, got {epsilon}"
            )));
        }
        if center_samples.is_empty() {
            return Err(Error::input("center sample set must be nonempty"));
        }
        let dc = c_bounds.dim();
        for c in &center_samples {
            if c.len() != dc {
                return Err(Error::input(format!(
                    "center sample has dimension {}, context box has {}",
                    c.len(),
                    dc
                )));
            }
        }
        let dx = x_bounds.dim();
        if let Some(p) = model.points().first() {
            if p.len() != dx + dc {
                return Err(Error::input(format!(
                    "surrogate inputs have dimension {}, bounds imply {}",
                    p.len(),
                    dx + dc
                )));
            }
        }
        if optimizer.n_starts == 0 {
            return Err(Error::input("optimizer needs at least one start"));
        }

        let center_cache = CrossCache::new(model, &center_samples, dx);
        let lip_stencil = match lipschitz_mode {
            LipschitzMode::Analytic => None,
            LipschitzMode::Numeric { grid_per_dim } => {
                let step = 1e-4 * c_bounds.diameter().max(f64::MIN_POSITIVE);
                // Slopes are measured where the ambiguity ball carries mass:
                // the bounding box of the center samples, inflated by the
                // radius. A grid over the full context box instead would let
                // posterior-scale slopes at data-free frontiers dominate the
                // max and erase the penalty's dependence on the decision.
                let lip_box = sample_bounding_box(&center_samples, epsilon)?;
                let mut grid = lip_box.grid(grid_per_dim);
                grid.dedup();
                let mut probes = Vec::with_capacity(grid.len() * dc * 2);
                for g in &grid {
                    for d in 0..dc {
                        let mut plus = g.clone();
                        plus[d] += step;
                        let mut minus = g.clone();
                        minus[d] -= step;
                        probes.push(plus);
                        probes.push(minus);
                    }
                }
                Some(LipStencil {
                    n_grid: grid.len(),
                    dc,
                    step,
                    cache: CrossCache::new(model, &probes, dx),
                })
            }
        };

        Ok(AcquisitionProblem {
            model,
            beta,
            x_bounds,
            c_bounds,
            center_samples,
            epsilon,
            lipschitz_mode,
            optimizer,
            center_cache,
            lip_stencil,
        })
    }

    pub fn x_bounds(&self) -> &BoxDomain {
        &self.x_bounds
    }

    pub fn c_bounds(&self) -> &BoxDomain {
        &self.c_bounds
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn xpart(&self, x: &[f64]) -> XPart {
        let want_exp = self.center_cache.exp_half.is_some();
        XPart::new(self.model, x, self.x_bounds.dim(), want_exp)
    }

    fn ucb_from_cache(&self, cache: &CrossCache, xpart: &XPart, j: usize, col: &mut [f64]) -> Result<f64> {
        cache.fill_column(self.model, xpart, j, col);
        let (mean, std) = self
            .model
            .posterior_from_column(col, self.model.kernel().output_scale())?;
        Ok(mean + self.beta * std)
    }

    /// Mean UCB over the center samples at decision `x`.
    pub fn expected_ucb(&self, x: &[f64]) -> Result<f64> {
        let xpart = self.xpart(x);
        let mut col = vec![0.0; self.model.len()];
        let mut acc = 0.0;
        for j in 0..self.center_samples.len() {
            acc += self.ucb_from_cache(&self.center_cache, &xpart, j, &mut col)?;
        }
        Ok(acc / self.center_samples.len() as f64)
    }

    /// Context-Lipschitz estimate of `c -> UCB(x, c)` at decision `x`.
    pub fn ucb_context_lipschitz(&self, x: &[f64]) -> Result<f64> {
        match self.lipschitz_mode {
            LipschitzMode::Analytic => Ok(2.0
                * self.model.mean_norm_bound()
                * self.model.kernel().lipschitz_constant()),
            LipschitzMode::Numeric { .. } => {
                let stencil = self.lip_stencil.as_ref().expect("built for numeric mode");
                let xpart = self.xpart(x);
                let mut col = vec![0.0; self.model.len()];
                let mut worst: f64 = 0.0;
                for g in 0..stencil.n_grid {
                    let mut grad_sq = 0.0;
                    for d in 0..stencil.dc {
                        let base = (g * stencil.dc + d) * 2;
                        let plus = self.ucb_from_cache(&stencil.cache, &xpart, base, &mut col)?;
                        let minus =
                            self.ucb_from_cache(&stencil.cache, &xpart, base + 1, &mut col)?;
                        let slope = (plus - minus) / (2.0 * stencil.step);
                        grad_sq += slope * slope;
                    }
                    worst = worst.max(grad_sq.sqrt());
                }
                Ok(1.1 * worst)
            }
        }
    }

    /// The robust acquisition value `expected_ucb - epsilon * lipschitz`.
    pub fn robust_value(&self, x: &[f64]) -> Result<f64> {
        let expected = self.expected_ucb(x)?;
        if self.epsilon == 0.0 {
            return Ok(expected);
        }
        Ok(expected - self.epsilon * self.ucb_context_lipschitz(x)?)
    }

    /// Maximize the robust acquisition over the decision box.
    pub fn maximize(&self) -> Result<(Vec<f64>, f64)> {
        multistart_maximize(|x| self.robust_value(x), &self.x_bounds, &self.optimizer)
    }
}

/// Axis-aligned bounding box of a sample set, inflated by `margin` per side.
fn sample_bounding_box(samples: &[Vec<f64>], margin: f64) -> Result<BoxDomain> {
    let d = samples
        .first()
        .ok_or_else(|| Error::input("bounding box of an empty sample set"))?
        .len();
    let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); d];
    for s in samples {
        for (j, &v) in s.iter().enumerate() {
            bounds[j].0 = bounds[j].0.min(v);
            bounds[j].1 = bounds[j].1.max(v);
        }
    }
    for b in bounds.iter_mut() {
        b.0 -= margin;
        b.1 += margin;
    }
    BoxDomain::new(&bounds)
}

/// Deterministic multi-start maximization of a scalar objective over a box:
/// coarse-grid seeding followed by pattern search from the best seeds. Grid
/// ties break toward the lowest index.
pub fn multistart_maximize(
    f: impl Fn(&[f64]) -> Result<f64>,
    bounds: &BoxDomain,
    config: &MultiStartConfig,
) -> Result<(Vec<f64>, f64)> {
    let grid = bounds.grid(config.n_grid_per_dim.max(1));
    let mut scored: Vec<(usize, f64)> = Vec::with_capacity(grid.len());
    for (i, p) in grid.iter().enumerate() {
        scored.push((i, f(p)?));
    }
    // Stable sort: equal values keep grid order.
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let LocalSearch::PatternSearch { max_iters, shrink } = config.local_search;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for &(idx, seed_value) in scored.iter().take(config.n_starts) {
        let (x, v) = pattern_search(&f, bounds, &grid[idx], seed_value, max_iters, shrink)?;
        match &best {
            Some((_, bv)) if *bv >= v => {}
            _ => best = Some((x, v)),
        }
    }
    best.ok_or_else(|| Error::input("empty seed grid"))
}

fn pattern_search(
    f: &impl Fn(&[f64]) -> Result<f64>,
    bounds: &BoxDomain,
    start: &[f64],
    start_value: f64,
    max_iters: usize,
    shrink: f64,
) -> Result<(Vec<f64>, f64)> {
    let d = bounds.dim();
    let widths = bounds.widths();
    let max_width = widths.iter().copied().fold(0.0, f64::max);
    let mut x = bounds.clamp(start);
    let mut fx = start_value;
    let mut steps: Vec<f64> = widths.iter().map(|w| 0.25 * w).collect();
    for _ in 0..max_iters {
        let mut best_move: Option<(usize, f64, f64)> = None; // (dim, coord, value)
        for j in 0..d {
            if steps[j] <= 0.0 {
                continue;
            }
            for sign in [1.0, -1.0] {
                let coord = (x[j] + sign * steps[j]).clamp(bounds.lo()[j], bounds.hi()[j]);
                if coord == x[j] {
                    continue;
                }
                let prev = x[j];
                x[j] = coord;
                let v = f(&x)?;
                x[j] = prev;
                if v > fx && best_move.as_ref().is_none_or(|(_, _, bv)| v > *bv) {
                    best_move = Some((j, coord, v));
                }
            }
        }
        match best_move {
            Some((j, coord, v)) => {
                x[j] = coord;
                fx = v;
            }
            None => {
                for s in steps.iter_mut() {
                    *s *= shrink;
                }
                if steps.iter().copied().fold(0.0, f64::max) < 1e-7 * max_width {
                    break;
                }
            }
        }
    }
    Ok((x, fx))
}

/// Min-over-context robust baseline: maximize over `x` the minimum UCB over a
/// grid discretization of the context set `context_box`.
pub fn stableopt_select(
    model: &SurrogateModel,
    beta: f64,
    x_bounds: &BoxDomain,
    context_box: &BoxDomain,
    context_grid_per_dim: usize,
    optimizer: &MultiStartConfig,
) -> Result<(Vec<f64>, f64)> {
    let probes = context_box.grid(context_grid_per_dim.max(1));
    let dx = x_bounds.dim();
    let cache = CrossCache::new(model, &probes, dx);
    let want_exp = cache.exp_half.is_some();
    let objective = |x: &[f64]| -> Result<f64> {
        let xpart = XPart::new(model, x, dx, want_exp);
        let mut col = vec![0.0; model.len()];
        let mut worst = f64::INFINITY;
        for j in 0..probes.len() {
            cache.fill_column(model, &xpart, j, &mut col);
            let (mean, std) =
                model.posterior_from_column(&col, model.kernel().output_scale())?;
            worst = worst.min(mean + beta * std);
        }
        Ok(worst)
    };
    multistart_maximize(objective, x_bounds, optimizer)
}

/// Per-dimension interval `[mean - std, mean + std]` of the observed contexts
/// (population standard deviation); the full context box when no context has
/// been observed yet.
pub fn stableopt_context_box(history: &[Vec<f64>], c_bounds: &BoxDomain) -> BoxDomain {
    if history.is_empty() {
        return c_bounds.clone();
    }
    let d = c_bounds.dim();
    let n = history.len() as f64;
    let mut bounds = Vec::with_capacity(d);
    for j in 0..d {
        let mean = history.iter().map(|c| c[j]).sum::<f64>() / n;
        let var = history.iter().map(|c| (c[j] - mean).powi(2)).sum::<f64>() / n;
        let std = var.sqrt();
        bounds.push((mean - std, mean + std));
    }
    BoxDomain::new(&bounds).expect("mean +/- std is a valid interval")
}

/// Context-blind baseline: maximize `mean + beta * std` of a surrogate fitted
/// on decisions only.
pub fn gpucb_select(
    model_x_only: &SurrogateModel,
    beta: f64,
    x_bounds: &BoxDomain,
    optimizer: &MultiStartConfig,
) -> Result<(Vec<f64>, f64)> {
    multistart_maximize(
        |x| model_x_only.ucb(x, beta),
        x_bounds,
        optimizer,
    )
}
