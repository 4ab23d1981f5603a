//! Black-box objectives with an exogenous context, plus the context
//! distributions and noisy observation model used by the experiment runner.
//!
//! The framework maximizes. Benchmark functions that are conventionally
//! minimized (the camel, Ackley, Branin, Hartmann) are negated inside their
//! environments; the raw forms stay available for direct checks.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::domain::BoxDomain;
use crate::error::{Error, Result};

/// The true context-generating distribution, independent per dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum ContextSampler {
    Normal { mean: f64, std: f64 },
    ClippedNormal { mean: f64, std: f64, lo: f64, hi: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl ContextSampler {
    pub fn sample<R: Rng>(&self, dim: usize, rng: &mut R) -> Vec<f64> {
        match self {
            ContextSampler::Normal { mean, std } => {
                let n = Normal::new(*mean, *std).expect("finite parameters");
                (0..dim).map(|_| n.sample(rng)).collect()
            }
            ContextSampler::ClippedNormal { mean, std, lo, hi } => {
                let n = Normal::new(*mean, *std).expect("finite parameters");
                (0..dim).map(|_| n.sample(rng).clamp(*lo, *hi)).collect()
            }
            ContextSampler::Uniform { lo, hi } => {
                (0..dim).map(|_| rng.random_range(*lo..=*hi)).collect()
            }
        }
    }
}

type Objective = Box<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// A black-box objective `f(x, c)` with its domains, true context
/// distribution, and observation-noise level.
pub struct Environment {
    pub name: String,
    objective: Objective,
    pub x_bounds: BoxDomain,
    pub c_bounds: BoxDomain,
    pub true_context: ContextSampler,
    pub noise_std: f64,
    /// Ambiguity-ball center suggested by the problem definition, when the
    /// setting fixes one (mean, std of an independent normal per dimension).
    pub center_hint: Option<(f64, f64)>,
}

impl Environment {
    pub fn new(
        name: impl Into<String>,
        objective: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
        x_bounds: BoxDomain,
        c_bounds: BoxDomain,
        true_context: ContextSampler,
        noise_std: f64,
    ) -> Self {
        Environment {
            name: name.into(),
            objective: Box::new(objective),
            x_bounds,
            c_bounds,
            true_context,
            noise_std,
            center_hint: None,
        }
    }

    pub fn objective(&self, x: &[f64], c: &[f64]) -> f64 {
        (self.objective)(x, c)
    }

    pub fn sample_context<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.true_context.sample(self.c_bounds.dim(), rng)
    }

    /// Noisy observation `f(x, c) + eta`, `eta ~ N(0, noise_std^2)`.
    pub fn observe<R: Rng>(&self, x: &[f64], c: &[f64], rng: &mut R) -> Result<f64> {
        if !self.x_bounds.contains(x) {
            return Err(Error::input(format!(
                "query {x:?} outside decision bounds of `{}`",
                self.name
            )));
        }
        let noise = if self.noise_std > 0.0 {
            Normal::new(0.0, self.noise_std)
                .expect("validated noise std")
                .sample(rng)
        } else {
            0.0
        };
        Ok(self.objective(x, c) + noise)
    }
}

impl std::fmt::Debug for Environment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Environment")
            .field("name", &self.name)
            .field("x_bounds", &self.x_bounds)
            .field("c_bounds", &self.c_bounds)
            .field("noise_std", &self.noise_std)
            .finish_non_exhaustive()
    }
}

const DEFAULT_NOISE_STD: f64 = 0.01;

/// The general-setting problem: a fixed parametric ambiguity center that
/// differs from the true context distribution, so the distributional
/// mismatch never vanishes.
///
/// `f(x, c) = 1 - |c - 0.5| / (|x| + 0.2) - sqrt(|x| + 0.05)` on
/// `x in [-1, 1]` with contexts drawn (unclipped) from `N(0.6, 0.2)`; the
/// context box `[0, 1.2]` is the working range used by grids and
/// normalization (three standard deviations around the true mean), not a
/// support constraint.
pub fn general_setting_env() -> Environment {
    let mut env = Environment::new(
        "general",
        |x: &[f64], c: &[f64]| {
            1.0 - (c[0] - 0.5).abs() / (x[0].abs() + 0.2) - (x[0].abs() + 0.05).sqrt()
        },
        BoxDomain::new(&[(-1.0, 1.0)]).unwrap(),
        BoxDomain::new(&[(0.0, 1.2)]).unwrap(),
        ContextSampler::Normal {
            mean: 0.6,
            std: 0.2,
        },
        DEFAULT_NOISE_STD,
    );
    env.center_hint = Some((0.5, 0.1));
    env
}

/// Three-hump camel with a linear-plus-quadratic context coupling, restricted
/// to `x in [-1, 1]`, `c in [-1, 1]`, uniform context. Negated so that the
/// camel's global minimum at the origin becomes the maximizer.
pub fn three_humps_env() -> Environment {
    Environment::new(
        "three_humps",
        |x: &[f64], c: &[f64]| -three_humps_camel(x[0], c[0]),
        BoxDomain::new(&[(-1.0, 1.0)]).unwrap(),
        BoxDomain::new(&[(-1.0, 1.0)]).unwrap(),
        ContextSampler::Uniform { lo: -1.0, hi: 1.0 },
        DEFAULT_NOISE_STD,
    )
}

/// `2x^2 - 1.05x^4 + x^6/6 + xc + c^2`, the camel's restricted-domain form.
pub fn three_humps_camel(x: f64, c: f64) -> f64 {
    2.0 * x * x - 1.05 * x.powi(4) + x.powi(6) / 6.0 + x * c + c * c
}

/// Standard Ackley function (global minimum 0 at the origin).
pub fn ackley(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let sum_sq: f64 = v.iter().map(|x| x * x).sum();
    let sum_cos: f64 = v
        .iter()
        .map(|x| (2.0 * std::f64::consts::PI * x).cos())
        .sum();
    -20.0 * (-0.2 * (sum_sq / n).sqrt()).exp() - (sum_cos / n).exp()
        + 20.0
        + std::f64::consts::E
}

/// Standard 2-D Branin function (three global minima with value ~0.397887).
pub fn branin(x1: f64, x2: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let b = 5.1 / (4.0 * pi * pi);
    let c = 5.0 / pi;
    let t = 1.0 / (8.0 * pi);
    (x2 - b * x1 * x1 + c * x1 - 6.0).powi(2) + 10.0 * (1.0 - t) * x1.cos() + 10.0
}

/// Standard 3-D Hartmann function (global minimum ~-3.86278).
pub fn hartmann3(v: &[f64]) -> f64 {
    let alpha = [1.0, 1.2, 3.0, 3.2];
    let a = [
        [3.0, 10.0, 30.0],
        [0.1, 10.0, 35.0],
        [3.0, 10.0, 30.0],
        [0.1, 10.0, 35.0],
    ];
    let p = [
        [0.3689, 0.1170, 0.2673],
        [0.4699, 0.4387, 0.7470],
        [0.1091, 0.8732, 0.5547],
        [0.0381, 0.5743, 0.8828],
    ];
    let mut outer = 0.0;
    for i in 0..4 {
        let mut inner = 0.0;
        for j in 0..3 {
            inner += a[i][j] * (v[j] - p[i][j]).powi(2);
        }
        outer += alpha[i] * (-inner).exp();
    }
    -outer
}

fn clipped_unit_normal() -> ContextSampler {
    ContextSampler::ClippedNormal {
        mean: 0.5,
        std: 0.2,
        lo: 0.0,
        hi: 1.0,
    }
}

/// Ackley with the trailing input replaced by the context: the context in
/// `[0, 1]` maps affinely onto the Ackley coordinate `[-1, 1]`, so `c = 0.5`
/// is the coupling-neutral value.
pub fn ackley_env() -> Environment {
    Environment::new(
        "ackley",
        |x: &[f64], c: &[f64]| -ackley(&[x[0], 2.0 * c[0] - 1.0]),
        BoxDomain::new(&[(-2.0, 2.0)]).unwrap(),
        BoxDomain::unit(1),
        clipped_unit_normal(),
        DEFAULT_NOISE_STD,
    )
}

/// Branin with each input shifted by its context: `c = 0.5` per dimension is
/// neutral and recovers the standard function.
pub fn modified_branin_env() -> Environment {
    Environment::new(
        "branin",
        |x: &[f64], c: &[f64]| -branin(x[0] + (2.0 * c[0] - 1.0), x[1] + (2.0 * c[1] - 1.0)),
        BoxDomain::new(&[(-5.0, 10.0), (0.0, 15.0)]).unwrap(),
        BoxDomain::unit(2),
        clipped_unit_normal(),
        DEFAULT_NOISE_STD,
    )
}

/// Hartmann 3-D with its last coordinate handed to the context.
pub fn hartmann3_env() -> Environment {
    Environment::new(
        "hartmann",
        |x: &[f64], c: &[f64]| -hartmann3(&[x[0], x[1], c[0]]),
        BoxDomain::unit(2),
        BoxDomain::unit(1),
        clipped_unit_normal(),
        DEFAULT_NOISE_STD,
    )
}

/// The synthetic benchmark environments with clipped-normal contexts.
pub fn synthetic_suite() -> Vec<Environment> {
    vec![ackley_env(), modified_branin_env(), hartmann3_env()]
}

/// Look an environment up by its config name.
pub fn by_name(name: &str) -> Result<Environment> {
    match name {
        "general" => Ok(general_setting_env()),
        "three_humps" => Ok(three_humps_env()),
        "ackley" => Ok(ackley_env()),
        "branin" => Ok(modified_branin_env()),
        "hartmann" => Ok(hartmann3_env()),
        other => Err(Error::input(format!(
            "unknown environment `{other}` (expected general, three_humps, ackley, branin, hartmann)"
        ))),
    }
}
