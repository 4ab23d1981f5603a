//! Fast self-contained checks runnable from the CLI. A thin subset of the
//! full test suite: each check is cheap and exercises one library invariant.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::ambiguity::wasserstein_1d;
use crate::error::{Error, Result};
use crate::harness::ExperimentConfig;
use crate::kernel::{KernelFamily, KernelSpec};
use crate::surrogate::{SurrogateModel, SurrogateParams};

fn check(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::numerical(msg.to_string()))
    }
}

fn kernel_invariants() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for kernel in [
        KernelSpec::squared_exponential(0.3)?,
        KernelSpec::new(KernelFamily::Matern52, vec![0.5, 1.1])?,
    ] {
        let lip = kernel.lipschitz_constant();
        for _ in 0..500 {
            let a: Vec<f64> = (0..2).map(|_| rng.random_range(0.0..1.0)).collect();
            let b: Vec<f64> = (0..2).map(|_| rng.random_range(0.0..1.0)).collect();
            let k_ab = kernel.eval(&a, &b)?;
            check(k_ab.abs() <= 1.0 + 1e-12, "kernel boundedness violated")?;
            check(
                (k_ab - kernel.eval(&b, &a)?).abs() == 0.0,
                "kernel symmetry violated",
            )?;
            let norm: f64 = a
                .iter()
                .zip(&b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            check(
                kernel.feature_distance(&a, &b)? <= lip * norm + 1e-9,
                "feature-map Lipschitz property violated",
            )?;
        }
        // PSD via shifted Cholesky on a random point set.
        let pts: Vec<Vec<f64>> = (0..15)
            .map(|_| (0..2).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let gram = kernel.gram(&pts)?;
        check(
            crate::linalg::CholeskyFactor::factor(&gram, 1e-9).is_ok(),
            "gram matrix not positive semidefinite within tolerance",
        )?;
    }
    Ok(())
}

fn variance_monotonicity() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let kernel = KernelSpec::squared_exponential(0.25)?;
    let mut model = SurrogateModel::prior(kernel, SurrogateParams::default())?;
    let probes: Vec<Vec<f64>> = (0..20)
        .map(|_| vec![rng.random_range(0.0..1.0)])
        .collect();
    let mut last: Vec<f64> = probes
        .iter()
        .map(|p| model.posterior_std(p))
        .collect::<Result<_>>()?;
    for _ in 0..12 {
        let z = vec![rng.random_range(0.0..1.0)];
        model = model.update(&z, rng.random_range(-1.0..1.0))?;
        for (i, p) in probes.iter().enumerate() {
            let s = model.posterior_std(p)?;
            check(s <= last[i] + 1e-9, "posterior scale increased after update")?;
            last[i] = s;
        }
    }
    Ok(())
}

fn wasserstein_metric_axioms() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..50 {
        let a: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ab = wasserstein_1d(&a, &b)?;
        let ba = wasserstein_1d(&b, &a)?;
        let ac = wasserstein_1d(&a, &c)?;
        let cb = wasserstein_1d(&c, &b)?;
        check((ab - ba).abs() <= 1e-12, "wasserstein symmetry violated")?;
        check(ab <= ac + cb + 1e-9, "wasserstein triangle inequality violated")?;
    }
    Ok(())
}

fn zero_radius_matches_plain_expected_ucb() -> Result<()> {
    let rc = ExperimentConfig::from_json(
        r#"{
            "env": "three_humps",
            "algos": ["wdrbo", "erbo"],
            "ambiguity": {"center": "empirical", "radius": {"constant": 0.0}},
            "horizon": 5,
            "seeds": [1],
            "panel_size": 400,
            "oracle_grid": 201,
            "acquisition": {"optimizer": {"starts": 2, "grid": 9}, "lipschitz_grid": 8}
        }"#,
    )?
    .resolve(false)?;
    let runs = crate::harness::run_experiment(&rc)?;
    let (a, b) = (&runs[0].traces[0], &runs[1].traces[0]);
    for (sa, sb) in a.steps.iter().zip(&b.steps) {
        check(sa.x == sb.x && sa.y == sb.y, "zero-radius run diverged from plain run")?;
    }
    Ok(())
}

/// Run the fast check subset; returns `(name, outcome)` per check.
pub fn run_selftest() -> Vec<(&'static str, Result<()>)> {
    vec![
        ("kernel invariants (bounded, symmetric, PSD, Lipschitz)", kernel_invariants()),
        ("posterior scale monotone under updates", variance_monotonicity()),
        ("1-d wasserstein metric axioms", wasserstein_metric_axioms()),
        ("zero ambiguity radius degenerates to plain rule", zero_radius_matches_plain_expected_ucb()),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_is_green() {
        for (name, outcome) in super::run_selftest() {
            assert!(outcome.is_ok(), "{name}: {:?}", outcome.err());
        }
    }
}
