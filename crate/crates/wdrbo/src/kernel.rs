//! Positive-definite stationary kernels on the joint decision-context space.
//!
//! Both families are bounded (`k(z, z) <= output_scale`, with unit output
//! scale by default) and satisfy the feature-map Lipschitz property
//! `||k(., z) - k(., z')||_H <= L ||z - z'||`; [`KernelSpec::lipschitz_constant`]
//! returns a valid such `L`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Kernel family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelFamily {
    #[serde(rename = "se")]
    SquaredExponential,
    #[serde(rename = "matern52")]
    Matern52,
}

/// A stationary kernel with per-dimension lengthscales.
///
/// A single lengthscale is treated as isotropic across all input dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    lengthscales: Vec<f64>,
    output_scale: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, lengthscales: Vec<f64>) -> Result<Self> {
        Self::with_output_scale(family, lengthscales, 1.0)
    }

    pub fn with_output_scale(
        family: KernelFamily,
        lengthscales: Vec<f64>,
        output_scale: f64,
    ) -> Result<Self> {
        if lengthscales.is_empty() {
            return Err(Error::input("kernel needs at least one lengthscale"));
        }
        for (i, &l) in lengthscales.iter().enumerate() {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::input(format!(
                    "lengthscale {i} must be strictly positive, got {l}"
                )));
            }
        }
        if !(output_scale > 0.0) || !output_scale.is_finite() {
            return Err(Error::input(format!(
                "output scale must be strictly positive, got {output_scale}"
            )));
        }
        Ok(KernelSpec {
            family,
            lengthscales,
            output_scale,
        })
    }

    /// Isotropic squared-exponential kernel.
    pub fn squared_exponential(lengthscale: f64) -> Result<Self> {
        Self::new(KernelFamily::SquaredExponential, vec![lengthscale])
    }

    /// Isotropic Matern 5/2 kernel.
    pub fn matern52(lengthscale: f64) -> Result<Self> {
        Self::new(KernelFamily::Matern52, vec![lengthscale])
    }

    pub fn lengthscales(&self) -> &[f64] {
        &self.lengthscales
    }

    pub fn output_scale(&self) -> f64 {
        self.output_scale
    }

    #[inline]
    fn lengthscale_for(&self, dim: usize) -> f64 {
        if self.lengthscales.len() == 1 {
            self.lengthscales[0]
        } else {
            self.lengthscales[dim]
        }
    }

    fn check_dims(&self, a: &[f64], b: &[f64]) -> Result<()> {
        if a.len() != b.len() {
            return Err(Error::input(format!(
                "kernel arguments differ in dimension: {} vs {}",
                a.len(),
                b.len()
            )));
        }
        if self.lengthscales.len() > 1 && self.lengthscales.len() != a.len() {
            return Err(Error::input(format!(
                "kernel has {} lengthscales but points have dimension {}",
                self.lengthscales.len(),
                a.len()
            )));
        }
        Ok(())
    }

    /// Squared lengthscale-weighted distance over a contiguous slice of
    /// dimensions; `offset` positions the slice within the full input so
    /// anisotropic lengthscales line up.
    pub fn scaled_sqdist_slice(&self, a: &[f64], b: &[f64], offset: usize) -> f64 {
        let mut s = 0.0;
        for (i, (x, y)) in a.iter().zip(b).enumerate() {
            let l = self.lengthscale_for(offset + i);
            let d = (x - y) / l;
            s += d * d;
        }
        s
    }

    /// Kernel value as a function of the scaled squared distance.
    #[inline]
    pub fn eval_scaled_sqdist(&self, s2: f64) -> f64 {
        self.output_scale * self.profile(s2.sqrt())
    }

    /// Stationary profile `r(u)` on the scaled distance `u`, with `r(0) = 1`.
    #[inline]
    fn profile(&self, u: f64) -> f64 {
        match self.family {
            KernelFamily::SquaredExponential => (-0.5 * u * u).exp(),
            KernelFamily::Matern52 => {
                let a = 5.0f64.sqrt() * u;
                (1.0 + a + a * a / 3.0) * (-a).exp()
            }
        }
    }

    /// Second derivative of the unit-lengthscale profile; used by the
    /// Lipschitz-constant grid maximization.
    fn profile_second_derivative(&self, u: f64) -> f64 {
        match self.family {
            KernelFamily::SquaredExponential => (u * u - 1.0) * (-0.5 * u * u).exp(),
            KernelFamily::Matern52 => {
                let a = 5.0f64.sqrt();
                -(5.0 / 3.0) * (-a * u).exp() * (1.0 + a * u - 5.0 * u * u)
            }
        }
    }

    /// Evaluate `k(a, b)`.
    pub fn eval(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        self.check_dims(a, b)?;
        Ok(self.eval_scaled_sqdist(self.scaled_sqdist_slice(a, b, 0)))
    }

    /// Gram matrix of a point set. The empty set yields a 0x0 matrix.
    pub fn gram(&self, points: &[Vec<f64>]) -> Result<Matrix> {
        if let Some(first) = points.first() {
            for p in points {
                self.check_dims(first, p)?;
            }
        }
        let n = points.len();
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            g.set(i, i, self.output_scale);
            for j in 0..i {
                let v =
                    self.eval_scaled_sqdist(self.scaled_sqdist_slice(&points[i], &points[j], 0));
                g.set(i, j, v);
                g.set(j, i, v);
            }
        }
        Ok(g)
    }

    /// Kernel-induced feature distance `sqrt(k(a,a) + k(b,b) - 2 k(a,b))`.
    ///
    /// A mildly negative radicand (above `-1e-12`) is clamped to zero;
    /// anything lower is reported as a numerical error.
    pub fn feature_distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        let k_ab = self.eval(a, b)?;
        let radicand = 2.0 * self.output_scale - 2.0 * k_ab;
        if radicand < -1e-12 {
            return Err(Error::numerical(format!(
                "feature distance radicand {radicand:.3e} below tolerance"
            )));
        }
        Ok(radicand.max(0.0).sqrt())
    }

    /// A constant `L` with `feature_distance(a, b) <= L ||a - b||` everywhere.
    ///
    /// For the squared-exponential family this is the closed form
    /// `1 / min(lengthscale)`. For Matern 5/2 the unit-profile constant
    /// `max_u sqrt(-r''(u))` is found on a dense grid and rescaled by the
    /// smallest lengthscale.
    pub fn lipschitz_constant(&self) -> f64 {
        let min_l = self
            .lengthscales
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let unit_constant = match self.family {
            KernelFamily::SquaredExponential => 1.0,
            KernelFamily::Matern52 => {
                // -r'' is maximal at 0 and decays within a few lengthscale
                // units, so a grid over [0, 10] brackets the maximum.
                let n = 10_000;
                let mut best: f64 = 0.0;
                for k in 0..n {
                    let u = 10.0 * (k as f64) / ((n - 1) as f64);
                    let neg = -self.profile_second_derivative(u);
                    if neg > best {
                        best = neg;
                    }
                }
                best.sqrt()
            }
        };
        self.output_scale.sqrt() * unit_constant / min_l
    }
}
